#pragma once
#include <array>
#include <cmath>

namespace spinframe {

// Forward-mode dual number carrying partial derivatives with respect to
// the four submanifold coordinates. Nesting (Dual<Dual<double>>) yields
// exact second derivatives.
template <class T>
struct Dual {
  T v{};
  std::array<T, 4> d{};

  Dual() = default;
  Dual(double c) : v(c) {}  // constants have zero gradient
  Dual(T value, std::array<T, 4> grad) : v(std::move(value)), d(std::move(grad)) {}

  Dual operator-() const { return {T(-1.0) * v, {T(-1.0) * d[0], T(-1.0) * d[1], T(-1.0) * d[2], T(-1.0) * d[3]}}; }

  friend Dual operator+(const Dual& a, const Dual& b) {
    return {a.v + b.v, {a.d[0] + b.d[0], a.d[1] + b.d[1], a.d[2] + b.d[2], a.d[3] + b.d[3]}};
  }
  friend Dual operator-(const Dual& a, const Dual& b) {
    return {a.v - b.v, {a.d[0] - b.d[0], a.d[1] - b.d[1], a.d[2] - b.d[2], a.d[3] - b.d[3]}};
  }
  friend Dual operator*(const Dual& a, const Dual& b) {
    Dual r;
    r.v = a.v * b.v;
    for (int k = 0; k < 4; ++k) r.d[k] = a.d[k] * b.v + a.v * b.d[k];
    return r;
  }
  friend Dual operator/(const Dual& a, const Dual& b) {
    Dual r;
    r.v = a.v / b.v;
    for (int k = 0; k < 4; ++k) r.d[k] = (a.d[k] - r.v * b.d[k]) / b.v;
    return r;
  }
};

using Dual4 = Dual<double>;
using Dual4x2 = Dual<Dual4>;  // value + first derivs, each again a dual

inline double scalar_value(double v) { return v; }
template <class T>
double scalar_value(const Dual<T>& a) {
  return scalar_value(a.v);
}

namespace dual_detail {
inline bool all_zero(double v) { return v == 0.0; }
template <class T>
bool all_zero(const Dual<T>& a) {
  if (!all_zero(a.v)) return false;
  for (const auto& g : a.d)
    if (!all_zero(g)) return false;
  return true;
}
}  // namespace dual_detail

template <class T>
bool exact_zero(const Dual<T>& a) {
  return dual_detail::all_zero(a);
}

template <class T>
Dual<T> sqrt(const Dual<T>& a) {
  using std::sqrt;
  Dual<T> r;
  r.v = sqrt(a.v);
  T half_inv = T(0.5) / r.v;
  for (int k = 0; k < 4; ++k) r.d[k] = a.d[k] * half_inv;
  return r;
}

template <class T>
Dual<T> sin(const Dual<T>& a) {
  using std::cos;
  using std::sin;
  Dual<T> r;
  r.v = sin(a.v);
  T c = cos(a.v);
  for (int k = 0; k < 4; ++k) r.d[k] = a.d[k] * c;
  return r;
}

template <class T>
Dual<T> cos(const Dual<T>& a) {
  using std::cos;
  using std::sin;
  Dual<T> r;
  r.v = cos(a.v);
  T s = T(-1.0) * sin(a.v);
  for (int k = 0; k < 4; ++k) r.d[k] = a.d[k] * s;
  return r;
}

template <class T>
Dual<T> exp(const Dual<T>& a) {
  using std::exp;
  Dual<T> r;
  r.v = exp(a.v);
  for (int k = 0; k < 4; ++k) r.d[k] = a.d[k] * r.v;
  return r;
}

template <class T>
Dual<T> tanh(const Dual<T>& a) {
  using std::tanh;
  Dual<T> r;
  r.v = tanh(a.v);
  T sech2 = T(1.0) - r.v * r.v;
  for (int k = 0; k < 4; ++k) r.d[k] = a.d[k] * sech2;
  return r;
}

template <class T>
Dual<T> cosh(const Dual<T>& a) {
  using std::cosh;
  using std::sinh;
  Dual<T> r;
  r.v = cosh(a.v);
  T s = sinh(a.v);
  for (int k = 0; k < 4; ++k) r.d[k] = a.d[k] * s;
  return r;
}

template <class T>
Dual<T> sinh(const Dual<T>& a) {
  using std::cosh;
  using std::sinh;
  Dual<T> r;
  r.v = sinh(a.v);
  T c = cosh(a.v);
  for (int k = 0; k < 4; ++k) r.d[k] = a.d[k] * c;
  return r;
}

// Integer power by repeated multiplication; negative exponents via the
// reciprocal. Division-by-zero checks live in the expression evaluator.
template <class T>
T pow_int(const T& base, int n) {
  if (n < 0) return T(1.0) / pow_int(base, -n);
  T acc(1.0);
  T b = base;
  int e = n;
  while (e > 0) {
    if (e & 1) acc = acc * b;
    b = b * b;
    e >>= 1;
  }
  return acc;
}

// Coordinate-variable seeds for the three evaluation orders.
inline void seed_variable(double& out, double xj, int) { out = xj; }

inline void seed_variable(Dual4& out, double xj, int j) {
  out = Dual4{};
  out.v = xj;
  out.d[j] = 1.0;
}

// Second-order seed: value carries first derivatives, outer slots carry
// the derivative-of-derivative structure.
inline void seed_variable(Dual4x2& out, double xj, int j) {
  out = Dual4x2{};
  out.v.v = xj;
  out.v.d[j] = 1.0;
  out.d[j].v = 1.0;
}

}  // namespace spinframe
