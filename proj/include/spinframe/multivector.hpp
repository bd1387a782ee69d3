#pragma once
#include <bit>
#include <cmath>
#include <cstdint>
#include <map>
#include <string>
#include <utility>

#include "spinframe/errors.hpp"
#include "spinframe/signature.hpp"

namespace spinframe {

using BladeMask = std::uint32_t;

struct BladeProduct {
  int sign;         // +1 or -1
  BladeMask blade;  // a XOR b
};

// Signed product of two basis blades. The sign is the parity of the
// transpositions needed to interleave `b` past `a` into ascending order,
// times the metric factor of every generator the blades share.
inline BladeProduct blade_product(BladeMask a, BladeMask b, const Signature& sig) {
  int sign = 1;
  BladeMask rest = a >> 1;
  int swaps = 0;
  while (rest != 0) {
    swaps += std::popcount(rest & b);
    rest >>= 1;
  }
  if (swaps & 1) sign = -sign;
  BladeMask common = a & b;
  while (common != 0) {
    int i = std::countr_zero(common);
    sign *= sig.metric(i);
    common &= common - 1;
  }
  return {sign, a ^ b};
}

inline int blade_grade(BladeMask m) { return std::popcount(m); }

// Zero test used for term pruning; overloaded for dual coefficients via ADL.
inline bool exact_zero(double v) { return v == 0.0; }

// Sparse multivector over Cl(p,q): a map from blade mask to coefficient.
// The coefficient type is a template parameter so the same arithmetic
// runs over plain doubles and over dual numbers. Terms with an exactly
// zero coefficient are never stored; no epsilon pruning happens inside
// arithmetic.
template <class T>
class BasicMultivector {
 public:
  using TermMap = std::map<BladeMask, T>;

  explicit BasicMultivector(Signature sig) : sig_(std::move(sig)) {}

  static BasicMultivector scalar(const Signature& sig, const T& v) {
    BasicMultivector m(sig);
    m.set(0, v);
    return m;
  }

  static BasicMultivector blade(const Signature& sig, BladeMask mask, const T& v) {
    BasicMultivector m(sig);
    m.set(mask, v);
    return m;
  }

  static BasicMultivector generator(const Signature& sig, int i) {
    return blade(sig, BladeMask{1} << i, T(1.0));
  }

  const Signature& signature() const { return sig_; }
  const TermMap& terms() const { return terms_; }
  bool empty() const { return terms_.empty(); }

  T coeff(BladeMask mask) const {
    auto it = terms_.find(mask);
    return it == terms_.end() ? T{} : it->second;
  }

  void set(BladeMask mask, const T& v) {
    check_mask(mask);
    if (exact_zero(v))
      terms_.erase(mask);
    else
      terms_[mask] = v;
  }

  void add(BladeMask mask, const T& v) {
    check_mask(mask);
    auto it = terms_.find(mask);
    if (it == terms_.end()) {
      if (!exact_zero(v)) terms_.emplace(mask, v);
      return;
    }
    it->second = it->second + v;
    if (exact_zero(it->second)) terms_.erase(it);
  }

  BasicMultivector operator+(const BasicMultivector& o) const {
    require_same_signature(o);
    BasicMultivector r = *this;
    for (const auto& [m, c] : o.terms_) r.add(m, c);
    return r;
  }

  BasicMultivector operator-(const BasicMultivector& o) const {
    require_same_signature(o);
    BasicMultivector r = *this;
    for (const auto& [m, c] : o.terms_) r.add(m, T(-1.0) * c);
    return r;
  }

  BasicMultivector operator-() const {
    BasicMultivector r(sig_);
    for (const auto& [m, c] : terms_) r.terms_.emplace(m, T(-1.0) * c);
    return r;
  }

  BasicMultivector operator*(const BasicMultivector& o) const {
    require_same_signature(o);
    BasicMultivector r(sig_);
    for (const auto& [ma, ca] : terms_) {
      for (const auto& [mb, cb] : o.terms_) {
        auto [sign, mask] = blade_product(ma, mb, sig_);
        r.add(mask, sign > 0 ? ca * cb : T(-1.0) * (ca * cb));
      }
    }
    return r;
  }

  friend BasicMultivector operator*(const T& s, const BasicMultivector& m) {
    BasicMultivector r(m.sig_);
    for (const auto& [mask, c] : m.terms_) r.add(mask, s * c);
    return r;
  }
  friend BasicMultivector operator*(const BasicMultivector& m, const T& s) { return s * m; }

  // Grade-k part: the restriction to masks of popcount k.
  BasicMultivector grade(int k) const {
    BasicMultivector r(sig_);
    for (const auto& [m, c] : terms_)
      if (blade_grade(m) == k) r.terms_.emplace(m, c);
    return r;
  }

  bool even() const {
    for (const auto& [m, c] : terms_)
      if (blade_grade(m) & 1) return false;
    return true;
  }

  // Largest grade with a stored term, -1 for zero.
  int top_grade() const {
    int g = -1;
    for (const auto& [m, c] : terms_) g = std::max(g, blade_grade(m));
    return g;
  }

 private:
  void check_mask(BladeMask mask) const {
    if (mask >= sig_.blade_count())
      throw AlgebraError("blade mask out of range for signature of dimension " +
                         std::to_string(sig_.dim()));
  }
  void require_same_signature(const BasicMultivector& o) const {
    if (sig_ != o.sig_) throw AlgebraError("multivectors belong to different algebras");
  }

  Signature sig_;
  TermMap terms_;
};

using Multivector = BasicMultivector<double>;

// Reversion: each grade-k term picks up (-1)^{k(k-1)/2}.
template <class T>
BasicMultivector<T> reverse(const BasicMultivector<T>& a) {
  BasicMultivector<T> r(a.signature());
  for (const auto& [m, c] : a.terms()) {
    int k = blade_grade(m);
    r.set(m, (k * (k - 1) / 2) & 1 ? T(-1.0) * c : c);
  }
  return r;
}

template <class T>
BasicMultivector<T> grade_project(const BasicMultivector<T>& a, int k) {
  return a.grade(k);
}

// psi~ v psi, the frame deformation by an even element.
template <class T>
BasicMultivector<T> sandwich(const BasicMultivector<T>& psi, const BasicMultivector<T>& v) {
  return reverse(psi) * v * psi;
}

inline double infinity_norm(const Multivector& a) {
  double n = 0.0;
  for (const auto& [m, c] : a.terms()) n = std::max(n, std::fabs(c));
  return n;
}

inline double max_abs_diff(const Multivector& a, const Multivector& b) {
  return infinity_norm(a - b);
}

// Scalar (grade-0) coefficient.
inline double scalar_part(const Multivector& a) { return a.coeff(0); }

// Symmetrized product contraction of two vectors: grade-0 of (ab+ba)/2.
inline double dot(const Multivector& a, const Multivector& b) {
  return 0.5 * (scalar_part(a * b) + scalar_part(b * a));
}

// Display cleanup: drop terms below `eps`. Not used inside arithmetic.
inline Multivector cleaned(const Multivector& a, double eps) {
  Multivector r(a.signature());
  for (const auto& [m, c] : a.terms())
    if (std::fabs(c) > eps) r.set(m, c);
  return r;
}

// Power-series exponential of an even-grade multivector. Stops once the
// next term falls below 1e-16 * (1 + running max coefficient); gives up
// after 200 terms.
inline Multivector exp_even(const Multivector& b) {
  if (!b.even()) throw AlgebraError("exp_even requires an even-grade argument");
  Multivector sum = Multivector::scalar(b.signature(), 1.0);
  Multivector term = sum;
  double running_max = 1.0;
  for (int n = 1; n <= 200; ++n) {
    term = term * b;
    term = (1.0 / n) * term;
    double tn = infinity_norm(term);
    if (tn < 1e-16 * (1.0 + running_max)) return sum;
    sum = sum + term;
    running_max = std::max(running_max, infinity_norm(sum));
  }
  throw ConvergenceError("exp_even did not converge within 200 terms (last term norm " +
                         std::to_string(infinity_norm(term)) + ")");
}

}  // namespace spinframe
