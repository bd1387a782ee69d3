#include "spinframe/spin_field.hpp"

#include <cmath>

namespace spinframe {

namespace {

BladeMask mask_of(int i, int j) { return (BladeMask{1} << i) | (BladeMask{1} << j); }

template <class T>
BasicMultivector<T> evaluate_node(const SpinFieldSpec::Node& node, const Vec4& x);

// exp((theta/2) b) for a single basis blade b: b*b is +-1, so the series
// collapses to circular or hyperbolic functions of theta/2.
template <class T>
BasicMultivector<T> rotation_value(const RotationSpec& r, const Vec4& x) {
  using std::cos;
  using std::cosh;
  using std::sin;
  using std::sinh;
  const Signature& sig = Signature::ambient();
  T half = eval_as<T>(r.angle, x) * T(0.5);
  BladeMask m = mask_of(r.plane_i, r.plane_j);
  int square = blade_product(m, m, sig).sign;
  BasicMultivector<T> out(sig);
  if (square < 0) {
    out.set(0, cos(half));
    out.set(m, sin(half));
  } else {
    out.set(0, cosh(half));
    out.set(m, sinh(half));
  }
  return out;
}

template <class T>
BasicMultivector<T> type_a_value(const TypeASpec& a, const Vec4& x) {
  const Signature& sig = Signature::ambient();
  BasicMultivector<T> out(sig);
  out.set(0, eval_as<T>(a.f, x));
  for (int mu = 0; mu < 4; ++mu)
    out.add(mask_of(mu, a.normal_index), eval_as<T>(a.fA[static_cast<std::size_t>(mu)], x));
  return out;
}

template <class T>
BasicMultivector<T> type_b_value(const TypeBSpec& b, const Vec4& x) {
  const Signature& sig = Signature::ambient();
  BasicMultivector<T> out(sig);
  out.set(0, eval_as<T>(b.f, x));
  for (int k = 4; k < 10; ++k)
    out.add(mask_of(b.tangent_index, k), eval_as<T>(b.fB[static_cast<std::size_t>(k - 4)], x));
  return out;
}

template <class T>
BasicMultivector<T> constant_value(const ConstantSpec& c) {
  BasicMultivector<T> out(c.value.signature());
  for (const auto& [m, coeff] : c.value.terms()) out.set(m, T(coeff));
  return out;
}

template <class T>
BasicMultivector<T> evaluate_node(const SpinFieldSpec::Node& node, const Vec4& x) {
  return std::visit(
      [&](const auto& n) -> BasicMultivector<T> {
        using N = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<N, RotationSpec>) {
          return rotation_value<T>(n, x);
        } else if constexpr (std::is_same_v<N, TypeASpec>) {
          return type_a_value<T>(n, x);
        } else if constexpr (std::is_same_v<N, TypeBSpec>) {
          return type_b_value<T>(n, x);
        } else if constexpr (std::is_same_v<N, ProductSpec>) {
          if (n.factors.empty()) throw DomainError("product spin field has no factors");
          BasicMultivector<T> acc = evaluate_node<T>(n.factors.front().node(), x);
          for (std::size_t i = 1; i < n.factors.size(); ++i)
            acc = acc * evaluate_node<T>(n.factors[i].node(), x);
          return acc;
        } else if constexpr (std::is_same_v<N, ExampleFieldSpec>) {
          return type_a_value<T>(example_field_params(), x);
        } else {
          return constant_value<T>(n);
        }
      },
      node);
}

}  // namespace

const TypeASpec& example_field_params() {
  static const TypeASpec params = [] {
    TypeASpec p;
    p.normal_index = 5;
    const std::string norm = "sqrt(1+x1^2+x2^2+x3^2)";
    p.f = parse("1/" + norm);
    p.fA[0] = parse("0");
    p.fA[1] = parse("-x1/" + norm);
    p.fA[2] = parse("-x2/" + norm);
    p.fA[3] = parse("-x3/" + norm);
    return p;
  }();
  return params;
}

template <class T>
BasicMultivector<T> evaluate_as(const SpinFieldSpec& spec, const Vec4& x) {
  return evaluate_node<T>(spec.node(), x);
}

template BasicMultivector<double> evaluate_as<double>(const SpinFieldSpec&, const Vec4&);
template BasicMultivector<Dual4> evaluate_as<Dual4>(const SpinFieldSpec&, const Vec4&);
template BasicMultivector<Dual4x2> evaluate_as<Dual4x2>(const SpinFieldSpec&, const Vec4&);

Multivector evaluate(const SpinFieldSpec& spec, const Vec4& x) {
  return evaluate_as<double>(spec, x);
}

FieldJet evaluate_jet(const SpinFieldSpec& spec, const Vec4& x) {
  BasicMultivector<Dual4> dual = evaluate_as<Dual4>(spec, x);
  FieldJet jet;
  for (const auto& [m, c] : dual.terms()) {
    jet.value.set(m, c.v);
    for (int alpha = 0; alpha < 4; ++alpha)
      jet.partial[static_cast<std::size_t>(alpha)].set(m, c.d[static_cast<std::size_t>(alpha)]);
  }
  return jet;
}

Multivector partial(const SpinFieldSpec& spec, const Vec4& x, int alpha, DerivPath path,
                    const FDConfig& fd) {
  if (path == DerivPath::autodiff)
    return evaluate_jet(spec, x).partial[static_cast<std::size_t>(alpha)];
  Vec4 xp = x, xm = x;
  xp[static_cast<std::size_t>(alpha)] += fd.step;
  xm[static_cast<std::size_t>(alpha)] -= fd.step;
  return (1.0 / (2.0 * fd.step)) * (evaluate(spec, xp) - evaluate(spec, xm));
}

SpinCheck check_spin(const SpinFieldSpec& spec, const Vec4& x, double tol) {
  const Signature& sig = Signature::ambient();
  Multivector psi = evaluate(spec, x);
  Multivector rev = reverse(psi);
  SpinCheck report;
  report.normalization_residual =
      max_abs_diff(rev * psi, Multivector::scalar(sig, 1.0));
  for (int i = 0; i < 10; ++i) {
    Multivector deformed = rev * Multivector::generator(sig, i) * psi;
    double res = infinity_norm(deformed - deformed.grade(1));
    report.deformed[static_cast<std::size_t>(i)] = deformed;
    report.grade_residual[static_cast<std::size_t>(i)] = res;
    report.sandwich_grade_ok[static_cast<std::size_t>(i)] = res < tol;
  }
  return report;
}

KillingData killing_extract(const SpinFieldSpec& spec, const Vec4& x, DerivPath path,
                            const FDConfig& fd, double norm_tol) {
  const Signature& sig = Signature::ambient();
  KillingData data;
  data.x = x;

  Multivector psi(sig);
  std::array<Multivector, 4> dpsi{Multivector(sig), Multivector(sig), Multivector(sig),
                                  Multivector(sig)};
  if (path == DerivPath::autodiff) {
    FieldJet jet = evaluate_jet(spec, x);
    psi = jet.value;
    dpsi = jet.partial;
  } else {
    psi = evaluate(spec, x);
    for (int alpha = 0; alpha < 4; ++alpha)
      dpsi[static_cast<std::size_t>(alpha)] = partial(spec, x, alpha, path, fd);
  }

  Multivector rev = reverse(psi);
  Multivector one = Multivector::scalar(sig, 1.0);
  data.normalization_residual = max_abs_diff(rev * psi, one);
  data.co_normalization_residual = max_abs_diff(psi * rev, one);
  if (data.normalization_residual > norm_tol)
    throw DomainError("spin field is not normalized at the given point (residual " +
                      std::to_string(data.normalization_residual) + ")");

  for (int alpha = 0; alpha < 4; ++alpha) {
    auto a = static_cast<std::size_t>(alpha);
    Multivector k = dpsi[a] * rev;
    data.K[a] = k;
    data.grade2_residual[a] = infinity_norm(k - k.grade(2));
    data.reconstruction_residual[a] = max_abs_diff(dpsi[a], k * psi);
  }
  return data;
}

}  // namespace spinframe
