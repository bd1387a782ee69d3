#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "spinframe/spin_field.hpp"

using namespace spinframe;

namespace {

const Signature& sig = Signature::ambient();

SpinFieldSpec example_field() { return SpinFieldSpec(ExampleFieldSpec{}); }

Multivector fd_partial(const SpinFieldSpec& spec, const Vec4& x, int alpha, double h = 1e-6) {
  Vec4 xp = x, xm = x;
  xp[static_cast<std::size_t>(alpha)] += h;
  xm[static_cast<std::size_t>(alpha)] -= h;
  return (1.0 / (2.0 * h)) * (evaluate(spec, xp) - evaluate(spec, xm));
}

}  // namespace

TEST_CASE("example field evaluation") {
  // on the x1=x2=x3=0 axis the field is the scalar 1
  Multivector psi = evaluate(example_field(), {2.5, 0.0, 0.0, 0.0});
  CHECK(max_abs_diff(psi, Multivector::scalar(sig, 1.0)) < 1e-15);

  // at (.,1,0,0): 1/sqrt(2) - (1/sqrt(2)) e1 e5
  psi = evaluate(example_field(), {0.0, 1.0, 0.0, 0.0});
  double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  Multivector want = Multivector::scalar(sig, inv_sqrt2) +
                     Multivector::blade(sig, (1u << 1) | (1u << 5), -inv_sqrt2);
  CHECK(max_abs_diff(psi, want) < 1e-15);
}

TEST_CASE("rotation field with zero angle is the identity") {
  RotationSpec rot;
  rot.plane_i = 4;
  rot.plane_j = 5;
  rot.angle = parse("0");
  Multivector psi = evaluate(SpinFieldSpec(rot), {0.3, -0.2, 0.9, 0.0});
  CHECK(max_abs_diff(psi, Multivector::scalar(sig, 1.0)) == 0.0);
}

TEST_CASE("partial derivatives: autodiff vs finite differences") {
  SpinFieldSpec field = example_field();
  // constant-angle rotation has zero derivative
  RotationSpec rot;
  rot.plane_i = 1;
  rot.plane_j = 2;
  rot.angle = parse("0.37");
  for (int alpha = 0; alpha < 4; ++alpha)
    CHECK(infinity_norm(partial(SpinFieldSpec(rot), {0.1, 0.2, 0.3, 0.4}, alpha)) == 0.0);

  // example field at the origin: d1 psi = -e1 e5
  Multivector d1 = partial(field, {0.0, 0.0, 0.0, 0.0}, 1);
  Multivector want = Multivector::blade(sig, (1u << 1) | (1u << 5), -1.0);
  CHECK(max_abs_diff(d1, want) < 1e-12);
  CHECK(max_abs_diff(d1, fd_partial(field, {0.0, 0.0, 0.0, 0.0}, 1)) < 1e-6);

  // autodiff and FD agree for every built-in family
  oracles::Rng rng(33);
  std::vector<SpinFieldSpec> specs;
  specs.push_back(field);
  specs.push_back(SpinFieldSpec(oracles::random_type_a(rng)));
  specs.push_back(SpinFieldSpec(oracles::random_type_b(rng)));
  specs.push_back(SpinFieldSpec(oracles::random_rotation(rng)));
  specs.push_back(SpinFieldSpec(ProductSpec{{specs[1], specs[3]}}));
  for (const auto& spec : specs) {
    Vec4 x = oracles::random_point(rng, 0.4);
    for (int alpha = 0; alpha < 4; ++alpha) {
      Multivector ad = partial(spec, x, alpha);
      Multivector fd = partial(spec, x, alpha, DerivPath::finite_difference, FDConfig{1e-6});
      CHECK(max_abs_diff(ad, fd) < 1e-6);
    }
  }
}

TEST_CASE("check_spin accepts the example field and the identity") {
  SpinCheck report = check_spin(example_field(), {0.0, 0.7, -0.3, 0.2});
  CHECK(report.normalization_residual < 1e-12);
  for (bool ok : report.sandwich_grade_ok) CHECK(ok);

  ConstantSpec one;
  one.value = Multivector::scalar(sig, 1.0);
  report = check_spin(SpinFieldSpec(one), {0, 0, 0, 0});
  CHECK(report.normalization_residual == 0.0);
  for (bool ok : report.sandwich_grade_ok) CHECK(ok);
}

TEST_CASE("check_spin flags the normalized grade-mixing element") {
  double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  ConstantSpec t;
  t.value = Multivector::blade(sig, 0b110, inv_sqrt2) +
            Multivector::blade(sig, 0b1111000, inv_sqrt2);
  SpinCheck report = check_spin(SpinFieldSpec(t), {0, 0, 0, 0}, 1e-10);
  CHECK(report.normalization_residual < 1e-12);
  CHECK_FALSE(report.sandwich_grade_ok[1]);
  // the deformed vector is exactly e2 e3 e4 e5 e6
  Multivector want = Multivector::blade(sig, 0b1111100, 1.0);
  CHECK(max_abs_diff(report.deformed[1], want) < 1e-15);
}

TEST_CASE("killing_extract on the trivial and rotation fields") {
  ConstantSpec one;
  one.value = Multivector::scalar(sig, 1.0);
  KillingData data = killing_extract(SpinFieldSpec(one), {0.4, -0.1, 0.0, 0.9});
  for (const auto& k : data.K) CHECK(infinity_norm(k) == 0.0);
  for (double r : data.grade2_residual) CHECK(r == 0.0);
  for (double r : data.reconstruction_residual) CHECK(r == 0.0);
  CHECK(data.normalization_residual == 0.0);

  // rotation with angle x0: K_0 = (1/2) e4 e5, the rest zero
  RotationSpec rot;
  rot.plane_i = 4;
  rot.plane_j = 5;
  rot.angle = parse("x0");
  data = killing_extract(SpinFieldSpec(rot), {0.3, 0.1, -0.7, 0.2});
  Multivector want = Multivector::blade(sig, (1u << 4) | (1u << 5), 0.5);
  CHECK(max_abs_diff(data.K[0], want) < 1e-14);
  for (int alpha = 1; alpha < 4; ++alpha) CHECK(infinity_norm(data.K[alpha]) < 1e-14);
  for (double r : data.grade2_residual) CHECK(r < 1e-14);
  for (double r : data.reconstruction_residual) CHECK(r < 1e-14);
}

TEST_CASE("killing_extract on the example field at the origin") {
  KillingData data = killing_extract(example_field(), {0.0, 0.0, 0.0, 0.0});
  for (int mu = 1; mu < 4; ++mu) {
    Multivector want = Multivector::blade(sig, (1u << mu) | (1u << 5), -1.0);
    CHECK(max_abs_diff(data.K[static_cast<std::size_t>(mu)], want) < 1e-12);
  }
  CHECK(infinity_norm(data.K[0]) < 1e-14);
}

TEST_CASE("killing_extract rejects unnormalized fields") {
  ConstantSpec two;
  two.value = Multivector::scalar(sig, 2.0);
  CHECK_THROWS_AS(killing_extract(SpinFieldSpec(two), {0, 0, 0, 0}), DomainError);
}

TEST_CASE("purity residuals across random family draws") {
  oracles::Rng rng(77);
  for (int trial = 0; trial < 50; ++trial) {
    SpinFieldSpec spec = [&]() -> SpinFieldSpec {
      switch (trial % 4) {
        case 0: return SpinFieldSpec(oracles::random_type_a(rng));
        case 1: return SpinFieldSpec(oracles::random_type_b(rng));
        case 2: return SpinFieldSpec(oracles::random_rotation(rng));
        default:
          return SpinFieldSpec(ProductSpec{{SpinFieldSpec(oracles::random_type_a(rng)),
                                            SpinFieldSpec(oracles::random_rotation(rng))}});
      }
    }();
    Vec4 x = oracles::random_point(rng, 0.45);
    KillingData ad = killing_extract(spec, x);
    for (double r : ad.grade2_residual) CHECK(r < 1e-8);
    for (double r : ad.reconstruction_residual) CHECK(r < 1e-8);

    KillingData fd = killing_extract(spec, x, DerivPath::finite_difference, FDConfig{1e-5});
    for (double r : fd.grade2_residual) CHECK(r < 1e-4);
    for (double r : fd.reconstruction_residual) CHECK(r < 1e-4);
  }
}

TEST_CASE("product of two solutions stays a solution") {
  oracles::Rng rng(78);
  for (int trial = 0; trial < 10; ++trial) {
    SpinFieldSpec psi1(oracles::random_type_a(rng));
    SpinFieldSpec psi2 = trial % 2 == 0 ? SpinFieldSpec(oracles::random_type_b(rng))
                                        : SpinFieldSpec(oracles::random_rotation(rng));
    SpinFieldSpec product(ProductSpec{{psi1, psi2}});
    Vec4 x = oracles::random_point(rng, 0.4);
    KillingData data = killing_extract(product, x);
    for (double r : data.grade2_residual) CHECK(r < 1e-8);
    // normalization propagates through the product
    CHECK(data.normalization_residual < 1e-10);
  }
}

TEST_CASE("volume-element twist flips the mixed block only") {
  // psi' = (e4 e5 e6 e7 e8 e9) psi is again a solution with H negated.
  ConstantSpec volume;
  volume.value = Multivector::blade(sig, 0b1111110000, 1.0);
  SpinFieldSpec psi = example_field();
  SpinFieldSpec twisted(ProductSpec{{SpinFieldSpec(volume), psi}});

  Vec4 x{0.0, 0.3, -0.2, 0.1};
  KillingData base = killing_extract(psi, x);
  KillingData twist = killing_extract(twisted, x);
  for (int alpha = 0; alpha < 4; ++alpha) {
    auto a = static_cast<std::size_t>(alpha);
    for (const auto& [mask, c] : base.K[a].terms()) {
      int lo = std::countr_zero(mask);
      int hi = std::countr_zero(mask & (mask - 1));
      double twisted_c = twist.K[a].coeff(mask);
      if (lo < 4 && hi >= 4)
        CHECK(twisted_c == doctest::Approx(-c).epsilon(1e-12));  // H block flips
      else
        CHECK(twisted_c == doctest::Approx(c).epsilon(1e-12));
    }
    CHECK(twist.grade2_residual[a] < 1e-12);
  }
}
