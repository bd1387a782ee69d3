#pragma once
#include <array>
#include <string>
#include <variant>
#include <vector>

#include "spinframe/expr.hpp"
#include "spinframe/multivector.hpp"

namespace spinframe {

// Central finite differences, used as a cross-check against the
// autodiff path and for derivatives of extracted connection fields.
struct FDConfig {
  double step = 1e-5;
};

enum class DerivPath { autodiff, finite_difference };

class SpinFieldSpec;

// psi = exp((theta/2) e_i e_j), a pointwise rotation (or boost) in one
// coordinate plane.
struct RotationSpec {
  int plane_i = 4;
  int plane_j = 5;
  ExprPtr angle;
};

// psi = f + sum_mu f^{mu n} e_mu e_n with one normal direction n.
struct TypeASpec {
  int normal_index = 5;  // 4..9
  ExprPtr f;
  std::array<ExprPtr, 4> fA;  // f^{mu n}, mu = 0..3
};

// psi = f + sum_k f^{t k} e_t e_k with one tangent direction t.
struct TypeBSpec {
  int tangent_index = 1;  // 0..3
  ExprPtr f;
  std::array<ExprPtr, 6> fB;  // f^{t k}, k = 4..9
};

// Ordered geometric product of factor fields.
struct ProductSpec {
  std::vector<SpinFieldSpec> factors;
};

// Built-in demonstration field: the inverse stereographic embedding of a
// diameter-one 3-sphere times a flat time axis. JSON tag "paper_example".
struct ExampleFieldSpec {};

// A fixed multivector, constant over the coordinates. Mainly useful for
// injecting raw elements into the checker.
struct ConstantSpec {
  Multivector value{Signature::ambient()};
};

class SpinFieldSpec {
 public:
  using Node =
      std::variant<RotationSpec, TypeASpec, TypeBSpec, ProductSpec, ExampleFieldSpec, ConstantSpec>;

  SpinFieldSpec() : node_(ExampleFieldSpec{}) {}
  SpinFieldSpec(Node n) : node_(std::move(n)) {}

  const Node& node() const { return node_; }

 private:
  Node node_;
};

// TypeA parameters behind the built-in example field.
const TypeASpec& example_field_params();

// Field evaluation over a generic scalar (double / Dual4 / Dual4x2); the
// coefficient expressions are evaluated with that scalar, so derivatives
// flow through products and rotation angles automatically.
template <class T>
BasicMultivector<T> evaluate_as(const SpinFieldSpec& spec, const Vec4& x);

Multivector evaluate(const SpinFieldSpec& spec, const Vec4& x);

// Field value together with its four coordinate partials.
struct FieldJet {
  Multivector value{Signature::ambient()};
  std::array<Multivector, 4> partial{
      Multivector{Signature::ambient()}, Multivector{Signature::ambient()},
      Multivector{Signature::ambient()}, Multivector{Signature::ambient()}};
};

FieldJet evaluate_jet(const SpinFieldSpec& spec, const Vec4& x);

Multivector partial(const SpinFieldSpec& spec, const Vec4& x, int alpha,
                    DerivPath path = DerivPath::autodiff, const FDConfig& fd = {});

// Pointwise diagnostic of the two defining conditions: unit reversion
// norm and grade-1 frame deformation for every generator.
struct SpinCheck {
  double normalization_residual = 0.0;  // |psi~ psi - 1|_inf
  std::array<bool, 10> sandwich_grade_ok{};
  std::array<double, 10> grade_residual{};
  std::array<Multivector, 10> deformed{
      Multivector{Signature::ambient()}, Multivector{Signature::ambient()},
      Multivector{Signature::ambient()}, Multivector{Signature::ambient()},
      Multivector{Signature::ambient()}, Multivector{Signature::ambient()},
      Multivector{Signature::ambient()}, Multivector{Signature::ambient()},
      Multivector{Signature::ambient()}, Multivector{Signature::ambient()}};
  bool all_ok(double) const {
    for (bool ok : sandwich_grade_ok)
      if (!ok) return false;
    return true;
  }
};

SpinCheck check_spin(const SpinFieldSpec& spec, const Vec4& x, double tol = 1e-10);

// K_alpha = (d_alpha psi) psi~ together with purity diagnostics. The
// bivectors are reported as computed, not grade-projected.
struct KillingData {
  Vec4 x{};
  std::array<Multivector, 4> K{
      Multivector{Signature::ambient()}, Multivector{Signature::ambient()},
      Multivector{Signature::ambient()}, Multivector{Signature::ambient()}};
  std::array<double, 4> grade2_residual{};
  std::array<double, 4> reconstruction_residual{};
  double normalization_residual = 0.0;     // |psi~ psi - 1|_inf
  double co_normalization_residual = 0.0;  // |psi psi~ - 1|_inf
};

// Throws DomainError when the normalization residual exceeds `norm_tol`;
// the extraction divides by nothing but relies on psi psi~ = 1.
KillingData killing_extract(const SpinFieldSpec& spec, const Vec4& x,
                            DerivPath path = DerivPath::autodiff, const FDConfig& fd = {},
                            double norm_tol = 1e-8);

}  // namespace spinframe
