#pragma once
#include <array>
#include <functional>

#include "spinframe/spin_field.hpp"

namespace spinframe {

inline constexpr int tangent_dim = 4;
inline constexpr int normal_dim = 6;
inline constexpr int ambient_dim = 10;

// Connection data at one coordinate point, split into the three index
// blocks. All indices are upper frame indices; omega and A are stored
// fully antisymmetric, H carries one tangent and one normal slot.
struct ConnectionAtPoint {
  // omega[alpha][mu][nu], mu,nu tangent
  std::array<std::array<std::array<double, 4>, 4>, 4> omega{};
  // H[alpha][mu][i-4], i normal
  std::array<std::array<std::array<double, 6>, 4>, 4> H{};
  // A[alpha][i-4][j-4]
  std::array<std::array<std::array<double, 6>, 6>, 4> A{};
  // extraction purity per alpha; zero for closed forms
  std::array<double, 4> grade2_residual{};
};

ConnectionAtPoint operator+(const ConnectionAtPoint& a, const ConnectionAtPoint& b);
ConnectionAtPoint operator-(const ConnectionAtPoint& a, const ConnectionAtPoint& b);
ConnectionAtPoint operator*(double s, const ConnectionAtPoint& a);
double max_abs(const ConnectionAtPoint& a);

// Ordered-blade coefficients of K_alpha map to block entries with a
// uniform factor two; routing is by index range.
ConnectionAtPoint split_connection(const std::array<Multivector, 4>& K);
ConnectionAtPoint split_connection(const KillingData& data);

// K_alpha reconstructed from block data: sum over I<J of (1/2) C^{IJ} e_I e_J.
Multivector connection_bivector(const ConnectionAtPoint& conn, int alpha,
                                const Signature& sig = Signature::ambient());

// Moving frame e_I = psi~ e_I psi at a point.
struct FrameAtPoint {
  std::array<Multivector, 10> e{
      Multivector{Signature::ambient()}, Multivector{Signature::ambient()},
      Multivector{Signature::ambient()}, Multivector{Signature::ambient()},
      Multivector{Signature::ambient()}, Multivector{Signature::ambient()},
      Multivector{Signature::ambient()}, Multivector{Signature::ambient()},
      Multivector{Signature::ambient()}, Multivector{Signature::ambient()}};
  // max |e_I . e_J - eta_IJ|
  double orthonormality_residual = 0.0;
};

// Throws AlgebraError naming the first index whose deformed vector has a
// grade-1 residual above `tol`.
FrameAtPoint frame(const SpinFieldSpec& spec, const Vec4& x, double tol = 1e-8);

// A connection as a field over the coordinates. `derivative` is optional:
// when absent, consumers fall back to central differences of `value`.
struct ConnectionField {
  std::function<ConnectionAtPoint(const Vec4&)> value;
  std::function<std::array<ConnectionAtPoint, 4>(const Vec4&)> derivative;
};

// Killing-extraction source: value(x) = split(K(x)).
ConnectionField connection_source(const SpinFieldSpec& spec,
                                  DerivPath path = DerivPath::autodiff, const FDConfig& fd = {});

ConnectionAtPoint connection_field(const SpinFieldSpec& spec, const Vec4& x,
                                   const FDConfig& fd = {});

// Derivatives of the blocks: exact when the field provides them, central
// differences with fd.step otherwise.
std::array<ConnectionAtPoint, 4> connection_derivative(const ConnectionField& field, const Vec4& x,
                                                       const FDConfig& fd);

// Curvature 2-forms and the three block residuals of the flat ambient
// connection. Components: R[alpha][beta][mu][nu], F[alpha][beta][i-4][j-4];
// the 2-form convention carries no 1/2.
struct CurvatureAtPoint {
  std::array<std::array<std::array<std::array<double, 4>, 4>, 4>, 4> R{};
  std::array<std::array<std::array<std::array<double, 6>, 6>, 4>, 4> F{};
  double gauss_residual = 0.0;
  double codazzi_residual = 0.0;
  double ricci_residual = 0.0;
};

CurvatureAtPoint curvature(const ConnectionField& field, const Vec4& x, const FDConfig& fd = {});
CurvatureAtPoint curvature(const SpinFieldSpec& spec, const Vec4& x, const FDConfig& fd = {});

struct GcrResiduals {
  double gauss = 0.0;
  double codazzi = 0.0;
  double ricci = 0.0;
  double max() const { return std::max(gauss, std::max(codazzi, ricci)); }
};

GcrResiduals gcr_residuals(const ConnectionField& field, const Vec4& x, const FDConfig& fd = {});
GcrResiduals gcr_residuals(const SpinFieldSpec& spec, const Vec4& x, const FDConfig& fd = {});

// Infinity norm of the full 10x10 ambient curvature; analytically zero
// for any valid field.
double ambient_flatness(const ConnectionField& field, const Vec4& x, const FDConfig& fd = {});

// Mixed-position matrix W_alpha[I][J] = eta_II C_alpha^{IJ}, the form the
// moving-frame ODE consumes.
using Mat10 = std::array<std::array<double, 10>, 10>;
std::array<Mat10, 4> mixed_connection(const ConnectionAtPoint& conn);

// Ambient metric entry for index 0..9 (tangent 0 is timelike).
inline int eta(int index) { return Signature::ambient().metric(index); }

}  // namespace spinframe
