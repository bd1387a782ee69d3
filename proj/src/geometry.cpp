#include "spinframe/geometry.hpp"

#include <cmath>
#include <string>

namespace spinframe {

namespace {

BladeMask mask2(int i, int j) { return (BladeMask{1} << i) | (BladeMask{1} << j); }

template <class Fn>
void for_each_entry(ConnectionAtPoint& c, Fn&& fn) {
  for (int a = 0; a < 4; ++a) {
    for (int m = 0; m < 4; ++m)
      for (int n = 0; n < 4; ++n) fn(c.omega[a][m][n]);
    for (int m = 0; m < 4; ++m)
      for (int i = 0; i < 6; ++i) fn(c.H[a][m][i]);
    for (int i = 0; i < 6; ++i)
      for (int j = 0; j < 6; ++j) fn(c.A[a][i][j]);
  }
}

template <class Fn>
void zip_entries(ConnectionAtPoint& out, const ConnectionAtPoint& a, const ConnectionAtPoint& b,
                 Fn&& fn) {
  for (int al = 0; al < 4; ++al) {
    for (int m = 0; m < 4; ++m)
      for (int n = 0; n < 4; ++n)
        out.omega[al][m][n] = fn(a.omega[al][m][n], b.omega[al][m][n]);
    for (int m = 0; m < 4; ++m)
      for (int i = 0; i < 6; ++i) out.H[al][m][i] = fn(a.H[al][m][i], b.H[al][m][i]);
    for (int i = 0; i < 6; ++i)
      for (int j = 0; j < 6; ++j) out.A[al][i][j] = fn(a.A[al][i][j], b.A[al][i][j]);
  }
}

}  // namespace

ConnectionAtPoint operator+(const ConnectionAtPoint& a, const ConnectionAtPoint& b) {
  ConnectionAtPoint r;
  zip_entries(r, a, b, [](double x, double y) { return x + y; });
  return r;
}

ConnectionAtPoint operator-(const ConnectionAtPoint& a, const ConnectionAtPoint& b) {
  ConnectionAtPoint r;
  zip_entries(r, a, b, [](double x, double y) { return x - y; });
  return r;
}

ConnectionAtPoint operator*(double s, const ConnectionAtPoint& a) {
  ConnectionAtPoint r = a;
  for_each_entry(r, [s](double& v) { v *= s; });
  return r;
}

double max_abs(const ConnectionAtPoint& a) {
  double m = 0.0;
  ConnectionAtPoint copy = a;
  for_each_entry(copy, [&m](double& v) { m = std::max(m, std::fabs(v)); });
  return m;
}

ConnectionAtPoint split_connection(const std::array<Multivector, 4>& K) {
  ConnectionAtPoint conn;
  for (int alpha = 0; alpha < 4; ++alpha) {
    for (const auto& [mask, c] : K[static_cast<std::size_t>(alpha)].terms()) {
      if (blade_grade(mask) != 2) continue;
      int lo = std::countr_zero(mask);
      int hi = std::countr_zero(mask & (mask - 1));
      double v = 2.0 * c;
      if (hi < tangent_dim) {
        conn.omega[alpha][lo][hi] = v;
        conn.omega[alpha][hi][lo] = -v;
      } else if (lo < tangent_dim) {
        conn.H[alpha][lo][hi - tangent_dim] = v;
      } else {
        conn.A[alpha][lo - tangent_dim][hi - tangent_dim] = v;
        conn.A[alpha][hi - tangent_dim][lo - tangent_dim] = -v;
      }
    }
  }
  return conn;
}

ConnectionAtPoint split_connection(const KillingData& data) {
  ConnectionAtPoint conn = split_connection(data.K);
  conn.grade2_residual = data.grade2_residual;
  return conn;
}

Multivector connection_bivector(const ConnectionAtPoint& conn, int alpha, const Signature& sig) {
  Multivector k(sig);
  auto a = static_cast<std::size_t>(alpha);
  for (int m = 0; m < 4; ++m)
    for (int n = m + 1; n < 4; ++n)
      k.add(mask2(m, n), 0.5 * conn.omega[a][m][n]);
  for (int m = 0; m < 4; ++m)
    for (int i = 0; i < 6; ++i)
      k.add(mask2(m, i + tangent_dim), 0.5 * conn.H[a][m][i]);
  for (int i = 0; i < 6; ++i)
    for (int j = i + 1; j < 6; ++j)
      k.add(mask2(i + tangent_dim, j + tangent_dim), 0.5 * conn.A[a][i][j]);
  return k;
}

FrameAtPoint frame(const SpinFieldSpec& spec, const Vec4& x, double tol) {
  const Signature& sig = Signature::ambient();
  Multivector psi = evaluate(spec, x);
  Multivector rev = reverse(psi);
  FrameAtPoint out;
  for (int i = 0; i < 10; ++i) {
    Multivector deformed = rev * Multivector::generator(sig, i) * psi;
    double res = infinity_norm(deformed - deformed.grade(1));
    if (res >= tol)
      throw AlgebraError("deformed frame vector " + std::to_string(i) +
                         " is not grade 1 (residual " + std::to_string(res) + ")");
    out.e[static_cast<std::size_t>(i)] = deformed;
  }
  for (int i = 0; i < 10; ++i)
    for (int j = 0; j < 10; ++j) {
      double target = i == j ? static_cast<double>(eta(i)) : 0.0;
      double got = dot(out.e[static_cast<std::size_t>(i)], out.e[static_cast<std::size_t>(j)]);
      out.orthonormality_residual =
          std::max(out.orthonormality_residual, std::fabs(got - target));
    }
  return out;
}

ConnectionField connection_source(const SpinFieldSpec& spec, DerivPath path, const FDConfig& fd) {
  ConnectionField field;
  field.value = [spec, path, fd](const Vec4& x) {
    return split_connection(killing_extract(spec, x, path, fd));
  };
  return field;
}

ConnectionAtPoint connection_field(const SpinFieldSpec& spec, const Vec4& x, const FDConfig& fd) {
  return split_connection(killing_extract(spec, x, DerivPath::autodiff, fd));
}

std::array<ConnectionAtPoint, 4> connection_derivative(const ConnectionField& field, const Vec4& x,
                                                       const FDConfig& fd) {
  if (field.derivative) return field.derivative(x);
  std::array<ConnectionAtPoint, 4> d;
  for (int beta = 0; beta < 4; ++beta) {
    Vec4 xp = x, xm = x;
    xp[static_cast<std::size_t>(beta)] += fd.step;
    xm[static_cast<std::size_t>(beta)] -= fd.step;
    d[static_cast<std::size_t>(beta)] =
        (1.0 / (2.0 * fd.step)) * (field.value(xp) - field.value(xm));
  }
  return d;
}

std::array<Mat10, 4> mixed_connection(const ConnectionAtPoint& conn) {
  std::array<Mat10, 4> w{};
  for (int alpha = 0; alpha < 4; ++alpha) {
    auto a = static_cast<std::size_t>(alpha);
    for (int big_i = 0; big_i < 10; ++big_i) {
      for (int big_j = 0; big_j < 10; ++big_j) {
        double c;
        if (big_i < 4 && big_j < 4)
          c = conn.omega[a][big_i][big_j];
        else if (big_i < 4)
          c = conn.H[a][big_i][big_j - 4];
        else if (big_j < 4)
          c = -conn.H[a][big_j][big_i - 4];
        else
          c = conn.A[a][big_i - 4][big_j - 4];
        w[a][static_cast<std::size_t>(big_i)][static_cast<std::size_t>(big_j)] = eta(big_i) * c;
      }
    }
  }
  return w;
}

CurvatureAtPoint curvature(const ConnectionField& field, const Vec4& x, const FDConfig& fd) {
  ConnectionAtPoint conn = field.value(x);
  std::array<ConnectionAtPoint, 4> dconn = connection_derivative(field, x, fd);
  CurvatureAtPoint out;

  for (int al = 0; al < 4; ++al) {
    for (int be = 0; be < 4; ++be) {
      const auto& da = dconn[static_cast<std::size_t>(al)];
      const auto& db = dconn[static_cast<std::size_t>(be)];
      // R = d omega - omega ^ omega, tangent block
      for (int m = 0; m < 4; ++m) {
        for (int n = 0; n < 4; ++n) {
          double v = da.omega[be][m][n] - db.omega[al][m][n];
          for (int s = 0; s < 4; ++s)
            v -= eta(s) * (conn.omega[al][m][s] * conn.omega[be][s][n] -
                           conn.omega[be][m][s] * conn.omega[al][s][n]);
          out.R[al][be][m][n] = v;
        }
      }
      // F = dA - A ^ A, normal block
      for (int i = 0; i < 6; ++i) {
        for (int j = 0; j < 6; ++j) {
          double v = da.A[be][i][j] - db.A[al][i][j];
          for (int k = 0; k < 6; ++k)
            v -= conn.A[al][i][k] * conn.A[be][k][j] - conn.A[be][i][k] * conn.A[al][k][j];
          out.F[al][be][i][j] = v;
        }
      }
    }
  }

  // Block residuals of the flat ambient curvature; index raising and
  // lowering by eta, so the timelike tangent direction carries a sign.
  for (int al = 0; al < 4; ++al) {
    for (int be = al + 1; be < 4; ++be) {
      const auto& da = dconn[static_cast<std::size_t>(al)];
      const auto& db = dconn[static_cast<std::size_t>(be)];
      for (int m = 0; m < 4; ++m) {
        for (int n = 0; n < 4; ++n) {
          double g = out.R[al][be][m][n];
          for (int k = 0; k < 6; ++k)
            g += conn.H[al][m][k] * conn.H[be][n][k] - conn.H[be][m][k] * conn.H[al][n][k];
          out.gauss_residual = std::max(out.gauss_residual, std::fabs(g));
        }
      }
      for (int m = 0; m < 4; ++m) {
        for (int j = 0; j < 6; ++j) {
          double c = da.H[be][m][j] - db.H[al][m][j];
          for (int s = 0; s < 4; ++s)
            c -= eta(s) * (conn.omega[al][m][s] * conn.H[be][s][j] -
                           conn.omega[be][m][s] * conn.H[al][s][j]);
          for (int k = 0; k < 6; ++k)
            c -= conn.H[al][m][k] * conn.A[be][k][j] - conn.H[be][m][k] * conn.A[al][k][j];
          out.codazzi_residual = std::max(out.codazzi_residual, std::fabs(c));
        }
      }
      for (int i = 0; i < 6; ++i) {
        for (int j = 0; j < 6; ++j) {
          double r = out.F[al][be][i][j];
          for (int s = 0; s < 4; ++s)
            r += eta(s) * (conn.H[al][s][i] * conn.H[be][s][j] -
                           conn.H[be][s][i] * conn.H[al][s][j]);
          out.ricci_residual = std::max(out.ricci_residual, std::fabs(r));
        }
      }
    }
  }
  return out;
}

CurvatureAtPoint curvature(const SpinFieldSpec& spec, const Vec4& x, const FDConfig& fd) {
  return curvature(connection_source(spec), x, fd);
}

GcrResiduals gcr_residuals(const ConnectionField& field, const Vec4& x, const FDConfig& fd) {
  CurvatureAtPoint c = curvature(field, x, fd);
  return {c.gauss_residual, c.codazzi_residual, c.ricci_residual};
}

GcrResiduals gcr_residuals(const SpinFieldSpec& spec, const Vec4& x, const FDConfig& fd) {
  return gcr_residuals(connection_source(spec), x, fd);
}

double ambient_flatness(const ConnectionField& field, const Vec4& x, const FDConfig& fd) {
  ConnectionAtPoint conn = field.value(x);
  std::array<ConnectionAtPoint, 4> dconn = connection_derivative(field, x, fd);
  std::array<Mat10, 4> w = mixed_connection(conn);
  std::array<std::array<Mat10, 4>, 4> dw;
  for (int beta = 0; beta < 4; ++beta)
    dw[static_cast<std::size_t>(beta)] = mixed_connection(dconn[static_cast<std::size_t>(beta)]);
  double worst = 0.0;
  for (std::size_t al = 0; al < 4; ++al) {
    for (std::size_t be = al + 1; be < 4; ++be) {
      for (int i = 0; i < 10; ++i) {
        for (int j = 0; j < 10; ++j) {
          double v = dw[al][be][i][j] - dw[be][al][i][j];
          for (int k = 0; k < 10; ++k)
            v -= w[al][i][k] * w[be][k][j] - w[be][i][k] * w[al][k][j];
          worst = std::max(worst, std::fabs(v));
        }
      }
    }
  }
  return worst;
}

}  // namespace spinframe
