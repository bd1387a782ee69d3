#include "spinframe/solutions.hpp"

#include <cmath>
#include <string>

namespace spinframe {

namespace {

// First-order view of a second-order dual: value and first derivatives.
Dual4 value_dual(const Dual4x2& q) {
  Dual4 r;
  r.v = q.v.v;
  for (int b = 0; b < 4; ++b) r.d[static_cast<std::size_t>(b)] = q.d[static_cast<std::size_t>(b)].v;
  return r;
}

// d_alpha of a second-order dual, again as a first-order dual, so chained
// expressions keep one more derivative level.
Dual4 deriv_dual(const Dual4x2& q, int alpha) {
  auto a = static_cast<std::size_t>(alpha);
  Dual4 r;
  r.v = q.v.d[a];
  for (int b = 0; b < 4; ++b)
    r.d[static_cast<std::size_t>(b)] = q.d[static_cast<std::size_t>(b)].d[a];
  return r;
}

struct TypeAEval {
  Dual4 f;
  std::array<Dual4, 4> fa;
  std::array<std::array<Dual4, 4>, 4> H;           // [alpha][mu], normal slot fixed
  std::array<std::array<std::array<Dual4, 4>, 4>, 4> omega;  // [alpha][mu][nu]
};

TypeAEval evaluate_type_a(const TypeASpec& p, const Vec4& x) {
  TypeAEval ev;
  Dual4x2 f2 = eval_as<Dual4x2>(p.f, x);
  std::array<Dual4x2, 4> g;
  ev.f = value_dual(f2);
  if (std::fabs(ev.f.v) < 1e-10)
    throw DomainError("type-A closed form is singular: |f| < 1e-10 at the given point");
  double norm_check = ev.f.v * ev.f.v;
  for (int mu = 0; mu < 4; ++mu) {
    auto m = static_cast<std::size_t>(mu);
    Dual4x2 fa2 = eval_as<Dual4x2>(p.fA[m], x);
    g[m] = fa2 / f2;
    ev.fa[m] = value_dual(fa2);
    norm_check += eta(mu) * ev.fa[m].v * ev.fa[m].v;
  }
  if (std::fabs(norm_check - 1.0) > 1e-8)
    throw DomainError("type-A coefficients violate the normalization constraint (|f^2 + f_mu f^mu - 1| = " +
                      std::to_string(std::fabs(norm_check - 1.0)) + ")");
  for (int alpha = 0; alpha < 4; ++alpha) {
    auto a = static_cast<std::size_t>(alpha);
    for (int mu = 0; mu < 4; ++mu) {
      auto m = static_cast<std::size_t>(mu);
      ev.H[a][m] = Dual4(2.0) * ev.f * ev.f * deriv_dual(g[m], alpha);
    }
    for (int mu = 0; mu < 4; ++mu) {
      for (int nu = 0; nu < 4; ++nu) {
        auto m = static_cast<std::size_t>(mu);
        auto n = static_cast<std::size_t>(nu);
        // omega^{mu nu} = (H^{mu} f^{nu} - H^{nu} f^{mu}) / f; the shared
        // normal index is spacelike, so no sign enters the contraction.
        ev.omega[a][m][n] = (ev.H[a][m] * ev.fa[n] - ev.H[a][n] * ev.fa[m]) / ev.f;
      }
    }
  }
  return ev;
}

struct TypeBEval {
  Dual4 f;
  std::array<Dual4, 6> fb;
  std::array<std::array<Dual4, 6>, 4> H;           // [alpha][k], tangent slot fixed
  std::array<std::array<std::array<Dual4, 6>, 6>, 4> A;  // [alpha][i][j]
};

TypeBEval evaluate_type_b(const TypeBSpec& p, const Vec4& x) {
  TypeBEval ev;
  int t = p.tangent_index;
  double eta_t = eta(t);
  Dual4x2 f2 = eval_as<Dual4x2>(p.f, x);
  std::array<Dual4x2, 6> g;
  ev.f = value_dual(f2);
  if (std::fabs(ev.f.v) < 1e-10)
    throw DomainError("type-B closed form is singular: |f| < 1e-10 at the given point");
  double norm_check = ev.f.v * ev.f.v;
  for (int k = 0; k < 6; ++k) {
    auto kk = static_cast<std::size_t>(k);
    Dual4x2 fb2 = eval_as<Dual4x2>(p.fB[kk], x);
    g[kk] = fb2 / f2;
    ev.fb[kk] = value_dual(fb2);
    norm_check += eta_t * ev.fb[kk].v * ev.fb[kk].v;
  }
  if (std::fabs(norm_check - 1.0) > 1e-8)
    throw DomainError("type-B coefficients violate the normalization constraint (|f^2 + f_k f^k - 1| = " +
                      std::to_string(std::fabs(norm_check - 1.0)) + ")");
  for (int alpha = 0; alpha < 4; ++alpha) {
    auto a = static_cast<std::size_t>(alpha);
    for (int k = 0; k < 6; ++k) {
      auto kk = static_cast<std::size_t>(k);
      ev.H[a][kk] = Dual4(2.0) * ev.f * ev.f * deriv_dual(g[kk], alpha);
    }
    for (int i = 0; i < 6; ++i) {
      for (int j = 0; j < 6; ++j) {
        auto ii = static_cast<std::size_t>(i);
        auto jj = static_cast<std::size_t>(j);
        // A^{ij} = (H_{t}^{i} f^{tj} - H_{t}^{j} f^{ti}) / f with the
        // tangent index lowered, hence the eta_t factor.
        ev.A[a][ii][jj] =
            Dual4(eta_t) * (ev.H[a][ii] * ev.fb[jj] - ev.H[a][jj] * ev.fb[ii]) / ev.f;
      }
    }
  }
  return ev;
}

ClosedConnection pack_type_a(const TypeAEval& ev, int normal_index) {
  ClosedConnection out;
  int n = normal_index - tangent_dim;
  for (int alpha = 0; alpha < 4; ++alpha) {
    auto a = static_cast<std::size_t>(alpha);
    for (int mu = 0; mu < 4; ++mu) {
      auto m = static_cast<std::size_t>(mu);
      out.value.H[a][m][static_cast<std::size_t>(n)] = ev.H[a][m].v;
      for (int beta = 0; beta < 4; ++beta)
        out.derivative[static_cast<std::size_t>(beta)].H[a][m][static_cast<std::size_t>(n)] =
            ev.H[a][m].d[static_cast<std::size_t>(beta)];
      for (int nu = 0; nu < 4; ++nu) {
        auto nn = static_cast<std::size_t>(nu);
        out.value.omega[a][m][nn] = ev.omega[a][m][nn].v;
        for (int beta = 0; beta < 4; ++beta)
          out.derivative[static_cast<std::size_t>(beta)].omega[a][m][nn] =
              ev.omega[a][m][nn].d[static_cast<std::size_t>(beta)];
      }
    }
  }
  return out;
}

ClosedConnection pack_type_b(const TypeBEval& ev, int tangent_index) {
  ClosedConnection out;
  auto t = static_cast<std::size_t>(tangent_index);
  for (int alpha = 0; alpha < 4; ++alpha) {
    auto a = static_cast<std::size_t>(alpha);
    for (int k = 0; k < 6; ++k) {
      auto kk = static_cast<std::size_t>(k);
      out.value.H[a][t][kk] = ev.H[a][kk].v;
      for (int beta = 0; beta < 4; ++beta)
        out.derivative[static_cast<std::size_t>(beta)].H[a][t][kk] =
            ev.H[a][kk].d[static_cast<std::size_t>(beta)];
      for (int j = 0; j < 6; ++j) {
        auto jj = static_cast<std::size_t>(j);
        out.value.A[a][kk][jj] = ev.A[a][kk][jj].v;
        for (int beta = 0; beta < 4; ++beta)
          out.derivative[static_cast<std::size_t>(beta)].A[a][kk][jj] =
              ev.A[a][kk][jj].d[static_cast<std::size_t>(beta)];
      }
    }
  }
  return out;
}

}  // namespace

ConnectionAtPoint typeA_closed_connection(const TypeASpec& params, const Vec4& x) {
  return pack_type_a(evaluate_type_a(params, x), params.normal_index).value;
}

ClosedConnection typeA_closed_connection_derivs(const TypeASpec& params, const Vec4& x) {
  return pack_type_a(evaluate_type_a(params, x), params.normal_index);
}

ConnectionField typeA_connection_source(const TypeASpec& params) {
  ConnectionField field;
  field.value = [params](const Vec4& x) { return typeA_closed_connection(params, x); };
  field.derivative = [params](const Vec4& x) {
    return typeA_closed_connection_derivs(params, x).derivative;
  };
  return field;
}

ConnectionAtPoint typeB_closed_connection(const TypeBSpec& params, const Vec4& x) {
  return pack_type_b(evaluate_type_b(params, x), params.tangent_index).value;
}

ClosedConnection typeB_closed_connection_derivs(const TypeBSpec& params, const Vec4& x) {
  return pack_type_b(evaluate_type_b(params, x), params.tangent_index);
}

ConnectionField typeB_connection_source(const TypeBSpec& params) {
  ConnectionField field;
  field.value = [params](const Vec4& x) { return typeB_closed_connection(params, x); };
  field.derivative = [params](const Vec4& x) {
    return typeB_closed_connection_derivs(params, x).derivative;
  };
  return field;
}

Multivector conjugate_bivector(const Multivector& psi, const Multivector& K) {
  for (const auto& [m, c] : psi.terms()) {
    int g = blade_grade(m);
    if (g != 0 && g != 2)
      throw AlgebraError("conjugate_bivector requires psi with grades {0,2} only, found grade " +
                         std::to_string(g));
  }
  for (const auto& [m, c] : K.terms())
    if (blade_grade(m) != 2)
      throw AlgebraError("conjugate_bivector requires a grade-2 argument");
  Multivector out = psi * K * reverse(psi);
  double purity = infinity_norm(out - out.grade(2));
  if (purity > 1e-12)
    throw AlgebraError("conjugation left the grade-2 subspace (residual " +
                       std::to_string(purity) + ")");
  return out;
}

namespace {

// Shared tail: run the conjugation oracle, compare, pick the result.
void finish_composition(ComposedConnection& out, const SpinFieldSpec& psi1_spec, const Vec4& x) {
  const Signature& sig = Signature::ambient();
  Multivector psi1 = evaluate(psi1_spec, x);
  std::array<Multivector, 4> combined{Multivector(sig), Multivector(sig), Multivector(sig),
                                      Multivector(sig)};
  for (int alpha = 0; alpha < 4; ++alpha) {
    Multivector k1 = connection_bivector(out.conn1, alpha, sig);
    Multivector k2 = connection_bivector(out.conn2, alpha, sig);
    combined[static_cast<std::size_t>(alpha)] = k1 + conjugate_bivector(psi1, k2);
  }
  out.oracle = split_connection(combined);
  out.formula_deviation = max_abs(out.formula - out.oracle);
  out.oracle_override = out.formula_deviation > 1e-8;
  out.primed = out.oracle_override ? out.oracle : out.formula;
}

}  // namespace

ComposedConnection compose_connection_A(const TypeASpec& psi1, const Vec4& x,
                                        const ConnectionAtPoint& conn2) {
  TypeAEval ev = evaluate_type_a(psi1, x);
  ComposedConnection out;
  out.conn1 = pack_type_a(ev, psi1.normal_index).value;
  out.conn2 = conn2;
  out.f = ev.f.v;
  out.f_mixed.resize(4);
  for (int mu = 0; mu < 4; ++mu) out.f_mixed[static_cast<std::size_t>(mu)] = ev.fa[static_cast<std::size_t>(mu)].v;

  const double f = ev.f.v;
  const int n = psi1.normal_index - tangent_dim;
  std::array<double, 4> fa{}, fl{};
  for (int mu = 0; mu < 4; ++mu) {
    fa[static_cast<std::size_t>(mu)] = ev.fa[static_cast<std::size_t>(mu)].v;
    fl[static_cast<std::size_t>(mu)] = eta(mu) * fa[static_cast<std::size_t>(mu)];
  }
  double S = 0.0;
  for (int g = 0; g < 4; ++g) S += fl[static_cast<std::size_t>(g)] * fa[static_cast<std::size_t>(g)];

  // Closed composition formulas, one channel per output block. Derived by
  // collecting the grade-2 channels of psi1 K2 psi1~ over the blade classes;
  // all contractions carry their metric factors explicitly, and the
  // normalization f^2 + S = 1 collapses several diagonal factors.
  ConnectionAtPoint& F = out.formula;
  for (int al = 0; al < 4; ++al) {
    const auto& w2 = conn2.omega[al];
    const auto& h2 = conn2.H[al];
    const auto& a2 = conn2.A[al];
    const auto& w1 = out.conn1.omega[al];
    const auto& h1 = out.conn1.H[al];

    std::array<double, 4> w2_dot_fl{};  // W^mu = sum_g omega2^{mu g} f_{g n}
    std::array<double, 6> h2_dot_fl{};  // T^m  = sum_g f_{g n} H2^{g m}
    for (int mu = 0; mu < 4; ++mu)
      for (int g = 0; g < 4; ++g) w2_dot_fl[mu] += w2[mu][g] * fl[g];
    for (int i = 0; i < 6; ++i)
      for (int g = 0; g < 4; ++g) h2_dot_fl[i] += fl[g] * h2[g][i];

    for (int mu = 0; mu < 4; ++mu) {
      for (int nu = 0; nu < 4; ++nu) {
        F.omega[al][mu][nu] = w1[mu][nu] + w2[mu][nu] +
                              2.0 * fa[mu] * w2_dot_fl[nu] - 2.0 * fa[nu] * w2_dot_fl[mu] +
                              2.0 * f * fa[nu] * h2[mu][n] - 2.0 * f * fa[mu] * h2[nu][n];
      }
    }
    for (int mu = 0; mu < 4; ++mu) {
      F.H[al][mu][n] = h1[mu][n] + h2[mu][n] * (f * f - S) + 2.0 * fa[mu] * h2_dot_fl[n] -
                       2.0 * f * w2_dot_fl[mu];
      for (int i = 0; i < 6; ++i) {
        if (i == n) continue;
        F.H[al][mu][i] = h2[mu][i] + 2.0 * f * fa[mu] * a2[n][i] - 2.0 * fa[mu] * h2_dot_fl[i];
      }
    }
    for (int i = 0; i < 6; ++i) {
      for (int j = 0; j < 6; ++j) {
        if (i == n && j != n)
          F.A[al][i][j] = a2[n][j] * (f * f - S) - 2.0 * f * h2_dot_fl[j];
        else if (j == n && i != n)
          F.A[al][i][j] = -(a2[n][i] * (f * f - S) - 2.0 * f * h2_dot_fl[i]);
        else if (i != n && j != n)
          F.A[al][i][j] = a2[i][j];
      }
    }
  }

  finish_composition(out, SpinFieldSpec(psi1), x);
  return out;
}

ComposedConnection compose_connection_B(const TypeBSpec& psi1, const Vec4& x,
                                        const ConnectionAtPoint& conn2) {
  TypeBEval ev = evaluate_type_b(psi1, x);
  ComposedConnection out;
  out.conn1 = pack_type_b(ev, psi1.tangent_index).value;
  out.conn2 = conn2;
  out.f = ev.f.v;
  out.f_mixed.resize(6);
  for (int k = 0; k < 6; ++k) out.f_mixed[static_cast<std::size_t>(k)] = ev.fb[static_cast<std::size_t>(k)].v;

  const double f = ev.f.v;
  const int t = psi1.tangent_index;
  const double eta_t = eta(t);
  std::array<double, 6> fb{};
  double Q = 0.0;
  for (int k = 0; k < 6; ++k) {
    fb[static_cast<std::size_t>(k)] = ev.fb[static_cast<std::size_t>(k)].v;
    Q += fb[static_cast<std::size_t>(k)] * fb[static_cast<std::size_t>(k)];
  }

  // Same collection as type A with the roles of the index blocks swapped:
  // the shared direction is the tangent t (metric eta_t), the partner set
  // is the normal block. S* = eta_t Q and f^2 + S* = 1.
  ConnectionAtPoint& F = out.formula;
  const double s_star = eta_t * Q;
  for (int al = 0; al < 4; ++al) {
    const auto& w2 = conn2.omega[al];
    const auto& h2 = conn2.H[al];
    const auto& a2 = conn2.A[al];
    const auto& h1 = out.conn1.H[al];
    const auto& a1 = out.conn1.A[al];

    std::array<double, 4> h2_dot_fb{};  // sum_k H2^{mu k} f^{t k}
    std::array<double, 6> a2_dot_fb{};  // sum_k A2^{i k} f^{t k}
    for (int mu = 0; mu < 4; ++mu)
      for (int k = 0; k < 6; ++k) h2_dot_fb[mu] += h2[mu][k] * fb[k];
    for (int i = 0; i < 6; ++i)
      for (int k = 0; k < 6; ++k) a2_dot_fb[i] += a2[i][k] * fb[k];

    for (int mu = 0; mu < 4; ++mu) {
      for (int nu = 0; nu < 4; ++nu) {
        if (mu == t && nu != t) {
          F.omega[al][mu][nu] = w2[t][nu] * (f * f - s_star) - 2.0 * f * h2_dot_fb[nu];
        } else if (nu == t && mu != t) {
          F.omega[al][mu][nu] = -(w2[t][mu] * (f * f - s_star) - 2.0 * f * h2_dot_fb[mu]);
        } else {
          F.omega[al][mu][nu] = mu == nu ? 0.0 : w2[mu][nu];
        }
      }
    }
    for (int i = 0; i < 6; ++i) {
      F.H[al][t][i] = h1[t][i] + h2[t][i] * (f * f - s_star) +
                      2.0 * eta_t * fb[i] * h2_dot_fb[t] - 2.0 * f * a2_dot_fb[i];
      for (int mu = 0; mu < 4; ++mu) {
        if (mu == t) continue;
        F.H[al][mu][i] = h2[mu][i] - 2.0 * eta_t * fb[i] * h2_dot_fb[mu] +
                         2.0 * eta_t * f * fb[i] * w2[t][mu];
      }
    }
    for (int i = 0; i < 6; ++i) {
      for (int j = 0; j < 6; ++j) {
        F.A[al][i][j] = a1[i][j] + a2[i][j] +
                        2.0 * eta_t * (fb[i] * a2_dot_fb[j] - fb[j] * a2_dot_fb[i]) +
                        2.0 * eta_t * f * (h2[t][i] * fb[j] - h2[t][j] * fb[i]);
      }
    }
  }

  finish_composition(out, SpinFieldSpec(psi1), x);
  return out;
}

}  // namespace spinframe
