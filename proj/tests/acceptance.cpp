// Acceptance suite: every release criterion with its pinned tolerance,
// one pass/fail line each.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "spinframe/immersion.hpp"
#include "spinframe/solutions.hpp"

using namespace spinframe;

namespace {

int g_failures = 0;

void report(int criterion, const std::string& name, bool pass, const std::string& detail) {
  std::printf("[%s] criterion %d: %-34s %s\n", pass ? "PASS" : "FAIL", criterion, name.c_str(),
              detail.c_str());
  if (!pass) ++g_failures;
}

std::string max_str(const char* label, double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%s=%.3e", label, v);
  return buf;
}

const Signature& sig = Signature::ambient();

SpinFieldSpec example_field() { return SpinFieldSpec(ExampleFieldSpec{}); }

double example_s(const Vec4& x) { return 1.0 / (1.0 + x[1] * x[1] + x[2] * x[2] + x[3] * x[3]); }

std::array<double, 10> example_map(const Vec4& x) {
  std::array<double, 10> q{};
  double s = example_s(x);
  q[0] = x[0];
  q[1] = x[1] * s;
  q[2] = x[2] * s;
  q[3] = x[3] * s;
  q[5] = s;
  return q;
}

VielbeinField example_vielbein() {
  const std::string s = "1/(1+x1^2+x2^2+x3^2)";
  return VielbeinField::diagonal({"1", s, s, s});
}

// Random points with r^2 <= 4.
Vec4 sample_point(oracles::Rng& rng) {
  for (;;) {
    Vec4 x{rng.uniform(-1.0, 1.0), rng.uniform(-1.2, 1.2), rng.uniform(-1.2, 1.2),
           rng.uniform(-1.2, 1.2)};
    if (x[1] * x[1] + x[2] * x[2] + x[3] * x[3] <= 4.0) return x;
  }
}

// 1. extracted H matches -2/(1+r^2) on the diagonal, off-block clean.
void criterion_1() {
  auto t0 = std::chrono::steady_clock::now();
  oracles::Rng rng(1001);
  double worst_diag = 0.0, worst_off = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    Vec4 x = sample_point(rng);
    double s = example_s(x);
    ConnectionAtPoint conn = connection_field(example_field(), x);
    for (int al = 0; al < 4; ++al) {
      for (int m = 0; m < 4; ++m) {
        for (int i = 0; i < 6; ++i) {
          double got = conn.H[al][m][i];
          if (al == m && m != 0 && i == 1)
            worst_diag = std::max(worst_diag, std::fabs(got - (-2.0 * s)));
          else
            worst_off = std::max(worst_off, std::fabs(got));
        }
        for (int i = 0; i < 6; ++i)
          for (int j = 0; j < 6; ++j) worst_off = std::max(worst_off, std::fabs(conn.A[al][i][j]));
      }
    }
  }
  double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  bool pass = worst_diag < 1e-8 && worst_off < 1e-10 && elapsed < 1.0;
  report(1, "extrinsic curvature H", pass,
         max_str("diag_err", worst_diag) + " " + max_str("off_err", worst_off) + " " +
             max_str("seconds", elapsed));
}

// 2. extracted omega matches all nine displayed formulas at the same
// points criterion 1 samples.
void criterion_2() {
  oracles::Rng rng(1001);
  double worst = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    Vec4 x = sample_point(rng);
    double s = example_s(x);
    ConnectionAtPoint conn = connection_field(example_field(), x);
    auto want = [&](int al, int m, int n) -> double {
      if (al == 0 || m == 0 || n == 0) return 0.0;
      if (al == 1 && m == 1 && n == 2) return 2.0 * x[2] * s;
      if (al == 1 && m == 1 && n == 3) return 2.0 * x[3] * s;
      if (al == 2 && m == 1 && n == 2) return -2.0 * x[1] * s;
      if (al == 2 && m == 2 && n == 3) return 2.0 * x[3] * s;
      if (al == 3 && m == 1 && n == 3) return -2.0 * x[1] * s;
      if (al == 3 && m == 2 && n == 3) return -2.0 * x[2] * s;
      return 0.0;  // omega_1^{23}, omega_2^{13}, omega_3^{12} and the 0-rows
    };
    for (int al = 0; al < 4; ++al)
      for (int m = 0; m < 4; ++m)
        for (int n = m + 1; n < 4; ++n)
          worst = std::max(worst, std::fabs(conn.omega[al][m][n] - want(al, m, n)));
  }
  report(2, "connection omega", worst < 1e-8, max_str("max_err", worst));
}

// 3. curvature -4/(1+r^2)^2 via both derivative paths.
void criterion_3() {
  oracles::Rng rng(1003);
  ConnectionField closed = typeA_connection_source(example_field_params());
  ConnectionField extracted = connection_source(example_field());
  double worst_closed = 0.0, worst_fd = 0.0, worst_other = 0.0;
  for (int trial = 0; trial < 10; ++trial) {
    Vec4 x = sample_point(rng);
    double want = -4.0 * example_s(x) * example_s(x);
    CurvatureAtPoint cc = curvature(closed, x);
    CurvatureAtPoint cf = curvature(extracted, x, FDConfig{1e-5});
    for (int al = 0; al < 4; ++al) {
      for (int be = al + 1; be < 4; ++be) {
        for (int m = 0; m < 4; ++m) {
          for (int n = m + 1; n < 4; ++n) {
            bool display = al == m && be == n && al != 0;
            worst_closed = std::max(worst_closed, std::fabs(cc.R[al][be][m][n] - (display ? want : 0.0)));
            if (display)
              worst_fd = std::max(worst_fd, std::fabs(cf.R[al][be][m][n] - want));
            else
              worst_other = std::max(worst_other, std::fabs(cf.R[al][be][m][n]));
          }
        }
        for (int i = 0; i < 6; ++i)
          for (int j = 0; j < 6; ++j)
            worst_other = std::max(worst_other, std::fabs(cf.F[al][be][i][j]));
      }
    }
  }
  bool pass = worst_closed < 1e-9 && worst_fd < 1e-5 && worst_other < 1e-5;
  report(3, "curvature R", pass,
         max_str("closed", worst_closed) + " " + max_str("fd", worst_fd) + " " +
             max_str("other", worst_other));
}

// 4. immersion map, induced metric, grid export runtime.
void criterion_4() {
  ConnectionField conn = connection_source(example_field());
  VielbeinField vielbein = example_vielbein();
  oracles::Rng rng(1004);

  double worst_q = 0.0;
  for (int trial = 0; trial < 10; ++trial) {
    Vec4 a = oracles::random_point(rng, 0.5);
    Vec4 b = a;
    for (int i = 1; i < 4; ++i) b[static_cast<std::size_t>(i)] += rng.uniform(-0.3, 0.3);
    PathSpec path;
    path.waypoints = {a, b};
    path.steps_per_segment = 128;
    FrameState init = FrameState::from_field(example_field(), a, example_map(a));
    FrameState end = integrate_state(conn, vielbein, path, init);
    std::array<double, 10> want = example_map(b);
    for (int i = 0; i < 10; ++i)
      worst_q = std::max(worst_q, std::fabs(end.q[static_cast<std::size_t>(i)] -
                                            want[static_cast<std::size_t>(i)]));
  }

  // 9^3 grid export under the runtime budget
  auto t0 = std::chrono::steady_clock::now();
  GridSpec grid;
  grid.min = {-1.0, -1.0, -1.0};
  grid.max = {1.0, 1.0, 1.0};
  grid.counts = {9, 9, 9};
  Vec4 base = grid.coord(0, 0, 0);
  FrameState ginit = FrameState::from_field(example_field(), base, example_map(base));
  PointCloudOptions opts;
  opts.steps_per_edge = 32;
  std::vector<CloudPoint> cloud = compute_pointcloud(conn, vielbein, grid, ginit, opts);
  double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  double worst_grid = 0.0;
  for (const auto& p : cloud) {
    std::array<double, 10> want = example_map(p.x);
    for (int i = 0; i < 10; ++i)
      worst_grid = std::max(worst_grid, std::fabs(p.q[static_cast<std::size_t>(i)] -
                                                  want[static_cast<std::size_t>(i)]));
  }

  // FD-induced metric at 20 random grid nodes, short integrated legs
  double worst_metric = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    int gi = rng.uniform_int(1, 7), gj = rng.uniform_int(1, 7), gk = rng.uniform_int(1, 7);
    Vec4 x = grid.coord(gi, gj, gk);
    double h = 1e-3;
    FrameState start = FrameState::from_field(example_field(), x, example_map(x));
    std::array<std::array<double, 10>, 4> grad{};
    grad[0][0] = 1.0;  // q depends on x0 only through x0 e0
    for (int m = 1; m < 4; ++m) {
      Vec4 xp = x, xm = x;
      xp[static_cast<std::size_t>(m)] += h;
      xm[static_cast<std::size_t>(m)] -= h;
      PathSpec legp{{x, xp}, 8}, legm{{x, xm}, 8};
      FrameState endp = integrate_state(conn, vielbein, legp, start);
      FrameState endm = integrate_state(conn, vielbein, legm, start);
      for (int i = 0; i < 10; ++i)
        grad[static_cast<std::size_t>(m)][static_cast<std::size_t>(i)] =
            (endp.q[static_cast<std::size_t>(i)] - endm.q[static_cast<std::size_t>(i)]) / (2.0 * h);
    }
    double s = example_s(x);
    for (int m = 0; m < 4; ++m) {
      for (int n = 0; n < 4; ++n) {
        double want = m != n ? 0.0 : (m == 0 ? -1.0 : s * s);
        double got = 0.0;
        for (int i = 0; i < 10; ++i)
          got += eta(i) * grad[static_cast<std::size_t>(m)][static_cast<std::size_t>(i)] *
                 grad[static_cast<std::size_t>(n)][static_cast<std::size_t>(i)];
        worst_metric = std::max(worst_metric, std::fabs(got - want));
      }
    }
  }

  bool pass = worst_q < 1e-6 && worst_grid < 1e-6 && worst_metric < 1e-5 && elapsed < 10.0;
  report(4, "immersion map and metric", pass,
         max_str("q", worst_q) + " " + max_str("grid_q", worst_grid) + " " +
             max_str("metric", worst_metric) + " " + max_str("seconds", elapsed));
}

// 5. Gauss/Codazzi/Ricci residuals across family draws.
void criterion_5() {
  oracles::Rng rng(1005);
  double worst = 0.0;
  auto check = [&](const SpinFieldSpec& spec) {
    Vec4 x = oracles::random_point(rng, 0.45);
    worst = std::max(worst, gcr_residuals(spec, x, FDConfig{1e-5}).max());
  };
  check(example_field());
  for (int trial = 0; trial < 20; ++trial) check(SpinFieldSpec(oracles::random_type_a(rng)));
  for (int trial = 0; trial < 20; ++trial) check(SpinFieldSpec(oracles::random_type_b(rng)));
  for (int trial = 0; trial < 10; ++trial) {
    SpinFieldSpec first(oracles::random_type_a(rng));
    SpinFieldSpec second = trial % 2 == 0 ? SpinFieldSpec(oracles::random_type_b(rng))
                                          : SpinFieldSpec(oracles::random_rotation(rng));
    check(SpinFieldSpec(ProductSpec{{first, second}}));
  }
  report(5, "Gauss/Codazzi/Ricci residuals", worst < 1e-4, max_str("max_residual", worst));
}

// A literal transcription of the composition displays as typeset in the
// source material (kept test-only). The machine check below documents how
// far those coefficient sets drift from the conjugation oracle; the
// library ships the corrected formulas.
ConnectionAtPoint compose_A_as_typeset(const TypeASpec& psi1, const Vec4& x,
                                       const ConnectionAtPoint& conn2) {
  ConnectionAtPoint conn1 = typeA_closed_connection(psi1, x);
  double f = eval(psi1.f, x);
  int n = psi1.normal_index - 4;
  std::array<double, 4> fa{}, fl{};
  double big_s = 0.0;
  for (int mu = 0; mu < 4; ++mu) {
    fa[mu] = eval(psi1.fA[static_cast<std::size_t>(mu)], x);
    fl[mu] = eta(mu) * fa[mu];
    big_s += fl[mu] * fa[mu];
  }
  ConnectionAtPoint F;
  for (int al = 0; al < 4; ++al) {
    const auto& w2 = conn2.omega[al];
    const auto& h2 = conn2.H[al];
    const auto& a2 = conn2.A[al];
    std::array<double, 4> w_dot{};
    std::array<double, 6> h_dot{};
    for (int mu = 0; mu < 4; ++mu)
      for (int g = 0; g < 4; ++g) w_dot[mu] += w2[mu][g] * fl[g];
    for (int i = 0; i < 6; ++i)
      for (int g = 0; g < 4; ++g) h_dot[i] += fl[g] * h2[g][i];
    for (int mu = 0; mu < 4; ++mu) {
      for (int nu = 0; nu < 4; ++nu) {
        double restricted = big_s - fl[mu] * fa[mu] - fl[nu] * fa[nu];
        F.omega[al][mu][nu] = conn1.omega[al][mu][nu] + w2[mu][nu] * (f * f + restricted) +
                              2.0 * fa[mu] * w_dot[nu] - 2.0 * fa[nu] * w_dot[mu] +
                              2.0 * f * fa[nu] * h2[mu][n] - 2.0 * f * fa[mu] * h2[nu][n];
      }
      F.H[al][mu][n] = conn1.H[al][mu][n] +
                       h2[mu][n] * (f * f - 2.0 * (big_s - fl[mu] * fa[mu])) -
                       2.0 * f * w_dot[mu] + 4.0 * fa[mu] * h_dot[n];
      for (int i = 0; i < 6; ++i) {
        if (i == n) continue;
        F.H[al][mu][i] = h2[mu][i] * (f * f + big_s - fl[mu] * fa[mu]) +
                         2.0 * f * fa[mu] * a2[n][i] + 2.0 * fa[mu] * h_dot[i];
      }
    }
    for (int i = 0; i < 6; ++i) {
      for (int j = 0; j < 6; ++j) {
        if (i == n && j != n)
          F.A[al][i][j] = a2[n][j] * (f * f - 2.0 * big_s) - 2.0 * f * h_dot[j];
        else if (j == n && i != n)
          F.A[al][i][j] = -(a2[n][i] * (f * f - 2.0 * big_s) - 2.0 * f * h_dot[i]);
        else if (i != n && j != n)
          F.A[al][i][j] = a2[i][j];
      }
    }
  }
  return F;
}

// 6. composition formulas vs the conjugation oracle, 100 draws per type.
void criterion_6() {
  oracles::Rng rng(1006);
  auto random_connection = [&]() {
    ConnectionAtPoint c;
    for (int al = 0; al < 4; ++al) {
      for (int m = 0; m < 4; ++m)
        for (int n = m + 1; n < 4; ++n) {
          double v = rng.uniform(-1.0, 1.0);
          c.omega[al][m][n] = v;
          c.omega[al][n][m] = -v;
        }
      for (int m = 0; m < 4; ++m)
        for (int i = 0; i < 6; ++i) c.H[al][m][i] = rng.uniform(-1.0, 1.0);
      for (int i = 0; i < 6; ++i)
        for (int j = i + 1; j < 6; ++j) {
          double v = rng.uniform(-1.0, 1.0);
          c.A[al][i][j] = v;
          c.A[al][j][i] = -v;
        }
    }
    return c;
  };
  double worst_a = 0.0, worst_b = 0.0, typeset_dev = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    Vec4 x = oracles::random_point(rng, 0.4);
    TypeASpec pa = oracles::random_type_a(rng);
    ConnectionAtPoint c2 = random_connection();
    ComposedConnection ca = compose_connection_A(pa, x, c2);
    worst_a = std::max(worst_a, ca.formula_deviation);
    typeset_dev = std::max(typeset_dev, max_abs(compose_A_as_typeset(pa, x, c2) - ca.oracle));
    ComposedConnection cb = compose_connection_B(oracles::random_type_b(rng), x, random_connection());
    worst_b = std::max(worst_b, cb.formula_deviation);
  }
  bool pass = worst_a < 1e-10 && worst_b < 1e-10;
  report(6, "composition formula fidelity", pass,
         max_str("typeA", worst_a) + " " + max_str("typeB", worst_b) + " " +
             max_str("typeset_display_dev", typeset_dev) + " (discrepancy reported)");
}

// 7. normalized grade-mixing element: normalization passes, frame index 1
// fails with the exact grade-5 image.
void criterion_7() {
  double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  ConstantSpec t;
  t.value = Multivector::blade(sig, 0b110, inv_sqrt2) + Multivector::blade(sig, 0b1111000, inv_sqrt2);
  SpinCheck check = check_spin(SpinFieldSpec(t), {0, 0, 0, 0}, 1e-10);
  // recovered image is the single grade-5 blade e2 e3 e4 e5 e6; the
  // coefficient matches 1 to one rounding of the 1/sqrt(2) inputs
  Multivector want = Multivector::blade(sig, 0b1111100, 1.0);
  bool single_blade = check.deformed[1].terms().size() == 1 &&
                      check.deformed[1].terms().begin()->first == 0b1111100u;
  double recovery_err = max_abs_diff(check.deformed[1], want);
  bool pass = check.normalization_residual < 1e-12 && !check.sandwich_grade_ok[1] &&
              single_blade && recovery_err < 1e-15;
  report(7, "grade-mixing counterexample", pass,
         max_str("norm", check.normalization_residual) + " " +
             max_str("recovery_err", recovery_err));
}

// 8. rotation identities: sandwich rotation and the trivial solution.
void criterion_8() {
  double worst_rot = 0.0;
  for (int k = 0; k < 20; ++k) {
    double theta = -3.0 + 6.0 * k / 19.0;
    Multivector rotor = exp_even((theta / 2.0) * Multivector::blade(sig, 0b110, 1.0));
    Multivector got = sandwich(rotor, Multivector::generator(sig, 1));
    Multivector want = Multivector::generator(sig, 1) * std::cos(theta) +
                       Multivector::generator(sig, 2) * std::sin(theta);
    worst_rot = std::max(worst_rot, max_abs_diff(got, want));
  }

  RotationSpec rot;
  rot.plane_i = 4;
  rot.plane_j = 5;
  rot.angle = parse("0.7*x0 - 0.3*x2");
  SpinFieldSpec spec{rot};
  Vec4 x{0.3, -0.1, 0.6, 0.2};
  ConnectionAtPoint conn = connection_field(spec, x);
  double worst_a = std::fabs(conn.A[0][0][1] - 0.7);
  worst_a = std::max(worst_a, std::fabs(conn.A[2][0][1] + 0.3));
  worst_a = std::max(worst_a, std::fabs(conn.A[1][0][1]));
  double worst_f = 0.0;
  CurvatureAtPoint curv = curvature(spec, x, FDConfig{1e-5});
  for (int al = 0; al < 4; ++al)
    for (int be = 0; be < 4; ++be)
      for (int i = 0; i < 6; ++i)
        for (int j = 0; j < 6; ++j) worst_f = std::max(worst_f, std::fabs(curv.F[al][be][i][j]));

  bool pass = worst_rot < 1e-12 && worst_a < 1e-10 && worst_f < 1e-10;
  report(8, "rotation identities", pass,
         max_str("sandwich", worst_rot) + " " + max_str("A", worst_a) + " " + max_str("F", worst_f));
}

// 9. blade oracle agreement and algebra law suites.
void criterion_9() {
  bool blades_ok = true;
  for (const Signature& s : {Signature::euclidean(3), Signature::minkowski(4)}) {
    for (BladeMask a = 0; a < s.blade_count(); ++a) {
      for (BladeMask b = 0; b < s.blade_count(); ++b) {
        auto fast = blade_product(a, b, s);
        auto ref = oracles::blade_product_brute(a, b, s);
        if (fast.sign != ref.sign || fast.blade != ref.blade) blades_ok = false;
      }
    }
  }

  oracles::Rng rng(1009);
  auto random_sparse = [&](int terms) {
    Multivector m(sig);
    for (int t = 0; t < terms; ++t)
      m.add(static_cast<BladeMask>(rng.uniform_int(0, static_cast<int>(sig.blade_count()) - 1)),
            rng.uniform(-2.0, 2.0));
    return m;
  };
  double worst_assoc = 0.0, worst_rev = 0.0;
  for (int trial = 0; trial < 200; ++trial) {
    Multivector a = random_sparse(5), b = random_sparse(5), c = random_sparse(5);
    worst_assoc = std::max(worst_assoc, max_abs_diff((a * b) * c, a * (b * c)));
    worst_rev = std::max(worst_rev, max_abs_diff(reverse(a * b), reverse(b) * reverse(a)));
  }
  bool pass = blades_ok && worst_assoc < 1e-12 && worst_rev < 1e-12;
  report(9, "algebra laws", pass,
         std::string(blades_ok ? "blade_oracle=exact " : "blade_oracle=MISMATCH ") +
             max_str("assoc", worst_assoc) + " " + max_str("reversion", worst_rev));
}

}  // namespace

int main() {
  criterion_1();
  criterion_2();
  criterion_3();
  criterion_4();
  criterion_5();
  criterion_6();
  criterion_7();
  criterion_8();
  criterion_9();
  if (g_failures == 0)
    std::printf("all acceptance criteria passed\n");
  else
    std::printf("%d acceptance criteria FAILED\n", g_failures);
  return g_failures == 0 ? 0 : 1;
}
