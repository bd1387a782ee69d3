#include "spinframe/immersion.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace spinframe {

namespace {

Mat10 matmul(const Mat10& a, const Mat10& b) {
  Mat10 r{};
  for (int i = 0; i < 10; ++i)
    for (int k = 0; k < 10; ++k) {
      double aik = a[i][k];
      if (aik == 0.0) continue;
      for (int j = 0; j < 10; ++j) r[i][j] += aik * b[k][j];
    }
  return r;
}

Mat10 axpy(const Mat10& a, double s, const Mat10& b) {
  Mat10 r;
  for (int i = 0; i < 10; ++i)
    for (int j = 0; j < 10; ++j) r[i][j] = a[i][j] + s * b[i][j];
  return r;
}

// Direction-contracted mixed connection: M[I][J] = sum_alpha dx_alpha W_alpha[I][J].
Mat10 contracted(const ConnectionField& conn, const Vec4& x, const Vec4& dx) {
  std::array<Mat10, 4> w = mixed_connection(conn.value(x));
  Mat10 m{};
  for (int alpha = 0; alpha < 4; ++alpha) {
    double c = dx[static_cast<std::size_t>(alpha)];
    if (c == 0.0) continue;
    for (int i = 0; i < 10; ++i)
      for (int j = 0; j < 10; ++j) m[i][j] += c * w[static_cast<std::size_t>(alpha)][i][j];
  }
  return m;
}

double ortho_residual(const Mat10& e) {
  double worst = 0.0;
  for (int i = 0; i < 10; ++i)
    for (int j = 0; j < 10; ++j) {
      double v = 0.0;
      for (int k = 0; k < 10; ++k) v += eta(k) * e[i][k] * e[j][k];
      double target = i == j ? static_cast<double>(eta(i)) : 0.0;
      worst = std::max(worst, std::fabs(v - target));
    }
  return worst;
}

Vec4 lerp(const Vec4& a, const Vec4& b, double t) {
  Vec4 r;
  for (int i = 0; i < 4; ++i)
    r[static_cast<std::size_t>(i)] =
        a[static_cast<std::size_t>(i)] + t * (b[static_cast<std::size_t>(i)] - a[static_cast<std::size_t>(i)]);
  return r;
}

// One classic fourth-order step of E' = M(t) E across [t, t+h].
Mat10 rk4_step(const ConnectionField& conn, const Vec4& a, const Vec4& b, double t, double h,
               const Mat10& e) {
  Vec4 dx;
  for (int i = 0; i < 4; ++i)
    dx[static_cast<std::size_t>(i)] = b[static_cast<std::size_t>(i)] - a[static_cast<std::size_t>(i)];
  Mat10 m1 = contracted(conn, lerp(a, b, t), dx);
  Mat10 k1 = matmul(m1, e);
  Mat10 m2 = contracted(conn, lerp(a, b, t + 0.5 * h), dx);
  Mat10 k2 = matmul(m2, axpy(e, 0.5 * h, k1));
  Mat10 k3 = matmul(m2, axpy(e, 0.5 * h, k2));
  Mat10 m4 = contracted(conn, lerp(a, b, t + h), dx);
  Mat10 k4 = matmul(m4, axpy(e, h, k3));
  Mat10 out = e;
  for (int i = 0; i < 10; ++i)
    for (int j = 0; j < 10; ++j)
      out[i][j] += (h / 6.0) * (k1[i][j] + 2.0 * k2[i][j] + 2.0 * k3[i][j] + k4[i][j]);
  return out;
}

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

VielbeinField VielbeinField::zero() {
  VielbeinField v;
  ExprPtr z = parse("0");
  for (auto& row : v.theta)
    for (auto& entry : row) entry = z;
  return v;
}

VielbeinField VielbeinField::diagonal(const std::array<std::string, 4>& diag) {
  VielbeinField v = zero();
  for (int mu = 0; mu < 4; ++mu)
    v.theta[static_cast<std::size_t>(mu)][static_cast<std::size_t>(mu)] =
        parse(diag[static_cast<std::size_t>(mu)]);
  return v;
}

std::array<std::array<double, 10>, 4> VielbeinField::at(const Vec4& x) const {
  std::array<std::array<double, 10>, 4> out{};
  for (int alpha = 0; alpha < 4; ++alpha)
    for (int i = 0; i < 10; ++i)
      out[static_cast<std::size_t>(alpha)][static_cast<std::size_t>(i)] =
          eval(theta[static_cast<std::size_t>(alpha)][static_cast<std::size_t>(i)], x);
  return out;
}

FrameState FrameState::identity() {
  FrameState s;
  for (int i = 0; i < 10; ++i) s.e[i][i] = 1.0;
  return s;
}

FrameState FrameState::from_field(const SpinFieldSpec& spec, const Vec4& x,
                                  const std::array<double, 10>& q0, double tol) {
  FrameAtPoint fr = frame(spec, x, tol);
  FrameState s;
  s.q = q0;
  for (int i = 0; i < 10; ++i)
    for (int j = 0; j < 10; ++j)
      s.e[i][j] = fr.e[static_cast<std::size_t>(i)].coeff(BladeMask{1} << j);
  return s;
}

Multivector FrameState::frame_vector(int index, const Signature& sig) const {
  Multivector v(sig);
  for (int j = 0; j < 10; ++j) v.set(BladeMask{1} << j, e[index][j]);
  return v;
}

double FrameState::orthonormality_residual() const { return ortho_residual(e); }

FrameIntegration integrate_frame(const ConnectionField& conn, const PathSpec& path,
                                 const FrameState& init, const FDConfig&) {
  if (path.waypoints.size() < 2)
    throw std::invalid_argument("path needs at least two waypoints");
  if (path.steps_per_segment < 1) throw std::invalid_argument("steps_per_segment must be >= 1");

  FrameIntegration out;
  FrameState cur = init;
  out.nodes.push_back(cur);
  out.node_coords.push_back(path.waypoints.front());
  out.max_orthonormality_drift = ortho_residual(cur.e);

  for (std::size_t seg = 0; seg + 1 < path.waypoints.size(); ++seg) {
    const Vec4& a = path.waypoints[seg];
    const Vec4& b = path.waypoints[seg + 1];
    int steps = path.steps_per_segment;
    double h = 1.0 / steps;
    for (int s = 0; s < steps; ++s) {
      double t = s * h;
      // Half steps so each step also yields a fourth-order midpoint frame.
      Mat10 mid = rk4_step(conn, a, b, t, 0.5 * h, cur.e);
      Mat10 next = rk4_step(conn, a, b, t + 0.5 * h, 0.5 * h, mid);
      out.midpoints.push_back(mid);
      cur.e = next;
      out.nodes.push_back(cur);
      out.node_coords.push_back(lerp(a, b, t + h));
      out.max_orthonormality_drift =
          std::max(out.max_orthonormality_drift, ortho_residual(cur.e));
    }
  }
  return out;
}

std::vector<FrameState> integrate_position(const VielbeinField& vielbein,
                                           const FrameIntegration& frames, const PathSpec& path) {
  if (path.waypoints.size() < 2)
    throw std::invalid_argument("path needs at least two waypoints");
  std::size_t segments = path.waypoints.size() - 1;
  std::size_t steps_total = segments * static_cast<std::size_t>(path.steps_per_segment);
  if (frames.nodes.size() != steps_total + 1 || frames.midpoints.size() != steps_total)
    throw std::invalid_argument("frame samples do not match the path discretization");

  std::vector<FrameState> out = frames.nodes;
  std::array<double, 10> q = frames.nodes.front().q;
  out.front().q = q;

  std::size_t step_index = 0;
  for (std::size_t seg = 0; seg < segments; ++seg) {
    const Vec4& a = path.waypoints[seg];
    const Vec4& b = path.waypoints[seg + 1];
    Vec4 dx;
    for (int i = 0; i < 4; ++i)
      dx[static_cast<std::size_t>(i)] =
          b[static_cast<std::size_t>(i)] - a[static_cast<std::size_t>(i)];
    int steps = path.steps_per_segment;
    double h = 1.0 / steps;

    auto velocity = [&](const Vec4& x, const Mat10& e) {
      std::array<std::array<double, 10>, 4> th = vielbein.at(x);
      std::array<double, 10> v{};
      for (int alpha = 0; alpha < 4; ++alpha) {
        double da = dx[static_cast<std::size_t>(alpha)];
        if (da == 0.0) continue;
        for (int big_i = 0; big_i < 10; ++big_i) {
          double coeff = th[static_cast<std::size_t>(alpha)][static_cast<std::size_t>(big_i)];
          if (coeff == 0.0) continue;
          for (int j = 0; j < 10; ++j) v[static_cast<std::size_t>(j)] += da * coeff * e[big_i][j];
        }
      }
      return v;
    };

    for (int s = 0; s < steps; ++s, ++step_index) {
      double t = s * h;
      std::array<double, 10> v0 = velocity(lerp(a, b, t), frames.nodes[step_index].e);
      std::array<double, 10> vm = velocity(lerp(a, b, t + 0.5 * h), frames.midpoints[step_index]);
      std::array<double, 10> v1 = velocity(lerp(a, b, t + h), frames.nodes[step_index + 1].e);
      for (int j = 0; j < 10; ++j)
        q[static_cast<std::size_t>(j)] +=
            (h / 6.0) * (v0[static_cast<std::size_t>(j)] + 4.0 * vm[static_cast<std::size_t>(j)] +
                         v1[static_cast<std::size_t>(j)]);
      out[step_index + 1].q = q;
    }
  }
  return out;
}

FrameState integrate_state(const ConnectionField& conn, const VielbeinField& vielbein,
                           const PathSpec& path, const FrameState& init, const FDConfig& fd) {
  FrameIntegration frames = integrate_frame(conn, path, init, fd);
  return integrate_position(vielbein, frames, path).back();
}

double exactness_check(const VielbeinField& vielbein, const ConnectionField& conn, const Vec4& x,
                       const FDConfig&) {
  std::array<Mat10, 4> w = mixed_connection(conn.value(x));
  // dtheta[alpha][beta][I] = d_alpha theta_beta^I by autodiff
  std::array<std::array<std::array<double, 10>, 4>, 4> dtheta{};
  std::array<std::array<double, 10>, 4> th{};
  for (int beta = 0; beta < 4; ++beta) {
    for (int i = 0; i < 10; ++i) {
      Dual4 d = eval_dual(vielbein.theta[static_cast<std::size_t>(beta)][static_cast<std::size_t>(i)], x);
      th[static_cast<std::size_t>(beta)][static_cast<std::size_t>(i)] = d.v;
      for (int alpha = 0; alpha < 4; ++alpha)
        dtheta[static_cast<std::size_t>(alpha)][static_cast<std::size_t>(beta)]
              [static_cast<std::size_t>(i)] = d.d[static_cast<std::size_t>(alpha)];
    }
  }
  double worst = 0.0;
  for (int alpha = 0; alpha < 4; ++alpha) {
    for (int beta = alpha + 1; beta < 4; ++beta) {
      for (int big_i = 0; big_i < 10; ++big_i) {
        double v = dtheta[static_cast<std::size_t>(alpha)][static_cast<std::size_t>(beta)]
                         [static_cast<std::size_t>(big_i)] -
                   dtheta[static_cast<std::size_t>(beta)][static_cast<std::size_t>(alpha)]
                         [static_cast<std::size_t>(big_i)];
        for (int k = 0; k < 10; ++k)
          v -= th[static_cast<std::size_t>(alpha)][static_cast<std::size_t>(k)] *
                   w[static_cast<std::size_t>(beta)][k][big_i] -
               th[static_cast<std::size_t>(beta)][static_cast<std::size_t>(k)] *
                   w[static_cast<std::size_t>(alpha)][k][big_i];
        worst = std::max(worst, std::fabs(v));
      }
    }
  }
  return worst;
}

Vec4 GridSpec::coord(int i, int j, int k) const {
  auto axis = [this](int idx, int c) {
    auto a = static_cast<std::size_t>(c);
    if (counts[a] <= 1) return min[a];
    return min[a] + (max[a] - min[a]) * idx / (counts[a] - 1);
  };
  return Vec4{x0, axis(i, 0), axis(j, 1), axis(k, 2)};
}

std::vector<CloudPoint> compute_pointcloud(const ConnectionField& conn,
                                           const VielbeinField& vielbein, const GridSpec& grid,
                                           const FrameState& init, const PointCloudOptions& opts) {
  if (grid.counts[0] < 1 || grid.counts[1] < 1 || grid.counts[2] < 1)
    throw std::invalid_argument("grid counts must be positive");

  const int n1 = grid.counts[0], n2 = grid.counts[1], n3 = grid.counts[2];
  auto index = [&](int i, int j, int k) {
    return static_cast<std::size_t>((i * n2 + j) * n3 + k);
  };
  std::vector<FrameState> states(static_cast<std::size_t>(grid.total()));
  std::vector<bool> have(static_cast<std::size_t>(grid.total()), false);

  states[index(0, 0, 0)] = init;
  have[index(0, 0, 0)] = true;

  auto extend = [&](int i0, int j0, int k0, int i1, int j1, int k1) {
    if (have[index(i1, j1, k1)]) return;
    PathSpec edge;
    edge.waypoints = {grid.coord(i0, j0, k0), grid.coord(i1, j1, k1)};
    edge.steps_per_segment = opts.steps_per_edge;
    FrameIntegration fr = integrate_frame(conn, edge, states[index(i0, j0, k0)]);
    states[index(i1, j1, k1)] = integrate_position(vielbein, fr, edge).back();
    have[index(i1, j1, k1)] = true;
  };

  if (opts.order == TreeOrder::axis123) {
    for (int i = 1; i < n1; ++i) extend(i - 1, 0, 0, i, 0, 0);
    for (int i = 0; i < n1; ++i)
      for (int j = 1; j < n2; ++j) extend(i, j - 1, 0, i, j, 0);
    for (int i = 0; i < n1; ++i)
      for (int j = 0; j < n2; ++j)
        for (int k = 1; k < n3; ++k) extend(i, j, k - 1, i, j, k);
  } else {
    for (int k = 1; k < n3; ++k) extend(0, 0, k - 1, 0, 0, k);
    for (int k = 0; k < n3; ++k)
      for (int j = 1; j < n2; ++j) extend(0, j - 1, k, 0, j, k);
    for (int k = 0; k < n3; ++k)
      for (int j = 0; j < n2; ++j)
        for (int i = 1; i < n1; ++i) extend(i - 1, j, k, i, j, k);
  }

  std::vector<CloudPoint> cloud;
  cloud.reserve(static_cast<std::size_t>(grid.total()));
  for (int i = 0; i < n1; ++i)
    for (int j = 0; j < n2; ++j)
      for (int k = 0; k < n3; ++k)
        cloud.push_back(CloudPoint{grid.coord(i, j, k), states[index(i, j, k)].q});
  return cloud;
}

std::string pointcloud_csv(const std::vector<CloudPoint>& cloud) {
  std::string out = "x0,x1,x2,x3,q0,q1,q2,q3,q4,q5,q6,q7,q8,q9\n";
  for (const auto& p : cloud) {
    for (int i = 0; i < 4; ++i) {
      out += format_double(p.x[static_cast<std::size_t>(i)]);
      out += ',';
    }
    for (int i = 0; i < 10; ++i) {
      out += format_double(p.q[static_cast<std::size_t>(i)]);
      out += i == 9 ? '\n' : ',';
    }
  }
  return out;
}

void write_pointcloud_csv(const std::vector<CloudPoint>& cloud, const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error("cannot open output file " + path);
  f << pointcloud_csv(cloud);
}

void write_pointcloud_obj(const std::vector<CloudPoint>& cloud, const std::string& path,
                          const std::array<int, 3>& projection) {
  for (int c : projection)
    if (c < 0 || c > 9) throw std::invalid_argument("obj projection components must be in 0..9");
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error("cannot open output file " + path);
  for (const auto& p : cloud) {
    f << "v " << format_double(p.q[static_cast<std::size_t>(projection[0])]) << ' '
      << format_double(p.q[static_cast<std::size_t>(projection[1])]) << ' '
      << format_double(p.q[static_cast<std::size_t>(projection[2])]) << '\n';
  }
}

}  // namespace spinframe
