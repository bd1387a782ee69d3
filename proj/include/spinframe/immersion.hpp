#pragma once
#include <array>
#include <string>
#include <vector>

#include "spinframe/geometry.hpp"

namespace spinframe {

// Polyline through coordinate space; each segment is integrated with the
// same fixed number of steps.
struct PathSpec {
  std::vector<Vec4> waypoints;
  int steps_per_segment = 256;
};

// Vielbein components theta[alpha][I] as expressions of the coordinates;
// normal-block entries are typically zero.
struct VielbeinField {
  std::array<std::array<ExprPtr, 10>, 4> theta;

  static VielbeinField zero();
  // Tangent block diag(d0..d3) from expression strings, normal block zero.
  static VielbeinField diagonal(const std::array<std::string, 4>& diag);
  std::array<std::array<double, 10>, 4> at(const Vec4& x) const;
};

// Position plus moving frame. Row I of `e` holds the fixed-frame
// coefficients of the frame vector e_I.
struct FrameState {
  std::array<double, 10> q{};
  Mat10 e{};

  static FrameState identity();
  static FrameState from_field(const SpinFieldSpec& spec, const Vec4& x,
                               const std::array<double, 10>& q0, double tol = 1e-8);
  Multivector frame_vector(int index, const Signature& sig = Signature::ambient()) const;
  double orthonormality_residual() const;
};

// Frames along a discretized path. Nodes sit at every step boundary of
// every segment (segment endpoints shared); midpoints at half steps feed
// the position quadrature.
struct FrameIntegration {
  std::vector<FrameState> nodes;
  std::vector<Mat10> midpoints;  // one per step
  std::vector<Vec4> node_coords;
  double max_orthonormality_drift = 0.0;
  const FrameState& final_state() const { return nodes.back(); }
};

// Fourth-order fixed-step transport of the frame system de_I = w_I^J e_J
// along the polyline.
FrameIntegration integrate_frame(const ConnectionField& conn, const PathSpec& path,
                                 const FrameState& init, const FDConfig& fd = {});

// Accumulates dq = theta^I e_I over an already-integrated frame path by
// composite Simpson quadrature; returns per-node states with q filled in.
// Throws std::invalid_argument if the frames do not match the path
// discretization.
std::vector<FrameState> integrate_position(const VielbeinField& vielbein,
                                           const FrameIntegration& frames, const PathSpec& path);

// Convenience: transport frame and position together, returning the path
// endpoint.
FrameState integrate_state(const ConnectionField& conn, const VielbeinField& vielbein,
                           const PathSpec& path, const FrameState& init, const FDConfig& fd = {});

// Residual of the exactness condition d theta^I = theta^K ^ w_K^I over
// all free indices; vielbein derivatives by autodiff, connection values
// from the field.
double exactness_check(const VielbeinField& vielbein, const ConnectionField& conn, const Vec4& x,
                       const FDConfig& fd = {});

// Regular grid over (x1,x2,x3) at fixed x0.
struct GridSpec {
  double x0 = 0.0;
  std::array<double, 3> min{-1.0, -1.0, -1.0};
  std::array<double, 3> max{1.0, 1.0, 1.0};
  std::array<int, 3> counts{5, 5, 5};

  int total() const { return counts[0] * counts[1] * counts[2]; }
  Vec4 coord(int i, int j, int k) const;
};

enum class TreeOrder { axis123, axis321 };

struct PointCloudOptions {
  int steps_per_edge = 32;
  TreeOrder order = TreeOrder::axis123;
  std::array<int, 3> obj_projection{1, 2, 3};  // q components used for OBJ vertices
};

struct CloudPoint {
  Vec4 x{};
  std::array<double, 10> q{};
};

// Integrates q over a spanning tree of grid edges rooted at the minimum
// corner. Rows come out in lexicographic (x1,x2,x3) order.
std::vector<CloudPoint> compute_pointcloud(const ConnectionField& conn,
                                           const VielbeinField& vielbein, const GridSpec& grid,
                                           const FrameState& init,
                                           const PointCloudOptions& opts = {});

// CSV ("x0,x1,x2,x3,q0,...,q9") or OBJ vertex lines, LF endings.
void write_pointcloud_csv(const std::vector<CloudPoint>& cloud, const std::string& path);
void write_pointcloud_obj(const std::vector<CloudPoint>& cloud, const std::string& path,
                          const std::array<int, 3>& projection);

std::string pointcloud_csv(const std::vector<CloudPoint>& cloud);

}  // namespace spinframe
