// Times the residual grid sweep: OpenMP kernel against the serial
// reference, checking that both produce identical values.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <string>
#include <vector>

#include "spinframe/geometry.hpp"
#include "spinframe/sweep.hpp"

using namespace spinframe;

namespace {

double run_once(const std::vector<Vec4>& pts, const ConnectionField& source,
                std::vector<double>& out, bool parallel, int threads) {
  auto kernel = [&](std::size_t i) { out[i] = gcr_residuals(source, pts[i]).max(); };
  auto t0 = std::chrono::steady_clock::now();
  if (parallel)
    sweep::run_parallel(pts.size(), kernel, threads);
  else
    sweep::run_serial(pts.size(), kernel);
  auto t1 = std::chrono::steady_clock::now();
  return std::chrono::duration<double>(t1 - t0).count();
}

}  // namespace

int main(int argc, char** argv) {
  int n = 9;
  int threads = 0;
  int repeats = 3;
  for (int i = 1; i < argc; ++i) {
    std::string arg = argv[i];
    if (arg == "--n" && i + 1 < argc)
      n = std::atoi(argv[++i]);
    else if (arg == "--threads" && i + 1 < argc)
      threads = std::atoi(argv[++i]);
    else if (arg == "--repeats" && i + 1 < argc)
      repeats = std::atoi(argv[++i]);
    else {
      std::fprintf(stderr, "usage: %s [--n N] [--threads T] [--repeats R]\n", argv[0]);
      return 2;
    }
  }

  std::vector<Vec4> pts;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        pts.push_back(Vec4{0.0, -0.8 + 1.6 * i / std::max(1, n - 1),
                           -0.8 + 1.6 * j / std::max(1, n - 1),
                           -0.8 + 1.6 * k / std::max(1, n - 1)});

  SpinFieldSpec field((ExampleFieldSpec()));
  ConnectionField source = connection_source(field);

  std::vector<double> serial(pts.size()), parallel(pts.size());
  double t_serial = 1e300, t_parallel = 1e300;
  for (int r = 0; r < repeats; ++r) {
    t_serial = std::min(t_serial, run_once(pts, source, serial, false, threads));
    t_parallel = std::min(t_parallel, run_once(pts, source, parallel, true, threads));
  }

  double max_diff = 0.0, max_res = 0.0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    max_diff = std::max(max_diff, std::fabs(serial[i] - parallel[i]));
    max_res = std::max(max_res, serial[i]);
  }

  std::printf("grid points        : %zu\n", pts.size());
  std::printf("threads            : %d\n", sweep::resolve_threads(threads));
  std::printf("serial sweep  [s]  : %.4f\n", t_serial);
  std::printf("openmp sweep  [s]  : %.4f\n", t_parallel);
  std::printf("speedup            : %.2fx\n", t_parallel > 0 ? t_serial / t_parallel : 0.0);
  std::printf("max |serial-omp|   : %.3e\n", max_diff);
  std::printf("max gcr residual   : %.3e\n", max_res);

  if (max_diff != 0.0) {
    std::fprintf(stderr, "FAIL: parallel sweep differs from the serial reference\n");
    return 1;
  }
  return 0;
}
