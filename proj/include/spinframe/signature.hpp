#pragma once
#include <array>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <string>

#include "spinframe/errors.hpp"

namespace spinframe {

// Four submanifold coordinates (x0..x3).
using Vec4 = std::array<double, 4>;

// Diagonal metric of a real Clifford algebra: `dim` generators, each
// squaring to +1 or -1. Supports at most 16 generators (blade masks fit
// in 16 bits).
class Signature {
 public:
  static constexpr int max_dim = 16;

  Signature(int dim, std::span<const int> diag) : dim_(dim) {
    if (dim < 1 || dim > max_dim)
      throw AlgebraError("signature dimension must be in [1,16], got " + std::to_string(dim));
    if (static_cast<int>(diag.size()) != dim)
      throw AlgebraError("metric diagonal length does not match dimension");
    for (int i = 0; i < dim; ++i) {
      if (diag[i] != 1 && diag[i] != -1)
        throw AlgebraError("metric diagonal entries must be +1 or -1");
      metric_[i] = static_cast<std::int8_t>(diag[i]);
    }
  }

  Signature(int dim, std::initializer_list<int> diag)
      : Signature(dim, std::span<const int>(diag.begin(), diag.size())) {}

  // All generators square to +1.
  static Signature euclidean(int dim) {
    std::array<int, max_dim> d{};
    d.fill(1);
    return Signature(dim, std::span<const int>(d.data(), dim));
  }

  // Generator 0 squares to -1, the rest to +1.
  static Signature minkowski(int dim) {
    std::array<int, max_dim> d{};
    d.fill(1);
    d[0] = -1;
    return Signature(dim, std::span<const int>(d.data(), dim));
  }

  // Default ambient algebra for the whole pipeline.
  static const Signature& ambient() {
    static const Signature sig = minkowski(10);
    return sig;
  }

  int dim() const { return dim_; }
  int metric(int i) const { return metric_[i]; }
  std::uint32_t blade_count() const { return 1u << dim_; }

  bool operator==(const Signature& o) const {
    if (dim_ != o.dim_) return false;
    for (int i = 0; i < dim_; ++i)
      if (metric_[i] != o.metric_[i]) return false;
    return true;
  }
  bool operator!=(const Signature& o) const { return !(*this == o); }

 private:
  int dim_;
  std::array<std::int8_t, max_dim> metric_{};
};

}  // namespace spinframe
