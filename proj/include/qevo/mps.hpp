// Copyright 2026 The qevo Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
#pragma once

#include <algorithm>
#include <array>
#include <cassert>
#include <cmath>
#include <cstddef>
#include <random>
#include <span>
#include <vector>

#include "qevo/error.hpp"
#include "qevo/rng.hpp"

namespace qevo::mps {

inline constexpr std::size_t kLocalDim = 2;

/// Lifts an observation component in [0,1] to the local vector (1-v, v).
inline std::array<double, 2> feature_map(double v) {
  detail::require(v >= 0.0 && v <= 1.0, "feature_map input must lie in [0, 1]");
  return {1.0 - v, v};
}

/// Geometry of an open-boundary MPS with `n_sites` input legs plus one
/// output core carrying an open leg of size `out_dim`.
///
/// Core layout along the chain (n_sites + 1 cores in total):
///   left boundary  [phys][bond]                 (d x m)
///   interior       [bond][phys][bond]           (m x d x m)
///   output core    [bond][out][bond]            (m x out x m), at output_position()
///   right boundary [bond][phys]                 (m x d)
struct MpsShape {
  std::size_t n_sites = 147;
  std::size_t bond_dim = 4;
  std::size_t out_dim = 8;

  std::size_t n_cores() const noexcept { return n_sites + 1; }
  std::size_t output_position() const noexcept { return n_cores() / 2; }

  void validate() const {
    if (n_sites < 2) throw ConfigError("MPS needs at least 2 input sites");
    if (bond_dim < 1) throw ConfigError("bond dimension must be >= 1");
    if (out_dim < 1) throw ConfigError("output dimension must be >= 1");
  }

  std::size_t core_size(std::size_t k) const noexcept {
    const std::size_t m = bond_dim;
    if (k == output_position()) return m * out_dim * m;
    if (k == 0 || k + 1 == n_cores()) return kLocalDim * m;
    return m * kLocalDim * m;
  }

  std::size_t param_count() const noexcept {
    std::size_t total = 0;
    for (std::size_t k = 0; k < n_cores(); ++k) total += core_size(k);
    return total;
  }

  friend bool operator==(const MpsShape&, const MpsShape&) = default;
};

class MpsFeatureExtractor {
 public:
  /// All-zero cores.
  explicit MpsFeatureExtractor(MpsShape shape) : shape_(shape) {
    shape_.validate();
    cores_.resize(shape_.n_cores());
    for (std::size_t k = 0; k < cores_.size(); ++k) cores_[k].assign(shape_.core_size(k), 0.0);
  }

  const MpsShape& shape() const noexcept { return shape_; }
  std::size_t param_count() const noexcept { return shape_.param_count(); }

  std::span<double> core(std::size_t k) { return cores_.at(k); }
  std::span<const double> core(std::size_t k) const { return cores_.at(k); }

  /// Kronecker-delta base: boundaries select bond index 0, interior and
  /// output cores are the identity on their bond pair for every
  /// physical/output index.
  void set_identity() {
    const std::size_t m = shape_.bond_dim;
    const std::size_t last = shape_.n_cores() - 1;
    for (std::size_t k = 0; k < cores_.size(); ++k) {
      auto& c = cores_[k];
      std::fill(c.begin(), c.end(), 0.0);
      if (k == shape_.output_position()) {
        for (std::size_t a = 0; a < m; ++a)
          for (std::size_t o = 0; o < shape_.out_dim; ++o) c[(a * shape_.out_dim + o) * m + a] = 1.0;
      } else if (k == 0) {
        for (std::size_t i = 0; i < kLocalDim; ++i) c[i * m] = 1.0;
      } else if (k == last) {
        for (std::size_t i = 0; i < kLocalDim; ++i) c[i] = 1.0;
      } else {
        for (std::size_t a = 0; a < m; ++a)
          for (std::size_t i = 0; i < kLocalDim; ++i) c[(a * kLocalDim + i) * m + a] = 1.0;
      }
    }
  }

  /// Core-major, row-major within each core.
  std::vector<double> flatten() const {
    std::vector<double> out;
    out.reserve(param_count());
    for (const auto& c : cores_) out.insert(out.end(), c.begin(), c.end());
    return out;
  }

  static MpsFeatureExtractor unflatten(std::span<const double> values, MpsShape shape) {
    MpsFeatureExtractor mps(shape);
    detail::require(values.size() == mps.param_count(), "MPS parameter vector has wrong length");
    std::size_t off = 0;
    for (auto& c : mps.cores_) {
      std::copy_n(values.begin() + static_cast<std::ptrdiff_t>(off), c.size(), c.begin());
      off += c.size();
    }
    return mps;
  }

  /// f(v) with the output leg left open, computed by a left-to-right sweep.
  /// The running environment is a bond vector before the output core and an
  /// (out_dim x m) matrix after it.
  std::vector<double> contract(std::span<const double> input) const {
    detail::require(input.size() == shape_.n_sites, "input length must equal the number of MPS sites");
    const std::size_t m = shape_.bond_dim;
    const std::size_t out = shape_.out_dim;
    const std::size_t last = shape_.n_cores() - 1;
    const std::size_t mid = shape_.output_position();

    std::vector<double> env(m, 0.0);      // rows = 1 before mid, out after
    std::vector<double> next;
    std::vector<double> transfer(m * m);  // phi-contracted interior core
    std::size_t rows = 1;
    std::size_t site = 0;

    for (std::size_t k = 0; k < shape_.n_cores(); ++k) {
      const auto& c = cores_[k];
      if (k == mid) {
        next.assign(out * m, 0.0);
        for (std::size_t a = 0; a < m; ++a) {
          const double e = env[a];
          if (e == 0.0) continue;
          for (std::size_t o = 0; o < out; ++o)
            for (std::size_t b = 0; b < m; ++b) next[o * m + b] += e * c[(a * out + o) * m + b];
        }
        env.swap(next);
        rows = out;
        continue;
      }

      const auto phi = feature_map(input[site++]);
      if (k == 0) {
        for (std::size_t b = 0; b < m; ++b) env[b] = phi[0] * c[b] + phi[1] * c[m + b];
      } else if (k == last) {
        std::vector<double> result(rows, 0.0);
        for (std::size_t r = 0; r < rows; ++r) {
          double acc = 0.0;
          for (std::size_t a = 0; a < m; ++a) acc += env[r * m + a] * (phi[0] * c[a * kLocalDim] + phi[1] * c[a * kLocalDim + 1]);
          result[r] = acc;
        }
        assert(std::all_of(result.begin(), result.end(), [](double x) { return std::isfinite(x); }));
        return result;
      } else {
        for (std::size_t a = 0; a < m; ++a)
          for (std::size_t b = 0; b < m; ++b)
            transfer[a * m + b] = phi[0] * c[(a * kLocalDim) * m + b] + phi[1] * c[(a * kLocalDim + 1) * m + b];
        next.assign(rows * m, 0.0);
        for (std::size_t r = 0; r < rows; ++r)
          for (std::size_t a = 0; a < m; ++a) {
            const double e = env[r * m + a];
            if (e == 0.0) continue;
            for (std::size_t b = 0; b < m; ++b) next[r * m + b] += e * transfer[a * m + b];
          }
        env.swap(next);
      }
      assert(std::all_of(env.begin(), env.end(), [](double x) { return std::isfinite(x); }));
    }
    return {};  // unreachable: the chain always ends in the right boundary
  }

  friend bool operator==(const MpsFeatureExtractor&, const MpsFeatureExtractor&) = default;

 private:
  MpsShape shape_;
  std::vector<std::vector<double>> cores_;
};

/// Identity base plus N(0,1) * noise_scale on every entry.
inline MpsFeatureExtractor init_extractor(MpsShape shape, Rng& rng, double noise_scale) {
  MpsFeatureExtractor mps(shape);
  mps.set_identity();
  std::normal_distribution<double> normal(0.0, 1.0);
  for (std::size_t k = 0; k < shape.n_cores(); ++k)
    for (double& x : mps.core(k)) x += normal(rng) * noise_scale;
  return mps;
}

inline std::vector<double> contract(const MpsFeatureExtractor& mps, std::span<const double> input) {
  return mps.contract(input);
}

}  // namespace qevo::mps
