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

// Independent reference computations used by the tests. None of these call
// into the library's simulation, contraction or search code.

#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <deque>
#include <map>
#include <span>
#include <tuple>
#include <vector>

namespace qevo::testing {

using C = std::complex<double>;
using Mat = std::vector<std::vector<C>>;

inline Mat identity(std::size_t n) {
  Mat m(n, std::vector<C>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i) m[i][i] = 1.0;
  return m;
}

inline Mat kron(const Mat& a, const Mat& b) {
  const std::size_t n = a.size(), p = b.size();
  Mat out(n * p, std::vector<C>(n * p, 0.0));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t k = 0; k < p; ++k)
        for (std::size_t l = 0; l < p; ++l) out[i * p + k][j * p + l] = a[i][j] * b[k][l];
  return out;
}

inline std::vector<C> matvec(const Mat& m, const std::vector<C>& v) {
  std::vector<C> out(v.size(), 0.0);
  for (std::size_t i = 0; i < m.size(); ++i)
    for (std::size_t j = 0; j < v.size(); ++j) out[i] += m[i][j] * v[j];
  return out;
}

inline Mat matmul(const Mat& a, const Mat& b) {
  const std::size_t n = a.size();
  Mat out(n, std::vector<C>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k < n; ++k)
      for (std::size_t j = 0; j < n; ++j) out[i][j] += a[i][k] * b[k][j];
  return out;
}

/// exp(-i theta Y / 2), written out from the series definition.
inline Mat ry_matrix(double t) {
  return {{std::cos(t / 2), -std::sin(t / 2)}, {std::sin(t / 2), std::cos(t / 2)}};
}

inline Mat rz_matrix(double t) {
  return {{std::exp(C(0, -t / 2)), 0.0}, {0.0, std::exp(C(0, t / 2))}};
}

inline Mat h_matrix() {
  const double r = 1.0 / std::sqrt(2.0);
  return {{r, r}, {r, -r}};
}

/// Embeds a one-qubit matrix on `qubit` of an n-qubit register (qubit 0 = leftmost factor).
inline Mat embed(const Mat& u, std::size_t qubit, std::size_t n) {
  Mat out = {{1.0}};
  for (std::size_t q = 0; q < n; ++q) out = kron(out, q == qubit ? u : identity(2));
  return out;
}

/// Permutation matrix of CNOT built from its truth table.
inline Mat cnot_matrix(std::size_t control, std::size_t target, std::size_t n) {
  const std::size_t dim = std::size_t{1} << n;
  Mat m(dim, std::vector<C>(dim, 0.0));
  for (std::size_t k = 0; k < dim; ++k) {
    std::vector<int> bits(n);
    for (std::size_t q = 0; q < n; ++q) bits[q] = (k >> (n - 1 - q)) & 1;
    if (bits[control]) bits[target] ^= 1;
    std::size_t out = 0;
    for (std::size_t q = 0; q < n; ++q) out = (out << 1) | static_cast<std::size_t>(bits[q]);
    m[out][k] = 1.0;
  }
  return m;
}

/// Core tensors of a small MPS in the library's layout, evaluated by summing
/// over every physical index tuple: prod of phi factors times the open-leg
/// matrix-product chain.
struct SmallMps {
  std::size_t n_sites, m, out;
  std::vector<std::vector<double>> cores;  // same layout as MpsFeatureExtractor

  std::size_t mid() const { return (n_sites + 1) / 2; }

  std::vector<double> brute_force(std::span<const double> v) const {
    std::vector<double> f(out, 0.0);
    const std::size_t n_cores = n_sites + 1;
    for (std::size_t tuple = 0; tuple < (std::size_t{1} << n_sites); ++tuple) {
      // Physical index per input site.
      std::vector<int> idx(n_sites);
      double weight = 1.0;
      for (std::size_t s = 0; s < n_sites; ++s) {
        idx[s] = (tuple >> s) & 1;
        weight *= idx[s] ? v[s] : 1.0 - v[s];
      }
      for (std::size_t o = 0; o < out; ++o) {
        // Row vector through the chain for this fixed (i_1..i_N, o).
        std::vector<double> row(m);
        std::size_t site = 0;
        for (std::size_t k = 0; k < n_cores; ++k) {
          const auto& c = cores[k];
          if (k == 0) {
            const int i = idx[site++];
            for (std::size_t b = 0; b < m; ++b) row[b] = c[i * m + b];
          } else if (k + 1 == n_cores) {
            const int i = idx[site++];
            double t = 0.0;
            for (std::size_t a = 0; a < m; ++a) t += row[a] * c[a * 2 + i];
            f[o] += weight * t;
          } else {
            std::vector<double> nxt(m, 0.0);
            const bool is_out = k == mid();
            const int i = is_out ? 0 : idx[site++];
            for (std::size_t a = 0; a < m; ++a)
              for (std::size_t b = 0; b < m; ++b)
                nxt[b] += row[a] * (is_out ? c[(a * out + o) * m + b] : c[(a * 2 + i) * m + b]);
            row = nxt;
          }
        }
      }
    }
    return f;
  }
};

/// Shortest action count from the start pose to the goal of an empty
/// n x n room, by breadth-first search over (col, row, dir).
inline int bfs_shortest_path(int n) {
  using Pose = std::tuple<int, int, int>;
  const int dc[4] = {1, 0, -1, 0};
  const int dr[4] = {0, 1, 0, -1};
  std::map<Pose, int> dist;
  std::deque<Pose> q;
  dist[{1, 1, 0}] = 0;
  q.push_back({1, 1, 0});
  while (!q.empty()) {
    auto [c, r, d] = q.front();
    q.pop_front();
    const int here = dist[{c, r, d}];
    if (c == n - 2 && r == n - 2) return here;
    std::array<Pose, 3> next = {Pose{c, r, (d + 3) % 4}, Pose{c, r, (d + 1) % 4}, Pose{c, r, d}};
    const int nc = c + dc[d], nr = r + dr[d];
    if (nc >= 1 && nr >= 1 && nc <= n - 2 && nr <= n - 2) std::get<2>(next) = Pose{nc, nr, d};
    for (const auto& p : next)
      if (!dist.count(p)) {
        dist[p] = here + 1;
        q.push_back(p);
      }
  }
  return -1;
}

/// f(theta) = -|theta|^2, deterministic.
struct SphereTask {
  static constexpr bool kDeterministic = true;
  std::size_t dim;
  std::size_t genome_length() const { return dim; }
  double play_episode(std::span<const double> g, std::uint64_t) const {
    double s = 0.0;
    for (double x : g) s += x * x;
    return -s;
  }
};

}  // namespace qevo::testing
