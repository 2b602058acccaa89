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
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "qevo/error.hpp"
#include "qevo/mps.hpp"
#include "qevo/qsim.hpp"

namespace qevo::agents {

enum class Architecture { CartPoleVqc, TnVqc };

inline std::string_view to_string(Architecture a) {
  return a == Architecture::CartPoleVqc ? "cartpole-vqc" : "tn-vqc";
}

inline Architecture architecture_from_string(std::string_view s) {
  if (s == "cartpole-vqc") return Architecture::CartPoleVqc;
  if (s == "tn-vqc") return Architecture::TnVqc;
  throw ConfigError("unknown architecture '" + std::string(s) + "'");
}

/// Flat parameter vector of one agent. `bond_dim` is meaningful only for
/// the TN-VQC layout.
struct Genome {
  Architecture architecture = Architecture::CartPoleVqc;
  std::size_t bond_dim = 0;
  std::vector<double> values;

  friend bool operator==(const Genome&, const Genome&) = default;
};

/// Index of the largest value; ties go to the lowest index.
inline std::size_t argmax(std::span<const double> v) {
  return static_cast<std::size_t>(std::max_element(v.begin(), v.end()) - v.begin());
}

/// Amplitude-encoded two-qubit agent: four blocks of
/// [CNOT(0->1), Rot(q0), Rot(q1)], Z-expectations plus a classical bias.
class CartPoleAgent {
 public:
  static constexpr std::size_t kBlocks = 4;
  static constexpr std::size_t kQubits = 2;
  static constexpr std::size_t kCircuitParams = kBlocks * kQubits * 3;
  static constexpr std::size_t kParamCount = kCircuitParams + kQubits;

  CartPoleAgent() = default;

  explicit CartPoleAgent(std::span<const double> genome) {
    detail::require(genome.size() == kParamCount,
                    "cart-pole genome must have " + std::to_string(kParamCount) + " entries, got " +
                        std::to_string(genome.size()));
    std::copy_n(genome.begin(), kCircuitParams, block_params_.begin());
    std::copy_n(genome.begin() + kCircuitParams, kQubits, bias_.begin());
  }

  static CartPoleAgent from_genome(const Genome& g) {
    detail::require(g.architecture == Architecture::CartPoleVqc, "genome is not a cart-pole VQC genome");
    return CartPoleAgent(g.values);
  }

  Genome to_genome() const {
    Genome g{Architecture::CartPoleVqc, 0, {}};
    g.values.assign(block_params_.begin(), block_params_.end());
    g.values.insert(g.values.end(), bias_.begin(), bias_.end());
    return g;
  }

  /// Angles of (block, qubit): alpha, beta, gamma.
  std::span<double, 3> rotation(std::size_t block, std::size_t qubit) {
    return std::span<double, 3>(block_params_.data() + (block * kQubits + qubit) * 3, 3);
  }
  std::array<double, kQubits>& bias() noexcept { return bias_; }

  /// Pre-bias Z expectations of both qubits.
  std::array<double, kQubits> expectations(std::span<const double> obs) const {
    detail::require(obs.size() == 4, "cart-pole observation must have 4 components");
    double norm2 = 0.0;
    for (double v : obs) {
      detail::require(std::isfinite(v), "cart-pole observation must be finite");
      norm2 += v * v;
    }
    std::array<double, 4> amps{0.5, 0.5, 0.5, 0.5};
    if (norm2 > 0.0) {
      const double inv = 1.0 / std::sqrt(norm2);
      for (std::size_t k = 0; k < 4; ++k) amps[k] = obs[k] * inv;
    }

    qsim::Statevector state(kQubits);
    state.assign_amplitudes(amps);
    for (std::size_t b = 0; b < kBlocks; ++b) {
      state.apply(qsim::gates::Cnot{0, 1});
      for (std::size_t q = 0; q < kQubits; ++q) {
        const double* p = block_params_.data() + (b * kQubits + q) * 3;
        state.apply(qsim::gates::Rot{q, p[0], p[1], p[2]});
      }
    }
    return {state.expectation_z(0), state.expectation_z(1)};
  }

  std::array<double, kQubits> logits(std::span<const double> obs) const {
    auto e = expectations(obs);
    for (std::size_t q = 0; q < kQubits; ++q) e[q] += bias_[q];
    return e;
  }

  /// 0 = push left, 1 = push right.
  int act(std::span<const double> obs) const { return static_cast<int>(argmax(logits(obs))); }

 private:
  std::array<double, kCircuitParams> block_params_{};
  std::array<double, kQubits> bias_{};
};

/// MPS feature extractor feeding an 8-qubit variationally-encoded circuit
/// with one entangling block; the first six Z expectations are the logits.
class TnVqcAgent {
 public:
  static constexpr std::size_t kQubits = 8;
  static constexpr std::size_t kVqcParams = kQubits * 3;
  static constexpr std::size_t kNumActions = 6;
  static constexpr std::size_t kObsDim = 147;

  static mps::MpsShape mps_shape(std::size_t bond_dim) { return {kObsDim, bond_dim, kQubits}; }

  static std::size_t param_count(std::size_t bond_dim) {
    return kVqcParams + mps_shape(bond_dim).param_count();
  }

  TnVqcAgent(mps::MpsFeatureExtractor extractor, std::span<const double> vqc_params) : mps_(std::move(extractor)) {
    detail::require(mps_.shape() == mps_shape(mps_.shape().bond_dim), "MPS shape does not match the TN-VQC layout");
    detail::require(vqc_params.size() == kVqcParams, "TN-VQC needs 24 circuit parameters");
    std::copy(vqc_params.begin(), vqc_params.end(), vqc_.begin());
  }

  /// Layout: [24 circuit angles][MPS entries, core-major].
  static TnVqcAgent from_values(std::span<const double> values, std::size_t bond_dim) {
    detail::require(values.size() == param_count(bond_dim),
                    "TN-VQC genome must have " + std::to_string(param_count(bond_dim)) + " entries, got " +
                        std::to_string(values.size()));
    return TnVqcAgent(mps::MpsFeatureExtractor::unflatten(values.subspan(kVqcParams), mps_shape(bond_dim)),
                      values.first(kVqcParams));
  }

  static TnVqcAgent from_genome(const Genome& g) {
    detail::require(g.architecture == Architecture::TnVqc, "genome is not a TN-VQC genome");
    return from_values(g.values, g.bond_dim);
  }

  Genome to_genome() const {
    Genome g{Architecture::TnVqc, mps_.shape().bond_dim, {}};
    g.values.assign(vqc_.begin(), vqc_.end());
    const auto flat = mps_.flatten();
    g.values.insert(g.values.end(), flat.begin(), flat.end());
    return g;
  }

  const mps::MpsFeatureExtractor& extractor() const noexcept { return mps_; }
  std::array<double, kVqcParams>& vqc_params() noexcept { return vqc_; }

  /// Circuit logits for an already-compressed 8-vector.
  std::array<double, kNumActions> circuit_logits(std::span<const double> features) const {
    detail::require(features.size() == kQubits, "TN-VQC circuit takes 8 features");
    qsim::Statevector state(kQubits);
    for (std::size_t q = 0; q < kQubits; ++q) {
      state.apply(qsim::gates::H{q});
      state.apply(qsim::gates::Ry{q, std::atan(features[q])});
      state.apply(qsim::gates::Rz{q, std::atan(features[q] * features[q])});
    }
    for (std::size_t q = 0; q < kQubits; ++q) state.apply(qsim::gates::Cnot{q, (q + 1) % kQubits});
    for (std::size_t q = 0; q < kQubits; ++q)
      state.apply(qsim::gates::Rot{q, vqc_[q * 3], vqc_[q * 3 + 1], vqc_[q * 3 + 2]});
    std::array<double, kNumActions> out{};
    for (std::size_t q = 0; q < kNumActions; ++q) out[q] = state.expectation_z(q);
    return out;
  }

  std::array<double, kNumActions> logits(std::span<const double> obs) const {
    detail::require(obs.size() == kObsDim, "TN-VQC observation must have 147 components");
    const auto features = mps_.contract(obs);
    return circuit_logits(features);
  }

  int act(std::span<const double> obs) const { return static_cast<int>(argmax(logits(obs))); }

 private:
  mps::MpsFeatureExtractor mps_;
  std::array<double, kVqcParams> vqc_{};
};

/// Genome length of an architecture.
inline std::size_t genome_length(Architecture a, std::size_t bond_dim) {
  return a == Architecture::CartPoleVqc ? CartPoleAgent::kParamCount : TnVqcAgent::param_count(bond_dim);
}

/// Offset added to freshly sampled genomes: zero for the circuit parts,
/// the identity MPS for the TN-VQC extractor segment.
inline std::vector<double> genome_base(Architecture a, std::size_t bond_dim) {
  if (a == Architecture::CartPoleVqc) return std::vector<double>(CartPoleAgent::kParamCount, 0.0);
  mps::MpsFeatureExtractor ident(TnVqcAgent::mps_shape(bond_dim));
  ident.set_identity();
  std::vector<double> base(TnVqcAgent::kVqcParams, 0.0);
  const auto flat = ident.flatten();
  base.insert(base.end(), flat.begin(), flat.end());
  return base;
}

}  // namespace qevo::agents
