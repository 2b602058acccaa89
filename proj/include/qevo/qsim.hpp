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

#include <cmath>
#include <complex>
#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "qevo/error.hpp"

// Dense statevector simulator. Qubit 0 is the most significant bit of the
// amplitude index, so |q0 q1 ... q(n-1)> maps to index sum q_k 2^(n-1-k).

namespace qevo::qsim {

using Complex = std::complex<double>;

inline constexpr std::size_t kMaxQubits = 20;

namespace gates {

struct H {
  std::size_t qubit;
};
struct Ry {
  std::size_t qubit;
  double theta;
};
struct Rz {
  std::size_t qubit;
  double theta;
};
/// General rotation Rz(gamma) * Ry(beta) * Rz(alpha): alpha acts first.
struct Rot {
  std::size_t qubit;
  double alpha;
  double beta;
  double gamma;
};
struct Cnot {
  std::size_t control;
  std::size_t target;
};

}  // namespace gates

using Gate = std::variant<gates::H, gates::Ry, gates::Rz, gates::Rot, gates::Cnot>;

/// Ry(angle) on `target`, restricted to the basis states in which every
/// control qubit holds its required bit.
struct ControlledRotationSpec {
  struct Control {
    std::size_t qubit;
    int bit;
  };
  std::vector<Control> controls;
  std::size_t target = 0;
  double angle = 0.0;
};

class Statevector {
 public:
  explicit Statevector(std::size_t n_qubits) : n_qubits_(n_qubits) {
    if (n_qubits == 0 || n_qubits > kMaxQubits) {
      throw ConfigError("qubit count must be in [1, " + std::to_string(kMaxQubits) + "], got " +
                        std::to_string(n_qubits));
    }
    amps_.assign(std::size_t{1} << n_qubits, Complex{0.0, 0.0});
    amps_[0] = 1.0;
  }

  std::size_t n_qubits() const noexcept { return n_qubits_; }
  std::size_t dim() const noexcept { return amps_.size(); }
  std::span<const Complex> amps() const noexcept { return amps_; }
  const Complex& operator[](std::size_t k) const { return amps_[k]; }

  double norm_squared() const noexcept {
    double s = 0.0;
    for (const auto& a : amps_) s += std::norm(a);
    return s;
  }

  /// Overwrites the amplitudes with a real, L2-normalized vector. Signs are kept.
  void assign_amplitudes(std::span<const double> values) {
    detail::require(values.size() == amps_.size(), "amplitude vector length must be 2^n_qubits");
    double s = 0.0;
    for (double v : values) s += v * v;
    detail::require(std::abs(s - 1.0) <= 1e-9, "amplitude vector must be L2-normalized");
    for (std::size_t k = 0; k < values.size(); ++k) amps_[k] = values[k];
  }

  void apply(const Gate& gate) {
    std::visit([this](const auto& g) { apply_one(g); }, gate);
  }

  void apply_controlled_ry(const ControlledRotationSpec& spec) {
    check_qubit(spec.target);
    std::size_t mask = 0;
    std::size_t want = 0;
    for (const auto& c : spec.controls) {
      check_qubit(c.qubit);
      detail::require(c.qubit != spec.target, "control qubit equals target");
      detail::require(c.bit == 0 || c.bit == 1, "control bit must be 0 or 1");
      const std::size_t b = bit(c.qubit);
      detail::require((mask & b) == 0, "duplicate control qubit");
      mask |= b;
      if (c.bit == 1) want |= b;
    }
    const double c = std::cos(spec.angle / 2);
    const double s = std::sin(spec.angle / 2);
    const std::size_t tb = bit(spec.target);
    for (std::size_t k = 0; k < amps_.size(); ++k) {
      if ((k & tb) != 0 || (k & mask) != want) continue;
      const Complex a0 = amps_[k];
      const Complex a1 = amps_[k | tb];
      amps_[k] = c * a0 - s * a1;
      amps_[k | tb] = s * a0 + c * a1;
    }
  }

  /// <Z> on one qubit.
  double expectation_z(std::size_t qubit) const {
    check_qubit(qubit);
    const std::size_t b = bit(qubit);
    double e = 0.0;
    for (std::size_t k = 0; k < amps_.size(); ++k) {
      const double p = std::norm(amps_[k]);
      e += (k & b) ? -p : p;
    }
    return e;
  }

 private:
  std::size_t bit(std::size_t qubit) const noexcept { return std::size_t{1} << (n_qubits_ - 1 - qubit); }

  void check_qubit(std::size_t q) const {
    detail::require(q < n_qubits_, "qubit index " + std::to_string(q) + " out of range");
  }

  // Applies the 2x2 matrix [[m00, m01], [m10, m11]] to one qubit.
  void apply_1q(std::size_t qubit, Complex m00, Complex m01, Complex m10, Complex m11) {
    check_qubit(qubit);
    const std::size_t b = bit(qubit);
    for (std::size_t k = 0; k < amps_.size(); ++k) {
      if (k & b) continue;
      const Complex a0 = amps_[k];
      const Complex a1 = amps_[k | b];
      amps_[k] = m00 * a0 + m01 * a1;
      amps_[k | b] = m10 * a0 + m11 * a1;
    }
  }

  void apply_one(const gates::H& g) {
    const double r = 1.0 / std::sqrt(2.0);
    apply_1q(g.qubit, r, r, r, -r);
  }

  void apply_one(const gates::Ry& g) {
    const double c = std::cos(g.theta / 2);
    const double s = std::sin(g.theta / 2);
    apply_1q(g.qubit, c, -s, s, c);
  }

  void apply_one(const gates::Rz& g) {
    const Complex lo = std::polar(1.0, -g.theta / 2);
    const Complex hi = std::polar(1.0, g.theta / 2);
    apply_1q(g.qubit, lo, 0.0, 0.0, hi);
  }

  void apply_one(const gates::Rot& g) {
    // Rz(gamma) Ry(beta) Rz(alpha), multiplied out.
    const double c = std::cos(g.beta / 2);
    const double s = std::sin(g.beta / 2);
    const double sum = (g.alpha + g.gamma) / 2;
    const double diff = (g.alpha - g.gamma) / 2;
    apply_1q(g.qubit, std::polar(c, -sum), -std::polar(s, diff), std::polar(s, -diff),
             std::polar(c, sum));
  }

  void apply_one(const gates::Cnot& g) {
    check_qubit(g.control);
    check_qubit(g.target);
    detail::require(g.control != g.target, "CNOT control equals target");
    const std::size_t cb = bit(g.control);
    const std::size_t tb = bit(g.target);
    for (std::size_t k = 0; k < amps_.size(); ++k) {
      if ((k & cb) && !(k & tb)) std::swap(amps_[k], amps_[k | tb]);
    }
  }

  std::size_t n_qubits_;
  std::vector<Complex> amps_;
};

inline Statevector new_zero_state(std::size_t n_qubits) { return Statevector(n_qubits); }

inline Statevector apply_gate(Statevector state, const Gate& gate) {
  state.apply(gate);
  return state;
}

inline Statevector apply_controlled_ry(Statevector state, const ControlledRotationSpec& spec) {
  state.apply_controlled_ry(spec);
  return state;
}

inline double expectation_z(const Statevector& state, std::size_t qubit) {
  return state.expectation_z(qubit);
}

namespace detail {

inline std::size_t log2_exact(std::size_t len) {
  qevo::detail::require(len >= 2 && (len & (len - 1)) == 0, "length must be a power of two >= 2");
  std::size_t n = 0;
  while ((std::size_t{1} << n) < len) ++n;
  return n;
}

inline void require_normalized(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  qevo::detail::require(std::abs(s - 1.0) <= 1e-9, "input must be L2-normalized");
}

}  // namespace detail

/// Rotation angle beta_j^s of the state-preparation cascade.
///
/// `s` is the cascade level (1 acts on the last qubit, n on the first) and
/// `j` the 1-based rotation index within that level. Amplitude subscripts in
/// the closed form are 1-based. A vanishing denominator yields 0.
inline double beta_angle(std::span<const double> alphas, std::size_t s, std::size_t j) {
  const std::size_t n = detail::log2_exact(alphas.size());
  qevo::detail::require(s >= 1 && s <= n, "cascade level out of range");
  qevo::detail::require(j >= 1 && j <= (std::size_t{1} << (n - s)), "rotation index out of range");
  detail::require_normalized(alphas);

  const std::size_t half = std::size_t{1} << (s - 1);
  const std::size_t full = std::size_t{1} << s;
  auto at = [&](std::size_t one_based) { return alphas[one_based - 1]; };

  double num = 0.0;
  for (std::size_t l = 1; l <= half; ++l) num += at((2 * j - 1) * half + l) * at((2 * j - 1) * half + l);
  double den = 0.0;
  for (std::size_t l = 1; l <= full; ++l) den += at((j - 1) * full + l) * at((j - 1) * full + l);
  if (den == 0.0) return 0.0;
  const double ratio = std::min(1.0, std::sqrt(num) / std::sqrt(den));
  return 2.0 * std::asin(ratio);
}

/// The disentangling cascade that maps the state with amplitudes `alphas`
/// to |0...0>. Levels run s = 1..n; level s rotates qubit n-s under the
/// control of qubits 0..n-s-1, whose bit pattern is j-1.
inline std::vector<ControlledRotationSpec> disentangling_cascade(std::span<const double> alphas) {
  const std::size_t n = detail::log2_exact(alphas.size());
  std::vector<ControlledRotationSpec> out;
  for (std::size_t s = 1; s <= n; ++s) {
    const std::size_t n_controls = n - s;
    const std::size_t count = std::size_t{1} << n_controls;
    for (std::size_t j = 1; j <= count; ++j) {
      ControlledRotationSpec spec;
      spec.target = n_controls;
      for (std::size_t c = 0; c < n_controls; ++c) {
        const int b = static_cast<int>(((j - 1) >> (n_controls - 1 - c)) & 1U);
        spec.controls.push_back({c, b});
      }
      // Under this Ry convention, Ry(-beta) sends (cos b/2, sin b/2) to (1, 0).
      spec.angle = -beta_angle(alphas, s, j);
      out.push_back(std::move(spec));
    }
  }
  return out;
}

/// Prepares a state whose amplitudes equal `values` by inverting every gate
/// of the disentangling cascade and applying them in reverse order to
/// |0...0>. Only magnitudes are encoded, so inputs must be non-negative;
/// use Statevector::assign_amplitudes for signed data.
inline Statevector amplitude_encode(std::span<const double> values) {
  const std::size_t n = detail::log2_exact(values.size());
  detail::require_normalized(values);
  for (double v : values) qevo::detail::require(v >= 0.0, "cascade encoding requires non-negative inputs");

  auto cascade = disentangling_cascade(values);
  Statevector state(n);
  for (auto it = cascade.rbegin(); it != cascade.rend(); ++it) {
    ControlledRotationSpec inv = *it;
    inv.angle = -inv.angle;
    state.apply_controlled_ry(inv);
  }
  return state;
}

}  // namespace qevo::qsim
