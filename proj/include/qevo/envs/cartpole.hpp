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

#include <array>
#include <cmath>
#include <numbers>
#include <random>

#include "qevo/envs/transition.hpp"
#include "qevo/error.hpp"
#include "qevo/rng.hpp"

namespace qevo::envs {

struct CartPoleState {
  double x = 0.0;
  double x_dot = 0.0;
  double theta = 0.0;
  double theta_dot = 0.0;
  int steps = 0;
};

struct CartPoleParams {
  double gravity = 9.8;
  double mass_cart = 1.0;
  double mass_pole = 0.1;
  double half_length = 0.5;
  double force_mag = 10.0;
  double tau = 0.02;
  double theta_threshold_deg = 15.0;
  double x_threshold = 2.4;
  int max_steps = 500;
};

/// Cart-Pole with semi-implicit Euler integration. Action 0 pushes left,
/// 1 pushes right. Every step (including the terminating one) pays +1.
class CartPole {
 public:
  static constexpr int kObsDim = 4;
  static constexpr int kNumActions = 2;

  explicit CartPole(CartPoleParams params = {}) : p_(params) {}

  const CartPoleParams& params() const noexcept { return p_; }
  const CartPoleState& state() const noexcept { return s_; }
  bool done() const noexcept { return done_; }

  std::vector<double> reset(Rng& rng) {
    std::uniform_real_distribution<double> u(-0.05, 0.05);
    s_.x = u(rng);
    s_.x_dot = u(rng);
    s_.theta = u(rng);
    s_.theta_dot = u(rng);
    s_.steps = 0;
    done_ = false;
    return observation();
  }

  /// Places the system in an arbitrary state (tests, replays).
  void set_state(const CartPoleState& s) {
    s_ = s;
    done_ = false;
  }

  std::vector<double> observation() const { return {s_.x, s_.x_dot, s_.theta, s_.theta_dot}; }

  EnvTransition step(int action) {
    detail::require(!done_, "cart-pole episode already finished");
    detail::require(action == 0 || action == 1, "cart-pole action must be 0 or 1");

    const double total_mass = p_.mass_cart + p_.mass_pole;
    const double pole_ml = p_.mass_pole * p_.half_length;
    const double force = action == 1 ? p_.force_mag : -p_.force_mag;
    const double cos_t = std::cos(s_.theta);
    const double sin_t = std::sin(s_.theta);
    const double temp = (force + pole_ml * s_.theta_dot * s_.theta_dot * sin_t) / total_mass;
    const double theta_acc = (p_.gravity * sin_t - cos_t * temp) /
                             (p_.half_length * (4.0 / 3.0 - p_.mass_pole * cos_t * cos_t / total_mass));
    const double x_acc = temp - pole_ml * theta_acc * cos_t / total_mass;

    s_.x_dot += p_.tau * x_acc;
    s_.x += p_.tau * s_.x_dot;
    s_.theta_dot += p_.tau * theta_acc;
    s_.theta += p_.tau * s_.theta_dot;
    ++s_.steps;

    const double theta_limit = p_.theta_threshold_deg * std::numbers::pi / 180.0;
    done_ = std::abs(s_.x) > p_.x_threshold || std::abs(s_.theta) > theta_limit || s_.steps >= p_.max_steps;
    return {observation(), 1.0, done_};
  }

 private:
  CartPoleParams p_;
  CartPoleState s_;
  bool done_ = true;
};

}  // namespace qevo::envs
