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
#include <string>
#include <vector>

#include "qevo/envs/transition.hpp"
#include "qevo/error.hpp"

namespace qevo::envs {

/// Object, color and state ids of the MiniGrid encoding tables.
namespace minigrid_ids {
inline constexpr int kUnseen = 0;
inline constexpr int kEmpty = 1;
inline constexpr int kWall = 2;
inline constexpr int kGoal = 8;

inline constexpr int kRed = 0;
inline constexpr int kGreen = 1;
inline constexpr int kGrey = 5;

inline constexpr double kObjectScale = 10.0;
inline constexpr double kColorScale = 5.0;
inline constexpr double kStateScale = 2.0;
}  // namespace minigrid_ids

enum class Direction : int { Right = 0, Down = 1, Left = 2, Up = 3 };

struct GridPos {
  int col = 0;
  int row = 0;
  friend bool operator==(const GridPos&, const GridPos&) = default;
};

struct MiniGridState {
  int grid_size = 5;
  GridPos agent_pos{1, 1};
  Direction agent_dir = Direction::Right;
  GridPos goal_pos{3, 3};
  int steps = 0;

  int max_steps() const noexcept { return 4 * grid_size * grid_size; }
};

enum class MiniGridAction : int { TurnLeft = 0, TurnRight = 1, Forward = 2, Pickup = 3, Drop = 4, Toggle = 5 };

/// MiniGrid-Empty-NxN: walled n x n room, agent starts at (1,1) facing right,
/// goal in the far corner (n-2, n-2).
class MiniGrid {
 public:
  static constexpr int kViewSize = 7;
  static constexpr int kObsDim = kViewSize * kViewSize * 3;
  static constexpr int kNumActions = 6;

  explicit MiniGrid(int grid_size) : n_(grid_size) {
    if (n_ != 5 && n_ != 6 && n_ != 8)
      throw ConfigError("unsupported MiniGrid size " + std::to_string(n_) + " (expected 5, 6 or 8)");
    reset();
  }

  int grid_size() const noexcept { return n_; }
  const MiniGridState& state() const noexcept { return s_; }
  bool done() const noexcept { return done_; }

  std::vector<double> reset() {
    s_ = MiniGridState{n_, {1, 1}, Direction::Right, {n_ - 2, n_ - 2}, 0};
    done_ = false;
    return encode_observation(s_);
  }

  EnvTransition step(int action) {
    detail::require(!done_, "MiniGrid episode already finished");
    detail::require(action >= 0 && action < kNumActions, "MiniGrid action must be in [0, 5]");
    ++s_.steps;
    double reward = 0.0;
    switch (static_cast<MiniGridAction>(action)) {
      case MiniGridAction::TurnLeft:
        s_.agent_dir = static_cast<Direction>((static_cast<int>(s_.agent_dir) + 3) % 4);
        break;
      case MiniGridAction::TurnRight:
        s_.agent_dir = static_cast<Direction>((static_cast<int>(s_.agent_dir) + 1) % 4);
        break;
      case MiniGridAction::Forward: {
        const GridPos ahead = front_of(s_.agent_pos, s_.agent_dir);
        if (!is_wall(s_.grid_size, ahead)) s_.agent_pos = ahead;
        if (s_.agent_pos == s_.goal_pos) {
          reward = 1.0 - 0.9 * static_cast<double>(s_.steps) / static_cast<double>(s_.max_steps());
          done_ = true;
        }
        break;
      }
      case MiniGridAction::Pickup:
      case MiniGridAction::Drop:
      case MiniGridAction::Toggle:
        break;
    }
    if (s_.steps >= s_.max_steps()) done_ = true;
    return {encode_observation(s_), reward, done_};
  }

  static GridPos direction_vector(Direction d) {
    switch (d) {
      case Direction::Right: return {1, 0};
      case Direction::Down: return {0, 1};
      case Direction::Left: return {-1, 0};
      case Direction::Up: return {0, -1};
    }
    return {0, 0};
  }

  static GridPos front_of(GridPos p, Direction d) {
    const auto v = direction_vector(d);
    return {p.col + v.col, p.row + v.row};
  }

  static bool in_bounds(int n, GridPos p) { return p.col >= 0 && p.row >= 0 && p.col < n && p.row < n; }

  static bool is_wall(int n, GridPos p) {
    return in_bounds(n, p) && (p.col == 0 || p.row == 0 || p.col == n - 1 || p.row == n - 1);
  }

  /// Raw (object, color, state) ids of a world cell; out-of-grid is unseen.
  static std::array<int, 3> encode_cell(const MiniGridState& s, GridPos p) {
    using namespace minigrid_ids;
    if (!in_bounds(s.grid_size, p)) return {kUnseen, 0, 0};
    if (is_wall(s.grid_size, p)) return {kWall, kGrey, 0};
    if (p == s.goal_pos) return {kGoal, kGreen, 0};
    return {kEmpty, kRed, 0};
  }

  /// Egocentric 7x7x3 view, flattened as [view_col][view_row][channel] and
  /// scaled into [0,1]. The agent sits at view (3, 6) looking towards row 0;
  /// view columns increase to the agent's right. No occlusion.
  static std::vector<double> encode_observation(const MiniGridState& s) {
    using namespace minigrid_ids;
    const GridPos f = direction_vector(s.agent_dir);
    const GridPos r{-f.row, f.col};
    std::vector<double> obs(kObsDim);
    for (int vc = 0; vc < kViewSize; ++vc) {
      for (int vr = 0; vr < kViewSize; ++vr) {
        const int ahead = kViewSize - 1 - vr;
        const int right = vc - kViewSize / 2;
        const GridPos w{s.agent_pos.col + f.col * ahead + r.col * right,
                        s.agent_pos.row + f.row * ahead + r.row * right};
        const auto cell = encode_cell(s, w);
        const std::size_t base = static_cast<std::size_t>((vc * kViewSize + vr) * 3);
        obs[base] = cell[0] / kObjectScale;
        obs[base + 1] = cell[1] / kColorScale;
        obs[base + 2] = cell[2] / kStateScale;
      }
    }
    return obs;
  }

  /// Index of a view cell's first channel in the flattened observation.
  static constexpr std::size_t view_index(int view_col, int view_row) {
    return static_cast<std::size_t>((view_col * kViewSize + view_row) * 3);
  }

 private:
  int n_;
  MiniGridState s_;
  bool done_ = false;
};

}  // namespace qevo::envs
