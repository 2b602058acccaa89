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

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>

#include "qevo/agents.hpp"
#include "qevo/envs/cartpole.hpp"
#include "qevo/envs/minigrid.hpp"
#include "qevo/rng.hpp"

// Episodic fitness tasks binding an environment to an agent architecture.

namespace qevo::tasks {

struct StepRecord {
  int step = 0;
  int action = 0;
  double reward = 0.0;
  bool done = false;
};

using TraceSink = std::function<void(const StepRecord&)>;

class CartPoleTask {
 public:
  explicit CartPoleTask(envs::CartPoleParams params = {}) : params_(params) {}

  std::size_t genome_length() const noexcept { return agents::CartPoleAgent::kParamCount; }
  agents::Architecture architecture() const noexcept { return agents::Architecture::CartPoleVqc; }

  double play_episode(std::span<const double> genome, std::uint64_t seed, const TraceSink& trace = {}) const {
    const agents::CartPoleAgent agent(genome);
    envs::CartPole env(params_);
    Rng rng(seed);
    auto obs = env.reset(rng);
    double score = 0.0;
    for (int t = 1;; ++t) {
      const int action = agent.act(obs);
      auto tr = env.step(action);
      score += tr.reward;
      if (trace) trace({t, action, tr.reward, tr.done});
      if (tr.done) break;
      obs = std::move(tr.observation);
    }
    return score;
  }

 private:
  envs::CartPoleParams params_;
};

/// MiniGrid-Empty has a fixed layout and the policy is greedy, so an
/// episode's score does not depend on its seed.
class MiniGridTask {
 public:
  static constexpr bool kDeterministic = true;

  MiniGridTask(int grid_size, std::size_t bond_dim) : grid_size_(grid_size), bond_dim_(bond_dim) {
    envs::MiniGrid probe(grid_size);  // validates the size
    if (bond_dim < 1) throw ConfigError("bond dimension must be >= 1");
  }

  int grid_size() const noexcept { return grid_size_; }
  std::size_t bond_dim() const noexcept { return bond_dim_; }
  std::size_t genome_length() const noexcept { return agents::TnVqcAgent::param_count(bond_dim_); }
  agents::Architecture architecture() const noexcept { return agents::Architecture::TnVqc; }

  double play_episode(std::span<const double> genome, std::uint64_t /*seed*/, const TraceSink& trace = {}) const {
    const auto agent = agents::TnVqcAgent::from_values(genome, bond_dim_);
    envs::MiniGrid env(grid_size_);
    auto obs = env.reset();
    double score = 0.0;
    for (int t = 1;; ++t) {
      const int action = agent.act(obs);
      auto tr = env.step(action);
      score += tr.reward;
      if (trace) trace({t, action, tr.reward, tr.done});
      if (tr.done) break;
      obs = std::move(tr.observation);
    }
    return score;
  }

 private:
  int grid_size_;
  std::size_t bond_dim_;
};

}  // namespace qevo::tasks
