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
#include <atomic>
#include <cmath>
#include <concepts>
#include <cstddef>
#include <cstdint>
#include <deque>
#include <exception>
#include <functional>
#include <mutex>
#include <numeric>
#include <random>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include "qevo/error.hpp"
#include "qevo/rng.hpp"

namespace qevo::evo {

using Genome = std::vector<double>;
using Population = std::vector<Genome>;

struct EvoConfig {
  std::size_t population = 500;       // N
  std::size_t truncation = 5;         // T
  double mutation_power = 0.02;       // sigma
  std::size_t repeats_all = 3;        // R1
  std::size_t repeats_parents = 5;    // R2
  std::size_t generations = 1700;     // M
  std::uint64_t master_seed = 0;
  double init_scale = 0.01;

  void validate() const {
    if (truncation < 1 || truncation >= population)
      throw ConfigError("truncation must satisfy 1 <= T < N");
    if (!(mutation_power > 0.0)) throw ConfigError("mutation power must be positive");
    if (repeats_all < 1 || repeats_parents < 1) throw ConfigError("repeat counts must be >= 1");
    if (!(init_scale >= 0.0)) throw ConfigError("init_scale must be non-negative");
  }

  friend bool operator==(const EvoConfig&, const EvoConfig&) = default;
};

inline constexpr std::size_t kRollingWindow = 100;
inline constexpr std::size_t kTopK = 5;

struct GenerationStats {
  std::size_t generation = 0;
  double top5_avg = 0.0;
  double pop_mean = 0.0;
  double pop_std = 0.0;
  double elite_score = 0.0;
  double rolling_mean = 0.0;  // of top5_avg over the trailing window
  double rolling_std = 0.0;

  friend bool operator==(const GenerationStats&, const GenerationStats&) = default;
};

/// Anything that can score one episode of a flat genome.
///
/// A task may declare `static constexpr bool kDeterministic = true` when
/// episode scores do not depend on the seed; repeated evaluations are then
/// computed once.
template <class T>
concept FitnessTask = requires(const T& t, std::span<const double> g, std::uint64_t seed) {
  { t.genome_length() } -> std::convertible_to<std::size_t>;
  { t.play_episode(g, seed) } -> std::convertible_to<double>;
};

template <class T>
constexpr bool is_deterministic_task() {
  if constexpr (requires { T::kDeterministic; }) return T::kDeterministic;
  return false;
}

/// Runs fn(i) for i in [0, n) on `workers` threads. Results must be written
/// by index so the outcome is independent of scheduling.
inline void parallel_for(std::size_t n, std::size_t workers, const std::function<void(std::size_t)>& fn) {
  workers = std::max<std::size_t>(1, std::min(workers, n));
  if (workers == 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mu;
  {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < n; i = next++) {
          try {
            fn(i);
          } catch (...) {
            std::lock_guard lock(error_mu);
            if (!error) error = std::current_exception();
            next = n;
          }
        }
      });
    }
  }
  if (error) std::rethrow_exception(error);
}

/// Mean score over `repeats` episodes; episode r uses derive_seed(seed, r).
template <FitnessTask Task>
double evaluate_fitness(const Task& task, std::span<const double> genome, std::size_t repeats, std::uint64_t seed) {
  detail::require(genome.size() == task.genome_length(), "genome length does not match the task architecture");
  detail::require(repeats >= 1, "at least one episode is required");
  if constexpr (is_deterministic_task<Task>()) {
    return static_cast<double>(task.play_episode(genome, derive_seed({seed, 0})));
  } else {
    double sum = 0.0;
    for (std::size_t r = 0; r < repeats; ++r) sum += static_cast<double>(task.play_episode(genome, derive_seed({seed, r})));
    return sum / static_cast<double>(repeats);
  }
}

/// N genomes with entries base + N(0,1) * init_scale. An empty base means zero.
inline Population init_population(const EvoConfig& cfg, std::size_t genome_length, std::span<const double> base = {}) {
  detail::require(genome_length > 0, "genome length must be positive");
  detail::require(base.empty() || base.size() == genome_length, "base genome has wrong length");
  Population pop(cfg.population, Genome(genome_length, 0.0));
  for (std::size_t i = 0; i < cfg.population; ++i) {
    Rng rng = make_rng({cfg.master_seed, static_cast<std::uint64_t>(Stream::Init), i});
    std::normal_distribution<double> normal(0.0, 1.0);
    for (std::size_t k = 0; k < genome_length; ++k) {
      pop[i][k] = normal(rng) * cfg.init_scale;
      if (!base.empty()) pop[i][k] += base[k];
    }
  }
  return pop;
}

/// parent + sigma * eps with eps ~ N(0, I).
inline Genome mutate(std::span<const double> parent, double sigma, Rng& rng) {
  detail::require(sigma >= 0.0, "mutation power must be non-negative");
  std::normal_distribution<double> normal(0.0, 1.0);
  Genome child(parent.begin(), parent.end());
  for (double& x : child) x += sigma * normal(rng);
  return child;
}

/// Indices sorted by descending fitness; ties keep population order.
inline std::vector<std::size_t> rank_descending(std::span<const double> fitness) {
  std::vector<std::size_t> order(fitness.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return fitness[a] > fitness[b]; });
  return order;
}

/// The next generation: N-1 mutants of uniformly chosen parents, then the
/// elite copied verbatim into the last slot.
inline Population breed(std::span<const Genome> parents, const Genome& elite, const EvoConfig& cfg,
                        std::uint64_t generation) {
  detail::require(!parents.empty(), "no parents to breed from");
  Population next;
  next.reserve(cfg.population);
  for (std::size_t c = 0; c + 1 < cfg.population; ++c) {
    Rng rng = make_rng({cfg.master_seed, static_cast<std::uint64_t>(Stream::Mutate), generation, c});
    std::uniform_int_distribution<std::size_t> pick(0, parents.size() - 1);
    next.push_back(mutate(parents[pick(rng)], cfg.mutation_power, rng));
  }
  next.push_back(elite);
  return next;
}

struct GenerationOutcome {
  Population next;
  GenerationStats stats;                 // rolling fields left at zero
  std::vector<std::size_t> parents;      // population indices, best first
  std::vector<double> parent_scores;     // E_j^avg, aligned with `parents`
  std::size_t elite_rank = 0;            // index into `parents`
};

/// Truncation selection and reproduction for one generation.
///
/// `parent_score(population_index)` returns the R2-episode re-evaluation of
/// a parent; the best re-evaluated parent becomes the elite (ties go to the
/// higher-ranked parent).
template <class ParentScorer>
GenerationOutcome step_generation(const Population& population, std::span<const double> fitness,
                                  const EvoConfig& cfg, std::uint64_t generation, ParentScorer&& parent_score) {
  detail::require(population.size() == cfg.population, "population size does not match config");
  detail::require(fitness.size() == population.size(), "one fitness value per genome is required");

  GenerationOutcome out;
  const auto order = rank_descending(fitness);
  out.parents.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(cfg.truncation));

  out.parent_scores.resize(out.parents.size());
  for (std::size_t j = 0; j < out.parents.size(); ++j) out.parent_scores[j] = parent_score(out.parents[j]);
  out.elite_rank = static_cast<std::size_t>(
      std::max_element(out.parent_scores.begin(), out.parent_scores.end()) - out.parent_scores.begin());

  std::vector<Genome> parents;
  parents.reserve(out.parents.size());
  for (auto idx : out.parents) parents.push_back(population[idx]);
  out.next = breed(parents, parents[out.elite_rank], cfg, generation);

  auto& st = out.stats;
  st.generation = generation;
  const std::size_t k = std::min(kTopK, order.size());
  for (std::size_t i = 0; i < k; ++i) st.top5_avg += fitness[order[i]];
  st.top5_avg /= static_cast<double>(k);
  const double n = static_cast<double>(fitness.size());
  st.pop_mean = std::accumulate(fitness.begin(), fitness.end(), 0.0) / n;
  double var = 0.0;
  for (double f : fitness) var += (f - st.pop_mean) * (f - st.pop_mean);
  st.pop_std = std::sqrt(var / n);
  st.elite_score = out.parent_scores[out.elite_rank];
  return out;
}

/// Mean and population std of the trailing window of top5_avg values.
inline std::pair<double, double> rolling_stats(std::span<const GenerationStats> history) {
  if (history.empty()) return {0.0, 0.0};
  const std::size_t w = std::min(kRollingWindow, history.size());
  const auto tail = history.last(w);
  double mean = 0.0;
  for (const auto& s : tail) mean += s.top5_avg;
  mean /= static_cast<double>(w);
  double var = 0.0;
  for (const auto& s : tail) var += (s.top5_avg - mean) * (s.top5_avg - mean);
  return {mean, std::sqrt(var / static_cast<double>(w))};
}

/// What is needed to continue a run exactly: the parents and elite of the
/// last completed generation plus the emitted statistics. The population of
/// the next generation is regenerated from them, since every random draw
/// is a function of (master_seed, generation, index).
struct EvolutionState {
  std::size_t generations_done = 0;
  std::vector<Genome> parents;        // best first
  std::vector<double> parent_fitness; // S_i^avg of each parent
  std::size_t elite_rank = 0;
  double elite_score = 0.0;
  std::vector<GenerationStats> stats;
};

/// Drives the full loop: evaluate all genomes over R1 episodes, select,
/// re-evaluate parents over R2 episodes, breed.
template <FitnessTask Task>
class Evolution {
 public:
  Evolution(const Task& task, EvoConfig cfg, std::size_t workers = 1, std::span<const double> base = {})
      : task_(task), cfg_(cfg), workers_(std::max<std::size_t>(1, workers)) {
    cfg_.validate();
    population_ = init_population(cfg_, task_.genome_length(), base);
  }

  Evolution(const Task& task, EvoConfig cfg, std::size_t workers, EvolutionState resume)
      : task_(task), cfg_(cfg), workers_(std::max<std::size_t>(1, workers)), state_(std::move(resume)) {
    cfg_.validate();
    detail::require(state_.generations_done >= 1, "resume state must cover at least one generation");
    detail::require(state_.parents.size() == cfg_.truncation, "checkpoint parent count does not match T");
    detail::require(state_.elite_rank < state_.parents.size(), "checkpoint elite index out of range");
    detail::require(state_.stats.size() == state_.generations_done, "checkpoint stats do not match its generation");
    for (const auto& p : state_.parents)
      detail::require(p.size() == task_.genome_length(), "checkpoint genome length does not match the task");
    population_ = breed(state_.parents, state_.parents[state_.elite_rank], cfg_, state_.generations_done - 1);
  }

  const EvoConfig& config() const noexcept { return cfg_; }
  const Population& population() const noexcept { return population_; }
  const EvolutionState& state() const noexcept { return state_; }
  const std::vector<GenerationStats>& stats() const noexcept { return state_.stats; }
  std::size_t generations_done() const noexcept { return state_.generations_done; }
  const Genome& elite() const { return state_.parents.at(state_.elite_rank); }

  /// Runs one generation and returns its statistics.
  const GenerationStats& step() {
    const std::uint64_t g = state_.generations_done;
    std::vector<double> fitness(population_.size());
    parallel_for(population_.size(), workers_, [&](std::size_t i) {
      const auto seed = derive_seed({cfg_.master_seed, static_cast<std::uint64_t>(Stream::Evaluate), g, i});
      fitness[i] = evaluate_fitness(task_, population_[i], cfg_.repeats_all, seed);
    });

    // Parents share the generation's re-evaluation episodes.
    const auto elite_seed = derive_seed({cfg_.master_seed, static_cast<std::uint64_t>(Stream::Elite), g});
    const auto order = rank_descending(fitness);
    std::vector<double> reeval(population_.size(), 0.0);
    parallel_for(cfg_.truncation, workers_, [&](std::size_t j) {
      reeval[order[j]] = evaluate_fitness(task_, population_[order[j]], cfg_.repeats_parents, elite_seed);
    });

    auto out = step_generation(population_, fitness, cfg_, g, [&](std::size_t idx) { return reeval[idx]; });

    state_.parents.clear();
    state_.parent_fitness.clear();
    for (auto idx : out.parents) {
      state_.parents.push_back(std::move(population_[idx]));
      state_.parent_fitness.push_back(fitness[idx]);
    }
    state_.elite_rank = out.elite_rank;
    state_.elite_score = out.stats.elite_score;
    population_ = std::move(out.next);

    state_.stats.push_back(out.stats);
    auto [rm, rs] = rolling_stats(state_.stats);
    state_.stats.back().rolling_mean = rm;
    state_.stats.back().rolling_std = rs;
    ++state_.generations_done;
    return state_.stats.back();
  }

  /// Runs until `cfg.generations` generations are complete.
  std::vector<GenerationStats> run() {
    std::vector<GenerationStats> emitted;
    while (state_.generations_done < cfg_.generations) emitted.push_back(step());
    return emitted;
  }

 private:
  const Task& task_;
  EvoConfig cfg_;
  std::size_t workers_;
  EvolutionState state_;
  Population population_;
};

}  // namespace qevo::evo
