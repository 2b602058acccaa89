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

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "qevo/agents.hpp"
#include "qevo/evo.hpp"
#include "qevo/tasks.hpp"

// Run configuration, checkpoint/genome files and the stats CSV, plus the
// train/resume drivers shared by the command-line tool and the tests.

namespace qevo::run {

namespace fs = std::filesystem;
using nlohmann::json;

enum class EnvKind { CartPole, MiniGrid5, MiniGrid6, MiniGrid8 };

inline std::string to_string(EnvKind e) {
  switch (e) {
    case EnvKind::CartPole: return "cartpole";
    case EnvKind::MiniGrid5: return "minigrid-5";
    case EnvKind::MiniGrid6: return "minigrid-6";
    case EnvKind::MiniGrid8: return "minigrid-8";
  }
  return "?";
}

inline EnvKind env_from_string(const std::string& s) {
  if (s == "cartpole") return EnvKind::CartPole;
  if (s == "minigrid-5") return EnvKind::MiniGrid5;
  if (s == "minigrid-6") return EnvKind::MiniGrid6;
  if (s == "minigrid-8") return EnvKind::MiniGrid8;
  throw ConfigError("unknown env '" + s + "' (expected cartpole, minigrid-5, minigrid-6 or minigrid-8)");
}

inline int minigrid_size(EnvKind e) {
  switch (e) {
    case EnvKind::MiniGrid5: return 5;
    case EnvKind::MiniGrid6: return 6;
    case EnvKind::MiniGrid8: return 8;
    default: return 0;
  }
}

inline agents::Architecture architecture_for(EnvKind e) {
  return e == EnvKind::CartPole ? agents::Architecture::CartPoleVqc : agents::Architecture::TnVqc;
}

struct RunConfig {
  EnvKind env = EnvKind::CartPole;
  evo::EvoConfig evo;
  std::size_t mps_bond_dim = 4;
  std::string out_dir = "runs/default";
  std::size_t workers = 1;
  std::size_t checkpoint_every = 50;
  double pole_angle_deg = 15.0;

  agents::Architecture architecture() const { return architecture_for(env); }
  std::size_t bond_dim() const { return env == EnvKind::CartPole ? 0 : mps_bond_dim; }

  void validate() const {
    evo.validate();
    if (mps_bond_dim < 1) throw ConfigError("mps_bond_dim must be >= 1");
    if (workers < 1) throw ConfigError("workers must be >= 1");
    if (checkpoint_every < 1) throw ConfigError("checkpoint_every must be >= 1");
    if (!(pole_angle_deg > 0.0)) throw ConfigError("pole_angle_deg must be positive");
    if (out_dir.empty()) throw ConfigError("out_dir must not be empty");
  }

  friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

namespace detail {

inline void reject_unknown(const json& j, const std::set<std::string>& allowed, const std::string& where) {
  if (!j.is_object()) throw ConfigError(where + " must be a JSON object");
  for (const auto& [key, _] : j.items())
    if (!allowed.count(key)) throw ConfigError("unknown key '" + key + "' in " + where);
}

template <class T>
void read_opt(const json& j, const char* key, T& out) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("bad value for '") + key + "': " + e.what());
  }
}

}  // namespace detail

inline json to_json(const evo::EvoConfig& c) {
  return {{"population", c.population},         {"truncation", c.truncation},
          {"mutation_power", c.mutation_power}, {"repeats_all", c.repeats_all},
          {"repeats_parents", c.repeats_parents}, {"generations", c.generations},
          {"master_seed", c.master_seed},       {"init_scale", c.init_scale}};
}

inline evo::EvoConfig evo_config_from_json(const json& j) {
  detail::reject_unknown(j,
                         {"population", "truncation", "mutation_power", "repeats_all", "repeats_parents",
                          "generations", "master_seed", "init_scale"},
                         "evo");
  evo::EvoConfig c;
  detail::read_opt(j, "population", c.population);
  detail::read_opt(j, "truncation", c.truncation);
  detail::read_opt(j, "mutation_power", c.mutation_power);
  detail::read_opt(j, "repeats_all", c.repeats_all);
  detail::read_opt(j, "repeats_parents", c.repeats_parents);
  detail::read_opt(j, "generations", c.generations);
  detail::read_opt(j, "master_seed", c.master_seed);
  detail::read_opt(j, "init_scale", c.init_scale);
  return c;
}

inline json to_json(const RunConfig& c) {
  return {{"env", to_string(c.env)},          {"evo", to_json(c.evo)},
          {"mps_bond_dim", c.mps_bond_dim},   {"out_dir", c.out_dir},
          {"workers", c.workers},             {"checkpoint_every", c.checkpoint_every},
          {"pole_angle_deg", c.pole_angle_deg}};
}

inline RunConfig run_config_from_json(const json& j) {
  detail::reject_unknown(j, {"env", "evo", "mps_bond_dim", "out_dir", "workers", "checkpoint_every", "pole_angle_deg"},
                         "config");
  if (!j.contains("env")) throw ConfigError("config is missing 'env'");
  RunConfig c;
  c.env = env_from_string(j.at("env").get<std::string>());
  if (j.contains("evo")) c.evo = evo_config_from_json(j.at("evo"));
  detail::read_opt(j, "mps_bond_dim", c.mps_bond_dim);
  detail::read_opt(j, "out_dir", c.out_dir);
  detail::read_opt(j, "workers", c.workers);
  detail::read_opt(j, "checkpoint_every", c.checkpoint_every);
  detail::read_opt(j, "pole_angle_deg", c.pole_angle_deg);
  c.validate();
  return c;
}

inline json read_json_file(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open '" + path.string() + "'");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("'" + path.string() + "' is not valid JSON: " + e.what());
  }
}

inline void write_text_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  out << text;
  if (!out.flush()) throw std::runtime_error("write failed for '" + path.string() + "'");
}

inline RunConfig load_run_config(const fs::path& path) { return run_config_from_json(read_json_file(path)); }

// --- genomes ---------------------------------------------------------------

inline json to_json(const agents::Genome& g) {
  return {{"architecture", agents::to_string(g.architecture)}, {"bond_dim", g.bond_dim}, {"values", g.values}};
}

inline agents::Genome genome_from_json(const json& j) {
  agents::Genome g;
  try {
    g.architecture = agents::architecture_from_string(j.at("architecture").get<std::string>());
    g.bond_dim = j.value("bond_dim", std::size_t{0});
    g.values = j.at("values").get<std::vector<double>>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed genome: ") + e.what());
  }
  const std::size_t want = agents::genome_length(g.architecture, g.bond_dim);
  if (g.architecture == agents::Architecture::TnVqc && g.bond_dim < 1)
    throw ConfigError("TN-VQC genome needs bond_dim >= 1");
  if (g.values.size() != want)
    throw ConfigError("genome has " + std::to_string(g.values.size()) + " values, architecture needs " +
                      std::to_string(want));
  return g;
}

// --- stats CSV -------------------------------------------------------------

inline constexpr const char* kStatsHeader =
    "generation,top5_avg,pop_mean,pop_std,elite_score,rolling_mean_100,rolling_std_100\n";

inline std::string csv_row(const evo::GenerationStats& s) {
  char buf[256];
  std::snprintf(buf, sizeof buf, "%zu,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", s.generation, s.top5_avg, s.pop_mean,
                s.pop_std, s.elite_score, s.rolling_mean, s.rolling_std);
  return buf;
}

inline std::string stats_csv(std::span<const evo::GenerationStats> stats) {
  std::string out = kStatsHeader;
  for (const auto& s : stats) out += csv_row(s);
  return out;
}

// --- checkpoints -----------------------------------------------------------

struct Checkpoint {
  RunConfig config;
  evo::EvolutionState state;
};

inline json to_json(const evo::GenerationStats& s) {
  return json::array({s.generation, s.top5_avg, s.pop_mean, s.pop_std, s.elite_score, s.rolling_mean, s.rolling_std});
}

inline evo::GenerationStats stats_from_json(const json& j) {
  if (!j.is_array() || j.size() != 7) throw ConfigError("malformed stats row in checkpoint");
  return {j[0].get<std::size_t>(), j[1].get<double>(), j[2].get<double>(), j[3].get<double>(),
          j[4].get<double>(),      j[5].get<double>(), j[6].get<double>()};
}

inline json to_json(const Checkpoint& c) {
  json parents = json::array();
  for (std::size_t j = 0; j < c.state.parents.size(); ++j)
    parents.push_back({{"fitness", c.state.parent_fitness.at(j)}, {"values", c.state.parents[j]}});
  json stats = json::array();
  for (const auto& s : c.state.stats) stats.push_back(to_json(s));
  return {{"format", "qevo-checkpoint"},
          {"version", 1},
          {"config", to_json(c.config)},
          {"generation", c.state.generations_done},
          {"parents", parents},
          {"elite_index", c.state.elite_rank},
          {"elite_score", c.state.elite_score},
          {"elite", c.state.parents.at(c.state.elite_rank)},
          // Every random draw is keyed by (master_seed, stream, generation,
          // index), so the seed and generation are the whole RNG state.
          {"rng", {{"master_seed", c.config.evo.master_seed}, {"next_generation", c.state.generations_done}}},
          {"stats", stats}};
}

inline Checkpoint checkpoint_from_json(const json& j) {
  Checkpoint c;
  try {
    if (j.at("format").get<std::string>() != "qevo-checkpoint") throw ConfigError("not a qevo checkpoint");
    if (j.at("version").get<int>() != 1) throw ConfigError("unsupported checkpoint version");
    c.config = run_config_from_json(j.at("config"));
    c.state.generations_done = j.at("generation").get<std::size_t>();
    for (const auto& p : j.at("parents")) {
      c.state.parent_fitness.push_back(p.at("fitness").get<double>());
      c.state.parents.push_back(p.at("values").get<std::vector<double>>());
    }
    c.state.elite_rank = j.at("elite_index").get<std::size_t>();
    c.state.elite_score = j.at("elite_score").get<double>();
    for (const auto& row : j.at("stats")) c.state.stats.push_back(stats_from_json(row));
    if (c.state.elite_rank >= c.state.parents.size() ||
        j.at("elite").get<std::vector<double>>() != c.state.parents[c.state.elite_rank])
      throw ConfigError("checkpoint elite does not match its parents");
  } catch (const json::exception& e) {
    throw ConfigError(std::string("corrupt checkpoint: ") + e.what());
  }
  const auto& st = c.state;
  if (st.generations_done < 1 || st.stats.size() != st.generations_done ||
      st.parents.size() != c.config.evo.truncation)
    throw ConfigError("corrupt checkpoint: inconsistent generation, stats or parent count");
  const std::size_t len = agents::genome_length(c.config.architecture(), c.config.bond_dim());
  for (const auto& p : st.parents)
    if (p.size() != len) throw ConfigError("corrupt checkpoint: parent genome has wrong length");
  return c;
}

inline Checkpoint load_checkpoint(const fs::path& path) { return checkpoint_from_json(read_json_file(path)); }

inline std::string checkpoint_name(std::size_t generation) {
  return "checkpoint_" + std::to_string(generation) + ".json";
}

// --- drivers ---------------------------------------------------------------

/// Calls fn(task) with the fitness task matching the config.
template <class Fn>
decltype(auto) with_task(const RunConfig& cfg, Fn&& fn) {
  if (cfg.env == EnvKind::CartPole) {
    envs::CartPoleParams p;
    p.theta_threshold_deg = cfg.pole_angle_deg;
    const tasks::CartPoleTask task(p);
    return fn(task);
  }
  const tasks::MiniGridTask task(minigrid_size(cfg.env), cfg.mps_bond_dim);
  return fn(task);
}

/// Invoked after every generation; returning false stops the run early.
using GenerationCallback = std::function<bool(const evo::GenerationStats&)>;

namespace detail {

template <class Task>
std::vector<evo::GenerationStats> drive(const RunConfig& cfg, evo::Evolution<Task>& evolution,
                                        const GenerationCallback& on_generation) {
  const fs::path dir(cfg.out_dir);
  fs::create_directories(dir);
  const fs::path csv_path = dir / "stats.csv";
  write_text_file(csv_path, stats_csv(evolution.stats()));

  auto save_checkpoint = [&] {
    const Checkpoint ck{cfg, evolution.state()};
    write_text_file(dir / checkpoint_name(evolution.generations_done()), to_json(ck).dump() + "\n");
  };

  bool stopped = false;
  const std::size_t start = evolution.generations_done();
  {
    std::ofstream csv(csv_path, std::ios::binary | std::ios::app);
    if (!csv) throw std::runtime_error("cannot append to '" + csv_path.string() + "'");
    while (evolution.generations_done() < cfg.evo.generations) {
      const auto& s = evolution.step();
      csv << csv_row(s);
      csv.flush();
      if (!csv) throw std::runtime_error("write failed for '" + csv_path.string() + "'");
      if (evolution.generations_done() % cfg.checkpoint_every == 0) save_checkpoint();
      if (on_generation && !on_generation(s)) {
        stopped = true;
        break;
      }
    }
  }

  if (evolution.generations_done() > start) {
    if (evolution.generations_done() % cfg.checkpoint_every != 0 || stopped) save_checkpoint();
    agents::Genome best{cfg.architecture(), cfg.bond_dim(), evolution.elite()};
    json j = to_json(best);
    j["score"] = evolution.state().elite_score;
    j["generation"] = evolution.generations_done() - 1;
    write_text_file(dir / "best_genome.json", j.dump() + "\n");
  }
  return evolution.stats();
}

}  // namespace detail

/// Fresh run. Returns every generation's statistics.
inline std::vector<evo::GenerationStats> train(const RunConfig& cfg, const GenerationCallback& on_generation = {}) {
  cfg.validate();
  return with_task(cfg, [&](const auto& task) {
    const auto base = agents::genome_base(cfg.architecture(), cfg.bond_dim());
    evo::Evolution evolution(task, cfg.evo, cfg.workers, base);
    return detail::drive(cfg, evolution, on_generation);
  });
}

/// Continues from a checkpoint; `cfg` may differ from the checkpoint's only
/// in generations, workers, out_dir and checkpoint cadence.
inline std::vector<evo::GenerationStats> resume(const Checkpoint& ck, const RunConfig& cfg,
                                                const GenerationCallback& on_generation = {}) {
  cfg.validate();
  RunConfig expected = ck.config;
  expected.evo.generations = cfg.evo.generations;
  expected.workers = cfg.workers;
  expected.out_dir = cfg.out_dir;
  expected.checkpoint_every = cfg.checkpoint_every;
  if (!(expected == cfg)) throw ConfigError("resume config differs from the checkpoint's run configuration");
  return with_task(cfg, [&](const auto& task) {
    evo::Evolution evolution(task, cfg.evo, cfg.workers, ck.state);
    return detail::drive(cfg, evolution, on_generation);
  });
}

// --- evaluation ------------------------------------------------------------

struct EvalResult {
  std::vector<double> scores;
  double mean = 0.0;
  double std = 0.0;
};

/// Plays `episodes` greedy episodes of a saved genome.
inline EvalResult evaluate_genome(const agents::Genome& genome, EnvKind env, std::size_t episodes,
                                  std::uint64_t seed, double pole_angle_deg = 15.0,
                                  const std::function<void(std::size_t, const tasks::StepRecord&)>& trace = {}) {
  if (genome.architecture != architecture_for(env))
    throw ConfigError("genome architecture " + std::string(agents::to_string(genome.architecture)) +
                      " does not match env " + to_string(env));
  EvalResult r;
  for (std::size_t e = 0; e < episodes; ++e) {
    tasks::TraceSink sink;
    if (trace) sink = [&, e](const tasks::StepRecord& rec) { trace(e, rec); };
    const auto ep_seed = derive_seed({seed, static_cast<std::uint64_t>(Stream::Episode), e});
    if (env == EnvKind::CartPole) {
      envs::CartPoleParams p;
      p.theta_threshold_deg = pole_angle_deg;
      r.scores.push_back(tasks::CartPoleTask(p).play_episode(genome.values, ep_seed, sink));
    } else {
      r.scores.push_back(tasks::MiniGridTask(minigrid_size(env), genome.bond_dim).play_episode(genome.values, ep_seed, sink));
    }
  }
  if (!r.scores.empty()) {
    for (double s : r.scores) r.mean += s;
    r.mean /= static_cast<double>(r.scores.size());
    for (double s : r.scores) r.std += (s - r.mean) * (s - r.mean);
    r.std = std::sqrt(r.std / static_cast<double>(r.scores.size()));
  }
  return r;
}

}  // namespace qevo::run
