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

// qevo: train, resume and evaluate evolved variational-circuit agents.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "qevo/run.hpp"

namespace {

using qevo::run::RunConfig;

struct Overrides {
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out_dir;
  std::optional<std::size_t> workers;
  std::optional<std::size_t> generations;
  std::optional<std::size_t> checkpoint_every;

  void apply(RunConfig& cfg) const {
    if (seed) cfg.evo.master_seed = *seed;
    if (out_dir) cfg.out_dir = *out_dir;
    if (workers) cfg.workers = *workers;
    if (generations) cfg.evo.generations = *generations;
    if (checkpoint_every) cfg.checkpoint_every = *checkpoint_every;
  }
};

void add_run_overrides(CLI::App* cmd, Overrides& o, bool allow_seed) {
  if (allow_seed) cmd->add_option("--seed", o.seed, "Master seed");
  cmd->add_option("--out-dir", o.out_dir, "Output directory");
  cmd->add_option("--workers", o.workers, "Evaluation threads")->check(CLI::PositiveNumber);
  cmd->add_option("--generations", o.generations, "Total generations (M)");
  cmd->add_option("--checkpoint-every", o.checkpoint_every, "Checkpoint cadence in generations")
      ->check(CLI::PositiveNumber);
}

void print_progress(const qevo::evo::GenerationStats& s) {
  std::cerr << "gen " << s.generation << "  top5_avg " << s.top5_avg << "  pop_mean " << s.pop_mean << "  elite "
            << s.elite_score << "\n";
}

int cmd_train(const std::string& config_path, const Overrides& o, bool quiet) {
  RunConfig cfg = qevo::run::load_run_config(config_path);
  o.apply(cfg);
  cfg.validate();
  qevo::run::train(cfg, [quiet](const auto& s) {
    if (!quiet) print_progress(s);
    return true;
  });
  return 0;
}

int cmd_resume(const std::string& checkpoint_path, const Overrides& o, const std::optional<std::string>& env,
               bool quiet) {
  const auto ck = qevo::run::load_checkpoint(checkpoint_path);
  RunConfig cfg = ck.config;
  if (env && qevo::run::env_from_string(*env) != cfg.env)
    throw qevo::ConfigError("--env " + *env + " does not match the checkpoint's env " + qevo::run::to_string(cfg.env));
  o.apply(cfg);
  if (cfg.evo.generations < ck.state.generations_done)
    throw qevo::ConfigError("checkpoint is already past the requested generation count");
  qevo::run::resume(ck, cfg, [quiet](const auto& s) {
    if (!quiet) print_progress(s);
    return true;
  });
  return 0;
}

int cmd_eval(const std::string& genome_path, const std::string& env_name, std::size_t episodes, std::uint64_t seed,
             double pole_angle_deg, const std::optional<std::string>& trace_path) {
  const auto env = qevo::run::env_from_string(env_name);
  const auto genome = qevo::run::genome_from_json(qevo::run::read_json_file(genome_path));

  std::ofstream trace;
  if (trace_path) {
    trace.open(*trace_path, std::ios::trunc);
    if (!trace) throw std::runtime_error("cannot write trace file '" + *trace_path + "'");
  }
  std::function<void(std::size_t, const qevo::tasks::StepRecord&)> sink;
  if (trace_path) {
    sink = [&trace](std::size_t episode, const qevo::tasks::StepRecord& r) {
      trace << nlohmann::json{{"episode", episode}, {"step", r.step}, {"action", r.action}, {"reward", r.reward},
                              {"done", r.done}}
                   .dump()
            << "\n";
    };
  }

  const auto result = qevo::run::evaluate_genome(genome, env, episodes, seed, pole_angle_deg, sink);
  nlohmann::json out{{"env", env_name}, {"episodes", episodes}, {"scores", result.scores}};
  if (result.scores.empty()) {
    out["mean"] = nullptr;
    out["std"] = nullptr;
  } else {
    out["mean"] = result.mean;
    out["std"] = result.std;
  }
  std::cout << out.dump() << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Evolutionary training of variational quantum circuit agents"};
  app.require_subcommand(1);

  bool quiet = false;
  app.add_flag("-q,--quiet", quiet, "Suppress per-generation progress");

  std::string config_path;
  Overrides train_o;
  auto* train = app.add_subcommand("train", "Start a training run from a JSON config");
  train->add_option("--config", config_path, "Run configuration (JSON)")->required();
  add_run_overrides(train, train_o, true);

  std::string checkpoint_path;
  Overrides resume_o;
  std::optional<std::string> resume_env;
  auto* resume = app.add_subcommand("resume", "Continue a run from a checkpoint");
  resume->add_option("checkpoint", checkpoint_path, "checkpoint_<g>.json")->required();
  resume->add_option("--env", resume_env, "Expected env (must match the checkpoint)");
  add_run_overrides(resume, resume_o, false);

  std::string genome_path;
  std::string eval_env;
  std::size_t episodes = 10;
  std::uint64_t eval_seed = 0;
  double pole_angle_deg = 15.0;
  std::optional<std::string> trace_path;
  auto* eval = app.add_subcommand("eval", "Replay a saved genome and report its scores as JSON");
  eval->add_option("--genome", genome_path, "Genome file (JSON)")->required();
  eval->add_option("--env", eval_env, "cartpole | minigrid-5 | minigrid-6 | minigrid-8")->required();
  eval->add_option("--episodes", episodes, "Number of episodes");
  eval->add_option("--seed", eval_seed, "Episode seed");
  eval->add_option("--pole-angle-deg", pole_angle_deg, "Cart-Pole failure angle");
  eval->add_option("--trace", trace_path, "Write per-step JSON lines here");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*train) return cmd_train(config_path, train_o, quiet);
    if (*resume) return cmd_resume(checkpoint_path, resume_o, resume_env, quiet);
    if (*eval) return cmd_eval(genome_path, eval_env, episodes, eval_seed, pole_angle_deg, trace_path);
  } catch (const std::exception& e) {
    std::cerr << "qevo: error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
