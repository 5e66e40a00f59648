/*
 * Copyright 2026 The fairssl authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "fairssl/fairssl.hpp"

namespace {

using namespace fairssl;

struct CommonFlags {
  std::string config_path;
  std::string out_path;
  std::string format;
  std::optional<long long> seed;
};

void add_common(CLI::App* cmd, CommonFlags& flags) {
  cmd->add_option("--config", flags.config_path, "flat key = value config file")
      ->required();
  cmd->add_option("--out", flags.out_path, "output path (overrides config)");
  cmd->add_option("--format", flags.format, "csv or jsonl (overrides config)")
      ->check(CLI::IsMember({"csv", "jsonl"}));
  cmd->add_option("--seed", flags.seed, "override the base seed");
}

/// Config file values with the command-line flags layered on top.
ExperimentConfig make_config(const CommonFlags& flags) {
  ExperimentConfig cfg = load_config(flags.config_path);
  if (flags.seed) cfg.base_seed = static_cast<std::uint64_t>(*flags.seed);
  if (!flags.out_path.empty()) cfg.out_path = flags.out_path;
  if (cfg.out_path.empty())
    throw InputError("no output path: pass --out or set 'out' in the config");
  if (flags.format == "csv") cfg.format = OutputFormat::Csv;
  if (flags.format == "jsonl") cfg.format = OutputFormat::Jsonl;
  return cfg;
}

int run_sweep_cmd(const ExperimentConfig& cfg, const Dataset& data) {
  const auto rows = run_sweep(cfg, data);
  emit_report(rows, cfg.format, cfg.out_path);
  std::printf("sweep: %zu rows -> %s\n", rows.size(), cfg.out_path.c_str());
  return 0;
}

int run_baseline_cmd(const ExperimentConfig& cfg, const Dataset& data) {
  const auto rows = run_baselines(cfg, data);
  emit_report(rows, cfg.format, cfg.out_path);
  std::printf("baseline: %zu rows -> %s\n", rows.size(), cfg.out_path.c_str());
  return 0;
}

int run_decompose_cmd(const ExperimentConfig& cfg, const Dataset& data) {
  SplitSpec sp;
  sp.n_labeled = cfg.n_labeled;
  sp.n_test = cfg.n_test;
  sp.seed = cfg.base_seed;
  if (!cfg.use_unlabeled)
    sp.max_unlabeled = 0;
  else if (!cfg.unlabeled_sizes.empty())
    sp.max_unlabeled = cfg.unlabeled_sizes.front();
  const Split parts = split(data, sp);

  FairnessConstraintSpec spec;
  spec.metric = cfg.metric;
  spec.scope = cfg.use_unlabeled ? cfg.scope : Scope::Labeled;
  spec.c = cfg.c_single;
  if (spec.scope == Scope::Combined) spec.c2 = cfg.c2.value_or(cfg.c_single);

  TrainerFn trainer = [&](const Dataset& pool, const Dataset& eval) {
    GraphLaplacian lap;
    const bool ssl = cfg.use_unlabeled && parts.unlabeled.rows() > 0;
    if (ssl) {
      Matrix x(pool.rows() + parts.unlabeled.rows(), pool.cols());
      x.topRows(pool.rows()) = pool.features;
      x.bottomRows(parts.unlabeled.rows()) = parts.unlabeled.features;
      lap = build_laplacian(x, pool.rows(), cfg.sigma);
    }
    const TrainReport rep =
        train(pool, ssl ? parts.unlabeled : Dataset{}, ssl ? &lap : nullptr,
              cfg.model, spec, cfg.solver);
    return predict(rep.w, with_intercept(eval.features), cfg.model,
                   cfg.solver.threshold)
        .labels;
  };

  const DecompositionReport rep = estimate_decomposition(
      trainer, parts.labeled, parts.test, cfg.n_bootstrap, cfg.base_seed);

  std::ofstream out(cfg.out_path);
  if (!out) throw InputError("cannot write '" + cfg.out_path + "'");
  auto f = [](double v) { return detail::fmt6_json(v); };
  out << "{\n"
      << "  \"bias\": [" << f(rep.bias[0]) << ", " << f(rep.bias[1]) << "],\n"
      << "  \"variance\": [" << f(rep.variance[0]) << ", " << f(rep.variance[1])
      << "],\n"
      << "  \"noise\": [" << f(rep.noise[0]) << ", " << f(rep.noise[1]) << "],\n"
      << "  \"mean_error\": [" << f(rep.mean_error[0]) << ", "
      << f(rep.mean_error[1]) << "],\n"
      << "  \"level_decomposed\": " << f(rep.level_decomposed) << ",\n"
      << "  \"n_bootstrap\": " << rep.n_bootstrap << "\n";

  if (cfg.use_unlabeled && parts.unlabeled.rows() > 0) {
    GraphLaplacian lap;
    Matrix x(parts.labeled.rows() + parts.unlabeled.rows(),
             parts.labeled.cols());
    x.topRows(parts.labeled.rows()) = parts.labeled.features;
    x.bottomRows(parts.unlabeled.rows()) = parts.unlabeled.features;
    lap = build_laplacian(x, parts.labeled.rows(), cfg.sigma);
    SolverConfig solver = cfg.solver;
    solver.seed = cfg.base_seed;
    const TrainReport rep2 =
        train(parts.labeled, parts.unlabeled, &lap, cfg.model, spec, solver);
    const auto noise = noise_terms_unlabeled(rep2.y_u, *parts.unlabeled.labels,
                                             parts.unlabeled.sensitive);
    auto opt = [&](const std::optional<double>& v) {
      return v ? detail::fmt6_json(*v) : std::string("null");
    };
    out << ",  \"propagation_noise\": {\n"
        << "    \"rate_y0_z0\": " << opt(noise.rate[0][0]) << ",\n"
        << "    \"rate_y0_z1\": " << opt(noise.rate[0][1]) << ",\n"
        << "    \"rate_y1_z0\": " << opt(noise.rate[1][0]) << ",\n"
        << "    \"rate_y1_z1\": " << opt(noise.rate[1][1]) << ",\n"
        << "    \"group_diff\": " << f(noise.group_diff) << ",\n"
        << "    \"incomplete\": " << (noise.incomplete ? "true" : "false")
        << "\n  }\n";
  }
  out << "}\n";
  std::printf("decomposition -> %s\n", cfg.out_path.c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"fairness-constrained semi-supervised learning harness"};
  app.require_subcommand(1);

  CommonFlags sweep_flags, decompose_flags, baseline_flags;
  CLI::App* sweep = app.add_subcommand("sweep", "accuracy/discrimination sweep");
  add_common(sweep, sweep_flags);
  CLI::App* decompose =
      app.add_subcommand("decompose", "bias/variance/noise decomposition");
  add_common(decompose, decompose_flags);
  CLI::App* baseline =
      app.add_subcommand("baseline", "US/PS resampling baselines");
  add_common(baseline, baseline_flags);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  const CommonFlags& flags = sweep->parsed()
                                 ? sweep_flags
                                 : decompose->parsed() ? decompose_flags
                                                       : baseline_flags;
  // Configuration phase (bad config or unreadable dataset) exits 1.
  ExperimentConfig cfg;
  Dataset data;
  try {
    cfg = make_config(flags);
    cfg.validate();
    data = load_csv(cfg.dataset_path, cfg.sensitive_column, cfg.label_column);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 1;
  }

  try {
    if (sweep->parsed()) return run_sweep_cmd(cfg, data);
    if (decompose->parsed()) return run_decompose_cmd(cfg, data);
    if (baseline->parsed()) return run_baseline_cmd(cfg, data);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 1;
}
