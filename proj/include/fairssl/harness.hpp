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

#ifndef FAIRSSL_HARNESS_HPP
#define FAIRSSL_HARNESS_HPP

#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "fairssl/baselines.hpp"
#include "fairssl/common.hpp"
#include "fairssl/dataset.hpp"
#include "fairssl/decomposition.hpp"
#include "fairssl/fairness.hpp"
#include "fairssl/graph.hpp"
#include "fairssl/losses.hpp"
#include "fairssl/solver.hpp"

namespace fairssl {

enum class OutputFormat { Csv, Jsonl };

/// One sweep: dataset x model x fairness spec over a grid of thresholds,
/// unlabeled sizes and seeds (seed_i = base seed + run index).
struct ExperimentConfig {
  std::string dataset_path;
  std::string sensitive_column;
  std::string label_column;
  ModelKind model = ModelKind::LogisticRegression;
  Metric metric = Metric::DisparateImpact;
  Scope scope = Scope::Mixed;
  std::vector<double> c_grid;
  std::optional<double> c2;            // Combined scope only; defaults to c
  std::vector<Index> unlabeled_sizes;  // empty = all remaining rows
  int n_seeds = 10;
  Index n_labeled = 0;
  Index n_test = 0;
  double sigma = 1.0;
  SolverConfig solver;
  std::uint64_t base_seed = 0;
  std::string out_path;  // CLI --out overrides
  OutputFormat format = OutputFormat::Csv;

  // decompose subcommand
  int n_bootstrap = 50;
  double c_single = 1.0;
  bool use_unlabeled = true;

  // baseline subcommand
  std::string baseline_method = "both";  // us | ps | both

  void validate() const {
    if (dataset_path.empty()) throw InputError("config: dataset is required");
    if (sensitive_column.empty())
      throw InputError("config: sensitive is required");
    if (label_column.empty()) throw InputError("config: label is required");
    if (n_seeds < 1) throw InputError("config: n_seeds must be >= 1");
    if (n_labeled < 1 || n_test < 1)
      throw InputError("config: n_labeled and n_test must be >= 1");
    for (double c : c_grid)
      if (c < 0.0) throw InputError("config: c_grid values must be >= 0");
    if (sigma <= 0.0) throw InputError("config: sigma must be > 0");
    solver.validate();
  }
};

/// One output row. Aggregate rows carry seed -1 and status mean/std; the
/// trailing fields are kept for feasibility auditing and not serialized.
struct SweepRow {
  double c = 0.0;
  Index size = 0;
  long long seed = 0;
  double acc = 0.0;
  double dis_di = 0.0;
  double dis_omr = 0.0;
  double dis_fpr = 0.0;
  double dis_fnr = 0.0;
  std::string status;

  Vector w;
  std::vector<ConstraintEval> final_constraints;
  std::string message;
};

namespace detail {

inline int harness_threads() {
  if (const char* env = std::getenv("FAIRSSL_THREADS")) {
    const int n = std::atoi(env);
    if (n > 0) return n;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

inline FairnessConstraintSpec sweep_spec(const ExperimentConfig& cfg, double c) {
  FairnessConstraintSpec spec;
  spec.metric = cfg.metric;
  spec.scope = cfg.scope;
  spec.c = c;
  if (cfg.scope == Scope::Combined) spec.c2 = cfg.c2.value_or(c);
  return spec;
}

/// Split, trim, train, evaluate one sweep cell.
inline SweepRow run_cell(const ExperimentConfig& cfg, const Dataset& data,
                         double c, Index size, std::uint64_t seed) {
  SweepRow row;
  row.c = c;
  row.size = size;
  row.seed = static_cast<long long>(seed);
  try {
    SplitSpec sp;
    sp.n_labeled = cfg.n_labeled;
    sp.n_test = cfg.n_test;
    sp.seed = seed;
    sp.max_unlabeled = size;
    const Split parts = split(data, sp);

    GraphLaplacian lap;
    const bool ssl = parts.unlabeled.rows() > 0;
    if (ssl) {
      Matrix x(parts.labeled.rows() + parts.unlabeled.rows(),
               parts.labeled.cols());
      x.topRows(parts.labeled.rows()) = parts.labeled.features;
      x.bottomRows(parts.unlabeled.rows()) = parts.unlabeled.features;
      lap = build_laplacian(x, parts.labeled.rows(), cfg.sigma);
    }

    SolverConfig solver = cfg.solver;
    solver.seed = seed;
    const FairnessConstraintSpec spec = sweep_spec(cfg, c);
    const TrainReport rep = train(parts.labeled, parts.unlabeled,
                                  ssl ? &lap : nullptr, cfg.model, spec, solver);

    const Matrix test_x = with_intercept(parts.test.features);
    const Prediction pred =
        predict(rep.w, test_x, cfg.model, solver.threshold);
    row.acc = accuracy(pred.labels, *parts.test.labels);
    row.dis_di = discrimination_level(Metric::DisparateImpact, pred.labels,
                                      *parts.test.labels, parts.test.sensitive)
                     .level;
    row.dis_omr = discrimination_level(Metric::Omr, pred.labels,
                                       *parts.test.labels, parts.test.sensitive)
                      .level;
    row.dis_fpr = discrimination_level(Metric::Fpr, pred.labels,
                                       *parts.test.labels, parts.test.sensitive)
                      .level;
    row.dis_fnr = discrimination_level(Metric::Fnr, pred.labels,
                                       *parts.test.labels, parts.test.sensitive)
                      .level;
    row.w = rep.w.w;
    row.final_constraints = rep.constraint_trace.back();
    row.status = "ok";
  } catch (const InfeasibleError& e) {
    row.status = "infeasible";
    row.message = e.what();
    row.acc = row.dis_di = row.dis_omr = row.dis_fpr = row.dis_fnr =
        std::numeric_limits<double>::quiet_NaN();
  } catch (const std::exception& e) {
    row.status = "error";
    row.message = e.what();
    row.acc = row.dis_di = row.dis_omr = row.dis_fpr = row.dis_fnr =
        std::numeric_limits<double>::quiet_NaN();
  }
  return row;
}

}  // namespace detail

/// Run the full grid. Cells execute in parallel (FAIRSSL_THREADS caps the
/// pool); output order is fixed by the (c, size, seed) sort regardless of
/// completion order. Per-seed rows are followed by their mean and sample
/// standard deviation rows (over the successful seeds).
inline std::vector<SweepRow> run_sweep(const ExperimentConfig& cfg,
                                       const Dataset& data) {
  cfg.validate();
  if (cfg.c_grid.empty()) throw InputError("config: c_grid must be non-empty");

  std::vector<Index> sizes = cfg.unlabeled_sizes;
  if (sizes.empty())
    sizes.push_back(data.rows() - cfg.n_labeled - cfg.n_test);

  struct Cell {
    double c;
    Index size;
    std::uint64_t seed;
  };
  std::vector<Cell> cells;
  for (double c : cfg.c_grid)
    for (Index size : sizes)
      for (int s = 0; s < cfg.n_seeds; ++s)
        cells.push_back({c, size, cfg.base_seed + static_cast<std::uint64_t>(s)});

  std::vector<SweepRow> per_seed(cells.size());
  std::atomic<std::size_t> next{0};
  const int n_threads =
      std::min<int>(detail::harness_threads(), static_cast<int>(cells.size()));
  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= cells.size()) return;
      per_seed[i] =
          detail::run_cell(cfg, data, cells[i].c, cells[i].size, cells[i].seed);
    }
  };
  if (n_threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < n_threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  // Per-seed rows already follow the sorted (c, size, seed) order of the
  // cell list; append the aggregates after each (c, size) block.
  std::vector<SweepRow> out;
  std::size_t i = 0;
  for (double c : cfg.c_grid) {
    for (Index size : sizes) {
      std::vector<const SweepRow*> ok;
      for (int s = 0; s < cfg.n_seeds; ++s, ++i) {
        out.push_back(per_seed[i]);
        if (per_seed[i].status == "ok") ok.push_back(&per_seed[i]);
      }
      SweepRow mean, stdev;
      mean.c = stdev.c = c;
      mean.size = stdev.size = size;
      mean.seed = stdev.seed = -1;
      mean.status = "mean";
      stdev.status = "std";
      auto fill = [&](auto get) {
        if (ok.empty())
          return std::pair{std::numeric_limits<double>::quiet_NaN(),
                           std::numeric_limits<double>::quiet_NaN()};
        double m = 0.0;
        for (const auto* r : ok) m += get(*r);
        m /= static_cast<double>(ok.size());
        double ss = 0.0;
        for (const auto* r : ok) ss += (get(*r) - m) * (get(*r) - m);
        const double sd =
            ok.size() > 1 ? std::sqrt(ss / static_cast<double>(ok.size() - 1))
                          : 0.0;
        return std::pair{m, sd};
      };
      std::tie(mean.acc, stdev.acc) = fill([](const SweepRow& r) { return r.acc; });
      std::tie(mean.dis_di, stdev.dis_di) =
          fill([](const SweepRow& r) { return r.dis_di; });
      std::tie(mean.dis_omr, stdev.dis_omr) =
          fill([](const SweepRow& r) { return r.dis_omr; });
      std::tie(mean.dis_fpr, stdev.dis_fpr) =
          fill([](const SweepRow& r) { return r.dis_fpr; });
      std::tie(mean.dis_fnr, stdev.dis_fnr) =
          fill([](const SweepRow& r) { return r.dis_fnr; });
      out.push_back(std::move(mean));
      out.push_back(std::move(stdev));
    }
  }
  return out;
}

inline std::vector<SweepRow> run_sweep(const ExperimentConfig& cfg) {
  const Dataset data =
      load_csv(cfg.dataset_path, cfg.sensitive_column, cfg.label_column);
  return run_sweep(cfg, data);
}

namespace detail {

/// Six significant digits; integers stay integral-looking.
inline std::string fmt6(double v) {
  if (std::isnan(v)) return "nan";
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

inline std::string fmt6_json(double v) {
  if (std::isnan(v)) return "null";
  return fmt6(v);
}

}  // namespace detail

/// Serialize rows as CSV (header + rows) or JSONL with the same nine keys.
/// Emission is byte-deterministic for identical rows.
inline void emit_report(const std::vector<SweepRow>& rows, OutputFormat format,
                        const std::string& path) {
  if (rows.empty()) throw InvalidArgument("emit_report: no rows");
  std::ofstream outf(path);
  if (!outf) throw InputError("emit_report: cannot write '" + path + "'");
  if (format == OutputFormat::Csv) {
    outf << "c,size,seed,acc,dis_di,dis_omr,dis_fpr,dis_fnr,status\n";
    for (const auto& r : rows) {
      outf << detail::fmt6(r.c) << ',' << r.size << ',' << r.seed << ','
           << detail::fmt6(r.acc) << ',' << detail::fmt6(r.dis_di) << ','
           << detail::fmt6(r.dis_omr) << ',' << detail::fmt6(r.dis_fpr) << ','
           << detail::fmt6(r.dis_fnr) << ',' << r.status << '\n';
    }
  } else {
    for (const auto& r : rows) {
      outf << "{\"c\":" << detail::fmt6_json(r.c) << ",\"size\":" << r.size
           << ",\"seed\":" << r.seed
           << ",\"acc\":" << detail::fmt6_json(r.acc)
           << ",\"dis_di\":" << detail::fmt6_json(r.dis_di)
           << ",\"dis_omr\":" << detail::fmt6_json(r.dis_omr)
           << ",\"dis_fpr\":" << detail::fmt6_json(r.dis_fpr)
           << ",\"dis_fnr\":" << detail::fmt6_json(r.dis_fnr)
           << ",\"status\":\"" << r.status << "\"}\n";
    }
  }
  if (!outf) throw InputError("emit_report: write failed for '" + path + "'");
}

/// US/PS baseline rows: resample the labeled part, fit an unconstrained
/// classifier, evaluate on the test part. c is reported as -1 (no
/// constraint) and the method name goes into the status column.
inline std::vector<SweepRow> run_baselines(const ExperimentConfig& cfg,
                                           const Dataset& data) {
  cfg.validate();
  std::vector<std::string> methods;
  if (cfg.baseline_method == "both") {
    methods = {"us", "ps"};
  } else if (cfg.baseline_method == "us" || cfg.baseline_method == "ps") {
    methods = {cfg.baseline_method};
  } else {
    throw InputError("config: method must be us, ps or both");
  }

  std::vector<SweepRow> rows;
  for (const auto& method : methods) {
    for (int s = 0; s < cfg.n_seeds; ++s) {
      const std::uint64_t seed = cfg.base_seed + static_cast<std::uint64_t>(s);
      SweepRow row;
      row.c = -1.0;
      row.size = 0;
      row.seed = static_cast<long long>(seed);
      row.status = method;
      try {
        SplitSpec sp;
        sp.n_labeled = cfg.n_labeled;
        sp.n_test = cfg.n_test;
        sp.seed = seed;
        sp.max_unlabeled = 0;
        const Split parts = split(data, sp);

        Dataset resampled;
        if (method == "us") {
          resampled = uniform_sampling(parts.labeled, seed);
        } else {
          const ModelParams ranker =
              fit_unconstrained(parts.labeled.features,
                                parts.labeled.labels->cast<double>(),
                                ModelKind::LogisticRegression, cfg.solver);
          const Vector scores =
              with_intercept(parts.labeled.features) * ranker.w;
          resampled = preferential_sampling(parts.labeled, scores, seed);
        }
        const ModelParams model = fit_unconstrained(
            resampled.features, resampled.labels->cast<double>(), cfg.model,
            cfg.solver);
        const Prediction pred =
            predict(model, with_intercept(parts.test.features), cfg.model,
                    cfg.solver.threshold);
        row.acc = accuracy(pred.labels, *parts.test.labels);
        row.dis_di =
            discrimination_level(Metric::DisparateImpact, pred.labels,
                                 *parts.test.labels, parts.test.sensitive)
                .level;
        row.dis_omr = discrimination_level(Metric::Omr, pred.labels,
                                           *parts.test.labels,
                                           parts.test.sensitive)
                          .level;
        row.dis_fpr = discrimination_level(Metric::Fpr, pred.labels,
                                           *parts.test.labels,
                                           parts.test.sensitive)
                          .level;
        row.dis_fnr = discrimination_level(Metric::Fnr, pred.labels,
                                           *parts.test.labels,
                                           parts.test.sensitive)
                          .level;
      } catch (const std::exception& e) {
        row.status = "error";
        row.message = e.what();
        row.acc = row.dis_di = row.dis_omr = row.dis_fpr = row.dis_fnr =
            std::numeric_limits<double>::quiet_NaN();
      }
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

// ---------------------------------------------------------------------------
// Flat key = value config files ('#' comments, lists comma-separated).
// ---------------------------------------------------------------------------

inline std::map<std::string, std::string> parse_config_text(std::istream& in) {
  std::map<std::string, std::string> kv;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw InputError("config line " + std::to_string(line_no) +
                       ": expected key = value");
    const std::string key = detail::trim(line.substr(0, eq));
    const std::string value = detail::trim(line.substr(eq + 1));
    if (key.empty() || kv.count(key))
      throw InputError("config line " + std::to_string(line_no) +
                       ": bad or duplicate key '" + key + "'");
    kv[key] = value;
  }
  return kv;
}

namespace detail {

inline double to_double(const std::string& key, const std::string& v) {
  const auto parsed = parse_double(v);
  if (!parsed) throw InputError("config: '" + key + "' is not a number: " + v);
  return *parsed;
}

inline long long to_int(const std::string& key, const std::string& v) {
  const double d = to_double(key, v);
  const long long i = static_cast<long long>(d);
  if (static_cast<double>(i) != d)
    throw InputError("config: '" + key + "' must be an integer: " + v);
  return i;
}

inline std::vector<std::string> split_list(const std::string& v) {
  std::vector<std::string> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

}  // namespace detail

inline ExperimentConfig config_from_kv(std::map<std::string, std::string> kv) {
  ExperimentConfig cfg;
  auto take = [&](const char* key) -> std::optional<std::string> {
    auto it = kv.find(key);
    if (it == kv.end()) return std::nullopt;
    std::string v = it->second;
    kv.erase(it);
    return v;
  };

  if (auto v = take("dataset")) cfg.dataset_path = *v;
  if (auto v = take("sensitive")) cfg.sensitive_column = *v;
  if (auto v = take("label")) cfg.label_column = *v;
  if (auto v = take("model")) {
    if (*v == "lr")
      cfg.model = ModelKind::LogisticRegression;
    else if (*v == "svm")
      cfg.model = ModelKind::Svm;
    else
      throw InputError("config: model must be lr or svm");
  }
  if (auto v = take("metric")) {
    if (*v == "di")
      cfg.metric = Metric::DisparateImpact;
    else if (*v == "omr")
      cfg.metric = Metric::Omr;
    else if (*v == "fpr")
      cfg.metric = Metric::Fpr;
    else if (*v == "fnr")
      cfg.metric = Metric::Fnr;
    else
      throw InputError("config: metric must be di, omr, fpr or fnr");
  }
  if (auto v = take("scope")) {
    if (*v == "labeled")
      cfg.scope = Scope::Labeled;
    else if (*v == "unlabeled")
      cfg.scope = Scope::Unlabeled;
    else if (*v == "combined")
      cfg.scope = Scope::Combined;
    else if (*v == "mixed")
      cfg.scope = Scope::Mixed;
    else
      throw InputError("config: scope must be labeled, unlabeled, combined or mixed");
  }
  if (auto v = take("c_grid"))
    for (const auto& item : detail::split_list(*v))
      cfg.c_grid.push_back(detail::to_double("c_grid", item));
  if (auto v = take("c2")) cfg.c2 = detail::to_double("c2", *v);
  if (auto v = take("unlabeled_sizes"))
    for (const auto& item : detail::split_list(*v))
      cfg.unlabeled_sizes.push_back(
          static_cast<Index>(detail::to_int("unlabeled_sizes", item)));
  if (auto v = take("n_seeds"))
    cfg.n_seeds = static_cast<int>(detail::to_int("n_seeds", *v));
  if (auto v = take("n_labeled"))
    cfg.n_labeled = static_cast<Index>(detail::to_int("n_labeled", *v));
  if (auto v = take("n_test"))
    cfg.n_test = static_cast<Index>(detail::to_int("n_test", *v));
  if (auto v = take("sigma")) cfg.sigma = detail::to_double("sigma", *v);
  if (auto v = take("seed"))
    cfg.base_seed = static_cast<std::uint64_t>(detail::to_int("seed", *v));
  if (auto v = take("alpha")) cfg.solver.alpha = detail::to_double("alpha", *v);
  if (auto v = take("threshold"))
    cfg.solver.threshold = detail::to_double("threshold", *v);
  if (auto v = take("max_outer_iters"))
    cfg.solver.max_outer_iters =
        static_cast<int>(detail::to_int("max_outer_iters", *v));
  if (auto v = take("outer_tol"))
    cfg.solver.outer_tol = detail::to_double("outer_tol", *v);
  if (auto v = take("ccp_tau"))
    cfg.solver.ccp_tau = detail::to_double("ccp_tau", *v);
  if (auto v = take("ccp_mu"))
    cfg.solver.ccp_mu = detail::to_double("ccp_mu", *v);
  if (auto v = take("ccp_max_iters"))
    cfg.solver.ccp_max_iters =
        static_cast<int>(detail::to_int("ccp_max_iters", *v));
  if (auto v = take("wstep_tol"))
    cfg.solver.wstep_tol = detail::to_double("wstep_tol", *v);
  if (auto v = take("ridge_eps"))
    cfg.solver.ridge_eps = detail::to_double("ridge_eps", *v);
  if (auto v = take("l2_reg"))
    cfg.solver.l2_reg = detail::to_double("l2_reg", *v);
  if (auto v = take("n_bootstrap"))
    cfg.n_bootstrap = static_cast<int>(detail::to_int("n_bootstrap", *v));
  if (auto v = take("c")) cfg.c_single = detail::to_double("c", *v);
  if (auto v = take("use_unlabeled")) {
    if (*v == "true" || *v == "1")
      cfg.use_unlabeled = true;
    else if (*v == "false" || *v == "0")
      cfg.use_unlabeled = false;
    else
      throw InputError("config: use_unlabeled must be true or false");
  }
  if (auto v = take("method")) cfg.baseline_method = *v;
  if (auto v = take("out")) cfg.out_path = *v;
  if (auto v = take("format")) {
    if (*v == "csv")
      cfg.format = OutputFormat::Csv;
    else if (*v == "jsonl")
      cfg.format = OutputFormat::Jsonl;
    else
      throw InputError("config: format must be csv or jsonl");
  }

  if (!kv.empty())
    throw InputError("config: unknown key '" + kv.begin()->first + "'");
  return cfg;
}

inline ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open config '" + path + "'");
  return config_from_kv(parse_config_text(in));
}

}  // namespace fairssl

#endif  // FAIRSSL_HARNESS_HPP
