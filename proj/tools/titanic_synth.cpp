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

// Writes data/titanic.csv: a synthetic passenger table whose joint
// sex x class x survival statistics match the public Titanic training set
// (891 rows, 342 survivors), with class-conditional age/fare/family/cabin
// distributions. Kaggle terms do not allow redistributing the original
// file, so the repository ships this statistically calibrated stand-in.

#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "fairssl/common.hpp"

namespace {

using fairssl::Rng;

struct Cell {
  int sex;    // 0 = female, 1 = male
  int pclass; // 1..3
  int survived;
  int count;
};

// Sex x class x survival contingency of the 891-row training set.
const Cell kCells[] = {
    {0, 1, 1, 91}, {0, 1, 0, 3},   {0, 2, 1, 70}, {0, 2, 0, 6},
    {0, 3, 1, 72}, {0, 3, 0, 72},  {1, 1, 1, 45}, {1, 1, 0, 77},
    {1, 2, 1, 17}, {1, 2, 0, 91},  {1, 3, 1, 47}, {1, 3, 0, 300},
};

struct Row {
  int pclass;
  double age;
  int sibsp;
  int parch;
  double fare;
  std::string embarked;
  int has_cabin;
  int sex;
  int survived;
};

int pick_category(Rng& rng, const std::vector<std::pair<int, double>>& pmf) {
  double u = fairssl::uniform01(rng);
  for (const auto& [value, p] : pmf) {
    if (u < p) return value;
    u -= p;
  }
  return pmf.back().first;
}

Row sample_row(Rng& rng, const Cell& cell) {
  Row r;
  r.sex = cell.sex;
  r.pclass = cell.pclass;
  r.survived = cell.survived;

  const double age_base = cell.pclass == 1 ? 38.0 : cell.pclass == 2 ? 30.0 : 25.0;
  double age_shift = 0.0;
  if (cell.sex == 1 && cell.survived == 1) age_shift = -12.0;  // rescued boys
  if (cell.sex == 0) age_shift = -2.0;
  r.age = age_base + age_shift + 13.0 * fairssl::normal01(rng);
  r.age = std::min(80.0, std::max(0.5, r.age));
  r.age = std::round(r.age * 2.0) / 2.0;

  const double fare_mu = cell.pclass == 1 ? 4.15 : cell.pclass == 2 ? 2.95 : 2.40;
  const double fare_sd = cell.pclass == 1 ? 0.70 : cell.pclass == 2 ? 0.35 : 0.45;
  double log_fare = fare_mu + fare_sd * fairssl::normal01(rng);
  if (cell.sex == 0) log_fare += 0.20;       // women traveled on dearer tickets
  if (cell.survived == 1) log_fare += 0.25;  // cabins near the boat deck
  r.fare = std::min(512.0, std::max(4.0, std::exp(log_fare)));
  r.fare = std::round(r.fare * 100.0) / 100.0;

  // Family size: men mostly alone, women with kin; large steerage families
  // fared badly.
  std::vector<std::pair<int, double>> sibsp_pmf;
  if (cell.sex == 1)
    sibsp_pmf = {{0, 0.78}, {1, 0.16}, {2, 0.04}, {3, 0.02}};
  else
    sibsp_pmf = {{0, 0.48}, {1, 0.38}, {2, 0.09}, {3, 0.05}};
  if (cell.pclass == 3 && cell.survived == 0)
    sibsp_pmf = {{0, 0.45}, {1, 0.20}, {2, 0.12}, {3, 0.12}, {4, 0.07}, {5, 0.04}};
  r.sibsp = pick_category(rng, sibsp_pmf);

  std::vector<std::pair<int, double>> parch_pmf;
  if (cell.sex == 1)
    parch_pmf = {{0, 0.86}, {1, 0.09}, {2, 0.05}};
  else
    parch_pmf = {{0, 0.62}, {1, 0.22}, {2, 0.13}, {3, 0.03}};
  if (cell.pclass == 3 && cell.survived == 0)
    parch_pmf = {{0, 0.62}, {1, 0.14}, {2, 0.12}, {3, 0.07}, {4, 0.05}};
  r.parch = pick_category(rng, parch_pmf);

  std::vector<std::pair<int, double>> emb_pmf;
  if (cell.pclass == 1)
    emb_pmf = {{0, 0.63}, {1, 0.33}, {2, 0.04}};
  else if (cell.pclass == 2)
    emb_pmf = {{0, 0.87}, {1, 0.09}, {2, 0.04}};
  else
    emb_pmf = {{0, 0.72}, {1, 0.14}, {2, 0.14}};
  if (cell.survived == 1 && emb_pmf[1].second >= 0.08) {
    emb_pmf[0].second -= 0.06;  // Cherbourg boarders fared better
    emb_pmf[1].second += 0.06;
  }
  const int emb = pick_category(rng, emb_pmf);
  r.embarked = emb == 0 ? "S" : emb == 1 ? "C" : "Q";

  double cabin_p = cell.pclass == 1 ? 0.88 : cell.pclass == 2 ? 0.22 : 0.06;
  if (cell.survived == 1) cabin_p = std::min(1.0, cabin_p + 0.15);
  r.has_cabin = fairssl::uniform01(rng) < cabin_p ? 1 : 0;
  return r;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"write the synthetic Titanic-calibrated CSV"};
  std::string out_path = "data/titanic.csv";
  std::uint64_t seed = 1912;
  app.add_option("--out", out_path, "output CSV path");
  app.add_option("--seed", seed, "generator seed");
  CLI11_PARSE(app, argc, argv);

  Rng rng = fairssl::make_rng(seed);
  std::vector<Row> rows;
  for (const auto& cell : kCells)
    for (int i = 0; i < cell.count; ++i) rows.push_back(sample_row(rng, cell));
  fairssl::shuffle(rows, rng);

  std::ofstream out(out_path);
  if (!out) {
    std::fprintf(stderr, "cannot write %s\n", out_path.c_str());
    return 2;
  }
  out << "pclass,age,sibsp,parch,fare,embarked,has_cabin,sex,survived\n";
  char buf[160];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof(buf), "%d,%.1f,%d,%d,%.2f,%s,%d,%s,%d\n",
                  r.pclass, r.age, r.sibsp, r.parch, r.fare,
                  r.embarked.c_str(), r.has_cabin,
                  r.sex == 0 ? "female" : "male", r.survived);
    out << buf;
  }
  std::printf("wrote %zu rows to %s\n", rows.size(), out_path.c_str());
  return 0;
}
