// Copyright 2026 The dpsos Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


// Produces the pre-registered utility envelopes used by the acceptance
// gate: runs the utility scenario on 500 seeds (10x the 50 the gate uses,
// and disjoint from them) and records the worst errors among releases.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "utility_scenario.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Calibrate the robust-utility envelopes", "dpsos_calibrate"};
  std::string out;
  int runs = 500;
  std::uint64_t first_seed = 100000;
  app.add_option("--out", out, "Output JSON path")->required();
  app.add_option("--runs", runs, "Number of seeds");
  app.add_option("--first-seed", first_seed, "First seed");
  CLI11_PARSE(app, argc, argv);

  long ok = 0;
  double worst_mean = 0.0, worst_cov = 0.0;
  nlohmann::json statuses = nlohmann::json::object();
  for (int i = 0; i < runs; ++i) {
    const auto r = dpsos::scenario::run_utility(first_seed + i);
    const std::string s = dpsos::estimator::to_string(r.status);
    statuses[s] = statuses.value(s, 0) + 1;
    if (r.status == dpsos::estimator::Status::kOk) {
      ++ok;
      worst_mean = std::max(worst_mean, r.mean_error);
      worst_cov = std::max(worst_cov, r.cov_error);
    }
    if ((i + 1) % 50 == 0) std::cerr << (i + 1) << "/" << runs << " runs, " << ok << " released\n";
  }
  const dpsos::estimator::Params p = dpsos::scenario::utility_params();
  nlohmann::json j;
  j["schema_version"] = 1;
  j["scenario"] = {{"n", 2000},         {"d", 1},          {"adversary", "far-cluster"},
                   {"eta", p.eta},      {"C", p.C},        {"k", p.k},
                   {"epsilon", p.eps},  {"delta", p.delta}, {"L", p.L},
                   {"mode", "pinned-witness"}};
  j["runs"] = runs;
  j["first_seed"] = first_seed;
  j["status_counts"] = statuses;
  j["non_reject_rate"] = static_cast<double>(ok) / runs;
  // Envelopes are the worst calibration errors; null when nothing was
  // released, in which case there is nothing to compare against.
  j["mean_error_envelope"] = ok > 0 ? nlohmann::json(worst_mean) : nlohmann::json(nullptr);
  j["cov_error_envelope"] = ok > 0 ? nlohmann::json(worst_cov) : nlohmann::json(nullptr);
  std::ofstream f(out);
  if (!f) {
    std::cerr << "cannot write " << out << "\n";
    return 2;
  }
  f << j.dump(2) << "\n";
  return 0;
}
