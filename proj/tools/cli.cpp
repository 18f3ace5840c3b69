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


#include "dpsos/cli.hpp"

#include "CLI11.hpp"
#include "json.hpp"

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <stdexcept>

#include "dpsos/audit.hpp"
#include "dpsos/certify.hpp"
#include "dpsos/contamination.hpp"
#include "dpsos/estimator.hpp"
#include "dpsos/io.hpp"
#include "dpsos/rng.hpp"

namespace dpsos::cli {
namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;
using nlohmann::json;

// Usage-level problems (bad flag values, missing seed); reported as exit 2.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Mechanism-level numerical failure; reported as exit 3.
struct NumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

int workers_from_env() {
  const char* v = std::getenv("DPSOS_WORKERS");
  if (v == nullptr || *v == '\0') return 1;
  char* end = nullptr;
  const long w = std::strtol(v, &end, 10);
  if (*end != '\0' || w < 1 || w > 256) throw UsageError("DPSOS_WORKERS must be an integer in [1, 256]");
  return static_cast<int>(w);
}

json parse_json_file(const std::string& path) {
  const std::string text = io::read_file(path);
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    int line = 1, col = 1;
    for (std::size_t i = 0; i + 1 < e.byte && i < text.size(); ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw io::ParseError(path, line, col, "malformed JSON");
  }
}

VectorXd parse_point(const std::string& s) {
  std::vector<double> v;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      v.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw UsageError("bad coordinate '" + item + "' in point '" + s + "'");
    }
  }
  if (v.empty()) throw UsageError("empty point");
  return Eigen::Map<VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

void emit(const std::string& text, const std::string& path, std::ostream& out) {
  if (path.empty()) {
    out << text << '\n';
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw io::IoError("cannot write " + path);
  f << text << '\n';
}

// Estimator parameters: defaults, then the params file, then explicit flags.
struct ParamFlags {
  std::string params_path;
  std::optional<std::string> mode;
  std::optional<double> eta, C, eps, delta, L;
  std::optional<int> k;
  bool psd_project = false;

  void add(CLI::App* app) {
    app->add_option("--params", params_path, "JSON file with estimator parameters");
    app->add_option("--mode", mode, "exact | pinned");
    app->add_option("--eta", eta, "Contamination rate");
    app->add_option("--C", C, "Subgaussianity constant");
    app->add_option("--k", k, "Certificate degree parameter");
    app->add_option("--epsilon", eps, "Privacy epsilon");
    app->add_option("--delta", delta, "Privacy delta");
    app->add_option("--L", L, "Stability parameter");
    app->add_flag("--psd-project", psd_project, "Clamp the released covariance to PSD");
  }

  estimator::Params resolve() const {
    estimator::Params p;
    if (!params_path.empty()) {
      const json j = parse_json_file(params_path);
      if (!j.is_object()) throw io::ParseError(params_path, 1, 1, "expected a JSON object");
      for (const auto& [key, v] : j.items()) {
        try {
          if (key == "eta") p.eta = v.get<double>();
          else if (key == "C") p.C = v.get<double>();
          else if (key == "k") p.k = v.get<int>();
          else if (key == "epsilon") p.eps = v.get<double>();
          else if (key == "delta") p.delta = v.get<double>();
          else if (key == "L") p.L = v.get<double>();
          else if (key == "mode") p.system.mode = pseudo::mode_from_string(v.get<std::string>());
          else if (key == "psd_project") p.psd_project = v.get<bool>();
          else if (key == "constants") {
            for (const auto& [ck, cv] : v.items()) {
              if (ck == "c1") p.constants.c1 = cv.get<double>();
              else if (ck == "ct") p.constants.ct = cv.get<double>();
              else if (ck == "select_util") p.constants.select_util = cv.get<double>();
              else throw io::ParseError(params_path, 1, 1, "unknown constant '" + ck + "'");
            }
          } else if (key == "schema_version") {
            if (v.get<int>() != 1) throw io::ParseError(params_path, 1, 1, "unsupported schema_version");
          } else {
            throw io::ParseError(params_path, 1, 1, "unknown parameter '" + key + "'");
          }
        } catch (const json::exception& e) {
          throw io::ParseError(params_path, 1, 1, "bad value for '" + key + "': " + e.what());
        }
      }
    }
    if (mode) p.system.mode = pseudo::mode_from_string(*mode);
    if (eta) p.eta = *eta;
    if (C) p.C = *C;
    if (k) p.k = *k;
    if (eps) p.eps = *eps;
    if (delta) p.delta = *delta;
    if (L) p.L = *L;
    if (psd_project) p.psd_project = true;
    return p;
  }
};

std::uint64_t require_seed(const std::optional<std::uint64_t>& seed, const std::string& cmd) {
  if (!seed) throw UsageError(cmd + " is randomized: --seed is required");
  return *seed;
}

// ---- gen ----------------------------------------------------------------

struct GenFlags {
  std::string spec = "gaussian";
  int n = 0;
  int d = 1;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::string meta;
  std::string adversary;
  double eta = 0.0;
  double offset = 50.0;
  double scale = 100.0;
  std::string point;
};

int run_gen(const GenFlags& f, std::ostream& out) {
  const std::uint64_t seed = require_seed(f.seed, "gen");
  if (f.n < 1 || f.d < 1) throw UsageError("--n and --d must be >= 1");
  contamination::CleanSpec spec;
  spec.distribution = contamination::distribution_from_string(f.spec);
  spec.n = f.n;
  spec.d = f.d;
  Rng rng(seed);
  Rng clean_rng = rng.split(1), adv_rng = rng.split(2);
  MatrixXd Y = contamination::sample_clean(spec, clean_rng);
  json meta;
  if (!f.adversary.empty()) {
    contamination::Adversary adv;
    adv.kind = contamination::adversary_from_string(f.adversary);
    adv.eta = f.eta;
    adv.offset = f.offset;
    adv.scale = f.scale;
    if (!f.point.empty()) adv.point = parse_point(f.point);
    const contamination::Corrupted c = contamination::corrupt(Y, adv, adv_rng);
    Y = c.Y;
    meta = json::parse(contamination::metadata_json(c, adv, seed));
  } else {
    meta["schema_version"] = 1;
    meta["replaced_indices"] = json::array();
    meta["adversary"] = nullptr;
    meta["seed"] = seed;
  }
  meta["config"] = {{"spec", contamination::to_string(spec.distribution)}, {"n", f.n}, {"d", f.d}};
  const std::string csv = io::to_csv(Y);
  if (f.out.empty()) {
    out << csv;
    return kExitOk;
  }
  {
    std::ofstream file(f.out, std::ios::binary);
    if (!file) throw io::IoError("cannot write " + f.out);
    file << csv;
  }
  emit(meta.dump(2), f.meta.empty() ? f.out + ".meta.json" : f.meta, out);
  return kExitOk;
}

// ---- estimate -----------------------------------------------------------

struct EstimateFlags {
  std::string data;
  std::optional<std::uint64_t> seed;
  std::string out;
  ParamFlags params;
};

int run_estimate(const EstimateFlags& f, std::ostream& out) {
  const std::uint64_t seed = require_seed(f.seed, "estimate");
  const MatrixXd Y = io::load_dataset(f.data);
  estimator::Params p = f.params.resolve();
  p.workers = workers_from_env();
  Rng rng(seed);
  const estimator::EstimateBundle b = estimator::private_estimate(Y, p, rng);
  json j = json::parse(estimator::to_json(b, p, seed));
  j["input"] = {{"data", f.data}, {"n", Y.rows()}, {"d", Y.cols()}};
  emit(j.dump(2), f.out, out);
  return b.status == estimator::Status::kNumerical ? kExitNumerical : kExitOk;
}

// ---- certify ------------------------------------------------------------

struct CertifyFlags {
  std::string data;
  std::string weights;
  double C = 2.0;
  int k = 2;
  std::string out;
};

int run_certify(const CertifyFlags& f, std::ostream& out) {
  const MatrixXd Y = io::load_dataset(f.data);
  VectorXd p;
  if (f.weights.empty()) {
    p = VectorXd::Constant(Y.rows(), 1.0 / static_cast<double>(Y.rows()));
  } else {
    const MatrixXd w = io::load_dataset(f.weights);
    if (w.cols() != 1 || w.rows() != Y.rows()) {
      throw io::ParseError(f.weights, 1, 1, "weights must be one column with one row per point");
    }
    p = w.col(0);
  }
  const certify::SubgaussianCertificate cert = certify::check_subgaussian(p, Y, f.C, f.k);
  json j = json::parse(certify::to_json(cert));
  j["config"] = {{"data", f.data},
                 {"weights", f.weights.empty() ? json(nullptr) : json(f.weights)},
                 {"C", f.C},
                 {"k", f.k}};
  emit(j.dump(2), f.out, out);
  return kExitOk;
}

// ---- audit --------------------------------------------------------------

struct AuditFlags {
  std::string data;
  int index = 0;
  std::string replace;
  std::optional<std::uint64_t> seed;
  long trials = 100000;
  int buckets = 20;
  bool stability = false;
  int tau = 1;
  std::string out;
  ParamFlags params;
};

int run_audit(const AuditFlags& f, std::ostream& out) {
  const MatrixXd Y = io::load_dataset(f.data);
  if (f.replace.empty()) throw UsageError("--replace is required");
  const VectorXd y_new = parse_point(f.replace);
  if (y_new.size() != Y.cols()) throw UsageError("--replace has the wrong dimension");
  if (f.index < 0 || f.index >= Y.rows()) throw UsageError("--index out of range");
  const auto [A, B] = contamination::adjacent_pair(Y, f.index, y_new);
  estimator::Params p = f.params.resolve();
  json cfg = {{"data", f.data},
              {"index", f.index},
              {"replace", std::vector<double>(y_new.data(), y_new.data() + y_new.size())},
              {"eta", p.eta},
              {"C", p.C},
              {"k", p.k},
              {"L", p.L},
              {"mode", pseudo::to_string(p.system.mode)}};
  json j;
  int code = kExitOk;
  if (f.stability) {
    audit::StabilityParams sp;
    sp.C = p.C;
    sp.k = p.k;
    sp.L = p.L;
    sp.tau = f.tau;
    sp.constants = p.constants;
    sp.system = p.system;
    const audit::StabilityReport r = audit::stability_audit(A, B, sp);
    j = json::parse(audit::to_json(r));
    cfg["tau"] = f.tau;
    if (r.status == "ok" && r.stable && !(r.pot_pass && r.weight_pass && r.mean_pass && r.cov_pass)) {
      code = kExitCheckFailed;
    }
  } else {
    const std::uint64_t seed = require_seed(f.seed, "audit");
    p.workers = 1;
    audit::EpsilonConfig ec;
    ec.trials = f.trials;
    ec.buckets = f.buckets;
    ec.delta = p.delta;
    ec.eps = p.eps;
    ec.seed = seed;
    ec.workers = workers_from_env();
    const audit::EpsilonEstimate e = audit::audit_private_estimate(A, B, p, ec);
    j = json::parse(audit::to_json(e));
    cfg["epsilon"] = p.eps;
    cfg["delta"] = p.delta;
    cfg["seed"] = seed;
    cfg["constants"] = {{"c1", p.constants.c1},
                        {"ct", p.constants.ct},
                        {"select_util", p.constants.select_util}};
    if (e.violation) code = kExitCheckFailed;
  }
  j["config"] = cfg;
  emit(j.dump(2), f.out, out);
  return code;
}

// ---- lemmas -------------------------------------------------------------

struct LemmaFlags {
  std::string config = "default";
  std::optional<std::uint64_t> seed;
  std::string out;
  bool table = false;
};

audit::LemmaConfig lemma_config(const std::string& path) {
  audit::LemmaConfig c;
  if (path == "default") return c;
  const json j = parse_json_file(path);
  if (!j.is_object()) throw io::ParseError(path, 1, 1, "expected a JSON object");
  for (const auto& [key, v] : j.items()) {
    try {
      if (key == "mode") c.mode = pseudo::mode_from_string(v.get<std::string>());
      else if (key == "n") c.n = v.get<int>();
      else if (key == "pairs") c.pairs = v.get<int>();
      else if (key == "eta") c.eta = v.get<double>();
      else if (key == "C") c.C = v.get<double>();
      else if (key == "L") c.L = v.get<double>();
      else if (key == "gap_tol") c.gap_tol = v.get<double>();
      else if (key == "selection_trials") c.selection_trials = v.get<long>();
      else if (key == "tlap_samples") c.tlap_samples = v.get<long>();
      else if (key == "hockey_samples") c.hockey_samples = v.get<long>();
      else if (key == "audit_trials") c.audit_trials = v.get<long>();
      else if (key == "audit_n") c.audit_n = v.get<int>();
      else if (key == "audit_eta") c.audit_eta = v.get<double>();
      else if (key == "audit_C") c.audit_C = v.get<double>();
      else if (key == "audit_L") c.audit_L = v.get<double>();
      else if (key == "audit_eps") c.audit_eps = v.get<double>();
      else if (key == "audit_delta") c.audit_delta = v.get<double>();
      else if (key == "constants") {
        for (const auto& [ck, cv] : v.items()) {
          if (ck == "c1") c.constants.c1 = cv.get<double>();
          else if (ck == "ct") c.constants.ct = cv.get<double>();
          else if (ck == "select_util") c.constants.select_util = cv.get<double>();
          else throw io::ParseError(path, 1, 1, "unknown constant '" + ck + "'");
        }
      } else if (key == "schema_version") {
        if (v.get<int>() != 1) throw io::ParseError(path, 1, 1, "unsupported schema_version");
      } else {
        throw io::ParseError(path, 1, 1, "unknown lemma setting '" + key + "'");
      }
    } catch (const json::exception& e) {
      throw io::ParseError(path, 1, 1, "bad value for '" + key + "': " + e.what());
    }
  }
  return c;
}

json lemma_config_json(const audit::LemmaConfig& c) {
  return {{"mode", pseudo::to_string(c.mode)},
          {"n", c.n},
          {"pairs", c.pairs},
          {"eta", c.eta},
          {"C", c.C},
          {"L", c.L},
          {"gap_tol", c.gap_tol},
          {"selection_trials", c.selection_trials},
          {"tlap_samples", c.tlap_samples},
          {"hockey_samples", c.hockey_samples},
          {"audit_trials", c.audit_trials},
          {"audit_n", c.audit_n},
          {"audit_eta", c.audit_eta},
          {"audit_C", c.audit_C},
          {"audit_L", c.audit_L},
          {"audit_eps", c.audit_eps},
          {"audit_delta", c.audit_delta},
          {"constants",
           {{"c1", c.constants.c1}, {"ct", c.constants.ct}, {"select_util", c.constants.select_util}}},
          {"seed", c.seed}};
}

int run_lemmas(const LemmaFlags& f, std::ostream& out, std::ostream& err) {
  audit::LemmaConfig c = lemma_config(f.config);
  c.seed = require_seed(f.seed, "lemmas");
  c.workers = workers_from_env();
  const audit::LemmaReport r = audit::lemma_suite(c);
  json j = json::parse(audit::to_json(r));
  j["config"] = lemma_config_json(c);
  emit(j.dump(2), f.out, out);
  if (f.table) err << audit::summary_table(r);
  return r.all_pass() ? kExitOk : kExitCheckFailed;
}

}  // namespace

int run(const std::vector<std::string>& argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Private, outlier-robust moment estimation via sum-of-squares", "dpsos"};
  app.require_subcommand(1);

  GenFlags gen;
  CLI::App* g = app.add_subcommand("gen", "Sample a (possibly corrupted) dataset as CSV + sidecar");
  g->add_option("--spec", gen.spec, "gaussian | two-point | product-rademacher");
  g->add_option("--n", gen.n, "Number of points")->required();
  g->add_option("--d", gen.d, "Dimension");
  g->add_option("--seed", gen.seed, "RNG seed");
  g->add_option("--out", gen.out, "CSV output path (stdout when omitted)");
  g->add_option("--meta", gen.meta, "Sidecar path (default <out>.meta.json)");
  g->add_option("--adversary", gen.adversary, "far-cluster | heavy-tail | sign-flip | replace-with");
  g->add_option("--eta", gen.eta, "Fraction of rows the adversary replaces");
  g->add_option("--offset", gen.offset, "far-cluster distance");
  g->add_option("--scale", gen.scale, "heavy-tail scale");
  g->add_option("--point", gen.point, "replace-with target, comma separated");

  EstimateFlags est;
  CLI::App* e = app.add_subcommand("estimate", "Private robust estimate of mean, covariance, moments");
  e->add_option("--data", est.data, "CSV or JSON dataset")->required();
  e->add_option("--seed", est.seed, "RNG seed");
  e->add_option("--out", est.out, "Output path (stdout when omitted)");
  est.params.add(e);

  CertifyFlags cer;
  CLI::App* c = app.add_subcommand("certify", "SoS certificate of C-subgaussianity");
  c->add_option("--data", cer.data, "CSV or JSON dataset")->required();
  c->add_option("--weights", cer.weights, "Optional one-column CSV of weights (default uniform)");
  c->add_option("--C", cer.C, "Constant to test");
  c->add_option("--k", cer.k, "Degree parameter");
  c->add_option("--out", cer.out, "Output path (stdout when omitted)");

  AuditFlags aud;
  CLI::App* a = app.add_subcommand("audit", "Audit an adjacent pair (privacy or stability)");
  a->add_option("--data", aud.data, "CSV or JSON dataset")->required();
  a->add_option("--index", aud.index, "Row replaced in the neighbour");
  a->add_option("--replace", aud.replace, "Replacement point, comma separated");
  a->add_option("--seed", aud.seed, "RNG seed");
  a->add_option("--trials", aud.trials, "Mechanism runs per dataset");
  a->add_option("--buckets", aud.buckets, "Initial histogram buckets");
  a->add_flag("--stability", aud.stability, "Run the coupled stability audit instead");
  a->add_option("--tau", aud.tau, "Common outlier-rate numerator for --stability");
  a->add_option("--out", aud.out, "Output path (stdout when omitted)");
  aud.params.add(a);

  LemmaFlags lem;
  CLI::App* l = app.add_subcommand("lemmas", "Run the desk-scale lemma checks");
  l->add_option("--config", lem.config, "'default' or a JSON settings file");
  l->add_option("--seed", lem.seed, "RNG seed");
  l->add_option("--out", lem.out, "Output path (stdout when omitted)");
  l->add_flag("--table", lem.table, "Also print a summary table to stderr");

  std::vector<const char*> args;
  for (const std::string& s : argv) args.push_back(s.c_str());
  try {
    app.parse(static_cast<int>(args.size()), args.data());
  } catch (const CLI::CallForHelp& ex) {
    app.exit(ex, out, err);
    return kExitOk;
  } catch (const CLI::CallForAllHelp& ex) {
    app.exit(ex, out, err);
    return kExitOk;
  } catch (const CLI::ParseError& ex) {
    app.exit(ex, out, err);
    return kExitMalformed;
  }

  try {
    if (g->parsed()) return run_gen(gen, out);
    if (e->parsed()) return run_estimate(est, out);
    if (c->parsed()) return run_certify(cer, out);
    if (a->parsed()) return run_audit(aud, out);
    if (l->parsed()) return run_lemmas(lem, out, err);
  } catch (const io::ParseError& ex) {
    err << "error: " << ex.what() << '\n';
    return kExitMalformed;
  } catch (const io::IoError& ex) {
    err << "error: " << ex.what() << '\n';
    return kExitMalformed;
  } catch (const UsageError& ex) {
    err << "error: " << ex.what() << '\n';
    return kExitMalformed;
  } catch (const std::invalid_argument& ex) {
    err << "error: " << ex.what() << '\n';
    return kExitMalformed;
  } catch (const std::out_of_range& ex) {
    err << "error: " << ex.what() << '\n';
    return kExitMalformed;
  } catch (const std::exception& ex) {
    err << "numerical failure: " << ex.what() << '\n';
    return kExitNumerical;
  }
  return kExitMalformed;
}

}  // namespace dpsos::cli
