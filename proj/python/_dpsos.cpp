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


// Python bindings. Reports cross the boundary as their JSON text; the
// dpsos package turns them into dicts.

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <string>

#include "dpsos/audit.hpp"
#include "dpsos/certify.hpp"
#include "dpsos/contamination.hpp"
#include "dpsos/estimator.hpp"
#include "dpsos/pseudo.hpp"

namespace py = pybind11;
using namespace dpsos;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

estimator::Params make_params(double eta, double C, int k, double epsilon, double delta,
                              double L, const std::string& mode, bool psd_project,
                              double c1, double ct) {
  estimator::Params p;
  p.eta = eta;
  p.C = C;
  p.k = k;
  p.eps = epsilon;
  p.delta = delta;
  p.L = L;
  p.system.mode = pseudo::mode_from_string(mode);
  p.psd_project = psd_project;
  p.constants.c1 = c1;
  p.constants.ct = ct;
  return p;
}

#define DPSOS_PARAM_ARGS                                                                \
  py::arg("eta") = 0.1, py::arg("C") = 2.0, py::arg("k") = 2, py::arg("epsilon") = 1.0, \
      py::arg("delta") = 1e-6, py::arg("L") = 2.0, py::arg("mode") = "exact",           \
      py::arg("psd_project") = false, py::arg("c1") = 2.0, py::arg("ct") = 2.0

}  // namespace

PYBIND11_MODULE(_dpsos, m) {
  m.doc() = "Private robust moment estimation via sum-of-squares relaxations.";

  m.def(
      "sample",
      [](int n, int d, const std::string& distribution, std::uint64_t seed) {
        contamination::CleanSpec spec;
        spec.n = n;
        spec.d = d;
        spec.distribution = contamination::distribution_from_string(distribution);
        Rng rng(seed);
        return contamination::sample_clean(spec, rng);
      },
      py::arg("n"), py::arg("d") = 1, py::arg("distribution") = "gaussian", py::arg("seed"));

  m.def(
      "corrupt",
      [](const MatrixXd& X, const std::string& adversary, double eta, double offset,
         double scale, std::optional<VectorXd> point, std::uint64_t seed) {
        contamination::Adversary adv;
        adv.kind = contamination::adversary_from_string(adversary);
        adv.eta = eta;
        adv.offset = offset;
        adv.scale = scale;
        if (point) adv.point = *point;
        Rng rng(seed);
        contamination::Corrupted c = contamination::corrupt(X, adv, rng);
        return py::make_tuple(c.Y, c.replaced, contamination::metadata_json(c, adv, seed));
      },
      py::arg("X"), py::arg("adversary"), py::arg("eta"), py::arg("offset") = 50.0,
      py::arg("scale") = 100.0, py::arg("point") = py::none(), py::arg("seed"));

  m.def(
      "pot",
      [](const MatrixXd& Y, double eta, double C, int k,
         const std::string& mode) -> std::optional<double> {
        pseudo::SystemConfig cfg;
        cfg.mode = pseudo::mode_from_string(mode);
        const pseudo::PotentialValue v =
            pseudo::minimize_potential(pseudo::build_system(Y, eta, C, k, cfg)).pot;
        if (!v.feasible()) return std::nullopt;
        return v.value;
      },
      py::arg("Y"), py::arg("eta"), py::arg("C") = 2.0, py::arg("k") = 2,
      py::arg("mode") = "exact");

  m.def(
      "certify",
      [](const VectorXd& p, const MatrixXd& Y, double C, int k) {
        return certify::to_json(certify::check_subgaussian(p, Y, C, k));
      },
      py::arg("p"), py::arg("Y"), py::arg("C"), py::arg("k") = 2);

  m.def(
      "estimate",
      [](const MatrixXd& Y, std::uint64_t seed, double eta, double C, int k, double epsilon,
         double delta, double L, const std::string& mode, bool psd_project, double c1,
         double ct) {
        const estimator::Params p =
            make_params(eta, C, k, epsilon, delta, L, mode, psd_project, c1, ct);
        estimator::EstimateBundle b;
        {
          py::gil_scoped_release release;
          Rng rng(seed);
          b = estimator::private_estimate(Y, p, rng);
        }
        return estimator::to_json(b, p, seed);
      },
      py::arg("Y"), py::arg("seed"), DPSOS_PARAM_ARGS);

  m.def(
      "audit_epsilon",
      [](const MatrixXd& Y, const MatrixXd& Y_prime, std::uint64_t seed, long trials,
         int buckets, double eta, double C, int k, double epsilon, double delta, double L,
         const std::string& mode, bool psd_project, double c1, double ct) {
        const estimator::Params p =
            make_params(eta, C, k, epsilon, delta, L, mode, psd_project, c1, ct);
        audit::EpsilonConfig cfg;
        cfg.trials = trials;
        cfg.buckets = buckets;
        cfg.eps = epsilon;
        cfg.delta = delta;
        cfg.seed = seed;
        py::gil_scoped_release release;
        return audit::to_json(audit::audit_private_estimate(Y, Y_prime, p, cfg));
      },
      py::arg("Y"), py::arg("Y_prime"), py::arg("seed"), py::arg("trials") = 10000,
      py::arg("buckets") = 20, DPSOS_PARAM_ARGS);

  m.def(
      "stability_audit",
      [](const MatrixXd& Y, const MatrixXd& Y_prime, int tau, double C, int k, double L,
         const std::string& mode) {
        audit::StabilityParams sp;
        sp.tau = tau;
        sp.C = C;
        sp.k = k;
        sp.L = L;
        sp.system.mode = pseudo::mode_from_string(mode);
        py::gil_scoped_release release;
        return audit::to_json(audit::stability_audit(Y, Y_prime, sp));
      },
      py::arg("Y"), py::arg("Y_prime"), py::arg("tau"), py::arg("C") = 2.0, py::arg("k") = 2,
      py::arg("L") = 2.0, py::arg("mode") = "exact");

  m.def(
      "lemma_suite",
      [](std::uint64_t seed, const std::string& mode, int n, int pairs) {
        audit::LemmaConfig cfg;
        cfg.seed = seed;
        cfg.mode = pseudo::mode_from_string(mode);
        cfg.n = n;
        cfg.pairs = pairs;
        py::gil_scoped_release release;
        return audit::to_json(audit::lemma_suite(cfg));
      },
      py::arg("seed"), py::arg("mode") = "pinned", py::arg("n") = 32, py::arg("pairs") = 5);
}
