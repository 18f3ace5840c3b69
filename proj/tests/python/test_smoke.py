# Copyright 2026 The dpsos Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     https://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.


import json
import math
import os
import subprocess

import numpy as np
import pytest

import dpsos


def test_sample_is_deterministic():
    a = dpsos.sample(50, d=2, seed=3)
    assert a.shape == (50, 2)
    np.testing.assert_array_equal(a, dpsos.sample(50, d=2, seed=3))
    assert not np.array_equal(a, dpsos.sample(50, d=2, seed=4))


def test_corrupt_replaces_floor_eta_n_rows(validate):
    X = dpsos.sample(40, seed=1)
    Y, replaced, meta = dpsos.corrupt(X, "far-cluster", 0.1, seed=2)
    validate(meta, "metadata")
    assert len(replaced) == 4
    assert meta["replaced_indices"] == replaced
    untouched = [i for i in range(40) if i not in replaced]
    np.testing.assert_array_equal(Y[untouched], X[untouched])


def test_pot_of_constant_data():
    # Every subset of a point mass has zero spread, so Pot = (1 - eta)^2 n.
    Y = np.full((10, 1), 2.5)
    assert dpsos.pot(Y, 0.2) == pytest.approx(0.8**2 * 10, abs=1e-3 * 10)


def test_certify_matches_fourth_moment_ratio(validate):
    Y = np.array([[-1.0], [0.0], [1.0]])
    p = np.full(3, 1 / 3)
    # m2 = 2/3, m4 = 2/3: accepted iff m4 <= 4 C^2 m2^2, i.e. C >= sqrt(3/8).
    c_min = math.sqrt(3 / 8)
    assert validate(dpsos.certify(p, Y, 1.05 * c_min), "certificate")["accepted"]
    assert not validate(dpsos.certify(p, Y, 0.95 * c_min), "certificate")["accepted"]


def test_estimate_validates_and_is_reproducible(validate):
    Y = dpsos.sample(200, seed=7)
    kw = dict(seed=11, eta=0.25, C=8.0, L=10.0, epsilon=1.0, delta=0.5, mode="pinned")
    a = validate(dpsos.estimate(Y, **kw), "estimate")
    assert a == dpsos.estimate(Y, **kw)
    if a["status"] == "ok":
        assert a["budget"]["total"] == {"eps": 1.0, "delta": 0.5}


def test_estimate_rejects_bad_parameters():
    with pytest.raises(ValueError):
        dpsos.estimate(dpsos.sample(20, seed=1), seed=1, eta=0.7)


def test_audits_validate(validate):
    Y = dpsos.sample(60, seed=5)
    Yp = Y.copy()
    Yp[0, 0] = 100.0
    e = validate(
        dpsos.audit_epsilon(Y, Yp, seed=1, trials=300, eta=0.25, C=8.0, L=10.0, delta=0.5,
                            mode="pinned"),
        "epsilon",
    )
    assert e["trials"] == 300 and e["statistic"] == "mean[0]"
    s = validate(dpsos.stability_audit(Y, Y, 2, mode="pinned"), "stability")
    assert s["values"]["pot_diff"] == 0.0


@pytest.mark.skipif("DPSOS_CLI" not in os.environ, reason="command-line tool not built")
def test_cli_outputs_validate(tmp_path, validate):
    cli = os.environ["DPSOS_CLI"]
    data = tmp_path / "y.csv"
    subprocess.run([cli, "gen", "--n", "30", "--seed", "1", "--out", str(data),
                    "--adversary", "far-cluster", "--eta", "0.1"], check=True)
    validate(json.loads((tmp_path / "y.csv.meta.json").read_text()), "metadata")
    out = subprocess.run([cli, "certify", "--data", str(data), "--C", "2"],
                         check=True, capture_output=True, text=True).stdout
    validate(json.loads(out), "certificate")
    bad = subprocess.run([cli, "estimate", "--data", str(tmp_path / "missing.csv"), "--seed", "1"],
                         capture_output=True, text=True)
    assert bad.returncode == 2
