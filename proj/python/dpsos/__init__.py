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
"""Private robust moment estimation via sum-of-squares relaxations."""

import json

try:
    from dpsos import _dpsos as _core
except ImportError:  # in-tree build: the extension sits on PYTHONPATH
    import _dpsos as _core

sample = _core.sample
pot = _core.pot

__all__ = [
    "sample",
    "corrupt",
    "pot",
    "certify",
    "estimate",
    "audit_epsilon",
    "stability_audit",
    "lemma_suite",
]


def corrupt(X, adversary, eta, *, seed, **kwargs):
    """Returns (Y, replaced_indices, metadata dict)."""
    Y, replaced, meta = _core.corrupt(X, adversary, eta, seed=seed, **kwargs)
    return Y, replaced, json.loads(meta)


def certify(p, Y, C, k=2):
    return json.loads(_core.certify(p, Y, C, k))


def estimate(Y, *, seed, **params):
    return json.loads(_core.estimate(Y, seed, **params))


def audit_epsilon(Y, Y_prime, *, seed, **kwargs):
    return json.loads(_core.audit_epsilon(Y, Y_prime, seed, **kwargs))


def stability_audit(Y, Y_prime, tau, **kwargs):
    return json.loads(_core.stability_audit(Y, Y_prime, tau, **kwargs))


def lemma_suite(*, seed, **kwargs):
    return json.loads(_core.lemma_suite(seed, **kwargs))
