# Copyright 2026 The wnll Authors. All Rights Reserved.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS-IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Weighted nonlocal Laplacian interpolation on point clouds."""

import json

import numpy as np

from . import _core
from ._core import ConvergenceError, Error, InvalidArgument, ParseError, default_mu, registered_profiles

__all__ = [
    "ConvergenceError",
    "Error",
    "InvalidArgument",
    "ParseError",
    "check_connectivity",
    "default_mu",
    "rbar",
    "registered_profiles",
    "run_experiment",
    "sample_labeled",
    "sample_manifold",
    "solve",
    "validate_kernel",
]

DEFAULT_PROFILE = "wendland_c2_default"


def sample_manifold(manifold, n, seed=0, sampling="uniform_random", scale=1.0):
    """Points on a circle, sphere or Clifford torus as an (n, ambient_dim) array."""
    return _core.sample_manifold(manifold, n, seed, sampling, scale)


def sample_labeled(manifold, region, m, seed=0, label_fn="coord:0", scale=1.0):
    """Labeled points drawn uniformly from a region.

    `region` is a dict with kind, center and radius. Returns (points, values).
    """
    fn = label_fn if isinstance(label_fn, dict) else {"id": label_fn}
    return _core.sample_labeled(manifold, json.dumps(region), m, seed, json.dumps(fn), scale)


def validate_kernel(profile=DEFAULT_PROFILE, delta=0.1, intrinsic_dim=1):
    return json.loads(_core.validate_kernel(profile, delta, intrinsic_dim))


def rbar(r, profile=DEFAULT_PROFILE):
    return _core.rbar(profile, r)


def check_connectivity(unlabeled, labeled, delta, profile=DEFAULT_PROFILE, intrinsic_dim=None):
    return json.loads(
        _core.check_connectivity(np.asarray(unlabeled), np.asarray(labeled), delta, profile, intrinsic_dim))


def solve(unlabeled, labeled, values, delta, mu=None, method="cg", tol=1e-10, max_iter=0,
          profile=DEFAULT_PROFILE, intrinsic_dim=None):
    """Interpolates `values` from the labeled points onto the unlabeled ones.

    Returns (u, stats) with u in the order of `unlabeled`. mu defaults to n/m.
    """
    u, stats = _core.solve(np.asarray(unlabeled), np.asarray(labeled), np.asarray(values), delta, mu, method, tol,
                           max_iter, profile, intrinsic_dim)
    return u, json.loads(stats)


def run_experiment(config):
    """Runs a study from a config dict (or JSON text) and returns the report dict."""
    text = config if isinstance(config, str) else json.dumps(config)
    return json.loads(_core.run_experiment(text))
