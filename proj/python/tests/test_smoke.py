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

import math

import numpy as np
import pytest

import wnll


def test_sampling_shapes():
    assert wnll.sample_manifold("circle", 10).shape == (10, 2)
    assert wnll.sample_manifold("sphere", 7, seed=3).shape == (7, 3)
    torus = wnll.sample_manifold("clifford_torus", 12, sampling="quasi_uniform")
    assert torus.shape == (12, 4)
    np.testing.assert_allclose(np.sum(torus**2, axis=1), 1.0)
    a = wnll.sample_manifold("sphere", 50, seed=9)
    np.testing.assert_array_equal(a, wnll.sample_manifold("sphere", 50, seed=9))


def test_labeled_sampling():
    pts, vals = wnll.sample_labeled("circle", {"kind": "arc", "center": 0.0, "radius": 0.5}, 20, seed=1)
    assert pts.shape == (20, 2)
    np.testing.assert_array_equal(vals, pts[:, 0])
    assert np.all(np.abs(np.arctan2(pts[:, 1], pts[:, 0])) <= 0.5 + 1e-12)


def test_kernels():
    report = wnll.validate_kernel(delta=0.2, intrinsic_dim=2)
    assert all(c["passed"] for c in report["clauses"])
    bad = wnll.validate_kernel("linear_hat_r", 0.2, 1)
    assert [c["name"] for c in bad["clauses"] if not c["passed"]] == ["smoothness"]
    assert wnll.rbar(0.0) == pytest.approx(1 / 3, abs=1e-12)
    assert wnll.rbar(0.5) == pytest.approx(1 / 48, abs=1e-12)
    assert "wendland_c2_default" in wnll.registered_profiles()


def test_solve_circle():
    p = wnll.sample_manifold("circle", 400, sampling="quasi_uniform")
    s, b = wnll.sample_labeled("circle", {"kind": "arc", "center": 0.0, "radius": math.pi / 4}, 20, seed=2,
                               label_fn="sin_theta")
    u, stats = wnll.solve(p, s, b, delta=0.2)
    assert stats["converged"]
    assert stats["mu"] == pytest.approx(20.0)
    assert u.shape == (400,)
    assert b.min() - 1e-9 <= u.min() and u.max() <= b.max() + 1e-9
    dense, _ = wnll.solve(p, s, b, delta=0.2, method="dense")
    np.testing.assert_allclose(u, dense, atol=1e-8)


def test_connectivity_and_errors():
    p = np.array([[0.0, 0.0], [0.01, 0.0], [5.0, 0.0]])
    s = np.array([[0.005, 0.0]])
    report = wnll.check_connectivity(p, s, delta=0.1)
    assert not report["s_connected"]
    assert report["unreachable"] == [2]
    with pytest.raises(wnll.InvalidArgument):
        wnll.solve(p, s, [1.0, 2.0], delta=0.1)
    with pytest.raises(wnll.InvalidArgument):
        wnll.sample_manifold("cylinder", 5)
    with pytest.raises(wnll.ConvergenceError):
        wnll.solve(p, s, [1.0], delta=0.1, method="dense")


def test_run_experiment():
    report = wnll.run_experiment({
        "mode": "convergence",
        "manifold": {"kind": "circle", "scale": 1.0},
        "region": {"kind": "arc", "center": 0.0, "radius": 0.3},
        "label_fn": "coord:0",
        "n_ladder": [300],
        "m": 6,
        "delta_rule": {"kind": "fixed_list", "values": [0.4, 0.3]},
        "seeds": [1],
    })
    assert report["mode"] == "convergence"
    assert len(report["rows"]) == 2
    assert all(r["converged"] for r in report["rows"])
    with pytest.raises(wnll.InvalidArgument):
        wnll.run_experiment({"mode": "convergence", "colour": 1})
