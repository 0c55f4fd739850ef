"""Backend parity: the compiled core must match the numpy reference."""

from __future__ import annotations

import os
import subprocess
import sys

import numpy as np
import pytest

from occert import _kernels_py as ref
from occert import curvature as cv
from occert import hermitian as hm
from occert import kernels
from occert.rng import make_rng

cy = pytest.importorskip("occert._kernels_cy",
                         reason="compiled kernels not built")


@pytest.fixture(scope="module")
def samples():
    rng = make_rng(99)
    out = []
    for _ in range(25):
        R = np.ascontiguousarray(cv.random_curvature(rng))
        J = np.ascontiguousarray(hm.random_orthogonal_complex_structure(rng).J)
        vs = [rng.normal(size=6) for _ in range(4)]
        out.append((R, J, vs))
    return out


class TestParity:
    def test_ricci_star(self, samples):
        for R, J, _ in samples:
            assert np.max(np.abs(cy.ricci_star_matrix(R, J)
                                 - ref.ricci_star_matrix(R, J))) < 1e-13

    def test_refute_value(self, samples):
        for R, J, _ in samples:
            assert abs(cy.refute_value(R, J) - ref.refute_value(R, J)) < 1e-12

    def test_refute_gradient(self, samples):
        for R, J, _ in samples:
            v0, g0 = cy.refute_value_and_grad(R, J, 1e-5)
            v1, g1 = ref.refute_value_and_grad(R, J, 1e-5)
            assert abs(v0 - v1) < 1e-12
            # central differences amplify eigensolver noise by 1/(2 eps)
            assert np.max(np.abs(g0 - g1)) < 1e-8

    def test_quad_value(self, samples):
        for R, _, vs in samples:
            assert abs(cy.quad_value(R, *vs) - ref.quad_value(R, *vs)) < 1e-11

    def test_quad_grads(self, samples):
        for R, _, vs in samples:
            v0, g0 = cy.quad_value_and_grads(R, *vs)
            v1, g1 = ref.quad_value_and_grads(R, *vs)
            assert abs(v0 - v1) < 1e-11
            assert np.max(np.abs(g0 - g1)) < 1e-11


class TestBackendSelection:
    def test_active_backend_reports(self):
        assert kernels.BACKEND in ("cython", "python")

    def test_force_python_fallback(self):
        env = dict(os.environ, OCCERT_FORCE_PY="1")
        out = subprocess.run(
            [sys.executable, "-c", "import occert; print(occert.BACKEND)"],
            capture_output=True, text=True, env=env)
        assert out.stdout.strip() == "python"

    def test_pair_order_matches(self):
        # the Givens gradient uses the same lexicographic pair order
        rng = make_rng(7)
        R = np.ascontiguousarray(cv.random_curvature(rng))
        J = np.ascontiguousarray(hm.random_orthogonal_complex_structure(rng).J)
        _, g_cy = cy.refute_value_and_grad(R, J, 1e-4)
        _, g_py = ref.refute_value_and_grad(R, J, 1e-4)
        assert np.max(np.abs(g_cy - g_py)) < 1e-8
