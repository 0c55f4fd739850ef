"""Charts, finite-difference geometry, and the octonionic fixture."""

from __future__ import annotations

import numpy as np
import pytest

from conftest import chart_coords, saddle_metric
from occert import curvature as cv
from occert import sphere as sp
from occert.errors import FDQualityError, InputError, MetricError
from occert.rng import make_rng


class TestOctonionTable:
    def test_three_form_total_antisymmetry(self):
        eps = sp.OCTONION_EPS
        assert np.max(np.abs(eps + eps.transpose(1, 0, 2))) == 0.0
        assert np.max(np.abs(eps + eps.transpose(0, 2, 1))) == 0.0
        assert np.max(np.abs(eps - eps.transpose(1, 2, 0))) == 0.0

    def test_anchor_product(self):
        e = np.eye(7)
        assert np.allclose(sp.cross7(e[0], e[1]), e[2])

    def test_unit_products(self):
        e = np.eye(7)
        for i in range(7):
            for j in range(7):
                if i != j:
                    assert abs(np.linalg.norm(sp.cross7(e[i], e[j])) - 1.0) < 1e-14

    def test_alternativity(self):
        rng = make_rng(1)
        for _ in range(200):
            u, v = rng.normal(size=7), rng.normal(size=7)
            lhs = sp.cross7(u, sp.cross7(u, v))
            rhs = (u @ v) * u - (u @ u) * v
            assert np.max(np.abs(lhs - rhs)) < 1e-12


class TestG2Structure:
    def test_unit_point_required(self):
        with pytest.raises(InputError):
            sp.g2_structure(np.ones(7))

    def test_tangent_orthogonality_and_square(self):
        rng = make_rng(2)
        for _ in range(20):
            p = rng.normal(size=7)
            p /= np.linalg.norm(p)
            Jp = sp.g2_structure(p)
            assert np.max(np.abs(Jp @ p)) < 1e-14
            for _ in range(100):
                v = rng.normal(size=7)
                v -= (v @ p) * p
                w = Jp @ v
                assert abs(w @ v) < 1e-12 * max(1.0, v @ v)
                assert abs(w @ p) < 1e-13
                assert np.max(np.abs(Jp @ w + v)) < 1e-12


class TestCharts:
    def test_round_trip(self):
        rng = make_rng(3)
        for _ in range(200):
            p = rng.normal(size=7)
            p /= np.linalg.norm(p)
            cp = sp.ambient_to_chart(p)
            assert np.linalg.norm(cp.x) <= 1.0 + 1e-12
            assert np.max(np.abs(sp.chart_to_ambient(cp) - p)) < 1e-12

    def test_jacobian_matches_numeric(self):
        for chart in ("north", "south"):
            x = np.array([0.3, -0.2, 0.1, 0.4, -0.5, 0.2])
            pt = sp.ChartPoint(chart, x)
            jac = sp.chart_jacobian(pt)
            h = 1e-6
            for i in range(6):
                xp, xm = x.copy(), x.copy()
                xp[i] += h
                xm[i] -= h
                num = (sp.chart_to_ambient(sp.ChartPoint(chart, xp))
                       - sp.chart_to_ambient(sp.ChartPoint(chart, xm))) / (2 * h)
                assert np.max(np.abs(jac[:, i] - num)) < 1e-9

    def test_transition_preserves_orientation(self):
        # north coords near the equator, re-expressed in the south chart
        x = np.array([0.9, 0.3, -0.2, 0.1, 0.2, -0.4])

        def transition(y):
            p = sp.chart_to_ambient(sp.ChartPoint("north", y))
            return sp.ambient_to_chart(p).x if p[6] > 0 else None

        h = 1e-6
        jac = np.zeros((6, 6))
        base = transition(x)
        assert base is not None
        for i in range(6):
            xp, xm = x.copy(), x.copy()
            xp[i] += h
            xm[i] -= h
            jac[:, i] = (transition(xp) - transition(xm)) / (2 * h)
        assert np.linalg.det(jac) > 0

    def test_invariant_enforced(self):
        with pytest.raises(InputError):
            sp.ChartPoint("north", np.array([2.0, 0, 0, 0, 0, 0]))

    def test_offsphere_input_rejected(self):
        with pytest.raises(InputError):
            sp.ambient_to_chart(np.ones(7))


class TestMetricFamilies:
    def test_round_at_origin(self):
        f = sp.MetricField("round")
        g = sp.chart_metric(f, sp.ChartPoint("north", np.zeros(6)))
        assert np.allclose(g, 4.0 * np.eye(6))

    def test_round_matches_embedding_pullback(self):
        # oracle: pull the flat 7-space metric back through the chart
        f = sp.MetricField("round")
        rng = make_rng(5)
        for _ in range(30):
            x = chart_coords(rng)
            for chart in ("north", "south"):
                pt = sp.ChartPoint(chart, x)
                P = sp.chart_jacobian(pt)
                assert np.max(np.abs(P.T @ P - f.matrix(pt))) < 1e-12

    def test_trivial_conformal_equals_round(self):
        f = sp.MetricField("round")
        c0 = sp.MetricField("conformal",
                            {"f": {"type": "ambient_linear", "coeffs": [0.0] * 7}})
        rng = make_rng(7)
        for _ in range(100):
            pt = sp.ChartPoint("north", chart_coords(rng))
            assert np.max(np.abs(c0.matrix(pt) - f.matrix(pt))) < 1e-14

    def test_unit_ellipsoid_equals_round(self):
        f = sp.MetricField("round")
        e1 = sp.MetricField("ellipsoid", {"axes": [1.0] * 7})
        rng = make_rng(9)
        for _ in range(50):
            pt = sp.ChartPoint("south", chart_coords(rng))
            assert np.max(np.abs(e1.matrix(pt) - f.matrix(pt))) < 1e-12

    def test_scale_factor(self):
        f = sp.MetricField("round", scale=2.0)
        g = f.matrix(sp.ChartPoint("north", np.zeros(6)))
        assert np.allclose(g, 8.0 * np.eye(6))

    def test_custom_spd_enforced(self):
        bad = sp.MetricField("custom", {"terms": [[0, 0, [[1.0, [0] * 6]]]]})
        with pytest.raises(MetricError):
            bad.matrix(sp.ChartPoint("north", np.zeros(6)))


class TestChristoffel:
    def test_flat_metric_vanishes(self):
        conn = sp.christoffel(sp.MetricField.flat_toy(),
                              sp.ChartPoint("north", np.array([0.2, 0, 0, 0, 0, 0.1])))
        assert np.max(np.abs(conn.gamma)) < 1e-14

    def test_round_vanishes_at_origin(self):
        conn = sp.christoffel(sp.MetricField("round"),
                              sp.ChartPoint("north", np.zeros(6)))
        assert np.max(np.abs(conn.gamma)) < 1e-12

    def test_symmetry_exact(self):
        conn = sp.christoffel(sp.MetricField("round"),
                              sp.ChartPoint("north", np.full(6, 0.2)))
        assert np.max(np.abs(conn.gamma - conn.gamma.transpose(0, 2, 1))) == 0.0

    def test_metricity_residual(self):
        fd = sp.FDConfig(h=1e-3)
        field = sp.MetricField("round")
        for pt in sp.sample_points(20, 31):
            conn = sp.christoffel(field, pt, fd)

            def g_at(y, _pt=pt):
                return field.matrix(sp.ChartPoint(_pt.chart_id, y))

            dg = np.stack([sp._directional_samples(g_at, pt.x, i, fd.h, fd.scheme)
                           for i in range(6)])
            res = (dg - np.einsum("mij,mk->ijk", conn.gamma, conn.g)
                   - np.einsum("mik,jm->ijk", conn.gamma, conn.g))
            assert np.max(np.abs(res)) < 10.0 * fd.h ** 2


class TestRiemann:
    def test_round_anchor_second_order(self, G):
        fd = sp.FDConfig(h=1e-3)
        field = sp.MetricField("round")
        for pt in sp.sample_points(5, 42):
            R = sp.riemann(field, pt, fd)
            assert np.max(np.abs(R - G)) < 1e-4

    def test_round_anchor_richardson(self, G):
        fd = sp.FDConfig(h=1e-3, scheme="richardson_4th")
        field = sp.MetricField("round")
        for pt in sp.sample_points(3, 43):
            R = sp.riemann(field, pt, fd)
            assert np.max(np.abs(R - G)) < 1e-6

    def test_flat_vanishes(self):
        R = sp.riemann(sp.MetricField.flat_toy(),
                       sp.ChartPoint("north", np.array([0.2, 0, 0, 0, 0, 0.1])))
        assert np.max(np.abs(R)) < 1e-8

    def test_symmetry_violations_bounded(self):
        fd = sp.FDConfig(h=1e-3)
        conf = sp.MetricField("conformal", {"f": {"type": "ambient_linear",
                                                  "coeffs": [0.1, 0, 0.2, 0, 0, 0, 0]}})
        for pt in sp.sample_points(5, 44):
            R = sp.riemann(conf, pt, fd)
            assert max(cv.validate_symmetries(R).values()) < 100.0 * fd.h ** 2

    def test_step_size_convergence(self, G):
        field = sp.MetricField("round")
        pt = sp.sample_points(1, 45)[0]
        err = {}
        for h in (2e-3, 1e-3):
            R = sp.riemann(field, pt, sp.FDConfig(h=h))
            err[h] = np.max(np.abs(R - G))
        assert err[2e-3] / err[1e-3] >= 3.5

    def test_chart_consistency(self):
        # a point near the equator is expressible in both charts;
        # the operator spectra must agree (they are frame-invariant)
        fd = sp.FDConfig(h=1e-3, scheme="richardson_4th")
        conf = sp.MetricField("conformal", {"f": {"type": "ambient_linear",
                                                  "coeffs": [0.05, 0, 0, 0.02, 0, 0, 0]}})
        p = np.array([0.9, 0.3, -0.2, 0.1, 0.2, -0.1, 0.05])
        p /= np.linalg.norm(p)
        spectra = []
        for chart in ("north", "south"):
            denom = 1.0 - p[6] if chart == "north" else 1.0 + p[6]
            x = p[:6] / denom
            if chart == "south":
                x = x * np.array([1, 1, 1, 1, 1, -1.0])
            R = sp.riemann(conf, sp.ChartPoint(chart, x), fd)
            spectra.append(cv.curvature_operator(R, sym_tol=1e-4).spectrum)
        assert np.max(np.abs(spectra[0] - spectra[1])) < 1e-6

    def test_small_conformal_spectrum_near_ones(self):
        fd = sp.FDConfig(h=1e-3)
        conf = sp.MetricField("conformal", {"f": {"type": "ambient_linear",
                                                  "coeffs": [0.01, 0, 0, 0, 0, 0, 0]}})
        for pt in sp.sample_points(5, 46):
            R = sp.riemann(conf, pt, fd)
            spec = cv.curvature_operator(R, sym_tol=1e-4).spectrum
            assert np.max(np.abs(spec - 1.0)) < 0.2

    def test_fd_quality_error_raised(self):
        # at the smallest step the roundoff floor exceeds the h^2 bound
        pt = sp.ChartPoint("north",
                           np.array([0.31, -0.12, 0.22, 0.05, -0.4, 0.17]))
        with pytest.raises(FDQualityError):
            sp.riemann(sp.MetricField("round"), pt, sp.FDConfig(h=1e-6))


class TestNablaJ:
    def test_nearly_kahler_skewness(self):
        fd = sp.FDConfig(h=1e-3)
        field = sp.MetricField("round")
        acs = sp.ACSField()
        rng = make_rng(47)
        for pt in sp.sample_points(3, 48):
            nd = sp.nabla_J(field, acs, pt, fd)
            for _ in range(100):
                x = rng.normal(size=6)
                nx = np.einsum("i,iab->ab", x, nd.nabla)
                assert np.max(np.abs(nx @ x)) < 1e-3 * (x @ x)

    def test_skewness_residual_decays_quadratically(self):
        field = sp.MetricField("round")
        acs = sp.ACSField()
        pt = sp.sample_points(1, 49)[0]
        rng = make_rng(50)
        x = rng.normal(size=6)
        res = {}
        for h in (2e-3, 1e-3):
            nd = sp.nabla_J(field, acs, pt, sp.FDConfig(h=h))
            nx = np.einsum("i,iab->ab", x, nd.nabla)
            res[h] = np.max(np.abs(nx @ x))
        assert res[2e-3] / res[1e-3] >= 3.5

    def test_constant_j_flat_metric(self):
        J6 = np.kron(np.eye(3), np.array([[0.0, -1.0], [1.0, 0.0]]))
        acs = sp.ACSField(kind="chart_constant", matrix=J6)
        nd = sp.nabla_J(sp.MetricField.flat_toy(), acs,
                        sp.ChartPoint("north", np.array([0.1, 0, 0, 0, 0, 0.2])))
        assert np.max(np.abs(nd.nabla)) < 1e-12
        assert np.max(np.abs(nd.J - J6)) < 1e-12

    def test_anticommutation(self):
        fd = sp.FDConfig(h=1e-3)
        nd = sp.nabla_J(sp.MetricField("round"), sp.ACSField(),
                        sp.sample_points(1, 51)[0], fd)
        anti = (np.einsum("iab,bc->iac", nd.nabla, nd.J)
                + np.einsum("ab,ibc->iac", nd.J, nd.nabla))
        assert np.max(np.abs(anti)) < 1e-6

    def test_g2_phi_positive_on_round_sphere(self):
        fd = sp.FDConfig(h=1e-3)
        rng = make_rng(52)
        for pt in sp.sample_points(5, 53):
            nd = sp.nabla_J(sp.MetricField("round"), sp.ACSField(), pt, fd)
            phi = cv.phi(nd.J, nd.nabla, tol=1e-4)
            for _ in range(50):
                x = rng.normal(size=6)
                x /= np.linalg.norm(x)
                assert x @ phi @ (nd.J @ x) > 0.0


class TestCanonicalConnection:
    def test_flat_kahler_toy(self):
        J6 = np.kron(np.eye(3), np.array([[0.0, -1.0], [1.0, 0.0]]))
        rep = sp.canonical_connection_check(
            sp.MetricField.flat_toy(),
            sp.ACSField(kind="chart_constant", matrix=J6),
            sp.ChartPoint("north", np.array([0.1, 0, 0, 0, 0, 0.2])))
        assert rep.metricity < 1e-10
        assert rep.complex_compat < 1e-10
        assert rep.torsion_norm < 1e-10

    def test_round_g2_torsion(self):
        fd = sp.FDConfig(h=1e-3)
        rep = sp.canonical_connection_check(sp.MetricField("round"),
                                            sp.ACSField(),
                                            sp.sample_points(1, 54)[0], fd)
        assert rep.metricity < 1e-3
        assert rep.complex_compat < 1e-3
        assert rep.torsion_formula < 1e-6
        assert rep.torsion_norm > 0.1     # the derivative of J forces torsion


class TestSampling:
    def test_determinism(self):
        a = sp.sample_points(5, 8)
        b = sp.sample_points(5, 8)
        for pa, pb in zip(a, b):
            assert pa.chart_id == pb.chart_id
            assert np.array_equal(pa.x, pb.x)

    def test_chart_invariant(self):
        for pt in sp.sample_points(200, 9):
            assert np.linalg.norm(pt.x) <= 1.0 + 1e-12

    def test_ambient_mean_vanishes(self):
        n = 10_000
        pts = sp.sample_points(n, 10)
        amb = np.stack([sp.chart_to_ambient(p) for p in pts])
        sem = amb.std(axis=0) / np.sqrt(n)
        assert np.all(np.abs(amb.mean(axis=0)) <= 3.0 * sem)

    def test_at_least_one_point_required(self):
        with pytest.raises(InputError):
            sp.sample_points(0, 1)


class TestPerturbationEstimate:
    def test_round_is_zero(self):
        pts = sp.sample_points(2, 11)
        budget = sp.estimate_perturbation(sp.MetricField("round"), pts,
                                          quad_samples=20)
        assert budget.eps1 < 1e-8
        assert budget.eps2 < 1e-14

    def test_small_conformal_feeds_budget_check(self):
        from occert.certify import perturbation_budget_check

        conf = sp.MetricField("conformal", {"f": {"type": "ambient_linear",
                                                  "coeffs": [0.002, 0, 0, 0, 0, 0, 0]}})
        pts = sp.sample_points(3, 12)
        budget = sp.estimate_perturbation(conf, pts, quad_samples=30)
        assert budget.eps2 < 0.02
        assert perturbation_budget_check(budget).quadratic_ok

    def test_saddle_is_far(self):
        budget = sp.estimate_perturbation(saddle_metric(),
                                          sp.sample_points(2, 13),
                                          quad_samples=20)
        assert budget.eps1 > 0.5
