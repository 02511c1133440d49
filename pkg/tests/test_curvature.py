import numpy as np
import pytest

import redconn as rc
from redconn.curvature import (convergence_factor, curvature_fd_oracle,
                               curvature_samples, curvature_symmetry_report,
                               reduced_curvature_formula)
from redconn.errors import ZeroDimensionalBase
from redconn.reduction import SigmaGeometry, coordinate_fields


@pytest.fixture(scope="module")
def so3_setup():
    a = rc.so3()
    mu = np.array([0.0, 0.0, 1.0])
    ctx = rc.build_context(a, mu)
    chart = rc.default_chart(ctx)
    return a, ctx, chart


class TestFlatCases:
    def test_zero_connection_on_flat_synthetic_case(self):
        # the heis3 level set has constant horizontal lifts, so the reduced
        # derivative of the zero connection vanishes identically
        a = rc.heis3()
        mu = np.array([0.0, 0.0, 1.0])
        zero = rc.FrameConnection(a, lambda xi: np.zeros((6, 6, 6)), constant=True)
        ctx = rc.build_context(a, mu, connection=zero)
        chart = rc.default_chart(ctx)
        fields = coordinate_fields(chart)
        out = curvature_fd_oracle(ctx, chart, fields[0], fields[1], fields[0],
                                  np.array([0.2, -0.1]))
        assert np.max(np.abs(out)) <= 1e-6

    def test_heis3_reduction_is_flat(self, heis3_ctx):
        chart = rc.default_chart(heis3_ctx)
        fields = coordinate_fields(chart)
        t = np.array([0.3, 0.2])
        for route in (reduced_curvature_formula, curvature_fd_oracle):
            out = route(heis3_ctx, chart, fields[0], fields[1], fields[1], t)
            assert np.max(np.abs(out)) <= 1e-6

    def test_zero_dimensional_base_rejected(self, rng):
        a = rc.abelian(2)
        mu = rng.standard_normal(2)
        ctx = rc.build_context(a, mu)
        chart = rc.orbit_chart(a, mu, ctx.m)
        f = lambda t: np.zeros(0)
        with pytest.raises(ZeroDimensionalBase):
            reduced_curvature_formula(ctx, chart, f, f, f, np.zeros(0))


class TestFlagship:
    def test_formula_matches_oracle(self, so3_setup, rng):
        _, ctx, chart = so3_setup
        pts = [np.zeros(2)] + [rng.uniform(-0.4, 0.4, 2) for _ in range(2)]
        samples = curvature_samples(ctx, chart, pts)
        assert samples, "no samples generated"
        assert max(s.discrepancy for s in samples) <= 1e-4

    def test_equal_first_arguments_vanish(self, so3_setup):
        _, ctx, chart = so3_setup
        fields = coordinate_fields(chart)
        out = reduced_curvature_formula(ctx, chart, fields[0], fields[0], fields[1],
                                        np.array([0.2, 0.1]))
        assert np.max(np.abs(out)) <= 1e-9

    def test_coordinate_fields_commute(self, so3_setup):
        # the chart-space bracket of coordinate fields vanishes, so the
        # commutator route has no third term
        _, ctx, chart = so3_setup
        fields = coordinate_fields(chart)
        t = np.array([0.1, -0.2])
        h = 1e-5
        xc = fields[0](t)
        br = np.zeros(2)
        for b in range(2):
            e_b = np.eye(2)[b] * h
            dy = (fields[1](t + e_b) - fields[1](t - e_b)) / (2 * h)
            br += xc[b] * dy
        assert np.max(np.abs(br)) == 0.0

    def test_tensorial_in_each_slot(self, so3_setup):
        # rescaling a field by a chart function scales the value by its value
        # at the evaluation point
        _, ctx, chart = so3_setup
        fields = coordinate_fields(chart)
        t = np.array([0.15, -0.1])

        def f(tt):
            return 1.0 + 0.4 * tt[0] - 0.7 * tt[1]

        def scaled(field):
            return lambda tt: f(tt) * field(tt)

        geom = SigmaGeometry(ctx, chart)
        base = reduced_curvature_formula(ctx, chart, fields[0], fields[1], fields[1],
                                         t, geom=geom)
        for slot in range(3):
            args = [fields[0], fields[1], fields[1]]
            args[slot] = scaled(args[slot])
            val = reduced_curvature_formula(ctx, chart, *args, t, geom=geom)
            assert np.max(np.abs(val - f(t) * base)) <= 1e-5 * max(1.0, np.max(np.abs(base)))

    def test_group_invariance_through_chart(self, so3_setup, rng):
        # transport the evaluation point and inputs by a coadjoint motion and
        # compare the transported curvature value; the transported inputs are
        # the genuine pushforward fields of the chart coordinate fields
        a, ctx, chart = so3_setup
        fields = coordinate_fields(chart)
        t = np.array([0.1, 0.05])
        geom = SigmaGeometry(ctx, chart)
        base = curvature_fd_oracle(ctx, chart, fields[0], fields[1], fields[1], t,
                                   geom=geom)
        g = rc.group_exp(a, 0.15 * rng.standard_normal(3))
        C = rc.coadjoint_matrix(g)
        C_inv = rc.coadjoint_matrix(g.inverse())
        t2 = chart.coords(C @ chart.nu(t), t0=t)

        def moved(a_idx):
            def field(tt):
                t_pre = chart.coords(C_inv @ chart.nu(tt), t0=t)
                return chart.to_chart(tt, C @ chart.dnu(t_pre)[:, a_idx])
            return field

        val = curvature_fd_oracle(ctx, chart, moved(0), moved(1), moved(1), t2,
                                  geom=geom)
        assert np.max(np.abs(val - C @ base)) <= 1e-6

    def test_su2_matches_so3(self, so3_setup):
        # isomorphic bracket tables through independent realizations must
        # produce the same reduced curvature in chart components
        _, ctx3, chart3 = so3_setup
        a2 = rc.su2()
        mu = np.array([0.0, 0.0, 1.0])
        ctx2 = rc.build_context(a2, mu)
        chart2 = rc.default_chart(ctx2)
        f3 = coordinate_fields(chart3)
        f2 = coordinate_fields(chart2)
        t = np.array([0.2, -0.1])
        v3 = chart3.to_chart(t, curvature_fd_oracle(ctx3, chart3, f3[0], f3[1], f3[1], t))
        v2 = chart2.to_chart(t, curvature_fd_oracle(ctx2, chart2, f2[0], f2[1], f2[1], t))
        assert np.max(np.abs(v3 - v2)) <= 1e-6


class TestCatalogAgreement:
    @pytest.mark.parametrize("name,mu", [
        ("so3", [0, 0, 1]), ("su2", [0, 0, 1]), ("sl2r", [1, 0, 0]),
        ("heis3", [0, 0, 1]), ("se2", [0, 1, 0]),
    ])
    def test_routes_agree_at_default_steps(self, name, mu):
        a = rc.named_algebra(name)
        ctx = rc.build_context(a, np.asarray(mu, float))
        chart = rc.default_chart(ctx)
        samples = curvature_samples(ctx, chart, [np.array([0.15, -0.1])])
        assert max(s.discrepancy for s in samples) <= 1e-4


class TestSymmetryBattery:
    def test_so3_defects_within_tolerance(self, so3_setup, rng):
        _, ctx, chart = so3_setup
        pts = [np.zeros(2), rng.uniform(-0.3, 0.3, 2)]
        report = curvature_symmetry_report(ctx, chart, pts)
        assert report["antisymmetry_defect"] <= 1e-4
        assert report["symplectic_defect"] <= 1e-4
        assert report["bianchi_defect"] <= 1e-4

    def test_negative_control_violates_symplectic_valuedness(self, so3_setup):
        # an unprojected torsion-free connection (what the symplectization
        # step would have fixed) must be flagged by the commutator route
        a, _, _ = so3_setup
        mu = np.array([0.0, 0.0, 1.0])
        rng = np.random.default_rng(7)
        delta = rng.standard_normal((6, 6, 6)) * 0.5
        raw = rc.perturbed_connection(rc.baseline_connection(a), delta, symmetric=True)
        assert rc.torsion_defect(raw, mu) <= 1e-12
        ctx_bad = rc.build_context(a, mu, connection=raw)
        chart = rc.default_chart(ctx_bad)
        bad = curvature_symmetry_report(ctx_bad, chart, [np.array([0.12, -0.07])],
                                        use_oracle=True)
        assert bad["symplectic_defect"] > 1e-2
        ctx_good = rc.build_context(a, mu, connection=rc.symplectize(raw))
        good = curvature_symmetry_report(ctx_good, chart, [np.array([0.12, -0.07])],
                                         use_oracle=True)
        assert good["symplectic_defect"] <= 1e-4


class TestConvergence:
    def test_second_order_step_halving(self, so3_setup):
        _, ctx, chart = so3_setup
        report = convergence_factor(ctx, chart, np.array([0.15, -0.1]))
        assert 3.0 <= report["factor"] <= 5.0
        assert report["oracle_error_fine"] < report["oracle_error_coarse"]

    def test_halving_again_keeps_converging(self, so3_setup):
        _, ctx, chart = so3_setup
        coarse = convergence_factor(ctx, chart, np.array([0.15, -0.1]), coarse=8e-3)
        fine = convergence_factor(ctx, chart, np.array([0.15, -0.1]), coarse=4e-3)
        assert 3.0 <= coarse["factor"] <= 5.0
        assert 3.0 <= fine["factor"] <= 5.0
