import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.integrate import quad
from scipy.special import ndtr
from scipy.stats import kendalltau, kstest

from depcens import CopulaFamily, CopulaModel, InputError, bivariate_normal_cdf, r_from_tau, tau_from_r

MODELS = [
    CopulaModel(CopulaFamily.FRANK, 10.0),
    CopulaModel(CopulaFamily.FRANK, -5.0),
    CopulaModel(CopulaFamily.FRANK, 2.0),
    CopulaModel(CopulaFamily.GAUSSIAN, 0.8687),
    CopulaModel(CopulaFamily.GAUSSIAN, -0.4),
    CopulaModel(CopulaFamily.GUMBEL, 3.0),
    CopulaModel(CopulaFamily.GUMBEL, 1.5),
]


def _ids(models):
    return [f"{m.family.value}_{m.r}" for m in models]


class TestDomains:
    def test_gaussian_domain(self):
        with pytest.raises(InputError):
            CopulaModel(CopulaFamily.GAUSSIAN, 1.0)

    def test_gumbel_domain(self):
        with pytest.raises(InputError):
            CopulaModel(CopulaFamily.GUMBEL, 0.9)

    def test_argument_domain(self):
        with pytest.raises(InputError):
            MODELS[0].cdf(-0.1, 0.5)


class TestCdf:
    @pytest.mark.parametrize("cop", MODELS, ids=_ids(MODELS))
    def test_uniform_margins(self, cop):
        u = np.linspace(0.0, 1.0, 21)
        assert np.allclose(cop.cdf(u, np.ones_like(u)), u, atol=1e-12)
        assert np.allclose(cop.cdf(np.ones_like(u), u), u, atol=1e-12)

    @pytest.mark.parametrize("cop", MODELS, ids=_ids(MODELS))
    def test_grounded(self, cop):
        u = np.linspace(0.0, 1.0, 21)
        assert np.allclose(cop.cdf(u, np.zeros_like(u)), 0.0, atol=1e-14)

    def test_frank_independence_route(self):
        cop = CopulaModel(CopulaFamily.FRANK, 1e-9)
        assert cop.cdf(0.3, 0.6) == pytest.approx(0.18, abs=1e-12)

    @pytest.mark.parametrize("cop", MODELS, ids=_ids(MODELS))
    def test_frechet_bounds(self, cop):
        rng = np.random.default_rng(5)
        u = rng.uniform(0, 1, 10_000)
        v = rng.uniform(0, 1, 10_000)
        c = np.asarray(cop.cdf(u, v))
        assert np.all(c <= np.minimum(u, v) + 1e-12)
        assert np.all(c >= np.maximum(u + v - 1.0, 0.0) - 1e-12)

    @pytest.mark.parametrize("cop", MODELS, ids=_ids(MODELS))
    def test_two_increasing(self, cop):
        rng = np.random.default_rng(6)
        u1 = rng.uniform(0, 1, 2000)
        u2 = u1 + rng.uniform(0, 1, 2000) * (1 - u1)
        v1 = rng.uniform(0, 1, 2000)
        v2 = v1 + rng.uniform(0, 1, 2000) * (1 - v1)
        vol = (np.asarray(cop.cdf(u2, v2)) - np.asarray(cop.cdf(u1, v2))
               - np.asarray(cop.cdf(u2, v1)) + np.asarray(cop.cdf(u1, v1)))
        assert vol.min() >= -1e-12


class TestPartials:
    @pytest.mark.parametrize("cop", MODELS, ids=_ids(MODELS))
    def test_matches_finite_difference(self, cop):
        rng = np.random.default_rng(7)
        u = rng.uniform(0.02, 0.98, 400)
        v = rng.uniform(0.02, 0.98, 400)
        h = 1e-6
        fd_u = (np.asarray(cop.cdf(u + h, v)) - np.asarray(cop.cdf(u - h, v))) / (2 * h)
        fd_v = (np.asarray(cop.cdf(u, v + h)) - np.asarray(cop.cdf(u, v - h))) / (2 * h)
        assert np.max(np.abs(np.asarray(cop.partial_u(u, v)) - fd_u)) < 1e-6
        assert np.max(np.abs(np.asarray(cop.partial_v(u, v)) - fd_v)) < 1e-6

    def test_gaussian_independence(self):
        cop = CopulaModel(CopulaFamily.GAUSSIAN, 0.0)
        assert cop.partial_u(0.3, 0.71) == pytest.approx(0.71, abs=1e-14)

    def test_gaussian_closed_form(self):
        cop = CopulaModel(CopulaFamily.GAUSSIAN, 0.6)
        from scipy.special import ndtri

        u, v = 0.35, 0.62
        expected = ndtr((ndtri(v) - 0.6 * ndtri(u)) / np.sqrt(1 - 0.36))
        assert cop.partial_u(u, v) == pytest.approx(expected, abs=1e-12)

    def test_frank_centre_fd(self):
        cop = CopulaModel(CopulaFamily.FRANK, 10.0)
        h = 1e-6
        fd = (cop.cdf(0.5 + h, 0.5) - cop.cdf(0.5 - h, 0.5)) / (2 * h)
        assert cop.partial_u(0.5, 0.5) == pytest.approx(fd, abs=1e-6)

    @pytest.mark.parametrize("cop", MODELS, ids=_ids(MODELS))
    def test_boundaries_no_nan(self, cop):
        pts = [(0.0, 0.5), (1.0, 0.5), (0.5, 0.0), (0.5, 1.0), (0.0, 0.0), (1.0, 1.0)]
        for u, v in pts:
            pu = cop.partial_u(u, v)
            pv = cop.partial_v(u, v)
            assert np.isfinite(pu) and 0.0 <= pu <= 1.0
            assert np.isfinite(pv) and 0.0 <= pv <= 1.0

    @pytest.mark.parametrize("cop", MODELS, ids=_ids(MODELS))
    def test_conditional_cdf_monotone(self, cop):
        v = np.linspace(0.01, 0.99, 99)
        for u in (0.2, 0.5, 0.9):
            pu = np.asarray(cop.partial_u(np.full_like(v, u), v))
            assert np.all(np.diff(pu) >= -1e-10)


class TestSurvivalCopula:
    def test_corner_mass(self):
        cop = MODELS[0]
        assert cop.survival_copula(0.0, 0.0) == 1.0

    def test_margin_free(self):
        cop = MODELS[0]
        u = np.linspace(0, 1, 11)
        assert np.allclose(cop.survival_copula(u, np.zeros_like(u)), 1 - u, atol=1e-12)

    def test_identity(self):
        cop = CopulaModel(CopulaFamily.FRANK, 10.0)
        u, v = 0.4, 0.7
        assert cop.survival_copula(u, v) == pytest.approx(1 - u - v + cop.cdf(u, v), abs=1e-14)

    def test_is_joint_survival(self):
        cop = CopulaModel(CopulaFamily.GAUSSIAN, 0.5)
        rng = np.random.default_rng(8)
        u, v = cop.sample_pair(rng, size=200_000)
        est = np.mean((u > 0.4) & (v > 0.7))
        assert cop.survival_copula(0.4, 0.7) == pytest.approx(est, abs=5e-3)


class TestKendallTau:
    def test_gumbel_exact(self):
        assert tau_from_r(CopulaFamily.GUMBEL, 2.0) == pytest.approx(0.5, abs=1e-15)

    def test_frank_ten(self):
        tau = tau_from_r(CopulaFamily.FRANK, 10.0)
        assert 0.66 <= tau <= 0.675
        # independent quadrature of the tau integral
        inner, _ = quad(lambda t: t / np.expm1(t), 0, 10.0)
        assert tau == pytest.approx(1 - 4.0 / 10.0 + 4.0 / 100.0 * inner, abs=1e-9)

    def test_gaussian_independence(self):
        assert tau_from_r(CopulaFamily.GAUSSIAN, 0.0) == 0.0

    @pytest.mark.parametrize("family,r", [
        (CopulaFamily.FRANK, 10.0),
        (CopulaFamily.FRANK, -3.0),
        (CopulaFamily.GAUSSIAN, 0.8687),
        (CopulaFamily.GUMBEL, 2.5),
    ])
    def test_roundtrip(self, family, r):
        assert r_from_tau(family, tau_from_r(family, r)) == pytest.approx(r, abs=1e-6)

    @pytest.mark.parametrize("family,grid", [
        (CopulaFamily.FRANK, np.linspace(-8, 12, 9)),
        (CopulaFamily.GAUSSIAN, np.linspace(-0.9, 0.9, 9)),
        (CopulaFamily.GUMBEL, np.linspace(1.05, 6, 9)),
    ])
    def test_strictly_increasing(self, family, grid):
        taus = [tau_from_r(family, float(r)) for r in grid]
        assert np.all(np.diff(taus) > 0)

    def test_domain_errors(self):
        with pytest.raises(InputError):
            r_from_tau(CopulaFamily.GUMBEL, -0.2)
        with pytest.raises(InputError):
            r_from_tau(CopulaFamily.GAUSSIAN, 1.5)


class TestSampling:
    def test_frank_tau(self):
        cop = CopulaModel(CopulaFamily.FRANK, 10.0)
        u, v = cop.sample_pair(np.random.default_rng(9), size=20_000)
        tau = kendalltau(u, v).statistic
        assert 0.64 <= tau <= 0.69

    def test_margins_uniform(self):
        cop = CopulaModel(CopulaFamily.FRANK, 10.0)
        u, v = cop.sample_pair(np.random.default_rng(10), size=20_000)
        assert kstest(u, "uniform").statistic < 0.015
        assert kstest(v, "uniform").statistic < 0.015

    def test_determinism(self):
        cop = CopulaModel(CopulaFamily.GUMBEL, 2.0)
        a = cop.sample_pair(np.random.default_rng(11), size=64)
        b = cop.sample_pair(np.random.default_rng(11), size=64)
        assert np.array_equal(a[0], b[0]) and np.array_equal(a[1], b[1])

    @pytest.mark.parametrize("cop", [
        CopulaModel(CopulaFamily.GAUSSIAN, 0.8687),
        CopulaModel(CopulaFamily.GUMBEL, 3.0),
        CopulaModel(CopulaFamily.FRANK, -5.0),
    ], ids=["gauss", "gumbel", "frank_neg"])
    def test_tau_consistency(self, cop):
        u, v = cop.sample_pair(np.random.default_rng(12), size=8000)
        tau_emp = kendalltau(u, v).statistic
        assert tau_emp == pytest.approx(cop.tau(), abs=0.03)


class TestBivariateNormalCdf:
    def test_independence_quadrant(self):
        assert bivariate_normal_cdf(0.0, 0.0, 0.0) == pytest.approx(0.25, abs=1e-14)

    def test_total_mass(self):
        assert bivariate_normal_cdf(np.inf, np.inf, 0.3) == 1.0
        assert bivariate_normal_cdf(-np.inf, 1.0, 0.3) == 0.0

    def test_orthant_closed_form(self):
        expected = 0.25 + np.arcsin(0.5) / (2 * np.pi)
        assert bivariate_normal_cdf(0.0, 0.0, 0.5) == pytest.approx(expected, abs=1e-12)
        assert bivariate_normal_cdf(0.0, 0.0, 0.5) == pytest.approx(1.0 / 3.0, abs=1e-12)

    @pytest.mark.parametrize("rho", [-0.97, -0.5, 0.2, 0.8687, 0.97])
    def test_against_quadrature(self, rho):
        s = np.sqrt(1 - rho * rho)

        def oracle(a, b):
            val, _ = quad(lambda t: ndtr((b - rho * t) / s) * np.exp(-t * t / 2) / np.sqrt(2 * np.pi),
                          -9, a, limit=300, epsabs=1e-13, epsrel=1e-13)
            return val

        for a, b in [(-1.3, 0.4), (0.0, 1.2), (2.0, 2.0), (-0.5, -0.5)]:
            assert bivariate_normal_cdf(a, b, rho) == pytest.approx(oracle(a, b), abs=1e-10)


class TestHypothesisProperties:
    @settings(max_examples=60, deadline=None)
    @given(st.floats(0.001, 0.999), st.floats(0.001, 0.999),
           st.sampled_from([0, 1, 2]), st.floats(-0.95, 0.95))
    def test_partial_in_unit_interval(self, u, v, fam_idx, raw):
        family = [CopulaFamily.FRANK, CopulaFamily.GAUSSIAN, CopulaFamily.GUMBEL][fam_idx]
        if family is CopulaFamily.FRANK:
            r = raw * 20
        elif family is CopulaFamily.GAUSSIAN:
            r = raw
        else:
            r = 1.0 + abs(raw) * 5
        cop = CopulaModel(family, r)
        assert 0.0 <= cop.partial_u(u, v) <= 1.0
        assert 0.0 <= cop.cdf(u, v) <= min(u, v) + 1e-12
