import numpy as np
import pytest
from scipy.integrate import quad

from depcens import (
    CopulaFamily,
    CopulaModel,
    Dataset,
    InputError,
    InvalidStateError,
    ModelParams,
    ModelSpec,
    Observation,
    StepTransform,
    lambda_hazard,
)
from depcens.likelihood import (
    joint_survival,
    log_subdensity_admin,
    log_subdensity_depcens,
    log_subdensity_event,
    omega,
    psi,
    psi_array,
    score,
    total_loglik,
)
from depcens.simulate import Scenario, generate_dataset, scenario_true_model, yeo_johnson

FRANK = ModelSpec(CopulaFamily.FRANK)
INDEP = ModelSpec(CopulaFamily.FRANK)  # used with r below the independence cutoff

PARAMS = ModelParams(beta=(0.5,), eta=(0.2,), lambda_t=0.5, lambda_c=0.8, r=10.0)
PARAMS_INDEP = ModelParams(beta=(0.5,), eta=(0.2,), lambda_t=0.5, lambda_c=0.8, r=1e-9)


def one_obs(z=1.0, delta=1, xi=0, x=1.0, w=1.0):
    return Observation(z, delta, xi, np.array([x]), np.array([w]))


def transform_with(z, jump=0.1):
    return StepTransform.from_jumps([z], [jump])


class TestSubdensityEvent:
    def test_independence_reduction(self):
        obs = one_obs()
        H = transform_with(1.0)
        mt = lambda_hazard(PARAMS_INDEP.lambda_t)
        mc = lambda_hazard(PARAMS_INDEP.lambda_c)
        hz = H.eval(1.0)
        expected = (mt.log_density(hz - 0.5) + np.log(mc.survival(hz - 0.2)) + np.log(0.1))
        got = log_subdensity_event(obs, PARAMS_INDEP, H, INDEP)
        assert got == pytest.approx(expected, abs=1e-12)

    def test_compositional_oracle(self):
        # H(z) = 1, x'b = 0.5, w'e = 0.2, jump 0.1 under strong dependence
        obs = one_obs(x=1.0, w=1.0)
        params = ModelParams(beta=(0.5,), eta=(0.2,), lambda_t=0.5, lambda_c=0.8, r=10.0)
        H = transform_with(1.0, jump=0.1)
        H = StepTransform.from_jumps([1.0], [1.0])  # H(1) = 1
        # carry the jump size separately: rebuild with jump 0.1 and H(1)=1
        H = StepTransform.from_jumps([0.5, 1.0], [0.9, 0.1])
        cop = CopulaModel(CopulaFamily.FRANK, 10.0)
        mt, mc = lambda_hazard(0.5), lambda_hazard(0.8)
        u = mt.cdf(1.0 - 0.5)
        v = mc.cdf(1.0 - 0.2)
        expected = (mt.log_density(0.5) + np.log(1.0 - cop.partial_u(u, v)) + np.log(0.1))
        got = log_subdensity_event(obs, params, H, FRANK)
        assert np.isfinite(got)
        assert got == pytest.approx(float(expected), abs=1e-10)

    def test_jump_halving_shifts_by_log2(self):
        # halve the jump at z while holding H(z) itself fixed
        obs = one_obs()
        H_full = StepTransform.from_jumps([0.5, 1.0], [0.40, 0.10])
        H_half = StepTransform.from_jumps([0.5, 1.0], [0.45, 0.05])
        assert H_full.eval(1.0) == H_half.eval(1.0)
        base = log_subdensity_event(obs, PARAMS, H_full, FRANK)
        half = log_subdensity_event(obs, PARAMS, H_half, FRANK)
        assert base - half == pytest.approx(np.log(2.0), abs=1e-12)

    def test_zero_jump_is_invalid_state(self):
        obs = one_obs(z=2.0)
        with pytest.raises(InvalidStateError):
            log_subdensity_event(obs, PARAMS, transform_with(1.0), FRANK)

    def test_wrong_class_rejected(self):
        with pytest.raises(InputError):
            log_subdensity_event(one_obs(delta=0, xi=1), PARAMS, transform_with(1.0), FRANK)


class TestSubdensityDepcens:
    def test_symmetry_with_event(self):
        # identical margins, covariates and coefficients: swapping the
        # indicator roles must give the same value
        params = ModelParams(beta=(0.4,), eta=(0.4,), lambda_t=0.6, lambda_c=0.6, r=5.0)
        H = transform_with(1.0)
        ev = log_subdensity_event(one_obs(delta=1, xi=0), params, H, FRANK)
        dc = log_subdensity_depcens(one_obs(delta=0, xi=1), params, H, FRANK)
        assert ev == pytest.approx(dc, abs=1e-12)

    def test_independence_reduction(self):
        obs = one_obs(delta=0, xi=1)
        H = transform_with(1.0)
        mt = lambda_hazard(PARAMS_INDEP.lambda_t)
        mc = lambda_hazard(PARAMS_INDEP.lambda_c)
        hz = H.eval(1.0)
        expected = mc.log_density(hz - 0.2) + np.log(mt.survival(hz - 0.5)) + np.log(0.1)
        assert log_subdensity_depcens(obs, PARAMS_INDEP, H, INDEP) == pytest.approx(expected, abs=1e-12)

    def test_compositional_oracle(self):
        obs = one_obs(delta=0, xi=1)
        H = StepTransform.from_jumps([0.5, 1.0], [0.9, 0.1])
        cop = CopulaModel(CopulaFamily.FRANK, 10.0)
        mt, mc = lambda_hazard(0.5), lambda_hazard(0.8)
        u, v = mt.cdf(0.5), mc.cdf(0.8)
        expected = mc.log_density(0.8) + np.log(1.0 - cop.partial_v(u, v)) + np.log(0.1)
        assert log_subdensity_depcens(obs, PARAMS, H, FRANK) == pytest.approx(float(expected), abs=1e-10)


class TestSubdensityAdmin:
    def test_no_mass_below(self):
        # both transformed arguments far in the left tail: survival -> 1
        obs = one_obs(z=-30.0, delta=0, xi=0, x=1.0, w=1.0)
        params = ModelParams(beta=(2.0,), eta=(2.0,), lambda_t=0.5, lambda_c=0.8, r=10.0)
        H = StepTransform.from_jumps([-30.0, 1.0], [40.0, 1.0])
        val = log_subdensity_admin(obs, params, H, FRANK)
        assert val == pytest.approx(0.0, abs=1e-6)

    def test_independence_product(self):
        obs = one_obs(delta=0, xi=0)
        H = transform_with(1.0)
        hz = H.eval(1.0)
        mt = lambda_hazard(PARAMS_INDEP.lambda_t)
        mc = lambda_hazard(PARAMS_INDEP.lambda_c)
        expected = np.log(mt.survival(hz - 0.5)) + np.log(mc.survival(hz - 0.2))
        assert log_subdensity_admin(obs, PARAMS_INDEP, H, INDEP) == pytest.approx(expected, abs=1e-10)

    def test_compositional_oracle(self):
        obs = one_obs(delta=0, xi=0)
        H = StepTransform.from_jumps([0.5, 1.0], [0.9, 0.1])
        cop = CopulaModel(CopulaFamily.FRANK, 10.0)
        u, v = lambda_hazard(0.5).cdf(0.5), lambda_hazard(0.8).cdf(0.8)
        expected = np.log(1.0 - u - v + cop.cdf(u, v))
        assert log_subdensity_admin(obs, PARAMS, H, FRANK) == pytest.approx(float(expected), abs=1e-10)


class TestTotalLoglik:
    def _tiny(self):
        z = np.array([0.5, 1.0, 1.5])
        data = Dataset(z, [1, 0, 0], [0, 1, 0], np.array([[1.0], [0.5], [0.2]]),
                       np.array([[1.0], [0.5], [0.2]]))
        H = StepTransform.from_jumps([0.5, 1.0], [0.3, 0.2])
        return data, H

    def test_additivity(self):
        data, H = self._tiny()
        total = total_loglik(data, PARAMS, H, FRANK)
        pieces = (log_subdensity_event(data[0], PARAMS, H, FRANK)
                  + log_subdensity_depcens(data[1], PARAMS, H, FRANK)
                  + log_subdensity_admin(data[2], PARAMS, H, FRANK))
        assert total == pytest.approx(pieces, abs=1e-10)

    def test_order_invariance(self):
        data, H = self._tiny()
        perm = data.subset([2, 0, 1])
        assert total_loglik(perm, PARAMS, H, FRANK) == pytest.approx(
            total_loglik(data, PARAMS, H, FRANK), abs=1e-12)

    def test_brute_force_product(self, s1_model):
        data, _ = generate_dataset(s1_model, 20, np.random.default_rng(77))
        ev = np.unique(data.z[(data.delta + data.xi) == 1])
        H = StepTransform.from_jumps(ev, np.full(ev.size, 1.0 / 20))
        params = s1_model.params
        total = total_loglik(data, params, H, FRANK)
        prod = 1.0
        for o in data:
            if o.delta == 1:
                prod *= np.exp(log_subdensity_event(o, params, H, FRANK))
            elif o.xi == 1:
                prod *= np.exp(log_subdensity_depcens(o, params, H, FRANK))
            else:
                prod *= np.exp(log_subdensity_admin(o, params, H, FRANK))
        assert total == pytest.approx(np.log(prod), abs=1e-10)

    def test_missing_jump_raises(self):
        data, _ = self._tiny()
        H = StepTransform.from_jumps([0.5], [0.3])  # no jump at the xi=1 time
        with pytest.raises(InvalidStateError):
            total_loglik(data, PARAMS, H, FRANK)


class TestOmega:
    def test_independence_reduction(self):
        mt, mc = lambda_hazard(0.5), lambda_hazard(0.8)
        x1, x2 = 0.3, -0.4
        expected = mt.density(x1) * mc.survival(x2) + mc.density(x2) * mt.survival(x1)
        assert omega(x1, x2, PARAMS_INDEP, INDEP) == pytest.approx(expected, abs=1e-12)

    def test_derivative_identity_on_smooth_transform(self):
        # -d/dt S(H(t) - xb, H(t) - wb) = omega * h(t) for smooth H
        xb, wb = 0.7, 0.4
        h_fun = lambda t: yeo_johnson(0.5, t)
        eps = 1e-5
        for t in (-1.0, 0.3, 1.2, 2.5):
            s_hi = joint_survival(h_fun(t + eps) - xb, h_fun(t + eps) - wb, PARAMS, FRANK)
            s_lo = joint_survival(h_fun(t - eps) - xb, h_fun(t - eps) - wb, PARAMS, FRANK)
            lhs = -(s_hi - s_lo) / (2 * eps)
            hprime = (h_fun(t + eps) - h_fun(t - eps)) / (2 * eps)
            rhs = omega(h_fun(t) - xb, h_fun(t) - wb, PARAMS, FRANK) * hprime
            assert lhs == pytest.approx(rhs, abs=1e-5)

    def test_vanishes_in_upper_tail(self):
        assert omega(40.0, 40.0, PARAMS, FRANK) < 1e-12

    def test_nonnegative(self):
        rng = np.random.default_rng(13)
        x1 = rng.normal(0, 3, 300)
        x2 = rng.normal(0, 3, 300)
        om = omega(x1, x2, PARAMS, FRANK)
        assert np.all(np.asarray(om) >= 0.0)
        s = joint_survival(x1, x2, PARAMS, FRANK)
        assert np.all((np.asarray(s) >= 0) & (np.asarray(s) <= 1))


class TestPsi:
    def test_hazard_sum_under_independence(self):
        obs = one_obs(z=1.0, delta=0, xi=0)
        H = transform_with(1.0, 0.4)
        hz = H.eval(1.0)
        mt, mc = lambda_hazard(0.5), lambda_hazard(0.8)
        expected = (mt.density(hz - 0.5) / mt.survival(hz - 0.5)
                    + mc.density(hz - 0.2) / mc.survival(hz - 0.2))
        assert psi(obs, PARAMS_INDEP, H, INDEP) == pytest.approx(expected, abs=1e-10)

    def test_finite_difference_agreement(self):
        rng = np.random.default_rng(14)
        hz = rng.uniform(-3, 4, 100)
        xb = rng.normal(0.5, 1, 100)
        wb = rng.normal(0.3, 1, 100)
        zeta = rng.integers(0, 2, 100)
        vals = psi_array(hz, xb, wb, zeta, PARAMS, FRANK)
        h = 1e-6 * np.maximum(1.0, np.abs(hz))
        for i in range(100):
            def logf(m):
                om = omega(m - xb[i], m - wb[i], PARAMS, FRANK)
                sv = joint_survival(m - xb[i], m - wb[i], PARAMS, FRANK)
                return np.log(om if zeta[i] == 1 else sv)

            fd = -(logf(hz[i] + h[i]) - logf(hz[i] - h[i])) / (2 * h[i])
            assert vals[i] == pytest.approx(fd, abs=1e-5)

    def test_left_tail_limit_is_finite(self):
        # logistic margins: the event weight converges to a finite limit
        params = ModelParams(beta=(0.0,), eta=(0.0,), lambda_t=1.0, lambda_c=1.0, r=10.0)
        hz = -np.linspace(5, 40, 10)
        vals = psi_array(hz, np.zeros(10), np.zeros(10), np.ones(10, dtype=int), params, FRANK)
        assert np.all(np.isfinite(vals))
        assert np.abs(vals[-1] - vals[-2]) < 1e-3


class TestScore:
    def test_stationarity_at_optimum(self, s1_data, frank_spec, s1_fit):
        data, _ = s1_data
        grad = score(data, s1_fit.params, s1_fit.transform, frank_spec)
        assert np.max(np.abs(grad)) < 1e-4

    def test_hand_beta_gradient_single_event(self):
        obs = one_obs(z=1.0, delta=1, xi=0, x=0.7, w=0.3)
        admin = one_obs(z=0.5, delta=0, xi=0, x=0.1, w=0.9)
        dep = one_obs(z=0.8, delta=0, xi=1, x=0.2, w=0.2)
        data = Dataset.from_observations([obs, admin, dep])
        H = StepTransform.from_jumps([0.5, 0.8, 1.0], [0.2, 0.2, 0.2])
        grad = score(data, PARAMS, H, FRANK)

        # analytic derivative of the event term in beta
        from depcens._kernels import impl as K

        hz = H.eval(1.0)
        x1 = hz - 0.7 * 0.5
        x2 = hz - 0.3 * 0.2
        u, v = K.lh_cdf(x1, 0.5), K.lh_cdf(x2, 0.8)
        pu = K.cop_pu(0, 10.0, u, v)
        d2u = K.cop_d2u(0, 10.0, u, v)
        f1 = K.lh_pdf(x1, 0.5)
        g1 = K.lh_g(x1, 0.5)
        d_event = -0.7 * g1 + 0.7 * d2u * f1 / (1.0 - pu)

        def beta_part(b):
            params = ModelParams(beta=(b,), eta=(0.2,), lambda_t=0.5, lambda_c=0.8, r=10.0)
            return (log_subdensity_event(obs, params, H, FRANK)
                    + log_subdensity_admin(admin, params, H, FRANK)
                    + log_subdensity_depcens(dep, params, H, FRANK))

        fd = (beta_part(0.5 + 1e-6) - beta_part(0.5 - 1e-6)) / 2e-6
        assert grad[0] == pytest.approx(fd, abs=1e-5)
        # the event piece alone matches the hand derivation
        ev_fd = (log_subdensity_event(obs, ModelParams(beta=(0.5 + 1e-6,), eta=(0.2,),
                                                       lambda_t=0.5, lambda_c=0.8, r=10.0), H, FRANK)
                 - log_subdensity_event(obs, ModelParams(beta=(0.5 - 1e-6,), eta=(0.2,),
                                                         lambda_t=0.5, lambda_c=0.8, r=10.0), H, FRANK)) / 2e-6
        assert ev_fd == pytest.approx(float(d_event), abs=1e-5)

    def test_doubles_under_duplication(self, s1_model, frank_spec):
        data, _ = generate_dataset(s1_model, 40, np.random.default_rng(15))
        ev = np.unique(data.z[(data.delta + data.xi) == 1])
        H = StepTransform.from_jumps(ev, np.full(ev.size, 0.05))
        params = s1_model.params
        g1 = score(data, params, H, frank_spec)
        doubled = Dataset(np.concatenate([data.z, data.z]),
                          np.concatenate([data.delta, data.delta]),
                          np.concatenate([data.xi, data.xi]),
                          np.vstack([data.x, data.x]), np.vstack([data.w, data.w]))
        g2 = score(doubled, params, H, frank_spec)
        assert np.allclose(g2, 2.0 * g1, rtol=1e-6, atol=1e-6)


class TestSubdensityNormalization:
    def test_three_classes_integrate_to_one(self, s1_model, frank_spec):
        # restore the administrative factors and integrate the three
        # observed-data subdensities over time for one covariate profile
        params = s1_model.params
        x = np.array([1.0, 0.25])
        w = x
        xb = float(x @ params.beta)
        wb = float(w @ params.eta)
        lam_t, lam_c = params.lambda_t, params.lambda_c
        cop = CopulaModel(CopulaFamily.FRANK, params.r)
        mt, mc = lambda_hazard(lam_t), lambda_hazard(lam_c)
        h_fun = lambda t: yeo_johnson(0.5, t)
        a_lo, a_hi = 0.0, 3.0

        def surv_a(z):
            return np.clip((a_hi - z) / (a_hi - a_lo), 0.0, 1.0)

        eps = 1e-7

        def h_prime(z):
            return (h_fun(z + eps) - h_fun(z - eps)) / (2 * eps)

        def f_event(z):
            hz = h_fun(z)
            u, v = mt.cdf(hz - xb), mc.cdf(hz - wb)
            return mt.density(hz - xb) * (1 - cop.partial_u(u, v)) * surv_a(z) * h_prime(z)

        def f_dep(z):
            hz = h_fun(z)
            u, v = mt.cdf(hz - xb), mc.cdf(hz - wb)
            return mc.density(hz - wb) * (1 - cop.partial_v(u, v)) * surv_a(z) * h_prime(z)

        def f_admin(z):
            hz = h_fun(z)
            u, v = mt.cdf(hz - xb), mc.cdf(hz - wb)
            return (1 - u - v + cop.cdf(u, v)) / (a_hi - a_lo)

        p1, _ = quad(f_event, -60, a_hi, limit=400)
        p2, _ = quad(f_dep, -60, a_hi, limit=400)
        p3, _ = quad(f_admin, a_lo, a_hi, limit=400)
        assert p1 + p2 + p3 == pytest.approx(1.0, abs=1e-3)
