import math

import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from spde_moments import model as md
from spde_moments import specialfn as sf
from spde_moments.errors import DalangViolated, InvalidParams
from spde_moments.model import KernelSign, ModelParams


def rel(a, b):
    return abs(a - b) / max(abs(a), abs(b), 1e-300)


SHE = ModelParams(alpha=2, beta=1, gamma=0, lam=1, nu=1, dim=1)
SWE = ModelParams(alpha=2, beta=2, gamma=0, lam=1, nu=1, dim=1)


def sfhe_theta_closed(alpha, nu):
    return sf.gamma(1.0 + 1.0 / alpha) / (nu ** (1.0 / alpha) * math.pi)


def sfwe_theta_closed(alpha, nu):
    return (
        2.0 ** (2.0 - 1.0 / alpha)
        * math.cos(math.pi / alpha)
        * sf.gamma(2.0 * (1.0 / alpha - 1.0))
        / (nu ** (1.0 / alpha) * math.pi * alpha)
    )


class TestParams:
    def test_validation(self):
        with pytest.raises(InvalidParams):
            ModelParams(alpha=0, beta=1)
        with pytest.raises(InvalidParams):
            ModelParams(alpha=2, beta=2.5)
        with pytest.raises(InvalidParams):
            ModelParams(alpha=2, beta=1, lam=0)
        with pytest.raises(InvalidParams):
            ModelParams(alpha=2, beta=1, dim=0)
        with pytest.raises(InvalidParams):
            ModelParams(alpha=2, beta=1, gamma=-0.1)

    def test_kv_roundtrip(self):
        p = ModelParams(alpha=2.5, beta=1.3, gamma=0.2, lam=-1.5, nu=3.0, dim=2, u0=0.5, u1=2.0)
        assert md.params_from_kv(md.params_to_kv(p)) == p

    def test_kv_defaults_and_errors(self):
        p = md.params_from_kv("alpha=2\nbeta=1\n# comment\n\n")
        assert p == ModelParams(alpha=2, beta=1)
        with pytest.raises(InvalidParams):
            md.params_from_kv("alpha=2")
        with pytest.raises(InvalidParams):
            md.params_from_kv("alpha=2\nbeta=1\nbogus=3")
        with pytest.raises(InvalidParams):
            md.params_from_kv("alpha 2\nbeta=1")


class TestDalang:
    def test_examples(self):
        assert md.dalang_satisfied(SHE)
        assert not md.dalang_satisfied(ModelParams(2, 1, 0, 1, 1, 2))
        assert md.dalang_satisfied(SWE)
        assert not md.dalang_satisfied(ModelParams(2, 2, 0, 1, 1, 2))
        assert not md.dalang_satisfied(ModelParams(2, 0.6, 0, 1, 1, 1))
        assert md.dalang_satisfied(ModelParams(2, 0.7, 0, 1, 1, 1))

    @given(
        st.floats(min_value=0.2, max_value=5.0),
        st.floats(min_value=0.05, max_value=2.0),
        st.floats(min_value=0.0, max_value=2.0),
        st.integers(min_value=1, max_value=5),
        st.floats(min_value=0.05, max_value=2.0),
    )
    def test_monotone(self, alpha, beta, gamma, dim, bump):
        p = ModelParams(alpha=alpha, beta=beta, gamma=gamma, dim=dim)
        if md.dalang_satisfied(p):
            assert md.dalang_satisfied(ModelParams(alpha=alpha + bump, beta=beta, gamma=gamma, dim=dim))
            assert md.dalang_satisfied(ModelParams(alpha=alpha, beta=beta, gamma=gamma + bump, dim=dim))
        else:
            assert not md.dalang_satisfied(ModelParams(alpha=alpha, beta=beta, gamma=gamma, dim=dim + 1))

    @given(
        st.floats(min_value=0.3, max_value=4.0),
        st.floats(min_value=0.1, max_value=2.0),
        st.floats(min_value=0.0, max_value=1.5),
        st.integers(min_value=1, max_value=4),
    )
    def test_dalang_implies_theta_finite(self, alpha, beta, gamma, dim):
        p = ModelParams(alpha=alpha, beta=beta, gamma=gamma, dim=dim)
        assume(md.dalang_satisfied(p))
        assert md.theta(p) > -1.0
        assert md.theta_integral_finite(p)


class TestTheta:
    def test_examples(self):
        assert md.theta(SHE) == -0.5
        assert md.theta(SWE) == 1.0
        assert rel(md.theta(ModelParams(3, 2, 0, 1, 1, 1)), 4.0 / 3.0) < 1e-15


class TestKernelFt:
    def test_zero_frequency(self):
        assert md.kernel_ft(SHE, 1.0, 0.0) == 1.0

    @given(st.floats(min_value=0.05, max_value=3.0), st.floats(min_value=0.0, max_value=4.0))
    def test_she_gaussian(self, t, r):
        assert rel(md.kernel_ft(SHE, t, r), math.exp(-t * r * r / 2.0)) < 1e-9

    @given(st.floats(min_value=0.1, max_value=2.0), st.floats(min_value=0.01, max_value=6.0))
    def test_swe_sinc(self, t, r):
        p = ModelParams(2, 2, 0, 1, 2, 1)
        assert abs(md.kernel_ft(p, t, r) - math.sin(t * r) / r) < 1e-9

    @given(
        st.floats(min_value=0.5, max_value=3.0),
        st.floats(min_value=0.3, max_value=2.0),
        st.floats(min_value=0.0, max_value=1.0),
        st.floats(min_value=0.2, max_value=2.0),
    )
    def test_zero_frequency_formula(self, alpha, beta, gamma, t):
        p = ModelParams(alpha=alpha, beta=beta, gamma=gamma)
        want = t ** (beta + gamma - 1.0) * sf.rgamma(beta + gamma)
        assert rel(md.kernel_ft(p, t, 0.0), want) < 1e-12


class TestBigTheta:
    def test_she_closed(self):
        for nu in (1.0, 2.5):
            p = ModelParams(2, 1, 0, 1, nu, 1)
            assert rel(md.big_theta(p), 1.0 / math.sqrt(4 * math.pi * nu)) < 1e-6

    def test_swe_closed(self):
        for nu in (1.0, 2.5):
            p = ModelParams(2, 2, 0, 1, nu, 1)
            assert rel(md.big_theta(p), 1.0 / math.sqrt(2 * nu)) < 1e-6

    @pytest.mark.parametrize("alpha", [1.5, 2.0, 3.0, 5.0])
    def test_sfhe_closed(self, alpha):
        for nu in (1.0, 2.5):
            p = ModelParams(alpha, 1, 0, 1, nu, 1)
            assert rel(md.big_theta(p), sfhe_theta_closed(alpha, nu)) < 1e-6

    @pytest.mark.parametrize("alpha", [1.5, 3.0])
    def test_sfwe_closed(self, alpha):
        # the alpha = 2 slice is the wave case tested above
        p = ModelParams(alpha, 2, 0, 1, 1, 1)
        assert rel(md.big_theta(p), sfwe_theta_closed(alpha, 1.0)) < 1e-6

    def test_figure_datum(self):
        p = ModelParams(2, 0.5, 0, 1, 1, 1)
        assert abs(md.big_theta(p) - 0.0715941) < 1e-3

    @pytest.mark.parametrize(
        "beta,want",
        [
            (0.3, 0.02415095662966464),
            (0.7, 0.14338982583729987),
            (1.2, 0.38124926527388403),
        ],
    )
    def test_reference_sweep_curve(self, beta, want):
        # frozen reference values for the alpha=2, gamma=0, nu=1 sweep
        got = md.big_theta(ModelParams(2.0, beta, 0.0, 1, 1, 1))
        assert rel(got, want) < 1e-7

    @pytest.mark.parametrize(
        "beta,want",
        [
            (0.301, 0.22940119844876455),
            (1.301, 0.3374966151223352),
        ],
    )
    def test_reference_sweep_curve_smoothed(self, beta, want):
        # alpha=2, gamma = ceil(beta)-beta, nu=2 family
        gam = math.ceil(beta) - beta
        got = md.big_theta(ModelParams(2.0, beta, gam, 1, 2.0, 1))
        assert rel(got, want) < 1e-7

    def test_oscillatory_route_matches_closed_form(self):
        # beta=2 general machinery against the sine-integral closed form
        for alpha in (1.5, 2.0, 3.0):
            jw = md._radial_j_wave(alpha, 0.0, 1)
            jc = sf.sin_power_integral(alpha, 1.0)
            assert rel(jw, jc) < 1e-8

    def test_wave_gamma_positive(self):
        # beta = 2 with smoothing; value cross-checked by brute period sums
        p = ModelParams(2, 2, 0.5, 1, 2, 1)
        assert rel(md.big_theta(p), 1.0 / math.pi) < 1e-7

    def test_divergent_raises(self):
        with pytest.raises(DalangViolated):
            md.big_theta(ModelParams(alpha=0.2, beta=1, gamma=1.0, dim=1))

    def test_outside_dalang_but_integrable(self):
        # theta <= -1 here, yet the spectral integral converges
        p = ModelParams(2, 0.5, 0, 1, 1, 1)
        assert not md.dalang_satisfied(p)
        assert md.theta_integral_finite(p)
        assert md.big_theta(p) > 0

    def test_memoized_deterministic(self):
        p = ModelParams(2, 1.3, 0, 1, 1, 1)
        assert md.big_theta(p) == md.big_theta(p)


class TestDerived:
    def test_constants_she(self):
        dc = md.derived_constants(SHE)
        assert dc.theta == -0.5
        assert rel(dc.lyapunov_base, math.sqrt(math.pi) / math.sqrt(4 * math.pi)) < 1e-9

    def test_dalang_gate(self):
        with pytest.raises(DalangViolated):
            md.derived_constants(ModelParams(2, 0.5, 0, 1, 1, 1))
        with pytest.raises(DalangViolated):
            md.t_p(ModelParams(2, 0.5, 0, 1, 1, 1), 1.0, 2.0)

    @given(st.floats(min_value=0.05, max_value=10.0), st.floats(min_value=0.3, max_value=4.0))
    def test_t_hat_she(self, t, nu):
        p = ModelParams(2, 1, 0, 1, nu, 1)
        assert rel(md.t_hat(p, t), math.sqrt(t) / math.sqrt(4 * nu)) < 1e-8

    @given(st.floats(min_value=0.05, max_value=10.0), st.floats(min_value=2.0, max_value=20.0))
    def test_t_p_powers(self, t, pp):
        assert rel(md.t_p(SHE, t, pp), pp**3 * t) < 1e-12
        assert rel(md.t_p(SWE, t, pp), pp**1.5 * t) < 1e-12

    def test_t_p_collapses_at_one(self):
        assert rel(md.t_p(SHE, 0.7, 1.0), 0.7) < 1e-15


class TestL2NormKernel:
    def test_she_value(self):
        assert rel(md.l2_norm_kernel(SHE, 1.0), 1.0 / math.sqrt(4 * math.pi)) < 1e-8

    @given(st.floats(min_value=0.05, max_value=5.0))
    def test_power_scaling(self, s):
        th = md.theta(SHE)
        assert rel(md.l2_norm_kernel(SHE, 2 * s) / md.l2_norm_kernel(SHE, s), 2.0**th) < 1e-10

    def test_swe_linear(self):
        p = ModelParams(2, 2, 0, 1, 2, 1)
        for s in (0.3, 1.0, 2.5):
            assert rel(md.l2_norm_kernel(p, s), s / 2.0) < 1e-8

    @pytest.mark.parametrize(
        "p,s",
        [
            (SHE, 1.0),
            (ModelParams(2, 1.3, 0, 1, 1, 1), 0.7),
            (ModelParams(1.5, 0.8, 0.2, 1, 1, 1), 1.4),
        ],
    )
    def test_quadrature_cross_check(self, p, s):
        assert rel(md.l2_norm_kernel(p, s), md._l2_norm_kernel_quad(p, s)) < 1e-7

    def test_constant_ratio_over_decades(self):
        p = ModelParams(3, 1.3, 0, 1, 1, 1)
        th = md.theta(p)
        base = md.l2_norm_kernel(p, 1.0)
        for s in (0.01, 0.1, 1.0, 10.0):
            assert rel(md.l2_norm_kernel(p, s) / s**th, base) < 1e-9


class TestJ0:
    def test_examples(self):
        assert md.j0(ModelParams(2, 1, 0, 1, 1, 1, u0=5.0), 7.0) == 5.0
        assert md.j0(ModelParams(2, 2, 0, 1, 1, 1, u0=1.0, u1=2.0), 3.0) == 7.0
        assert md.j0(ModelParams(2, 1, 0, 1, 1, 1, u0=4.0), 0.0) == 4.0
        assert md.j0(ModelParams(2, 2, 0, 1, 1, 1, u0=4.0, u1=9.0), 0.0) == 4.0


class TestNonnegLookup:
    def test_examples(self):
        assert md.kernel_nonneg_known(ModelParams(2, 1, 0, 1, 1, 3)) is KernelSign.NONNEGATIVE
        assert md.kernel_nonneg_known(ModelParams(2, 2, 0, 1, 1, 1)) is KernelSign.NONNEGATIVE
        assert md.kernel_nonneg_known(ModelParams(3, 2, 0, 1, 1, 1)) is KernelSign.UNKNOWN

    def test_smoothing_cases(self):
        # 1 < beta < alpha <= 2 with gamma > 0, low dimension
        assert md.kernel_nonneg_known(ModelParams(2, 1.5, 0.3, 1, 1, 2)) is KernelSign.NONNEGATIVE
        # beta = alpha in (1,2) needs enough smoothing
        assert md.kernel_nonneg_known(ModelParams(1.5, 1.5, 1.1, 1, 1, 1)) is KernelSign.NONNEGATIVE
        assert md.kernel_nonneg_known(ModelParams(1.5, 1.5, 0.2, 1, 1, 1)) is KernelSign.UNKNOWN
