import cmath
import math

import mpmath
import numpy as np
import pytest
from hypothesis import assume, given
from hypothesis import strategies as st
from scipy import integrate, special

from rffso.errors import (
    ContourError,
    DerivativeOrderError,
    GammaPoleError,
    OverflowSignal,
    ParameterError,
)
from rffso.specfun import (
    ContourConfig,
    GammaFactor,
    MeijerGSpec,
    MellinBarnes,
    bessel_i0_series_coeffs,
    bessel_k,
    i0_series,
    log_gamma_complex,
    log_meijer_g,
    meijer_g,
    meijer_g_param_deriv,
    polygamma,
    polygamma_complex,
)
from rffso.specfun.gamma import polygamma_orders

# Lanczos approximation (g = 7, 9 terms), an oracle independent of scipy
_LANCZOS = [
    0.99999999999980993, 676.5203681218851, -1259.1392167224028,
    771.32342877765313, -176.61502916214059, 12.507343278686905,
    -0.13857109526572012, 9.9843695780195716e-6, 1.5056327351493116e-7,
]


def lanczos_log_gamma(z):
    if z.real < 0.5:
        return cmath.log(math.pi / cmath.sin(math.pi * z)) - lanczos_log_gamma(1 - z)
    z -= 1
    x = _LANCZOS[0] + sum(c / (z + i) for i, c in enumerate(_LANCZOS[1:], start=1))
    t = z + 7.5
    return 0.5 * math.log(2 * math.pi) + (z + 0.5) * cmath.log(t) - t + cmath.log(x)


class TestGamma:
    def test_log_gamma_matches_lanczos(self):
        z = 3 + 4j
        assert abs(log_gamma_complex(z) - lanczos_log_gamma(z)) < 1e-12

    @pytest.mark.parametrize("z", [0.5, 1.0, 7.25, 0.3 + 2j, -2.5 + 0.1j, 20 - 15j])
    def test_log_gamma_matches_mpmath(self, z):
        ref = complex(mpmath.loggamma(z))
        assert abs(log_gamma_complex(z) - ref) < 1e-12 * max(1, abs(ref))

    def test_pole_raises(self):
        with pytest.raises(GammaPoleError):
            log_gamma_complex(-2.0)
        with pytest.raises(GammaPoleError):
            polygamma_complex(1, 0.0)

    @given(
        st.floats(-6, 6).filter(lambda x: abs(x - round(x)) > 1e-3),
        st.floats(-3, 3),
    )
    def test_reflection(self, x, y):
        z = complex(x, y)
        lhs = cmath.exp(log_gamma_complex(z) + log_gamma_complex(1 - z))
        rhs = math.pi / cmath.sin(math.pi * z)
        assert abs(lhs - rhs) <= 1e-10 * abs(rhs)

    def test_digamma_constants(self):
        assert polygamma(0, 1.0) == pytest.approx(-np.euler_gamma, rel=1e-14)
        assert polygamma(1, 1.0) == pytest.approx(math.pi**2 / 6, rel=1e-14)

    @pytest.mark.parametrize("k", [0, 1, 3, 7, 12])
    @pytest.mark.parametrize("z", [0.2 + 0.1j, 2.5 - 3j, -4.3 + 0.5j, 45 + 1j])
    def test_polygamma_matches_mpmath(self, k, z):
        ref = complex(mpmath.polygamma(k, z))
        assert abs(polygamma_complex(k, z) - ref) <= 1e-11 * abs(ref)

    @given(st.integers(0, 8), st.floats(0.05, 40))
    def test_polygamma_recurrence(self, k, x):
        lhs = polygamma(k, x + 1) - polygamma(k, x)
        rhs = (-1) ** k * math.factorial(k) / x ** (k + 1)
        assert lhs == pytest.approx(rhs, rel=1e-9, abs=1e-12)

    def test_polygamma_order_cap(self):
        with pytest.raises(ParameterError):
            polygamma_complex(17, 1.0)


class TestBessel:
    def test_k0_matches_integral_representation(self):
        ref = integrate.quad(lambda t: math.exp(-math.cosh(t)), 0, 8.0, epsabs=0, epsrel=1e-13)[0]
        assert bessel_k(0, 1.0) == pytest.approx(ref, rel=1e-12)
        assert ref == pytest.approx(0.42102443824070834, rel=1e-12)

    def test_domain_and_overflow(self):
        with pytest.raises(ParameterError):
            bessel_k(1.0, 0.0)
        with pytest.raises(OverflowSignal):
            bessel_k(200.0, 1e-3)

    def test_series_coefficients_explicit(self):
        n, m = 10, 3
        expected = (-1) ** (m + 1) * math.factorial(n + m - 1) * n ** (1 - 2 * m) / (
            math.factorial(m) * math.factorial(n - m) * math.factorial(m)
        )
        assert bessel_i0_series_coeffs(n, m) == pytest.approx(expected, rel=1e-13)

    def test_series_coefficients_index_bound(self):
        with pytest.raises(IndexError):
            bessel_i0_series_coeffs(5, 6)

    @pytest.mark.parametrize("x", [0.1, 0.5, 1.0, 2.0])
    def test_series_approaches_i0(self, x):
        assert i0_series(x, 200) == pytest.approx(special.i0(x), rel=1e-3)
        err10 = abs(i0_series(x, 10) / special.i0(x) - 1)
        err40 = abs(i0_series(x, 40) / special.i0(x) - 1)
        assert err40 < err10 or err10 < 1e-14


EXP = MeijerGSpec(1, 0, (), (0.0,))


class TestMeijer:
    @pytest.mark.parametrize("z", np.logspace(-3, 2, 11))
    def test_exponential(self, z):
        assert meijer_g(EXP, z) == pytest.approx(math.exp(-z), rel=1e-10)

    def test_exponential_log_form_at_large_argument(self):
        lg, sign = log_meijer_g(EXP, 1e3)
        assert sign == 1.0 and lg == pytest.approx(-1e3, rel=1e-12)

    def test_double_pole_k0(self):
        spec = MeijerGSpec(2, 0, (), (0.0, 0.0))
        ref = integrate.quad(lambda t: math.exp(-math.cosh(t)), 0, 8.0, epsabs=0, epsrel=1e-13)[0]
        assert meijer_g(spec, 0.25) == pytest.approx(2 * ref, rel=1e-10)

    @given(st.floats(-1.5, 1.5), st.floats(-2, 2))
    def test_power_times_exponential(self, b, logz):
        z = 10.0**logz
        spec = MeijerGSpec(1, 0, (), (b,))
        assert meijer_g(spec, z) == pytest.approx(z**b * math.exp(-z), rel=1e-9)

    @given(st.floats(-1, 1.5), st.floats(-1, 1.5), st.floats(-2, 2))
    def test_rational_family(self, a, b, logz):
        assume(1 - a + b > 0.05)
        z = 10.0**logz
        spec = MeijerGSpec(1, 1, (a,), (b,))
        ref = math.gamma(1 - a + b) * z**b * (1 + z) ** (a - b - 1)
        assert meijer_g(spec, z) == pytest.approx(ref, rel=1e-9)

    def test_self_convergence(self):
        spec = MeijerGSpec(2, 1, (0.3,), (0.8, 1.6, 0.1))
        z = 2.7
        base = meijer_g(spec, z)
        info = spec.integrand().integrate(z, return_info=True)[1]
        fine = meijer_g(spec, z, ContourConfig(node_count=256, truncation_height=2 * info["height"]))
        assert fine == pytest.approx(base, rel=1e-12)

    def test_midpoint_strategy_agrees(self):
        spec = MeijerGSpec(2, 0, (), (0.375, -0.375))
        ref = 2 * special.kv(0.75, 2 * math.sqrt(3.0))
        val = meijer_g(spec, 3.0, ContourConfig(shift_strategy="midpoint"))
        assert val == pytest.approx(ref, rel=1e-10)

    def test_param_derivative_closed_form(self):
        z = 2.0
        d1 = meijer_g_param_deriv(EXP, ("b", 0), 1, z)
        d2 = meijer_g_param_deriv(EXP, ("b", 0), 2, z)
        assert d1 == pytest.approx(math.log(z) * math.exp(-z), rel=1e-10)
        assert d2 == pytest.approx(math.log(z) ** 2 * math.exp(-z), rel=1e-9)

    @pytest.mark.parametrize("which", [("b", 0), ("b", 1), ("a", 0)])
    def test_param_derivative_matches_mpmath(self, which):
        a, b = [0.2], [1.1, 0.4]
        z = 0.8

        def g(x):
            aa, bb = list(a), list(b)
            (aa if which[0] == "a" else bb)[which[1]] = x
            return mpmath.meijerg([aa, []], [[bb[0]], [bb[1]]], z)

        x0 = (a if which[0] == "a" else b)[which[1]]
        spec = MeijerGSpec(1, 1, tuple(a), tuple(b))
        with mpmath.workdps(30):
            d1, d2 = (float(mpmath.diff(g, x0, k)) for k in (1, 2))
        assert meijer_g_param_deriv(spec, which, 1, z) == pytest.approx(d1, rel=1e-9)
        assert meijer_g_param_deriv(spec, which, 2, z) == pytest.approx(d2, rel=1e-9)

    @staticmethod
    def _five_point(g, h, order):
        f = [g(k * h) for k in (-2, -1, 1, 2)]
        if order == 1:
            return (f[0] - 8 * f[1] + 8 * f[2] - f[3]) / (12 * h)
        return (-f[0] + 16 * f[1] - 30 * g(0.0) + 16 * f[2] - f[3]) / (12 * h * h)

    @pytest.mark.parametrize("order", [1, 2])
    def test_param_derivative_finite_difference(self, order):
        spec = MeijerGSpec(2, 0, (), (0.5, -0.25))
        g = lambda x: meijer_g(MeijerGSpec(2, 0, (), (0.5 + x, -0.25)), 1.3)
        fd = self._five_point(g, 1e-3, order)
        assert meijer_g_param_deriv(spec, ("b", 0), order, 1.3) == pytest.approx(fd, rel=1e-5)

    @pytest.mark.parametrize("order", [1, 2])
    def test_series_kernel_derivative_finite_difference(self, order):
        # the composite FSO kernel moves two parameters together with q
        from dataclasses import replace

        from rffso.channels import FsoLinkParams, fso_series
        from rffso.presets import BASE_POINTING, BASE_TURBULENCE

        sr = fso_series(FsoLinkParams(BASE_TURBULENCE, BASE_POINTING))
        z = 0.7
        da, db = sr.pdf_sensitivity()
        weights = [0.0] * order + [1.0]
        mant, ls, _ = sr.pdf_spec().integrand(da, db).integrate_scaled(z, weights=weights)
        g = lambda dq: meijer_g(replace(sr, q=sr.q + dq).pdf_spec(), z)
        assert mant * math.exp(ls) == pytest.approx(self._five_point(g, 1e-3, order), rel=1e-5)

    def test_derivative_order_cap(self):
        with pytest.raises(DerivativeOrderError):
            meijer_g_param_deriv(EXP, ("b", 0), 15, 1.0)

    def test_pole_collision_raises(self):
        with pytest.raises(ContourError):
            meijer_g(MeijerGSpec(1, 1, (1.0,), (0.0,)), 1.0)

    def test_nonpositive_argument_raises(self):
        with pytest.raises(ParameterError):
            meijer_g(EXP, 0.0)

    def test_index_validation(self):
        with pytest.raises(ParameterError):
            MeijerGSpec(2, 0, (), (0.0,))

    def test_residue_leading_terms(self):
        assert EXP.integrand().residue_expansion(1e-8, "right") == pytest.approx(1.0, rel=1e-6)
        rat = MeijerGSpec(1, 1, (1.0,), (1.0,)).integrand()
        assert rat.residue_expansion(1e8, "left") == pytest.approx(1.0, rel=1e-12)

    def test_fox_slope_factor(self):
        # Gamma(2 s') kernel: int Gamma(-2s) z^s ds / 2 pi i = exp(-sqrt z) / 2
        mb = MellinBarnes((GammaFactor(0.0, -2.0),))
        z = 1.7
        assert mb.integrate(z) == pytest.approx(0.5 * math.exp(-math.sqrt(z)), rel=1e-10)

    def test_debug_dump(self, tmp_path):
        path = tmp_path / "line.csv"
        meijer_g(EXP, 1.0, ContourConfig(dump_path=str(path)))
        lines = path.read_text().splitlines()
        assert lines[0] == "t,re,im" and len(lines) > 64

    def test_config_validation(self):
        with pytest.raises(ParameterError):
            ContourConfig(node_count=16)
        with pytest.raises(ParameterError):
            ContourConfig(shift_strategy="zigzag")


class TestWorkedValues:
    def test_log_gamma_values(self):
        assert log_gamma_complex(1.0) == pytest.approx(0.0, abs=1e-15)
        assert log_gamma_complex(0.5).real == pytest.approx(0.5723649429247001, rel=1e-14)

    def test_digamma_is_log_gamma_slope(self):
        h = 1e-5
        fd = (log_gamma_complex(10 + h) - log_gamma_complex(10 - h)).real / (2 * h)
        assert polygamma(0, 10.0) == pytest.approx(fd, rel=1e-8)

    def test_half_order_bessel(self):
        assert bessel_k(0.5, 1.0) == pytest.approx(0.4610685044478946, rel=1e-13)

    def test_bessel_meijer_consistency(self):
        g = meijer_g(MeijerGSpec(2, 0, (), (0.375, -0.375)), 0.3)
        assert bessel_k(0.75, 2 * math.sqrt(0.3)) == pytest.approx(g / 2, rel=1e-9)

    def test_series_coefficient_values(self):
        assert bessel_i0_series_coeffs(4, 0) == -1.0
        assert bessel_i0_series_coeffs(1, 1) == 1.0

    @pytest.mark.parametrize(
        "spec, z, ref",
        [
            (MeijerGSpec(1, 0, (), (0.0,)), 1.0, 0.36787944117144233),
            (MeijerGSpec(2, 0, (), (0.5, -0.5)), 0.25, 2 * 0.6019072301972346),
            (MeijerGSpec(1, 1, (1.0,), (1.0,)), 3.0, 0.75),
        ],
    )
    def test_reference_values(self, spec, z, ref):
        assert meijer_g(spec, z) == pytest.approx(ref, rel=1e-10)
        assert meijer_g_param_deriv(spec, ("b", 0), 0, z) == pytest.approx(ref, rel=1e-10)

    def test_first_derivative_of_power_exponential(self):
        d = meijer_g_param_deriv(EXP, ("b", 0), 1, 2.0)
        assert d == pytest.approx(0.09380727000573966, rel=1e-10)


@given(st.integers(0, 12), st.floats(-8, 40), st.floats(-20, 20))
def test_batched_polygamma_matches_single(kmax, x, y):
    z = complex(x, y)
    assume(min(abs(z + j) for j in range(10)) > 0.05)
    batch = polygamma_orders(kmax, z)
    for k in range(kmax + 1):
        ref = polygamma_complex(k, z)
        assert abs(batch[k] - ref) <= 1e-12 * abs(ref) + 1e-300
