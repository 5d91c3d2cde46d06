"""Kernel catalog: primitives, moments, transforms, and diagnostics."""

import math

import numpy as np
import pytest
from scipy import integrate

from memdiff.errors import DomainError, NotEventuallyPositiveError
from memdiff.kernels import (
    Cosine,
    Exponential,
    Heat,
    LogModified,
    NegExponential,
    PowerLaw,
    SampledKernel,
    Wave,
    check_positive_definite,
    dilate,
    fractional,
    laplace_a,
    primitive_A,
    quad_moments,
    rv_index_estimate,
    scale,
)

CATALOG = [
    Heat(a0=1.0),
    Wave(c=1.0),
    PowerLaw(beta=0.5, c=1.0),
    fractional(-0.5),
    Exponential(mu=1.0, c=1.0),
    NegExponential(),
    Cosine(),
    LogModified(m=1.0),
]

RV_GRID = np.geomspace(1e-2, 1e5, 72)


@pytest.mark.parametrize("kernel", CATALOG, ids=lambda k: k.description)
def test_primitive_matches_quadrature_of_a(kernel):
    # A(t) - a0 = int_0^t a, checked by adaptive quadrature.  The
    # power-law with beta < 0 is excluded: a is not locally integrable.
    if isinstance(kernel, PowerLaw) and kernel.beta < 0:
        pytest.skip("a is not locally integrable")
    for t in (0.3, 1.0, 4.0):
        ref, _ = integrate.quad(lambda s: float(kernel.a(s)), 0.0, t, limit=200)
        assert abs(primitive_A(kernel, t) - kernel.a0 - ref) < 1e-9 * max(1.0, abs(ref))


@pytest.mark.parametrize("kernel", CATALOG, ids=lambda k: k.description)
def test_moments_match_quadrature_of_primitive(kernel):
    # The closed-form cell moments equal int A and int s A(s) ds.
    for t0, t1 in ((0.0, 0.5), (0.5, 1.5), (2.0, 2.25)):
        m0, m1 = quad_moments(kernel, t0, t1)
        r0, _ = integrate.quad(lambda s: float(kernel.primitive(s)), t0, t1, limit=200)
        r1, _ = integrate.quad(lambda s: s * float(kernel.primitive(s)), t0, t1, limit=200)
        assert abs(m0 - r0) < 1e-8 * max(1.0, abs(r0))
        assert abs(m1 - r1) < 1e-8 * max(1.0, abs(r1))


@pytest.mark.parametrize("kernel", CATALOG, ids=lambda k: k.description)
def test_moment_cells_agree_with_quad_moments(kernel):
    dt = 0.125
    m0, m1 = kernel.moment_cells(dt, 8)
    for r in range(8):
        q0, q1 = quad_moments(kernel, r * dt, (r + 1) * dt)
        assert abs(m0[r] - q0) < 1e-12 * max(1.0, abs(q0))
        assert abs(m1[r] - q1) < 1e-12 * max(1.0, abs(q1))


def test_laplace_closed_forms_against_quadrature():
    s = 0.7 + 0.9j
    for kernel in (Exponential(mu=2.0, c=3.0), Cosine(), NegExponential(),
                   Wave(c=1.5), PowerLaw(beta=0.5, c=1.0)):
        val = laplace_a(kernel, s)
        re, _ = integrate.quad(
            lambda t: float(kernel.a(t)) * math.exp(-s.real * t) * math.cos(s.imag * t),
            0.0, 200.0, limit=800,
        )
        im, _ = integrate.quad(
            lambda t: -float(kernel.a(t)) * math.exp(-s.real * t) * math.sin(s.imag * t),
            0.0, 200.0, limit=800,
        )
        assert abs(val - (re + 1j * im)) < 1e-6


def test_powerlaw_sign_constraints():
    with pytest.raises(DomainError):
        PowerLaw(beta=0.5, c=-1.0)
    with pytest.raises(DomainError):
        PowerLaw(beta=-0.5, c=1.0)
    with pytest.raises(DomainError):
        PowerLaw(beta=1.5, c=1.0)
    with pytest.raises(DomainError):
        PowerLaw(beta=0.5, c=0.0)


def test_fractional_normalization():
    # A(t) = t^beta / Gamma(1+beta) for both signs of beta.
    from memdiff.specfun import gamma

    for beta in (-0.75, -0.5, 0.25, 0.5, 0.75):
        k = fractional(beta)
        for t in (0.5, 1.0, 3.0):
            assert abs(primitive_A(k, t) - t**beta / gamma(1.0 + beta)) < 1e-13


def test_sum_kernel_adds_everything():
    k = Exponential(mu=1.0, c=1.0, a0=0.5) + Wave(c=2.0)
    t = np.array([0.5, 1.0, 2.0])
    assert np.allclose(k.primitive(t),
                       Exponential(mu=1.0, c=1.0, a0=0.5).primitive(t) + Wave(c=2.0).primitive(t))
    assert k.a0 == 0.5
    assert k.total_mass() == math.inf


def test_scale_stays_in_family():
    k = scale(Exponential(mu=2.0, c=3.0, a0=1.0), 2.0)
    assert isinstance(k, Exponential)
    assert k.c == 6.0 and k.a0 == 2.0 and k.mu == 2.0
    assert isinstance(scale(Heat(1.0), 3.0), Heat)
    with pytest.raises(DomainError):
        scale(Heat(1.0), 0.0)


@pytest.mark.parametrize(
    "kernel",
    [Wave(c=1.5, a0=0.25), PowerLaw(beta=0.5, c=2.0), fractional(-0.5),
     Exponential(mu=1.0, c=1.0), Cosine(), LogModified(m=1.0)],
    ids=lambda k: k.description,
)
def test_dilation_matches_base_kernel(kernel):
    # A_T(t) = A(T t) and the moments transform by substitution.
    T = 7.5
    kd = dilate(kernel, T)
    t = np.array([0.1, 0.7, 1.3])
    assert np.allclose(kd.primitive(t), kernel.primitive(T * t), rtol=1e-12)
    assert np.allclose(kd.integral_A(t), kernel.integral_A(T * t) / T, rtol=1e-10)
    assert np.allclose(kd.integral_tA(t), kernel.integral_tA(T * t) / T**2, rtol=1e-10)


def test_dilation_composes():
    k = dilate(dilate(LogModified(m=1.0), 2.0), 3.0)
    ref = dilate(LogModified(m=1.0), 6.0)
    t = np.array([0.2, 1.0])
    assert np.allclose(k.primitive(t), ref.primitive(t))


def test_sampled_kernel_reproduces_linear_primitive():
    # For an affine A the piecewise-linear interpolant is exact, so all
    # moments must match the Wave kernel's closed forms.
    wave = Wave(c=2.0, a0=0.5)
    dt = 0.1
    nodes = dt * np.arange(51)
    sk = SampledKernel(dt, wave.primitive(nodes))
    t = np.array([0.05, 0.1, 1.234, 4.999])
    assert np.allclose(sk.primitive(t), wave.primitive(t), rtol=1e-12)
    assert np.allclose(sk.integral_A(t), wave.integral_A(t), rtol=1e-12)
    assert np.allclose(sk.integral_tA(t), wave.integral_tA(t), rtol=1e-10)


def test_sampled_kernel_convergence_to_smooth_moments():
    kernel = Exponential(mu=1.0, c=1.0)
    errs = []
    for n in (50, 100, 200):
        dt = 2.0 / n
        sk = SampledKernel(dt, kernel.primitive(dt * np.arange(n + 1)))
        m0, _ = sk.quad_moments(0.0, 2.0)
        r0, _ = kernel.quad_moments(0.0, 2.0)
        errs.append(abs(m0 - r0))
    order = math.log2(errs[0] / errs[2]) / 2.0
    assert order > 1.8


@pytest.mark.parametrize(
    "kernel",
    [Heat(1.0), Wave(c=1.0), PowerLaw(beta=0.5, c=1.0), fractional(-0.5),
     Exponential(mu=1.0, c=1.0), NegExponential(), Cosine()],
    ids=lambda k: k.description,
)
def test_catalog_kernels_positive_definite(kernel):
    assert check_positive_definite(kernel).passed


def test_negative_exponential_mass_not_positive_definite():
    # a(t) = -2 e^{-t} with a0 = 1: a0 + Re a~(i w) < 0 near w = 0.
    rep = check_positive_definite(Exponential(mu=1.0, c=-2.0, a0=1.0))
    assert not rep.passed
    assert rep.min_value < -0.5


def test_rv_index_estimates():
    for kernel, expected in (
        (Heat(2.0), 0.0),
        (Wave(c=1.0), 1.0),
        (PowerLaw(beta=0.5, c=1.0), 0.5),
        (fractional(-0.5), -0.5),
        (Exponential(mu=1.0, c=1.0), 0.0),
    ):
        est = rv_index_estimate(kernel, RV_GRID)
        assert est.converged
        assert not est.tail_decaying
        assert abs(est.beta - expected) < 0.02


def test_rv_log_modified_converges_to_one():
    # The logarithmic factor is slowly varying, so the doubling-ratio
    # estimate carries an O(1/log t) bias that shrinks as the grid grows.
    est = rv_index_estimate(LogModified(m=1.0), RV_GRID)
    assert est.converged
    assert abs(est.beta - 1.0) < 0.15
    longer = rv_index_estimate(LogModified(m=1.0), np.geomspace(1e-2, 1e12, 120))
    assert abs(longer.beta - 1.0) < abs(est.beta - 1.0)


def test_rv_cosine_not_converged():
    est = rv_index_estimate(Cosine(), RV_GRID)
    assert not est.converged
    assert not est.tail_decaying


def test_rv_negexponential_tail_decaying():
    est = rv_index_estimate(NegExponential(), RV_GRID)
    assert est.tail_decaying
    assert not est.converged


def test_rv_rejects_bad_grid():
    with pytest.raises(DomainError):
        rv_index_estimate(Heat(1.0), np.linspace(1.0, 2.0, 10))


def test_rv_not_eventually_positive():
    # A(t) = -(1 - e^{-t}) < 0 for all t > 0.
    class Negative(NegExponential):
        def primitive(self, t):
            return -(1.0 - np.exp(-np.asarray(t, dtype=float)))

    with pytest.raises(NotEventuallyPositiveError):
        rv_index_estimate(Negative(), RV_GRID)


def test_primitive_rejects_negative_time():
    with pytest.raises(DomainError):
        primitive_A(Heat(1.0), -0.5)


def test_quad_moments_rejects_bad_interval():
    with pytest.raises(DomainError):
        quad_moments(Heat(1.0), 1.0, 0.5)
