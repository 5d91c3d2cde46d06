"""Product-integration solver for the scalar relaxation equation."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from memdiff.errors import DomainError
from memdiff.kernels import (
    Cosine,
    Exponential,
    Heat,
    NegExponential,
    PowerLaw,
    Wave,
    fractional,
)
from memdiff.specfun import mittag_leffler
from memdiff.volterra import (
    BOUND_TOL,
    TimeGrid,
    decay_envelope_check,
    kernel_convergence_test,
    relaxation_values,
    solve_relaxation,
    solve_relaxation_batch,
)

#: Half the empirically determined envelope rate for the Exponential
#: kernel (mu = 1, c = 1, a0 = 0): the true sup over lam of the decay
#: exponent is ~0.529 (dense lam sweep, dt = 1e-3, t_end = 20), so the
#: envelope must hold with margin at half that rate.
EXPONENTIAL_ENVELOPE_RATE = 0.2646


def test_time_grid_basics():
    g = TimeGrid(2.0, 4)
    assert g.dt == 0.5
    assert np.allclose(g.nodes, [0.0, 0.5, 1.0, 1.5, 2.0])
    assert g.index_of(1.5) == 3
    with pytest.raises(DomainError):
        g.index_of(0.7)
    with pytest.raises(DomainError):
        TimeGrid(-1.0, 4)


def test_heat_kernel_is_exponential_decay():
    # A = a0 constant gives z(lam, t) = exp(-a0 lam t).
    grid = TimeGrid(2.0, 2000)
    for lam in (0.5, 1.0, 4.0):
        rel = solve_relaxation(Heat(a0=1.5), lam, grid)
        ref = np.exp(-1.5 * lam * grid.nodes)
        # Second-order one-step error accumulates like (a0 lam dt)^3/12
        # per step; 1e-5 leaves a small margin at lam = 4.
        assert np.max(np.abs(rel.values - ref)) < 1e-5


def test_wave_kernel_is_cosine():
    # A = c t gives z(lam, t) = cos(sqrt(c lam) t).
    grid = TimeGrid(5.0, 5000)
    for lam in (0.5, 2.0):
        rel = solve_relaxation(Wave(c=1.0), lam, grid)
        ref = np.cos(np.sqrt(lam) * grid.nodes)
        assert np.max(np.abs(rel.values - ref)) < 1e-5


def test_exponential_kernel_closed_form():
    # For a = e^{-t}, a0 = 0, lam = 1 the transform inverts explicitly:
    # z(1, t) = e^{-t/2} (cos(w t) + sin(w t)/(2 w)), w = sqrt(3)/2.
    grid = TimeGrid(5.0, 5000)
    rel = solve_relaxation(Exponential(mu=1.0, c=1.0), 1.0, grid)
    w = math.sqrt(3.0) / 2.0
    t = grid.nodes
    ref = np.exp(-t / 2.0) * (np.cos(w * t) + np.sin(w * t) / (2.0 * w))
    assert np.max(np.abs(rel.values - ref)) < 1e-6


@pytest.mark.parametrize("beta", [-0.75, -0.5, 0.25, 0.5, 0.75])
def test_fractional_relaxation_is_mittag_leffler(beta):
    # z(lam, t) = E_{1+beta}(-lam t^{1+beta}) for A = t^beta/Gamma(1+beta).
    alpha = 1.0 + beta
    grid = TimeGrid(5.0, 5000)
    check = grid.nodes[::250][1:]
    for lam in (0.5, 2.0):
        rel = solve_relaxation(fractional(beta), lam, grid)
        ref = mittag_leffler(alpha, -lam * check**alpha)
        err = np.max(np.abs(rel(check) - np.asarray(ref)))
        assert err < 1e-5


def test_singular_path_second_order():
    # beta < 0 dispatches to the y-substitution scheme; errors must drop
    # by ~4x under step halving.
    beta = -0.5
    lam = 1.0
    errs = []
    for n in (250, 500, 1000):
        grid = TimeGrid(1.0, n)
        rel = solve_relaxation(fractional(beta), lam, grid)
        ref = mittag_leffler(1.0 + beta, -lam * grid.nodes[1:] ** (1.0 + beta))
        errs.append(np.max(np.abs(rel.values[1:] - np.asarray(ref))))
    order = math.log2(errs[0] / errs[2]) / 2.0
    assert order > 1.8


def test_smooth_path_second_order():
    # Self-convergence under step halving against a fine reference.
    lam = 2.0
    kernel = Exponential(mu=1.0, c=1.0)
    errs = []
    fine = solve_relaxation(kernel, lam, TimeGrid(1.0, 4096)).values
    for n in (256, 512, 1024):
        vals = solve_relaxation(kernel, lam, TimeGrid(1.0, n)).values
        errs.append(abs(vals[-1] - fine[-1]))
    order = math.log2(errs[0] / errs[2]) / 2.0
    assert order > 1.9


def test_lambda_zero_is_exactly_one():
    grid = TimeGrid(3.0, 300)
    for kernel in (Heat(1.0), Wave(c=1.0), fractional(-0.5)):
        rels = solve_relaxation_batch(kernel, [0.0, 1.0], grid)
        assert np.all(rels[0].values == 1.0)


def test_batch_matches_single_bitwise():
    grid = TimeGrid(2.0, 400)
    lams = [0.3, 1.0, 7.5]
    for kernel in (Exponential(mu=1.0, c=1.0), fractional(-0.5), Cosine()):
        batch = solve_relaxation_batch(kernel, lams, grid)
        for lam, rel in zip(lams, batch):
            single = solve_relaxation(kernel, lam, grid)
            assert np.array_equal(rel.values, single.values)


def test_relaxation_values_shape_and_content():
    grid = TimeGrid(1.0, 100)
    z = relaxation_values(Heat(1.0), [0.0, 1.0, 2.0], grid)
    assert z.shape == (3, 101)
    assert np.all(z[0] == 1.0)
    assert np.all(z[:, 0] == 1.0)


@pytest.mark.parametrize(
    "kernel",
    [Heat(1.0), Wave(c=1.0), PowerLaw(beta=0.5, c=1.0), fractional(-0.5),
     Exponential(mu=1.0, c=1.0), NegExponential(), Cosine()],
    ids=lambda k: k.description,
)
def test_bounded_by_one_for_positive_definite_kernels(kernel):
    # |z| <= 1 for every positive-definite kernel, all lam and t.
    grid = TimeGrid(20.0, 4000)
    lams = np.geomspace(0.01, 100.0, 25)
    z = relaxation_values(kernel, lams, grid)
    assert np.max(np.abs(z)) <= 1.0 + BOUND_TOL


def test_not_positive_definite_kernel_can_exceed_one():
    # Sanity check that the bound is a theorem, not an artifact: a
    # negative-mass kernel overshoots.
    grid = TimeGrid(20.0, 4000)
    z = relaxation_values(Exponential(mu=0.2, c=-2.0, a0=1.0), [1.0], grid)
    assert np.max(np.abs(z)) > 1.0 + BOUND_TOL


def test_decay_envelope_exponential_kernel():
    grid = TimeGrid(20.0, 4000)
    for lam in (0.05, 0.5, 1.0, 10.0, 100.0):
        rel = solve_relaxation(Exponential(mu=1.0, c=1.0), lam, grid)
        assert decay_envelope_check(rel, EXPONENTIAL_ENVELOPE_RATE)


def test_decay_envelope_rejects_wave():
    # The wave kernel does not decay: the envelope fails at large t.
    grid = TimeGrid(50.0, 10000)
    rel = solve_relaxation(Wave(c=1.0), 1.0, grid)
    assert not decay_envelope_check(rel, 0.25)


def test_interpolation_between_nodes():
    grid = TimeGrid(1.0, 10)
    rel = solve_relaxation(Heat(1.0), 1.0, grid)
    mid = rel(0.05)
    assert rel.values[0] >= mid >= rel.values[1]


def test_negative_lambda_rejected():
    with pytest.raises(DomainError):
        solve_relaxation(Heat(1.0), -1.0, TimeGrid(1.0, 10))


def test_kernel_convergence_identical_is_zero():
    grid = TimeGrid(2.0, 500)
    k = Exponential(mu=1.0, c=1.0)
    rep = kernel_convergence_test([k], k, 1.0, grid)
    assert rep.sup_distance[0] == 0.0
    assert rep.l1_kernel_distance[0] == 0.0


def test_kernel_convergence_dilated_powerlaw():
    # A_n(t) = A(T_n t) / (A(T_n) Gamma(1+beta)) -> t^beta/Gamma(1+beta)
    # exactly for power laws, so the distance is zero for each member up
    # to roundoff; with a perturbation of size 1/n it decreases like the
    # L1 kernel distance.
    grid = TimeGrid(2.0, 500)
    beta = 0.5
    limit = fractional(beta)
    nodes = grid.nodes
    seq = []
    for n in (2, 8, 32):
        A = limit.primitive(nodes) + (1.0 / n) * nodes / (1.0 + nodes)
        A[0] = limit.a0
        seq.append(A)
    rep = kernel_convergence_test(seq, limit, 1.0, grid)
    assert np.all(np.diff(rep.sup_distance) < 0.0)
    assert np.all(np.diff(rep.l1_kernel_distance) < 0.0)
    assert rep.sup_distance[-1] < rep.sup_distance[0] / 8.0


def test_kernel_convergence_accepts_sampled_arrays():
    grid = TimeGrid(1.0, 200)
    k = Heat(1.0)
    A = np.asarray(k.primitive(grid.nodes), dtype=float)
    rep = kernel_convergence_test([A], k, 2.0, grid)
    assert rep.sup_distance[0] < 1e-10


@given(st.floats(min_value=0.01, max_value=50.0))
@settings(max_examples=25, deadline=None)
def test_heat_relaxation_accuracy_property(lam):
    grid = TimeGrid(1.0, 500)
    rel = solve_relaxation(Heat(1.0), lam, grid)
    ref = np.exp(-lam * grid.nodes)
    assert np.max(np.abs(rel.values - ref)) < 1e-4 * (1.0 + lam)
