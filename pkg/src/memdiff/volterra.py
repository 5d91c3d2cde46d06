"""Product-integration solver for the scalar relaxation equation.

Each Fourier mode of the diffusion-with-memory problem satisfies the scalar
Volterra equation

    z(lam, t) + lam * (A * z)(lam, t) = 1,      z(lam, 0) = 1,

where ``A`` is the integrated kernel and ``*`` is convolution on [0, t].
The unknown is represented as piecewise linear on a uniform grid and the
convolution is computed exactly against that interpolant using closed-form
cell moments of ``A``.  Because only ``A`` enters -- never the possibly
singular density ``a`` -- the scheme is uniformly second order across the
whole kernel catalog, including weakly singular memories.

The quadrature weights are Toeplitz on uniform grids, so one weight vector
serves every step and a whole batch of ``lam`` values is advanced with a
single matrix-vector product per step.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from scipy import special as sp

from .errors import DomainError, StepSizeError
from .kernels import MemoryKernel, PowerLaw, SampledKernel

#: Permitted overshoot of |z| above 1 for positive-definite kernels.
BOUND_TOL = 1e-6
#: Slack added to the decay envelope comparison.
ENVELOPE_TOL = 1e-9


@dataclass(frozen=True)
class TimeGrid:
    """Uniform grid 0 = t_0 < ... < t_{n_steps} = t_end."""

    t_end: float
    n_steps: int

    def __post_init__(self):
        if self.t_end <= 0 or self.n_steps < 1:
            raise DomainError("need t_end > 0 and n_steps >= 1")

    @property
    def dt(self) -> float:
        return self.t_end / self.n_steps

    @property
    def nodes(self) -> np.ndarray:
        return self.dt * np.arange(self.n_steps + 1)

    def index_of(self, t: float) -> int:
        """Node index of t; DomainError if t is not (nearly) a node."""
        i = round(t / self.dt)
        if not 0 <= i <= self.n_steps or abs(i * self.dt - t) > 1e-9 * max(1.0, t):
            raise DomainError(f"t={t} is not a node of the time grid")
        return int(i)


@dataclass
class ScalarRelaxation:
    """Discrete solution z(lam, t_i) on a time grid."""

    lam: float
    grid: TimeGrid
    values: np.ndarray = field(repr=False)

    def __call__(self, t):
        """Piecewise-linear interpolation between grid nodes."""
        return np.interp(t, self.grid.nodes, self.values)


def _convolution_weights(kernel: MemoryKernel, grid: TimeGrid):
    """Toeplitz weights of the exact convolution with a piecewise-linear z.

    Cell r of the sigma-integral int_0^{t_i} A(sigma) z(t_i - sigma) dsigma
    contributes ``wR[r]`` to z_{i-r} and ``wL[r]`` to z_{i-r-1}.
    """
    dt = grid.dt
    m0, m1 = kernel.moment_cells(dt, grid.n_steps)
    r = np.arange(grid.n_steps)
    wR = ((r + 1) * dt * m0 - m1) / dt
    wL = (m1 - r * dt * m0) / dt
    return wL, wR


def _singular_values(kernel: PowerLaw, lambdas: np.ndarray, grid: TimeGrid):
    """Solver path for power-law kernels with beta < 0 (A singular at 0).

    The solution is a smooth function of y = t^gamma with gamma = 1 + beta,
    so the unknown is taken piecewise linear in y on a uniform y-mesh and
    the quadrature is built per step: Gauss-Legendre on regular cells and
    Gauss-Jacobi with weight (1-u)^beta on the diagonal cell, where the
    integrand carries the kernel singularity.  Uniformly second order in
    the y-spacing; the result is mapped back to the nodes of ``grid`` by
    interpolation in y (consistent with the basis).
    """
    gamma = 1.0 + kernel.beta
    beta = kernel.beta
    cA = kernel.c / kernel.beta
    a0 = kernel.a0
    N = grid.n_steps
    ymax = grid.t_end**gamma
    dy = ymax / N
    y = dy * np.arange(N + 1)
    t = y ** (1.0 / gamma)
    xg, wg = np.polynomial.legendre.leggauss(10)
    ug = (xg + 1.0) / 2.0
    wgh = wg / 2.0
    xj, wj = sp.roots_jacobi(10, beta, 0.0)
    uj = (xj + 1.0) / 2.0
    wjh = wj / 2.0 ** (beta + 1.0)
    inv_g = 1.0 / gamma
    z = np.empty((len(lambdas), N + 1))
    z[:, 0] = 1.0
    for i in range(1, N + 1):
        ti = t[i]
        if i > 1:
            w_lo = np.zeros(i - 1)  # coefficient on z_r
            w_hi = np.zeros(i - 1)  # coefficient on z_{r+1}
            for q in range(10):
                yq = y[: i - 1] + ug[q] * dy
                sq = yq**inv_g
                Aq = a0 + cA * (ti - sq) ** beta
                fac = wgh[q] * dy * Aq * inv_g * yq ** (inv_g - 1.0)
                w_hi += fac * ug[q]
                w_lo += fac * (1.0 - ug[q])
        # Diagonal cell: factor out the (1-u)^beta singularity exactly.
        yq = y[i - 1] + uj * dy
        sq = yq**inv_g
        ratio = (ti - sq) / (1.0 - uj)
        g = wjh * cA * ratio**beta * inv_g * yq ** (inv_g - 1.0) * dy
        if a0 != 0.0:
            yg = y[i - 1] + ug * dy
            ga0 = wgh * a0 * inv_g * yg ** (inv_g - 1.0) * dy
            w_diag_new = float(np.sum(g * uj) + np.sum(ga0 * ug))
            w_diag_old = float(np.sum(g * (1.0 - uj)) + np.sum(ga0 * (1.0 - ug)))
        else:
            w_diag_new = float(np.sum(g * uj))
            w_diag_old = float(np.sum(g * (1.0 - uj)))
        if i > 1:
            # Row-wise dots for batch-size-independent rounding; see
            # _solve_matrix.
            hist = np.array(
                [
                    np.dot(z[j, : i - 1], w_lo) + np.dot(z[j, 1:i], w_hi)
                    for j in range(len(lambdas))
                ]
            )
            hist += w_diag_old * z[:, i - 1]
        else:
            hist = w_diag_old * z[:, 0]
        z[:, i] = (1.0 - lambdas * hist) / (1.0 + lambdas * w_diag_new)
    # Map to the uniform nodes of the requested grid, interpolating in y.
    y_target = grid.nodes**gamma
    out = np.empty((len(lambdas), N + 1))
    for j in range(len(lambdas)):
        out[j] = np.interp(y_target, y, z[j])
    return out


def _solve_matrix(kernel: MemoryKernel, lambdas: np.ndarray, grid: TimeGrid):
    """Rows of z values, one per lambda; shared weights, one BLAS dot/step."""
    lambdas = np.asarray(lambdas, dtype=float)
    if np.any(lambdas < 0):
        raise DomainError("lambda must be nonnegative")
    if isinstance(kernel, PowerLaw) and kernel.beta < 0:
        return _singular_values(kernel, lambdas, grid)
    n = grid.n_steps
    wL, wR = _convolution_weights(kernel, grid)
    diag = 1.0 + lambdas * wR[0]
    if np.any(diag <= 0.0):
        raise StepSizeError(
            "implicit coefficient 1 + lambda*w <= 0; refine the time grid"
        )
    # c[m] multiplies z_{i-m} for 0 < m < i; stored reversed so each step
    # reads a contiguous slice.
    c = np.empty(n)
    c[1:] = wR[1:] + wL[:-1]
    crev = c[1:][::-1].copy()  # crev[k] = c[n-1-k], so [c[i-1]..c[1]] = crev[n-i:]
    m = len(lambdas)
    z = np.empty((m, n + 1))
    z[:, 0] = 1.0
    hist = np.zeros(m)
    for i in range(1, n + 1):
        if i > 1:
            w = crev[n - i :]
            # Row-wise dots, not one matmul: BLAS result bits depend on
            # the batch size, which would break the batch-equals-single
            # determinism contract.
            for j in range(m):
                hist[j] = np.dot(z[j, 1:i], w)
        rhs = 1.0 - lambdas * (hist + wL[i - 1])
        z[:, i] = rhs / diag
    return z


def solve_relaxation(kernel: MemoryKernel, lam: float, grid: TimeGrid) -> ScalarRelaxation:
    """Solve z + lam * A*z = 1 on the grid for a single lam >= 0."""
    if lam == 0.0:
        return ScalarRelaxation(0.0, grid, np.ones(grid.n_steps + 1))
    z = _solve_matrix(kernel, np.array([lam]), grid)
    return ScalarRelaxation(float(lam), grid, z[0])


def solve_relaxation_batch(kernel: MemoryKernel, lambdas, grid: TimeGrid):
    """Solve for many lam at once; weights are computed a single time.

    Returns a list of ScalarRelaxation in the order of ``lambdas``.  The
    values are identical to per-lam calls of ``solve_relaxation``: every
    lam advances independently through the same shared weights.
    """
    lambdas = np.asarray(lambdas, dtype=float)
    z = _solve_matrix(kernel, lambdas, grid)
    z[lambdas == 0.0] = 1.0  # exactness contract at lam = 0
    return [
        ScalarRelaxation(float(l), grid, z[j]) for j, l in enumerate(lambdas)
    ]


def relaxation_values(kernel: MemoryKernel, lambdas, grid: TimeGrid) -> np.ndarray:
    """Matrix z[j, i] = z(lambdas[j], t_i); the array core of the batch API."""
    lambdas = np.asarray(lambdas, dtype=float)
    z = _solve_matrix(kernel, lambdas, grid)
    z[lambdas == 0.0] = 1.0
    return z


def decay_envelope_check(rel: ScalarRelaxation, epsilon: float) -> bool:
    """|z(t_i)| <= 2 exp(-epsilon min(lam,1) t_i) at every node?"""
    if epsilon <= 0:
        raise DomainError("epsilon must be positive")
    rate = epsilon * min(rel.lam, 1.0)
    bound = 2.0 * np.exp(-rate * rel.grid.nodes) + ENVELOPE_TOL
    return bool(np.all(np.abs(rel.values) <= bound))


@dataclass
class KernelConvergenceReport:
    """Per-member distances for a sequence of kernels against a limit."""

    sup_distance: np.ndarray
    l1_kernel_distance: np.ndarray


def _coerce_kernel(obj, grid: TimeGrid) -> MemoryKernel:
    if isinstance(obj, MemoryKernel):
        return obj
    values = np.asarray(obj, dtype=float)
    if values.shape != (grid.n_steps + 1,):
        raise DomainError("sampled A must have one value per grid node")
    return SampledKernel(grid.dt, values)


def kernel_convergence_test(kernel_seq, limit_kernel, lam: float, grid: TimeGrid) -> KernelConvergenceReport:
    """Solution distance per member of a kernel sequence, with the L1
    distance of the integrated kernels for correlation.

    Members and the limit may be MemoryKernel objects or arrays of A
    sampled at the grid nodes.  Implements the stability statement that
    L1 convergence of the integrated kernels forces uniform convergence
    of the relaxation solutions.
    """
    limit = _coerce_kernel(limit_kernel, grid)
    nodes = grid.nodes
    z_inf = solve_relaxation(limit, lam, grid).values
    A_inf = np.asarray(limit.primitive(nodes), dtype=float)
    sup = np.empty(len(kernel_seq))
    l1 = np.empty(len(kernel_seq))
    for j, member in enumerate(kernel_seq):
        k = _coerce_kernel(member, grid)
        z_j = solve_relaxation(k, lam, grid).values
        sup[j] = float(np.max(np.abs(z_j - z_inf)))
        A_j = np.asarray(k.primitive(nodes), dtype=float)
        l1[j] = float(np.trapezoid(np.abs(A_j - A_inf), nodes))
    return KernelConvergenceReport(sup_distance=sup, l1_kernel_distance=l1)
