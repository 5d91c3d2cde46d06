"""Fourier-side representation of diffusion with memory.

Every mode of u_t = a0*Lap(u) + a*Lap(u) (convolution in time) evolves
independently: u_hat(xi, t) = z(|xi|^2, t) * u0_hat(xi), where z is the
scalar relaxation of the volterra module.  This module provides the mode
grids, initial data catalog, the evolution operator with lambda
deduplication, Sobolev norms, and real-space synthesis.

Conventions follow f_hat(xi) = int e^{-i x xi} f(x) dx, so Parseval and the
H^s norm carry a (2*pi)^{-n} factor.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, HypothesisViolation
from .kernels import MemoryKernel, check_positive_definite
from .specfun import mittag_leffler
from .volterra import TimeGrid, relaxation_values

#: Tolerated imaginary residue after synthesis of a Hermitian field.
SYNTH_IMAG_TOL = 1e-10
#: Largest Hermitian-symmetry defect accepted by synthesize.
HERMITIAN_TOL = 1e-8


@dataclass(frozen=True)
class ModeGrid:
    """Lattice of Fourier modes.

    Full grids cover [-xi_max, xi_max]^n inclusively with spacing
    dxi = 2*xi_max/modes_per_axis (so modes_per_axis+1 nodes per axis and
    xi = 0 on the lattice).  Radial grids cover r in [0, xi_max] with
    modes_per_axis+1 nodes, for radially symmetric data.
    """

    n: int
    modes_per_axis: int
    xi_max: float
    radial: bool = False

    def __post_init__(self):
        if self.n not in (1, 2, 3):
            raise DomainError("dimension must be 1, 2 or 3")
        if self.modes_per_axis < 2 or self.modes_per_axis % 2:
            raise DomainError("modes_per_axis must be a positive even integer")
        if self.xi_max <= 0:
            raise DomainError("xi_max must be positive")

    @property
    def dxi(self) -> float:
        if self.radial:
            return self.xi_max / self.modes_per_axis
        return 2.0 * self.xi_max / self.modes_per_axis

    @property
    def axis(self) -> np.ndarray:
        """Mode coordinates along one axis (radial: r >= 0)."""
        N = self.modes_per_axis
        if self.radial:
            return self.dxi * np.arange(N + 1)
        return self.dxi * np.arange(-N // 2, N // 2 + 1)

    @property
    def shape(self):
        if self.radial:
            return (self.modes_per_axis + 1,)
        return (self.modes_per_axis + 1,) * self.n

    def xi_squared(self) -> np.ndarray:
        """|xi|^2 over the grid (radial: r^2)."""
        ax = self.axis
        if self.radial:
            return ax**2
        sq = ax**2
        out = sq
        for _ in range(self.n - 1):
            out = out[..., None] + sq
        return out

    def components(self):
        """Broadcastable xi-component arrays (full grids only)."""
        if self.radial:
            raise DomainError("component arrays are undefined on radial grids")
        ax = self.axis
        return np.meshgrid(*([ax] * self.n), indexing="ij")

    def zero_index(self):
        if self.radial:
            return (0,)
        return (self.modes_per_axis // 2,) * self.n

    def trapezoid_weights(self) -> np.ndarray:
        """Product trapezoid weights (without the dxi^n factor)."""
        N = self.modes_per_axis
        w1 = np.ones(N + 1)
        w1[0] = w1[-1] = 0.5
        if self.radial:
            return w1
        out = w1
        for _ in range(self.n - 1):
            out = np.multiply.outer(out, w1)
        return out


@dataclass
class SpectralField:
    """Fourier samples of a field on a mode grid."""

    grid: ModeGrid
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        self.values = np.asarray(self.values)
        if self.values.shape != self.grid.shape:
            raise DomainError("values shape does not match the grid")

    @property
    def mass(self):
        """The xi = 0 sample; equals the space integral of the field."""
        v = self.values[self.grid.zero_index()]
        return float(v.real) if np.iscomplexobj(self.values) else float(v)

    def hermitian_defect(self) -> float:
        """sup |u_hat(-xi) - conj(u_hat(xi))| over the grid."""
        if self.grid.radial:
            return float(np.max(np.abs(self.values.imag))) if np.iscomplexobj(self.values) else 0.0
        flipped = self.values[(slice(None, None, -1),) * self.grid.n]
        return float(np.max(np.abs(flipped - np.conj(self.values))))


class InitialData:
    """Initial datum known through its Fourier transform."""

    mass: float = 1.0

    def hat(self, xi_squared=None, xi_components=None):
        raise NotImplementedError

    def field(self, grid: ModeGrid) -> SpectralField:
        if grid.radial:
            return SpectralField(grid, self.hat(xi_squared=grid.xi_squared()))
        return SpectralField(
            grid,
            self.hat(xi_squared=grid.xi_squared(), xi_components=grid.components()),
        )


@dataclass
class Gaussian(InitialData):
    """u0 with u0_hat(xi) = mass * exp(-width^2 |xi|^2 / 2)."""

    width: float = 1.0
    mass: float = 1.0

    def __post_init__(self):
        if self.width <= 0:
            raise DomainError("width must be positive")

    def hat(self, xi_squared=None, xi_components=None):
        return self.mass * np.exp(-0.5 * self.width**2 * xi_squared)


@dataclass
class BoxFunction(InitialData):
    """Indicator of [-h, h]^n normalized to the given mass.

    u0_hat(xi) = mass * prod_i sinc(h xi_i); decay is slow (1/|xi|), so
    grid truncation dominates accuracy for this datum.
    """

    half_width: float = 1.0
    mass: float = 1.0

    def __post_init__(self):
        if self.half_width <= 0:
            raise DomainError("half_width must be positive")

    def hat(self, xi_squared=None, xi_components=None):
        if xi_components is None:
            # Radial grids only make sense in n = 1 for this datum.
            xi_components = [np.sqrt(xi_squared)]
        out = self.mass * np.ones_like(xi_components[0])
        for comp in xi_components:
            out = out * np.sinc(self.half_width * comp / np.pi)
        return out


def unique_lambdas(grid: ModeGrid):
    """Distinct |xi|^2 lattice values and the inverse map onto the grid.

    Modes are bucketed by the integer |j|^2 of their lattice index, so
    equality is exact and 3-D grids collapse to O(N^2) distinct radii.
    """
    N = grid.modes_per_axis
    if grid.radial:
        j2 = np.arange(N + 1) ** 2
        return grid.dxi**2 * j2.astype(float), np.arange(N + 1)
    j = np.arange(-N // 2, N // 2 + 1)
    jsq = j**2
    total = jsq
    for _ in range(grid.n - 1):
        total = total[..., None] + jsq
    uniq, inverse = np.unique(total.ravel(), return_inverse=True)
    return grid.dxi**2 * uniq.astype(float), inverse.reshape(total.shape)


def evolve(
    kernel: MemoryKernel,
    u0: InitialData,
    grid: ModeGrid,
    times,
    time_grid: TimeGrid,
):
    """Fields u_hat(., t) = z(|xi|^2, t) u0_hat for each requested time.

    Refuses kernels that fail the positive-definiteness check, mirroring
    the existence hypothesis of the representation formula.
    """
    report = check_positive_definite(kernel)
    if not report.passed:
        raise HypothesisViolation(
            "kernel is not positive definite "
            f"(min a0 + Re a~ = {report.min_value:.3e} at omega = {report.omega_at_min:.3e})"
        )
    indices = [time_grid.index_of(t) for t in np.atleast_1d(times)]
    lambdas, inverse = unique_lambdas(grid)
    zmat = relaxation_values(kernel, lambdas, time_grid)
    base = u0.field(grid).values
    fields = []
    for idx in indices:
        factor = zmat[:, idx][inverse]
        fields.append(SpectralField(grid, base * factor))
    return fields


def hs_norm(field_: SpectralField, s: float) -> float:
    """((2 pi)^{-n} integral (1+|xi|^2)^s |u_hat|^2 d xi)^{1/2} by trapezoid."""
    grid = field_.grid
    weight = (1.0 + grid.xi_squared()) ** s * np.abs(field_.values) ** 2
    if grid.radial:
        r = grid.axis
        n = grid.n
        surf = 2.0 * math.pi ** (n / 2.0) / math.gamma(n / 2.0)
        integral = surf * np.trapezoid(r ** (n - 1) * weight, r)
    else:
        integral = float(
            np.sum(grid.trapezoid_weights() * weight) * grid.dxi**grid.n
        )
    return math.sqrt(integral / (2.0 * math.pi) ** grid.n)


def synthesize(field_: SpectralField):
    """Real-space samples on the dual lattice x_m = m * pi / xi_max.

    Inverse transform under the convention u(x) = (2 pi)^{-n}
    integral e^{i x xi} u_hat(xi) d xi, computed by trapezoid sums.
    Returns (x_axis, samples).
    """
    grid = field_.grid
    if grid.radial:
        raise DomainError("synthesize requires a full (non-radial) grid")
    defect = field_.hermitian_defect()
    scale = float(np.max(np.abs(field_.values))) or 1.0
    if defect > HERMITIAN_TOL * scale:
        raise DomainError(
            f"field is not Hermitian symmetric (defect {defect:.3e})"
        )
    N = grid.modes_per_axis
    xi = grid.axis
    dx = math.pi / grid.xi_max
    x = dx * np.arange(-N // 2, N // 2 + 1)
    # Per-axis phase matrix including trapezoid end weights and dxi.
    w1 = np.ones(N + 1)
    w1[0] = w1[-1] = 0.5
    M = np.exp(1j * np.outer(x, xi)) * (w1 * grid.dxi)
    out = np.asarray(field_.values, dtype=complex)
    for _ in range(grid.n):
        out = np.tensordot(out, M, axes=([0], [1]))
    out = out / (2.0 * math.pi) ** grid.n
    max_imag = float(np.max(np.abs(out.imag)))
    if max_imag > SYNTH_IMAG_TOL * max(1.0, float(np.max(np.abs(out.real)))):
        raise DomainError(f"imaginary residue {max_imag:.3e} after synthesis")
    return x, out.real


def evaluate_at(field_: SpectralField, points) -> np.ndarray:
    """Inverse transform at arbitrary real-space points (trapezoid sum)."""
    grid = field_.grid
    if grid.radial:
        raise DomainError("evaluate_at requires a full grid")
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    if pts.shape[1] != grid.n:
        raise DomainError(f"points must have {grid.n} coordinates")
    comps = grid.components()
    w = grid.trapezoid_weights() * grid.dxi**grid.n
    vals = np.empty(len(pts), dtype=complex)
    for i, p in enumerate(pts):
        phase = np.zeros(grid.shape)
        for d in range(grid.n):
            phase = phase + p[d] * comps[d]
        vals[i] = np.sum(w * field_.values * np.exp(1j * phase))
    return vals / (2.0 * math.pi) ** grid.n


def limit_profile(beta: float, grid: ModeGrid, t: float, mass: float) -> SpectralField:
    """Self-similar limit w_hat(xi, t) = mass * E_{1+beta}(-|xi|^2 t^{1+beta})."""
    if not -1.0 < beta <= 1.0:
        raise DomainError("beta must lie in (-1, 1]")
    if t <= 0:
        raise DomainError("t must be positive")
    alpha = 1.0 + beta
    lam2 = grid.xi_squared()
    uniq, inverse = np.unique(lam2.ravel(), return_inverse=True)
    vals = mittag_leffler(alpha, -uniq * t**alpha)
    return SpectralField(grid, mass * np.asarray(vals)[inverse].reshape(lam2.shape))
