"""Isotropic 3-D viscoelastic flow and its Stokes-flow asymptotics.

The velocity field of a linearly viscoelastic, incompressible-at-rest
material splits in Fourier space into a gradient part (projector
P = xi xi^T / |xi|^2) and a divergence-free part (Q = I - P).  Each part
evolves by a scalar relaxation: the gradient part under the combined
kernel beta = (4a + 2b)/3 built from the shear kernel a and bulk kernel
b, the divergence-free part under the shear kernel alone.  For large
times the field approaches the fundamental solution of the compressible
Stokes system with effective viscosities B (gradient) and A (shear).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, HypothesisViolation
from .kernels import MemoryKernel, check_positive_definite, scale
from .spectral import InitialData, ModeGrid, SpectralField, hs_norm
from .volterra import TimeGrid, relaxation_values
from .asymptotics import relaxation_at_time
from . import spectral

#: Entrywise tolerance for the projector algebra identities.
PROJECTOR_TOL = 1e-14


@dataclass
class ViscoKernelPair:
    """Shear kernel (a0, a), bulk kernel (b0, b), and the derived
    gradient-part kernel beta = (4a + 2b)/3."""

    shear: MemoryKernel
    bulk: MemoryKernel

    def __post_init__(self):
        self.beta_kernel = scale(self.shear, 4.0 / 3.0) + scale(self.bulk, 2.0 / 3.0)

    def validate(self):
        """Check the positive-definiteness hypotheses; raise naming the
        violated condition."""
        for kern, name in ((self.shear, "shear"), (self.beta_kernel, "gradient-part")):
            rep = check_positive_definite(kern)
            if not rep.passed:
                raise HypothesisViolation(
                    f"{name} kernel is not positive definite "
                    f"(min {rep.min_value:.3e})"
                )

    def effective_viscosities(self):
        """(A, B): total masses of the shear and gradient-part kernels."""
        return self.shear.total_mass(), self.beta_kernel.total_mass()


@dataclass
class VectorSpectralField:
    """Complex 3-vector per mode on a 3-D mode grid."""

    grid: ModeGrid
    values: np.ndarray = field(repr=False)  # shape (3,) + grid.shape

    def __post_init__(self):
        self.values = np.asarray(self.values)
        if self.grid.n != 3 or self.grid.radial:
            raise DomainError("vector fields require a full 3-D grid")
        if self.values.shape != (3,) + self.grid.shape:
            raise DomainError("values must have shape (3,) + grid shape")

    @property
    def mass_vector(self) -> np.ndarray:
        idx = (slice(None),) + self.grid.zero_index()
        return np.real(self.values[idx]).astype(float)

    def component(self, i: int) -> SpectralField:
        return SpectralField(self.grid, self.values[i])


@dataclass
class VectorGaussian:
    """v0 with v0_hat(xi) = V0 * exp(-width^2 |xi|^2 / 2)."""

    width: float = 1.0
    mass_vector: tuple = (1.0, 0.0, 0.0)

    def field(self, grid: ModeGrid) -> VectorSpectralField:
        env = spectral.Gaussian(self.width, 1.0).hat(xi_squared=grid.xi_squared())
        V0 = np.asarray(self.mass_vector, dtype=float)
        vals = V0[:, None, None, None] * env[None, ...]
        return VectorSpectralField(grid, vals.astype(complex))


def _projector_apply(field_: VectorSpectralField, which: str) -> VectorSpectralField:
    grid = field_.grid
    comps = grid.components()
    lam2 = grid.xi_squared()
    center = grid.zero_index()
    safe = lam2.copy()
    safe[center] = 1.0
    v = field_.values
    dot = sum(comps[d] * v[d] for d in range(3)) / safe
    p_vals = np.stack([comps[d] * dot for d in range(3)])
    # Convention at xi = 0: P passes the value, Q vanishes (P + Q = I).
    idx = (slice(None),) + center
    p_vals[idx] = v[idx]
    if which == "P":
        return VectorSpectralField(grid, p_vals)
    return VectorSpectralField(grid, v - p_vals)


def project_P(field_: VectorSpectralField) -> VectorSpectralField:
    """Gradient (curl-free) component: multiplication by xi xi^T/|xi|^2."""
    return _projector_apply(field_, "P")


def project_Q(field_: VectorSpectralField) -> VectorSpectralField:
    """Divergence-free component: multiplication by I - xi xi^T/|xi|^2."""
    return _projector_apply(field_, "Q")


def evolve_visco(
    pair: ViscoKernelPair,
    v0,
    grid: ModeGrid,
    times,
    time_grid: TimeGrid,
):
    """Fields v_hat(., t) = z1 P v0_hat + z Q v0_hat at requested times.

    z1 is the relaxation of the gradient-part kernel, z of the shear
    kernel; both batches share the deduplicated |xi|^2 values.
    """
    pair.validate()
    base = v0.field(grid)
    p0 = project_P(base)
    q0 = project_Q(base)
    lambdas, inverse = spectral.unique_lambdas(grid)
    indices = [time_grid.index_of(t) for t in np.atleast_1d(times)]
    z1 = relaxation_values(pair.beta_kernel, lambdas, time_grid)
    z = relaxation_values(pair.shear, lambdas, time_grid)
    out = []
    for idx in indices:
        f1 = z1[:, idx][inverse]
        f = z[:, idx][inverse]
        out.append(
            VectorSpectralField(grid, p0.values * f1[None] + q0.values * f[None])
        )
    return out


def stokes_fundamental(A: float, B: float, grid: ModeGrid, t: float, V0) -> VectorSpectralField:
    """W_hat(xi, t) V0 = e^{-B |xi|^2 t} P V0 + e^{-A |xi|^2 t} Q V0."""
    if A <= 0 or B <= 0 or t <= 0:
        raise DomainError("need A, B, t > 0")
    V0 = np.asarray(V0, dtype=float)
    const = VectorSpectralField(
        grid, np.broadcast_to(V0[:, None, None, None], (3,) + grid.shape).astype(complex).copy()
    )
    p = project_P(const)
    q = project_Q(const)
    lam2 = grid.xi_squared()
    return VectorSpectralField(
        grid,
        p.values * np.exp(-B * lam2 * t)[None] + q.values * np.exp(-A * lam2 * t)[None],
    )


def stokes_gradient_part_real(x, t: float) -> np.ndarray:
    """Real-space gradient part U(x, t) of the Stokes fundamental solution.

    U_ij(x,t) = -d_i d_j [ erf(|x|/sqrt(4t)) / (4 pi |x|) ], evaluated by
    fourth-order central differences of the scalar potential (removable
    singularity at 0 filled by its limit).
    """
    x = np.asarray(x, dtype=float)

    def potential(y):
        r = float(np.linalg.norm(y))
        if r < 1e-8:
            # erf(r/s)/ (4 pi r) -> 1/(4 pi) * 2/(s sqrt(pi)) as r -> 0
            return 2.0 / (4.0 * math.pi * math.sqrt(4.0 * t) * math.sqrt(math.pi))
        return math.erf(r / math.sqrt(4.0 * t)) / (4.0 * math.pi * r)

    h = 1e-2
    out = np.empty((3, 3))
    for i in range(3):
        for j in range(3):
            acc = 0.0
            if i == j:
                for step, w in ((-2, -1.0), (-1, 16.0), (0, -30.0), (1, 16.0), (2, -1.0)):
                    y = x.copy()
                    y[i] += step * h
                    acc += w * potential(y)
                val = acc / (12.0 * h * h)
            else:
                coeffs = {(-2, -2): -1, (-2, 2): 1, (2, -2): 1, (2, 2): -1,
                          (-1, -1): 16, (-1, 1): -16, (1, -1): -16, (1, 1): 16}
                for (si, sj), w in coeffs.items():
                    y = x.copy()
                    y[i] += si * h
                    y[j] += sj * h
                    acc += w * potential(y)
                val = acc / (48.0 * h * h)
            out[i, j] = -val
    return out


@dataclass
class ViscoRateReport:
    """r(t) = t^{3/4} ||v - W V0||_{Hs} over a time list."""

    s: float
    A: float
    B: float
    degenerate_mass: bool
    rows: list = field(default_factory=list)  # (t, r, raw_distance)

    @property
    def r_values(self) -> np.ndarray:
        return np.array([r for _, r, _ in self.rows])


def vector_hs_norm(field_: VectorSpectralField, s: float) -> float:
    """Root sum of squares of the componentwise Hs norms."""
    return math.sqrt(
        sum(hs_norm(field_.component(i), s) ** 2 for i in range(3))
    )


def visco_asymptotics(
    pair: ViscoKernelPair,
    v0,
    t_list,
    s: float,
    grid: ModeGrid,
    n_steps: int = 2000,
) -> ViscoRateReport:
    """Scaled distance of the viscoelastic field to the Stokes solution.

    Requires finite positive effective viscosities A (shear) and B
    (gradient part); refusals name the failing hypothesis.  A zero mass
    vector makes the comparison target vanish; the report flags it.
    """
    pair.validate()
    A, B = pair.effective_viscosities()
    for val, name in ((A, "shear"), (B, "gradient-part")):
        if val is None or not np.isfinite(val) or val <= 0:
            raise HypothesisViolation(
                f"effective {name} viscosity {val} is not finite and positive"
            )
    t_list = np.atleast_1d(np.asarray(t_list, dtype=float))
    if np.any(t_list <= 0):
        raise DomainError("t_list must be positive")
    base = v0.field(grid)
    V0 = base.mass_vector
    degenerate = bool(np.allclose(V0, 0.0))
    p0 = project_P(base)
    q0 = project_Q(base)
    lambdas, inverse = spectral.unique_lambdas(grid)
    report = ViscoRateReport(s=s, A=float(A), B=float(B), degenerate_mass=degenerate)
    for t in t_list:
        z1 = relaxation_at_time(pair.beta_kernel, lambdas, float(t), n_steps)
        z = relaxation_at_time(pair.shear, lambdas, float(t), n_steps)
        v_hat = p0.values * z1[inverse][None] + q0.values * z[inverse][None]
        w = stokes_fundamental(float(A), float(B), grid, float(t), V0)
        diff = VectorSpectralField(grid, v_hat - w.values)
        dist = vector_hs_norm(diff, s)
        report.rows.append((float(t), float(t ** 0.75 * dist), float(dist)))
    return report
