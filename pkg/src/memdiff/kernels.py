"""Catalog of memory kernels (a0, a) with closed-form primitives.

A kernel is the pair of an instantaneous coefficient ``a0 >= 0`` and a
fading-memory part ``a(t)``.  The object that drives all asymptotics is the
integrated kernel ``A(t) = a0 + int_0^t a(s) ds``; every family supplies
``A`` in closed form together with the first two antiderivatives of ``A``,
which the Volterra solver consumes as exact cell moments.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import integrate
from scipy import special as sp

from .errors import DomainError, NotEventuallyPositiveError

#: Shift used to approximate the boundary limit of the Laplace transform.
PD_BOUNDARY_SHIFT = 1e-8
#: Tolerance on the minimum of a0 + Re a~(h + i w) for a pass.
PD_MIN_TOLERANCE = 1e-9
#: Agreement required among trailing doubling ratios for convergence.
RV_CONVERGENCE_TOL = 0.02


class MemoryKernel:
    """Base class: subclasses provide a0, a(t), A(t) and moments."""

    a0: float = 0.0
    beta_nominal: float | None = None
    description: str = "memory kernel"

    # -- pointwise values -------------------------------------------------

    def a(self, t):
        raise NotImplementedError

    def primitive(self, t):
        """A(t) = a0 + int_0^t a(s) ds."""
        raise NotImplementedError

    def integral_A(self, t):
        """int_0^t A(s) ds."""
        raise NotImplementedError

    def integral_tA(self, t):
        """int_0^t s A(s) ds."""
        raise NotImplementedError

    def laplace(self, s):
        """Laplace transform of a at s; DomainError outside the half plane."""
        raise NotImplementedError

    def total_mass(self):
        """a0 + int_0^inf a(s) ds; may be inf, or None if non-convergent."""
        return None

    # -- quadrature support ----------------------------------------------

    def quad_moments(self, t0: float, t1: float):
        """(int_{t0}^{t1} A, int_{t0}^{t1} s A(s) ds)."""
        if not 0.0 <= t0 < t1:
            raise DomainError("need 0 <= t0 < t1")
        return (
            self.integral_A(t1) - self.integral_A(t0),
            self.integral_tA(t1) - self.integral_tA(t0),
        )

    def moment_cells(self, dt: float, n: int):
        """Vectorized cell moments (m0[r], m1[r]) over [r*dt, (r+1)*dt]."""
        edges = dt * np.arange(n + 1)
        i1 = self.integral_A(edges)
        i2 = self.integral_tA(edges)
        return np.diff(i1), np.diff(i2)

    def __add__(self, other):
        if not isinstance(other, MemoryKernel):
            return NotImplemented
        return SumKernel(self, other)


def _as_float_or_array(x, scalar_input):
    return float(x) if scalar_input else x


@dataclass
class Heat(MemoryKernel):
    """a = 0: the plain heat equation with diffusivity a0."""

    a0: float = 1.0
    beta_nominal: float | None = 0.0

    def __post_init__(self):
        if self.a0 <= 0:
            raise DomainError("Heat kernel needs a0 > 0")
        self.description = f"heat(a0={self.a0})"

    def a(self, t):
        return np.zeros_like(np.asarray(t, dtype=float))

    def primitive(self, t):
        return self.a0 * np.ones_like(np.asarray(t, dtype=float))

    def integral_A(self, t):
        return self.a0 * np.asarray(t, dtype=float)

    def integral_tA(self, t):
        return self.a0 * np.asarray(t, dtype=float) ** 2 / 2.0

    def laplace(self, s):
        return np.zeros_like(np.asarray(s, dtype=complex))

    def total_mass(self):
        return self.a0


@dataclass
class Wave(MemoryKernel):
    """a = c constant: the wave equation for a0 = 0."""

    c: float = 1.0
    a0: float = 0.0
    beta_nominal: float | None = 1.0

    def __post_init__(self):
        if self.c <= 0:
            raise DomainError("Wave kernel needs c > 0")
        self.description = f"wave(c={self.c}, a0={self.a0})"

    def a(self, t):
        return self.c * np.ones_like(np.asarray(t, dtype=float))

    def primitive(self, t):
        return self.a0 + self.c * np.asarray(t, dtype=float)

    def integral_A(self, t):
        t = np.asarray(t, dtype=float)
        return self.a0 * t + self.c * t**2 / 2.0

    def integral_tA(self, t):
        t = np.asarray(t, dtype=float)
        return self.a0 * t**2 / 2.0 + self.c * t**3 / 3.0

    def laplace(self, s):
        s = np.asarray(s, dtype=complex)
        if np.any(s.real <= 0):
            raise DomainError("Laplace transform of a constant needs Re s > 0")
        return self.c / s

    def total_mass(self):
        return math.inf


@dataclass
class PowerLaw(MemoryKernel):
    """a(t) = c t^{beta-1}, so A = a0 + (c/beta) t^beta.

    The catalog range is beta in (0, 1) with c > 0; beta in (-1, 0) with
    c < 0 is additionally accepted so the fractional relaxation oracle
    A(t) = t^beta / Gamma(1+beta) is representable (see ``fractional``).
    """

    beta: float = 0.5
    c: float = 1.0
    a0: float = 0.0

    def __post_init__(self):
        if not -1.0 < self.beta <= 1.0 or self.beta == 0.0:
            raise DomainError("PowerLaw needs beta in (-1, 0) or (0, 1]")
        if self.c == 0.0:
            raise DomainError("PowerLaw needs c != 0")
        if self.beta > 0 and self.c < 0:
            raise DomainError("PowerLaw with beta > 0 needs c > 0")
        if self.beta < 0 and self.c > 0:
            raise DomainError("PowerLaw with beta < 0 needs c < 0")
        self.beta_nominal = self.beta
        self.description = f"powerlaw(beta={self.beta}, c={self.c}, a0={self.a0})"

    def a(self, t):
        t = np.asarray(t, dtype=float)
        with np.errstate(divide="ignore"):
            return self.c * t ** (self.beta - 1.0)

    def primitive(self, t):
        t = np.asarray(t, dtype=float)
        with np.errstate(divide="ignore"):
            return self.a0 + (self.c / self.beta) * t**self.beta

    def integral_A(self, t):
        t = np.asarray(t, dtype=float)
        b = self.beta
        return self.a0 * t + self.c / (b * (b + 1.0)) * t ** (b + 1.0)

    def integral_tA(self, t):
        t = np.asarray(t, dtype=float)
        b = self.beta
        return self.a0 * t**2 / 2.0 + self.c / (b * (b + 2.0)) * t ** (b + 2.0)

    def laplace(self, s):
        # For beta in (0,1) this is the classical transform of c t^{beta-1};
        # for beta in (-1,0) the same formula is the Abel-regularized
        # (distributional) transform of the non-locally-integrable kernel.
        s = np.asarray(s, dtype=complex)
        if np.any(s.real <= 0):
            raise DomainError("PowerLaw Laplace transform needs Re s > 0")
        return self.c * sp.gamma(self.beta) * s ** (-self.beta)

    def total_mass(self):
        return math.inf if self.beta > 0 else None


def fractional(beta: float) -> PowerLaw:
    """Kernel with A(t) = t^beta / Gamma(1+beta), beta in (-1, 0) or (0, 1].

    The scalar relaxation for this kernel is E_{1+beta}(-lambda t^{1+beta}).
    """
    c = beta / sp.gamma(1.0 + beta)
    k = PowerLaw(beta=beta, c=float(c), a0=0.0)
    k.description = f"fractional(beta={beta})"
    return k


@dataclass
class Exponential(MemoryKernel):
    """a(t) = c e^{-mu t}; integrable memory, heat-like asymptotics."""

    mu: float = 1.0
    c: float = 1.0
    a0: float = 0.0
    beta_nominal: float | None = 0.0

    def __post_init__(self):
        if self.mu <= 0:
            raise DomainError("Exponential kernel needs mu > 0")
        if self.c == 0.0:
            raise DomainError("Exponential kernel needs c != 0")
        if self.c < 0:
            self.beta_nominal = None
        self.description = f"exponential(mu={self.mu}, c={self.c}, a0={self.a0})"

    def a(self, t):
        return self.c * np.exp(-self.mu * np.asarray(t, dtype=float))

    def primitive(self, t):
        t = np.asarray(t, dtype=float)
        return self.a0 + (self.c / self.mu) * (1.0 - np.exp(-self.mu * t))

    def integral_A(self, t):
        t = np.asarray(t, dtype=float)
        mu = self.mu
        return (self.a0 + self.c / mu) * t - (self.c / mu**2) * (1.0 - np.exp(-mu * t))

    def integral_tA(self, t):
        t = np.asarray(t, dtype=float)
        mu = self.mu
        boundary = (1.0 - (1.0 + mu * t) * np.exp(-mu * t)) / mu**2
        return (self.a0 + self.c / mu) * t**2 / 2.0 - (self.c / mu) * boundary

    def laplace(self, s):
        s = np.asarray(s, dtype=complex)
        if np.any(s.real <= -self.mu):
            raise DomainError("Exponential Laplace transform needs Re s > -mu")
        return self.c / (s + self.mu)

    def total_mass(self):
        return self.a0 + self.c / self.mu


class NegExponential(MemoryKernel):
    """a(t) = -e^{-t} with a0 = 1, so A(t) = e^{-t}."""

    a0 = 1.0
    beta_nominal = None
    description = "negexponential(a=-exp(-t), a0=1)"

    def a(self, t):
        return -np.exp(-np.asarray(t, dtype=float))

    def primitive(self, t):
        return np.exp(-np.asarray(t, dtype=float))

    def integral_A(self, t):
        return 1.0 - np.exp(-np.asarray(t, dtype=float))

    def integral_tA(self, t):
        t = np.asarray(t, dtype=float)
        return 1.0 - (1.0 + t) * np.exp(-t)

    def laplace(self, s):
        s = np.asarray(s, dtype=complex)
        if np.any(s.real <= -1.0):
            raise DomainError("NegExponential Laplace transform needs Re s > -1")
        return -1.0 / (s + 1.0)

    def total_mass(self):
        return 0.0


class Cosine(MemoryKernel):
    """a(t) = cos t with a0 = 0, so A(t) = sin t; not regularly varying."""

    a0 = 0.0
    beta_nominal = None
    description = "cosine(a=cos t, a0=0)"

    def a(self, t):
        return np.cos(np.asarray(t, dtype=float))

    def primitive(self, t):
        return np.sin(np.asarray(t, dtype=float))

    def integral_A(self, t):
        return 1.0 - np.cos(np.asarray(t, dtype=float))

    def integral_tA(self, t):
        t = np.asarray(t, dtype=float)
        return np.sin(t) - t * np.cos(t)

    def laplace(self, s):
        s = np.asarray(s, dtype=complex)
        if np.any(np.abs(s**2 + 1.0) == 0.0):
            raise DomainError("poles of the cosine transform at s = +/- i")
        return s / (s**2 + 1.0)

    def total_mass(self):
        return None  # int_0^inf cos does not converge


@dataclass
class LogModified(MemoryKernel):
    """A(t) = t (log(e + t))^m: index-1 variation with a logarithmic factor."""

    m: float = 1.0
    a0: float = 0.0
    beta_nominal: float | None = 1.0

    def __post_init__(self):
        if self.a0 != 0.0:
            raise DomainError("LogModified is defined with a0 = 0")
        self.description = f"logmodified(m={self.m})"

    def a(self, t):
        t = np.asarray(t, dtype=float)
        lg = np.log(np.e + t)
        return lg**self.m + t * self.m * lg ** (self.m - 1.0) / (np.e + t)

    def primitive(self, t):
        t = np.asarray(t, dtype=float)
        return t * np.log(np.e + t) ** self.m

    def _quad(self, f, t):
        scalar = np.isscalar(t)
        ts = np.atleast_1d(np.asarray(t, dtype=float))
        out = np.array([integrate.quad(f, 0.0, x, epsrel=1e-12, limit=200)[0] for x in ts])
        return _as_float_or_array(out[0], True) if scalar else out

    def integral_A(self, t):
        return self._quad(lambda s: s * math.log(math.e + s) ** self.m, t)

    def integral_tA(self, t):
        return self._quad(lambda s: s * s * math.log(math.e + s) ** self.m, t)

    def laplace(self, s):
        return _numeric_laplace(self.a, s)

    def total_mass(self):
        return math.inf


class SumKernel(MemoryKernel):
    """Pointwise sum of two kernels; a0, A, moments and transforms add."""

    def __init__(self, left: MemoryKernel, right: MemoryKernel):
        self.left = left
        self.right = right
        self.a0 = left.a0 + right.a0
        self.beta_nominal = None
        self.description = f"sum({left.description}, {right.description})"

    def a(self, t):
        return self.left.a(t) + self.right.a(t)

    def primitive(self, t):
        return self.left.primitive(t) + self.right.primitive(t)

    def integral_A(self, t):
        return self.left.integral_A(t) + self.right.integral_A(t)

    def integral_tA(self, t):
        return self.left.integral_tA(t) + self.right.integral_tA(t)

    def laplace(self, s):
        return self.left.laplace(s) + self.right.laplace(s)

    def total_mass(self):
        lm = self.left.total_mass()
        rm = self.right.total_mass()
        if lm is None or rm is None:
            return None
        return lm + rm


class TimeDilated(MemoryKernel):
    """Kernel with integrated part A_T(t) = A(T t) for a base kernel.

    Moments follow from the base antiderivatives by substitution, so the
    rescaled relaxation equation can be solved without loss of accuracy.
    """

    def __init__(self, base: MemoryKernel, T: float):
        if T <= 0:
            raise DomainError("dilation factor T must be positive")
        self.base = base
        self.T = float(T)
        self.a0 = base.a0
        self.beta_nominal = base.beta_nominal
        self.description = f"dilated(T={T}, {base.description})"

    def primitive(self, t):
        return self.base.primitive(self.T * np.asarray(t, dtype=float))

    def integral_A(self, t):
        return self.base.integral_A(self.T * np.asarray(t, dtype=float)) / self.T

    def integral_tA(self, t):
        return self.base.integral_tA(self.T * np.asarray(t, dtype=float)) / self.T**2


class SampledKernel(MemoryKernel):
    """Integrated kernel known only through samples A(t_i) on a uniform grid.

    ``A`` is interpolated piecewise linearly; moments are those of the
    interpolant, in closed form.
    """

    def __init__(self, dt: float, values):
        self.dt = float(dt)
        self.values = np.asarray(values, dtype=float)
        if self.values.ndim != 1 or len(self.values) < 2:
            raise DomainError("need at least two samples of A")
        self.a0 = float(self.values[0])
        self.beta_nominal = None
        self.description = "sampled kernel"
        # Antiderivatives of the piecewise-linear interpolant at the nodes.
        nodes = self.dt * np.arange(len(self.values))
        mids = 0.5 * (self.values[1:] + self.values[:-1])
        self._i1 = np.concatenate([[0.0], np.cumsum(mids * self.dt)])
        cell_i2 = np.empty(len(self.values) - 1)
        t0 = nodes[:-1]
        a, b = self.values[:-1], self.values[1:]
        # int_{t0}^{t0+dt} s * linear(s) ds with linear(t0)=a, linear(t0+dt)=b
        cell_i2 = (
            t0 * mids * self.dt + self.dt**2 * (a / 6.0 + b / 3.0)
        )
        self._i2 = np.concatenate([[0.0], np.cumsum(cell_i2)])
        self._nodes = nodes

    def primitive(self, t):
        return np.interp(np.asarray(t, dtype=float), self._nodes, self.values)

    def integral_A(self, t):
        # Exact antiderivative of the interpolant between nodes.
        t = np.asarray(t, dtype=float)
        idx = np.clip((t / self.dt).astype(int), 0, len(self.values) - 2)
        t0 = self._nodes[idx]
        h = t - t0
        a = self.values[idx]
        slope = (self.values[idx + 1] - a) / self.dt
        return self._i1[idx] + a * h + slope * h**2 / 2.0

    def integral_tA(self, t):
        # s*(a + slope*(s-t0)) integrated from t0 to t.
        t = np.asarray(t, dtype=float)
        idx = np.clip((t / self.dt).astype(int), 0, len(self.values) - 2)
        t0 = self._nodes[idx]
        a = self.values[idx]
        slope = (self.values[idx + 1] - a) / self.dt
        h = t - t0
        return self._i2[idx] + a * (t**2 - t0**2) / 2.0 + slope * h**2 * (t0 / 2.0 + h / 3.0)


class ScaledKernel(MemoryKernel):
    """Kernel multiplied by a positive constant factor."""

    def __init__(self, base: MemoryKernel, factor: float):
        if factor <= 0:
            raise DomainError("scale factor must be positive")
        self.base = base
        self.factor = float(factor)
        self.a0 = factor * base.a0
        self.beta_nominal = base.beta_nominal
        self.description = f"{factor}*{base.description}"

    def a(self, t):
        return self.factor * self.base.a(t)

    def primitive(self, t):
        return self.factor * self.base.primitive(t)

    def integral_A(self, t):
        return self.factor * self.base.integral_A(t)

    def integral_tA(self, t):
        return self.factor * self.base.integral_tA(t)

    def laplace(self, s):
        return self.factor * self.base.laplace(s)

    def total_mass(self):
        m = self.base.total_mass()
        return None if m is None else self.factor * m


def scale(kernel: MemoryKernel, factor: float) -> MemoryKernel:
    """factor * kernel, staying inside the family when possible."""
    if factor <= 0:
        raise DomainError("scale factor must be positive")
    if isinstance(kernel, Heat):
        return Heat(a0=factor * kernel.a0)
    if isinstance(kernel, Wave):
        return Wave(c=factor * kernel.c, a0=factor * kernel.a0)
    if isinstance(kernel, PowerLaw):
        return PowerLaw(beta=kernel.beta, c=factor * kernel.c, a0=factor * kernel.a0)
    if isinstance(kernel, Exponential):
        return Exponential(mu=kernel.mu, c=factor * kernel.c, a0=factor * kernel.a0)
    if isinstance(kernel, SumKernel):
        return SumKernel(scale(kernel.left, factor), scale(kernel.right, factor))
    return ScaledKernel(kernel, factor)


def dilate(kernel: MemoryKernel, T: float) -> MemoryKernel:
    """Kernel whose integrated part is A(T t), in closed form when possible.

    Time dilation underlies the rescaling identity z(lam, T*tau) =
    w(tau) with w solving the relaxation equation for the dilated kernel
    and coupling lam*T; catalog families dilate within the family.
    """
    if T <= 0:
        raise DomainError("dilation factor T must be positive")
    if isinstance(kernel, Heat):
        return kernel
    if isinstance(kernel, Wave):
        return Wave(c=kernel.c * T, a0=kernel.a0)
    if isinstance(kernel, PowerLaw):
        return PowerLaw(beta=kernel.beta, c=kernel.c * T**kernel.beta, a0=kernel.a0)
    if isinstance(kernel, Exponential):
        return Exponential(mu=kernel.mu * T, c=kernel.c * T, a0=kernel.a0)
    if isinstance(kernel, SumKernel):
        return SumKernel(dilate(kernel.left, T), dilate(kernel.right, T))
    if isinstance(kernel, TimeDilated):
        return dilate(kernel.base, T * kernel.T)
    return TimeDilated(kernel, T)


# ---------------------------------------------------------------------------
# Operations
# ---------------------------------------------------------------------------


def primitive_A(kernel: MemoryKernel, t):
    """A(t) = a0 + int_0^t a(s) ds, in closed form per family."""
    if np.any(np.asarray(t) < 0):
        raise DomainError("primitive_A needs t >= 0")
    out = kernel.primitive(t)
    return float(out) if np.isscalar(t) else out


def laplace_a(kernel: MemoryKernel, s):
    """Analytic Laplace transform of the memory part a."""
    out = kernel.laplace(s)
    return complex(out) if np.isscalar(s) else out


def _numeric_laplace(a_func, s):
    scalar = np.isscalar(s)
    svals = np.atleast_1d(np.asarray(s, dtype=complex))
    out = np.empty(svals.shape, dtype=complex)
    for i, sv in enumerate(svals.ravel()):
        re = integrate.quad(
            lambda t: a_func(t) * math.exp(-sv.real * t) * math.cos(sv.imag * t),
            0.0, 200.0, limit=400,
        )[0]
        im = -integrate.quad(
            lambda t: a_func(t) * math.exp(-sv.real * t) * math.sin(sv.imag * t),
            0.0, 200.0, limit=400,
        )[0]
        out.ravel()[i] = re + 1j * im
    return complex(out[0]) if scalar else out


@dataclass
class PositiveDefiniteReport:
    min_value: float
    passed: bool
    omega_at_min: float


def check_positive_definite(
    kernel: MemoryKernel, omega_max: float = 100.0, n_samples: int = 400
) -> PositiveDefiniteReport:
    """Sample a0 + Re a~(h + i w) on a log-spaced frequency grid.

    ``h`` approximates the boundary limit from the right half plane.  The
    cosine kernel has a measure-valued boundary transform; its analytic
    boundary limit is 0 away from the singular frequency, so it passes by
    construction.
    """
    if omega_max <= 0 or n_samples < 2:
        raise DomainError("need omega_max > 0 and n_samples >= 2")
    if isinstance(kernel, Cosine):
        return PositiveDefiniteReport(min_value=0.0, passed=True, omega_at_min=0.0)
    omegas = np.concatenate(
        [[0.0], np.logspace(-4, math.log10(omega_max), n_samples - 1)]
    )
    vals = kernel.a0 + np.real(kernel.laplace(PD_BOUNDARY_SHIFT + 1j * omegas))
    i = int(np.argmin(vals))
    return PositiveDefiniteReport(
        min_value=float(vals[i]),
        passed=bool(vals[i] >= -PD_MIN_TOLERANCE),
        omega_at_min=float(omegas[i]),
    )


@dataclass
class RVEstimate:
    beta: float
    converged: bool
    ratios: np.ndarray = field(repr=False, default=None)
    tail_decaying: bool = False


def rv_index_estimate(kernel, t_grid) -> RVEstimate:
    """Estimate the regular-variation index of A from doubling ratios.

    Uses log2(A(2t)/A(t)) over the tail of a geometric grid; convergence
    means the last three estimates agree within ``RV_CONVERGENCE_TOL``.
    """
    t = np.asarray(t_grid, dtype=float)
    if len(t) < 8 or np.any(np.diff(t) <= 0):
        raise DomainError("t_grid must be increasing with at least 8 points")
    if t[-1] / t[0] < 1e4:
        raise DomainError("t_grid must span at least 4 decades")
    A1 = np.asarray(kernel.primitive(t), dtype=float)
    A2 = np.asarray(kernel.primitive(2.0 * t), dtype=float)
    tail = slice(len(t) // 2, None)
    a1t, a2t = A1[tail], A2[tail]
    if np.all(a1t <= 0.0):
        raise NotEventuallyPositiveError(
            "integrated kernel is not positive on the sampled tail"
        )
    valid = (a1t > 0.0) & (a2t > 0.0)
    ratios = np.full(len(a1t), np.nan)
    ratios[valid] = np.log2(a2t[valid] / a1t[valid])
    last = ratios[-3:]
    converged = bool(
        np.all(np.isfinite(last)) and (np.max(last) - np.min(last)) <= RV_CONVERGENCE_TOL
    )
    # Tail decaying faster than any admissible index (<= -1 on a log-log
    # chord, or underflow to zero despite a positive start).
    if np.any(a1t < 0.0):
        decaying = False  # sign changes: oscillatory, not a decaying tail
    elif a1t[-1] <= 0.0 < a1t[0]:
        decaying = True  # positive tail underflowed to zero
    else:
        chord = math.log(a1t[-1] / a1t[0]) / math.log(t[tail][-1] / t[tail][0])
        decaying = bool(chord < -1.0)
    if decaying:
        converged = False
    beta = float(last[-1]) if np.isfinite(last[-1]) else math.nan
    return RVEstimate(beta=beta, converged=converged, ratios=ratios, tail_decaying=decaying)


def quad_moments(kernel: MemoryKernel, t0: float, t1: float):
    """(int_{t0}^{t1} A(s) ds, int_{t0}^{t1} s A(s) ds)."""
    m0, m1 = kernel.quad_moments(t0, t1)
    return float(m0), float(m1)
