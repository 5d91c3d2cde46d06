"""Special functions for the fractional-diffusion limit profiles.

The central object is the Mittag-Leffler function ``E_alpha`` evaluated on
the negative real axis for orders ``0 < alpha <= 2``.  The evaluation
strategy combines

* exact closed forms for ``alpha in {1/2, 1, 2}``,
* the Taylor series ``sum_k z^k / Gamma(1 + alpha k)`` with compensated
  summation, escalating to multi-precision arithmetic when the series
  suffers catastrophic cancellation, and
* the algebraic asymptotic expansion ``-sum_n z^{-n} / Gamma(1 - alpha n)``
  for large ``|z|`` (reciprocal Gamma taken as zero at the poles),
  augmented for ``1 < alpha < 2`` by the exponentially damped oscillatory
  contribution of the pair of complex saddle terms.

The two expansions are complementary: the asymptotic series fails only when
``|z|^{1/alpha}`` is moderate, which is exactly the regime where the Taylor
series is cheap at modest extra precision.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import mpmath
import numpy as np
from scipy import special as sp

from .errors import DomainError

# Contract tolerances.
GAMMA_REL_TOL = 1e-12
ERFC_REL_TOL = 1e-10
ML_CLOSED_FORM_REL_TOL = 1e-13
ML_SEAM_TOL = 1e-6

#: Number of decimal digits of cancellation above which the double-precision
#: Taylor loop is abandoned in favor of mpmath.
_TAYLOR_DOUBLE_DIGITS = 6.0

#: Cancellation budget above which the Taylor series is abandoned outright.
#: Whenever this triggers, |z|^{1/alpha} is large and the asymptotic
#: expansion is accurate, so the two regimes always overlap.
_TAYLOR_MP_MAX_DIGITS = 1200.0

#: Target absolute accuracy for accepting the asymptotic expansion between
#: the two cutoffs.
_ASYMPTOTIC_ACCEPT = 1e-9


@dataclass(frozen=True)
class MittagLefflerParams:
    """Evaluation parameters for ``mittag_leffler``.

    ``series_cutoff`` and ``asymptotic_cutoff`` bound the intermediate
    region in ``|z|`` where the regime is chosen adaptively.
    """

    alpha: float
    series_cutoff: float = 30.0
    asymptotic_cutoff: float = 40.0
    n_asymptotic_terms: int = 10

    def __post_init__(self):
        if not 0.0 < self.alpha <= 2.0:
            raise DomainError(f"alpha must lie in (0, 2], got {self.alpha}")
        if not self.series_cutoff < self.asymptotic_cutoff:
            raise DomainError("series_cutoff must be below asymptotic_cutoff")
        if self.n_asymptotic_terms < 1:
            raise DomainError("n_asymptotic_terms must be positive")


def gamma(x):
    """Gamma function for positive real arguments."""
    xa = np.asarray(x, dtype=float)
    if np.any(xa <= 0.0):
        raise DomainError("gamma requires x > 0")
    out = sp.gamma(xa)
    return float(out) if np.isscalar(x) else out


def erfc(x):
    """Complementary error function."""
    out = sp.erfc(np.asarray(x, dtype=float))
    return float(out) if np.isscalar(x) else out


def _taylor_double(alpha: float, x: float) -> float:
    """Kahan-compensated Taylor sum of E_alpha(-x) in double precision."""
    total = 0.0
    comp = 0.0
    logx = math.log(x) if x > 0.0 else -math.inf
    sign = 1.0
    k = 0
    prev = math.inf
    while True:
        term = sign * math.exp(k * logx - math.lgamma(1.0 + alpha * k))
        y = term - comp
        t = total + y
        comp = (t - total) - y
        total = t
        mag = abs(term)
        if mag < 1e-18 * (1.0 + abs(total)) and mag < prev:
            break
        prev = mag
        sign = -sign
        k += 1
        if k > 100000:  # pragma: no cover - safety valve
            break
    return total


def _taylor_mp(alpha: float, x: float, digits: int) -> float:
    """Taylor sum of E_alpha(-x) in mpmath with `digits` extra precision.

    The Gamma argument ``1 + alpha*k`` must be formed in working precision:
    the alternating sum is so ill-conditioned that a double-precision
    rounding of the argument corrupts the result entirely.
    """
    with mpmath.mp.workdps(digits + 25):
        a = mpmath.mpf(alpha)
        z = -mpmath.mpf(x)
        total = mpmath.mpf(0)
        k = 0
        zk = mpmath.mpf(1)
        tiny = mpmath.mpf(10) ** (-(digits + 20))
        prev = mpmath.inf
        while True:
            term = zk / mpmath.gamma(1 + a * k)
            total += term
            mag = abs(term)
            if mag < tiny * (1 + abs(total)) and mag < prev:
                break
            prev = mag
            k += 1
            zk *= z
        return float(total)


def _asymptotic(alpha: float, x: float, n_max: int):
    """Asymptotic value of E_alpha(-x) and an error estimate.

    Returns ``(value, err)`` where ``err`` is the magnitude of the first
    neglected algebraic term (optimal truncation within ``n_max`` terms).
    """
    z = -x
    total = 0.0
    prev_mag = math.inf
    err = math.inf
    n = 1
    while n <= n_max:
        term = -(z ** (-n)) * sp.rgamma(1.0 - alpha * n)
        mag = abs(term)
        if mag > prev_mag:
            err = prev_mag
            break
        total += term
        prev_mag = mag if mag > 0.0 else prev_mag
        n += 1
    else:
        # Used all terms; estimate with the next one.
        nxt = abs(z ** (-(n_max + 1)) * sp.rgamma(1.0 - alpha * (n_max + 1)))
        err = min(prev_mag, nxt) if nxt > 0.0 else prev_mag
    if alpha > 1.0:
        r = x ** (1.0 / alpha)
        c = math.cos(math.pi / alpha)
        s = math.sin(math.pi / alpha)
        total += (2.0 / alpha) * math.exp(r * c) * math.cos(r * s)
    return total, err


def _ml_scalar(alpha: float, z: float, params: MittagLefflerParams) -> float:
    if z > 0.0:
        raise DomainError("mittag_leffler is defined here for z <= 0 only")
    if z == 0.0:
        return 1.0
    if alpha == 1.0:
        return math.exp(z)
    if alpha == 2.0:
        return math.cos(math.sqrt(-z))
    if alpha == 0.5:
        # E_{1/2}(z) = e^{z^2} erfc(-z); erfcx avoids overflow.
        return float(sp.erfcx(-z))
    x = -z
    # log10 of the largest Taylor term ~ cancellation in the alternating sum.
    digits = 0.4343 * x ** (1.0 / alpha)
    if x <= params.series_cutoff and digits <= _TAYLOR_MP_MAX_DIGITS:
        return _taylor_smart(alpha, x, digits)
    value, err = _asymptotic(alpha, x, params.n_asymptotic_terms)
    if err <= _ASYMPTOTIC_ACCEPT:
        return value
    if digits <= _TAYLOR_MP_MAX_DIGITS:
        return _taylor_smart(alpha, x, digits)
    return value  # pragma: no cover - cannot occur: regimes overlap


def _taylor_smart(alpha: float, x: float, digits: float) -> float:
    if digits <= _TAYLOR_DOUBLE_DIGITS:
        return _taylor_double(alpha, x)
    return _taylor_mp(alpha, x, int(digits) + 5)


def mittag_leffler(alpha, z, params: MittagLefflerParams | None = None):
    """Evaluate E_alpha(z) for z <= 0 and 0 < alpha <= 2.

    Accepts scalar or array ``z``.  Bounded on the negative real axis for
    all supported orders.
    """
    if params is None:
        params = MittagLefflerParams(alpha=float(alpha))
    elif params.alpha != alpha:
        raise DomainError("params.alpha does not match alpha argument")
    alpha = float(alpha)
    if np.isscalar(z):
        return _ml_scalar(alpha, float(z), params)
    za = np.asarray(z, dtype=float)
    if np.any(za > 0.0):
        raise DomainError("mittag_leffler is defined here for z <= 0 only")
    if alpha == 1.0:
        return np.exp(za)
    if alpha == 2.0:
        return np.cos(np.sqrt(-za))
    if alpha == 0.5:
        return sp.erfcx(-za)
    out = np.empty(za.shape, dtype=float)
    flat = za.ravel()
    dst = out.ravel()
    for i, v in enumerate(flat):
        dst[i] = _ml_scalar(alpha, float(v), params)
    return out
