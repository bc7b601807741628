"""Complex-argument special functions with selectable working precision.

Everything downstream (Green's-function matrix elements, basis coefficients)
reduces to the gamma function, the Gauss and Kummer hypergeometric series and
Laguerre polynomials, evaluated at complex parameters anywhere quadrature
contours can reach.  Two working precisions are supported:

* ``Precision.STANDARD`` -- complex double arithmetic (~16 significant
  digits), with automatic escalation to multiprecision when a cancellation
  monitor detects that too many digits were lost.
* ``Precision.EXTENDED`` -- mpmath multiprecision carrying >= 30 significant
  digits end to end; inputs are promoted to ``mpmath.mpc`` and results are
  returned as ``mpmath.mpc`` so composed expressions keep the full precision.

The Gauss series is evaluated directly for small arguments and through the
standard fractional-linear connection formulas elsewhere (argument mapped to
z/(z-1), 1-z or 1/z, choosing the image of smallest modulus).  Degenerate
integer parameter differences, where the two-term connection formulas break
down, are delegated to mpmath's limit-taking implementation.
"""

from __future__ import annotations

import enum
import math

import mpmath
import numpy as np
from scipy.special import loggamma as _sp_loggamma

__all__ = [
    "Precision",
    "SpecFunError",
    "PoleError",
    "NonConvergenceError",
    "complex_lgamma",
    "gauss_2f1",
    "kummer_1f1",
    "laguerre",
]

MAX_TERMS = 100_000

#: double precision keeps ~15.95 decimal digits
_STANDARD_DIGITS = 16.0


class SpecFunError(ValueError):
    """Invalid argument for a special-function evaluation."""


class PoleError(SpecFunError):
    """Evaluation requested at (or too close to) a pole."""


class NonConvergenceError(RuntimeError):
    """Series/iteration budget exhausted without reaching the tolerance."""


class Precision(enum.Enum):
    """Working precision for special-function evaluation."""

    STANDARD = "standard"
    EXTENDED = "extended"

    @property
    def dps(self) -> int:
        """Decimal digits carried internally by this mode."""
        return 16 if self is Precision.STANDARD else 36


def _is_nonpositive_int(z: complex, tol: float = 1e-12) -> bool:
    z = complex(z)
    return abs(z.imag) <= tol and z.real <= tol and abs(z.real - round(z.real)) <= tol


def _near_int(x: complex, tol: float) -> bool:
    return abs(x.imag) <= tol and abs(x.real - round(x.real)) <= tol


# ---------------------------------------------------------------------------
# log-gamma
# ---------------------------------------------------------------------------

def complex_lgamma(z: complex, p: Precision = Precision.STANDARD):
    """Principal branch of log Gamma(z) for complex z.

    Standard mode evaluates in complex doubles; extended mode returns an
    ``mpmath.mpc`` carrying the full working precision.
    """
    if _is_nonpositive_int(z):
        raise PoleError(f"lgamma pole at non-positive integer z={z}")
    if p is Precision.EXTENDED:
        with mpmath.workdps(p.dps):
            return mpmath.loggamma(mpmath.mpc(z))
    out = complex(_sp_loggamma(complex(z)))
    if not (math.isfinite(out.real) and math.isfinite(out.imag)):
        raise SpecFunError(f"lgamma overflow/invalid at z={z}")
    return out


# ---------------------------------------------------------------------------
# Gauss hypergeometric 2F1
# ---------------------------------------------------------------------------

def _gauss_series(a, b, c, z, tol: float):
    """Direct Gauss series; returns (sum, largest |term|)."""
    tot = 1.0 + 0.0j
    term = 1.0 + 0.0j
    peak = 1.0
    for n in range(MAX_TERMS):
        term = term * (a + n) * (b + n) / ((c + n) * (1.0 + n)) * z
        tot += term
        at = abs(term)
        peak = max(peak, at)
        if at <= tol * abs(tot):
            return tot, peak
    raise NonConvergenceError(f"2F1 series stalled at |z|={abs(z):.3f}")


def _terminating_2f1(nneg: int, other, c, z):
    """2F1 with a first parameter equal to the non-positive integer -nneg."""
    tot = 1.0 + 0.0j
    term = 1.0 + 0.0j
    for s in range(nneg):
        denom = (c + s) * (s + 1.0)
        if denom == 0:
            raise PoleError(f"terminating 2F1 hit zero denominator, c={c}")
        term = term * (-nneg + s) * (other + s) / denom * z
        tot += term
    return tot


def _mp_2f1(a, b, c, z, dps: int):
    with mpmath.workdps(dps):
        return mpmath.hyp2f1(mpmath.mpc(a), mpmath.mpc(b), mpmath.mpc(c), mpmath.mpc(z))


def gauss_2f1(a, b, c, z, p: Precision = Precision.STANDARD):
    """Gauss hypergeometric 2F1(a, b; c; z) on the principal branch.

    Terminating cases (a or b a non-positive integer) are summed exactly.
    Otherwise standard mode picks the smallest image of z under the group
    {z, z/(z-1), 1-z, 1/z} and applies the matching connection formula,
    falling back to multiprecision for the degenerate integer-parameter
    cases and for z near the unit-circle corner points.
    """
    a, b, c, z = complex(a), complex(b), complex(c), complex(z)

    # terminating series take precedence over the c-pole check
    a_term = _is_nonpositive_int(a)
    b_term = _is_nonpositive_int(b)
    if a_term or b_term:
        na = int(round(-a.real)) if a_term else None
        nb = int(round(-b.real)) if b_term else None
        if na is not None and (nb is None or na <= nb):
            n, other = na, b
        else:
            n, other = nb, a
        if _is_nonpositive_int(c) and round(c.real) > -n:
            raise PoleError(f"2F1 pole: c={c} reached before termination at {n}")
        return _terminating_2f1(n, other, c, z)
    if _is_nonpositive_int(c):
        raise PoleError(f"2F1 pole at non-positive integer c={c}")

    if p is Precision.EXTENDED:
        return _mp_2f1(a, b, c, z, p.dps)

    if z == 0:
        return 1.0 + 0.0j
    if z == 1:
        s = c - a - b
        if s.real <= 0:
            raise SpecFunError(f"2F1 branch point at z=1 with Re(c-a-b)={s.real}")
        g = _sp_loggamma
        return complex(np.exp(g(c) + g(s) - g(c - a) - g(c - b)))

    tol = 1e-17
    w_pfaff = z / (z - 1.0)
    images = {"direct": abs(z), "pfaff": abs(w_pfaff), "recip": abs(1.0 / z), "onemz": abs(1.0 - z)}

    value = peak = None
    route = min(images, key=images.get)
    if images[route] > 0.8 and images["onemz"] <= 0.85:
        route = "onemz"

    if route == "direct" and images["direct"] <= 0.8:
        value, peak = _gauss_series(a, b, c, z, tol)
    elif route == "pfaff" and images["pfaff"] <= 0.8:
        # Pfaff on whichever parameter is smaller keeps the series tame
        if abs(b) <= abs(a):
            f, pk = _gauss_series(c - a, b, c, w_pfaff, tol)
            value = (1.0 - z) ** (-b) * f
        else:
            f, pk = _gauss_series(a, c - b, c, w_pfaff, tol)
            value = (1.0 - z) ** (-a) * f
        peak = pk * abs(value / f) if f != 0 else pk
    elif route == "onemz" and images["onemz"] <= 0.85:
        s = c - a - b
        if _near_int(s, 1e-6):
            return _complex_or_keep(_mp_2f1(a, b, c, z, 25))
        g = _sp_loggamma
        u = 1.0 - z
        f1, p1 = _gauss_series(a, b, 1.0 - s, u, tol)
        f2, p2 = _gauss_series(c - a, c - b, 1.0 + s, u, tol)
        t1 = complex(np.exp(g(c) + g(s) - g(c - a) - g(c - b))) * f1
        t2 = u ** s * complex(np.exp(g(c) + g(-s) - g(a) - g(b))) * f2
        value = t1 + t2
        peak = max(abs(t1), abs(t2))
    elif route == "recip" and images["recip"] <= 0.8:
        if _near_int(b - a, 1e-6):
            return _complex_or_keep(_mp_2f1(a, b, c, z, 25))
        g = _sp_loggamma
        zi = 1.0 / z
        f1, _ = _gauss_series(a, 1.0 - c + a, 1.0 - b + a, zi, tol)
        f2, _ = _gauss_series(b, 1.0 - c + b, 1.0 - a + b, zi, tol)
        t1 = complex(np.exp(g(c) + g(b - a) - g(b) - g(c - a))) * (-z) ** (-a) * f1
        t2 = complex(np.exp(g(c) + g(a - b) - g(a) - g(c - b))) * (-z) ** (-b) * f2
        value = t1 + t2
        peak = max(abs(t1), abs(t2))
    else:
        # unit-circle corner region: no small image exists
        return _complex_or_keep(_mp_2f1(a, b, c, z, 25))

    if value == 0 or not np.isfinite(value):
        return _complex_or_keep(_mp_2f1(a, b, c, z, 30))
    lost = math.log10(max(peak / abs(value), 1.0))
    if lost > 3.5:
        return _complex_or_keep(_mp_2f1(a, b, c, z, int(_STANDARD_DIGITS + lost + 5)))
    return value


def _complex_or_keep(v):
    return complex(v)


# ---------------------------------------------------------------------------
# Kummer confluent hypergeometric 1F1
# ---------------------------------------------------------------------------

def _kummer_series(a, b, z, tol: float):
    tot = 1.0 + 0.0j
    term = 1.0 + 0.0j
    peak = 1.0
    for n in range(MAX_TERMS):
        term = term * (a + n) / ((b + n) * (1.0 + n)) * z
        tot += term
        at = abs(term)
        peak = max(peak, at)
        if at <= tol * abs(tot):
            return tot, peak
    raise NonConvergenceError(f"1F1 series stalled at |z|={abs(z):.3f}")


def kummer_1f1(a, b, z, p: Precision = Precision.STANDARD):
    """Confluent hypergeometric 1F1(a; b; z) for complex arguments."""
    a, b, z = complex(a), complex(b), complex(z)
    if _is_nonpositive_int(b) and not (_is_nonpositive_int(a) and -a.real <= -b.real):
        raise PoleError(f"1F1 pole at non-positive integer b={b}")
    if a == 0 or z == 0:
        return 1.0 + 0.0j
    if _is_nonpositive_int(a):
        # terminating polynomial
        n = int(round(-a.real))
        tot = 1.0 + 0.0j
        term = 1.0 + 0.0j
        for s in range(n):
            term = term * (a + s) / ((b + s) * (1.0 + s)) * z
            tot += term
        return tot
    if p is Precision.EXTENDED:
        with mpmath.workdps(p.dps):
            return mpmath.hyp1f1(mpmath.mpc(a), mpmath.mpc(b), mpmath.mpc(z))

    # Kummer's transformation keeps the series terms positive-leaning
    if z.real < 0:
        f, peak = _kummer_series(b - a, b, -z, 1e-17)
        value = np.exp(z) * f
        scale = abs(np.exp(z))
        peak *= scale
    else:
        value, peak = _kummer_series(a, b, z, 1e-17)
    if value == 0 or not np.isfinite(value):
        lost = 30.0
    else:
        lost = math.log10(max(peak / abs(value), 1.0))
    if lost > 4.0:
        with mpmath.workdps(int(_STANDARD_DIGITS + lost + 4)):
            return complex(mpmath.hyp1f1(mpmath.mpc(a), mpmath.mpc(b), mpmath.mpc(z)))
    return value


# ---------------------------------------------------------------------------
# Laguerre polynomials
# ---------------------------------------------------------------------------

def laguerre(n: int, x):
    """Laguerre polynomial L_n(x) by the forward three-term recurrence.

    Accepts scalars or numpy arrays for ``x``.
    """
    if n < 0:
        raise SpecFunError(f"laguerre order must be non-negative, got {n}")
    x = np.asarray(x, dtype=float) if not np.isscalar(x) else x
    lm1 = np.ones_like(x) if isinstance(x, np.ndarray) else 1.0
    if n == 0:
        return lm1
    lcur = 1.0 - x
    for j in range(1, n):
        lm1, lcur = lcur, ((2 * j + 1 - x) * lcur - j * lm1) / (j + 1)
    return lcur
