"""Vectorized Gauss-hypergeometric kernels for the Green's-matrix hot path.

The closed-form Sturmian matrix elements of the two-dimensional Coulomb
Green's function need 2F1(a, b; c; z) for the specific parameter family

    a = K + 1 - 2*ell          (positive integer)
    b = i*tau - ell
    c = i*tau + K + 2 - ell    (so c - a - b = 1 + 2*ell, a positive integer)

evaluated at thousands of contour points simultaneously.  The evaluator here
dispatches lanes by region: direct series inside the unit disk, the Pfaff map
z -> z/(z-1), the logarithmic expansion around z = 1 (the connection formula
degenerates because c - a - b is an integer), the 1/z expansion far out, and
an mpmath fallback for the rare unit-circle corner lanes none of the series
reach.  All series run with lane masks and drop converged lanes.
"""

from __future__ import annotations

import math

import mpmath
import numpy as np
from scipy.special import loggamma

from .specfun import MAX_TERMS, NonConvergenceError

_EULER = 0.5772156649015328606065


def gauss_series_batch(a, b, c, z, tol: float = 1e-17):
    """Direct Gauss series over lanes; parameters broadcast against z."""
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    shape = z.shape
    aw = np.broadcast_to(np.asarray(a, dtype=complex), shape).ravel()
    bw = np.broadcast_to(np.asarray(b, dtype=complex), shape).ravel()
    cw = np.broadcast_to(np.asarray(c, dtype=complex), shape).ravel()
    zw = z.ravel()

    out = np.ones(zw.shape, dtype=complex)
    pos = np.arange(zw.size)
    tot = np.ones(zw.size, dtype=complex)
    term = np.ones(zw.size, dtype=complex)
    k = 0
    while pos.size:
        term = term * (aw + k) * (bw + k) / ((cw + k) * (k + 1.0)) * zw
        tot = tot + term
        k += 1
        if k >= MAX_TERMS:
            raise NonConvergenceError(f"2F1 series stalled, max |z|={np.abs(zw).max():.4f}")
        done = np.abs(term) <= tol * np.abs(tot)
        if done.all():
            out[pos] = tot
            break
        if done.mean() > 0.35 and pos.size > 256:
            out[pos[done]] = tot[done]
            keep = ~done
            pos, tot, term = pos[keep], tot[keep], term[keep]
            aw, bw, cw, zw = aw[keep], bw[keep], cw[keep], zw[keep]
    return out.reshape(shape)


def digamma_batch(z):
    """Complex digamma via the shift recurrence and Stirling tail."""
    z = np.asarray(z, dtype=complex).copy()
    acc = np.zeros_like(z)
    for _ in range(16):
        msk = z.real < 10.0
        if not msk.any():
            break
        acc[msk] -= 1.0 / z[msk]
        z[msk] += 1.0
    inv = 1.0 / z
    inv2 = inv * inv
    s = np.log(z) - 0.5 * inv
    p = inv2.copy()
    for cn in (1 / 12, -1 / 120, 1 / 252, -1 / 240, 1 / 132, -691 / 32760, 1 / 12):
        s -= cn * p
        p = p * inv2
    return acc + s


def _log_expansion_around_one(b, a_int: int, m_int: int, z, tol: float = 1e-16):
    """2F1(a,b;a+b+m;z) for integer a >= 1 and integer m >= 1, |1-z| < 1.

    Logarithmic limit form of the z -> 1-z connection formula (the generic
    two-series version degenerates when c - a - b is an integer).
    """
    a = complex(a_int)
    m = m_int
    w = 1.0 - z
    c = a + b + m

    tot1 = np.zeros_like(z)
    term = np.ones_like(z)
    for k in range(m):
        if k > 0:
            term = term * ((a + k - 1) * (b + k - 1)) / (k * (k - m)) * w
        tot1 = tot1 + term
    tot1 = tot1 * np.exp(loggamma(np.full_like(b, m)) + loggamma(c)
                         - loggamma(a + m) - loggamma(b + m))

    lw = np.log(w)
    pa = digamma_batch(np.full_like(b, a + m))
    pb = digamma_batch(b + m)
    hk = 0.0
    hkm = sum(1.0 / i for i in range(1, m + 1))
    term = np.full_like(z, 1.0 / math.factorial(m))
    tot2 = np.zeros_like(z)
    active = np.ones(z.shape, dtype=bool)
    for k in range(MAX_TERMS):
        if k > 0:
            term = term * ((a + m + k - 1) * (b + m + k - 1)) / (k * (k + m)) * w
            hk += 1.0 / k
            hkm += 1.0 / (k + m)
            pa = pa + 1.0 / (a + m + k - 1)
            pb = pb + 1.0 / (b + m + k - 1)
        piece = term * (lw - (-_EULER + hk) - (-_EULER + hkm) + pa + pb)
        tot2 = tot2 + np.where(active, piece, 0.0)
        active = np.abs(piece) > tol * np.abs(tot2)
        if k > 3 and not active.any():
            break
    else:
        raise NonConvergenceError("2F1 log expansion around z=1 stalled")
    pref = -((-1.0) ** m) * np.exp(loggamma(c) - loggamma(np.full_like(b, a)) - loggamma(b))
    return tot1 + pref * w ** m * tot2


def _reciprocal_expansion(a_int: int, b, c, z):
    """2F1 via the 1/z connection formula; b - a must stay off the integers."""
    a = complex(a_int)
    g = loggamma
    zi = 1.0 / z
    f1 = gauss_series_batch(np.full_like(b, a), 1.0 - c + a, 1.0 - b + a, zi)
    f2 = gauss_series_batch(b, 1.0 - c + b, 1.0 - a + b, zi)
    t1 = np.exp(g(c) + g(b - a) - g(b) - g(c - a)) * (-z) ** (-a) * f1
    t2 = np.exp(g(c) + g(a - b) - g(np.full_like(b, a)) - g(c - b)) * (-z) ** (-b) * f2
    return t1 + t2


def hyp2f1_green(a_int: int, m_int: int, b, c, z):
    """Batched 2F1(a_int, b; c; z) with c - a_int - b == m_int (integer >= 1).

    Lanes are dispatched to the cheapest convergent representation; the few
    lanes near the unit-circle corner points fall back to mpmath.
    """
    b = np.asarray(b, dtype=complex)
    c = np.asarray(c, dtype=complex)
    z = np.asarray(z, dtype=complex)
    out = np.empty_like(z)
    done = np.zeros(z.shape, dtype=bool)

    r = np.abs(z) <= 0.80
    if r.any():
        out[r] = gauss_series_batch(a_int, b[r], c[r], z[r])
        done |= r

    w = z / (z - 1.0)
    r = (~done) & (np.abs(w) <= 0.80)
    if r.any():
        # Pfaff on the small parameter b keeps the transformed series tame
        out[r] = (1.0 - z[r]) ** (-b[r]) * gauss_series_batch(c[r] - a_int, b[r], c[r], w[r])
        done |= r

    r = (~done) & (np.abs(1.0 - z) <= 0.85)
    if r.any():
        out[r] = _log_expansion_around_one(b[r], a_int, m_int, z[r])
        done |= r

    r = (~done) & (np.abs(z) >= 1.25)
    if r.any():
        ba = b[r] - a_int
        offint = np.abs(ba.imag) + np.abs(ba.real - np.round(ba.real)) > 1e-6
        rr = np.where(r)[0] if z.ndim == 1 else None
        safe = np.zeros(z.shape, dtype=bool)
        safe[r] = offint
        if safe.any():
            out[safe] = _reciprocal_expansion(a_int, b[safe], c[safe], z[safe])
            done |= safe

    if not done.all():
        rest = ~done
        bb, cc, zz = b[rest], c[rest], z[rest]
        vals = np.array([complex(mpmath.hyp2f1(a_int, bb[i], cc[i], zz[i]))
                         for i in range(zz.size)])
        out[rest] = vals
    return out
