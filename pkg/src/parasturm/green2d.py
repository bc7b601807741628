"""Closed-form Sturmian matrix elements of the 2D Coulomb Green's functions.

For one parabolic coordinate pair the operator

    J = h_xi + h_eta + 2 k t + (k^2/2 - E) (xi + eta)

has outgoing/incoming Green's functions G(+-) whose Sturmian-basis matrix
elements are known in closed form.  With gamma = sqrt(2 E) (principal branch)
and the Moebius-type auxiliaries

    tau  = (k / gamma) t
    theta = (2b + i(gamma - k)) / (2b - i(gamma - k))
    lambda = (2b - i(gamma + k)) / (2b + i(gamma + k))
    zeta  = lambda / theta

the outgoing element reads

    G(+)_{n,m;n',m'} = (i / 2 gamma) ((zeta-1)/zeta)
        * (-theta)^(n+m') / (-lambda)^(n'+m)
        * sum_{ell=0}^{nu+mu} c_ell zeta^ell
          * Gamma(i tau + ell + 1) Gamma(K+1-2 ell) / Gamma(i tau + K + 2 - ell)
          * 2F1(K+1-2 ell, i tau - ell; i tau + K + 2 - ell; 1/zeta)

with K = n+n'+m+m', nu = min(n,n'), mu = min(m,m') and integer coefficients
c_ell (binomial sums).  The incoming element is the same expression after
gamma -> -gamma, which swaps theta <-> lambda, zeta -> 1/zeta, tau -> -tau.

Gamma-function products are combined in log space; the theta/lambda powers
use exact integer exponentiation so the phases never jump branches.  A
cancellation monitor watches the ell sum and re-evaluates offending elements
in extended precision (large K elements genuinely need it).

A coordinate-space kernel (a one-dimensional oscillatory integral with
modified-Bessel factors) is provided as an independent debug oracle; the
solver never touches it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import NamedTuple

import mpmath
import numpy as np
from scipy.special import ive as _besseli_scaled
from scipy.special import loggamma

from ._hyp_batch import hyp2f1_green
from .specfun import NonConvergenceError, Precision

__all__ = [
    "PrecisionExhaustedError",
    "Green2DParams",
    "c_table",
    "green2d_plus",
    "green2d_minus",
    "green2d_matrix",
    "matrices_along",
    "green2d_kernel",
]

#: digits of cancellation in the ell sum that trigger extended re-evaluation
ESCALATION_DIGITS = 10.0


class PrecisionExhaustedError(ArithmeticError):
    """Cancellation in an element exceeded what the working precision holds."""


class Derived(NamedTuple):
    gamma: complex
    tau: complex
    theta: complex
    lam: complex
    zeta: complex


@dataclass(frozen=True)
class Green2DParams:
    """Pair inputs (t, E, k, b) for one coordinate's Green's function.

    ``gamma_sign`` selects the branch of gamma = sign * sqrt(2 E); the
    incoming function is exactly the outgoing one on the flipped branch.
    """

    t: float
    energy: complex
    k: float
    b: float
    gamma_sign: int = +1

    def __post_init__(self):
        if self.k <= 0 or self.b <= 0:
            raise ValueError(f"need k > 0 and b > 0, got k={self.k}, b={self.b}")
        e = complex(self.energy)
        if e == 0 or (e.imag == 0 and e.real < 0):
            raise ValueError(f"pair energy must satisfy |arg E| < pi and E != 0, got {e}")
        if self.gamma_sign not in (+1, -1):
            raise ValueError(f"gamma_sign must be +1 or -1, got {self.gamma_sign}")

    def negated(self) -> "Green2DParams":
        """Same inputs on the opposite gamma branch."""
        return replace(self, gamma_sign=-self.gamma_sign)

    def derived(self) -> Derived:
        """Auxiliary quantities in complex doubles (zeta * theta == lambda)."""
        gamma = self.gamma_sign * np.sqrt(complex(self.energy) * 2.0)
        return _derived_from_gamma(gamma, self.t, self.k, self.b)


def _derived_from_gamma(gamma, t, k, b) -> Derived:
    tau = k * t / gamma
    theta = (2 * b + 1j * (gamma - k)) / (2 * b - 1j * (gamma - k))
    lam = (2 * b - 1j * (gamma + k)) / (2 * b + 1j * (gamma + k))
    return Derived(gamma, tau, theta, lam, lam / theta)


def c_table(n: int, m: int, np_: int, mp_: int) -> list[int]:
    """Exact integer coefficients c_ell of the finite element sum."""
    if min(n, m, np_, mp_) < 0:
        raise ValueError("indices must be non-negative")
    nu, mu = min(n, np_), min(m, mp_)
    out = []
    for ell in range(nu + mu + 1):
        out.append(sum(math.comb(n, j) * math.comb(np_, j)
                       * math.comb(m, ell - j) * math.comb(mp_, ell - j)
                       for j in range(max(ell - mu, 0), min(ell, nu) + 1)))
    return out


# ---------------------------------------------------------------------------
# extended-precision scalar element
# ---------------------------------------------------------------------------

def _element_mp(n, m, np_, mp_, t, energy, k, b, gamma_sign=+1, dps=36):
    """Full-multiprecision element; raises if even this precision is exhausted."""
    with mpmath.workdps(dps):
        gamma = gamma_sign * mpmath.sqrt(2 * mpmath.mpc(energy))
        tau = k * t / gamma
        theta = (2 * b + 1j * (gamma - k)) / (2 * b - 1j * (gamma - k))
        lam = (2 * b - 1j * (gamma + k)) / (2 * b + 1j * (gamma + k))
        zeta = lam / theta
        K = n + np_ + m + mp_
        itau = 1j * tau
        tot = mpmath.mpc(0)
        peak = mpmath.mpf(0)
        for ell, c in enumerate(c_table(n, m, np_, mp_)):
            assert K + 1 - 2 * ell >= 1
            term = (c * zeta ** ell
                    * mpmath.gamma(itau + ell + 1) * mpmath.gamma(K + 1 - 2 * ell)
                    / mpmath.gamma(itau + K + 2 - ell)
                    * mpmath.hyp2f1(K + 1 - 2 * ell, itau - ell, itau + K + 2 - ell, 1 / zeta))
            tot += term
            peak = max(peak, abs(term))
        if tot == 0 or (peak > 0 and mpmath.log10(peak / abs(tot)) > dps - 10):
            raise PrecisionExhaustedError(
                f"element ({n},{m};{np_},{mp_}) at E={energy}: "
                f"cancellation exceeds extended precision")
        pref = (1j / (2 * gamma)) * ((zeta - 1) / zeta) \
            * (-theta) ** (n + mp_) / (-lam) ** (np_ + m)
        return pref * tot


# ---------------------------------------------------------------------------
# batched standard-precision matrices
# ---------------------------------------------------------------------------

def _power_table(base: np.ndarray, jmax: int) -> np.ndarray:
    """[j, lane] table of base**j by cumulative products (exact integer powers)."""
    out = np.empty((jmax + 1,) + base.shape, dtype=complex)
    out[0] = 1.0
    for j in range(1, jmax + 1):
        out[j] = out[j - 1] * base
    return out


def matrices_along(N: int, M: int, t: float, k: float, b: float, energies,
                   gamma_sign: int = +1) -> np.ndarray:
    """Outgoing-Green matrices, shape (n_energies, N*M, N*M), complex double.

    Elements whose cancellation monitor trips are transparently re-evaluated
    in extended precision.  The 2D flat index is i = n + N*m.
    """
    E = np.atleast_1d(np.asarray(energies, dtype=complex))
    gamma = gamma_sign * np.sqrt(2.0 * E)
    aux = _derived_from_gamma(gamma, t, k, b)
    theta, lam, zeta, tau = aux.theta, aux.lam, aux.zeta, aux.tau
    itau = 1j * tau
    zinv = 1.0 / zeta
    d = N * M
    jmax = (N - 1) + (M - 1)
    Kmax = 2 * jmax

    pth = _power_table(-theta, jmax)            # (-theta)^j
    plam_inv = _power_table(1.0 / (-lam), jmax)  # (-lambda)^(-j)
    zpow = _power_table(zeta, jmax)              # zeta^ell
    swap = _power_table(theta * lam, jmax)       # (theta lambda)^|d| for the swap rule
    # lgt[j] = log Gamma(i tau + 1 + j), built by the recurrence from j = 0
    lgt = np.empty((Kmax + 3,) + E.shape, dtype=complex)
    lgt[0] = loggamma(itau + 1.0)
    for j in range(1, Kmax + 3):
        lgt[j] = lgt[j - 1] + np.log(itau + j)
    lnfact = [math.lgamma(j + 1) for j in range(Kmax + 2)]

    pref = (1j / (2.0 * gamma)) * ((zeta - 1.0) / zeta)
    out = np.zeros((E.size, d, d), dtype=complex)
    for mrow in range(M):
        for nrow in range(N):
            i = nrow + N * mrow
            for mcol in range(M):
                for ncol in range(N):
                    j = ncol + N * mcol
                    if j < i:
                        continue
                    K = nrow + ncol + mrow + mcol
                    tot = np.zeros(E.shape, dtype=complex)
                    peak = np.zeros(E.shape, dtype=float)
                    for ell, c in enumerate(c_table(nrow, mrow, ncol, mcol)):
                        assert K + 1 - 2 * ell >= 1
                        lg = lgt[ell] + lnfact[K - 2 * ell] - lgt[K + 1 - ell]
                        f = hyp2f1_green(K + 1 - 2 * ell, 1 + 2 * ell,
                                         itau - ell, itau + K + 2 - ell, zinv)
                        term = c * zpow[ell] * np.exp(lg) * f
                        tot += term
                        np.maximum(peak, np.abs(term), out=peak)
                    val = pref * pth[nrow + mcol] * plam_inv[ncol + mrow] * tot
                    bad = ~np.isfinite(val)
                    with np.errstate(divide="ignore", invalid="ignore"):
                        lost = np.where(np.abs(tot) > 0, peak / np.abs(tot), np.inf)
                    bad |= lost > 10.0 ** ESCALATION_DIGITS
                    if bad.any():
                        for lane in np.nonzero(bad)[0]:
                            val[lane] = complex(_element_mp(
                                nrow, mrow, ncol, mcol, t, E[lane], k, b, gamma_sign))
                    out[:, i, j] = val
                    if j != i:
                        dd = (ncol + mrow) - (nrow + mcol)
                        fac = swap[dd] if dd >= 0 else 1.0 / swap[-dd]
                        out[:, j, i] = val * fac
    return out


# ---------------------------------------------------------------------------
# public element / matrix surface
# ---------------------------------------------------------------------------

def green2d_plus(n: int, m: int, np_: int, mp_: int, params: Green2DParams,
                 p: Precision = Precision.STANDARD):
    """Single outgoing-function element G(+)_{n,m;n',m'}."""
    if min(n, m, np_, mp_) < 0:
        raise ValueError("indices must be non-negative")
    if p is Precision.EXTENDED:
        return _element_mp(n, m, np_, mp_, params.t, params.energy, params.k,
                           params.b, params.gamma_sign, dps=p.dps)
    Nn, Mm = max(n, np_) + 1, max(m, mp_) + 1
    mat = matrices_along(Nn, Mm, params.t, params.k, params.b,
                         [params.energy], gamma_sign=params.gamma_sign)
    return complex(mat[0, n + Nn * m, np_ + Nn * mp_])


def green2d_minus(n: int, m: int, np_: int, mp_: int, params: Green2DParams,
                  p: Precision = Precision.STANDARD):
    """Incoming-function element: the outgoing one on the flipped branch."""
    return green2d_plus(n, m, np_, mp_, params.negated(), p)


def green2d_matrix(N: int, M: int, params: Green2DParams,
                   p: Precision = Precision.STANDARD) -> np.ndarray:
    """All elements with n, n' < N and m, m' < M, flat index i = n + N*m."""
    if N < 1 or M < 1:
        raise ValueError(f"need N >= 1 and M >= 1, got N={N}, M={M}")
    if p is Precision.EXTENDED:
        d = N * M
        out = np.empty((d, d), dtype=complex)
        for mrow in range(M):
            for nrow in range(N):
                for mcol in range(M):
                    for ncol in range(N):
                        try:
                            out[nrow + N * mrow, ncol + N * mcol] = complex(_element_mp(
                                nrow, mrow, ncol, mcol, params.t, params.energy,
                                params.k, params.b, params.gamma_sign, dps=p.dps))
                        except (PrecisionExhaustedError, NonConvergenceError) as exc:
                            raise type(exc)(
                                f"element ({nrow},{mrow};{ncol},{mcol}): {exc}") from exc
        return out
    return matrices_along(N, M, params.t, params.k, params.b, [params.energy],
                          gamma_sign=params.gamma_sign)[0]


# ---------------------------------------------------------------------------
# coordinate-space kernel (debug / oracle facility)
# ---------------------------------------------------------------------------

def green2d_kernel(xi, eta, xip, etap, params: Green2DParams, sign: int = +1,
                   depth: int = 2):
    """Coordinate-space kernel G(sign)(xi, eta; xi', eta') by 1D quadrature.

    Evaluates the integral representation

        -+ (i gamma / 4) e^{(i k/2)(xi'-xi+eta-eta')} *
        int_0^inf dz sinh z [coth(z/2)]^{-+2 i tau}
            e^{+- i (gamma/2) S cosh z} I_0(-+ i gamma sqrt(xi xi') sinh z)
                                        I_0(-+ i gamma sqrt(eta eta') sinh z)

    (upper signs for sign=+1, S = xi+xi'+eta+eta').  Decay requires
    Im(sign*gamma) > 0; the integrand oscillates, so the z > 1 part is
    integrated in u = cosh z where the phase is linear.  Accepts numpy
    arrays for the four coordinates (broadcast together, shared z grid).
    ``depth`` raises the panel order and tightens the tail tolerance.
    """
    if sign not in (+1, -1):
        raise ValueError(f"sign must be +1 or -1, got {sign}")
    if depth < 1:
        raise ValueError(f"depth must be >= 1, got {depth}")
    xi, eta, xip, etap = np.broadcast_arrays(
        *(np.asarray(a, dtype=float) for a in (xi, eta, xip, etap)))
    if min(x.min() for x in (xi, eta, xip, etap)) < 0:
        raise ValueError("coordinates must be non-negative")
    aux = params.derived()
    gamma, tau = aux.gamma, aux.tau
    sg = sign * gamma
    if sg.imag <= 1e-14:
        raise ValueError(
            f"kernel integral requires Im(sign*gamma) > 0 for decay, got {sg}")
    S = xi + xip + eta + etap
    rx = np.sqrt(xi * xip)
    ry = np.sqrt(eta * etap)
    q = 12 + 4 * depth
    rtol = 10.0 ** (-(3 + 2 * depth))
    xg, wg = np.polynomial.legendre.leggauss(q)

    def _core(z, sh, cz):
        """coth-power, exponential and Bessel factors at column-vector z.

        The Bessel factors are exponentially scaled and the scale folded into
        the oscillatory exponent, so near-diagonal points (whose unscaled
        I_0 would overflow) stay finite: the combined exponent has
        non-positive real part by the arithmetic-geometric mean inequality.
        """
        coth = np.cosh(z / 2) / np.sinh(z / 2)
        w1 = -1j * sg * rx.ravel()[None, :] * sh
        w2 = -1j * sg * ry.ravel()[None, :] * sh
        expo = 1j * sg / 2 * S.ravel()[None, :] * cz + np.abs(w1.real) + np.abs(w2.real)
        return (coth ** (-2j * sign * tau) * np.exp(expo)
                * _besseli_scaled(0, w1) * _besseli_scaled(0, w2))

    def fz(z):
        """Integrand including the sinh z measure (z-form)."""
        z = z[:, None]
        return np.sinh(z) * _core(z, np.sinh(z), np.cosh(z))

    def fu(u):
        """Integrand in u = cosh z (sinh z dz = du absorbs the measure)."""
        z = np.arccosh(u)[:, None]
        sh = np.sqrt(u * u - 1.0)[:, None]
        return _core(z, sh, u[:, None])

    nlanes = S.size
    acc = np.zeros(nlanes, dtype=complex)
    # z in (0, 1]: panels halving toward the integrable endpoint singularity
    lo = 1.0
    for _ in range(14 + 4 * depth):
        hi, lo = lo, lo / 2
        zs = (hi + lo) / 2 + (hi - lo) / 2 * xg
        acc += (hi - lo) / 2 * (wg @ fz(zs))
    zs = lo / 2 + lo / 2 * xg
    acc += lo / 2 * (wg @ fz(zs))
    # z >= 1: u = cosh z, geometric panels, phase-aware initial width
    oscrate = abs(sg) / 2 * float(np.max(S)) + 1.0
    h = min(1.0, 2.0 * q / oscrate)
    u0 = math.cosh(1.0)
    scale = float(np.max(np.abs(acc))) + 1e-300
    quiet = 0
    for _ in range(400):
        us = u0 + h / 2 + h / 2 * xg
        piece = h / 2 * (wg @ fu(us))
        acc += piece
        u0 += h
        h *= 1.6
        scale = max(scale, float(np.max(np.abs(acc))))
        if float(np.max(np.abs(piece))) < rtol * scale:
            quiet += 1
            if quiet >= 2:
                break
        else:
            quiet = 0
    else:
        raise NonConvergenceError(
            f"kernel quadrature tail did not decay (Im gamma = {sg.imag:.3e})")
    phase = np.exp(1j * params.k / 2 * (xip - xi + eta - etap))
    result = (-sign * 1j * gamma / 4) * phase * acc.reshape(S.shape)
    return complex(result) if result.shape == () else result
