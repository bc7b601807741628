"""Kinematics, Sturmian basis bookkeeping and the analytic 1D band matrices.

Each parabolic coordinate pair (xi_j, eta_j) is discretized with the
square-integrable Sturmian functions

    psi_n(x) = sqrt(2 b) * exp(-b x) * L_n(2 b x),   n = 0, 1, ...

which are orthonormal on (0, inf) with the plain dx measure.  Every operator
appearing in the problem factorizes over coordinates into products of the
four one-dimensional matrices built here -- the overlap, the coordinate
weight <n|x|n'>, the logarithmic derivative <n|x d/dx|n'> and the pair
operator <n|h|n'> with h = -2(d/dx x d/dx +/- i k x d/dx).  All four are
tridiagonal; the closed-form bands below are validated against a
Gauss-Laguerre quadrature oracle in the test suite.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .specfun import laguerre

__all__ = [
    "KinematicsConfig",
    "BasisSpec",
    "derive_kinematics",
    "back_to_back_helium",
    "sturmian_eval",
    "overlap_1d",
    "coord_weight_1d",
    "coord_deriv_1d",
    "pair_operator_1d",
]

#: coordinate index j -> particle pair (l, s), l < s, j != l, s
PAIR_OF_COORDINATE = {1: (2, 3), 2: (1, 3), 3: (1, 2)}


def _reduced_mass(ml: float, ms: float) -> float:
    # an infinite partner is an exact sentinel, not a large float
    if math.isinf(ml) and math.isinf(ms):
        raise ValueError("at most one particle mass may be infinite")
    if math.isinf(ms):
        return ml
    if math.isinf(ml):
        return ms
    return ml * ms / (ml + ms)


@dataclass(frozen=True)
class KinematicsConfig:
    """Masses, charges and pair momenta with the derived pair quantities.

    Momenta and the derived reduced masses mu_ls and Sommerfeld parameters
    t_ls = Z_l Z_s mu_ls / k_ls are stored per pair, keyed '23', '13', '12'
    (the pair complementary to coordinates j = 1, 2, 3 respectively).
    """

    masses: tuple[float, float, float]
    charges: tuple[float, float, float]
    k: dict = field(repr=False)
    mu: dict = field(repr=False)
    t: dict = field(repr=False)

    def pair_key(self, j: int) -> str:
        l, s = PAIR_OF_COORDINATE[j]
        return f"{l}{s}"

    def pair_params(self, j: int) -> tuple[float, float, float]:
        """(t_ls, k_ls, mu_ls) for the pair tied to coordinate j."""
        key = self.pair_key(j)
        return self.t[key], self.k[key], self.mu[key]


def derive_kinematics(masses, charges, k_pairs) -> KinematicsConfig:
    """Populate the derived pair quantities from masses, charges and momenta.

    ``k_pairs`` is either a single positive number (equal pair momenta, the
    back-to-back equal-energy preset) or a mapping with keys '23', '13', '12'.
    """
    m1, m2, m3 = (float(m) for m in masses)
    if min(m1, m2, m3) <= 0:
        raise ValueError(f"masses must be positive, got {masses}")
    z1, z2, z3 = (float(z) for z in charges)
    if isinstance(k_pairs, (int, float)):
        if k_pairs <= 0:
            raise ValueError(f"pair momentum must be positive, got {k_pairs}")
        kd = {"23": float(k_pairs), "13": float(k_pairs), "12": float(k_pairs)}
    else:
        kd = {key: float(k_pairs[key]) for key in ("23", "13", "12")}
        if min(kd.values()) <= 0:
            raise ValueError(f"pair momenta must be positive, got {kd}")
    ms = {1: m1, 2: m2, 3: m3}
    zs = {1: z1, 2: z2, 3: z3}
    mu = {}
    t = {}
    for l, s in PAIR_OF_COORDINATE.values():
        key = f"{l}{s}"
        mu[key] = _reduced_mass(ms[l], ms[s])
        t[key] = zs[l] * zs[s] * mu[key] / kd[key]
    return KinematicsConfig(masses=(m1, m2, m3), charges=(z1, z2, z3), k=kd, mu=mu, t=t)


def back_to_back_helium(k: float = 1.5) -> KinematicsConfig:
    """Two electrons receding back to back from an infinitely heavy He nucleus."""
    return derive_kinematics((1.0, 1.0, math.inf), (-1.0, -1.0, 2.0), k)


@dataclass(frozen=True)
class BasisSpec:
    """Sturmian exponents and per-coordinate basis counts.

    The flat index runs with n3 fastest, then m3, n2, m2, n1, m1, so the
    full-space index of (n1, m1, n2, m2, n3, m3) is

        flat = i3 + d3 * (i2 + d2 * i1),   i_j = n_j + N_j * m_j,  d_j = N_j M_j.
    """

    b: tuple[float, float, float] = (1.5, 1.5, 1.5)
    N: tuple[int, int, int] = (5, 5, 5)
    M: tuple[int, int, int] = (1, 1, 1)

    def __post_init__(self):
        if min(self.b) <= 0:
            raise ValueError(f"Sturmian exponents must be positive, got {self.b}")
        if min(self.N) < 1 or min(self.M) < 1:
            raise ValueError(f"basis counts must be >= 1, got N={self.N} M={self.M}")

    @property
    def dims(self) -> tuple[int, int, int]:
        return tuple(n * m for n, m in zip(self.N, self.M))

    @property
    def size(self) -> int:
        d1, d2, d3 = self.dims
        return d1 * d2 * d3

    def to_flat(self, idx: tuple[int, int, int, int, int, int]) -> int:
        n1, m1, n2, m2, n3, m3 = idx
        for j, (n, m) in enumerate(((n1, m1), (n2, m2), (n3, m3))):
            if not (0 <= n < self.N[j] and 0 <= m < self.M[j]):
                raise IndexError(f"multi-index {idx} outside basis {self.N}x{self.M}")
        d1, d2, d3 = self.dims
        i1 = n1 + self.N[0] * m1
        i2 = n2 + self.N[1] * m2
        i3 = n3 + self.N[2] * m3
        return i3 + d3 * (i2 + d2 * i1)

    def from_flat(self, flat: int) -> tuple[int, int, int, int, int, int]:
        if not 0 <= flat < self.size:
            raise IndexError(f"flat index {flat} outside [0, {self.size})")
        d1, d2, d3 = self.dims
        i3 = flat % d3
        i2 = (flat // d3) % d2
        i1 = flat // (d3 * d2)
        n1, m1 = i1 % self.N[0], i1 // self.N[0]
        n2, m2 = i2 % self.N[1], i2 // self.N[1]
        n3, m3 = i3 % self.N[2], i3 // self.N[2]
        return (n1, m1, n2, m2, n3, m3)


def sturmian_eval(n: int, b: float, x):
    """psi_n(x) = sqrt(2b) exp(-b x) L_n(2 b x); accepts array x."""
    if n < 0 or b <= 0:
        raise ValueError(f"need n >= 0 and b > 0, got n={n}, b={b}")
    x = np.asarray(x, dtype=float) if not np.isscalar(x) else x
    return math.sqrt(2 * b) * np.exp(-b * x) * laguerre(n, 2 * b * x)


# ---------------------------------------------------------------------------
# 1D matrices (all tridiagonal)
# ---------------------------------------------------------------------------

def overlap_1d(N: int) -> np.ndarray:
    """Orthonormal basis: the overlap is the identity."""
    if N < 1:
        raise ValueError(f"need N >= 1, got {N}")
    return np.eye(N, dtype=complex)


def coord_weight_1d(N: int, b: float) -> np.ndarray:
    """<psi_n| x |psi_n'>: diagonal (2n+1)/2b, off-diagonals -(n+1)/2b."""
    if N < 1 or b <= 0:
        raise ValueError(f"need N >= 1 and b > 0, got N={N}, b={b}")
    X = np.zeros((N, N), dtype=complex)
    for n in range(N):
        X[n, n] = (2 * n + 1) / (2 * b)
        if n + 1 < N:
            X[n, n + 1] = -(n + 1) / (2 * b)
            X[n + 1, n] = -(n + 1) / (2 * b)
    return X


def coord_deriv_1d(N: int) -> np.ndarray:
    """<psi_n| x d/dx |psi_n'>: b-independent, tridiagonal, not symmetric.

    Row n holds -1/2 on the diagonal, -(n+1)/2 at column n+1 and n/2 at
    column n-1.
    """
    if N < 1:
        raise ValueError(f"need N >= 1, got {N}")
    D = np.zeros((N, N), dtype=complex)
    for n in range(N):
        D[n, n] = -0.5
        if n + 1 < N:
            D[n, n + 1] = -(n + 1) / 2.0
            D[n + 1, n] = (n + 1) / 2.0
    return D


def pair_operator_1d(N: int, b: float, k: float, sign: int = +1) -> np.ndarray:
    """<psi_n| h |psi_n'> for h = -2 (d/dx x d/dx + sign * i k x d/dx).

    sign=+1 is the xi-side operator, sign=-1 the eta side.  The two matrices
    are complex conjugates of each other for real b and k.
    """
    if N < 1 or b <= 0 or k <= 0:
        raise ValueError(f"need N >= 1, b > 0, k > 0, got N={N}, b={b}, k={k}")
    if sign not in (+1, -1):
        raise ValueError(f"sign must be +1 or -1, got {sign}")
    s = 1j * k * sign
    H = np.zeros((N, N), dtype=complex)
    for n in range(N):
        H[n, n] = b * (2 * n + 1) + s
        if n + 1 < N:
            H[n, n + 1] = (n + 1) * (b + s)
            H[n + 1, n] = (n + 1) * (b - s)
    return H
