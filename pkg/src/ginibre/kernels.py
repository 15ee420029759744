"""The five Ginibre kernels, their eigenfunctions and density oracles.

Kernels: the infinite-rank plane kernel, its rank-N truncation, the
projection onto a centered disk (with incomplete-gamma eigenvalues), the
truncated-projected combination, and the rank-N kernel conditioned to N
points on the disk of radius sqrt(N).

All eigenfunction arithmetic is done as (log magnitude, phase): the raw
monomials z^n / sqrt(n!) overflow doubles near n ~ 150, while their
normalized combinations are tame. Linear values only materialize at API
boundaries.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from . import linalg
from .specfun import (
    LogValue,
    log_factorial,
    log_polar,
    log_regularized_lower_gamma,
    log_regularized_upper_gamma,
    regularized_upper_gamma,
)

__all__ = [
    "SpectrumProfile",
    "spectrum_profile",
    "BasisSubset",
    "ginibre_kernel",
    "truncated_kernel",
    "projected_eigenfunction",
    "projected_eigenfunction_log",
    "conditioned_kernel",
    "radial_intensity",
    "IntensityBounds",
    "intensity_bounds",
    "janossy_oracle",
    "log_joint_density",
    "conditioned_kernel_max_deviation",
]

_LOG_PI = math.log(math.pi)

# Eigenvalues below this are dropped from tail accumulation entirely.
_TAIL_CUTOFF_LOG = math.log(1e-40)


# ---------------------------------------------------------------------------
# spectrum of the disk-projected kernel


@dataclass(frozen=True)
class SpectrumProfile:
    """Eigenvalues lambda_n = P(n+1, R^2) of the Ginibre kernel on B_R.

    Stores the first `count` eigenvalues in both linear and log form along
    with log(1 - lambda_n); `tail_log` is sum_{n >= count} log(1 - lambda_n)
    so products over the full spectrum never truncate silently.
    """

    radius: float
    epsilon: float
    eigenvalues: np.ndarray
    log_eigenvalues: np.ndarray
    log_one_minus: np.ndarray
    tail_log: float
    trace: float

    @property
    def count(self) -> int:
        return len(self.eigenvalues)

    def log_hole_probability(self) -> float:
        """log prod_{n>=0} (1 - lambda_n): no points on the disk."""
        return float(self.log_one_minus.sum() + self.tail_log)


def spectrum_profile(radius: float, epsilon: float = 1e-12) -> SpectrumProfile:
    """Build the eigenvalue profile of the Ginibre kernel projected on B_R.

    The stored prefix ends at the first n with lambda_n < epsilon and
    n > R^2 (the spectrum decays super-exponentially past n ~ R^2); the
    remaining mass goes into tail_log / trace accumulators.
    """
    if radius < 0.0:
        raise ValueError(f"radius must be nonnegative, got {radius}")
    if not 0.0 < epsilon < 1.0:
        raise ValueError(f"epsilon must be in (0, 1), got {epsilon}")
    r2 = radius * radius
    log_lam: list[float] = []
    log_q: list[float] = []
    trace = 0.0
    n = 0
    while True:
        ll = log_regularized_lower_gamma(n + 1, r2) if r2 > 0.0 else -math.inf
        lq = log_regularized_upper_gamma(n + 1, r2) if r2 > 0.0 else 0.0
        lam = math.exp(ll)
        if lam < epsilon and n > r2:
            break
        log_lam.append(ll)
        log_q.append(lq)
        trace += lam
        n += 1
    tail_log = 0.0
    while True:
        ll = log_regularized_lower_gamma(n + 1, r2) if r2 > 0.0 else -math.inf
        if ll < _TAIL_CUTOFF_LOG:
            break
        lam = math.exp(ll)
        tail_log += math.log1p(-lam)
        trace += lam
        n += 1
    return SpectrumProfile(
        radius=float(radius),
        epsilon=float(epsilon),
        eigenvalues=np.exp(np.array(log_lam)),
        log_eigenvalues=np.array(log_lam),
        log_one_minus=np.array(log_q),
        tail_log=tail_log,
        trace=trace,
    )


@dataclass(frozen=True)
class BasisSubset:
    """An ordered set of disk-orthonormal eigenfunctions.

    Index n maps to the L2-normalized function z^n e^{-|z|^2/2} /
    sqrt(pi gamma(n+1, R^2)) on the disk of radius `radius`; `scale`
    applies a homothety (functions live on the disk of radius
    scale * radius and stay orthonormal).
    """

    radius: float
    indices: tuple[int, ...]
    scale: float = 1.0
    _norm_logs: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        if self.radius <= 0.0:
            raise ValueError("radius must be positive")
        if self.scale <= 0.0:
            raise ValueError("scale must be positive")
        if any(i < 0 for i in self.indices):
            raise ValueError("indices must be nonnegative")
        r2 = self.radius * self.radius
        norm_logs = np.array(
            [log_regularized_lower_gamma(i + 1, r2) + log_factorial(i) for i in self.indices]
        )
        object.__setattr__(self, "_norm_logs", norm_logs)

    @property
    def size(self) -> int:
        return len(self.indices)

    @property
    def disk_radius(self) -> float:
        """Radius of the disk the (scaled) functions live on."""
        return self.radius * self.scale

    def log_gamma_norms(self) -> np.ndarray:
        """log gamma(i+1, R^2) for each member index i."""
        return self._norm_logs


# ---------------------------------------------------------------------------
# kernel evaluation


def ginibre_kernel(z1: complex, z2: complex) -> complex:
    """Plane Ginibre kernel (1/pi) e^{z1 conj(z2)} e^{-(|z1|^2+|z2|^2)/2}."""
    z1 = complex(z1)
    z2 = complex(z2)
    expo = z1 * z2.conjugate() - 0.5 * (abs(z1) ** 2 + abs(z2) ** 2)
    # Re(expo) <= 0 always, so this cannot overflow.
    return np.exp(expo) / math.pi


def _kernel_sum(log_coeffs: np.ndarray, z1: complex, z2: complex) -> complex:
    """(1/pi) e^{-(|z1|^2+|z2|^2)/2} sum_n exp(log_coeffs[n]) (z1 conj z2)^n.

    The peak term's log magnitude is folded into the damping exponent, so
    monomials never materialize outside the double range.
    """
    w = z1 * z2.conjugate()
    absw = abs(w)
    ns = np.arange(len(log_coeffs))
    if absw > 0.0:
        logmag = log_coeffs + ns * math.log(absw)
        angles = ns * np.angle(w)
    else:
        logmag = np.where(ns == 0, log_coeffs, -np.inf)
        angles = np.zeros(len(ns))
    peak = float(logmag.max())
    total = np.sum(np.exp(logmag - peak) * np.exp(1j * angles))
    scale = peak - 0.5 * (abs(z1) ** 2 + abs(z2) ** 2) - _LOG_PI
    return complex(total) * math.exp(scale)


def truncated_kernel(n_rank: int, z1: complex, z2: complex) -> complex:
    """Rank-N truncation: sum_{n<N} phi_n(z1) conj(phi_n(z2))."""
    if n_rank < 1:
        raise ValueError("rank must be >= 1")
    log_coeffs = -np.array([log_factorial(n) for n in range(n_rank)])
    return _kernel_sum(log_coeffs, complex(z1), complex(z2))


def projected_eigenfunction_log(n: int, radius: float, z: complex) -> LogValue:
    """Disk eigenfunction z^n e^{-|z|^2/2} / sqrt(pi gamma(n+1, R^2)).

    Zero outside the closed disk. Returned in log form; safe for n in the
    thousands where the linear value would overflow mid-computation.
    """
    if n < 0:
        raise ValueError("index must be nonnegative")
    if radius <= 0.0:
        raise ValueError("radius must be positive")
    z = complex(z)
    absz = abs(z)
    if absz > radius * (1.0 + 1e-12):
        return LogValue(-math.inf)
    log_norm = log_regularized_lower_gamma(n + 1, radius * radius) + log_factorial(n)
    if absz == 0.0:
        if n == 0:
            return LogValue(-0.5 * (_LOG_PI + log_norm))
        return LogValue(-math.inf)
    logmag = n * math.log(absz) - 0.5 * absz * absz - 0.5 * (_LOG_PI + log_norm)
    return log_polar(logmag, n * math.atan2(z.imag, z.real))


def projected_eigenfunction(n: int, radius: float, z: complex) -> complex:
    """Linear-scale value of the disk eigenfunction (0 outside the disk)."""
    return projected_eigenfunction_log(n, radius, z).to_linear()


def conditioned_kernel(n_points: int, z1: complex, z2: complex) -> complex:
    """Rank-N projection kernel on B_sqrt(N): the truncated process
    conditioned to all N points falling inside that disk."""
    if n_points < 1:
        raise ValueError("rank must be >= 1")
    z1 = complex(z1)
    z2 = complex(z2)
    radius = math.sqrt(n_points)
    if abs(z1) > radius * (1 + 1e-12) or abs(z2) > radius * (1 + 1e-12):
        return 0.0j
    log_coeffs = -np.array(
        [log_regularized_lower_gamma(n + 1, float(n_points)) + log_factorial(n)
         for n in range(n_points)]
    )
    return _kernel_sum(log_coeffs, z1, z2)


def radial_intensity(n_rank: int, r: float) -> float:
    """One-point density of the rank-N truncated process at radius r.

    Equals (1/pi) e^{-r^2} sum_{k<N} r^{2k}/k! = Q(N, r^2) / pi.
    """
    if n_rank < 1:
        raise ValueError("rank must be >= 1")
    if r < 0.0:
        raise ValueError("radius must be nonnegative")
    return regularized_upper_gamma(n_rank, r * r) / math.pi


@dataclass(frozen=True)
class IntensityBounds:
    """Closed-form bracket around radial_intensity near the disk edge.

    lower bounds the density from below (valid for r^2 < N+1); upper from
    above (valid for r^2 >= N); in the overlap both are set.
    """

    lower: float | None
    upper: float | None


def intensity_bounds(n_rank: int, r: float) -> IntensityBounds:
    if n_rank < 1:
        raise ValueError("rank must be >= 1")
    if r < 0.0:
        raise ValueError("radius must be nonnegative")
    n = n_rank
    r2 = r * r
    if r == 0.0:
        log_core = -math.inf if n >= 1 else 0.0
    else:
        log_core = -r2 + 2 * n * math.log(r) - log_factorial(n)
    core = math.exp(log_core) / math.pi
    lower = None
    upper = None
    if r2 < n + 1:
        lower = 1.0 / math.pi - core * (n + 1) / (n + 1 - r2)
    if r2 >= n:
        upper = math.inf if r2 == n else core * n / (r2 - n)
    return IntensityBounds(lower=lower, upper=upper)


# ---------------------------------------------------------------------------
# density oracles (testing scale)

_ORACLE_MAX_RANK = 12


def _eigenfunction_matrix(indices, radius: float, points) -> np.ndarray:
    """Matrix phi^R_index(z_p): rows points, columns indices."""
    return np.array(
        [[projected_eigenfunction(i, radius, z) for i in indices] for z in points]
    )


def janossy_oracle(n_rank: int, radius: float, points) -> float:
    """k-point Janossy density of the truncated-projected process on B_R.

    Computed two ways and cross-asserted: (i) hole probability times the
    determinant of the quasi-inverse kernel matrix; (ii) the Cauchy-Binet
    subset sum over k-subsets of the N eigenfunction indices. Intended as
    a small-instance oracle, hence the rank cap.
    """
    pts = [complex(z) for z in points]
    k = len(pts)
    if not 1 <= n_rank <= _ORACLE_MAX_RANK:
        raise ValueError(f"rank must be in 1..{_ORACLE_MAX_RANK}")
    if k > n_rank:
        raise ValueError(f"at most {n_rank} points supported, got {k}")
    if radius <= 0.0:
        raise ValueError("radius must be positive")
    if any(abs(z) > radius * (1 + 1e-12) for z in pts):
        raise ValueError("all points must lie in the closed disk")

    r2 = radius * radius
    log_p = np.array([log_regularized_lower_gamma(n + 1, r2) for n in range(n_rank)])
    log_q = np.array([log_regularized_upper_gamma(n + 1, r2) for n in range(n_rank)])
    log_hole = float(log_q.sum())
    if k == 0:
        return math.exp(log_hole)

    phi = _eigenfunction_matrix(range(n_rank), radius, pts)  # (k, N)

    # route (i): Det(I - K) * det(J(z_i, z_j)) with J = sum (lam/(1-lam)) phi phi*
    jmat = (phi * np.exp(log_p - log_q)) @ phi.conj().T
    det_route = math.exp(log_hole) * linalg.lu_det(jmat).real

    # route (ii): Cauchy-Binet over index subsets
    weighted = phi * np.exp(0.5 * (log_p - log_q))
    subset_sum = 0.0
    for subset in itertools.combinations(range(n_rank), k):
        sub = weighted[:, subset]
        subset_sum += abs(linalg.lu_det(sub)) ** 2
    cb_route = math.exp(log_hole) * subset_sum

    scale = max(abs(det_route), abs(cb_route), 1e-300)
    if abs(det_route - cb_route) > 1e-8 * scale:
        raise AssertionError(
            f"janossy routes disagree: det={det_route!r} cauchy-binet={cb_route!r}"
        )
    return det_route


def log_joint_density(n_rank: int, points) -> float:
    """log joint density of the rank-N truncated process at an N-tuple.

    (1/pi^N) prod_{p=0..N} 1/p! e^{-sum |z|^2} prod |z_p - z_q|^2; the
    product of factorials runs to N inclusive, absorbing the 1/N! in the
    determinant normalization.
    """
    pts = [complex(z) for z in points]
    if len(pts) != n_rank:
        raise ValueError("need exactly N points")
    total = -n_rank * _LOG_PI - sum(log_factorial(p) for p in range(n_rank + 1))
    total -= sum(abs(z) ** 2 for z in pts)
    for p in range(n_rank):
        for q in range(p + 1, n_rank):
            d = abs(pts[p] - pts[q])
            if d == 0.0:
                return -math.inf
            total += 2.0 * math.log(d)
    return total


def conditioned_kernel_max_deviation(n_rank: int, radius: float = 1.0,
                                     grid: int = 200) -> float:
    """Grid estimate of sup |K - K~^N| over pairs in the disk of `radius`.

    Both kernels' moduli depend on (z1, z2) only through w = z1 conj(z2)
    and |z1|^2 + |z2|^2; at fixed w the damping factor is largest at
    |z1| = |z2| = sqrt|w|, so the supremum reduces to a polar grid over w
    with |w| <= radius^2.
    """
    if n_rank < 1:
        raise ValueError("rank must be >= 1")
    inv_gamma = np.exp(
        -np.array([log_regularized_lower_gamma(n + 1, float(n_rank)) + log_factorial(n)
                   for n in range(n_rank)])
    )
    rr = np.linspace(0.0, radius * radius, grid)
    th = np.linspace(0.0, math.pi, grid)
    w = rr[:, None] * np.exp(1j * th[None, :])
    powers = w[..., None] ** np.arange(n_rank)
    partial = powers @ inv_gamma
    diff = np.exp(w) - partial
    vals = np.exp(-np.abs(w)) * np.abs(diff) / math.pi
    return float(vals.max())
