"""L1 and L2 influences, monotonicity, and spectral concentration."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .core import FourierSpectrum, TruthTable, subset_sizes, wht_forward
from .errors import DomainError

MONOTONE_TOL = 1e-12


def _split(values: np.ndarray, d: int, i: int) -> np.ndarray:
    """View of ``values`` as (high, 2, low) with the middle axis = coordinate i."""
    b = i - 1
    return values.reshape(1 << (d - b - 1), 2, 1 << b)


def _check_coord(t: TruthTable, i: int) -> None:
    if not 1 <= i <= t.dim:
        raise DomainError(f"coordinate {i} outside 1..{t.dim}")


def derivative_halves(t: TruthTable, i: int) -> np.ndarray:
    """f(x^{i->1}) - f(x^{i->0}) on the half-cube with x_i = 0."""
    _check_coord(t, i)
    v = _split(t.values, t.dim, i)
    return v[:, 1, :] - v[:, 0, :]


def discrete_derivative(t: TruthTable, i: int) -> TruthTable:
    diff = derivative_halves(t, i)
    out = np.repeat(diff[:, None, :], 2, axis=1)
    return TruthTable(t.dim, out.reshape(-1))


@dataclass(frozen=True, eq=False)
class InfluenceProfile:
    dim: int
    l1: np.ndarray
    l2: np.ndarray
    total_l1: float = field(init=False)
    total_l2: float = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "total_l1", float(np.sum(self.l1)))
        object.__setattr__(self, "total_l2", float(np.sum(self.l2)))


def influence_profile(t: TruthTable) -> InfluenceProfile:
    l1 = np.empty(t.dim)
    l2 = np.empty(t.dim)
    for i in range(1, t.dim + 1):
        diff = derivative_halves(t, i)
        l1[i - 1] = np.mean(np.abs(diff))
        l2[i - 1] = np.mean(diff * diff)
    return InfluenceProfile(t.dim, l1, l2)


def conditional_mean_influences(t: TruthTable) -> np.ndarray:
    """E[f | x_i = 1] - E[f | x_i = 0] for every coordinate."""
    out = np.empty(t.dim)
    for i in range(1, t.dim + 1):
        v = _split(t.values, t.dim, i)
        out[i - 1] = v[:, 1, :].mean() - v[:, 0, :].mean()
    return out


def influence_from_spectrum(spec: FourierSpectrum) -> tuple[np.ndarray, float]:
    """Per-coordinate 4 sum_{S contains i} c_S^2, and 4 sum |S| c_S^2."""
    masks, vals = spec.masks_and_values()
    sq = vals * vals
    shifts = np.arange(spec.dim, dtype=np.uint64)
    member = (masks[:, None] >> shifts[None, :]) & np.uint64(1)
    per = 4.0 * (sq @ member.astype(np.float64))
    total = 4.0 * float(np.dot(np.bitwise_count(masks).astype(np.float64), sq))
    return per, total


def is_monotone(t: TruthTable, tol: float = MONOTONE_TOL) -> bool:
    """Edge test: every discrete derivative is >= -tol everywhere."""
    return all(derivative_halves(t, i).min() >= -tol for i in range(1, t.dim + 1))


def random_monotone_table(d: int, rng: np.random.Generator) -> TruthTable:
    """Uniform noise pushed through the monotone envelope, rescaled to [0, 1]."""
    v = rng.random(1 << d)
    for i in range(1, d + 1):
        w = _split(v, d, i)
        np.maximum(w[:, 1, :], w[:, 0, :], out=w[:, 1, :])
    lo, hi = v.min(), v.max()
    v = (v - lo) / (hi - lo) if hi > lo else np.zeros_like(v)
    return TruthTable(d, v)


@dataclass(frozen=True)
class ConcentrationReport:
    d0: int
    delta: float
    J: frozenset
    tail_weight: float
    bound: float
    K: float
    total_l2: float

    @property
    def holds(self) -> bool:
        return self.tail_weight <= self.bound + 1e-10

    @property
    def J_size_ok(self) -> bool:
        return len(self.J) <= self.K / self.delta + 1e-10


def concentration_bound(total_l2: float, K: float, d0: int, delta: float) -> float:
    return total_l2 / (4.0 * d0) + K * 3.0 ** d0 * math.sqrt(delta) / 12.0


def concentration_report(t: TruthTable, d0: int, delta: float, K: float) -> ConcentrationReport:
    """Exact Fourier weight outside {S subset of J : |S| <= d0} against its bound.

    J collects the coordinates with L1 influence at least ``delta``. The
    hypotheses (monotone, [0,1]-valued, total influence <= K) are verified
    on the table rather than trusted.
    """
    if d0 < 1:
        raise DomainError(f"d0 must be >= 1, got {d0}")
    if not delta > 0:
        raise DomainError(f"delta must be > 0, got {delta}")
    if t.values.min() < 0.0 or t.values.max() > 1.0:
        raise DomainError("table values must lie in [0, 1]")
    if not is_monotone(t):
        raise DomainError("table is not monotone")
    prof = influence_profile(t)
    if prof.total_l1 > K + 1e-10:
        raise DomainError(f"total influence {prof.total_l1} exceeds budget K={K}")

    J = frozenset(i + 1 for i in range(t.dim) if prof.l1[i] >= delta)
    j_mask = sum(1 << (i - 1) for i in J)
    spec = wht_forward(t)
    masks = np.arange(1 << t.dim, dtype=np.uint64)
    inside = ((masks & ~np.uint64(j_mask)) == 0) & (subset_sizes(t.dim) <= d0)
    c = spec.coeffs
    tail = float(np.dot(c[~inside], c[~inside]))
    return ConcentrationReport(
        d0=int(d0),
        delta=float(delta),
        J=J,
        tail_weight=tail,
        bound=concentration_bound(prof.total_l2, K, d0, delta),
        K=float(K),
        total_l2=prof.total_l2,
    )
