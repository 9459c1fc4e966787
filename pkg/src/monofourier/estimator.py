"""Fourier thresholding estimator for monotone functions on {0,1}^d.

Pipeline: split the sample in half; on the first half estimate every
coordinate's influence as a difference of conditional means and keep the
coordinates whose estimate clears delta/2; on the second half estimate the
Fourier coefficients of all subsets of the kept coordinates of size <= d0;
predict with the clamped partial Fourier sum.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import asdict, dataclass, field
from typing import Optional

import numpy as np

from . import kernels
from .core import MAX_DENSE_DIM, FourierSpectrum, as_points, check_dim, wht_inverse
from .errors import CapacityError, ConfigError, DomainError

GAMMA_MIN = 2.0 * math.log(3.0)


@dataclass(frozen=True)
class EstimatorConfig:
    gamma: float = 2.5
    c0: float = 3.0
    d0_override: Optional[int] = None
    max_spectral_set: int = 1 << 20

    def __post_init__(self):
        if not self.gamma > GAMMA_MIN:
            raise ConfigError(f"gamma must exceed 2 ln 3 = {GAMMA_MIN:.6f}, got {self.gamma}")
        if not self.c0 >= 0:
            raise ConfigError(f"c0 must be >= 0, got {self.c0}")
        if self.d0_override is not None and (int(self.d0_override) != self.d0_override
                                             or self.d0_override < 1):
            raise ConfigError(f"d0_override must be an integer >= 1, got {self.d0_override}")
        if self.max_spectral_set < 1:
            raise ConfigError("max_spectral_set must be >= 1")

    def to_json(self) -> dict:
        return asdict(self)

    @classmethod
    def from_json(cls, obj: dict) -> "EstimatorConfig":
        unknown = sorted(set(obj) - {"gamma", "c0", "d0_override", "max_spectral_set"})
        if unknown:
            raise ConfigError(f"unknown estimator fields: {unknown}")
        return cls(**obj)


@dataclass(frozen=True, eq=False)
class Dataset:
    """Sample of (point, response) pairs; points are uint64 bitmasks."""

    dim: int
    points: np.ndarray
    responses: np.ndarray
    provenance: dict = field(default_factory=dict)

    def __post_init__(self):
        check_dim(self.dim)
        p = as_points(self.points).copy()
        y = np.ascontiguousarray(np.asarray(self.responses, dtype=np.float64).reshape(-1)).copy()
        if p.shape[0] != y.shape[0]:
            raise DomainError(f"{p.shape[0]} points but {y.shape[0]} responses")
        if p.shape[0] < 1:
            raise DomainError("dataset must contain at least one pair")
        if self.dim < 64 and np.any(p >> np.uint64(self.dim)):
            raise DomainError(f"points wider than dimension {self.dim}")
        p.setflags(write=False)
        y.setflags(write=False)
        object.__setattr__(self, "points", p)
        object.__setattr__(self, "responses", y)

    @property
    def n(self) -> int:
        return self.points.shape[0]

    def __len__(self):
        return self.n

    def slice(self, start: int, stop: int) -> "Dataset":
        return Dataset(self.dim, self.points[start:stop], self.responses[start:stop], self.provenance)


def schedule(n: int, cfg: EstimatorConfig) -> tuple[int, float]:
    """Degree cap d0 and influence threshold delta for sample size n (natural logs)."""
    if n < 2:
        raise DomainError(f"n must be >= 2, got {n}")
    if cfg.d0_override is not None:
        d0 = int(cfg.d0_override)
    else:
        ln = math.log(n)
        inner = max(ln - cfg.c0 * math.sqrt(ln), 0.0)
        d0 = max(math.ceil(math.sqrt(inner / cfg.gamma)), 1)
    return d0, math.exp(-cfg.gamma * d0)


def estimate_influences(first_half: Dataset) -> tuple[np.ndarray, list[int]]:
    """Difference of conditional response means per coordinate.

    Coordinates with an empty bin get estimate 0 and are returned in the
    second element (1-based).
    """
    d = first_half.dim
    # the estimate is shift invariant; shifting by one response makes constant data give exact zeros
    y = first_half.responses - first_half.responses[0]
    sums1, counts1 = kernels.coord_bin_stats(first_half.points, y, d)
    total = float(y.sum())
    counts0 = first_half.n - counts1
    est = np.zeros(d)
    ok = (counts1 > 0) & (counts0 > 0)
    est[ok] = sums1[ok] / counts1[ok] - (total - sums1[ok]) / counts0[ok]
    flagged = [int(i) + 1 for i in np.flatnonzero(~ok)]
    return est, flagged


def select_coordinates(influences, delta: float) -> frozenset:
    if not delta > 0:
        raise DomainError(f"delta must be > 0, got {delta}")
    return frozenset(int(i) + 1 for i in np.flatnonzero(np.asarray(influences) >= delta / 2.0))


def spectral_set_size(j: int, d0: int) -> int:
    return sum(math.comb(j, k) for k in range(min(d0, j) + 1))


def enumerate_spectral_set(J, d0: int, cap: int = 1 << 20) -> list[int]:
    """Masks of all subsets of J with at most d0 elements, by size then mask."""
    if d0 < 1:
        raise DomainError(f"d0 must be >= 1, got {d0}")
    coords = sorted(J)
    count = spectral_set_size(len(coords), d0)
    if count > cap:
        raise CapacityError(f"spectral set has {count} subsets, cap is {cap}")
    out = []
    for k in range(min(d0, len(coords)) + 1):
        out.extend(sorted(sum(1 << (c - 1) for c in combo)
                          for combo in itertools.combinations(coords, k)))
    return out


def estimate_coefficients(second_half: Dataset, masks) -> dict[int, float]:
    """Empirical averages of Y * chi_S(X) over the second half."""
    m = np.asarray(list(masks), dtype=np.uint64)
    vals = kernels.char_means(second_half.points, second_half.responses, m)
    return {int(S): float(v) for S, v in zip(m, vals)}


@dataclass(frozen=True, eq=False)
class EstimatorOutput:
    dim: int
    n1: int
    n2: int
    d0: int
    delta: float
    influence_estimates: np.ndarray
    flagged: tuple
    selected: frozenset
    spectral_set: tuple
    coeffs: dict

    def spectrum(self) -> FourierSpectrum:
        return FourierSpectrum(self.dim, self.coeffs)

    def predict_raw(self, points) -> np.ndarray:
        """Partial Fourier sum without clamping."""
        masks = np.asarray(self.spectral_set, dtype=np.uint64)
        vals = np.array([self.coeffs[S] for S in self.spectral_set])
        return kernels.eval_spectrum(as_points(points), masks, vals)

    def predict(self, points) -> np.ndarray:
        return np.clip(self.predict_raw(points), 0.0, 1.0)

    __call__ = predict

    def table_raw(self) -> np.ndarray:
        """Unclamped predictions on all 2^d points, via one inverse transform."""
        if self.dim > MAX_DENSE_DIM:
            raise CapacityError(f"dimension {self.dim} exceeds dense limit {MAX_DENSE_DIM}")
        return np.array(wht_inverse(self.spectrum()).values)

    def table(self) -> np.ndarray:
        return np.clip(self.table_raw(), 0.0, 1.0)

    def to_json(self) -> dict:
        return {
            "dim": self.dim,
            "n1": self.n1,
            "n2": self.n2,
            "d0": self.d0,
            "delta": self.delta,
            "influence_estimates": [float(v) for v in self.influence_estimates],
            "flagged": list(self.flagged),
            "selected": sorted(self.selected),
            "spectral_set": list(self.spectral_set),
            "coeffs": [[S, self.coeffs[S]] for S in self.spectral_set],
        }


def fit(data: Dataset, cfg: EstimatorConfig = EstimatorConfig()) -> EstimatorOutput:
    n = data.n
    if n < 2:
        raise DomainError(f"fit needs n >= 2, got {n}")
    n1 = n // 2
    d0, delta = schedule(n, cfg)
    infl, flagged = estimate_influences(data.slice(0, n1))
    selected = select_coordinates(infl, delta)
    masks = enumerate_spectral_set(selected, d0, cfg.max_spectral_set)
    coeffs = estimate_coefficients(data.slice(n1, n), masks)
    infl.setflags(write=False)
    return EstimatorOutput(
        dim=data.dim,
        n1=n1,
        n2=n - n1,
        d0=d0,
        delta=delta,
        influence_estimates=infl,
        flagged=tuple(flagged),
        selected=selected,
        spectral_set=tuple(masks),
        coeffs=coeffs,
    )
