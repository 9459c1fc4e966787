"""Exact Fourier analysis on {0,1}^d under the uniform measure.

Conventions: a point or a subset is a bitmask in which bit ``i`` stands for
coordinate ``i + 1``. Entry ``m`` of a truth table is the value at the point
whose bitmask is ``m``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping, Union

import numpy as np

from . import kernels
from .errors import CapacityError, DomainError

MAX_POINT_DIM = 64
MAX_DENSE_DIM = 20

HYPERCONTRACTIVE_P = 4.0 / 3.0
HYPERCONTRACTIVE_Q = 2.0
HYPERCONTRACTIVE_RHO = 1.0 / math.sqrt(3.0)


def check_dim(d: int, limit: int = MAX_POINT_DIM) -> int:
    if not isinstance(d, (int, np.integer)) or d < 1:
        raise DomainError(f"dimension must be a positive integer, got {d!r}")
    if d > limit:
        raise CapacityError(f"dimension {d} exceeds limit {limit}")
    return int(d)


def full_mask(d: int) -> int:
    return (1 << d) - 1


def popcount(m: int) -> int:
    return int(m).bit_count()


def character(S: int, x: int) -> int:
    """chi_S(x) = prod_{i in S} (2 x_i - 1), as +1 or -1."""
    return -1 if popcount(S & ~x) & 1 else 1


def subset_sizes(d: int) -> np.ndarray:
    """|S| for every mask S in 0 .. 2^d - 1."""
    return np.bitwise_count(np.arange(1 << d, dtype=np.uint64)).astype(np.int64)


def as_points(points) -> np.ndarray:
    return np.ascontiguousarray(np.asarray(points, dtype=np.uint64).reshape(-1))


def all_points(d: int) -> np.ndarray:
    check_dim(d, MAX_DENSE_DIM)
    return np.arange(1 << d, dtype=np.uint64)


@dataclass(frozen=True, eq=False)
class TruthTable:
    """Dense real-valued function on {0,1}^dim."""

    dim: int
    values: np.ndarray

    def __post_init__(self):
        d = check_dim(self.dim, MAX_DENSE_DIM)
        v = np.array(self.values, dtype=np.float64).reshape(-1)
        if v.shape[0] != 1 << d:
            raise DomainError(f"table length {v.shape[0]} != 2^{d}")
        if not np.all(np.isfinite(v)):
            raise DomainError("table values must be finite")
        v.setflags(write=False)
        object.__setattr__(self, "dim", d)
        object.__setattr__(self, "values", v)

    @classmethod
    def constant(cls, d: int, c: float) -> "TruthTable":
        return cls(d, np.full(1 << check_dim(d, MAX_DENSE_DIM), float(c)))

    def __len__(self):
        return self.values.shape[0]

    def __getitem__(self, m):
        return self.values[m]

    def mean(self) -> float:
        return float(self.values.mean())

    def variance(self) -> float:
        return float(np.mean((self.values - self.values.mean()) ** 2))


Coeffs = Union[np.ndarray, Mapping[int, float]]


@dataclass(frozen=True, eq=False)
class FourierSpectrum:
    """Fourier coefficients indexed by subset mask, dense or sparse."""

    dim: int
    coeffs: Coeffs

    def __post_init__(self):
        d = check_dim(self.dim)
        object.__setattr__(self, "dim", d)
        if isinstance(self.coeffs, Mapping):
            limit = full_mask(d)
            sparse = {}
            for S, c in self.coeffs.items():
                S = int(S)
                if S < 0 or S & ~limit:
                    raise DomainError(f"subset mask {S:#x} has bits above dimension {d}")
                sparse[S] = float(c)
            object.__setattr__(self, "coeffs", sparse)
        else:
            check_dim(d, MAX_DENSE_DIM)
            c = np.array(self.coeffs, dtype=np.float64).reshape(-1)
            if c.shape[0] != 1 << d:
                raise DomainError(f"dense spectrum length {c.shape[0]} != 2^{d}")
            c.setflags(write=False)
            object.__setattr__(self, "coeffs", c)

    @property
    def is_dense(self) -> bool:
        return isinstance(self.coeffs, np.ndarray)

    def __getitem__(self, S: int) -> float:
        if self.is_dense:
            return float(self.coeffs[S])
        return self.coeffs.get(int(S), 0.0)

    def items(self):
        if self.is_dense:
            return ((S, float(c)) for S, c in enumerate(self.coeffs))
        return iter(sorted(self.coeffs.items()))

    def masks_and_values(self) -> tuple[np.ndarray, np.ndarray]:
        if self.is_dense:
            return np.arange(self.coeffs.shape[0], dtype=np.uint64), self.coeffs
        keys = sorted(self.coeffs)
        return (np.array(keys, dtype=np.uint64),
                np.array([self.coeffs[k] for k in keys], dtype=np.float64))

    def to_dense(self) -> np.ndarray:
        if self.is_dense:
            return self.coeffs
        check_dim(self.dim, MAX_DENSE_DIM)
        out = np.zeros(1 << self.dim)
        for S, c in self.coeffs.items():
            out[S] = c
        return out

    def weight(self) -> float:
        """Sum of squared coefficients."""
        if self.is_dense:
            return float(np.dot(self.coeffs, self.coeffs))
        return float(sum(c * c for c in self.coeffs.values()))

    def evaluate(self, points) -> np.ndarray:
        masks, vals = self.masks_and_values()
        return kernels.eval_spectrum(as_points(points), masks, np.ascontiguousarray(vals))


def wht_forward(t: TruthTable) -> FourierSpectrum:
    """All 2^d coefficients E[f chi_S] by the O(d 2^d) butterfly."""
    # chi_S(x) = (-1)^|S & ~x|: feed the butterfly the table at complemented points
    a = np.ascontiguousarray(t.values[::-1], dtype=np.float64).copy()
    kernels.wht_inplace(a)
    a /= float(1 << t.dim)
    return FourierSpectrum(t.dim, a)


def wht_inverse(spec: FourierSpectrum) -> TruthTable:
    a = np.array(spec.to_dense(), dtype=np.float64)
    kernels.wht_inplace(a)
    return TruthTable(spec.dim, a[::-1])


def noise_operator(spec: FourierSpectrum, rho: float) -> FourierSpectrum:
    """Damp the coefficient of S by rho^|S|."""
    if not 0.0 <= rho <= 1.0:
        raise DomainError(f"rho must lie in [0, 1], got {rho}")
    if spec.is_dense:
        damp = np.power(float(rho), subset_sizes(spec.dim).astype(np.float64))
        return FourierSpectrum(spec.dim, spec.coeffs * damp)
    return FourierSpectrum(
        spec.dim, {S: float(rho) ** popcount(S) * c for S, c in spec.coeffs.items()}
    )


def lp_norm(t: TruthTable, p: float) -> float:
    if not p >= 1.0:
        raise DomainError(f"p must be >= 1, got {p}")
    return float(np.mean(np.abs(t.values) ** p) ** (1.0 / p))


def hypercontractivity_check(t: TruthTable) -> tuple[float, float, bool]:
    """Compare ||T_rho f||_2 with ||f||_{4/3} at rho = 1/sqrt(3).

    The left side is computed from the spectrum (Parseval), the right side
    from the table.
    """
    lhs = math.sqrt(noise_operator(wht_forward(t), HYPERCONTRACTIVE_RHO).weight())
    rhs = lp_norm(t, HYPERCONTRACTIVE_P)
    return lhs, rhs, lhs <= rhs + 1e-12
