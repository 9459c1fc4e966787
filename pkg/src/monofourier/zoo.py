"""Symbolic monotone test functions, evaluable for any d <= 64."""
from __future__ import annotations

import json
import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .core import MAX_DENSE_DIM, TruthTable, all_points, as_points, check_dim
from .errors import CapacityError, DomainError

_ONE = np.uint64(1)


def _bit(points: np.ndarray, coord: int) -> np.ndarray:
    return (points >> np.uint64(coord - 1)) & _ONE


def _check_coords(coords, dim) -> tuple:
    coords = tuple(int(c) for c in coords)
    if not coords:
        raise DomainError("coordinate set must be nonempty")
    if len(set(coords)) != len(coords):
        raise DomainError(f"repeated coordinates in {coords}")
    bad = [c for c in coords if not 1 <= c <= dim]
    if bad:
        raise DomainError(f"coordinates {bad} outside 1..{dim}")
    return coords


class FunctionSpec:
    """Base for symbolic functions {0,1}^dim -> [0,1]."""

    tag: str = ""
    dim: int

    def evaluate_many(self, points) -> np.ndarray:
        raise NotImplementedError

    def evaluate(self, x: int) -> float:
        x = int(x)
        if x < 0 or x >> self.dim:
            raise DomainError(f"point {x:#x} is wider than dimension {self.dim}")
        return float(self.evaluate_many(np.array([x], dtype=np.uint64))[0])

    def __call__(self, points) -> np.ndarray:
        return self.evaluate_many(as_points(points))

    def to_table(self) -> TruthTable:
        if self.dim > MAX_DENSE_DIM:
            raise CapacityError(f"dimension {self.dim} exceeds dense limit {MAX_DENSE_DIM}")
        return TruthTable(self.dim, self.evaluate_many(all_points(self.dim)))

    def params(self) -> dict:
        raise NotImplementedError

    def to_json(self) -> dict:
        return {"tag": self.tag, "dim": self.dim, **self.params()}

    def describe(self) -> str:
        return self.tag


@dataclass(frozen=True)
class Dictator(FunctionSpec):
    dim: int
    i: int = 1
    tag = "dictator"

    def __post_init__(self):
        check_dim(self.dim)
        if not 1 <= self.i <= self.dim:
            raise DomainError(f"dictator coordinate {self.i} outside 1..{self.dim}")

    def evaluate_many(self, points):
        return _bit(as_points(points), self.i).astype(np.float64)

    def params(self):
        return {"i": self.i}


@dataclass(frozen=True)
class AdditiveJunta(FunctionSpec):
    dim: int
    coords: tuple
    tag = "additive_junta"

    def __post_init__(self):
        check_dim(self.dim)
        object.__setattr__(self, "coords", _check_coords(self.coords, self.dim))

    @classmethod
    def first(cls, dim: int, s: int) -> "AdditiveJunta":
        return cls(dim, tuple(range(1, s + 1)))

    def evaluate_many(self, points):
        p = as_points(points)
        total = np.zeros(p.shape[0])
        for c in self.coords:
            total += _bit(p, c)
        return total / len(self.coords)

    def params(self):
        return {"coords": list(self.coords)}

    def describe(self):
        return f"additive_junta{len(self.coords)}"


@dataclass(frozen=True)
class Tribes(FunctionSpec):
    """OR of ANDs over consecutive blocks {1..w}, {w+1..2w}, ..."""

    dim: int
    width: int
    blocks: int
    tag = "tribes"

    def __post_init__(self):
        check_dim(self.dim)
        if self.width < 1 or self.blocks < 1:
            raise DomainError("tribes width and block count must be >= 1")
        if self.width * self.blocks > self.dim:
            raise DomainError(f"tribes needs {self.width * self.blocks} coordinates, dim is {self.dim}")

    def evaluate_many(self, points):
        p = as_points(points)
        hit = np.zeros(p.shape[0], dtype=bool)
        block = np.uint64((1 << self.width) - 1)
        for j in range(self.blocks):
            bm = block << np.uint64(j * self.width)
            hit |= (p & bm) == bm
        return hit.astype(np.float64)

    def params(self):
        return {"width": self.width, "blocks": self.blocks}

    def describe(self):
        return f"tribes{self.width}x{self.blocks}"


@dataclass(frozen=True)
class Majority(FunctionSpec):
    """1 when strictly more than half the coordinates are 1."""

    dim: int
    tag = "majority"

    def __post_init__(self):
        check_dim(self.dim)

    def evaluate_many(self, points):
        ones = np.bitwise_count(as_points(points)).astype(np.int64)
        return (2 * ones > self.dim).astype(np.float64)

    def params(self):
        return {}


def _pascal(n: int) -> np.ndarray:
    table = np.zeros((n + 1, n + 2), dtype=np.int64)
    for a in range(n + 1):
        for b in range(a + 1):
            table[a, b] = math.comb(a, b)
    return table


def layer_rank(z: int, s: int) -> int:
    """Position of a weight-m point among weight-m points of {0,1}^s in increasing mask order."""
    rank, seen = 0, 0
    for k in range(s):
        if z >> k & 1:
            seen += 1
            rank += math.comb(k, seen)
    return rank


def layer_point(rank: int, s: int, m: int) -> int:
    """Inverse of ``layer_rank`` on the weight-m layer."""
    z = 0
    for t in range(m, 0, -1):
        k = t - 1
        while math.comb(k + 1, t) <= rank:
            k += 1
        rank -= math.comb(k, t)
        z |= 1 << k
    return z


@dataclass(frozen=True)
class MiddleLayer(FunctionSpec):
    """0 below the middle layer of the support, beta above, beta*omega on it.

    ``omega`` is an integer whose bit r is the value assigned to the middle
    layer point of rank r (see ``layer_rank``).
    """

    dim: int
    support: tuple
    beta: float
    omega: int
    tag = "middle_layer"

    def __post_init__(self):
        check_dim(self.dim)
        object.__setattr__(self, "support", _check_coords(self.support, self.dim))
        if not 0.0 <= self.beta <= 1.0:
            raise DomainError(f"beta must lie in [0, 1], got {self.beta}")
        if self.omega < 0 or self.omega >> self.layer_size:
            raise DomainError(f"omega has bits beyond the {self.layer_size} layer positions")

    @property
    def s(self) -> int:
        return len(self.support)

    @property
    def m(self) -> int:
        return self.s // 2

    @property
    def layer_size(self) -> int:
        return math.comb(self.s, self.m)

    @cached_property
    def _omega_bits(self) -> np.ndarray:
        n = self.layer_size
        raw = self.omega.to_bytes((n + 7) // 8 or 1, "little")
        return np.unpackbits(np.frombuffer(raw, dtype=np.uint8), bitorder="little")[:n]

    def project(self, points) -> np.ndarray:
        p = as_points(points)
        z = np.zeros(p.shape[0], dtype=np.uint64)
        for k, c in enumerate(self.support):
            z |= _bit(p, c) << np.uint64(k)
        return z

    def evaluate_many(self, points):
        z = self.project(points)
        weight = np.bitwise_count(z).astype(np.int64)
        pas = _pascal(self.s)
        rank = np.zeros(z.shape[0], dtype=np.int64)
        seen = np.zeros(z.shape[0], dtype=np.int64)
        for k in range(self.s):
            b = ((z >> np.uint64(k)) & _ONE).astype(np.int64)
            seen += b
            rank += b * pas[k, np.minimum(seen, k + 1)]
        out = np.where(weight > self.m, self.beta, 0.0)
        on = weight == self.m
        out[on] = self.beta * self._omega_bits[rank[on]]
        return out

    def params(self):
        return {"support": list(self.support), "beta": self.beta, "omega": hex(self.omega)}

    def describe(self):
        return f"middle_layer_s{self.s}"


@dataclass(frozen=True, eq=False)
class Table(FunctionSpec):
    table: TruthTable
    tag = "table"

    @property
    def dim(self) -> int:
        return self.table.dim

    def evaluate_many(self, points):
        return self.table.values[as_points(points).astype(np.int64)]

    def to_table(self):
        return self.table

    def params(self):
        return {"values": [float(v) for v in self.table.values]}

    def __eq__(self, other):
        return (isinstance(other, Table) and other.dim == self.dim
                and np.array_equal(other.table.values, self.table.values))

    __hash__ = None


def constant(dim: int, c: float) -> Table:
    return Table(TruthTable.constant(dim, c))


_FIELDS = {
    "dictator": ("i",),
    "additive_junta": ("coords",),
    "tribes": ("width", "blocks"),
    "majority": (),
    "middle_layer": ("support", "beta", "omega"),
    "table": ("values",),
}


def from_json(obj) -> FunctionSpec:
    """Inverse of ``FunctionSpec.to_json``; unknown or missing fields are errors."""
    if isinstance(obj, str):
        obj = json.loads(obj)
    obj = dict(obj)
    tag = obj.pop("tag", None)
    if tag not in _FIELDS:
        raise DomainError(f"unknown function tag {tag!r}")
    if "dim" not in obj:
        raise DomainError("function spec is missing 'dim'")
    dim = obj.pop("dim")
    missing = [k for k in _FIELDS[tag] if k not in obj]
    extra = sorted(set(obj) - set(_FIELDS[tag]))
    if missing:
        raise DomainError(f"function spec '{tag}' is missing {missing}")
    if extra:
        raise DomainError(f"unknown fields for '{tag}': {extra}")
    if tag == "dictator":
        return Dictator(dim, obj["i"])
    if tag == "additive_junta":
        return AdditiveJunta(dim, tuple(obj["coords"]))
    if tag == "tribes":
        return Tribes(dim, obj["width"], obj["blocks"])
    if tag == "majority":
        return Majority(dim)
    if tag == "middle_layer":
        return MiddleLayer(dim, tuple(obj["support"]), float(obj["beta"]), int(obj["omega"], 16))
    return Table(TruthTable(dim, obj["values"]))


def tribes_pivotal_influence(width: int, blocks: int) -> float:
    """Per-coordinate influence: own block otherwise full, every other block not full."""
    return 2.0 ** -(width - 1) * (1.0 - 2.0 ** -width) ** (blocks - 1)


def tribes_influence_exact(width: int, blocks: int) -> float:
    """Total L1 influence of tribes on d = width*blocks coordinates, by enumeration."""
    from .influence import influence_profile

    d = width * blocks
    if d > MAX_DENSE_DIM:
        raise CapacityError(f"tribes {width}x{blocks} needs d={d} > {MAX_DENSE_DIM}")
    prof = influence_profile(Tribes(d, width, blocks).to_table())
    expected = tribes_pivotal_influence(width, blocks)
    worst = float(np.max(np.abs(prof.l1 - expected)))
    if worst > 1e-12:
        raise ArithmeticError(f"tribes influence deviates from pivotal closed form by {worst}")
    return prof.total_l1
