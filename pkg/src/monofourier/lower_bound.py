"""Hard instances: middle-layer functions indexed by a greedy binary packing."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import kernels
from .core import MAX_DENSE_DIM
from .errors import CapacityError, DomainError, InfeasibleError, PartialCodeError
from .influence import influence_profile, is_monotone
from .zoo import MiddleLayer, layer_point

RETRY_FACTOR = 50
EXHAUSTIVE_MAX_S = 12


def hamming(a: int, b: int) -> int:
    return (a ^ b).bit_count()


@dataclass(frozen=True)
class PackingCode:
    N: int
    min_dist: int
    words: tuple
    seed: int

    def __len__(self):
        return len(self.words)

    def log_size(self) -> float:
        return math.log(len(self.words))

    def pairwise_min_distance(self) -> int:
        """Smallest distance over distinct pairs, recomputed from scratch."""
        limbs = (self.N + 63) // 64
        w = np.array([[(x >> (64 * l)) & 0xFFFFFFFFFFFFFFFF for l in range(limbs)]
                      for x in self.words], dtype=np.uint64).reshape(len(self.words), limbs)
        best = self.N + 1
        for a in range(len(w) - 1):
            dist = np.bitwise_count(w[a + 1:] ^ w[a]).sum(axis=1)
            best = min(best, int(dist.min()))
        return best

    def verify(self) -> bool:
        return len(self.words) < 2 or self.pairwise_min_distance() >= self.min_dist

    def to_json(self) -> dict:
        return {"N": self.N, "min_dist": self.min_dist, "seed": self.seed,
                "words": [hex(w) for w in self.words]}

    @classmethod
    def from_json(cls, obj) -> "PackingCode":
        return cls(int(obj["N"]), int(obj["min_dist"]),
                   tuple(int(w, 16) for w in obj["words"]), int(obj["seed"]))


def _limbs_to_int(limbs: np.ndarray) -> int:
    return int.from_bytes(limbs.astype("<u8").tobytes(), "little")


def vg_packing(N: int, min_dist: int, target_count: int, seed: int,
               max_draws: Optional[int] = None) -> PackingCode:
    """Greedy random code: keep a uniform word iff it is far from all kept words.

    Raises ``PartialCodeError`` (carrying the words found) when the draw
    budget, ``RETRY_FACTOR * target_count`` by default, runs out first.
    """
    if N < 1:
        raise DomainError(f"codeword length must be >= 1, got {N}")
    if min_dist > N:
        raise InfeasibleError(f"min_dist {min_dist} exceeds codeword length {N}")
    if min_dist < 1:
        raise DomainError(f"min_dist must be >= 1, got {min_dist}")
    if target_count < 2:
        raise DomainError(f"target_count must be >= 2, got {target_count}")
    budget = RETRY_FACTOR * target_count if max_draws is None else max_draws

    limbs = (N + 63) // 64
    top = N - 64 * (limbs - 1)
    top_mask = np.uint64((1 << top) - 1) if top < 64 else np.uint64(0xFFFFFFFFFFFFFFFF)
    rng = np.random.default_rng(seed)
    kept = np.zeros((target_count, limbs), dtype=np.uint64)
    count = 0
    for _ in range(budget):
        cand = rng.integers(0, np.iinfo(np.uint64).max, size=limbs, dtype=np.uint64,
                            endpoint=True)
        cand[-1] &= top_mask
        if kernels.far_from_all(kept, count, cand, min_dist):
            kept[count] = cand
            count += 1
            if count == target_count:
                break
    words = tuple(_limbs_to_int(kept[r]) for r in range(count))
    if count < target_count:
        raise PartialCodeError(
            f"found {count} of {target_count} words (N={N}, min_dist={min_dist}) "
            f"within {budget} draws", words)
    return PackingCode(N, min_dist, words, seed)


def layer_fraction(s: int) -> float:
    """C(s, m) / 2^s with m = floor(s/2)."""
    return math.comb(s, s // 2) / 2.0 ** s


def beta_from_budget(K: float, s: int) -> tuple[float, float]:
    """Height beta and the tight constant A = 2 sqrt(s) C(s,m) / 2^s."""
    if not K > 0:
        raise DomainError(f"K must be > 0, got {K}")
    if s < 1:
        raise DomainError(f"s must be >= 1, got {s}")
    A = 2.0 * math.sqrt(s) * layer_fraction(s)
    beta = K / (A * math.sqrt(s))
    if beta > 1.0:
        raise InfeasibleError(f"beta = {beta:.6g} > 1: budget K={K} too large for s={s}")
    return beta, A


def default_a1(s: int) -> float:
    A = 2.0 * math.sqrt(s) * layer_fraction(s)
    return max(A * A, A)


def beta_b_from_budget(B: float, s: int, A1: float) -> float:
    """Height that saturates the L2-influence budget B."""
    if not B > 0 or not A1 > 0:
        raise DomainError(f"B and A1 must be > 0, got B={B}, A1={A1}")
    beta = math.sqrt(B / (A1 * math.sqrt(s)))
    if beta > 1.0:
        raise InfeasibleError(f"beta_B = {beta:.6g} > 1 for B={B}, s={s}, A1={A1}")
    return beta


@dataclass(frozen=True)
class MiddleLayerFamily:
    dim: int
    support: tuple
    beta: float
    code: PackingCode

    def __post_init__(self):
        s = len(self.support)
        if not 0.0 < self.beta <= 1.0:
            raise DomainError(f"beta must lie in (0, 1], got {self.beta}")
        if s > self.dim:
            raise DomainError(f"support size {s} exceeds dim {self.dim}")
        if self.code.N != math.comb(s, s // 2):
            raise DomainError(f"code length {self.code.N} != C({s},{s // 2})")

    @property
    def s(self) -> int:
        return len(self.support)

    @property
    def m(self) -> int:
        return self.s // 2

    @property
    def N(self) -> int:
        return self.code.N

    def __len__(self):
        return len(self.code)

    def layer_points(self) -> list[int]:
        return [layer_point(r, self.s, self.m) for r in range(self.N)]

    def to_json(self) -> dict:
        return {"dim": self.dim, "s": self.s, "support": list(self.support),
                "beta": self.beta, "code": self.code.to_json()}

    @classmethod
    def from_json(cls, obj) -> "MiddleLayerFamily":
        fam = cls(int(obj["dim"]), tuple(obj["support"]), float(obj["beta"]),
                  PackingCode.from_json(obj["code"]))
        if "s" in obj and int(obj["s"]) != fam.s:
            raise DomainError("family 's' disagrees with its support")
        return fam


def default_min_dist(N: int) -> int:
    return math.ceil(N / 4)


def default_target(N: int, cap: int) -> int:
    """ceil(exp(N/8)) words, never fewer than 2 and never more than ``cap``."""
    want = math.ceil(math.exp(N / 8)) if N / 8 < 700 else cap
    return max(2, min(want, cap))


def build_family(s: int, beta: float, seed: int, dim: Optional[int] = None,
                 target_cap: int = 1024) -> MiddleLayerFamily:
    """Family on coordinates 1..s with a greedy packing at distance ceil(N/4).

    Small layers may not admit ``default_target`` words; in that case the
    partial code from the greedy search is used as long as it has >= 2 words.
    """
    N = math.comb(s, s // 2)
    target = default_target(N, target_cap)
    try:
        code = vg_packing(N, default_min_dist(N), target, seed)
    except PartialCodeError as exc:
        if len(exc.words) < 2:
            raise
        code = PackingCode(N, default_min_dist(N), exc.words, seed)
    return MiddleLayerFamily(dim or s, tuple(range(1, s + 1)), beta, code)


def make_f_omega(family: MiddleLayerFamily, omega_index: int) -> MiddleLayer:
    if not 0 <= omega_index < len(family.code):
        raise DomainError(f"omega index {omega_index} outside 0..{len(family.code) - 1}")
    return MiddleLayer(family.dim, family.support, family.beta, family.code.words[omega_index])


def separation(family: MiddleLayerFamily, i: int, j: int) -> float:
    """Squared L2 distance beta^2 d_H / 2^s between two family members."""
    dh = hamming(family.code.words[i], family.code.words[j])
    return family.beta ** 2 * dh / 2.0 ** family.s


def kl_gaussian(sq_l2_dist: float, n: int, sigma: float) -> float:
    if not sigma > 0:
        raise DomainError(f"sigma must be > 0, got {sigma}")
    if n < 1 or sq_l2_dist < 0:
        raise DomainError("need n >= 1 and a nonnegative distance")
    return n * sq_l2_dist / (2.0 * sigma * sigma)


def fano_terms(beta: float, n: int, sigma: float, code_size: float) -> tuple[float, float, bool]:
    kl_bar = kl_gaussian(beta * beta, n, sigma)
    half_log = 0.5 * math.log(code_size)
    return kl_bar, half_log, kl_bar <= half_log


def fano_budget(family: MiddleLayerFamily, n: int, sigma: float) -> tuple[float, float, bool]:
    """(n beta^2 / 2 sigma^2, log|code| / 2, whether the first is <= the second)."""
    if len(family.code) < 2:
        raise DomainError("Fano budget needs at least two codewords")
    return fano_terms(family.beta, n, sigma, len(family.code))


def _sub_family(family: MiddleLayerFamily) -> MiddleLayerFamily:
    """Same family on {0,1}^s; the other coordinates never matter."""
    return MiddleLayerFamily(family.s, tuple(range(1, family.s + 1)), family.beta, family.code)


@dataclass
class FamilyCheck:
    omega_index: int
    monotone: bool
    min_value: float
    max_value: float
    total_l1: float
    total_l2: float
    l2_identity_gap: float


@dataclass
class FamilyReport:
    s: int
    beta: float
    K: float
    B: Optional[float]
    code_size: int
    partial: bool
    checks: list = field(default_factory=list)
    distance_ok: bool = True
    separation_gap: float = 0.0

    @property
    def monotone_ok(self) -> bool:
        return all(c.monotone for c in self.checks)

    @property
    def range_ok(self) -> bool:
        return all(c.min_value >= 0.0 and c.max_value <= self.beta for c in self.checks)

    @property
    def influence_ok(self) -> bool:
        return all(c.total_l1 <= self.K + 1e-10 for c in self.checks)

    @property
    def l2_identity_ok(self) -> bool:
        return all(c.l2_identity_gap <= 1e-12 for c in self.checks)

    @property
    def l2_budget_ok(self) -> bool:
        return self.B is None or all(c.total_l2 <= self.B + 1e-10 for c in self.checks)

    @property
    def all_ok(self) -> bool:
        return (self.monotone_ok and self.range_ok and self.influence_ok
                and self.l2_identity_ok and self.l2_budget_ok and self.distance_ok
                and self.separation_gap <= 1e-12)

    def to_json(self) -> dict:
        return {
            "s": self.s, "beta": self.beta, "K": self.K, "B": self.B,
            "code_size": self.code_size, "partial": self.partial,
            "monotone": self.monotone_ok, "range": self.range_ok,
            "influence_budget": self.influence_ok, "l2_identity": self.l2_identity_ok,
            "l2_budget": self.l2_budget_ok, "distance": self.distance_ok,
            "separation_gap": self.separation_gap,
            "max_total_l1": max((c.total_l1 for c in self.checks), default=0.0),
            "max_total_l2": max((c.total_l2 for c in self.checks), default=0.0),
            "all_ok": self.all_ok,
        }


def verify_family(family: MiddleLayerFamily, K: float, B: Optional[float] = None,
                  sample: int = 16, max_pairs: int = 2000) -> FamilyReport:
    """Exhaustively check every member for s <= 12; sample members beyond that.

    Works on the s-dimensional sub-cube, which is exact because coordinates
    outside the support are dummies.
    """
    s = family.s
    if s > MAX_DENSE_DIM:
        raise CapacityError(f"s={s} exceeds dense limit {MAX_DENSE_DIM}")
    partial = s > EXHAUSTIVE_MAX_S
    sub = _sub_family(family)
    indices = range(len(sub.code)) if not partial else range(min(sample, len(sub.code)))
    report = FamilyReport(s=s, beta=family.beta, K=float(K), B=B,
                          code_size=len(family.code), partial=partial)
    tables = {}
    for r in indices:
        t = make_f_omega(sub, r).to_table()
        tables[r] = t.values
        prof = influence_profile(t)
        report.checks.append(FamilyCheck(
            omega_index=r,
            monotone=is_monotone(t),
            min_value=float(t.values.min()),
            max_value=float(t.values.max()),
            total_l1=prof.total_l1,
            total_l2=prof.total_l2,
            l2_identity_gap=abs(prof.total_l2 - family.beta * prof.total_l1),
        ))
    report.distance_ok = family.code.verify()
    idx = sorted(tables)
    gap, pairs = 0.0, 0
    for a in idx:
        for b in idx[idx.index(a) + 1:]:
            if pairs >= max_pairs:
                break
            brute = float(np.mean((tables[a] - tables[b]) ** 2))
            gap = max(gap, abs(brute - separation(family, a, b)))
            pairs += 1
    report.separation_gap = gap
    return report


def default_support_size(n: int) -> int:
    """floor(2 log2 n)."""
    return int(math.floor(2.0 * math.log2(n)))


def lower_bound_demo(s: int, K: float, sigma: float, n: int, seed: int = 0,
                     B: Optional[float] = None, A1: Optional[float] = None,
                     target_cap: int = 1024) -> dict:
    """Build, verify and summarize one hard family as a JSON-ready dict."""
    if B is None:
        beta, A = beta_from_budget(K, s)
    else:
        A = 2.0 * math.sqrt(s) * layer_fraction(s)
        A1 = default_a1(s) if A1 is None else A1
        beta = beta_b_from_budget(B, s, A1)
    family = build_family(s, beta, seed, target_cap=target_cap)
    report = verify_family(family, K, B)
    seps = [separation(family, a, b)
            for a in range(min(len(family), 400)) for b in range(a + 1, len(family))]
    kl_bar, half_log, ok = fano_budget(family, n, sigma)
    return {
        "s": s,
        "m": family.m,
        "N": family.N,
        "default_s": default_support_size(n),
        "K": K,
        "B": B,
        "A": A,
        "A1": A1,
        "beta": beta,
        "sigma": sigma,
        "n": n,
        "seed": seed,
        "min_dist": family.code.min_dist,
        "code_size": len(family),
        "log_code_size": family.code.log_size(),
        "vg_log_target": family.N / 8.0,
        "separation_min": min(seps) if seps else 0.0,
        "separation_max": max(seps) if seps else 0.0,
        "fano": {"kl_bar_bound": kl_bar, "half_log_omega": half_log, "satisfied": ok},
        "verification": report.to_json(),
        "family": family.to_json(),
    }
