"""Data generation, risk evaluation and experiment drivers."""
from __future__ import annotations

import csv
import io
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from .core import MAX_DENSE_DIM, TruthTable, wht_forward
from .errors import CapacityError, DomainError
from .estimator import Dataset, EstimatorConfig, EstimatorOutput, fit
from .influence import ConcentrationReport, concentration_report, influence_profile
from .zoo import FunctionSpec

EXACT_DECOMPOSITION_MAX_DIM = 12
FRESH_POINTS = 100_000

CSV_FIELDS = ["experiment_id", "function_tag", "d", "n", "sigma", "replicates",
              "mean_risk", "std_error", "d0", "delta", "mean_J_size", "mean_S_size", "seed"]


@dataclass(frozen=True)
class NoiseModel:
    """Centered noise: ``gaussian`` N(0, scale^2), ``uniform`` U[-scale, scale], or ``none``."""

    kind: str = "gaussian"
    scale: float = 1.0

    def __post_init__(self):
        if self.kind not in ("gaussian", "uniform", "none"):
            raise DomainError(f"unknown noise kind {self.kind!r}")
        if self.kind == "none":
            object.__setattr__(self, "scale", 0.0)
        elif not self.scale >= 0:
            raise DomainError(f"noise scale must be >= 0, got {self.scale}")

    @classmethod
    def gaussian(cls, sigma: float) -> "NoiseModel":
        return cls("gaussian", sigma)

    @classmethod
    def uniform(cls, half_width: float) -> "NoiseModel":
        return cls("uniform", half_width)

    @classmethod
    def none(cls) -> "NoiseModel":
        return cls("none", 0.0)

    @property
    def sigma(self) -> float:
        """Sub-Gaussian parameter: E exp(t eps) <= exp(sigma^2 t^2 / 2)."""
        return float(self.scale)

    @property
    def variance(self) -> float:
        if self.kind == "uniform":
            return self.scale ** 2 / 3.0
        return self.scale ** 2

    def sample(self, rng: np.random.Generator, n: int) -> np.ndarray:
        if self.kind == "gaussian":
            return rng.normal(0.0, self.scale, size=n)
        if self.kind == "uniform":
            return rng.uniform(-self.scale, self.scale, size=n)
        return np.zeros(n)

    def to_json(self) -> dict:
        return {"kind": self.kind, "scale": self.scale}

    @classmethod
    def from_json(cls, obj: dict) -> "NoiseModel":
        unknown = sorted(set(obj) - {"kind", "scale"})
        if unknown:
            raise DomainError(f"unknown noise fields: {unknown}")
        return cls(obj.get("kind", "gaussian"), float(obj.get("scale", 1.0)))


def random_points(rng: np.random.Generator, d: int, n: int) -> np.ndarray:
    if d == 64:
        return rng.integers(0, np.iinfo(np.uint64).max, size=n, dtype=np.uint64, endpoint=True)
    return rng.integers(0, 1 << d, size=n, dtype=np.uint64)


def generate_dataset(f: FunctionSpec, n: int, noise: NoiseModel, seed: int) -> Dataset:
    if n < 1:
        raise DomainError(f"n must be >= 1, got {n}")
    rng = np.random.default_rng(seed)
    x = random_points(rng, f.dim, n)
    y = f.evaluate_many(x) + noise.sample(rng, n)
    return Dataset(f.dim, x, y, {"function": f.to_json(), "noise": noise.to_json(), "seed": seed})


def replicate_seed(master_seed: int, r: int) -> int:
    """Independent 64-bit seed for replicate r, via SeedSequence spawn keys."""
    ss = np.random.SeedSequence(master_seed, spawn_key=(r,))
    return int(ss.generate_state(1, dtype=np.uint64)[0])


def _as_values(predictor, d: int) -> np.ndarray:
    if isinstance(predictor, EstimatorOutput):
        return predictor.table()
    if isinstance(predictor, TruthTable):
        return predictor.values
    if isinstance(predictor, np.ndarray):
        return predictor
    if np.isscalar(predictor):
        return np.full(1 << d, float(predictor))
    return np.asarray(predictor(np.arange(1 << d, dtype=np.uint64)), dtype=np.float64)


def exact_risk(predictor, f) -> float:
    """Squared L2 distance under the uniform measure, by full enumeration.

    ``predictor`` may be an ``EstimatorOutput``, a table, a value array, a
    scalar or a callable on point arrays.
    """
    d = f.dim
    if d > MAX_DENSE_DIM:
        raise CapacityError(f"exact risk needs d <= {MAX_DENSE_DIM}, got {d}")
    target = f.values if isinstance(f, TruthTable) else f.to_table().values
    p = _as_values(predictor, d)
    return float(np.mean((p - target) ** 2))


@dataclass
class RiskReport:
    function_tag: str
    d: int
    n: int
    sigma: float
    replicates: int
    master_seed: int
    mean_risk: float
    std_error: float
    values: list
    seeds: list
    d0: Optional[int] = None
    delta: Optional[float] = None
    mean_J_size: Optional[float] = None
    mean_S_size: Optional[float] = None
    raw_values: list = field(default_factory=list)
    bias: list = field(default_factory=list)
    variance: list = field(default_factory=list)
    flagged: list = field(default_factory=list)
    config: dict = field(default_factory=dict)

    def csv_row(self, experiment_id: str) -> dict:
        return {
            "experiment_id": experiment_id,
            "function_tag": self.function_tag,
            "d": self.d,
            "n": self.n,
            "sigma": self.sigma,
            "replicates": self.replicates,
            "mean_risk": self.mean_risk,
            "std_error": self.std_error,
            "d0": "" if self.d0 is None else self.d0,
            "delta": "" if self.delta is None else self.delta,
            "mean_J_size": "" if self.mean_J_size is None else self.mean_J_size,
            "mean_S_size": "" if self.mean_S_size is None else self.mean_S_size,
            "seed": self.master_seed,
        }

    def to_json(self) -> dict:
        return asdict(self)


def _aggregate(values: Sequence[float]) -> tuple[float, float]:
    v = np.asarray(values, dtype=np.float64)
    if v.shape[0] < 2:
        return float(v.mean()), 0.0
    return float(v.mean()), float(v.std(ddof=1) / math.sqrt(v.shape[0]))


@dataclass(frozen=True)
class _Job:
    f: FunctionSpec
    n: int
    noise: NoiseModel
    cfg: Optional[EstimatorConfig]
    seed: int
    fresh_points: int


def _fourier_replicate(job: _Job, f_table, f_spec) -> dict:
    data = generate_dataset(job.f, job.n, job.noise, job.seed)
    out = fit(data, job.cfg)
    rec = {"J": len(out.selected), "S": len(out.spectral_set), "d0": out.d0,
           "delta": out.delta, "flagged": len(out.flagged)}
    if f_table is not None:
        raw = out.table_raw()
        rec["raw"] = float(np.mean((raw - f_table) ** 2))
        rec["risk"] = float(np.mean((np.clip(raw, 0.0, 1.0) - f_table) ** 2))
        if f_spec is not None:
            masks = np.asarray(out.spectral_set, dtype=np.int64)
            est = np.array([out.coeffs[S] for S in out.spectral_set])
            inside = np.zeros(f_spec.shape[0], dtype=bool)
            inside[masks] = True
            rec["bias"] = float(np.dot(f_spec[~inside], f_spec[~inside]))
            rec["variance"] = float(np.sum((est - f_spec[masks]) ** 2))
    else:
        rng = np.random.default_rng([job.seed, 1])
        x = random_points(rng, job.f.dim, job.fresh_points)
        rec["risk"] = float(np.mean((out.predict(x) - job.f.evaluate_many(x)) ** 2))
    return rec


def _baseline_replicate(job: _Job, f_table) -> dict:
    data = generate_dataset(job.f, job.n, job.noise, job.seed)
    c = min(max(float(data.responses.mean()), 0.0), 1.0)
    if f_table is not None:
        return {"risk": float(np.mean((c - f_table) ** 2))}
    rng = np.random.default_rng([job.seed, 1])
    x = random_points(rng, job.f.dim, job.fresh_points)
    return {"risk": float(np.mean((c - job.f.evaluate_many(x)) ** 2))}


def _target_views(f: FunctionSpec):
    f_table = f.to_table().values if f.dim <= MAX_DENSE_DIM else None
    f_spec = None
    if f.dim <= EXACT_DECOMPOSITION_MAX_DIM:
        f_spec = np.array(wht_forward(f.to_table()).coeffs)
    return f_table, f_spec


def _run(worker: Callable, jobs: list, workers: int) -> list:
    if workers <= 1 or len(jobs) < 2:
        return [worker(j) for j in jobs]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(worker, jobs, chunksize=max(1, len(jobs) // (4 * workers))))


class _FourierWorker:
    def __init__(self, f):
        self.f_table, self.f_spec = _target_views(f)

    def __call__(self, job):
        return _fourier_replicate(job, self.f_table, self.f_spec)


class _BaselineWorker:
    def __init__(self, f):
        self.f_table = f.to_table().values if f.dim <= MAX_DENSE_DIM else None

    def __call__(self, job):
        return _baseline_replicate(job, self.f_table)


def mc_risk(f: FunctionSpec, n: int, noise: NoiseModel, cfg: EstimatorConfig = EstimatorConfig(),
            replicates: int = 100, master_seed: int = 0, workers: int = 1,
            fresh_points: int = FRESH_POINTS) -> RiskReport:
    """Monte-Carlo risk of the Fourier thresholding estimator.

    Replicate r uses ``replicate_seed(master_seed, r)``; results are folded in
    replicate order, so ``workers`` never changes the output.
    """
    if replicates < 1:
        raise DomainError("replicates must be >= 1")
    seeds = [replicate_seed(master_seed, r) for r in range(replicates)]
    jobs = [_Job(f, n, noise, cfg, s, fresh_points) for s in seeds]
    recs = _run(_FourierWorker(f), jobs, workers)
    mean, se = _aggregate([r["risk"] for r in recs])
    return RiskReport(
        function_tag=f.describe(), d=f.dim, n=n, sigma=noise.sigma, replicates=replicates,
        master_seed=master_seed, mean_risk=mean, std_error=se,
        values=[r["risk"] for r in recs], seeds=seeds,
        d0=recs[0]["d0"], delta=recs[0]["delta"],
        mean_J_size=float(np.mean([r["J"] for r in recs])),
        mean_S_size=float(np.mean([r["S"] for r in recs])),
        raw_values=[r["raw"] for r in recs if "raw" in r],
        bias=[r["bias"] for r in recs if "bias" in r],
        variance=[r["variance"] for r in recs if "variance" in r],
        flagged=[r["flagged"] for r in recs],
        config={"estimator": cfg.to_json(), "noise": noise.to_json(), "function": f.to_json()},
    )


def constant_baseline_risk(f: FunctionSpec, n: int, noise: NoiseModel, replicates: int = 100,
                           master_seed: int = 0, workers: int = 1,
                           fresh_points: int = FRESH_POINTS) -> RiskReport:
    """Risk of predicting clamp(mean(Y), 0, 1) everywhere, on the same seed bank as ``mc_risk``."""
    if replicates < 1:
        raise DomainError("replicates must be >= 1")
    seeds = [replicate_seed(master_seed, r) for r in range(replicates)]
    jobs = [_Job(f, n, noise, None, s, fresh_points) for s in seeds]
    recs = _run(_BaselineWorker(f), jobs, workers)
    mean, se = _aggregate([r["risk"] for r in recs])
    return RiskReport(
        function_tag=f.describe(), d=f.dim, n=n, sigma=noise.sigma, replicates=replicates,
        master_seed=master_seed, mean_risk=mean, std_error=se,
        values=[r["risk"] for r in recs], seeds=seeds,
        config={"estimator": "constant", "noise": noise.to_json(), "function": f.to_json()},
    )


def spectral_sweep(f: FunctionSpec, d0_list: Sequence[int],
                   delta_list: Sequence[float]) -> list[ConcentrationReport]:
    """One concentration report per (d0, delta), with budget K = I(f)."""
    if f.dim > EXACT_DECOMPOSITION_MAX_DIM:
        raise CapacityError(f"spectral sweep needs d <= {EXACT_DECOMPOSITION_MAX_DIM}")
    t = f.to_table()
    K = influence_profile(t).total_l1
    return [concentration_report(t, d0, delta, K) for d0 in d0_list for delta in delta_list]


def format_csv(rows: Sequence[dict], fields: Sequence[str]) -> str:
    """CSV text; floats use Python's shortest round-trip repr."""
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=list(fields), lineterminator="\n")
    w.writeheader()
    for row in rows:
        w.writerow({k: (repr(v) if isinstance(v, float) else v) for k, v in row.items()})
    return buf.getvalue()
