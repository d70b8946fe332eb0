"""Monte Carlo verification of the exponential-law and martingale identities.

The headline check: for a finite jump time tau with continuous compensator A,
the random variable A(tau) is Exp(1).  The engine samples A(tau) in bulk,
compares the empirical CDF against 1 - e^{-t} with the exact one-sample
Kolmogorov-Smirnov statistic inside the finite-sample DKW band, checks the
integral identity F(t) = t - 1 + e^{-t} satisfied by F(t) = int_0^t P(Z <= s) ds,
screens for atoms, and separately checks the zero-mean martingale residual
1_{t >= tau} - A(t ^ tau).

Replication k always uses the random stream with stream_id = k, and results
are assembled in stream order, so reports are bitwise reproducible and
independent of how many workers run the replications.
"""

from __future__ import annotations

import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .core import RngStream, draw_exponential
from .processes import JumpModel

__all__ = [
    "ExpLawReport",
    "InfiniteSampleError",
    "MartingaleReport",
    "default_time_grid",
    "dkw_bound",
    "exp_law_verify",
    "ks_statistic",
    "martingale_residual",
    "ode_identity_check",
    "sample_a_tau",
]


class InfiniteSampleError(RuntimeError):
    """A model produced an infinite jump time; the law checks assume tau < inf."""


def exp1_cdf(x):
    """CDF of the unit exponential, accurate near 0; accepts arrays."""
    return -np.expm1(-np.asarray(x, float))


#: Replications per work unit; fixed so worker count cannot affect placement.
_CHUNK = 4096

#: Draws are pure functions of (seed, n); cache them across models.
_Z_CACHE: dict[tuple[int, int], np.ndarray] = {}


def _exponential_draws(seed: int, n: int, workers: int = 1) -> np.ndarray:
    """n Exp(1) draws, replication k from stream_id k; read-only and cached."""
    key = (int(seed), int(n))
    hit = _Z_CACHE.get(key)
    if hit is not None:
        return hit
    out = np.empty(n)

    def fill(lo: int, hi: int) -> None:
        for k in range(lo, hi):
            out[k] = draw_exponential(RngStream(seed, k))

    bounds = [(lo, min(lo + _CHUNK, n)) for lo in range(0, n, _CHUNK)]
    if workers <= 1 or len(bounds) <= 1:
        for lo, hi in bounds:
            fill(lo, hi)
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            list(pool.map(lambda b: fill(*b), bounds))
    out.flags.writeable = False
    if len(_Z_CACHE) >= 8:
        _Z_CACHE.clear()
    _Z_CACHE[key] = out
    return out


def _finite_taus(model: JumpModel, zs: np.ndarray) -> np.ndarray:
    taus = model.taus_from_draws(zs)
    if np.any(np.isinf(taus)):
        raise InfiniteSampleError(
            f"model {model.name!r} produced an infinite jump time; "
            "the exponential-law checks require tau < infinity almost surely"
        )
    return taus


def sample_a_tau(model: JumpModel, n: int, seed: int, workers: int = 1) -> np.ndarray:
    """n independent draws of A(tau), one per stream_id, in stream order."""
    if n < 1:
        raise ValueError(f"n must be at least 1, got {n}")
    zs = _exponential_draws(seed, n, workers)
    taus = _finite_taus(model, zs)
    return model.compensator.evaluate_many(taus)


def ks_statistic(samples, reference_cdf) -> float:
    """Exact one-sample Kolmogorov-Smirnov distance to a fully-specified CDF.

    sup over sorted samples x_(i) of max(|i/n - F(x_(i))|, |(i-1)/n - F(x_(i))|).
    """
    xs = np.sort(np.asarray(samples, float))
    n = len(xs)
    if n == 0:
        raise ValueError("ks_statistic needs at least one sample")
    try:
        F = np.asarray(reference_cdf(xs), float)
        if F.shape != xs.shape:
            raise TypeError
    except (TypeError, ValueError):
        F = np.array([reference_cdf(float(x)) for x in xs])
    i = np.arange(1, n + 1)
    upper = np.abs(i / n - F)
    lower = np.abs((i - 1) / n - F)
    return float(np.maximum(upper, lower).max())


def dkw_bound(n: int, alpha: float) -> float:
    """Dvoretzky-Kiefer-Wolfowitz band half-width sqrt(ln(2/alpha) / (2n))."""
    if n < 1:
        raise ValueError(f"n must be at least 1, got {n}")
    if not (0.0 < alpha < 1.0):
        raise ValueError(f"alpha must lie in (0, 1), got {alpha}")
    return math.sqrt(math.log(2.0 / alpha) / (2.0 * n))


def ode_identity_check(samples, grid) -> float:
    """Max error of int_0^t ecdf(s) ds against t - 1 + e^{-t} over the grid.

    The integral is taken by the trapezoid rule on a mesh no coarser than
    10^-3 per target time.
    """
    xs = np.sort(np.asarray(samples, float))
    n = len(xs)
    if n == 0:
        raise ValueError("ode_identity_check needs at least one sample")
    worst = 0.0
    for t in grid:
        t = float(t)
        if t < 0.0:
            raise ValueError(f"grid times must be nonnegative, got {t}")
        steps = max(1, math.ceil(t / 1e-3))
        mesh = np.linspace(0.0, t, steps + 1)
        ecdf = np.searchsorted(xs, mesh, side="right") / n
        estimate = float(np.trapezoid(ecdf, mesh))
        reference = t - 1.0 + math.exp(-t)
        worst = max(worst, abs(estimate - reference))
    return worst


@dataclass(frozen=True)
class ExpLawReport:
    """Outcome of the exponential-law verification for one model."""

    model_name: str
    n: int
    seed: int
    alpha: float
    ks_stat: float
    dkw_bound: float
    passed: bool
    ecdf_grid: tuple[tuple[float, float, float], ...]
    max_atom_mass: float
    ode_max_error: float

    def __post_init__(self):
        if self.passed != (self.ks_stat < self.dkw_bound):
            raise ValueError("passed must equal (ks_stat < dkw_bound)")

    def to_json_dict(self) -> dict:
        return {
            "model_name": self.model_name,
            "n": self.n,
            "seed": str(self.seed),
            "alpha": self.alpha,
            "ks_stat": self.ks_stat,
            "dkw_bound": self.dkw_bound,
            "passed": self.passed,
            "max_atom_mass": self.max_atom_mass,
            "ode_max_error": self.ode_max_error,
            "ecdf_grid": [[t, e, r] for t, e, r in self.ecdf_grid],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict(), indent=2)

    def csv_rows(self) -> list[tuple]:
        rows: list[tuple] = [("t", "ecdf", "reference")]
        rows.extend(self.ecdf_grid)
        return rows


def exp_law_verify(
    model: JumpModel, n: int, alpha: float, seed: int, workers: int = 1
) -> ExpLawReport:
    """Sample A(tau) and test it against the unit exponential law."""
    bound = dkw_bound(n, alpha)
    a = sample_a_tau(model, n, seed, workers)
    a_sorted = np.sort(a)

    i = np.arange(1, n + 1)
    F = exp1_cdf(a_sorted)
    ks = float(np.maximum(np.abs(i / n - F), np.abs((i - 1) / n - F)).max())

    levels = (np.arange(1, 51) - 0.5) / 50.0
    ts = -np.log1p(-levels)
    ecdf_at = np.searchsorted(a_sorted, ts, side="right") / n
    refs = exp1_cdf(ts)
    grid = tuple((float(t), float(e), float(r)) for t, e, r in zip(ts, ecdf_at, refs))

    _, counts = np.unique(a_sorted, return_counts=True)
    max_atom = float(counts.max()) / n

    ode_err = ode_identity_check(a_sorted, (0.5, 1.0, 2.0))

    return ExpLawReport(
        model_name=model.name,
        n=n,
        seed=seed,
        alpha=alpha,
        ks_stat=ks,
        dkw_bound=bound,
        passed=bool(ks < bound),
        ecdf_grid=grid,
        max_atom_mass=max_atom,
        ode_max_error=ode_err,
    )


@dataclass(frozen=True)
class MartingaleReport:
    """Zero-mean residual check of 1_{t >= tau} - A(t ^ tau) on a time grid."""

    model_name: str
    n: int
    seed: int
    time_grid: tuple[float, ...]
    residuals: tuple[tuple[float, float, float], ...]
    max_abs_z: float

    def to_json_dict(self) -> dict:
        return {
            "model_name": self.model_name,
            "n": self.n,
            "seed": str(self.seed),
            "time_grid": list(self.time_grid),
            "residuals": [
                {"t": t, "mean": m, "stderr": s} for t, m, s in self.residuals
            ],
            "max_abs_z": self.max_abs_z,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict(), indent=2)

    def csv_rows(self) -> list[tuple]:
        rows: list[tuple] = [("t", "mean", "stderr")]
        rows.extend(self.residuals)
        return rows


def default_time_grid() -> tuple[float, ...]:
    return tuple(float(t) for t in np.linspace(0.1, 5.0, 10))


def martingale_residual(
    model: JumpModel,
    n: int,
    time_grid,
    seed: int,
    workers: int = 1,
) -> MartingaleReport:
    """Mean and standard error of the residual at each grid time.

    One tau draw per replication is reused across all grid times (the
    residuals are functionals of the same path, and resampling per time
    would only add variance).
    """
    if n < 1:
        raise ValueError(f"n must be at least 1, got {n}")
    grid = tuple(float(t) for t in time_grid)
    if any(not math.isfinite(t) or t < 0.0 for t in grid):
        raise ValueError("grid times must be finite and nonnegative")
    zs = _exponential_draws(seed, n, workers)
    taus = _finite_taus(model, zs)

    rows = []
    max_abs_z = 0.0
    for t in grid:
        indicator = (taus <= t).astype(float)
        stopped = np.minimum(taus, t)
        residual = indicator - model.compensator.evaluate_many(stopped)
        mean = float(residual.mean())
        stderr = float(residual.std(ddof=1) / math.sqrt(n)) if n > 1 else 0.0
        if stderr > 0.0:
            z = abs(mean) / stderr
        else:
            z = 0.0 if mean == 0.0 else math.inf
        max_abs_z = max(max_abs_z, z)
        rows.append((t, mean, stderr))

    return MartingaleReport(
        model_name=model.name,
        n=n,
        seed=seed,
        time_grid=grid,
        residuals=tuple(rows),
        max_abs_z=max_abs_z,
    )
