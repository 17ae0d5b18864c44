"""Path statistics: tail index, extremal index, extremogram, diagnostics.

Estimator conventions, used consistently below:
  * an exceedance of a threshold u means value > u, strictly;
  * thresholds are explicit; callers convert quantile levels to u with
    np.quantile (type-7 interpolation);
  * runs_theta treats indices past either end of the series as
    non-exceedances; the extremogram counts only pairs (t, t+h) that lie
    fully inside the observed range;
  * standard errors are binomial for the extremogram and the
    anticlustering diagnostic, and a circular block bootstrap (block =
    declustering length) for the three theta estimators, since serial
    dependence invalidates i.i.d. formulas.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from .models import DEFAULT_BURN_IN, ModelConfig, simulate
from .distributions import InnovationSpec, moment_pos
from .rng import RngSeed, chunked_map

__all__ = [
    "HillResult", "ThetaEstimate", "ExceedanceSet", "ExtremogramResult",
    "AnticlusterResult", "BreimanResult",
    "hill", "blocks_theta", "runs_theta", "intervals_theta",
    "extremogram", "anticluster_diag", "breiman_ratio", "exceedances",
]

_BOOTSTRAP_SEED = 0xB0075


@dataclass(frozen=True)
class HillResult:
    k: int
    alpha_hat: float
    ci_low: float
    ci_high: float

    def __post_init__(self):
        if not (self.alpha_hat > 0 and self.ci_low < self.alpha_hat < self.ci_high):
            raise ValueError("inconsistent Hill result")

    def to_json(self) -> dict:
        return {"k": self.k, "alpha_hat": self.alpha_hat,
                "ci_low": self.ci_low, "ci_high": self.ci_high}


@dataclass(frozen=True)
class ThetaEstimate:
    theta_hat: float
    method: str
    tuning: dict
    stderr: float

    def __post_init__(self):
        if not 0.0 < self.theta_hat <= 1.0:
            raise ValueError("theta_hat must lie in (0, 1]")

    def to_json(self) -> dict:
        return {"method": self.method, "theta_hat": self.theta_hat,
                "stderr": self.stderr, "tuning": dict(self.tuning)}


@dataclass(frozen=True)
class ExceedanceSet:
    u: float
    indices: np.ndarray
    n: int


def exceedances(values, u: float) -> ExceedanceSet:
    v = np.asarray(values)
    idx = np.flatnonzero(v > u)
    return ExceedanceSet(float(u), idx, v.size)


# -- tail index -----------------------------------------------------------

def hill(values, k: int) -> HillResult:
    """Hill estimator from the top k order statistics over the (k+1)-th.

    alpha_hat = k / sum_i log(X_(n-i+1) / X_(n-k)); the 95% band is
    alpha_hat (1 +/- 1.96/sqrt(k)). Only strictly positive values enter;
    pass sigma or |X|.
    """
    if k < 2:
        raise ValueError("k must be >= 2")
    v = np.asarray(values, dtype=float)
    v = v[v > 0]
    if v.size < k + 1:
        raise ValueError("need at least k+1 strictly positive values")
    part = np.partition(v, v.size - k - 1)
    tail = part[v.size - k:]
    pivot = part[v.size - k - 1]
    if np.all(tail == pivot):
        raise ValueError("degenerate tail sample")
    s = float(np.sum(np.log(tail / pivot)))
    alpha_hat = k / s
    half = 1.96 / math.sqrt(k)
    return HillResult(k, alpha_hat, alpha_hat * (1.0 - half),
                      alpha_hat * (1.0 + half))


# -- extremal index estimators --------------------------------------------

def _blocks_core(e: np.ndarray, block_len: int) -> float:
    n = e.size
    n_exc = int(e.sum())
    if n_exc == 0:
        return np.nan
    nb = -(-n // block_len)
    padded = np.zeros(nb * block_len, dtype=bool)
    padded[:n] = e
    k_blocks = int(padded.reshape(nb, block_len).any(axis=1).sum())
    return min(1.0, k_blocks / n_exc)


def _runs_core(e: np.ndarray, run_len: int) -> float:
    idx = np.flatnonzero(e)
    if idx.size == 0:
        return np.nan
    # append run_len non-exceedances so trailing windows read as clear
    ep = np.concatenate([e, np.zeros(run_len, dtype=bool)])
    win = sliding_window_view(ep[1:], run_len)
    clear = ~win[idx].any(axis=1)
    return min(1.0, float(clear.sum()) / idx.size)


def _intervals_core(e: np.ndarray) -> float:
    idx = np.flatnonzero(e)
    n_exc = idx.size
    if n_exc < 2:
        return np.nan
    t = np.diff(idx).astype(float)
    if t.max() <= 2.0:
        num = 2.0 * t.sum() ** 2
        den = (n_exc - 1) * float((t * t).sum())
    else:
        tm1 = t - 1.0
        num = 2.0 * tm1.sum() ** 2
        den = (n_exc - 1) * float((tm1 * (t - 2.0)).sum())
    return min(1.0, num / den)


def _bootstrap_stderr(e: np.ndarray, stat, block_len: int, n_boot: int,
                      threads: int = 1) -> float:
    """Circular block bootstrap over the exceedance indicator series."""
    if n_boot < 2:
        return 0.0
    n = e.size
    block_len = int(min(max(block_len, 1), n))
    nb = -(-n // block_len)
    offsets = np.arange(block_len)

    def one(i: int) -> float:
        g = np.random.Generator(np.random.Philox(
            np.random.SeedSequence(_BOOTSTRAP_SEED, spawn_key=(i,))))
        starts = g.integers(0, n, size=nb)
        idx = (starts[:, None] + offsets[None, :]).ravel()[:n] % n
        return stat(e[idx])

    vals = np.asarray(chunked_map(one, n_boot, threads), dtype=float)
    vals = vals[np.isfinite(vals)]
    if vals.size < 2:
        return 0.0
    return float(np.std(vals, ddof=1))


def blocks_theta(values, u: float, block_len: int, n_boot: int = 100,
                 threads: int = 1) -> ThetaEstimate:
    """theta_hat = (#blocks containing an exceedance) / (#exceedances)."""
    if block_len < 1:
        raise ValueError("block_len must be >= 1")
    e = np.asarray(values) > u
    th = _blocks_core(e, block_len)
    if np.isnan(th):
        raise ValueError("empty exceedance set")
    se = _bootstrap_stderr(e, lambda r: _blocks_core(r, block_len),
                           block_len, n_boot, threads)
    return ThetaEstimate(th, "blocks",
                         {"block_len": block_len, "u": float(u)}, se)


def runs_theta(values, u: float, run_len: int, n_boot: int = 100,
               threads: int = 1) -> ThetaEstimate:
    """Fraction of exceedances followed by run_len clear positions."""
    if run_len < 1:
        raise ValueError("run_len must be >= 1")
    e = np.asarray(values) > u
    th = _runs_core(e, run_len)
    if np.isnan(th):
        raise ValueError("empty exceedance set")
    se = _bootstrap_stderr(e, lambda r: _runs_core(r, run_len),
                           run_len, n_boot, threads)
    return ThetaEstimate(th, "runs",
                         {"run_len": run_len, "u": float(u)}, se)


def intervals_theta(values, u: float, n_boot: int = 100,
                    threads: int = 1) -> ThetaEstimate:
    """Interexceedance-time estimator; tuning-free.

    With gaps T_i between consecutive exceedance times, returns
      min(1, 2 (sum T_i)^2 / ((N-1) sum T_i^2))            if max T <= 2,
      min(1, 2 (sum (T_i-1))^2 / ((N-1) sum (T_i-1)(T_i-2)))  otherwise.
    Depends on the data only through the exceedance times, so it is
    invariant under strictly increasing transformations of the values.
    """
    e = np.asarray(values) > u
    th = _intervals_core(e)
    if np.isnan(th):
        raise ValueError("insufficient exceedances")
    gaps = np.diff(np.flatnonzero(e))
    mean_gap = int(max(1, round(float(np.mean(gaps)))))
    se = _bootstrap_stderr(e, _intervals_core, mean_gap, n_boot, threads)
    return ThetaEstimate(th, "intervals", {"u": float(u)}, se)


# -- extremogram ----------------------------------------------------------

@dataclass(frozen=True)
class ExtremogramResult:
    q: float
    u: float
    lags: np.ndarray
    chi_hat: np.ndarray
    stderr: np.ndarray

    def to_json(self) -> dict:
        return {"q": self.q, "u": self.u, "lags": self.lags.tolist(),
                "chi_hat": self.chi_hat.tolist(),
                "stderr": self.stderr.tolist()}


def extremogram(values, lags, q: float) -> ExtremogramResult:
    """chi_hat(h) = P(X_{t+h} >= u | X_t >= u) at the empirical q-quantile.

    Only pairs (t, t+h) fully inside the range are counted, and the
    conditioning count averages the left and right pair members, which
    makes the estimate exactly invariant under time reversal.
    """
    v = np.asarray(values, dtype=float)
    n = v.size
    lags = np.asarray(sorted(int(h) for h in lags), dtype=int)
    if lags.size == 0:
        raise ValueError("need at least one lag")
    if (lags < 0).any() or (lags >= n / 2).any():
        raise ValueError("each lag must satisfy 0 <= lag < n/2")
    u = float(np.quantile(v, q))
    # >= so that a sample sitting entirely at its own quantile (constant
    # series) reads as perfect persistence rather than as no exceedances
    e = v >= u
    chi = np.empty(lags.size)
    se = np.empty(lags.size)
    for j, h in enumerate(lags):
        left = e[:n - h]
        right = e[h:]
        both = int((left & right).sum())
        cond = int(left.sum()) + int(right.sum())
        if cond == 0:
            raise ValueError("no exceedances")
        chi[j] = 2.0 * both / cond
        se[j] = math.sqrt(max(chi[j] * (1.0 - chi[j]), 0.0) / (cond / 2.0))
    return ExtremogramResult(float(q), u, lags, chi, se)


# -- anticlustering diagnostic --------------------------------------------

@dataclass
class AnticlusterResult:
    """Conditional exceedance frequencies over two-sided windows.

    estimate[i] is the fraction of windows, centered at an exceedance of
    u = y * a_n, in which |X_t| > u for some m[i] <= |t| <= r_n. Windows
    are harvested from fresh simulations and kept at least 2 r_n + 1
    apart, so they count as independent replicates.
    """

    m_grid: tuple
    estimates: np.ndarray
    stderrs: np.ndarray
    n_windows: int
    a_n: float
    u: float
    r_n: int
    y: float
    n: int

    def to_json(self) -> dict:
        return {"m_grid": list(self.m_grid),
                "estimates": self.estimates.tolist(),
                "stderrs": self.stderrs.tolist(),
                "n_windows": self.n_windows, "a_n": self.a_n, "u": self.u,
                "r_n": self.r_n, "y": self.y, "n": self.n}


def anticluster_diag(cfg: ModelConfig, m, r_n: int, y: float, n: int,
                     reps: int, seed: RngSeed,
                     burn_in: int = DEFAULT_BURN_IN,
                     calibration_factor: int = 10) -> AnticlusterResult:
    """Estimate P(max_{m <= |t| <= r_n} |X_t| > y a_n given |X_0| > y a_n).

    a_n is the empirical (1 - 1/n) quantile of |X| from a calibration run
    of length calibration_factor * n. Because exceedances of a_n occur
    about once per n observations, windows are collected from successive
    independent path segments until `reps` are found (or a simulation
    budget of about 4 reps * n draws runs out).
    """
    m_grid = tuple(int(v) for v in np.atleast_1d(m))
    if len(m_grid) == 0:
        raise ValueError("need at least one m")
    if any(not 1 <= v < r_n for v in m_grid):
        raise ValueError("need 1 <= m < r_n")
    if reps < 1 or n < 2:
        raise ValueError("need reps >= 1 and n >= 2")

    cal = simulate(cfg, calibration_factor * n, burn_in, seed.child(0))
    a_n = float(np.quantile(np.abs(cal.x), 1.0 - 1.0 / n))
    u = y * a_n

    width = 2 * r_n + 1
    seg_len = max(width, min(n, 1_000_000))
    max_segments = max(8, 4 * math.ceil(reps * n / seg_len))

    rows = []
    for s in range(max_segments):
        if len(rows) >= reps:
            break
        seg = simulate(cfg, seg_len, burn_in, seed.child(1, s))
        ax = np.abs(seg.x)
        exc = np.flatnonzero(ax > u)
        exc = exc[(exc >= r_n) & (exc < seg_len - r_n)]
        last = -width
        for t in exc:
            if len(rows) >= reps:
                break
            if t - last >= width:
                rows.append(ax[t - r_n: t + r_n + 1] > u)
                last = t
    if not rows:
        raise ValueError("threshold too high")
    if len(rows) < reps:
        warnings.warn(f"found only {len(rows)} of {reps} windows "
                      "within the simulation budget")

    w = np.vstack(rows)
    n_windows = w.shape[0]
    est = np.empty(len(m_grid))
    se = np.empty(len(m_grid))
    for i, mv in enumerate(m_grid):
        hit = w[:, r_n + mv:].any(axis=1) | w[:, :r_n - mv + 1].any(axis=1)
        est[i] = float(hit.mean())
        se[i] = math.sqrt(max(est[i] * (1.0 - est[i]), 0.0) / n_windows)
    return AnticlusterResult(m_grid, est, se, n_windows, a_n, u,
                             int(r_n), float(y), int(n))


# -- Breiman ratio --------------------------------------------------------

@dataclass
class BreimanResult:
    levels: np.ndarray
    thresholds: np.ndarray
    ratios: np.ndarray
    target: float | None

    def to_json(self) -> dict:
        return {"levels": self.levels.tolist(),
                "thresholds": self.thresholds.tolist(),
                "ratios": self.ratios.tolist(), "target": self.target}


def breiman_ratio(sigma_values, x_values, q_grid, alpha: float,
                  z: InnovationSpec | None = None) -> BreimanResult:
    """Empirical P(X > x)/P(sigma > x) at sigma-quantile levels.

    The ratio should approach EZ_+^alpha at high thresholds; the target
    is computed from the noise spec when one is given. Grid points with
    an empty numerator or denominator are dropped with a warning.
    """
    sig = np.asarray(sigma_values, dtype=float)
    x = np.asarray(x_values, dtype=float)
    if sig.size != x.size:
        raise ValueError("sigma and x series must have equal length")
    target = moment_pos(z, float(alpha)) if z is not None else None
    levels, thresholds, ratios = [], [], []
    for q in q_grid:
        xq = float(np.quantile(sig, q))
        den = float(np.mean(sig > xq))
        num = float(np.mean(x > xq))
        if den == 0.0 or num == 0.0:
            warnings.warn(f"no exceedances at level {q}; grid point dropped")
            continue
        levels.append(float(q))
        thresholds.append(xq)
        ratios.append(num / den)
    return BreimanResult(np.asarray(levels), np.asarray(thresholds),
                         np.asarray(ratios), target)
