"""Theoretical tail and extremal-index quantities, evaluated numerically.

Four quantities, all tied to the stochastic recurrence / moving average
structure of the volatility:

  * kesten_index: the root kappa of E A^kappa = 1, the power-law index of
    the stationary solution of sigma_t^p = A_t sigma_{t-1}^p + B_t.
  * theta_sigma_sre: the volatility extremal index
        theta_sigma = alpha Int_1^inf P(sup_{t>=1} prod_{j<=t} A_j <= 1/y)
                      y^{-alpha-1} dy,
    evaluated as an expectation under a Pareto(alpha) change of variables,
    with an independent quadrature route kept as a cross-check.
  * theta_x_sre: the m-truncated extremal index of |X| for SRE volatility,
        E(|Z_1|^{alpha p} - max_{j=2..m} (|Z_j|^p prod_{i=2..j} A_i)^alpha)_+
        / E|Z|^{alpha p},
    reported as the whole sequence over m' = 1..m so convergence is visible.
  * theta_x_ma: the extremal index of |X| for finite moving average
    volatility, E max_j |Z_j|^{alpha p} |psi_j|^alpha /
    (E|Z|^{alpha p} sum_j |psi_j|^alpha), exact for constant Z.

Conventions: alpha always denotes the index of sigma^p (the Kesten root),
so sigma and X are regularly varying with index alpha * p. Monte Carlo
work is split into fixed chunks with one substream per chunk and reduced
in chunk order, making results independent of the thread count.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Callable, Optional, Union

import numpy as np

from .distributions import InnovationSpec, draw, moment_abs
from .models import Garch11Pair
from .rng import RngSeed, chunk_sizes, chunked_map

__all__ = [
    "KestenProblem", "KestenRoot", "ThetaTheoryResult",
    "kesten_index", "theta_sigma_sre", "theta_sigma_sre_quadrature",
    "theta_x_sre", "theta_x_ma",
]

# calibration stream for construction-time checks; stream 1 so it cannot
# collide with the model module's probe (stream 0 on the same master)
_CALIBRATION_SEED = RngSeed(0x5EED_CA1B, 1)
_CALIBRATION_DRAWS = 100_000
_LOG_FLOOR = -30.0
_CHUNK = 65_536

ASampler = Union[Garch11Pair, InnovationSpec, Callable]


@dataclass(frozen=True)
class KestenProblem:
    """A non-negative multiplier law A together with a root bracket.

    a_sampler is a Garch11Pair (A = alpha1 eta^2 + beta1), a non-negative
    InnovationSpec, or a callable (generator, size) -> array. Construction
    runs a fixed calibration sample and rejects laws with E log A >= 0
    ("no stationary solution"). Whether P(A > 1) > 0, which a finite
    Kesten index additionally needs, is checked by kesten_index itself so
    that degenerate laws (A == 0) can still be used for the theta
    formulas, where they are meaningful.
    """

    a_sampler: ASampler
    kappa_min: float = 1e-3
    kappa_max: float = 64.0

    def __post_init__(self):
        if not 0 < self.kappa_min < self.kappa_max:
            raise ValueError("need 0 < kappa_min < kappa_max")
        if isinstance(self.a_sampler, InnovationSpec):
            spec = self.a_sampler
            ok = spec.kind == "pareto" or (spec.kind == "constant" and spec.c >= 0)
            if not ok:
                raise ValueError("a_sampler spec must be non-negative "
                                 "(pareto or constant >= 0)")
        a = self.draw_a(_CALIBRATION_SEED.generator(), _CALIBRATION_DRAWS)
        if a.min() < 0:
            raise ValueError("a_sampler produced negative values")
        with np.errstate(divide="ignore"):
            la = np.log(a)
        m = float(np.mean(la))
        if not np.isneginf(m):
            se = float(np.std(la, ddof=1) / math.sqrt(la.size))
            if not m + 3.0 * se < 0.0:
                raise ValueError("no stationary solution")

    def draw_a(self, g: np.random.Generator, size: int) -> np.ndarray:
        if isinstance(self.a_sampler, Garch11Pair):
            return self.a_sampler.draw_a(g, size)
        if isinstance(self.a_sampler, InnovationSpec):
            return draw(self.a_sampler, g, size)
        return np.asarray(self.a_sampler(g, size), dtype=float)


@dataclass(frozen=True)
class KestenRoot:
    """Root of the empirical moment equation, with its precision."""

    kappa: float
    f_stderr: float
    mc_reps: int
    bracket: tuple

    def to_json(self) -> dict:
        return {"kappa": self.kappa, "f_stderr": self.f_stderr,
                "mc_reps": self.mc_reps, "bracket": list(self.bracket)}


@dataclass(frozen=True)
class ThetaTheoryResult:
    value: float
    mc_stderr: float
    truncation: dict
    mc_reps: int
    sequence: Optional[np.ndarray] = None

    def __post_init__(self):
        if not 0.0 < self.value <= 1.0:
            raise ValueError("theta must lie in (0, 1]")

    def to_json(self) -> dict:
        out = {"value": self.value, "mc_stderr": self.mc_stderr,
               "truncation": dict(self.truncation), "mc_reps": self.mc_reps}
        if self.sequence is not None:
            out["sequence"] = np.asarray(self.sequence).tolist()
        return out


def _log_a_sample(problem: KestenProblem, g: np.random.Generator,
                  size: int) -> np.ndarray:
    a = problem.draw_a(g, size)
    with np.errstate(divide="ignore"):
        return np.log(a)


def kesten_index(problem: KestenProblem, mc_reps: int = 1_000_000,
                 tol: float = 1e-4, seed: RngSeed = RngSeed(0)) -> KestenRoot:
    """Solve mean(A_i^kappa) = 1 over one common-random-numbers sample.

    The sample is drawn once and sorted, so the root depends only on the
    multiset of draws; bisection runs until |mean(A^kappa) - 1| < tol.
    """
    if mc_reps < 2:
        raise ValueError("mc_reps must be >= 2")
    la = np.sort(_log_a_sample(problem, seed.generator(), mc_reps))
    if not la[-1] > 0.0:  # no draw above 1: E A^kappa < 1 for every kappa
        raise ValueError("no finite tail index in bracket")

    def f(kappa: float) -> float:
        with np.errstate(over="ignore"):
            return float(np.mean(np.exp(kappa * la))) - 1.0

    lo, hi = problem.kappa_min, problem.kappa_max
    f_lo, f_hi = f(lo), f(hi)
    if f_lo > 0.0 or not np.isfinite(f_lo):
        raise ValueError("no finite tail index in bracket")
    if f_hi < 0.0:
        raise ValueError("no finite tail index in bracket")
    kappa, fk = lo, f_lo
    for _ in range(200):
        kappa = 0.5 * (lo + hi)
        fk = f(kappa)
        if abs(fk) < tol:
            break
        if fk > 0.0:
            hi = kappa
        else:
            lo = kappa
    with np.errstate(over="ignore"):
        pow_a = np.exp(kappa * la)
    se = float(np.std(pow_a, ddof=1) / math.sqrt(mc_reps))
    return KestenRoot(float(kappa), se, mc_reps,
                      (problem.kappa_min, problem.kappa_max))


def _check_alpha(problem: KestenProblem, alpha: float) -> None:
    """alpha must solve E A^alpha = 1 on the calibration sample.

    Skipped for the degenerate A == 0 law, where no such alpha exists but
    the theta formulas still make sense (every product vanishes).
    """
    a = problem.draw_a(_CALIBRATION_SEED.generator(), _CALIBRATION_DRAWS)
    if float(a.max()) == 0.0:
        return
    pw = a ** alpha
    m = float(np.mean(pw))
    se = float(np.std(pw, ddof=1) / math.sqrt(pw.size))
    if abs(m - 1.0) > 5.0 * max(se, 1e-12):
        raise ValueError("alpha inconsistent with multiplier law")


def _sup_log_products(problem: KestenProblem, g: np.random.Generator,
                      size: int, trunc_T: int):
    """Running sup of log prod_{j<=t} A_j per replicate, with early stop.

    Once the log product falls below _LOG_FLOOR a later climb back above
    the recorded sup is negligible at reported precision, so the replicate
    stops. Returns (sup_log, hit_horizon) where hit_horizon flags
    replicates still unresolved at trunc_T. Live replicates are kept in
    compacted arrays so the per-step cost tracks the survivor count.
    """
    sup_out = np.empty(size)
    hit = np.zeros(size, dtype=bool)
    idx = np.arange(size)
    logprod = np.zeros(size)
    sup = np.full(size, -np.inf)
    for _ in range(trunc_T):
        if idx.size == 0:
            return sup_out, hit
        logprod = logprod + _log_a_sample(problem, g, idx.size)
        np.maximum(sup, logprod, out=sup)
        dead = logprod < _LOG_FLOOR
        if dead.any():
            sup_out[idx[dead]] = sup[dead]
            keep = ~dead
            idx, logprod, sup = idx[keep], logprod[keep], sup[keep]
    sup_out[idx] = sup
    hit[idx] = True
    return sup_out, hit


def theta_sigma_sre(problem: KestenProblem, alpha: float,
                    mc_reps: int = 200_000, trunc_T: int = 10_000,
                    seed: RngSeed = RngSeed(0),
                    threads: int = 1) -> ThetaTheoryResult:
    """Extremal index of the SRE volatility sequence.

    Uses theta_sigma = E 1{sup_{t>=1} prod_{j<=t} A_j <= 1/Y} with
    Y ~ Pareto(alpha), which is the integral above after the change of
    variables. Reports the binomial standard error and the fraction of
    replicates that reached trunc_T without resolving (truncation risk).
    """
    if trunc_T < 1:
        raise ValueError("trunc_T must be >= 1")
    _check_alpha(problem, alpha)
    sizes = chunk_sizes(mc_reps, _CHUNK)

    def one(i: int):
        g = seed.generator(i)
        size = sizes[i]
        u = 1.0 - g.random(size)          # (0, 1]
        b = np.log(u) / alpha             # -log Y <= 0
        logprod = np.zeros(size)
        succ = 0
        for _ in range(trunc_T):
            if b.size == 0:
                break
            logprod = logprod + _log_a_sample(problem, g, b.size)
            failed = logprod > b
            done_ok = ~failed & (logprod < _LOG_FLOOR)
            succ += int(done_ok.sum())
            keep = ~(failed | done_ok)
            logprod, b = logprod[keep], b[keep]
        # unresolved at the horizon: the sup has not exceeded b yet, so
        # count as success and report the fraction as truncation risk
        risk = b.size
        return succ + risk, risk

    parts = chunked_map(one, len(sizes), threads)
    succ = sum(p[0] for p in parts)
    risk = sum(p[1] for p in parts)
    value = succ / mc_reps
    se = math.sqrt(max(value * (1.0 - value), 0.0) / mc_reps)
    risk_frac = risk / mc_reps
    if risk_frac > 0.01:
        warnings.warn(f"truncation risk {risk_frac:.3f} exceeds 1%; "
                      "increase trunc_T")
    return ThetaTheoryResult(value, se,
                             {"trunc_T": trunc_T, "risk_fraction": risk_frac},
                             mc_reps)


def theta_sigma_sre_quadrature(problem: KestenProblem, alpha: float,
                               mc_reps: int = 200_000, trunc_T: int = 10_000,
                               seed: RngSeed = RngSeed(0),
                               grid_points: int = 10_000) -> ThetaTheoryResult:
    """Cross-check route: direct integration over y on a log grid.

    Samples the sup of products once, forms its empirical distribution
    function G, and evaluates alpha Int_1^ymax G(1/y) y^{-alpha-1} dy by
    the trapezoid rule on a log-spaced grid. Independent of the change-of-
    variables estimator in everything but the sup law itself.
    """
    g = seed.generator()
    sup, hit = _sup_log_products(problem, g, mc_reps, trunc_T)
    sup_sorted = np.sort(sup)
    y_max = max(10.0, 1e14 ** (1.0 / alpha))
    y = np.exp(np.linspace(0.0, math.log(y_max), grid_points))
    # G(1/y) = P(sup_log <= -log y)
    cdf = np.searchsorted(sup_sorted, -np.log(y), side="right") / mc_reps
    integrand = alpha * cdf * y ** (-alpha - 1.0)
    value = float(np.trapezoid(integrand, y))
    se = 1.0 / math.sqrt(mc_reps)  # dominated by the sup-sample noise
    risk_frac = float(np.mean(hit))
    return ThetaTheoryResult(min(value, 1.0), se,
                             {"trunc_T": trunc_T, "risk_fraction": risk_frac,
                              "grid_points": grid_points},
                             mc_reps)


def _check_z_moment(z: InnovationSpec, r: float) -> None:
    mz = moment_abs(z, r)  # raises "moment diverges" when infinite
    if mz == 0.0:
        raise ValueError("degenerate z with E|Z|^r = 0")


def theta_x_sre(problem: KestenProblem, z: InnovationSpec, alpha: float,
                p: float, m: int, mc_reps: int = 1_000_000,
                seed: RngSeed = RngSeed(0),
                threads: int = 1) -> ThetaTheoryResult:
    """m-truncated extremal index of |X| = sigma |Z| for SRE volatility.

    Self-normalized ratio estimator: numerator and denominator share the
    |Z_1| draws, so m = 1 returns exactly 1 (the empty max is zero) and
    the sequence over m' is non-increasing replicate by replicate.
    """
    if m < 1:
        raise ValueError("m must be >= 1")
    ap = alpha * p
    _check_z_moment(z, ap)
    _check_alpha(problem, alpha)
    sizes = chunk_sizes(mc_reps, _CHUNK)

    def one(i: int):
        g = seed.generator(i)
        size = sizes[i]
        t1 = np.abs(draw(z, g, size)) ** ap
        best = np.zeros(size)
        logprod = np.zeros(size)
        num = np.empty(m)
        num[0] = float(t1.sum())
        for j in range(1, m):
            zj = np.abs(draw(z, g, size)) ** p
            logprod = logprod + _log_a_sample(problem, g, size)
            with np.errstate(over="ignore", under="ignore"):
                cand = zj ** alpha * np.exp(alpha * logprod)
            np.maximum(best, cand, out=best)
            num[j] = float(np.clip(t1 - best, 0.0, None).sum())
        n_fin = np.clip(t1 - best, 0.0, None)
        return (num, float(t1.sum()), float((n_fin * n_fin).sum()),
                float((t1 * t1).sum()), float((n_fin * t1).sum()))

    parts = chunked_map(one, len(sizes), threads)
    num = np.zeros(m)
    sd = ssn = ssd = snd = 0.0
    for pnum, psd, pssn, pssd, psnd in parts:
        num += pnum
        sd += psd
        ssn += pssn
        ssd += pssd
        snd += psnd
    seq = num / sd
    value = float(seq[-1])
    nbar = num[-1] / mc_reps
    dbar = sd / mc_reps
    var_n = ssn / mc_reps - nbar * nbar
    var_d = ssd / mc_reps - dbar * dbar
    cov = snd / mc_reps - nbar * dbar
    var_ratio = max(var_n + value * value * var_d - 2.0 * value * cov, 0.0)
    se = math.sqrt(var_ratio / mc_reps) / dbar
    return ThetaTheoryResult(value, se, {"m": m}, mc_reps, sequence=seq)


def theta_x_ma(psi, alpha: float, p: float, z: InnovationSpec,
               mc_reps: int = 200_000, seed: RngSeed = RngSeed(0),
               threads: int = 1) -> ThetaTheoryResult:
    """Extremal index of |X| for moving-average volatility.

    theta = E max_j |Z_j|^{alpha p} |psi_j|^alpha
            / (E|Z|^{alpha p} sum_j |psi_j|^alpha).
    For constant Z the Z factors cancel and the closed form
    max_j |psi_j|^alpha / sum_j |psi_j|^alpha is returned exactly.
    Coefficients are normalized by max |psi_j| first, so scaling every
    psi_j by a common factor cannot move the result.
    """
    w = np.abs(np.asarray(psi, dtype=float))
    if w.size == 0 or not np.any(w > 0):
        raise ValueError("psi needs at least one nonzero coefficient")
    ap = alpha * p
    r = (w / w.max()) ** alpha
    rsum = float(r.sum())
    if z.kind == "constant":
        if z.c == 0:
            raise ValueError("degenerate z with E|Z|^r = 0")
        return ThetaTheoryResult(1.0 / rsum, 0.0, {}, 0)
    _check_z_moment(z, ap)
    q1 = w.size
    sizes = chunk_sizes(mc_reps, max(_CHUNK // q1, 1))

    def one(i: int):
        g = seed.generator(i)
        size = sizes[i]
        t = np.abs(draw(z, g, size * q1)).reshape(size, q1) ** ap
        n_i = (t * r).max(axis=1)
        d_i = t.mean(axis=1) * rsum
        return (float(n_i.sum()), float(d_i.sum()), float((n_i * n_i).sum()),
                float((d_i * d_i).sum()), float((n_i * d_i).sum()))

    parts = chunked_map(one, len(sizes), threads)
    sn = sd = ssn = ssd = snd = 0.0
    for a_, b_, c_, d_, e_ in parts:
        sn += a_
        sd += b_
        ssn += c_
        ssd += d_
        snd += e_
    value = sn / sd
    nbar, dbar = sn / mc_reps, sd / mc_reps
    var_n = ssn / mc_reps - nbar * nbar
    var_d = ssd / mc_reps - dbar * dbar
    cov = snd / mc_reps - nbar * dbar
    var_ratio = max(var_n + value * value * var_d - 2.0 * value * cov, 0.0)
    se = math.sqrt(var_ratio / mc_reps) / dbar
    return ThetaTheoryResult(float(value), se, {}, mc_reps)
