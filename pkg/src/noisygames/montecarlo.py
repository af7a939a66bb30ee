"""Seeded Monte Carlo validation of the closed-form consistency probabilities.

Sampling uses a counter-based generator (Philox) keyed directly by the user
seed, so estimates are reproducible bit-for-bit and sweep rows can derive
independent streams (row seed = seed XOR row index) without coordination.

The estimator samples the eight utility gains of the two views directly:
within one view the four gains touch pairwise-disjoint payoff entries, so
they are independent Gaussians and equal in distribution to the gains of an
entrywise-perturbed game.  Every consistency event evaluated here depends on
the views only through those gains.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Literal, Sequence

import numpy as np

from .games import Bimatrix2x2, NEKind, classify_player, min_vertex_welfare, optimal_welfare
from .misinfo import (
    MisinformationGame,
    NoiseSpec,
    WELFARE_TOL,
    epsilon_window,
    infinite_nash_window,
)
from .probability import (
    DEFAULT_QUAD,
    QuadratureConfig,
    RatioMode,
    consistency_probabilities,
)

_OP1, _OP2, _OM, _PM = 0, 1, 2, 3


@dataclass(frozen=True)
class McConfig:
    reps: int = 3000
    seed: int = 0
    resample_degenerate: bool = True
    degeneracy_tol: float = 1e-12

    def __post_init__(self) -> None:
        if self.reps < 1:
            raise ValueError("reps must be >= 1")
        if self.degeneracy_tol < 0.0:
            raise ValueError("degeneracy_tol must be >= 0")


class DegenerateSampleError(RuntimeError):
    """A sampled view game was numerically degenerate and resampling is off."""


@dataclass(frozen=True)
class McEstimate:
    freq_mis: float
    freq_inv: float
    freq_best: float
    freq_worst: float
    se_mis: float
    se_inv: float
    se_best: float
    se_worst: float
    degenerate_resamples: int
    reps: int


def _rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(key=seed & (2**64 - 1)))


def sample_noisy_game(
    actual: Bimatrix2x2, spec: NoiseSpec, rng: np.random.Generator
) -> MisinformationGame:
    """One noisy game: both views perturb the actual payoffs entrywise with
    independent Gaussian draws (view r first, row payoffs before column)."""
    views = []
    for _ in ("r", "c"):
        perturbed = []
        for payoffs, mean, std in (
            (actual.payoff_r, spec.mean_r, spec.std_r),
            (actual.payoff_c, spec.mean_c, spec.std_c),
        ):
            delta = rng.normal(np.asarray(mean, float), np.asarray(std, float))
            perturbed.append(tuple(map(tuple, np.asarray(payoffs, float) + delta)))
        views.append(Bimatrix2x2(perturbed[0], perturbed[1]))
    return MisinformationGame(actual, views[0], views[1])


def _gain_params(actual: Bimatrix2x2, spec: NoiseSpec) -> tuple[np.ndarray, np.ndarray]:
    """Mean and sd of the gain vector (r1, r2, c1, c2) of one view."""
    pr = np.asarray(actual.payoff_r, float) + np.asarray(spec.mean_r, float)
    pc = np.asarray(actual.payoff_c, float) + np.asarray(spec.mean_c, float)
    dr = np.asarray(spec.std_r, float)
    dc = np.asarray(spec.std_c, float)
    mu = np.array(
        [
            pr[0, 0] - pr[1, 0],
            pr[0, 1] - pr[1, 1],
            pc[0, 0] - pc[0, 1],
            pc[1, 0] - pc[1, 1],
        ]
    )
    sd = np.array(
        [
            math.hypot(dr[0, 0], dr[1, 0]),
            math.hypot(dr[0, 1], dr[1, 1]),
            math.hypot(dc[0, 0], dc[0, 1]),
            math.hypot(dc[1, 0], dc[1, 1]),
        ]
    )
    return mu, sd


def _classify_arrays(own1, own2, opp1, opp2):
    """Vectorized class codes and mixed probabilities from gain sign patterns."""
    o1, o2 = own1 > 0.0, own2 > 0.0
    b1, b2 = opp1 > 0.0, opp2 > 0.0
    code = np.full(own1.shape, -1, dtype=np.int8)
    code[(o1 & o2) | (o1 & ~o2 & b1 & b2) | (~o1 & o2 & ~b1 & ~b2)] = _OP1
    code[(~o1 & ~o2) | (~o1 & o2 & b1 & b2) | (o1 & ~o2 & ~b1 & ~b2)] = _OP2
    code[(o1 & ~o2 & ~b1 & b2) | (~o1 & o2 & b1 & ~b2)] = _OM
    code[(o1 & ~o2 & b1 & ~b2) | (~o1 & o2 & ~b1 & b2)] = _PM
    mixed = code >= _OM  # opposite-sign opponent gains, denominator nonzero
    denom = np.where(mixed, opp2 - opp1, 1.0)
    p = np.where(mixed, opp2 / denom, np.nan)
    return code, p


def _player_events(code, p, actual_cls, epsilon):
    """Forward and coverage event indicators for one player, vectorized."""
    if actual_cls.kind is NEKind.ONLY_PURE:
        target = _OP1 if actual_cls.index == 1 else _OP2
        mis = code == target
        inv = mis | (code == _PM)
        return mis, inv
    if actual_cls.kind is NEKind.INFINITE_NASH:
        w1, w2 = infinite_nash_window(epsilon)
        mis = np.ones(code.shape, dtype=bool)
        inv = (code == _PM) & (p > w1) & (p < w2)
        return mis, inv
    w1, w2 = epsilon_window(actual_cls.p, epsilon)
    in_window = (p > w1) & (p < w2)
    if actual_cls.kind is NEKind.ONLY_MIXED:
        mis = (code == _OM) & in_window
        inv = ((code == _OM) | (code == _PM)) & in_window
        return mis, inv
    mis = (code == _OP1) | (code == _OP2) | (((code == _OM) | (code == _PM)) & in_window)
    inv = (code == _PM) & in_window
    return mis, inv


def _strategy_candidates(code, p):
    """Up to three equilibrium mixing probabilities per sample, padded by
    repetition so max/min over the axis are unaffected."""
    base = np.where(code == _OP1, 1.0, np.where(code == _OP2, 0.0, p))
    cand = np.repeat(base[:, None], 3, axis=1)
    pm = code == _PM
    cand[pm, 0] = 1.0
    cand[pm, 1] = 0.0
    return cand


def _binomial_se(freq: float, n: int) -> float:
    return math.sqrt(freq * (1.0 - freq) / n)


def _sample_gains(
    mu: np.ndarray, sd: np.ndarray, rng: np.random.Generator, n: int
) -> np.ndarray:
    """Gains of ``n`` sampled view pairs: view r's four gains then view c's."""
    z = rng.standard_normal((n, 8))
    full_mu = np.concatenate([mu, mu])
    full_sd = np.concatenate([sd, sd])
    return full_mu + full_sd * z


def estimate(
    actual: Bimatrix2x2, spec: NoiseSpec, epsilon: float, cfg: McConfig = McConfig()
) -> McEstimate:
    """Empirical frequencies of the consistency events and of best/worst
    natural misinformed equilibria over seeded noisy-game samples."""
    if epsilon < 0.0:
        raise ValueError("tolerance must be >= 0")
    actual_r = classify_player(actual, "r")
    actual_c = classify_player(actual, "c")

    mu, sd = _gain_params(actual, spec)
    rng = _rng(cfg.seed)
    gains = _sample_gains(mu, sd, rng, cfg.reps)

    resamples = 0
    bad = (np.abs(gains) < cfg.degeneracy_tol).any(axis=1)
    while bad.any():
        if not cfg.resample_degenerate:
            raise DegenerateSampleError(
                "sampled view game is numerically degenerate (|gain| below "
                f"{cfg.degeneracy_tol}); enable resample_degenerate to retry"
            )
        n_bad = int(bad.sum())
        resamples += n_bad
        gains[bad] = _sample_gains(mu, sd, rng, n_bad)
        bad = (np.abs(gains) < cfg.degeneracy_tol).any(axis=1)

    # View r occupies columns 0..3 (gains r1, r2, c1, c2), view c columns 4..7.
    code_r, p_r = _classify_arrays(gains[:, 0], gains[:, 1], gains[:, 2], gains[:, 3])
    code_c, p_c = _classify_arrays(gains[:, 6], gains[:, 7], gains[:, 4], gains[:, 5])

    mis_r, inv_r = _player_events(code_r, p_r, actual_r, epsilon)
    mis_c, inv_c = _player_events(code_c, p_c, actual_c, epsilon)
    mis = mis_r & mis_c
    inv = inv_r & inv_c

    s = np.asarray(actual.payoff_r, float) + np.asarray(actual.payoff_c, float)
    _, sw_opt = optimal_welfare(actual)
    sw_low = min_vertex_welfare(actual)
    pr = _strategy_candidates(code_r, p_r)[:, :, None]  # (reps, 3, 1)
    qc = _strategy_candidates(code_c, p_c)[:, None, :]  # (reps, 1, 3)
    sw = (
        pr * qc * s[0, 0]
        + pr * (1.0 - qc) * s[0, 1]
        + (1.0 - pr) * qc * s[1, 0]
        + (1.0 - pr) * (1.0 - qc) * s[1, 1]
    )
    best = sw.max(axis=(1, 2)) >= sw_opt - WELFARE_TOL
    worst = sw.min(axis=(1, 2)) <= sw_low + WELFARE_TOL

    n = cfg.reps
    freqs = [float(v.mean()) for v in (mis, inv, best, worst)]
    return McEstimate(
        freq_mis=freqs[0],
        freq_inv=freqs[1],
        freq_best=freqs[2],
        freq_worst=freqs[3],
        se_mis=_binomial_se(freqs[0], n),
        se_inv=_binomial_se(freqs[1], n),
        se_best=_binomial_se(freqs[2], n),
        se_worst=_binomial_se(freqs[3], n),
        degenerate_resamples=resamples,
        reps=n,
    )


@dataclass(frozen=True)
class SweepRow:
    d: float
    p_mis_theory: float | None
    p_inv_theory: float | None
    freq_mis: float | None
    freq_inv: float | None
    se_mis: float | None
    se_inv: float | None
    freq_best: float | None
    freq_worst: float | None
    degenerate_resamples: int | None


SWEEP_COLUMNS = (
    "d",
    "p_mis_theory",
    "p_inv_theory",
    "freq_mis",
    "freq_inv",
    "se_mis",
    "se_inv",
    "freq_best",
    "freq_worst",
    "degenerate_resamples",
)


def sweep(
    actual: Bimatrix2x2,
    shape: NoiseSpec,
    epsilon: float,
    d_values: Sequence[float],
    cfg: McConfig = McConfig(),
    mode: Literal["theory", "mc", "both"] = "both",
    ratio_mode: RatioMode = "corrected",
    quad: QuadratureConfig = DEFAULT_QUAD,
) -> list[SweepRow]:
    """Closed-form and/or Monte Carlo consistency values over a noise-scale
    grid.  Row ``i`` uses the derived seed ``cfg.seed ^ i`` so rows are
    reproducible independently of evaluation order."""
    if mode not in ("theory", "mc", "both"):
        raise ValueError("mode must be 'theory', 'mc', or 'both'")
    if any(d <= 0.0 for d in d_values):
        raise ValueError("noise scales must be positive")
    rows = []
    for i, d in enumerate(d_values):
        spec_d = shape.with_noise_scale(float(d))
        theory_mis = theory_inv = None
        if mode in ("theory", "both"):
            report = consistency_probabilities(actual, spec_d, epsilon, quad, ratio_mode)
            theory_mis, theory_inv = report.p_mis, report.p_inv
        est = None
        if mode in ("mc", "both"):
            row_cfg = McConfig(
                reps=cfg.reps,
                seed=cfg.seed ^ i,
                resample_degenerate=cfg.resample_degenerate,
                degeneracy_tol=cfg.degeneracy_tol,
            )
            est = estimate(actual, spec_d, epsilon, row_cfg)
        rows.append(
            SweepRow(
                d=float(d),
                p_mis_theory=theory_mis,
                p_inv_theory=theory_inv,
                freq_mis=est.freq_mis if est else None,
                freq_inv=est.freq_inv if est else None,
                se_mis=est.se_mis if est else None,
                se_inv=est.se_inv if est else None,
                freq_best=est.freq_best if est else None,
                freq_worst=est.freq_worst if est else None,
                degenerate_resamples=est.degenerate_resamples if est else None,
            )
        )
    return rows
