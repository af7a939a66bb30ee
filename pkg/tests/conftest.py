"""Shared fixtures and independent oracles used across the suite."""

from __future__ import annotations

import math

import numpy as np
import pytest

from noisygames import Bimatrix2x2, Strategy, StrategyProfile, payoff
from noisygames.games import BUILTIN_GAMES


@pytest.fixture(scope="session")
def pd():
    return BUILTIN_GAMES["pd"]


@pytest.fixture(scope="session")
def mp():
    return BUILTIN_GAMES["mp"]


@pytest.fixture(scope="session")
def bos():
    return BUILTIN_GAMES["bos"]


@pytest.fixture(scope="session")
def ww():
    return BUILTIN_GAMES["ww"]


@pytest.fixture(scope="session")
def reference_game():
    """Coordination game used throughout the worked example."""
    return Bimatrix2x2(((3, 0), (0, 2)), ((2, 0), (0, 3)))


@pytest.fixture(scope="session")
def zero_game():
    return Bimatrix2x2(((0, 0), (0, 0)), ((0, 0), (0, 0)))


def best_response_residual(game: Bimatrix2x2, profile: StrategyProfile) -> float:
    """How much either player could gain by deviating (0 at a Nash profile)."""
    best_r = max(
        payoff(game, "r", StrategyProfile(Strategy(p), profile.col)) for p in (0.0, 1.0)
    )
    best_c = max(
        payoff(game, "c", StrategyProfile(profile.row, Strategy(q))) for q in (0.0, 1.0)
    )
    return max(
        best_r - payoff(game, "r", profile),
        best_c - payoff(game, "c", profile),
    )


def grid_nash_profiles(game: Bimatrix2x2, n: int = 100, tol: float = 1e-9):
    """All grid profiles passing the best-response check (brute-force oracle)."""
    t = np.arange(n + 1) / n
    pr = np.asarray(game.payoff_r, dtype=float)
    pc = np.asarray(game.payoff_c, dtype=float)
    pv = np.stack([t, 1.0 - t], axis=1)  # (n+1, 2)
    u_r = pv @ pr @ pv.T  # u_r[i, j] = r's payoff at (t_i, t_j)
    u_c = pv @ pc @ pv.T
    best_r = np.maximum(u_r[0, :], u_r[n, :])[None, :]  # over r's pure deviations
    best_c = np.maximum(u_c[:, 0], u_c[:, n])[:, None]
    residual = np.maximum(best_r - u_r, best_c - u_c)
    hits = []
    for i, j in zip(*np.nonzero(residual <= tol)):
        hits.append(StrategyProfile(Strategy(float(t[i])), Strategy(float(t[j]))))
    return hits


def random_nondegenerate_games(
    count: int, seed: int, low: int = -5, high: int = 5
) -> list[Bimatrix2x2]:
    """Random integer-payoff games with all four utility gains nonzero."""
    rng = np.random.default_rng(seed)
    games = []
    while len(games) < count:
        a = rng.integers(low, high + 1, size=(2, 2, 2))
        g = Bimatrix2x2(tuple(map(tuple, a[0])), tuple(map(tuple, a[1])))
        gains = [
            g.payoff_r[0][0] - g.payoff_r[1][0],
            g.payoff_r[0][1] - g.payoff_r[1][1],
            g.payoff_c[0][0] - g.payoff_c[0][1],
            g.payoff_c[1][0] - g.payoff_c[1][1],
        ]
        if all(v != 0 for v in gains):
            games.append(g)
    return games


def mc_ratio_band(
    mu_x: float,
    sd_x: float,
    mu_y: float,
    sd_y: float,
    omega1: float,
    omega2: float,
    y_sign: str,
    n: int,
    seed: int,
) -> tuple[float, float]:
    """Monte Carlo estimate (and binomial SE) of the ratio-band event."""
    rng = np.random.Generator(np.random.Philox(key=seed))
    hits = 0
    chunk = 2_000_000
    remaining = n
    while remaining > 0:
        m = min(chunk, remaining)
        xs = rng.normal(mu_x, sd_x, m) if sd_x > 0 else np.full(m, mu_x)
        ys = rng.normal(mu_y, sd_y, m) if sd_y > 0 else np.full(m, mu_y)
        if y_sign == "positive":
            sel = ys > 0
        else:
            sel = ys < 0
        with np.errstate(divide="ignore", invalid="ignore"):
            z = xs / ys
        ok = sel & (z >= omega1) & (z <= omega2)
        hits += int(ok.sum())
        remaining -= m
    freq = hits / n
    return freq, math.sqrt(max(freq * (1 - freq), 1e-300) / n)
