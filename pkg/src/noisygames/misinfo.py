"""Misinformation games over 2x2 bimatrix games.

A misinformation game bundles the game actually being played with one
subjective view per player.  Each player optimizes inside her own view but is
paid by the actual game, so the interesting objects are the *natural
misinformed equilibria* (one equilibrium strategy per player, drawn from that
player's view) and how close they stay to the actual game's equilibria.

Two closeness predicates are provided:

* :func:`is_epsilon_misinformed` / :func:`is_inverse_epsilon_misinformed`
  evaluate the componentwise structural conditions (one per player, based on
  the per-player equilibrium classes).  These are the conditions whose
  probabilities the closed-form engine in :mod:`noisygames.probability`
  computes, and the Monte Carlo module estimates the same events.

* :func:`epsilon_misinformed_by_definition` and its inverse check the literal
  profile-level definition (every natural misinformed equilibrium close to
  some Nash profile, resp. the coverage direction).

The two families agree whenever each player's actual equilibrium set is a
singleton.  When the actual game has two pure and one mixed equilibrium, the
profile definition also constrains how pure strategies pair up across
players, which the componentwise conditions cannot see; there the structural
predicate is strictly weaker on the forward direction.  The inverse direction
always agrees because the misinformed profiles form a full cross product.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Union

import numpy as np

from .games import (
    Bimatrix2x2,
    Matrix,
    NEClass,
    NEKind,
    PLAYERS,
    Strategy,
    StrategyProfile,
    UndefinedRatioError,
    _as_matrix,
    classify_player,
    enumerate_nash,
    load_game,
    min_vertex_welfare,
    optimal_welfare,
    social_welfare,
)

# Welfare slack used when deciding whether a profile attains the best or the
# worst achievable social welfare.
WELFARE_TOL = 1e-9


@dataclass(frozen=True)
class MisinformationGame:
    """Actual game plus one subjective game per player."""

    actual: Bimatrix2x2
    view_r: Bimatrix2x2
    view_c: Bimatrix2x2

    def view(self, x: str) -> Bimatrix2x2:
        return self.view_r if x == "r" else self.view_c


@dataclass(frozen=True)
class NoiseSpec:
    """Per-player, per-entry Gaussian perturbation parameters.

    ``mean_*`` are additive biases and ``std_*`` per-entry standard
    deviations (zero means the entry is perturbed deterministically by the
    mean alone).  Units are payoff units throughout.
    """

    mean_r: Matrix
    mean_c: Matrix
    std_r: Matrix
    std_c: Matrix

    def __post_init__(self) -> None:
        object.__setattr__(self, "mean_r", _as_matrix(self.mean_r, "mean_r"))
        object.__setattr__(self, "mean_c", _as_matrix(self.mean_c, "mean_c"))
        object.__setattr__(self, "std_r", _as_matrix(self.std_r, "std_r"))
        object.__setattr__(self, "std_c", _as_matrix(self.std_c, "std_c"))
        for name in ("std_r", "std_c"):
            for row in getattr(self, name):
                for v in row:
                    if v < 0.0:
                        raise ValueError(f"{name} entries must be >= 0, got {v!r}")

    def mean(self, x: str) -> Matrix:
        return self.mean_r if x == "r" else self.mean_c

    def std(self, x: str) -> Matrix:
        return self.std_r if x == "r" else self.std_c

    @staticmethod
    def uniform(std: float, mean: float = 0.0) -> "NoiseSpec":
        m = ((mean, mean), (mean, mean))
        d = ((std, std), (std, std))
        return NoiseSpec(m, m, d, d)

    def with_noise_scale(self, d: float) -> "NoiseSpec":
        """Same spec with every standard deviation multiplied by ``d``."""
        if d < 0.0:
            raise ValueError("noise scale must be >= 0")
        scale = lambda m: tuple(tuple(v * d for v in row) for row in m)
        return NoiseSpec(self.mean_r, self.mean_c, scale(self.std_r), scale(self.std_c))

    def to_dict(self) -> dict:
        return {
            "mean_r": [list(r) for r in self.mean_r],
            "mean_c": [list(r) for r in self.mean_c],
            "std_r": [list(r) for r in self.std_r],
            "std_c": [list(r) for r in self.std_c],
        }


def identity_misinformation(game: Bimatrix2x2) -> MisinformationGame:
    """Misinformation game whose views coincide with the actual game."""
    return MisinformationGame(game, game, game)


def natural_misinformed_equilibria(mg: MisinformationGame) -> frozenset[StrategyProfile]:
    """Cross product of each player's equilibrium strategies in her own view."""
    rows = classify_player(mg.view_r, "r")
    cols = classify_player(mg.view_c, "c")
    for cls, x in ((rows, "r"), (cols, "c")):
        if cls.kind is NEKind.INFINITE_NASH:
            raise ValueError(f"view of player {x!r} has infinitely many equilibria")
    return frozenset(
        StrategyProfile(sr, sc)
        for sr in rows.strategies()
        for sc in cols.strategies()
    )


def epsilon_close(a: Strategy, b: Strategy, epsilon: float) -> bool:
    """Identical supports and probability vectors within ``epsilon`` in sup norm."""
    if epsilon < 0.0:
        raise ValueError("tolerance must be >= 0")
    return a.support() == b.support() and abs(a.p - b.p) <= epsilon


def profiles_epsilon_close(a: StrategyProfile, b: StrategyProfile, epsilon: float) -> bool:
    return epsilon_close(a.row, b.row, epsilon) and epsilon_close(a.col, b.col, epsilon)


def epsilon_window(p0: float, epsilon: float) -> tuple[float, float]:
    """Clamped window of mixed probabilities within tolerance of ``p0``."""
    if not (0.0 < p0 < 1.0):
        raise ValueError("p0 must lie strictly inside (0, 1)")
    if epsilon < 0.0:
        raise ValueError("tolerance must be >= 0")
    return (max(0.0, p0 - epsilon), min(1.0, p0 + epsilon))


def infinite_nash_window(epsilon: float) -> tuple[float, float]:
    """Window a single mixed strategy must occupy to cover the whole simplex."""
    if epsilon < 0.0:
        raise ValueError("tolerance must be >= 0")
    return (max(0.0, 1.0 - epsilon), min(1.0, epsilon))


def _view_condition_mis(actual_cls: NEClass, view_cls: NEClass, epsilon: float) -> bool:
    if actual_cls.kind is NEKind.INFINITE_NASH:
        return True
    if actual_cls.kind is NEKind.ONLY_PURE:
        return view_cls.kind is NEKind.ONLY_PURE and view_cls.index == actual_cls.index
    w1, w2 = epsilon_window(actual_cls.p, epsilon)
    in_window = view_cls.p is not None and w1 < view_cls.p < w2
    if actual_cls.kind is NEKind.ONLY_MIXED:
        return view_cls.kind is NEKind.ONLY_MIXED and in_window
    # PURE_AND_MIXED
    if view_cls.kind is NEKind.ONLY_PURE:
        return True
    return in_window


def _view_condition_inv(actual_cls: NEClass, view_cls: NEClass, epsilon: float) -> bool:
    if actual_cls.kind is NEKind.INFINITE_NASH:
        w1, w2 = infinite_nash_window(epsilon)
        return (
            view_cls.kind is NEKind.PURE_AND_MIXED and w1 < view_cls.p < w2
        )
    if actual_cls.kind is NEKind.ONLY_PURE:
        return (
            view_cls.kind is NEKind.ONLY_PURE and view_cls.index == actual_cls.index
        ) or view_cls.kind is NEKind.PURE_AND_MIXED
    w1, w2 = epsilon_window(actual_cls.p, epsilon)
    in_window = view_cls.p is not None and w1 < view_cls.p < w2
    if actual_cls.kind is NEKind.ONLY_MIXED:
        return (
            view_cls.kind in (NEKind.ONLY_MIXED, NEKind.PURE_AND_MIXED) and in_window
        )
    return view_cls.kind is NEKind.PURE_AND_MIXED and in_window


def _structural(mg: MisinformationGame, epsilon: float, condition) -> bool:
    if epsilon < 0.0:
        raise ValueError("tolerance must be >= 0")
    for x in PLAYERS:
        actual_cls = classify_player(mg.actual, x)
        view_cls = classify_player(mg.view(x), x)
        if view_cls.kind is NEKind.INFINITE_NASH:
            raise ValueError(f"view of player {x!r} is degenerate")
        if not condition(actual_cls, view_cls, epsilon):
            return False
    return True


def is_epsilon_misinformed(mg: MisinformationGame, epsilon: float) -> bool:
    """Componentwise consistency: each player's view equilibria stay within
    tolerance of that player's actual equilibrium strategies."""
    return _structural(mg, epsilon, _view_condition_mis)


def is_inverse_epsilon_misinformed(mg: MisinformationGame, epsilon: float) -> bool:
    """Componentwise coverage: each of a player's actual equilibrium
    strategies has a view equilibrium strategy within tolerance."""
    return _structural(mg, epsilon, _view_condition_inv)


def epsilon_misinformed_by_definition(mg: MisinformationGame, epsilon: float) -> bool:
    """Literal profile-level check: every natural misinformed equilibrium is
    close to some Nash profile of the actual game."""
    nmes = natural_misinformed_equilibria(mg)
    nash = enumerate_nash(mg.actual)
    return all(
        any(profiles_epsilon_close(nme, ne, epsilon) for ne in nash) for nme in nmes
    )


def inverse_epsilon_misinformed_by_definition(mg: MisinformationGame, epsilon: float) -> bool:
    """Literal coverage check: every Nash profile of the actual game has a
    natural misinformed equilibrium close to it."""
    nmes = natural_misinformed_equilibria(mg)
    nash = enumerate_nash(mg.actual)
    return all(
        any(profiles_epsilon_close(nme, ne, epsilon) for nme in nmes) for ne in nash
    )


def price_of_misinformation(mg: MisinformationGame) -> float:
    """Optimal welfare of the actual game over the worst natural misinformed
    equilibrium welfare, measured with the actual payoffs."""
    _, opt = optimal_welfare(mg.actual)
    worst = min(
        social_welfare(mg.actual, nme) for nme in natural_misinformed_equilibria(mg)
    )
    if worst == 0.0:
        raise UndefinedRatioError("undefined PoM (zero-sum)")
    return opt / worst


def nme_welfare_flags(mg: MisinformationGame) -> tuple[bool, bool]:
    """(has best nme, has worst nme) under the actual game's welfare.

    A profile is "best" when its welfare reaches the optimum and "worst" when
    it reaches the minimum over pure profiles, both within ``WELFARE_TOL``.
    """
    _, opt = optimal_welfare(mg.actual)
    low = min_vertex_welfare(mg.actual)
    values = [
        social_welfare(mg.actual, nme) for nme in natural_misinformed_equilibria(mg)
    ]
    return (
        max(values) >= opt - WELFARE_TOL,
        min(values) <= low + WELFARE_TOL,
    )


def welfare_ratio_plane(game: Bimatrix2x2, n: int) -> np.ndarray:
    """(n+1) x (n+1) grid of optimal-to-realized welfare ratios.

    Cell ``[a, b]`` is ``SW(opt) / SW(((a/n, 1-a/n), (b/n, 1-b/n)))``; cells
    with exactly zero welfare are marked ``inf`` rather than raising.
    """
    if n < 2:
        raise ValueError("grid resolution must be at least 2")
    _, opt = optimal_welfare(game)
    s = np.asarray(game.payoff_r, dtype=float) + np.asarray(game.payoff_c, dtype=float)
    t = np.linspace(0.0, 1.0, n + 1)
    pv = np.stack([t, 1.0 - t], axis=1)  # (n+1, 2)
    sw = pv @ s @ pv.T  # sw[a, b] = (a/n, 1-a/n) S (b/n, 1-b/n)^T
    with np.errstate(divide="ignore"):
        plane = np.where(sw == 0.0, math.inf, opt / np.where(sw == 0.0, 1.0, sw))
    return plane


@dataclass(frozen=True)
class NoisyGameSpec:
    """Parsed noisy-game input: actual game, noise parameters, tolerance."""

    game: Bimatrix2x2
    noise: NoiseSpec
    epsilon: float

    def to_dict(self) -> dict:
        out = {"game": self.game.to_dict()}
        out.update(self.noise.to_dict())
        out["epsilon"] = self.epsilon
        return out


def _noise_matrix(data: dict, key: str, default: float | None) -> Matrix:
    if key not in data:
        if default is None:
            raise ValueError(f"noisy-game object is missing mandatory key {key!r}")
        v = default
        return ((v, v), (v, v))
    value = data[key]
    if isinstance(value, (int, float)):
        v = float(value)
        return ((v, v), (v, v))
    return _as_matrix(value, key)


def noisy_spec_from_dict(data: dict) -> NoisyGameSpec:
    if "game" not in data:
        raise ValueError("noisy-game object is missing key 'game'")
    game = load_game(data["game"])
    noise = NoiseSpec(
        _noise_matrix(data, "mean_r", 0.0),
        _noise_matrix(data, "mean_c", 0.0),
        _noise_matrix(data, "std_r", None),
        _noise_matrix(data, "std_c", None),
    )
    epsilon = float(data.get("epsilon", 0.0))
    if epsilon < 0.0:
        raise ValueError("epsilon must be >= 0")
    return NoisyGameSpec(game, noise, epsilon)


def load_noisy_spec(source: Union[str, Path, dict]) -> NoisyGameSpec:
    """Load a noisy-game description from a JSON file or parsed object.

    Keys: ``game`` (built-in name, path, or inline game object), ``std_r`` /
    ``std_c`` (mandatory; 2x2 arrays or a scalar applied to every entry),
    ``mean_r`` / ``mean_c`` (optional, default zero), ``epsilon`` (number,
    default 0).
    """
    if isinstance(source, dict):
        return noisy_spec_from_dict(source)
    with open(source, "r", encoding="utf-8") as fh:
        return noisy_spec_from_dict(json.load(fh))
