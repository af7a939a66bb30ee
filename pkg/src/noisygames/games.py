"""Exact equilibrium analysis of 2x2 bimatrix games.

A game is a pair of 2x2 real payoff matrices, one per player.  Player ``r``
picks a row, player ``c`` picks a column; entry ``[i, j]`` is the outcome when
``r`` plays pure strategy ``i + 1`` and ``c`` plays ``j + 1``.  All equilibrium
structure of such a game is determined by the signs of four "utility gains"
(the advantage of the first pure strategy over the second, per player, per
opposing pure strategy), which is what every routine here works from.

Degeneracy (some utility gain exactly zero) is decided by exact comparison on
the stored floating-point values: games are treated as exact data, and
randomly perturbed games are degenerate with probability zero.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Iterable, Union

Matrix = tuple[tuple[float, float], tuple[float, float]]

PLAYERS = ("r", "c")


class DegenerateGameError(ValueError):
    """Raised when an operation requires a non-degenerate game."""


class UnclassifiableDegenerateError(DegenerateGameError):
    """Degenerate game whose equilibrium set is outside the supported taxonomy."""


class NoMixedEquilibriumError(ValueError):
    """Raised when a mixed equilibrium probability is requested but none exists."""


class UndefinedRatioError(ValueError):
    """Welfare-ratio denominator is zero (constant-zero-welfare games)."""


def opponent(x: str) -> str:
    if x == "r":
        return "c"
    if x == "c":
        return "r"
    raise ValueError(f"unknown player {x!r}")


def _as_matrix(values: Iterable[Iterable[float]], name: str) -> Matrix:
    rows = [tuple(float(v) for v in row) for row in values]
    if len(rows) != 2 or any(len(row) != 2 for row in rows):
        raise ValueError(f"{name} must be a 2x2 matrix")
    for row in rows:
        for v in row:
            if not math.isfinite(v):
                raise ValueError(f"{name} entries must be finite, got {v!r}")
    return (rows[0], rows[1])  # type: ignore[return-value]


@dataclass(frozen=True)
class Bimatrix2x2:
    """A two-player game: payoff matrices for the row and column player."""

    payoff_r: Matrix
    payoff_c: Matrix

    def __post_init__(self) -> None:
        object.__setattr__(self, "payoff_r", _as_matrix(self.payoff_r, "payoff_r"))
        object.__setattr__(self, "payoff_c", _as_matrix(self.payoff_c, "payoff_c"))

    def payoffs(self, x: str) -> Matrix:
        return self.payoff_r if x == "r" else self.payoff_c

    def to_dict(self) -> dict:
        return {
            "payoff_r": [list(row) for row in self.payoff_r],
            "payoff_c": [list(row) for row in self.payoff_c],
        }


@dataclass(frozen=True)
class Strategy:
    """A (possibly mixed) strategy, stored as the probability of the first pure strategy."""

    p: float

    def __post_init__(self) -> None:
        p = float(self.p)
        if not (0.0 <= p <= 1.0) or not math.isfinite(p):
            raise ValueError(f"strategy probability must lie in [0, 1], got {p!r}")
        object.__setattr__(self, "p", p)

    def support(self) -> frozenset[int]:
        if self.p == 1.0:
            return frozenset({1})
        if self.p == 0.0:
            return frozenset({2})
        return frozenset({1, 2})

    def as_pair(self) -> tuple[float, float]:
        return (self.p, 1.0 - self.p)


@dataclass(frozen=True)
class StrategyProfile:
    row: Strategy
    col: Strategy

    def strategy(self, x: str) -> Strategy:
        return self.row if x == "r" else self.col


PURE_1 = Strategy(1.0)
PURE_2 = Strategy(0.0)


class NEKind(Enum):
    ONLY_PURE = "only_pure"
    ONLY_MIXED = "only_mixed"
    PURE_AND_MIXED = "pure_and_mixed"
    INFINITE_NASH = "infinite_nash"


@dataclass(frozen=True)
class NEClass:
    """One player's equilibrium-strategy set, in the four-way taxonomy.

    ``index`` is set for ONLY_PURE (1 or 2); ``p`` is the mixed-strategy
    probability for ONLY_MIXED and PURE_AND_MIXED and lies strictly in (0, 1).
    """

    kind: NEKind
    index: int | None = None
    p: float | None = None

    def __post_init__(self) -> None:
        if self.kind is NEKind.ONLY_PURE:
            if self.index not in (1, 2) or self.p is not None:
                raise ValueError("ONLY_PURE requires index in {1, 2}")
        elif self.kind in (NEKind.ONLY_MIXED, NEKind.PURE_AND_MIXED):
            if self.p is None or not (0.0 < self.p < 1.0) or self.index is not None:
                raise ValueError(f"{self.kind.value} requires p strictly inside (0, 1)")
        else:
            if self.index is not None or self.p is not None:
                raise ValueError("INFINITE_NASH carries no parameters")

    @staticmethod
    def only_pure(index: int) -> "NEClass":
        return NEClass(NEKind.ONLY_PURE, index=index)

    @staticmethod
    def only_mixed(p: float) -> "NEClass":
        return NEClass(NEKind.ONLY_MIXED, p=p)

    @staticmethod
    def pure_and_mixed(p: float) -> "NEClass":
        return NEClass(NEKind.PURE_AND_MIXED, p=p)

    @staticmethod
    def infinite_nash() -> "NEClass":
        return NEClass(NEKind.INFINITE_NASH)

    def strategies(self) -> tuple[Strategy, ...]:
        """The player's equilibrium strategies; undefined for INFINITE_NASH."""
        if self.kind is NEKind.ONLY_PURE:
            return (PURE_1,) if self.index == 1 else (PURE_2,)
        if self.kind is NEKind.ONLY_MIXED:
            return (Strategy(self.p),)
        if self.kind is NEKind.PURE_AND_MIXED:
            return (PURE_1, PURE_2, Strategy(self.p))
        raise ValueError("INFINITE_NASH has no finite strategy list")

    def to_dict(self) -> dict:
        out: dict = {"kind": self.kind.value}
        if self.index is not None:
            out["index"] = self.index
        if self.p is not None:
            out["p"] = self.p
        return out


def utility_gain(game: Bimatrix2x2, x: str, i: int) -> float:
    """Advantage of the first pure strategy over the second for ``x`` when the
    opponent plays pure strategy ``i``."""
    if i not in (1, 2):
        raise ValueError("pure-strategy index must be 1 or 2")
    j = i - 1
    if x == "r":
        m = game.payoff_r
        return m[0][j] - m[1][j]
    if x == "c":
        m = game.payoff_c
        return m[j][0] - m[j][1]
    raise ValueError(f"unknown player {x!r}")


def utility_gains(game: Bimatrix2x2, x: str) -> tuple[float, float]:
    return (utility_gain(game, x, 1), utility_gain(game, x, 2))


def is_degenerate(game: Bimatrix2x2) -> bool:
    """True iff some utility gain is exactly zero (a pure strategy has two
    pure best responses)."""
    return any(
        utility_gain(game, x, i) == 0.0 for x in PLAYERS for i in (1, 2)
    )


def mixed_probability(game: Bimatrix2x2, x: str) -> float:
    """First-strategy probability of ``x``'s mixed equilibrium strategy.

    The value makes the *opponent* indifferent, so it is a ratio of the
    opponent's utility gains; it exists only when those gains have opposite
    signs.
    """
    if is_degenerate(game):
        raise DegenerateGameError("no mixed equilibrium: game is degenerate")
    g1, g2 = utility_gains(game, opponent(x))
    if g1 * g2 >= 0.0:
        raise NoMixedEquilibriumError(
            "no mixed equilibrium: opponent utility gains do not change sign"
        )
    return g2 / (g2 - g1)


def classify_player(game: Bimatrix2x2, x: str) -> NEClass:
    """Classify ``x``'s equilibrium-strategy set from the gain sign pattern.

    Non-degenerate games fall into exactly one of ten sign-pattern cases that
    map onto ONLY_PURE / ONLY_MIXED / PURE_AND_MIXED.  For degenerate games
    only the all-equilibria case is representable; anything else raises
    :class:`UnclassifiableDegenerateError`.
    """
    o1, o2 = utility_gains(game, x)
    b1, b2 = utility_gains(game, opponent(x))

    if o1 == 0.0 or o2 == 0.0 or b1 == 0.0 or b2 == 0.0:
        own_zero = o1 == 0.0 and o2 == 0.0
        opp_zero = b1 == 0.0 and b2 == 0.0
        if own_zero or (o1 * o2 < 0.0 and opp_zero):
            return NEClass.infinite_nash()
        raise UnclassifiableDegenerateError(
            f"degenerate game: equilibrium set of player {x!r} is neither "
            "finite nor the whole strategy simplex"
        )

    if o1 > 0.0 and o2 > 0.0:
        return NEClass.only_pure(1)
    if o1 < 0.0 and o2 < 0.0:
        return NEClass.only_pure(2)

    # Own gains have opposite signs: the opponent's pattern decides.
    if o1 > 0.0:  # own (+, -)
        if b1 > 0.0 and b2 > 0.0:
            return NEClass.only_pure(1)
        if b1 < 0.0 and b2 < 0.0:
            return NEClass.only_pure(2)
        if b1 < 0.0 and b2 > 0.0:
            return NEClass.only_mixed(mixed_probability(game, x))
        return NEClass.pure_and_mixed(mixed_probability(game, x))
    # own (-, +)
    if b1 < 0.0 and b2 < 0.0:
        return NEClass.only_pure(1)
    if b1 > 0.0 and b2 > 0.0:
        return NEClass.only_pure(2)
    if b1 > 0.0 and b2 < 0.0:
        return NEClass.only_mixed(mixed_probability(game, x))
    return NEClass.pure_and_mixed(mixed_probability(game, x))


def enumerate_nash(game: Bimatrix2x2) -> frozenset[StrategyProfile]:
    """All Nash equilibria of a non-degenerate game.

    Pure equilibria of coordination-type games pair matching indices
    ((1,1) and (2,2)); anti-coordination games pair mismatched ones.  The
    pairing is read off the sign pattern rather than re-derived numerically.
    """
    if is_degenerate(game):
        raise DegenerateGameError("cannot enumerate equilibria of a degenerate game")
    cr = classify_player(game, "r")
    cc = classify_player(game, "c")
    if cr.kind is not cc.kind:
        raise AssertionError("players of a non-degenerate 2x2 game share a class kind")

    if cr.kind is NEKind.ONLY_PURE:
        return frozenset(
            {StrategyProfile(cr.strategies()[0], cc.strategies()[0])}
        )
    if cr.kind is NEKind.ONLY_MIXED:
        return frozenset(
            {StrategyProfile(Strategy(cr.p), Strategy(cc.p))}
        )
    # PURE_AND_MIXED: coordination iff r's first gain is positive.
    mixed = StrategyProfile(Strategy(cr.p), Strategy(cc.p))
    if utility_gain(game, "r", 1) > 0.0:
        pures = [
            StrategyProfile(PURE_1, PURE_1),
            StrategyProfile(PURE_2, PURE_2),
        ]
    else:
        pures = [
            StrategyProfile(PURE_1, PURE_2),
            StrategyProfile(PURE_2, PURE_1),
        ]
    return frozenset([*pures, mixed])


def payoff(game: Bimatrix2x2, x: str, profile: StrategyProfile) -> float:
    """Expected payoff of ``x`` under a strategy profile (bilinear form)."""
    p, q = profile.row.p, profile.col.p
    m = game.payoffs(x)
    return (
        p * q * m[0][0]
        + p * (1.0 - q) * m[0][1]
        + (1.0 - p) * q * m[1][0]
        + (1.0 - p) * (1.0 - q) * m[1][1]
    )


def social_welfare(game: Bimatrix2x2, profile: StrategyProfile) -> float:
    return payoff(game, "r", profile) + payoff(game, "c", profile)


def pure_profiles() -> tuple[StrategyProfile, ...]:
    return (
        StrategyProfile(PURE_1, PURE_1),
        StrategyProfile(PURE_1, PURE_2),
        StrategyProfile(PURE_2, PURE_1),
        StrategyProfile(PURE_2, PURE_2),
    )


def optimal_welfare(game: Bimatrix2x2) -> tuple[StrategyProfile, float]:
    """Welfare-maximizing profile.  Social welfare is bilinear in the two
    mixing probabilities, so the maximum is attained at a pure profile; ties
    go to the first vertex in (row, column) order."""
    best_profile, best_value = None, -math.inf
    for profile in pure_profiles():
        value = social_welfare(game, profile)
        if value > best_value:
            best_profile, best_value = profile, value
    return best_profile, best_value


def min_vertex_welfare(game: Bimatrix2x2) -> float:
    return min(social_welfare(game, profile) for profile in pure_profiles())


def price_of_anarchy(game: Bimatrix2x2) -> float:
    """Optimal social welfare over the worst equilibrium welfare."""
    _, opt = optimal_welfare(game)
    worst = min(social_welfare(game, ne) for ne in enumerate_nash(game))
    if worst == 0.0:
        raise UndefinedRatioError("undefined PoA (zero-sum)")
    return opt / worst


def shift_game(game: Bimatrix2x2, a: float) -> Bimatrix2x2:
    """Add a constant to every payoff entry."""
    a = float(a)
    return Bimatrix2x2(
        tuple(tuple(v + a for v in row) for row in game.payoff_r),
        tuple(tuple(v + a for v in row) for row in game.payoff_c),
    )


def scale_game(game: Bimatrix2x2, lam: float) -> Bimatrix2x2:
    """Multiply every payoff entry by a positive constant."""
    lam = float(lam)
    if not lam > 0.0:
        raise ValueError(f"scale factor must be positive, got {lam!r}")
    return Bimatrix2x2(
        tuple(tuple(v * lam for v in row) for row in game.payoff_r),
        tuple(tuple(v * lam for v in row) for row in game.payoff_c),
    )


BUILTIN_GAMES: dict[str, Bimatrix2x2] = {
    # Prisoner's Dilemma
    "pd": Bimatrix2x2(((2, 0), (3, 1)), ((2, 3), (0, 1))),
    # Matching Pennies
    "mp": Bimatrix2x2(((1, -1), (-1, 1)), ((-1, 1), (1, -1))),
    # Battle of the Sexes
    "bos": Bimatrix2x2(((2, 0), (0, 1)), ((1, 0), (0, 2))),
    # Win-Win
    "ww": Bimatrix2x2(((3, 4), (1, 2)), ((2, 4), (1, 3))),
}


def game_from_dict(data: dict) -> Bimatrix2x2:
    try:
        return Bimatrix2x2(data["payoff_r"], data["payoff_c"])
    except KeyError as exc:
        raise ValueError(f"game object is missing key {exc}") from exc


def load_game(source: Union[str, Path, dict]) -> Bimatrix2x2:
    """Load a game from a built-in name, a JSON file path, or a parsed object.

    The file format is an object with keys ``payoff_r`` and ``payoff_c``,
    each a 2x2 row-major array: entry ``[i][j]`` is the payoff when the row
    player uses pure strategy ``i + 1`` and the column player ``j + 1``.
    """
    if isinstance(source, dict):
        return game_from_dict(source)
    name = str(source)
    if name in BUILTIN_GAMES:
        return BUILTIN_GAMES[name]
    path = Path(name)
    if not path.exists():
        raise ValueError(
            f"unknown game {name!r}: not a built-in "
            f"({', '.join(sorted(BUILTIN_GAMES))}) and no such file"
        )
    with open(path, "r", encoding="utf-8") as fh:
        return game_from_dict(json.load(fh))
