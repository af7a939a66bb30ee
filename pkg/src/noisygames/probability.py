"""Closed-form behavioural-consistency probabilities for noisy games.

Additive Gaussian noise on payoff entries turns each utility gain of a view
game into an independent Gaussian variable whose mean is the noise-free gain
(plus bias) and whose standard deviation combines the two perturbed entries.
The probability that a view game lands in each equilibrium class is then a
polynomial in Gaussian CDF values at zero, plus band probabilities of the
ratio of two independent Gaussians for the classes that constrain the mixed
probability.  Multiplying per-player factors selected by the actual game's
class gives the probability that the noisy game keeps the players'
behaviour within tolerance (and the inverse, coverage-direction one).

The ratio-band term is computed by reducing the two-dimensional integral to a
single adaptive quadrature over the denominator variable, with the inner
integral in closed form.  Two evaluation modes exist:

* ``corrected`` (canonical): the reduction carries the change-of-variables
  factor, i.e. the integrand is ``(F_X(O2*y) - F_X(O1*y)) * f_Y(y)`` on the
  positive half-line and the mirrored difference on the negative one.  This
  is the exact probability of the band event and is what the Monte Carlo
  oracle confirms.

* ``literal``: a variant that keeps a residual 1/y factor in the integrand
  (the result of skipping the change-of-variables factor in the conditional
  density).  It is retained for comparison only; it does not integrate to
  the band probability, may fall outside [0, 1], and needs an exclusion zone
  around y = 0 where it diverges.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass, field
from typing import Callable, Literal, Sequence

from scipy.integrate import quad

from .games import Bimatrix2x2, NEClass, NEKind, PLAYERS, classify_player, opponent
from .misinfo import NoiseSpec, epsilon_window, infinite_nash_window

RatioMode = Literal["corrected", "literal"]

_SQRT2 = math.sqrt(2.0)
_INV_SQRT_2PI = 1.0 / math.sqrt(2.0 * math.pi)

# Half-width of the interval cut out around y = 0 in literal mode, where the
# 1/y factor makes the integrand singular.
LITERAL_EXCLUSION = 1e-8


class DegenerateNoiseError(ValueError):
    """A utility gain is deterministically zero, so class probabilities are undefined."""


def std_normal_cdf(x: float) -> float:
    """Standard normal CDF via the complementary error function."""
    return 0.5 * math.erfc(-x / _SQRT2)


def std_normal_pdf(x: float) -> float:
    return _INV_SQRT_2PI * math.exp(-0.5 * x * x)


@dataclass(frozen=True)
class NormalDist:
    """Gaussian law; ``sd == 0`` denotes a point mass at ``mu``."""

    mu: float
    sd: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.mu) and math.isfinite(self.sd)):
            raise ValueError("distribution parameters must be finite")
        if self.sd < 0.0:
            raise ValueError(f"standard deviation must be >= 0, got {self.sd!r}")

    def cdf(self, x: float) -> float:
        if self.sd == 0.0:
            return 1.0 if x >= self.mu else 0.0
        return std_normal_cdf((x - self.mu) / self.sd)

    def pdf(self, x: float) -> float:
        if self.sd == 0.0:
            raise ValueError("point mass has no density")
        return std_normal_pdf((x - self.mu) / self.sd) / self.sd


@dataclass(frozen=True)
class UGainDist:
    """Law of a noisy utility gain, tagged with who sees it and whose gain it is."""

    dist: NormalDist
    viewer: str
    subject: str
    opponent_pure: int


def _default_abs_tol() -> float:
    value = os.environ.get("NOISYGAMES_QUAD_ABS_TOL")
    return float(value) if value else 1e-10


@dataclass(frozen=True)
class QuadratureConfig:
    abs_tol: float = field(default_factory=_default_abs_tol)
    truncation_sigmas: float = 12.0
    max_subdivisions: int = 10**6

    def __post_init__(self) -> None:
        if not self.abs_tol > 0.0:
            raise ValueError("abs_tol must be positive")
        if self.truncation_sigmas < 8.0:
            raise ValueError("truncation_sigmas must be at least 8")

    @property
    def quad_limit(self) -> int:
        return max(50, min(self.max_subdivisions, 500))


DEFAULT_QUAD = QuadratureConfig()


def ugain_distribution(
    actual: Bimatrix2x2, spec: NoiseSpec, viewer: str, subject: str, index: int
) -> UGainDist:
    """Gaussian law of one utility gain in ``viewer``'s noisy view.

    The mean is the gain of the bias-shifted game; the standard deviation
    combines the two perturbed entries in quadrature (per-entry values are
    standard deviations).
    """
    if index not in (1, 2):
        raise ValueError("pure-strategy index must be 1 or 2")
    if viewer not in PLAYERS:
        raise ValueError(f"unknown player {viewer!r}")
    j = index - 1
    # One mean/std matrix is stored per payoff matrix and applies inside every
    # view; gains involve only entries of the subject player's own matrix.
    mm = spec.mean(subject)
    dd = spec.std(subject)
    if subject == "r":
        pm = actual.payoff_r
        mu = (pm[0][j] + mm[0][j]) - (pm[1][j] + mm[1][j])
        sd = math.hypot(dd[0][j], dd[1][j])
    elif subject == "c":
        pm = actual.payoff_c
        mu = (pm[j][0] + mm[j][0]) - (pm[j][1] + mm[j][1])
        sd = math.hypot(dd[j][0], dd[j][1])
    else:
        raise ValueError(f"unknown player {subject!r}")
    return UGainDist(NormalDist(mu, sd), viewer, subject, index)


def omega_to_ratio_bound(w: float) -> float:
    """Map a mixed-probability bound to a gain-ratio bound.

    The mixed probability ``p = g2 / (g2 - g1)`` corresponds to the ratio
    ``z = g1 / g2`` via ``z = (p - 1) / p``, monotone on (0, 1]; the endpoint
    0 maps to -inf and 1 to 0.
    """
    if not (0.0 <= w <= 1.0):
        raise ValueError("window bound must lie in [0, 1]")
    if w == 0.0:
        return -math.inf
    return (w - 1.0) / w


def _deterministic_y(x_dist: NormalDist, y0: float, o1: float, o2: float, y_sign: str) -> float:
    if y_sign == "positive":
        if y0 <= 0.0:
            return 0.0
        lo = -math.inf if o1 == -math.inf else o1 * y0
        hi = o2 * y0
    else:
        if y0 >= 0.0:
            return 0.0
        lo = o2 * y0
        hi = math.inf if o1 == -math.inf else o1 * y0
    hi_cdf = 1.0 if hi == math.inf else x_dist.cdf(hi)
    lo_cdf = 0.0 if lo == -math.inf else x_dist.cdf(lo)
    return max(0.0, hi_cdf - lo_cdf)


def _deterministic_x(y_dist: NormalDist, x0: float, o1: float, o2: float, y_sign: str) -> float:
    # Probability over y of the ratio condition holding with X fixed at x0.
    if y_sign == "positive":
        if x0 > 0.0:
            return 0.0
        if x0 == 0.0:
            return 1.0 - y_dist.cdf(0.0) if o2 == 0.0 else 0.0
        lo = 0.0 if o1 == -math.inf else x0 / o1
        hi = math.inf if o2 == 0.0 else x0 / o2
        lo = max(lo, 0.0)
        hi_cdf = 1.0 if hi == math.inf else y_dist.cdf(hi)
        return max(0.0, hi_cdf - y_dist.cdf(lo))
    if x0 < 0.0:
        return 0.0
    if x0 == 0.0:
        return y_dist.cdf(0.0) if o2 == 0.0 else 0.0
    lo = -math.inf if o2 == 0.0 else x0 / o2
    hi = 0.0 if o1 == -math.inf else x0 / o1
    hi = min(hi, 0.0)
    lo_cdf = 0.0 if lo == -math.inf else y_dist.cdf(lo)
    return max(0.0, y_dist.cdf(hi) - lo_cdf)


def ratio_region_integral(
    x_dist: NormalDist,
    y_dist: NormalDist,
    omega1: float,
    omega2: float,
    y_sign: Literal["positive", "negative"],
    cfg: QuadratureConfig = DEFAULT_QUAD,
    mode: RatioMode = "corrected",
) -> float:
    """Probability that X/Y lies in [omega1, omega2] with Y of the given sign.

    Bounds must satisfy ``-inf <= omega1 <= omega2 <= 0``.  With nonpositive
    bounds the event forces X to the sign opposite Y, so this is exactly the
    quadrant-restricted band probability.  Point-mass marginals (sd == 0) are
    evaluated directly, independent of ``mode``.
    """
    if y_sign not in ("positive", "negative"):
        raise ValueError("y_sign must be 'positive' or 'negative'")
    if mode not in ("corrected", "literal"):
        raise ValueError("mode must be 'corrected' or 'literal'")
    if math.isnan(omega1) or math.isnan(omega2):
        raise ValueError("ratio bounds must not be NaN")
    if omega1 > omega2:
        raise ValueError(f"need omega1 <= omega2, got ({omega1!r}, {omega2!r})")
    if omega2 > 0.0:
        raise ValueError(f"upper ratio bound must be <= 0, got {omega2!r}")
    if omega1 == omega2:
        return 0.0

    if y_dist.sd == 0.0:
        return _deterministic_y(x_dist, y_dist.mu, omega1, omega2, y_sign)
    if x_dist.sd == 0.0:
        return _deterministic_x(y_dist, x_dist.mu, omega1, omega2, y_sign)

    if mode == "corrected" and omega1 == -math.inf and omega2 == 0.0:
        # Full band == plain quadrant probability.
        if y_sign == "positive":
            return x_dist.cdf(0.0) * (1.0 - y_dist.cdf(0.0))
        return (1.0 - x_dist.cdf(0.0)) * y_dist.cdf(0.0)

    span = cfg.truncation_sigmas * y_dist.sd
    if y_sign == "positive":
        lo, hi = max(0.0, y_dist.mu - span), y_dist.mu + span
        if mode == "literal":
            lo = max(lo, LITERAL_EXCLUSION)
    else:
        lo, hi = y_dist.mu - span, min(0.0, y_dist.mu + span)
        if mode == "literal":
            hi = min(hi, -LITERAL_EXCLUSION)
    if lo >= hi:
        return 0.0

    def band(y: float) -> float:
        upper = x_dist.cdf(omega2 * y)
        if omega1 == -math.inf:
            lower = 0.0 if y > 0.0 else 1.0
        else:
            lower = x_dist.cdf(omega1 * y)
        return upper - lower

    if mode == "corrected":
        if y_sign == "positive":
            integrand = lambda y: band(y) * y_dist.pdf(y)
        else:
            integrand = lambda y: -band(y) * y_dist.pdf(y)
    else:
        # Oriented inner integral divided by y; positive either side.
        integrand = lambda y: band(y) * y_dist.pdf(y) / y

    # The band factor switches on and off where the inner interval crosses
    # the bulk of X; feeding those points to the subdivision keeps sharply
    # localized bands resolved.
    breaks = []
    x_span = cfg.truncation_sigmas * x_dist.sd
    for edge in (x_dist.mu - x_span, x_dist.mu, x_dist.mu + x_span):
        for om in (omega1, omega2):
            if om == -math.inf or om == 0.0:
                continue
            y_star = edge / om
            if lo < y_star < hi:
                breaks.append(y_star)
    value, _ = quad(
        integrand,
        lo,
        hi,
        epsabs=cfg.abs_tol,
        epsrel=1e-10,
        limit=cfg.quad_limit,
        points=sorted(breaks) if breaks else None,
    )
    if mode == "corrected":
        return min(1.0, max(0.0, value))
    return value


def _gains_for_viewer(
    actual: Bimatrix2x2, spec: NoiseSpec, x: str
) -> dict[tuple[str, int], UGainDist]:
    gains = {}
    for subject in PLAYERS:
        for index in (1, 2):
            g = ugain_distribution(actual, spec, x, subject, index)
            if g.dist.sd == 0.0 and g.dist.mu == 0.0:
                raise DegenerateNoiseError(
                    f"utility gain of player {subject!r} against pure strategy "
                    f"{index} in player {x!r}'s view is deterministically zero; "
                    "the view game would be degenerate with positive probability"
                )
            gains[(subject, index)] = g
    return gains


@dataclass(frozen=True)
class ClassProbabilities:
    """Probabilities of each equilibrium class for one player's noisy view.

    ``p_op1`` / ``p_op2`` are plain numbers; the ranged classes are exposed
    as evaluators over a mixed-probability window.  ``p_in`` is identically
    zero: a sampled view is degenerate with probability zero.
    """

    player: str
    p_op1: float
    p_op2: float
    f_own: tuple[float, float]
    f_opp: tuple[float, float]
    gains: dict
    cfg: QuadratureConfig
    mode: RatioMode
    p_in: float = 0.0

    def band_integrals(self, w1: float, w2: float) -> tuple[float, float]:
        """Ratio-band probabilities of the opponent-gain pair over a window,
        for positive and negative denominator sign respectively."""
        if not (0.0 <= w1 <= w2 <= 1.0):
            raise ValueError("window must satisfy 0 <= w1 <= w2 <= 1")
        o1, o2 = omega_to_ratio_bound(w1), omega_to_ratio_bound(w2)
        opp = opponent(self.player)
        x_dist = self.gains[(opp, 1)].dist
        y_dist = self.gains[(opp, 2)].dist
        pos = ratio_region_integral(x_dist, y_dist, o1, o2, "positive", self.cfg, self.mode)
        neg = ratio_region_integral(x_dist, y_dist, o1, o2, "negative", self.cfg, self.mode)
        return pos, neg

    def p_rom(self, w1: float, w2: float) -> float:
        pos, neg = self.band_integrals(w1, w2)
        f1, f2 = self.f_own
        return (1.0 - f1) * f2 * pos + f1 * (1.0 - f2) * neg

    def p_rpm(self, w1: float, w2: float) -> float:
        pos, neg = self.band_integrals(w1, w2)
        f1, f2 = self.f_own
        return (1.0 - f1) * f2 * neg + f1 * (1.0 - f2) * pos


def class_probabilities(
    actual: Bimatrix2x2,
    spec: NoiseSpec,
    x: str,
    cfg: QuadratureConfig = DEFAULT_QUAD,
    mode: RatioMode = "corrected",
) -> ClassProbabilities:
    """Distribution over equilibrium classes of player ``x``'s noisy view."""
    gains = _gains_for_viewer(actual, spec, x)
    opp = opponent(x)
    f1 = gains[(x, 1)].dist.cdf(0.0)
    f2 = gains[(x, 2)].dist.cdf(0.0)
    g1 = gains[(opp, 1)].dist.cdf(0.0)
    g2 = gains[(opp, 2)].dist.cdf(0.0)
    p_op1 = (
        (1.0 - f1) * (1.0 - f2)
        + (1.0 - f1) * f2 * (1.0 - g1) * (1.0 - g2)
        + f1 * (1.0 - f2) * g1 * g2
    )
    p_op2 = (
        f1 * f2
        + f1 * (1.0 - f2) * (1.0 - g1) * (1.0 - g2)
        + (1.0 - f1) * f2 * g1 * g2
    )
    return ClassProbabilities(
        player=x,
        p_op1=p_op1,
        p_op2=p_op2,
        f_own=(f1, f2),
        f_opp=(g1, g2),
        gains=gains,
        cfg=cfg,
        mode=mode,
    )


@dataclass(frozen=True)
class PlayerConsistency:
    """Per-player factors and intermediates behind a consistency report."""

    player: str
    actual_class: NEClass
    window: tuple[float, float] | None
    f_own: tuple[float, float]
    f_opp: tuple[float, float]
    p_op1: float
    p_op2: float
    p_rom: float
    p_rpm: float
    band_pos: float
    band_neg: float
    factor_mis: float
    factor_inv: float

    def to_dict(self) -> dict:
        return {
            "actual_class": self.actual_class.to_dict(),
            "window": list(self.window) if self.window is not None else None,
            "f_values": {
                "own_1": self.f_own[0],
                "own_2": self.f_own[1],
                "opp_1": self.f_opp[0],
                "opp_2": self.f_opp[1],
            },
            "p_op1": self.p_op1,
            "p_op2": self.p_op2,
            "p_rom": self.p_rom,
            "p_rpm": self.p_rpm,
            "integrals": {"band_pos": self.band_pos, "band_neg": self.band_neg},
            "factor_mis": self.factor_mis,
            "factor_inv": self.factor_inv,
        }


@dataclass(frozen=True)
class ConsistencyReport:
    """Probabilities that a noisy game keeps behaviour within tolerance.

    ``p_mis`` multiplies the per-player forward factors, ``p_inv`` the
    coverage ones; all intermediates are kept for auditability.
    """

    epsilon: float
    mode: RatioMode
    p_mis: float
    p_inv: float
    players: dict[str, PlayerConsistency]

    def to_dict(self) -> dict:
        return {
            "epsilon": self.epsilon,
            "ratio_mode": self.mode,
            "p_mis": self.p_mis,
            "p_inv": self.p_inv,
            "players": {x: pc.to_dict() for x, pc in self.players.items()},
        }


def _player_consistency(
    actual: Bimatrix2x2,
    spec: NoiseSpec,
    x: str,
    epsilon: float,
    cfg: QuadratureConfig,
    mode: RatioMode,
) -> PlayerConsistency:
    cls = classify_player(actual, x)
    cp = class_probabilities(actual, spec, x, cfg, mode)

    if cls.kind is NEKind.ONLY_PURE:
        window = None
        rom = rpm = 0.0
        pos, neg = cp.band_integrals(0.0, 1.0)
        f1, f2 = cp.f_own
        rpm_full = (1.0 - f1) * f2 * neg + f1 * (1.0 - f2) * pos
        rom_full = (1.0 - f1) * f2 * pos + f1 * (1.0 - f2) * neg
        p_opi = cp.p_op1 if cls.index == 1 else cp.p_op2
        factor_mis = p_opi
        factor_inv = p_opi + rpm_full
        rom, rpm = rom_full, rpm_full
    elif cls.kind is NEKind.INFINITE_NASH:
        window = infinite_nash_window(epsilon)
        factor_mis = 1.0
        if epsilon <= 0.5:
            rom = rpm = pos = neg = 0.0
            factor_inv = 0.0
        else:
            pos, neg = cp.band_integrals(*window)
            f1, f2 = cp.f_own
            rpm = (1.0 - f1) * f2 * neg + f1 * (1.0 - f2) * pos
            rom = (1.0 - f1) * f2 * pos + f1 * (1.0 - f2) * neg
            factor_inv = rpm
    else:
        window = epsilon_window(cls.p, epsilon)
        pos, neg = cp.band_integrals(*window)
        f1, f2 = cp.f_own
        rom = (1.0 - f1) * f2 * pos + f1 * (1.0 - f2) * neg
        rpm = (1.0 - f1) * f2 * neg + f1 * (1.0 - f2) * pos
        if cls.kind is NEKind.ONLY_MIXED:
            factor_mis = rom
            factor_inv = rom + rpm
        else:  # PURE_AND_MIXED
            factor_mis = rpm + rom + cp.p_op1 + cp.p_op2
            factor_inv = rpm

    return PlayerConsistency(
        player=x,
        actual_class=cls,
        window=window,
        f_own=cp.f_own,
        f_opp=cp.f_opp,
        p_op1=cp.p_op1,
        p_op2=cp.p_op2,
        p_rom=rom,
        p_rpm=rpm,
        band_pos=pos,
        band_neg=neg,
        factor_mis=factor_mis,
        factor_inv=factor_inv,
    )


def consistency_probabilities(
    actual: Bimatrix2x2,
    spec: NoiseSpec,
    epsilon: float,
    cfg: QuadratureConfig = DEFAULT_QUAD,
    mode: RatioMode = "corrected",
) -> ConsistencyReport:
    """Closed-form probabilities of the componentwise consistency events."""
    if epsilon < 0.0:
        raise ValueError("tolerance must be >= 0")
    players = {
        x: _player_consistency(actual, spec, x, epsilon, cfg, mode) for x in PLAYERS
    }
    p_mis = players["r"].factor_mis * players["c"].factor_mis
    p_inv = players["r"].factor_inv * players["c"].factor_inv
    return ConsistencyReport(
        epsilon=epsilon, mode=mode, p_mis=p_mis, p_inv=p_inv, players=players
    )


def find_crossings(
    values: Sequence[float],
    grid: Sequence[float],
    target: float,
    fn: Callable[[float], float],
    width: float = 1e-4,
) -> list[tuple[float, float]]:
    """Bracketing intervals where a sampled curve crosses a target level.

    Every sign change between consecutive grid points is refined by bisection
    to the requested width; grid points landing exactly on the target yield a
    zero-width bracket.
    """
    crossings: list[tuple[float, float]] = []
    for i in range(len(grid) - 1):
        lo, hi = grid[i], grid[i + 1]
        flo, fhi = values[i] - target, values[i + 1] - target
        if flo == 0.0:
            crossings.append((lo, lo))
            continue
        if fhi == 0.0:
            continue  # handled as the left endpoint of the next pair
        if flo * fhi > 0.0:
            continue
        while hi - lo > width:
            mid = 0.5 * (lo + hi)
            fmid = fn(mid) - target
            if fmid == 0.0:
                lo = hi = mid
                break
            if flo * fmid < 0.0:
                hi, fhi = mid, fmid
            else:
                lo, flo = mid, fmid
        crossings.append((lo, hi))
    if len(grid) >= 1 and values[-1] - target == 0.0:
        crossings.append((grid[-1], grid[-1]))
    return crossings


def noise_threshold_scan(
    actual: Bimatrix2x2,
    shape: NoiseSpec,
    epsilon: float,
    target: float,
    d_grid: Sequence[float],
    cfg: QuadratureConfig = DEFAULT_QUAD,
    mode: RatioMode = "corrected",
) -> list[tuple[float, float]]:
    """All noise scales at which the forward consistency probability crosses
    ``target``, as bisection-refined brackets.

    The curve need not be monotone, so zero, one, or several crossings may
    come back; every sign change on the grid is refined to width 1e-4.
    """
    if len(d_grid) == 0:
        raise ValueError("noise-scale grid must be non-empty")
    grid = [float(d) for d in d_grid]
    if any(d <= 0.0 for d in grid):
        raise ValueError("noise scales must be positive")
    if any(b <= a for a, b in zip(grid, grid[1:])):
        raise ValueError("noise-scale grid must be strictly increasing")
    if not (0.0 < target < 1.0):
        raise ValueError("target probability must lie strictly inside (0, 1)")

    def p_mis(d: float) -> float:
        return consistency_probabilities(
            actual, shape.with_noise_scale(d), epsilon, cfg, mode
        ).p_mis

    values = [p_mis(d) for d in grid]
    return find_crossings(values, grid, target, p_mis)
