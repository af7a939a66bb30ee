"""2x2 bimatrix games under additive Gaussian payoff noise.

The package models games whose payoffs reach the players through a noisy
channel, computes the exact probability that their equilibrium behaviour
stays within a tolerance of the noise-free equilibria, and validates those
probabilities against seeded Monte Carlo simulation and welfare metrics.
"""

from .games import (
    BUILTIN_GAMES,
    Bimatrix2x2,
    DegenerateGameError,
    NEClass,
    NEKind,
    NoMixedEquilibriumError,
    Strategy,
    StrategyProfile,
    UnclassifiableDegenerateError,
    UndefinedRatioError,
    classify_player,
    enumerate_nash,
    is_degenerate,
    load_game,
    mixed_probability,
    optimal_welfare,
    payoff,
    price_of_anarchy,
    scale_game,
    shift_game,
    social_welfare,
    utility_gain,
)
from .misinfo import (
    MisinformationGame,
    NoiseSpec,
    NoisyGameSpec,
    epsilon_close,
    epsilon_misinformed_by_definition,
    identity_misinformation,
    inverse_epsilon_misinformed_by_definition,
    is_epsilon_misinformed,
    is_inverse_epsilon_misinformed,
    load_noisy_spec,
    natural_misinformed_equilibria,
    price_of_misinformation,
    welfare_ratio_plane,
)
from .montecarlo import McConfig, McEstimate, SweepRow, estimate, sample_noisy_game, sweep
from .probability import (
    ClassProbabilities,
    ConsistencyReport,
    DegenerateNoiseError,
    NormalDist,
    QuadratureConfig,
    UGainDist,
    class_probabilities,
    consistency_probabilities,
    noise_threshold_scan,
    ratio_region_integral,
    std_normal_cdf,
    ugain_distribution,
)

__version__ = "0.1.0"

__all__ = [
    "BUILTIN_GAMES",
    "Bimatrix2x2",
    "ClassProbabilities",
    "ConsistencyReport",
    "DegenerateGameError",
    "DegenerateNoiseError",
    "McConfig",
    "McEstimate",
    "MisinformationGame",
    "NEClass",
    "NEKind",
    "NoMixedEquilibriumError",
    "NoiseSpec",
    "NoisyGameSpec",
    "NormalDist",
    "QuadratureConfig",
    "Strategy",
    "StrategyProfile",
    "SweepRow",
    "UGainDist",
    "UnclassifiableDegenerateError",
    "UndefinedRatioError",
    "class_probabilities",
    "classify_player",
    "consistency_probabilities",
    "enumerate_nash",
    "epsilon_close",
    "epsilon_misinformed_by_definition",
    "estimate",
    "identity_misinformation",
    "inverse_epsilon_misinformed_by_definition",
    "is_degenerate",
    "is_epsilon_misinformed",
    "is_inverse_epsilon_misinformed",
    "load_game",
    "load_noisy_spec",
    "mixed_probability",
    "natural_misinformed_equilibria",
    "noise_threshold_scan",
    "optimal_welfare",
    "payoff",
    "price_of_anarchy",
    "price_of_misinformation",
    "ratio_region_integral",
    "sample_noisy_game",
    "scale_game",
    "shift_game",
    "social_welfare",
    "std_normal_cdf",
    "sweep",
    "ugain_distribution",
    "utility_gain",
    "welfare_ratio_plane",
]
