"""Misinformation-game model: equilibrium products, closeness, welfare."""

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from noisygames import (
    Bimatrix2x2,
    NoiseSpec,
    Strategy,
    StrategyProfile,
    UndefinedRatioError,
    epsilon_close,
    epsilon_misinformed_by_definition,
    identity_misinformation,
    inverse_epsilon_misinformed_by_definition,
    is_epsilon_misinformed,
    is_inverse_epsilon_misinformed,
    load_noisy_spec,
    natural_misinformed_equilibria,
    price_of_anarchy,
    price_of_misinformation,
    welfare_ratio_plane,
)
from noisygames.games import BUILTIN_GAMES, NEKind, classify_player
from noisygames.misinfo import (
    MisinformationGame,
    epsilon_window,
    infinite_nash_window,
    nme_welfare_flags,
)

from conftest import random_nondegenerate_games


def mirrored(game: Bimatrix2x2) -> Bimatrix2x2:
    """Negate all payoffs, flipping every utility-gain sign."""
    neg = lambda m: tuple(tuple(-v for v in row) for row in m)
    return Bimatrix2x2(neg(game.payoff_r), neg(game.payoff_c))


class TestNme:
    def test_identity_bos_has_nine(self, bos):
        assert len(natural_misinformed_equilibria(identity_misinformation(bos))) == 9

    def test_identity_pd_single(self, pd):
        nmes = natural_misinformed_equilibria(identity_misinformation(pd))
        assert nmes == frozenset(
            {StrategyProfile(Strategy(0.0), Strategy(0.0))}
        )

    def test_opposing_pure_views(self, pd, ww):
        # r's view makes first strategy dominant, c's view the second.
        mg = MisinformationGame(pd, mirrored(pd), pd)
        nmes = natural_misinformed_equilibria(mg)
        assert nmes == frozenset(
            {StrategyProfile(Strategy(1.0), Strategy(0.0))}
        )

    def test_degenerate_view_rejected(self, pd, zero_game):
        with pytest.raises(ValueError):
            natural_misinformed_equilibria(MisinformationGame(pd, zero_game, pd))


class TestEpsilonClose:
    def test_examples(self):
        assert epsilon_close(Strategy(0.6), Strategy(0.55), 0.1)
        assert not epsilon_close(Strategy(1.0), Strategy(0.99), 0.1)
        assert epsilon_close(Strategy(1.0), Strategy(1.0), 0.0)

    @given(st.floats(0, 1), st.floats(0, 1), st.floats(0, 1))
    def test_symmetric(self, p, q, eps):
        a, b = Strategy(p), Strategy(q)
        assert epsilon_close(a, b, eps) == epsilon_close(b, a, eps)

    @given(st.floats(0, 1), st.floats(0, 0.5))
    def test_reflexive(self, p, eps):
        s = Strategy(p)
        assert epsilon_close(s, s, eps)

    @given(st.floats(0, 1), st.floats(0, 1), st.floats(0, 0.5), st.floats(0, 0.5))
    def test_monotone_in_eps(self, p, q, e1, e2):
        lo, hi = min(e1, e2), max(e1, e2)
        if epsilon_close(Strategy(p), Strategy(q), lo):
            assert epsilon_close(Strategy(p), Strategy(q), hi)


class TestWindows:
    def test_examples(self):
        assert epsilon_window(0.6, 0.1) == (0.5, 0.7)
        assert epsilon_window(0.05, 0.1) == (0.0, pytest.approx(0.15))
        assert infinite_nash_window(0.7) == (pytest.approx(0.3), 0.7)

    @given(st.floats(0.01, 0.99), st.floats(0, 2))
    def test_clamped(self, p0, eps):
        w1, w2 = epsilon_window(p0, eps)
        assert 0.0 <= w1 <= p0 <= w2 <= 1.0


class TestStructuralPredicates:
    def test_identity_pd(self, pd):
        mg = identity_misinformation(pd)
        for eps in (0.0, 0.01, 0.3):
            assert is_epsilon_misinformed(mg, eps)
            assert is_inverse_epsilon_misinformed(mg, eps)

    def test_wrong_pure_view(self, pd):
        mg = MisinformationGame(pd, mirrored(pd), pd)
        assert not is_epsilon_misinformed(mg, 0.5)
        assert not is_inverse_epsilon_misinformed(mg, 0.5)

    def test_identity_bos_componentwise(self, bos):
        # The componentwise conditions hold for identity views of a
        # two-pure-one-mixed game, even though the profile-level definition
        # fails (mismatched pure pairs are natural misinformed equilibria).
        mg = identity_misinformation(bos)
        assert is_epsilon_misinformed(mg, 0.01)
        assert is_inverse_epsilon_misinformed(mg, 0.01)
        assert not epsilon_misinformed_by_definition(mg, 0.01)
        assert inverse_epsilon_misinformed_by_definition(mg, 0.01)

    def test_monotone_in_eps(self):
        rng = np.random.default_rng(3)
        games = random_nondegenerate_games(60, seed=8)
        for actual in games[:30]:
            view_r = _perturbed(actual, rng)
            view_c = _perturbed(actual, rng)
            mg = MisinformationGame(actual, view_r, view_c)
            eps_grid = [0.0, 0.05, 0.1, 0.3, 0.6, 1.0]
            mis = [is_epsilon_misinformed(mg, e) for e in eps_grid]
            inv = [is_inverse_epsilon_misinformed(mg, e) for e in eps_grid]
            for seq in (mis, inv):
                assert all(not a or b for a, b in zip(seq, seq[1:]))

    def test_matches_definition_on_singleton_classes(self):
        # With singleton per-player equilibrium sets the componentwise
        # conditions are equivalent to the profile-level definition.
        rng = np.random.default_rng(17)
        checked = 0
        for actual in random_nondegenerate_games(1000, seed=29):
            kinds = {classify_player(actual, x).kind for x in ("r", "c")}
            if kinds & {NEKind.PURE_AND_MIXED}:
                continue
            view_r = _perturbed(actual, rng)
            view_c = _perturbed(actual, rng)
            mg = MisinformationGame(actual, view_r, view_c)
            for eps in (0.01, 0.2):
                assert is_epsilon_misinformed(mg, eps) == (
                    epsilon_misinformed_by_definition(mg, eps)
                )
                assert is_inverse_epsilon_misinformed(mg, eps) == (
                    inverse_epsilon_misinformed_by_definition(mg, eps)
                )
            checked += 1
        assert checked > 300

    def test_inverse_matches_definition_everywhere(self):
        # The coverage direction factorizes exactly for every class because
        # the misinformed profiles form a full cross product.
        rng = np.random.default_rng(21)
        for actual in random_nondegenerate_games(400, seed=37):
            mg = MisinformationGame(
                actual, _perturbed(actual, rng), _perturbed(actual, rng)
            )
            for eps in (0.05, 0.4):
                assert is_inverse_epsilon_misinformed(mg, eps) == (
                    inverse_epsilon_misinformed_by_definition(mg, eps)
                )

    def test_unclassifiable_actual_rejected(self, pd):
        from noisygames import UnclassifiableDegenerateError

        actual = Bimatrix2x2(((2, 2), (1, 1)), ((3, 3), (3, 3)))
        mg = MisinformationGame(actual, pd, pd)
        with pytest.raises(UnclassifiableDegenerateError):
            is_epsilon_misinformed(mg, 0.1)
        with pytest.raises(UnclassifiableDegenerateError):
            is_inverse_epsilon_misinformed(mg, 0.1)

    def test_infinite_nash_actual_rows(self, zero_game, pd, bos):
        # A forgiving actual game: the forward condition always holds, the
        # coverage one needs a single view strategy set spanning the simplex.
        mg = MisinformationGame(zero_game, pd, pd)
        assert is_epsilon_misinformed(mg, 0.0)
        assert not is_inverse_epsilon_misinformed(mg, 0.9)
        wide = MisinformationGame(zero_game, bos, bos)
        assert is_epsilon_misinformed(wide, 0.0)
        # bos views are two-pure-and-mixed with p = 2/3 and 1/3: covered once
        # the window (1 - eps, eps) contains them.
        assert not is_inverse_epsilon_misinformed(wide, 0.5)
        assert is_inverse_epsilon_misinformed(wide, 0.7)

    def test_forward_divergence_is_one_sided(self):
        # Where the componentwise forward condition disagrees with the
        # definition it is always the weaker one (definition implies it).
        rng = np.random.default_rng(41)
        diverged = 0
        for actual in random_nondegenerate_games(400, seed=43):
            mg = MisinformationGame(
                actual, _perturbed(actual, rng), _perturbed(actual, rng)
            )
            strict = epsilon_misinformed_by_definition(mg, 0.1)
            loose = is_epsilon_misinformed(mg, 0.1)
            if strict:
                assert loose
            if loose and not strict:
                diverged += 1
                assert classify_player(mg.actual, "r").kind is NEKind.PURE_AND_MIXED
        assert diverged > 0


def _perturbed(game, rng):
    """Random non-degenerate additive perturbation of a game."""
    while True:
        a = np.asarray(game.payoff_r) + rng.normal(0, 1.5, (2, 2))
        b = np.asarray(game.payoff_c) + rng.normal(0, 1.5, (2, 2))
        g = Bimatrix2x2(tuple(map(tuple, a)), tuple(map(tuple, b)))
        from noisygames import is_degenerate

        if not is_degenerate(g):
            return g


class TestPom:
    def test_identity_equals_poa(self, pd, ww):
        # Identity views reproduce the anarchy ratio when each player's
        # equilibrium set is a singleton (then the misinformed profiles are
        # exactly the Nash profiles).
        for game in (pd, ww):
            assert price_of_misinformation(identity_misinformation(game)) == (
                pytest.approx(price_of_anarchy(game), abs=1e-12)
            )

    def test_identity_bos_undefined(self, bos):
        # The cross product pairs the two pure equilibrium strategies both
        # ways; the mismatched pairs have zero welfare here, so the ratio is
        # undefined even though the anarchy ratio exists.
        with pytest.raises(UndefinedRatioError):
            price_of_misinformation(identity_misinformation(bos))

    def test_beneficial_misinformation(self, pd):
        mg = MisinformationGame(pd, mirrored(pd), mirrored(pd))
        assert price_of_misinformation(mg) == pytest.approx(1.0, abs=1e-12)

    def test_zero_sum_undefined(self, mp):
        with pytest.raises(UndefinedRatioError):
            price_of_misinformation(identity_misinformation(mp))

    def test_at_least_one(self):
        # The ratio is only meaningful for positive welfare; shift games up
        # so every profile has positive social welfare.
        from noisygames import shift_game
        from noisygames.games import min_vertex_welfare

        rng = np.random.default_rng(51)
        for actual in random_nondegenerate_games(200, seed=53):
            actual = shift_game(actual, 1.0 - min_vertex_welfare(actual) / 2.0)
            assert min_vertex_welfare(actual) > 0.0
            mg = MisinformationGame(
                actual, _perturbed(actual, rng), _perturbed(actual, rng)
            )
            assert price_of_misinformation(mg) >= 1.0 - 1e-12


class TestWelfareFlags:
    def test_identity_pd_worst(self, pd):
        best, worst = nme_welfare_flags(identity_misinformation(pd))
        assert not best
        assert worst

    def test_mirrored_pd_best(self, pd):
        best, worst = nme_welfare_flags(
            MisinformationGame(pd, mirrored(pd), mirrored(pd))
        )
        assert best
        assert not worst

    def test_constant_sum_both(self, mp):
        best, worst = nme_welfare_flags(identity_misinformation(mp))
        assert best and worst


class TestWelfareRatioPlane:
    def test_shape(self, pd):
        assert welfare_ratio_plane(pd, 2).shape == (3, 3)

    def test_pd_corners(self, pd):
        plane = welfare_ratio_plane(pd, 10)
        assert plane[10, 10] == pytest.approx(1.0)  # both play the first strategy
        assert plane[0, 0] == pytest.approx(2.0)

    def test_constant_sum_after_shift(self, mp):
        from noisygames import shift_game

        plane = welfare_ratio_plane(shift_game(mp, 2), 20)
        assert np.all(np.abs(plane - 1.0) <= 1e-12)

    def test_zero_cells_marked(self, mp):
        plane = welfare_ratio_plane(mp, 4)
        assert np.all(np.isinf(plane) | np.isfinite(plane))
        assert np.isinf(plane).any()

    def test_resolution_validated(self, pd):
        with pytest.raises(ValueError):
            welfare_ratio_plane(pd, 1)


class TestNoisySpecIO:
    def test_scalar_and_matrix_stds(self, tmp_path):
        import json

        payload = {
            "game": "pd",
            "std_r": 1.0,
            "std_c": [[1, 0], [0, 1]],
            "epsilon": 0.1,
        }
        path = tmp_path / "noisy.json"
        path.write_text(json.dumps(payload))
        spec = load_noisy_spec(path.as_posix())
        assert spec.game == BUILTIN_GAMES["pd"]
        assert spec.noise.std_r == ((1.0, 1.0), (1.0, 1.0))
        assert spec.noise.std_c == ((1.0, 0.0), (0.0, 1.0))
        assert spec.noise.mean_r == ((0.0, 0.0), (0.0, 0.0))
        assert spec.epsilon == 0.1

    def test_missing_std_rejected(self):
        with pytest.raises(ValueError):
            load_noisy_spec({"game": "pd", "std_r": 1.0, "epsilon": 0.1})

    def test_negative_std_rejected(self):
        with pytest.raises(ValueError):
            NoiseSpec.uniform(-1.0)

    def test_inline_game(self):
        spec = load_noisy_spec(
            {
                "game": {"payoff_r": [[1, 0], [0, 2]], "payoff_c": [[2, 0], [0, 1]]},
                "std_r": 0.5,
                "std_c": 0.5,
            }
        )
        assert spec.game.payoff_r[1][1] == 2

    def test_noise_scaling(self):
        spec = NoiseSpec.uniform(1.0).with_noise_scale(2.5)
        assert spec.std_r == ((2.5, 2.5), (2.5, 2.5))
        assert spec.mean_r == ((0.0, 0.0), (0.0, 0.0))
