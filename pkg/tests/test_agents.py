import math
import random
from collections import Counter

import numpy as np
import pytest

from forageworld import (
    Action,
    AgentMemory,
    StrategyParams,
    decide_action,
    preset,
    score_cell,
    update_memory,
)
from forageworld.agents import DEFAULT_COLOR_VALUES, _cell_utilities, _pick_target
from forageworld.core import ObserverView, ViewForager


def make_view(pos=(10, 10), food=(), foragers=(), markers=(),
              width=21, height=21, observer_id="me", score=0):
    me = ViewForager(observer_id, "heart", pos[0], pos[1], "purple")
    return ObserverView(
        observer_id=observer_id,
        tick=0,
        width=width,
        height=height,
        position=pos,
        total_collected=score,
        food=sorted(food),
        markers=list(markers),
        foragers=[me] + list(foragers),
    )


class TestMemory:
    def test_single_decay_step(self):
        mem = AgentMemory()
        mem.add((3, 3), 1.0)
        update_memory(mem, make_view(), 0, StrategyParams(history_decay=0.99))
        assert mem.history_mass((3, 3)) == pytest.approx(0.99)

    def test_collection_adds_mass_at_own_cell(self):
        mem = AgentMemory()
        view = make_view(pos=(5, 6))
        update_memory(mem, view, 3, StrategyParams(history_decay=1.0))
        assert mem.history_mass((5, 6)) == pytest.approx(3.0)

    def test_decay_one_is_cumulative(self):
        mem = AgentMemory()
        params = StrategyParams(history_decay=1.0)
        for _ in range(5):
            update_memory(mem, make_view(pos=(2, 2)), 2, params)
        assert mem.history_mass((2, 2)) == pytest.approx(10.0)

    def test_total_mass_non_increasing_without_collections(self):
        mem = AgentMemory()
        mem.add((1, 1), 4.0)
        mem.add((2, 5), 1.5)
        params = StrategyParams(history_decay=0.9)
        previous = mem.total_mass()
        for _ in range(50):
            update_memory(mem, make_view(), 0, params)
            assert mem.total_mass() <= previous + 1e-12
            previous = mem.total_mass()

    def test_marker_memory_refreshed(self):
        mem = AgentMemory()
        update_memory(mem, make_view(markers=[(1, 2)]), 0, StrategyParams())
        assert mem.marker_memory == {(1, 2)}
        update_memory(mem, make_view(markers=[]), 0, StrategyParams())
        assert mem.marker_memory == set()

    def test_long_run_scale_stays_finite(self):
        mem = AgentMemory()
        params = StrategyParams(history_decay=0.5)
        view = make_view()
        for _ in range(3000):
            update_memory(mem, view, 1, params)
        assert math.isfinite(mem.total_mass())
        assert mem.total_mass() == pytest.approx(2.0, rel=1e-6)


class TestScoreCell:
    def test_all_weights_zero(self):
        view = make_view(food=[(10, 12, 4)])
        assert score_cell((10, 12), view, AgentMemory(), StrategyParams()) == 0.0

    def test_food_weight(self):
        view = make_view(food=[(10, 12, 4)])
        params = StrategyParams(w_food=1.0)
        assert score_cell((10, 12), view, AgentMemory(), params) == 4.0
        assert score_cell((0, 0), view, AgentMemory(), params) == 0.0

    def test_success_weight_with_red_forager(self):
        other = ViewForager("rival", "dog", 4, 4, "red")
        view = make_view(foragers=[other])
        params = StrategyParams(w_succ=1.0)
        assert score_cell((4, 4), view, AgentMemory(), params) == \
            pytest.approx(DEFAULT_COLOR_VALUES["red"])

    def test_self_not_counted_as_social(self):
        view = make_view(pos=(7, 7))
        params = StrategyParams(w_soc=1.0, w_succ=1.0)
        assert score_cell((7, 7), view, AgentMemory(), params) == 0.0

    def test_distance_discount(self):
        view = make_view(pos=(0, 0))
        params = StrategyParams(w_dist=0.5)
        assert score_cell((3, 4), view, AgentMemory(), params) == \
            pytest.approx(-0.5 * 5.0)

    def test_vectorized_matches_scalar(self):
        rng = random.Random(7)
        for trial in range(20):
            w, h = 12, 9
            food = [(rng.randrange(w), rng.randrange(h), rng.randint(1, 5))
                    for _ in range(6)]
            food = [(x, y, c) for (x, y), c in
                    {(x, y): c for x, y, c in food}.items()]
            others = [ViewForager(f"o{i}", "dog", rng.randrange(w),
                                  rng.randrange(h),
                                  rng.choice(list(DEFAULT_COLOR_VALUES)))
                      for i in range(3)]
            view = make_view(pos=(rng.randrange(w), rng.randrange(h)),
                             food=food, foragers=others, width=w, height=h)
            mem = AgentMemory()
            for _ in range(4):
                mem.add((rng.randrange(w), rng.randrange(h)), rng.random() * 3)
            params = StrategyParams(w_food=rng.random(), w_hist=rng.random(),
                                    w_soc=rng.random(), w_succ=rng.random(),
                                    w_dist=rng.random())
            util = _cell_utilities(view, mem, params)
            for x in range(w):
                for y in range(h):
                    assert util[x * h + y] == pytest.approx(
                        score_cell((x, y), view, mem, params), abs=1e-9)


class TestDecideAction:
    def test_forced_argmax_moves_toward_food(self):
        view = make_view(pos=(10, 10), food=[(12, 10, 1)])
        params = StrategyParams(w_food=1.0, temperature=0.0)
        action = decide_action(view, AgentMemory(), params, random.Random(0))
        assert action == Action.RIGHT

    def test_history_at_own_position_means_stay(self):
        view = make_view(pos=(10, 10))
        mem = AgentMemory()
        mem.add((10, 10), 5.0)
        params = StrategyParams(w_hist=1.0, temperature=0.0)
        action = decide_action(view, mem, params, random.Random(0))
        assert action == Action.STAY

    def test_axis_with_larger_gap_first(self):
        view = make_view(pos=(10, 10), food=[(11, 15, 1)])
        params = StrategyParams(w_food=1.0, w_dist=0.01, temperature=0.0)
        action = decide_action(view, AgentMemory(), params, random.Random(0))
        assert action == Action.UP

    def test_uniform_targets_under_zero_weights(self):
        # all weights 0, temperature 1: every cell equally likely, so each
        # direction shows up ~25% of the time from a centered observer
        view = make_view(pos=(10, 10), width=21, height=21)
        params = StrategyParams(temperature=1.0)
        rng = random.Random(123)
        counts = Counter(
            decide_action(view, AgentMemory(), params, rng)
            for _ in range(10_000)
        )
        for direction in (Action.UP, Action.DOWN, Action.LEFT, Action.RIGHT):
            assert counts[direction] / 10_000 == pytest.approx(0.25, abs=0.02)
        assert counts[Action.STAY] / 10_000 < 0.01  # only the exact center

    def test_deterministic_given_seed(self):
        view = make_view(food=[(3, 3, 2), (15, 9, 1)])
        params = StrategyParams(w_food=1.0, w_dist=0.1, temperature=0.7)
        a = [decide_action(view, AgentMemory(), params, random.Random(42))
             for _ in range(10)]
        b = [decide_action(view, AgentMemory(), params, random.Random(42))
             for _ in range(10)]
        assert a == b

    def test_ignores_hidden_foragers(self):
        # with only self visible, moving the others cannot matter
        params = StrategyParams(w_soc=1.0, w_succ=1.0, temperature=0.0,
                                w_dist=0.1)
        base = make_view(pos=(5, 5))
        assert len(base.foragers) == 1
        a = decide_action(base, AgentMemory(), params, random.Random(9))
        b = decide_action(make_view(pos=(5, 5)), AgentMemory(), params,
                          random.Random(9))
        assert a == b

    def test_temperature_zero_picks_max_cell(self):
        view = make_view(pos=(0, 0), food=[(4, 0, 9), (2, 0, 1)])
        params = StrategyParams(w_food=1.0, temperature=0.0)
        mem = AgentMemory()
        decide_action(view, mem, params, random.Random(1))
        assert mem.last_target == (4, 0)


class TestPickTarget:
    def test_shift_invariance(self):
        rng_util = np.random.default_rng(5)
        util = rng_util.integers(0, 10, size=48).astype(float)
        params = StrategyParams(temperature=0.8)
        picks_a = [_pick_target(util, params, random.Random(s), 8)
                   for s in range(200)]
        picks_b = [_pick_target(util + 7.0, params, random.Random(s), 8)
                   for s in range(200)]
        assert picks_a == picks_b

    def test_argmax_tie_break_is_seeded(self):
        util = np.zeros(16)
        util[3] = util[11] = 5.0
        params = StrategyParams(temperature=0.0)
        picks = {_pick_target(util, params, random.Random(s), 4)
                 for s in range(40)}
        assert picks == {(0, 3), (2, 3)}


class TestPresets:
    def test_random_preset(self):
        p = preset("random")
        assert (p.w_food, p.w_hist, p.w_soc, p.w_succ, p.w_dist) == (0,) * 5
        assert p.temperature == 1.0

    def test_food_greedy(self):
        p = preset("food_greedy")
        assert p.w_food == 1.0 and p.w_dist == 0.1

    def test_private(self):
        p = preset("private")
        assert p.w_hist == 1.0 and p.w_dist == 0.1

    def test_social_extends_private(self):
        p = preset("social")
        assert p.w_hist == 1.0 and p.w_soc == 0.5 and p.w_dist == 0.1

    def test_scrounger(self):
        p = preset("scrounger")
        assert p.w_succ == 1.0 and p.w_dist == 0.1

    def test_unknown_name(self):
        with pytest.raises(ValueError):
            preset("greedy_bandit")


class TestParamValidation:
    def test_negative_temperature_rejected(self):
        with pytest.raises(ValueError):
            StrategyParams(temperature=-0.1)

    def test_decay_bounds(self):
        with pytest.raises(ValueError):
            StrategyParams(history_decay=0.0)
        with pytest.raises(ValueError):
            StrategyParams(history_decay=1.5)

    def test_non_finite_weight_rejected(self):
        with pytest.raises(ValueError):
            StrategyParams(w_food=float("nan"))
