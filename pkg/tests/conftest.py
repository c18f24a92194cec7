import pytest

from forageworld import Condition, SimConfig

ALL_VISIBLE = Condition(True, True, False)


def small_cfg(**overrides) -> SimConfig:
    """A fast little world for unit tests; per-test overrides welcome."""
    base = dict(
        condition=ALL_VISIBLE,
        n_foragers=4,
        seed=1,
        world_width=30,
        world_height=30,
        game_seconds=30.0,
        switch_time_choices=(20.0,),
        pool_radius=3.0,
        min_pool_distance=12.0,
        membership_radius=5.0,
    )
    base.update(overrides)
    return SimConfig(**base)


@pytest.fixture
def cfg() -> SimConfig:
    return small_cfg()
