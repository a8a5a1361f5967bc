"""Shared fixtures and helpers for the test suite."""

from __future__ import annotations

import random
import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from blocksmith.planner import Repository
from blocksmith.world import Color, Position, World


@pytest.fixture
def world() -> World:
    return World()


@pytest.fixture
def repo() -> Repository:
    return Repository()


def random_world(rng: random.Random, dims=(7, 7, 7), attempts: int = 40) -> World:
    """A reachable world built by random placements that obey the support rule."""
    w = World(*dims)
    group = w.new_group()
    colors = list(Color)
    for _ in range(attempts):
        pos = Position(rng.randrange(dims[0]), rng.randrange(dims[1]),
                       rng.randrange(dims[2]))
        try:
            w.place_block(pos, rng.choice(colors), group)
        except Exception:
            continue
    return w
