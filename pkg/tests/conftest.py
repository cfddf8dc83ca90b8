import random

import pytest

from cdm import Model, fixtures
from cdm.errors import CDMError


def random_model(rng: random.Random, *, max_things: int = 12, max_edges: int = 20, steps: int = 40) -> Model:
    """Apply a random sequence of valid mutations (plus rejected attempts).

    Invalid attempts are included on purpose: they must raise and leave the
    model untouched, which the caller can check through the log length.
    """
    model = Model()
    labels = 0
    for _ in range(rng.randint(0, steps)):
        alive = [t.id for t in model.alive_things()]
        pairs = sorted(model.alive_pairs())
        roll = rng.random()
        before = len(model.records)
        try:
            if roll < 0.3 and len(alive) < max_things:
                labels += 1
                model.create_thing(f"t{labels}")
            elif roll < 0.7 and len(alive) >= 2 and len(pairs) < max_edges:
                model.associate(*rng.sample(alive, 2))
            elif roll < 0.8 and pairs:
                model.remove_association(*rng.choice(pairs))
            elif roll < 0.85 and alive:
                model.remove_thing(rng.choice(alive))
            elif roll < 0.9 and alive:
                model.associate(alive[0], alive[0])  # always rejected
            elif alive:
                model.create_thing(model.thing(rng.choice(alive)).label)  # always rejected
        except CDMError:
            assert len(model.records) == before
    return model


def dense_model(rng: random.Random, *, max_things: int = 12, max_edges: int = 20) -> Model:
    """A model with a random number of things and up to ``max_edges`` edges."""
    model = Model()
    n = rng.randint(2, max_things)
    ids = [model.create_thing(f"v{i}") for i in range(n)]
    possible = [(a, b) for a in ids for b in ids if a != b]
    for pair in rng.sample(possible, min(len(possible), rng.randint(0, max_edges))):
        model.associate(*pair)
    return model


def ids(model: Model, *labels: str):
    return {model.lookup(label) for label in labels}


@pytest.fixture
def fig1():
    return fixtures.fig1()


@pytest.fixture
def fig2():
    return fixtures.fig2()


@pytest.fixture
def lid():
    """Label -> id lookup that fails loudly on a missing label."""

    def lookup(model, label):
        thing_id = model.lookup(label)
        assert thing_id is not None, label
        return thing_id

    return lookup
