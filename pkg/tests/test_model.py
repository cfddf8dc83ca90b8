import random
import threading

import pytest
from hypothesis import given, settings, strategies as st

from cdm import Model, fixtures
from cdm.errors import (
    ConcurrentMutation,
    DuplicateAssociation,
    DuplicateLabel,
    EmptyLabel,
    FrozenSnapshot,
    NoSuchAssociation,
    SelfAssociation,
    StrictTreeViolation,
    UnknownThing,
)
from cdm.model import AssociateRecord, CreateRecord

from conftest import random_model


def test_create_first_thing():
    model = Model()
    assert model.current_tick() == 0
    chair = model.create_thing("Chair")
    assert chair == 1
    assert model.thing(chair).created_at == 0
    assert model.current_tick() == 1


def test_duplicate_and_empty_labels():
    model = Model()
    model.create_thing("Chair")
    with pytest.raises(DuplicateLabel):
        model.create_thing("Chair")
    with pytest.raises(EmptyLabel):
        model.create_thing("   ")
    with pytest.raises(EmptyLabel):
        model.create_thing("")
    # case-sensitive
    model.create_thing("chair")


def test_associate_fig1_ticks(fig1, lid):
    events = fig1.events
    assert [e.tick for e in events] == [2, 4, 6]
    first = events[0]
    assert (first.member, first.owner) == (lid(fig1, "Chair"), lid(fig1, "Furniture"))
    assert fig1.current_tick() == 7


def test_associate_errors(fig1, lid):
    chair, furniture = lid(fig1, "Chair"), lid(fig1, "Furniture")
    with pytest.raises(SelfAssociation):
        fig1.associate(chair, chair)
    with pytest.raises(UnknownThing):
        fig1.associate(chair, 99)
    with pytest.raises(DuplicateAssociation):
        fig1.associate(chair, furniture)
    assert fig1.current_tick() == 7
    # the reverse pair is a separate association
    event = fig1.associate(furniture, chair)
    assert event.tick == 7 and event.member == furniture


def test_remove_association(fig1, lid):
    chair, furniture = lid(fig1, "Chair"), lid(fig1, "Furniture")
    assert fig1.remove_association(chair, furniture) == 7
    assert fig1.owners(chair) == {lid(fig1, "Made of wood")}
    with pytest.raises(NoSuchAssociation):
        fig1.remove_association(chair, furniture)
    with pytest.raises(NoSuchAssociation):
        fig1.remove_association(furniture, chair)
    # re-association after a tombstone is allowed
    assert fig1.associate(chair, furniture).tick == 8


def test_remove_thing_cascades(fig1, lid):
    furniture = lid(fig1, "Furniture")
    chair, wood = lid(fig1, "Chair"), lid(fig1, "Made of wood")
    assert fig1.remove_thing(furniture) == 2
    assert fig1.alive_pairs() == {(chair, wood)}
    # cascaded tombstones in ascending original-tick order, then the thing
    tail = [type(r).code for r in fig1.records[-3:]]
    assert tail == ["RA", "RA", "RT"]
    assert [(r.member, r.owner) for r in fig1.records[-3:-1]] == [(1, 2), (4, 2)]
    assert not fig1.thing(furniture).alive
    with pytest.raises(UnknownThing):
        fig1.remove_thing(furniture)
    with pytest.raises(UnknownThing):
        fig1.remove_thing(99)


def test_removed_label_can_be_recreated(fig1, lid):
    table = lid(fig1, "Table")
    fig1.remove_thing(table)
    new = fig1.create_thing("Table")
    assert new != table and new == 5


def test_remove_isolated_thing():
    model = Model()
    thing = model.create_thing("alone")
    assert model.remove_thing(thing) == 0


def test_state_hash_empty_is_pinned():
    # BLAKE2b, 8-byte digest, over zero bytes
    assert Model().state_hash() == "e4a6a0577479b2b4"


def test_state_hash_deterministic():
    assert fixtures.fig1().state_hash() == fixtures.fig1().state_hash()
    assert fixtures.fig1().state_hash() != fixtures.fig2().state_hash()
    assert len(fixtures.fig2().state_hash()) == 16


def test_snapshot_is_frozen_and_isolated(fig1, lid):
    snap = fig1.snapshot()
    fig1.create_thing("Sofa")
    assert snap.lookup("Sofa") is None
    with pytest.raises(FrozenSnapshot):
        snap.create_thing("Bed")
    assert snap == fixtures.fig1()


def test_concurrent_mutation_rejected():
    model = Model()
    release = threading.Event()
    entered = threading.Event()
    original = model.apply

    def slow_apply(record):
        entered.set()
        release.wait(5)
        original(record)

    model.apply = slow_apply
    worker = threading.Thread(target=model.create_thing, args=("A",))
    worker.start()
    entered.wait(5)
    with pytest.raises(ConcurrentMutation):
        model.create_thing("B")
    release.set()
    worker.join()
    assert [t.label for t in model.alive_things()] == ["A"]


def test_strict_tree_rejects_cycles():
    model = Model(strict_tree=True)
    a, b, c = (model.create_thing(x) for x in "abc")
    model.associate(a, b)
    model.associate(b, c)
    with pytest.raises(StrictTreeViolation):
        model.associate(c, a)
    with pytest.raises(StrictTreeViolation):
        model.associate(b, a)
    assert len(model.alive_pairs()) == 2


def test_apply_is_atomic():
    model = Model()
    model.apply(CreateRecord(0, 1, "x"))
    with pytest.raises(SelfAssociation):
        model.apply(AssociateRecord(1, 1, 1))
    assert len(model.records) == 1 and model.clock == 1


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 2**32))
def test_tick_uniqueness_and_arity(seed):
    model = random_model(random.Random(seed))
    ticks = [r.tick for r in model.records]
    assert all(a < b for a, b in zip(ticks, ticks[1:]))
    assert model.clock == (ticks[-1] + 1 if ticks else 0)
    for event in model.events:
        assert event.member != event.owner


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 2**32), st.data())
def test_locality_of_mutation(seed, data):
    model = random_model(random.Random(seed))
    alive = [t.id for t in model.alive_things()]
    if len(alive) < 2:
        return
    before = {(e.tick, e.pair) for e in model.alive_events()}
    action = data.draw(st.sampled_from(["assoc", "drop_assoc", "drop_thing"]))
    a, b = data.draw(st.permutations(alive))[:2]
    try:
        if action == "assoc":
            model.associate(a, b)
        elif action == "drop_assoc":
            model.remove_association(a, b)
        else:
            model.remove_thing(a)
    except Exception:
        return
    after = {(e.tick, e.pair) for e in model.alive_events()}
    touched = {a, b} if action != "drop_thing" else {a}
    for _, pair in before ^ after:
        assert set(pair) & touched
