"""The two furniture scenarios used throughout the tests and docs.

``fig1`` is the minimal model: Chair and Table are Furniture, Chair is Made of
wood. ``fig2`` extends it with household items, appliances, materials and
colours. In ``fig2`` the attribute names ("Made of", "Colour") are things of
their own, owned by the attribute values (Wood, Steel, Brown).
"""
from __future__ import annotations

from .model import Model

FIG1_EDGES = [
    ("Chair", "Furniture"),
    ("Chair", "Made of wood"),
    ("Table", "Furniture"),
]

FIG2_EDGES = [
    ("Chair", "Furniture"),
    ("Table", "Furniture"),
    ("Furniture", "HouseHoldItem"),
    ("Toaster", "Appliance"),
    ("Appliance", "HouseHoldItem"),
    ("Chair", "Wood"),
    ("Wood", "Made of"),
    ("Table", "Steel"),
    ("Steel", "Made of"),
    ("Chair", "Brown"),
    ("Table", "Brown"),
    ("Brown", "Colour"),
]


def build(edges) -> Model:
    """Create things lazily, just before their first association."""
    model = Model()
    for member, owner in edges:
        ids = []
        for label in (member, owner):
            thing_id = model.lookup(label)
            if thing_id is None:
                thing_id = model.create_thing(label)
            ids.append(thing_id)
        model.associate(*ids)
    return model


def fig1() -> Model:
    return build(FIG1_EDGES)


def fig2() -> Model:
    return build(FIG2_EDGES)
