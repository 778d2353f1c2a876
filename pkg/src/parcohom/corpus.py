"""Named example partial actions used by the CLI and the test-suite."""

from __future__ import annotations

from .field_linalg import QQ, Field, parse_field
from .finite_group import GroupTable, build_group, cyclic, direct_product, symmetric
from .partial_action import (
    PartialActionSpec,
    _make_spec,
    coset_action,
    global_action,
    regular_action,
    restrict_global,
    trivial_partial,
)

__all__ = ["EXAMPLES", "example", "example_names", "two_orbit_example", "swap_action"]


def swap_action(field: Field) -> PartialActionSpec:
    """Z/2 swapping the two factors of K x K."""
    return global_action(cyclic(2), field, [1, 1], [[0, 1], [1, 0]], label="swap(Z/2)")


def two_orbit_example(field: Field = QQ) -> PartialActionSpec:
    """Z/2 on K x K[x]/x^2 x K[x]/x^2: block 0 is fixed-point free, blocks 1 and 2 are swapped.

    The swap is x -> 2x one way and x -> x/2 back, so the action is not
    trivial on the nilpotent part.
    """
    G = cyclic(2)
    c = field.scalar(2)
    if c == 0:  # characteristic 2: fall back to the untwisted swap
        c = field.scalar(1)
    there = field.array([[1, 0], [0, c]])
    back = field.array([[1, 0], [0, field.inverse(c)]])
    eye1, eye2 = field.eye(1), field.eye(2)
    maps = [
        {0: (0, eye1), 1: (1, eye2), 2: (2, eye2)},
        {1: (2, there), 2: (1, back)},
    ]
    domains = [[0, 1, 2], [1, 2]]
    return _make_spec(G, field, [1, 2, 2], domains, maps, "two-orbit(Z/2)")


def _character_z3(field: Field) -> PartialActionSpec:
    """Z/3 acting on K[x]/x^2 by x -> 2^g x (2 has order 3 mod 7)."""
    return coset_action(cyclic(3), (0,), field, dim=2, character=lambda g: 2**g, label="chi(Z/3)")


def _builders():
    return {
        "z2-zero": lambda F: trivial_partial(cyclic(2), F, label="Z/2, D_g = 0"),
        "z2-trivial": lambda F: global_action(cyclic(2), F, [1], [[0], [0]], label="Z/2 trivial"),
        "z2-swap": swap_action,
        "z2-regular-1": lambda F: restrict_global(regular_action(cyclic(2), F), [0], label="Z/2 regular | 1 block"),
        "z3-regular-1": lambda F: restrict_global(regular_action(cyclic(3), F), [0], label="Z/3 regular | 1 block"),
        "z3-regular-2": lambda F: restrict_global(regular_action(cyclic(3), F), [0, 1], label="Z/3 regular | 2 blocks"),
        "z3-character": _character_z3,
        "z4-regular-2": lambda F: restrict_global(regular_action(cyclic(4), F), [0, 1], label="Z/4 regular | 2 blocks"),
        "v4-regular-2": lambda F: restrict_global(
            regular_action(direct_product(cyclic(2), cyclic(2)), F), [0, 1], label="Z/2xZ/2 regular | 2 blocks"
        ),
        "s3-cosets-2": lambda F: restrict_global(
            coset_action(symmetric(3), _s3_order_two(), F), [0, 1], label="S_3 on cosets | 2 blocks"
        ),
        "two-orbit": two_orbit_example,
    }


def _s3_order_two() -> tuple[int, ...]:
    G = symmetric(3)
    x = next(g for g in G.elements if g != 0 and G.mul[g, g] == 0)
    return (0, x)


EXAMPLES = tuple(sorted(_builders()))


def example_names() -> tuple[str, ...]:
    return EXAMPLES


def example(name: str, field="QQ") -> PartialActionSpec:
    """Build a named example over ``field`` (a Field or a string such as "GF(3)")."""
    builders = _builders()
    if name not in builders:
        raise KeyError(f"unknown example {name!r}; choose from {', '.join(EXAMPLES)}")
    F = field if isinstance(field, Field) else parse_field(field)
    return builders[name](F)


def group_from_name(text: str) -> GroupTable:
    return build_group(text)

