"""Exhaustive checks over every series-parallel network with up to four
elements (all shapes, all spring/dashpot assignments): the counting,
table, and Jacobian-rank routes must agree everywhere, and every derived
equation must land in a shape class consistent with the tables."""

import itertools
from fractions import Fraction as F

from sdident import (
    DASHPOT,
    SPRING,
    Element,
    Leaf,
    NetType,
    Parallel,
    Series,
    classify,
    constitutive,
    jacobian_rank,
    nonmonic_count,
    params,
    predicted_shapes,
    sample_point,
    type_of,
)


def _compositions(n):
    if n == 0:
        yield ()
        return
    for first in range(1, n + 1):
        for rest in _compositions(n - first):
            yield (first,) + rest


def _structures(n, banned_root=None):
    """All flattened tree shapes over n leaves (leaf kinds unassigned)."""
    if n == 1:
        yield "leaf"
        return
    for root in ("S", "P"):
        if root == banned_root:
            continue
        for comp in _compositions(n):
            if len(comp) < 2:
                continue
            child_options = [list(_structures(k, root)) for k in comp]
            for choice in itertools.product(*child_options):
                yield (root, choice)


def _materialize(structure, kinds, cursor):
    if structure == "leaf":
        kind = kinds[cursor[0]]
        cursor[0] += 1
        name = f"{'E' if kind == SPRING else 'n'}{cursor[0]}"
        return Leaf(Element(kind, name))
    root, children = structure
    node = Series if root == "S" else Parallel
    return node(tuple(_materialize(c, kinds, cursor) for c in children))


def _leaf_total(structure):
    if structure == "leaf":
        return 1
    return sum(_leaf_total(c) for c in structure[1])


def all_networks(max_elements):
    for n in range(1, max_elements + 1):
        for structure in _structures(n):
            for kinds in itertools.product((SPRING, DASHPOT), repeat=n):
                yield _materialize(structure, list(kinds), [0])


def test_every_network_up_to_four_elements():
    seen = 0
    for expr in all_networks(4):
        n = len(params(expr))
        table_says = type_of(expr) != NetType.U
        eq = constitutive(expr)
        counting_says = n == nonmonic_count(eq)
        rank = jacobian_rank(expr, sample_point(n, seed=seen))
        assert table_says == counting_says == (rank == n), expr

        shape_class, index = classify(eq)
        eps, sig = predicted_shapes(shape_class, index)
        assert eq.eps.shape == eps
        assert eq.sig.shape == sig
        seen += 1
    assert seen == 410  # 2 + 8 + 48 + 352 networks of sizes 1..4


def test_structure_counts():
    # flattened series-parallel shapes per leaf count: 1, 2, 6, 22
    for n, expected in ((1, 1), (2, 2), (3, 6), (4, 22)):
        shapes = list(_structures(n))
        assert len(shapes) == expected
        assert all(_leaf_total(s) == n for s in shapes)
