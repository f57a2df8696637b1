"""Shared test machinery: named example networks, the frozen composition
row data, and builders for random identifiable components of a given
shape class and stress index."""

from __future__ import annotations

import random
from fractions import Fraction

from sdident import (
    ConstitutiveEq,
    Element,
    Leaf,
    NetworkExpr,
    Parallel,
    Series,
    constitutive,
    flatten,
    params,
)

# classic textbook models and the two larger literature networks
MAXWELL = "E1 & n1"
VOIGT = "E1 | n1"
BURGERS = "(Ev | nv) & Em & nm"
GEN_KELVIN_VOIGT = "E0 & (E1|n1) & (E2|n2) & (E3|n3)"
# eight-element ladder: alternating series/parallel growth, one element at a time
LADDER_8 = "((((((E1|n1) & E2) & n2) | n3) & E3) | n4) & E4"
# ten-element network assembled from five two-element series branches
BRANCHED_10 = "(((E1&n1)|(E2&n2)) & E3 & n3 | (E4&n4)) & E5 & n5"

ALL_EXAMPLES = [MAXWELL, VOIGT, BURGERS, GEN_KELVIN_VOIGT, LADDER_8, BRANCHED_10]


# Expected outcome of combining two identifiable components, keyed by the
# unordered class pair.  Shapes and counts are functions of the component
# stress indices n1, n2; "identifiable" says whether parameter and
# coefficient counts still balance; "result" is the shape class of the
# combined equation.
SERIES_ROWS = {
    ("A", "A"): dict(eps=lambda a, b: (a + b, 0), sig=lambda a, b: (a + b, 0),
                     nonmonic=lambda a, b: 2 * a + 2 * b + 1, params=lambda a, b: 2 * a + 2 * b + 2,
                     identifiable=False, result="A"),
    ("A", "B"): dict(eps=lambda a, b: (a + b + 1, 1), sig=lambda a, b: (a + b + 1, 0),
                     nonmonic=lambda a, b: 2 * a + 2 * b + 2, params=lambda a, b: 2 * a + 2 * b + 2,
                     identifiable=True, result="D"),
    ("A", "C"): dict(eps=lambda a, b: (a + b + 1, 0), sig=lambda a, b: (a + b + 1, 0),
                     nonmonic=lambda a, b: 2 * a + 2 * b + 3, params=lambda a, b: 2 * a + 2 * b + 3,
                     identifiable=True, result="A"),
    ("A", "D"): dict(eps=lambda a, b: (a + b, 1), sig=lambda a, b: (a + b, 0),
                     nonmonic=lambda a, b: 2 * a + 2 * b, params=lambda a, b: 2 * a + 2 * b + 1,
                     identifiable=False, result="D"),
    ("B", "B"): dict(eps=lambda a, b: (a + b + 1, 1), sig=lambda a, b: (a + b, 0),
                     nonmonic=lambda a, b: 2 * a + 2 * b + 1, params=lambda a, b: 2 * a + 2 * b + 2,
                     identifiable=False, result="B"),
    ("B", "C"): dict(eps=lambda a, b: (a + b + 2, 1), sig=lambda a, b: (a + b + 1, 0),
                     nonmonic=lambda a, b: 2 * a + 2 * b + 3, params=lambda a, b: 2 * a + 2 * b + 3,
                     identifiable=True, result="B"),
    ("B", "D"): dict(eps=lambda a, b: (a + b, 1), sig=lambda a, b: (a + b, 0),
                     nonmonic=lambda a, b: 2 * a + 2 * b, params=lambda a, b: 2 * a + 2 * b + 1,
                     identifiable=False, result="D"),
    ("C", "C"): dict(eps=lambda a, b: (a + b + 2, 0), sig=lambda a, b: (a + b + 1, 0),
                     nonmonic=lambda a, b: 2 * a + 2 * b + 4, params=lambda a, b: 2 * a + 2 * b + 4,
                     identifiable=True, result="C"),
    ("C", "D"): dict(eps=lambda a, b: (a + b + 1, 1), sig=lambda a, b: (a + b + 1, 0),
                     nonmonic=lambda a, b: 2 * a + 2 * b + 2, params=lambda a, b: 2 * a + 2 * b + 2,
                     identifiable=True, result="D"),
    ("D", "D"): dict(eps=lambda a, b: (a + b - 1, 1), sig=lambda a, b: (a + b - 1, 0),
                     nonmonic=lambda a, b: 2 * a + 2 * b - 2, params=lambda a, b: 2 * a + 2 * b,
                     identifiable=False, result="D"),
}

PARALLEL_ROWS = {
    ("A", "A"): dict(eps=lambda a, b: (a + b, 0), sig=lambda a, b: (a + b, 0),
                     nonmonic=lambda a, b: 2 * a + 2 * b + 1, params=lambda a, b: 2 * a + 2 * b + 2,
                     identifiable=False, result="A"),
    ("A", "B"): dict(eps=lambda a, b: (a + b + 1, 0), sig=lambda a, b: (a + b, 0),
                     nonmonic=lambda a, b: 2 * a + 2 * b + 2, params=lambda a, b: 2 * a + 2 * b + 2,
                     identifiable=True, result="C"),
    ("A", "C"): dict(eps=lambda a, b: (a + b + 1, 0), sig=lambda a, b: (a + b, 0),
                     nonmonic=lambda a, b: 2 * a + 2 * b + 2, params=lambda a, b: 2 * a + 2 * b + 3,
                     identifiable=False, result="C"),
    ("A", "D"): dict(eps=lambda a, b: (a + b, 0), sig=lambda a, b: (a + b, 0),
                     nonmonic=lambda a, b: 2 * a + 2 * b + 1, params=lambda a, b: 2 * a + 2 * b + 1,
                     identifiable=True, result="A"),
    ("B", "B"): dict(eps=lambda a, b: (a + b + 1, 1), sig=lambda a, b: (a + b, 0),
                     nonmonic=lambda a, b: 2 * a + 2 * b + 1, params=lambda a, b: 2 * a + 2 * b + 2,
                     identifiable=False, result="B"),
    ("B", "C"): dict(eps=lambda a, b: (a + b + 1, 0), sig=lambda a, b: (a + b, 0),
                     nonmonic=lambda a, b: 2 * a + 2 * b + 2, params=lambda a, b: 2 * a + 2 * b + 3,
                     identifiable=False, result="C"),
    ("B", "D"): dict(eps=lambda a, b: (a + b + 1, 1), sig=lambda a, b: (a + b, 0),
                     nonmonic=lambda a, b: 2 * a + 2 * b + 1, params=lambda a, b: 2 * a + 2 * b + 1,
                     identifiable=True, result="B"),
    ("C", "C"): dict(eps=lambda a, b: (a + b + 1, 0), sig=lambda a, b: (a + b, 0),
                     nonmonic=lambda a, b: 2 * a + 2 * b + 2, params=lambda a, b: 2 * a + 2 * b + 4,
                     identifiable=False, result="C"),
    ("C", "D"): dict(eps=lambda a, b: (a + b + 1, 0), sig=lambda a, b: (a + b, 0),
                     nonmonic=lambda a, b: 2 * a + 2 * b + 2, params=lambda a, b: 2 * a + 2 * b + 2,
                     identifiable=True, result="C"),
    ("D", "D"): dict(eps=lambda a, b: (a + b, 1), sig=lambda a, b: (a + b, 0),
                     nonmonic=lambda a, b: 2 * a + 2 * b, params=lambda a, b: 2 * a + 2 * b,
                     identifiable=True, result="D"),
}


def typed_network(letter: str, n: int, rng: random.Random) -> NetworkExpr:
    """Random identifiable network of the given shape class and index.

    Built by inverting the composition tables: each class/index pair is
    produced from smaller identifiable pieces through a randomly chosen
    table row that yields it.
    """
    counter = [0]

    def leaf(kind: str) -> Leaf:
        counter[0] += 1
        name = f"E{counter[0]}" if kind == "spring" else f"n{counter[0]}"
        return Leaf(Element(kind, name))

    def node(conn: str, a: NetworkExpr, b: NetworkExpr) -> NetworkExpr:
        if rng.random() < 0.5:
            a, b = b, a
        raw = Series((a, b)) if conn == "s" else Parallel((a, b))
        return flatten(raw)

    def build(t: str, k: int) -> NetworkExpr:
        prods: list[tuple] = []
        if t == "A":
            if k == 0:
                prods.append(("leaf", "spring"))
            for i in range(k):
                prods.append(("s", ("A", i), ("C", k - 1 - i)))
            for i in range(1, k + 1):
                prods.append(("p", ("A", k - i), ("D", i)))
        elif t == "B":
            if k == 0:
                prods.append(("leaf", "dashpot"))
            for i in range(k):
                prods.append(("s", ("B", i), ("C", k - 1 - i)))
            for i in range(1, k + 1):
                prods.append(("p", ("B", k - i), ("D", i)))
        elif t == "C":
            for i in range(k + 1):
                prods.append(("p", ("A", i), ("B", k - i)))
            for i in range(k):
                prods.append(("s", ("C", i), ("C", k - 1 - i)))
            for i in range(1, k + 1):
                prods.append(("p", ("C", k - i), ("D", i)))
        elif t == "D":
            assert k >= 1, "class D needs index >= 1"
            for i in range(k):
                prods.append(("s", ("A", i), ("B", k - 1 - i)))
            for i in range(1, k):
                prods.append(("s", ("C", k - 1 - i), ("D", i)))
            for i in range(1, k):
                prods.append(("p", ("D", k - i), ("D", i)))
        else:
            raise ValueError(f"unknown class {t!r}")
        choice = rng.choice(prods)
        if choice[0] == "leaf":
            return leaf(choice[1])
        conn, (t1, k1), (t2, k2) = choice
        return node(conn, build(t1, k1), build(t2, k2))

    return build(letter, n)


def valid_indices(letter: str, top: int = 3) -> list[int]:
    return list(range(1, top + 1)) if letter == "D" else list(range(0, top + 1))


def embedded_pair(n1: NetworkExpr, n2: NetworkExpr) -> tuple[ConstitutiveEq, ConstitutiveEq]:
    """Constitutive equations of two networks in their joint parameter space."""
    p1, p2 = len(params(n1)), len(params(n2))
    total = p1 + p2
    eq1 = constitutive(n1).embed(total, list(range(p1)))
    eq2 = constitutive(n2).embed(total, list(range(p1, total)))
    return eq1, eq2


def child_equations(expr: NetworkExpr) -> list[ConstitutiveEq]:
    """Each child's equation embedded into the whole network's space."""
    total = len(params(expr))
    out = []
    cursor = 0
    for child in expr.children:
        width = len(params(child))
        out.append(constitutive(child).embed(total, list(range(cursor, cursor + width))))
        cursor += width
    return out


def poly_from_roots(roots: list[Fraction], lead: Fraction = Fraction(1)) -> list[Fraction]:
    """Ascending coefficients of lead * prod (x - r)."""
    coeffs = [lead]
    for r in roots:
        nxt = [Fraction(0)] * (len(coeffs) + 1)
        for i, c in enumerate(coeffs):
            nxt[i] -= c * r
            nxt[i + 1] += c
        coeffs = nxt
    return coeffs
