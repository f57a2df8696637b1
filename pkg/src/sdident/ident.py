"""Identifiability verdicts and the shape-factorization linear algebra.

Local identifiability of a network is a counting criterion: the number
of parameters must equal the number of non-monic coefficients of its
constitutive equation.  The type algebra of ``nettypes`` decides the
same question by table lookup; ``analyze`` computes both routes and
insists they agree.

Global identifiability adds a structural criterion: the network must be
buildable by attaching one basic element (spring or dashpot) at a time
at the bounding nodes.  On the flattened tree this is exactly "every
internal node has at most one internal child".

The linear-algebra layer answers why the counting criterion works: when
a composition step is written as f = L1*L3, g = L1*L4 + L2*L3, the
unknown pair (L4, L2) solves a banded linear system whose matrix is
square precisely when parameters and non-monic coefficients balance,
and a square such matrix is generically invertible because it hides a
Sylvester matrix of L1 and L3 between two triangular blocks.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Sequence

from .network import Leaf, NetworkExpr, params
from .nettypes import NetType, TraceStep, classify, type_trace
from .opalg import ConstitutiveEq, InvariantViolation, Rat, Shape, constitutive

Quadruple = tuple[Shape, Shape, Shape, Shape]


class GlobalStatus(str, Enum):
    GLOBAL = "global"
    LOCAL_ONLY = "local-only"
    UNIDENTIFIABLE = "unidentifiable"

    def __str__(self) -> str:
        return self.value


@dataclass(frozen=True)
class Verdict:
    locally_identifiable: bool
    global_status: GlobalStatus
    param_count: int
    nonmonic_count: int
    net_type: NetType
    index: int  # highest stress order n of the derived equation
    constructible: bool
    trace: tuple[TraceStep, ...]


def nonmonic_count(eq: ConstitutiveEq) -> int:
    """Coefficient slots of the normalized equation minus the single pivot."""
    if eq.sig.low != 0:
        raise InvariantViolation("stress operator without constant term")
    n_eps, m_eps = eq.eps.shape
    n_sig = eq.sig.high
    return (n_eps - m_eps + 1) + (n_sig + 1) - 1


def constructible_one_at_a_time(expr: NetworkExpr) -> bool:
    """True when the network can be built by adding one element per step.

    On the flattened tree: at most one child of every internal node is
    itself internal, recursively.  Attaching a two-element branch whose
    connective matches the parent merges into the parent on flattening,
    so this check subsumes adding series dashpot-spring pairs and
    parallel spring-dashpot pairs one element at a time.
    """
    if isinstance(expr, Leaf):
        return True
    internal = [c for c in expr.children if not isinstance(c, Leaf)]
    if len(internal) > 1:
        return False
    return all(constructible_one_at_a_time(c) for c in internal)


def analyze(expr: NetworkExpr) -> Verdict:
    """Full verdict: both local routes (count and table), plus global."""
    n_params = len(params(expr))
    eq = constitutive(expr)
    n_coeffs = nonmonic_count(eq)
    net_type, trace = type_trace(expr)
    _, index = classify(eq)
    local = n_params == n_coeffs
    if local != (net_type is not NetType.U):
        raise InvariantViolation(
            f"counting criterion ({n_params} params, {n_coeffs} coefficients) "
            f"disagrees with table type {net_type}"
        )
    constructible = constructible_one_at_a_time(expr)
    if not local:
        status = GlobalStatus.UNIDENTIFIABLE
    elif constructible:
        status = GlobalStatus.GLOBAL
    else:
        status = GlobalStatus.LOCAL_ONLY
    return Verdict(
        locally_identifiable=local,
        global_status=status,
        param_count=n_params,
        nonmonic_count=n_coeffs,
        net_type=net_type,
        index=index,
        constructible=constructible,
        trace=trace,
    )


def local_identifiable(expr: NetworkExpr) -> Verdict:
    return analyze(expr)


def globally_identifiable(expr: NetworkExpr) -> Verdict:
    return analyze(expr)


# ---------------------------------------------------------------------------
# exact linear algebra over the rationals


def exact_det(matrix: Sequence[Sequence[Rat]]) -> Fraction:
    """Exact determinant by fraction-free (Bareiss) elimination."""
    n = len(matrix)
    if n == 0:
        return Fraction(1)
    if any(len(row) != n for row in matrix):
        raise ValueError("determinant of a non-square matrix")
    rows, scale = _integer_rows(matrix)
    sign = 1
    prev = 1
    for k in range(n - 1):
        if rows[k][k] == 0:
            for i in range(k + 1, n):
                if rows[i][k] != 0:
                    rows[k], rows[i] = rows[i], rows[k]
                    sign = -sign
                    break
            else:
                return Fraction(0)
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                rows[i][j] = (rows[i][j] * rows[k][k] - rows[i][k] * rows[k][j]) // prev
            rows[i][k] = 0
        prev = rows[k][k]
    return Fraction(sign * rows[n - 1][n - 1], scale)


def exact_rank(matrix: Sequence[Sequence[Rat]]) -> int:
    """Exact rank by fraction-free elimination with column pivot search."""
    if not matrix:
        return 0
    rows, _ = _integer_rows(matrix)
    n_rows, n_cols = len(rows), len(rows[0])
    rank = 0
    prev = 1
    for col in range(n_cols):
        pivot_row = None
        for i in range(rank, n_rows):
            if rows[i][col] != 0:
                pivot_row = i
                break
        if pivot_row is None:
            continue
        rows[rank], rows[pivot_row] = rows[pivot_row], rows[rank]
        for i in range(rank + 1, n_rows):
            for j in range(col + 1, n_cols):
                rows[i][j] = (rows[i][j] * rows[rank][col] - rows[i][col] * rows[rank][j]) // prev
            rows[i][col] = 0
        prev = rows[rank][col]
        rank += 1
        if rank == n_rows:
            break
    return rank


def _integer_rows(matrix: Sequence[Sequence[Rat]]) -> tuple[list[list[int]], int]:
    """Scale each row to integers; returns rows and the product of scales."""
    out = []
    scale = 1
    for row in matrix:
        fracs = [Fraction(x) for x in row]
        mult = 1
        for f in fracs:
            mult = mult * f.denominator // _gcd(mult, f.denominator)
        out.append([int(f * mult) for f in fracs])
        scale *= mult
    return out, scale


def _gcd(a: int, b: int) -> int:
    while b:
        a, b = b, a % b
    return a


# ---------------------------------------------------------------------------
# Sylvester matrices and resultants

CoeffVec = Sequence[Rat]  # polynomial coefficients, constant term first


def sylvester(p: CoeffVec, q: CoeffVec) -> list[list[Fraction]]:
    """Sylvester matrix of two polynomials (ascending coefficient vectors).

    For deg p = m and deg q = n the matrix is (n+m) square: n shifted
    copies of p's coefficients as columns, then m shifted copies of q's.
    Degenerate degree-0 inputs give the smaller diagonal matrix whose
    determinant matches the convention res(p, c) = c**deg(p).
    """
    p = [Fraction(x) for x in p]
    q = [Fraction(x) for x in q]
    if not p or all(x == 0 for x in p) or not q or all(x == 0 for x in q):
        raise ValueError("sylvester matrix of a zero polynomial")
    if p[-1] == 0 or q[-1] == 0:
        raise ValueError("leading coefficient must be nonzero (trim the vector)")
    m, n = len(p) - 1, len(q) - 1
    size = m + n
    mat = [[Fraction(0)] * size for _ in range(size)]
    for col in range(n):  # p-block: rows col..col+m hold p_m..p_0
        for i in range(m + 1):
            mat[col + i][col] = p[m - i]
    for col in range(m):
        for i in range(n + 1):
            mat[col + i][n + col] = q[n - i]
    return mat


def resultant(p: CoeffVec, q: CoeffVec) -> Fraction:
    """Determinant of the Sylvester matrix; zero iff p and q share a root."""
    return exact_det(sylvester(p, q))


# ---------------------------------------------------------------------------
# the shape factorization problem


def factor_matrix(
    l1: CoeffVec,
    shape1: Shape,
    l3: CoeffVec,
    shape3: Shape,
    shape2: Shape,
    shape4: Shape,
) -> list[list[Fraction]]:
    """Coefficient matrix of the linear system for the unknown stress pair.

    Given numeric strain operators L1, L3 (tight ascending coefficient
    vectors for their shapes), the products L1*L4 + L2*L3 = g become a
    linear system in the unknown coefficients of L4 and L2.  Rows are
    monomial degrees from max(n1+n4, n2+n3) down to min(m1+m4, m2+m3);
    columns are the L4 unknowns (shifted copies of L1, highest first)
    followed by the L2 unknowns (shifted copies of L3).
    """
    n1, m1 = shape1
    n2, m2 = shape2
    n3, m3 = shape3
    n4, m4 = shape4
    if len(l1) != n1 - m1 + 1:
        raise ValueError(f"L1 vector length {len(l1)} does not fit shape {shape1}")
    if len(l3) != n3 - m3 + 1:
        raise ValueError(f"L3 vector length {len(l3)} does not fit shape {shape3}")
    l1 = [Fraction(x) for x in l1]
    l3 = [Fraction(x) for x in l3]

    def a(d: int) -> Fraction:
        return l1[d - m1] if m1 <= d <= n1 else Fraction(0)

    def c(d: int) -> Fraction:
        return l3[d - m3] if m3 <= d <= n3 else Fraction(0)

    top = max(n1 + n4, n2 + n3)
    bottom = min(m1 + m4, m2 + m3)
    degrees = range(top, bottom - 1, -1)
    columns = []
    for k in range(n4, m4 - 1, -1):
        columns.append([a(d - k) for d in degrees])
    for k in range(n2, m2 - 1, -1):
        columns.append([c(d - k) for d in degrees])
    return [[col[i] for col in columns] for i in range(top - bottom + 1)]


def factor_matrix_size(quad: Quadruple) -> tuple[int, int]:
    (n1, m1), (n2, m2), (n3, m3), (n4, m4) = quad
    rows = max(n1 + n4, n2 + n3) - min(m1 + m4, m2 + m3) + 1
    cols = (n2 - m2 + 1) + (n4 - m4 + 1)
    return rows, cols


def block_determinant(
    l1: CoeffVec, shape1: Shape, l3: CoeffVec, shape3: Shape, shape2: Shape, shape4: Shape
) -> Fraction:
    """Predicted |det| of the square factor matrix from its block form.

    Reordering columns turns the matrix into triangular blocks around a
    Sylvester matrix of the shifted L1, L3, so the determinant is, up to
    sign, (leading overhang)**e_top * (trailing overhang)**e_bot * res.
    """
    n1, m1 = shape1
    n2, m2 = shape2
    n3, m3 = shape3
    n4, m4 = shape4
    l1 = [Fraction(x) for x in l1]
    l3 = [Fraction(x) for x in l3]
    det = resultant(l1, l3)
    if n1 + n4 > n2 + n3:
        det *= l1[-1] ** (n1 + n4 - n2 - n3)
    elif n2 + n3 > n1 + n4:
        det *= l3[-1] ** (n2 + n3 - n1 - n4)
    if m1 + m4 < m2 + m3:
        det *= l1[0] ** (m2 + m3 - m1 - m4)
    elif m2 + m3 < m1 + m4:
        det *= l3[0] ** (m1 + m4 - m2 - m3)
    return abs(det)


def random_rational(rng: random.Random) -> Fraction:
    """Positive rational from the 1..10**6 grid scaled by 1/1000."""
    return Fraction(rng.randint(1, 10**6), 1000)


def random_operator_vector(shape: Shape, rng: random.Random, monic: bool = True) -> list[Fraction]:
    """Random tight coefficient vector for a shape (ascending orders)."""
    n, m = shape
    vec = [random_rational(rng) for _ in range(n - m + 1)]
    if monic:
        vec[-1] = Fraction(1)
    return vec


def good_quadruple(quad: Quadruple, samples: int = 3, seed: int = 0) -> bool:
    """Does the factorization problem for these shapes have finitely many
    solutions?  Non-square systems say no; square ones are probed with
    random exact instantiations of L1 and L3."""
    rows, cols = factor_matrix_size(quad)
    if rows != cols:
        return False
    shape1, shape2, shape3, shape4 = quad
    rng = random.Random(seed)
    for _ in range(max(1, samples)):
        l1 = random_operator_vector(shape1, rng)
        l3 = random_operator_vector(shape3, rng)
        mat = factor_matrix(l1, shape1, l3, shape3, shape2, shape4)
        if exact_det(mat) != 0:
            return True
    return False
