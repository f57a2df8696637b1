"""Independent numeric verification of the symbolic verdicts.

Two oracles, deliberately separate from the table algebra:

* local identifiability is re-decided from the exact rank of the
  Jacobian of the coefficient map at random positive rational points
  (symbolic quotient-rule derivatives, exact evaluation, fraction-free
  elimination; a floating-point SVD path exists only as a cross-check);
* global identifiability is probed by enumerating the fiber of the
  coefficient map over a base point: permutations of structurally
  identical sibling branches, root exchanges between composition
  factors, and multistart damped Newton on c(theta) = c(base).
"""

from __future__ import annotations

import itertools
import math
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .ident import analyze, exact_rank, random_rational, resultant
from .network import Leaf, NetworkExpr, Series, params
from .opalg import (
    ConstitutiveEq,
    DiffOperator,
    ParamPoly,
    Rat,
    coefficient_map,
    constitutive,
)


class DegenerateSampleError(RuntimeError):
    """A sampled point hit a vanishing denominator; resample."""


@dataclass(frozen=True)
class ParamPoint:
    """Positive exact-rational parameter values in canonical order."""

    values: tuple[Fraction, ...]
    seed: int = 0

    def __post_init__(self):
        if any(v <= 0 for v in self.values):
            raise ValueError("parameter values must be strictly positive")

    def as_floats(self) -> np.ndarray:
        return np.array([float(v) for v in self.values])


def sample_point(n_params: int, seed: int = 0) -> ParamPoint:
    rng = random.Random(seed)
    return ParamPoint(tuple(random_rational(rng) for _ in range(n_params)), seed)


# ---------------------------------------------------------------------------
# exact Jacobian rank


def jacobian_matrix(expr: NetworkExpr, theta: Sequence[Rat]) -> list[list[Fraction]]:
    """Row-scaled exact Jacobian of the coefficient map at theta.

    Each row of d(num/den) is multiplied by den(theta)**2, which cannot
    vanish at positive theta and does not change the rank.
    """
    entries = coefficient_map(constitutive(expr))
    nv = len(theta)
    den = entries[0][1]
    den_value = den.evaluate(theta)
    if den_value == 0:
        raise DegenerateSampleError("pivot coefficient vanished at sample point")
    den_partials = [den.derivative(i).evaluate(theta) for i in range(nv)]
    rows = []
    for num, _ in entries:
        num_value = num.evaluate(theta)
        rows.append(
            [
                num.derivative(i).evaluate(theta) * den_value - num_value * den_partials[i]
                for i in range(nv)
            ]
        )
    return rows


def jacobian_rank(expr: NetworkExpr, theta: ParamPoint) -> int:
    """Exact rank of the coefficient-map Jacobian at a positive point."""
    values = theta.values if isinstance(theta, ParamPoint) else tuple(theta)
    return exact_rank(jacobian_matrix(expr, values))


def jacobian_rank_float(expr: NetworkExpr, theta: ParamPoint, cutoff: float = 1e-8) -> int:
    """Floating-point SVD rank with a relative cutoff; cross-check only."""
    values = theta.values if isinstance(theta, ParamPoint) else tuple(theta)
    rows = jacobian_matrix(expr, values)
    mat = np.array([[float(x) for x in row] for row in rows])
    if mat.size == 0:
        return 0
    s = np.linalg.svd(mat, compute_uv=False)
    if s.size == 0 or s[0] == 0:
        return 0
    return int(np.sum(s > cutoff * s[0]))


def verify_local(expr: NetworkExpr, trials: int = 3, seed: int = 0) -> bool:
    """True iff rank-based and table-based local verdicts agree at every
    sampled point (two resamples allowed on degenerate draws)."""
    if trials < 1:
        raise ValueError("trials must be >= 1")
    verdict = analyze(expr)
    n = verdict.param_count
    for t in range(trials):
        point = None
        for attempt in range(3):
            candidate = sample_point(n, seed=seed + 1000 * t + attempt)
            try:
                rank = jacobian_rank(expr, candidate)
            except DegenerateSampleError:
                continue
            point = candidate
            break
        if point is None:
            raise DegenerateSampleError("persistent degenerate sampling")
        if (rank == n) != verdict.locally_identifiable:
            return False
    return True


# ---------------------------------------------------------------------------
# coprimality spot checks for the composition rules


def check_coprimality(
    eq1: ConstitutiveEq,
    eq2: ConstitutiveEq,
    op: str,
    theta: ParamPoint,
) -> bool:
    """Nonzero resultant of the pair of operators whose product rule the
    given connection uses (strain pair for series, stress pair for
    parallel), after shifting away trailing derivative powers."""
    if op == "series":
        p_op, q_op = eq1.eps, eq2.eps
    elif op == "parallel":
        p_op, q_op = eq1.sig, eq2.sig
    else:
        raise ValueError("op must be 'series' or 'parallel'")
    values = theta.values if isinstance(theta, ParamPoint) else tuple(theta)
    p = _tight_vector(p_op, values)
    q = _tight_vector(q_op, values)
    return resultant(p, q) != 0


def _tight_vector(op: DiffOperator, values: Sequence[Rat]) -> list[Fraction]:
    vec = op.eval_coeffs(values)
    while len(vec) > 1 and vec[-1] == 0:
        vec.pop()
    while len(vec) > 1 and vec[0] == 0:
        vec.pop(0)
    return vec


# ---------------------------------------------------------------------------
# compiled float evaluation of the coefficient map


class _PolyStack:
    """Many polynomials evaluated at once: exp(E @ log theta) per term,
    then per-polynomial segment sums (positive theta only)."""

    def __init__(self, polys: Sequence[ParamPoly], nparams: int):
        exps: list[tuple[int, ...]] = []
        coeffs: list[float] = []
        offsets = [0]
        for p in polys:
            for e, c in p.terms.items():
                exps.append(e)
                coeffs.append(float(c))
            offsets.append(len(coeffs))
        self.exp_matrix = (
            np.array(exps, dtype=float) if exps else np.zeros((0, nparams))
        )
        self.coeffs = np.array(coeffs)
        self.offsets = np.array(offsets)

    def evaluate(self, theta: np.ndarray) -> np.ndarray:
        if self.exp_matrix.shape[0] == 0:
            return np.zeros(len(self.offsets) - 1)
        terms = self.coeffs * np.exp(self.exp_matrix @ np.log(theta))
        cums = np.concatenate(([0.0], np.cumsum(terms)))
        return cums[self.offsets[1:]] - cums[self.offsets[:-1]]


class CompiledMap:
    """Float evaluation of a network's coefficient map and its Jacobian."""

    def __init__(self, expr: NetworkExpr):
        self.expr = expr
        self.names = params(expr)
        self.nparams = len(self.names)
        eq = constitutive(expr)
        entries = coefficient_map(eq)
        self.dim = len(entries)
        self._entries = entries
        nums = [num for num, _ in entries]
        den = entries[0][1]
        self._values = _PolyStack(nums + [den], self.nparams)
        jac_polys: list[ParamPoly] = []
        for num in nums:
            jac_polys.extend(num.derivative(i) for i in range(self.nparams))
        jac_polys.extend(den.derivative(i) for i in range(self.nparams))
        self._partials = _PolyStack(jac_polys, self.nparams)

    def value(self, theta: np.ndarray) -> np.ndarray:
        vals = self._values.evaluate(theta)
        return vals[: self.dim] / vals[self.dim]

    def value_exact(self, theta: Sequence[Rat]) -> list[Fraction]:
        return [num.evaluate(theta) / den.evaluate(theta) for num, den in self._entries]

    def jacobian(self, theta: np.ndarray) -> np.ndarray:
        vals = self._values.evaluate(theta)
        nums, den = vals[: self.dim], vals[self.dim]
        parts = self._partials.evaluate(theta)
        dnum = parts[: self.dim * self.nparams].reshape(self.dim, self.nparams)
        dden = parts[self.dim * self.nparams :]
        return (dnum * den - np.outer(nums, dden)) / den**2


def _newton(
    cmap: CompiledMap,
    target: np.ndarray,
    start: np.ndarray,
    max_iter: int = 60,
    tol: float = 1e-12,
) -> np.ndarray | None:
    theta = np.array(start, dtype=float)
    if np.any(theta <= 0) or not np.all(np.isfinite(theta)):
        return None
    scale = 1.0 + np.abs(target)
    residual = cmap.value(theta) - target
    best = np.max(np.abs(residual) / scale)
    for _ in range(max_iter):
        if best <= tol:
            return theta
        jac = cmap.jacobian(theta)
        try:
            step = np.linalg.solve(jac, -residual)
        except np.linalg.LinAlgError:
            step, *_ = np.linalg.lstsq(jac, -residual, rcond=None)
        if not np.all(np.isfinite(step)):
            return None
        alpha = 1.0
        moved = False
        while alpha >= 1e-12:
            cand = theta + alpha * step
            if np.all(cand > 0):
                cand_res = cmap.value(cand) - target
                cand_norm = np.max(np.abs(cand_res) / scale)
                if cand_norm < best:
                    theta, residual, best = cand, cand_res, cand_norm
                    moved = True
                    break
            alpha /= 2
        if not moved:
            break
    return theta if best <= tol else None


# ---------------------------------------------------------------------------
# fiber enumeration


@dataclass(frozen=True)
class FiberSolution:
    values: tuple[float, ...]
    method: str  # "base" | "permutation" | "root-exchange" | "multistart"


@dataclass(frozen=True)
class FiberReport:
    base: ParamPoint
    solutions: tuple[FiberSolution, ...]
    truncated: bool
    multistarts: int

    def __len__(self) -> int:
        return len(self.solutions)


def _structure_sig(node: NetworkExpr):
    if isinstance(node, Leaf):
        return ("leaf", node.element.kind)
    kind = "series" if isinstance(node, Series) else "parallel"
    return (kind, tuple(_structure_sig(c) for c in node.children))


def _leaf_count(node: NetworkExpr) -> int:
    if isinstance(node, Leaf):
        return 1
    return sum(_leaf_count(c) for c in node.children)


def sibling_groups(expr: NetworkExpr) -> list[list[tuple[int, int]]]:
    """Groups of (start, length) leaf spans of structurally identical
    siblings under one internal node; only groups of size >= 2."""
    groups: list[list[tuple[int, int]]] = []

    def walk(node: NetworkExpr, start: int) -> int:
        if isinstance(node, Leaf):
            return start + 1
        spans: list[tuple[int, int]] = []
        sigs = []
        cursor = start
        for child in node.children:
            end = walk(child, cursor)
            spans.append((cursor, end - cursor))
            sigs.append(_structure_sig(child))
            cursor = end
        by_sig: dict[object, list[tuple[int, int]]] = {}
        for sig, span in zip(sigs, spans):
            by_sig.setdefault(sig, []).append(span)
        for members in by_sig.values():
            if len(members) >= 2:
                groups.append(members)
        return cursor

    walk(expr, 0)
    return groups


def _permuted_points(base: Sequence[float], groups, cap: int):
    """Distinct parameter vectors from permuting identical sibling spans."""
    per_group = [list(itertools.permutations(range(len(g)))) for g in groups]
    count = 0
    for choice in itertools.product(*per_group):
        if all(perm == tuple(range(len(perm))) for perm in choice):
            continue
        values = list(base)
        for group, perm in zip(groups, choice):
            snapshot = list(values)
            for dest_idx, src_idx in enumerate(perm):
                dstart, dlen = group[dest_idx]
                sstart, _ = group[src_idx]
                values[dstart : dstart + dlen] = snapshot[sstart : sstart + dlen]
        yield values
        count += 1
        if count >= cap:
            return


def _child_slices(expr: NetworkExpr) -> list[tuple[NetworkExpr, int, int]]:
    out = []
    cursor = 0
    for child in expr.children:  # type: ignore[union-attr]
        n = _leaf_count(child)
        out.append((child, cursor, n))
        cursor += n
    return out


def _index_partitions(indices: tuple[int, ...], sizes: Sequence[int]):
    if not sizes:
        yield []
        return
    for head in itertools.combinations(indices, sizes[0]):
        rest = tuple(i for i in indices if i not in head)
        for tail in _index_partitions(rest, sizes[1:]):
            yield [head] + tail


def _poly_from_roots(roots: Sequence[complex]) -> np.ndarray | None:
    """Monic ascending real coefficient vector, or None if not conjugate
    closed."""
    coeffs = np.atleast_1d(np.poly(list(roots)))  # descending, monic
    if np.max(np.abs(coeffs.imag)) > 1e-7 * (1.0 + np.max(np.abs(coeffs))):
        return None
    return coeffs.real[::-1]


def _root_exchange_candidates(
    expr: NetworkExpr, base: np.ndarray, rng: random.Random, cap: int = 48
) -> list[np.ndarray]:
    """Alternative fiber points from redistributing the roots of the
    composition factors at the top-level node among its children."""
    if isinstance(expr, Leaf):
        return []
    series = isinstance(expr, Series)
    children = _child_slices(expr)

    # per child: tight monic factor vector of the exchanged side, the
    # trailing derivative power, and the solved-side vector in the same
    # scale (ascending floats)
    factors, powers, others, other_lows = [], [], [], []
    for child, start, n in children:
        eq = constitutive(child)
        p_op, q_op = (eq.eps, eq.sig) if series else (eq.sig, eq.eps)
        theta = base[start : start + n]
        p_vec = np.array([_float_coeff(c, theta) for c in p_op.coeffs])
        q_vec = np.array([_float_coeff(c, theta) for c in q_op.coeffs])
        lead = p_vec[-1]
        factors.append(p_vec / lead)
        powers.append(p_op.low)
        others.append(q_vec / lead)
        other_lows.append(q_op.low)

    sizes = [len(f) - 1 for f in factors]
    if sum(sizes) == 0 or sum(1 for s in sizes if s > 0) < 2:
        return []

    root_sets = [np.roots(f[::-1]) if len(f) > 1 else np.array([]) for f in factors]
    all_roots = np.concatenate(root_sets)
    original = []
    cursor = 0
    for s in sizes:
        original.append(tuple(range(cursor, cursor + s)))
        cursor += s

    rhs = _combined_other_side(factors, powers, others, other_lows)

    candidates: list[np.ndarray] = []
    seen = 0
    for groups in _index_partitions(tuple(range(len(all_roots))), sizes):
        if [tuple(sorted(g)) for g in groups] == [tuple(sorted(g)) for g in original]:
            continue
        seen += 1
        if seen > 120 or len(candidates) >= cap:
            break
        new_factors = []
        ok = True
        for g in groups:
            vec = _poly_from_roots([all_roots[i] for i in g])
            if vec is None:
                ok = False
                break
            new_factors.append(vec)
        if not ok:
            continue
        new_others = _solve_other_side(new_factors, powers, other_lows, others, rhs)
        if new_others is None:
            continue
        point = np.array(base, dtype=float)
        assembled = True
        for (child, start, n), p_new, q_new in zip(children, new_factors, new_others):
            theta = _solve_child(child, p_new, q_new, series, base[start : start + n], rng)
            if theta is None:
                assembled = False
                break
            point[start : start + n] = theta
        if assembled:
            candidates.append(point)
    return candidates


def _float_coeff(poly: ParamPoly, theta: np.ndarray) -> float:
    total = 0.0
    for exp, coeff in poly.terms.items():
        term = float(coeff)
        for e, v in zip(exp, theta):
            if e:
                term *= float(v) ** e
        total += term
    return total


def _full_vector(tight: np.ndarray, low: int) -> np.ndarray:
    return np.concatenate([np.zeros(low), tight])


def _combined_other_side(factors, powers, others, other_lows) -> np.ndarray:
    """Ascending coefficients of sum_i (prod_{j != i} full_j) * other_i."""
    fulls = [_full_vector(f, p) for f, p in zip(factors, powers)]
    total = None
    for i, (other, low) in enumerate(zip(others, other_lows)):
        prod = np.array([1.0])
        for j, full in enumerate(fulls):
            if j != i:
                prod = np.convolve(prod, full)
        term = np.convolve(prod, _full_vector(other, low))
        if total is None:
            total = term
        elif len(term) > len(total):
            term[: len(total)] += total
            total = term
        else:
            total[: len(term)] += term
    return total


def _solve_other_side(factors, powers, other_lows, others, rhs) -> list[np.ndarray] | None:
    """Solve the linear system for the non-exchanged operator coefficients."""
    fulls = [_full_vector(f, p) for f, p in zip(factors, powers)]
    columns = []
    slots = []
    n_rows = len(rhs)
    for i, (other, low) in enumerate(zip(others, other_lows)):
        prod = np.array([1.0])
        for j, full in enumerate(fulls):
            if j != i:
                prod = np.convolve(prod, full)
        width = len(other)
        slots.append(width)
        for k in range(low, low + width):
            col = np.zeros(n_rows)
            top = min(n_rows, len(prod) + k)
            col[k:top] = prod[: top - k]
            columns.append(col)
    matrix = np.column_stack(columns)
    solution, *_ = np.linalg.lstsq(matrix, rhs, rcond=None)
    if np.max(np.abs(matrix @ solution - rhs)) > 1e-8 * (1.0 + np.max(np.abs(rhs))):
        return None
    out = []
    pos = 0
    for width in slots:
        out.append(solution[pos : pos + width])
        pos += width
    return out


def _solve_child(
    child: NetworkExpr,
    p_new: np.ndarray,
    q_new: np.ndarray,
    series: bool,
    start_values: np.ndarray,
    rng: random.Random,
) -> np.ndarray | None:
    """Recover child parameters matching target operators (p_new, q_new)."""
    eps_vec, sig_vec = (
        (_pad(p_new), q_new) if series else (q_new, _pad(p_new))
    )
    pivot = sig_vec[-1]
    if pivot == 0:
        return None
    target = np.concatenate([eps_vec[::-1], sig_vec[:-1][::-1]]) / pivot
    cmap = CompiledMap(child)
    if len(target) != cmap.dim:
        return None
    for attempt in range(8):
        if attempt == 0:
            start = np.array(start_values, dtype=float)
        else:
            jitter = np.array(
                [math.exp(rng.uniform(math.log(0.2), math.log(5.0))) for _ in start_values]
            )
            start = np.array(start_values, dtype=float) * jitter
        found = _newton(cmap, target, start)
        if found is not None:
            return found
    return None


def _pad(vec: np.ndarray) -> np.ndarray:
    return vec if len(vec) else np.array([0.0])


def fiber_solutions(
    expr: NetworkExpr,
    base: ParamPoint | None = None,
    multistarts: int = 200,
    tol: float = 1e-8,
    max_solutions: int = 64,
    seed: int = 0,
) -> FiberReport:
    """All found preimages of c(base) under the coefficient map.

    The network must be locally identifiable (finite fiber).  Candidates
    come from sibling permutations (verified exactly), root exchanges at
    the top node, and multistart damped Newton (both verified against
    the float tolerance); duplicates within relative distance 1e-6 are
    merged and the base point is always included.
    """
    verdict = analyze(expr)
    if not verdict.locally_identifiable:
        raise ValueError("fiber enumeration requires a locally identifiable network")
    n = verdict.param_count
    if base is None:
        base = sample_point(n, seed)
    if len(base.values) != n:
        raise ValueError(f"base point has {len(base.values)} values, expected {n}")

    cmap = CompiledMap(expr)
    rng = random.Random(seed)
    base_floats = base.as_floats()
    target = cmap.value(base_floats)
    scale = 1.0 + np.abs(target)
    base_exact = cmap.value_exact(base.values)

    def verifies(values: np.ndarray) -> bool:
        if np.any(values <= 0) or not np.all(np.isfinite(values)):
            return False
        return bool(np.max(np.abs(cmap.value(values) - target) / scale) <= tol)

    candidates: list[tuple[np.ndarray, str]] = [(base_floats, "base")]

    groups = sibling_groups(expr)
    if groups:
        for values in _permuted_points(list(base.values), groups, cap=4 * max_solutions):
            # structurally identical branches: check exact map equality
            if cmap.value_exact(values) == base_exact:
                candidates.append((np.array([float(v) for v in values]), "permutation"))

    for point in _root_exchange_candidates(expr, base_floats, rng):
        if verifies(point):
            candidates.append((point, "root-exchange"))

    for _ in range(multistarts):
        jitter = np.array(
            [math.exp(rng.uniform(math.log(0.1), math.log(10.0))) for _ in range(n)]
        )
        found = _newton(cmap, target, base_floats * jitter)
        if found is not None and verifies(found):
            candidates.append((found, "multistart"))

    order = {"base": 0, "permutation": 1, "root-exchange": 2, "multistart": 3}
    candidates.sort(key=lambda item: (order[item[1]], tuple(item[0])))
    kept: list[FiberSolution] = []
    truncated = False
    for values, method in candidates:
        duplicate = False
        for existing in kept:
            prev = np.array(existing.values)
            if np.linalg.norm(values - prev) <= 1e-6 * (1.0 + np.linalg.norm(prev)):
                duplicate = True
                break
        if duplicate:
            continue
        if len(kept) >= max_solutions:
            truncated = True
            break
        kept.append(FiberSolution(tuple(float(v) for v in values), method))
    return FiberReport(base=base, solutions=tuple(kept), truncated=truncated, multistarts=multistarts)
