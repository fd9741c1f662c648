"""Exact linear feasibility over payment variables.

Constraints have the form ``sum(coeff * x) >= constant`` (or ``>`` when
strict) with rational data. ``fm_feasible`` decides satisfiability by
Fourier-Motzkin variable elimination and, on success, extracts a rational
witness by back-substitution: each eliminated variable gets the midpoint of
its residual interval, or lower bound plus one when unbounded above. All
arithmetic is exact.

``difference_system_feasible`` is a fast path for systems whose constraints
all involve at most two variables with unit coefficients of opposite sign
(plus single-variable bounds). It runs Bellman-Ford with lexicographic
(weight, strictness) labels and agrees with ``fm_feasible`` on such systems;
callers use it to prune search branches and leave the final solve and
witness extraction to Fourier-Motzkin.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Hashable, Iterable, Mapping, Optional, Sequence

Key = Hashable


@dataclass(frozen=True)
class LinearConstraint:
    """``sum(coeffs[k] * x[k]) >= constant``, strict when ``strict``."""

    coeffs: Mapping[Key, Fraction]
    constant: Fraction
    strict: bool = False

    def normalized(self) -> "LinearConstraint":
        kept = {k: Fraction(c) for k, c in self.coeffs.items() if c != 0}
        return LinearConstraint(kept, Fraction(self.constant), self.strict)

    def holds(self, assignment: Mapping[Key, Fraction]) -> bool:
        total = sum((c * assignment.get(k, Fraction(0)) for k, c in self.coeffs.items()), Fraction(0))
        return total > self.constant if self.strict else total >= self.constant


def difference(key_pos: Key, key_neg: Key, constant: Fraction, strict: bool) -> LinearConstraint:
    """``x[key_pos] - x[key_neg] >= constant`` (or ``>``)."""
    return LinearConstraint({key_pos: Fraction(1), key_neg: Fraction(-1)}, constant, strict)


def lower_bound(key: Key, constant: Fraction = Fraction(0), strict: bool = False) -> LinearConstraint:
    return LinearConstraint({key: Fraction(1)}, constant, strict)


def _combine(low: LinearConstraint, high: LinearConstraint, key: Key) -> LinearConstraint:
    """Eliminate ``key`` from a lower bound (positive coeff) and an upper
    bound (negative coeff); the combination is strict if either side is."""
    a = low.coeffs[key]
    b = high.coeffs[key]
    coeffs: dict[Key, Fraction] = {}
    for k, c in low.coeffs.items():
        if k != key:
            coeffs[k] = coeffs.get(k, Fraction(0)) + (-b) * c
    for k, c in high.coeffs.items():
        if k != key:
            coeffs[k] = coeffs.get(k, Fraction(0)) + a * c
    constant = (-b) * low.constant + a * high.constant
    return LinearConstraint(coeffs, constant, low.strict or high.strict).normalized()


def fm_feasible(constraints: Iterable[LinearConstraint]) -> Optional[dict[Key, Fraction]]:
    """Exact rational assignment satisfying every constraint, or None.

    Variables are eliminated in sorted key order. Elimination preserves the
    solution set projection exactly, including strictness, because rationals
    are dense: a strict lower bound below a (possibly strict) upper bound
    always leaves room for an interior point.
    """
    system = [c.normalized() for c in constraints]
    order = sorted({k for c in system for k in c.coeffs})

    eliminated: list[tuple[Key, list[LinearConstraint]]] = []
    for key in order:
        lowers = [c for c in system if c.coeffs.get(key, 0) > 0]
        uppers = [c for c in system if c.coeffs.get(key, 0) < 0]
        rest = [c for c in system if key not in c.coeffs]
        eliminated.append((key, lowers + uppers))
        system = rest + [_combine(low, high, key) for low in lowers for high in uppers]

    for c in system:
        # Only variable-free constraints survive full elimination.
        zero = Fraction(0)
        if c.strict:
            if not zero > c.constant:
                return None
        elif not zero >= c.constant:
            return None

    assignment: dict[Key, Fraction] = {}
    for key, bounds in reversed(eliminated):
        low: Optional[Fraction] = None
        low_strict = False
        high: Optional[Fraction] = None
        high_strict = False
        for c in bounds:
            coeff = c.coeffs[key]
            residual = c.constant - sum(
                (co * assignment[k] for k, co in c.coeffs.items() if k != key), Fraction(0)
            )
            bound = residual / coeff
            if coeff > 0:
                if low is None or bound > low or (bound == low and c.strict):
                    low, low_strict = bound, c.strict
            else:
                if high is None or bound < high or (bound == high and c.strict):
                    high, high_strict = bound, c.strict
        if low is None and high is None:
            assignment[key] = Fraction(0)
        elif high is None:
            assert low is not None
            assignment[key] = low + 1
        elif low is None:
            assignment[key] = high - 1
        else:
            if low == high:
                # Feasibility guarantees neither side is strict here.
                assert not low_strict and not high_strict
                assignment[key] = low
            else:
                assert low < high
                assignment[key] = (low + high) / 2
    return assignment


# ---------------------------------------------------------------------------
# Difference-system fast path

_SOURCE = object()  # virtual node pinned to zero


def as_difference_edge(constraint: LinearConstraint) -> Optional[tuple[Key, Key, Fraction, bool]]:
    """Decompose into ``x[a] >= x[b] + w`` if the shape allows, else None.

    Single-variable bounds use the virtual zero node on the missing side.
    """
    c = constraint.normalized()
    items = sorted(c.coeffs.items(), key=lambda kv: repr(kv[0]))
    if len(items) == 1:
        (key, coeff), = items
        if coeff == 1:
            return key, _SOURCE, c.constant, c.strict
        if coeff == -1:
            return _SOURCE, key, c.constant, c.strict
        return None
    if len(items) == 2:
        (k1, c1), (k2, c2) = items
        if c1 == 1 and c2 == -1:
            return k1, k2, c.constant, c.strict
        if c1 == -1 and c2 == 1:
            return k2, k1, c.constant, c.strict
    return None


def difference_system_feasible(constraints: Sequence[LinearConstraint]) -> Optional[bool]:
    """Decide feasibility of a pure difference system; None if not one.

    Constraints ``x[a] - x[b] >= w`` become edges ``b -> a`` with label
    ``(w, strict)``. The system is infeasible exactly when some directed
    cycle has positive total weight, or zero total weight with at least one
    strict edge; Bellman-Ford over lexicographic (weight, strict-count)
    labels detects this.
    """
    edges: list[tuple[Key, Key, Fraction, int]] = []
    nodes: set[Key] = {_SOURCE}
    for c in constraints:
        decomposed = as_difference_edge(c)
        if decomposed is None:
            return None
        head, tail, weight, strict = decomposed
        edges.append((tail, head, weight, 1 if strict else 0))
        nodes.add(head)
        nodes.add(tail)

    # Longest-path relaxation; all nodes start at (0, 0) which emulates a
    # super-source, so any bad cycle is reachable.
    dist: dict[Key, tuple[Fraction, int]] = {node: (Fraction(0), 0) for node in nodes}
    for round_no in range(len(nodes)):
        changed = False
        for tail, head, weight, strict in edges:
            candidate = (dist[tail][0] + weight, dist[tail][1] + strict)
            if candidate > dist[head]:
                dist[head] = candidate
                changed = True
        if not changed:
            return True
    for tail, head, weight, strict in edges:
        if (dist[tail][0] + weight, dist[tail][1] + strict) > dist[head]:
            return False
    return True
