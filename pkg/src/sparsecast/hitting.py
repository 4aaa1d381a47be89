"""Minimum hitting set: exact branch-and-bound, the greedy approximation,
an exhaustive oracle, and the reductions to/from sparse innovative coding.

Instances are collections of nonempty subsets of {1..N} (0-based internally);
the solvers work on integer bitmasks.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

import numpy as np

from .gf import FieldSpec
from .gfmatrix import MatrixGF, null_space_basis

DEFAULT_NODE_BUDGET = 10**6
ORACLE_UNIVERSE_LIMIT = 20


class BudgetExceeded(RuntimeError):
    pass


class TooLarge(ValueError):
    pass


class ZeroRow(ValueError):
    pass


@dataclass(frozen=True)
class HittingInstance:
    """Universe {0..universe_size-1} plus a collection of nonempty subsets."""

    universe_size: int
    sets: tuple[frozenset[int], ...]

    def __post_init__(self):
        if self.universe_size < 1:
            raise ValueError("empty universe")
        if not self.sets:
            raise ValueError("need at least one set")
        for s in self.sets:
            if not s:
                raise ValueError("sets must be nonempty")
            if min(s) < 0 or max(s) >= self.universe_size:
                raise ValueError("set element outside the universe")

    @classmethod
    def from_iterables(cls, universe_size, sets) -> "HittingInstance":
        return cls(universe_size, tuple(frozenset(s) for s in sets))

    def masks(self) -> list[int]:
        return [sum(1 << e for e in s) for s in self.sets]


@dataclass(frozen=True)
class HittingSolution:
    hitting_set: frozenset[int]
    size: int
    optimal: bool

    def hits(self, inst: HittingInstance) -> bool:
        return all(s & self.hitting_set for s in inst.sets)


def _mask_to_set(mask: int) -> frozenset[int]:
    out = []
    i = 0
    while mask:
        if mask & 1:
            out.append(i)
        mask >>= 1
        i += 1
    return frozenset(out)


def greedy_hitting(inst: HittingInstance) -> HittingSolution:
    """Repeatedly pick the element hitting the most not-yet-hit sets,
    ties broken by lowest element index."""
    remaining = list(inst.masks())
    chosen = 0
    while remaining:
        counts = [0] * inst.universe_size
        for m in remaining:
            mm = m
            while mm:
                low = mm & -mm
                counts[low.bit_length() - 1] += 1
                mm ^= low
        best = max(range(inst.universe_size), key=lambda e: (counts[e], -e))
        chosen |= 1 << best
        remaining = [m for m in remaining if not (m >> best) & 1]
    picked = _mask_to_set(chosen)
    return HittingSolution(picked, len(picked), optimal=False)


def _packing_lower_bound(masks: list[int]) -> int:
    """Greedy disjoint-set packing: pairwise-disjoint sets need one element
    each."""
    taken = 0
    count = 0
    for m in sorted(masks, key=lambda m: (m.bit_count(), m)):
        if not (m & taken):
            taken |= m
            count += 1
    return count


def _reduce(masks: list[int], forced: int) -> tuple[list[int], int] | None:
    """Unit forcing and dominated-set elimination, to fixpoint.
    Returns (reduced masks, forced-elements mask); None means some set
    became impossible (cannot happen for valid instances)."""
    masks = list(masks)
    while True:
        changed = False
        units = [m for m in masks if m.bit_count() == 1]
        if units:
            for m in units:
                forced |= m
            masks = [m for m in masks if not (m & forced)]
            changed = True
        # dominated sets: a superset of another set is redundant
        masks.sort(key=lambda m: m.bit_count())
        kept: list[int] = []
        for m in masks:
            if not any(k & m == k for k in kept):
                kept.append(m)
        if len(kept) != len(masks):
            masks = kept
            changed = True
        if not changed:
            return masks, forced


class _Budget:
    __slots__ = ("left",)

    def __init__(self, n):
        self.left = n

    def spend(self):
        self.left -= 1
        if self.left < 0:
            raise BudgetExceeded("branch-and-bound node budget exhausted")


def _branch(masks: list[int], chosen: int, best: list, budget: _Budget) -> None:
    budget.spend()
    masks, chosen = _reduce(masks, chosen)
    size = chosen.bit_count()
    if not masks:
        if size < best[0]:
            best[0] = size
            best[1] = chosen
        return
    if size + _packing_lower_bound(masks) >= best[0]:
        return
    # branch on the smallest unhit set, elements in increasing index order
    target = min(masks, key=lambda m: (m.bit_count(), m))
    mm = target
    while mm:
        low = mm & -mm
        mm ^= low
        e = low.bit_length() - 1
        sub = [m for m in masks if not (m >> e) & 1]
        _branch(sub, chosen | (1 << e), best, budget)


def exact_hitting(
    inst: HittingInstance, budget: int = DEFAULT_NODE_BUDGET
) -> HittingSolution:
    """Optimal hitting set via branch-and-bound (the 0-1 covering program
    min sum(y) s.t. By >= 1 solved natively).  Raises BudgetExceeded when
    the node budget runs out; never silently degrades to greedy."""
    seed = greedy_hitting(inst)
    best = [seed.size, sum(1 << e for e in seed.hitting_set)]
    _branch(inst.masks(), 0, best, _Budget(budget))
    picked = _mask_to_set(best[1])
    return HittingSolution(picked, len(picked), optimal=True)


def oracle_min_hitting(inst: HittingInstance) -> HittingSolution:
    """Exhaustive minimum by subset enumeration in increasing cardinality."""
    n = inst.universe_size
    if n > ORACLE_UNIVERSE_LIMIT:
        raise TooLarge(f"oracle limited to N <= {ORACLE_UNIVERSE_LIMIT}")
    masks = inst.masks()
    for k in range(1, n + 1):
        for combo in combinations(range(n), k):
            cm = sum(1 << e for e in combo)
            if all(m & cm for m in masks):
                return HittingSolution(frozenset(combo), k, optimal=True)
    raise AssertionError("unreachable: the full universe hits everything")


# ---------------------------------------------------------------------------
# Reductions between hitting set and sparse innovative coding

def instance_from_btilde(btilde_rows) -> HittingInstance:
    """Hitting instance whose sets are the supports of the given rows."""
    sets = []
    n = None
    for i, row in enumerate(btilde_rows):
        row = np.asarray(row)
        if n is None:
            n = row.shape[0]
        support = frozenset(int(j) for j in np.nonzero(row)[0])
        if not support:
            raise ZeroRow(f"row {i} is zero (finished user; exclude upstream)")
        sets.append(support)
    if n is None:
        raise ValueError("no rows given")
    return HittingInstance(n, tuple(sets))


def sparsity_instance_from_hitting(
    inst: HittingInstance, field: FieldSpec
) -> list[MatrixGF]:
    """Encoding matrices C_k whose sparsest innovative vector has weight
    equal to the instance's minimum hitting set size (requires q >= K).

    Each set becomes the characteristic vector b_k; C_k is the null-space
    basis of the single-row matrix [b_k].
    """
    if field.q < len(inst.sets):
        raise ValueError(f"need q >= K = {len(inst.sets)}, got q = {field.q}")
    out = []
    for s in inst.sets:
        b = np.zeros((1, inst.universe_size), dtype=np.int64)
        b[0, sorted(s)] = 1
        out.append(null_space_basis(MatrixGF(b, field, _validate=False)))
    return out


# ---------------------------------------------------------------------------
# Instance text format: line 1 "N K"; then K lines of 1-based element indices

def format_instance(inst: HittingInstance) -> str:
    lines = [f"{inst.universe_size} {len(inst.sets)}"]
    for s in inst.sets:
        lines.append(" ".join(str(e + 1) for e in sorted(s)))
    return "\n".join(lines) + "\n"


def parse_instance(text: str) -> HittingInstance:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise ValueError("empty instance text")
    head = lines[0].split()
    if len(head) != 2:
        raise ValueError("instance header needs 'N K'")
    n, k = int(head[0]), int(head[1])
    if len(lines) - 1 != k:
        raise ValueError(f"expected {k} sets, found {len(lines) - 1}")
    sets = []
    for ln in lines[1:]:
        sets.append(frozenset(int(tok) - 1 for tok in ln.split()))
    return HittingInstance(n, tuple(sets))
