"""Exact disjoint-packing norms over set families.

The squared norm of a vector is the best value of Σ(Σ_{a∈sᵢ}φ(a))² over
pairwise disjoint subfamilies. Everything is computed on rescaled integers,
so results are exact rationals; square roots appear only at presentation
time through ``decimal``.
"""

from __future__ import annotations

import decimal
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Optional, Sequence

from .core import (
    FinVector,
    FiniteTree,
    Member,
    SetFamily,
    WeightedSet,
    canonical_member,
    sort_members,
)
from .errors import (
    GroundMismatchError,
    InvalidComboError,
    InvalidEpsilonError,
    ResourceLimitError,
)

DEFAULT_ORACLE_LIMIT = 16
DEFAULT_PRECISION = 50


def sqrt_decimal(value: Fraction, precision: int = DEFAULT_PRECISION) -> decimal.Decimal:
    """Deterministic decimal √value to ``precision`` significant digits."""
    if value < 0:
        raise ValueError("square root of a negative rational")
    if precision < 1:
        raise ValueError("precision must be positive")
    work = decimal.Context(prec=precision + 10)
    quotient = work.divide(decimal.Decimal(value.numerator), decimal.Decimal(value.denominator))
    root = work.sqrt(quotient)
    return decimal.Context(prec=precision).plus(root)


@dataclass(frozen=True)
class NormResult:
    norm_sq: Fraction
    witness: tuple
    method: str

    @property
    def norm(self) -> decimal.Decimal:
        return sqrt_decimal(self.norm_sq)

    def norm_decimal(self, precision: int = DEFAULT_PRECISION) -> str:
        return str(sqrt_decimal(self.norm_sq, precision))


def functional_eval(s: Iterable[str], phi: FinVector) -> Fraction:
    """s*(φ) = Σ_{a∈s} φ(a)."""
    atoms = canonical_member(s)
    if not phi.ground.covers(atoms):
        raise GroundMismatchError(f"set {atoms!r} is not contained in the vector's ground set")
    return sum((phi.value(a) for a in atoms), Fraction(0))


def weighted_eval(g: WeightedSet, phi: FinVector) -> Fraction:
    """⟨φ,g⟩ = Σ_a φ(a)·g(a)."""
    if g.ground.elements != phi.ground.elements:
        raise GroundMismatchError("weighted set and vector live on different ground sets")
    return sum((phi.value(a) * g.weight(a) for a in g.support), Fraction(0))


def _scale_to_ints(values: Sequence[Fraction]) -> tuple[list[int], int]:
    denom = math.lcm(*(v.denominator for v in values)) if values else 1
    return [int(v * denom) for v in values], denom


def _best_disjoint(masks: Sequence[int], values: Sequence[int]) -> tuple[int, list[int]]:
    """Max Σ values[i]² over index sets with pairwise disjoint masks.

    Runs one include-first DFS per connected component of the overlap graph,
    pruning on suffix square sums. Strict improvement keeps the first optimum
    in index order, so the witness is deterministic.
    """
    n = len(masks)
    if n == 0:
        return 0, []

    comp_of = [-1] * n
    comps: list[list[int]] = []
    for i in range(n):
        if comp_of[i] >= 0:
            continue
        comp = [i]
        comp_of[i] = len(comps)
        queue = [i]
        while queue:
            a = queue.pop()
            for b in range(n):
                if comp_of[b] < 0 and masks[a] & masks[b]:
                    comp_of[b] = len(comps)
                    comp.append(b)
                    queue.append(b)
        comp.sort()
        comps.append(comp)

    total = 0
    chosen: list[int] = []
    for comp in comps:
        k = len(comp)
        squares = [values[i] * values[i] for i in comp]
        suffix = [0] * (k + 1)
        for j in range(k - 1, -1, -1):
            suffix[j] = suffix[j + 1] + squares[j]

        best = 0
        best_pick: list[int] = []
        pick: list[int] = []

        def rec(start: int, used: int, cur: int) -> None:
            nonlocal best, best_pick
            if cur > best:
                best = cur
                best_pick = list(pick)
            for j in range(start, k):
                if cur + suffix[j] <= best:
                    return
                m = masks[comp[j]]
                if m & used:
                    continue
                pick.append(comp[j])
                rec(j + 1, used | m, cur + squares[j])
                pick.pop()

        rec(0, 0, 0)
        total += best
        chosen.extend(best_pick)
    return total, sorted(chosen)


def _min_per_trace(members: list[Member], fmasks: list[int], tmasks: list[int]) -> list[int]:
    """Indices of inclusion-minimal members within each trace class.

    Members with the same trace score identically, and a packing using a
    superset can always swap in a subset, so only minimal ones are needed.
    """
    groups: dict[int, list[int]] = {}
    for idx, tm in enumerate(tmasks):
        groups.setdefault(tm, []).append(idx)
    keep: list[int] = []
    for idxs in groups.values():
        idxs.sort(key=lambda i: (fmasks[i].bit_count(), members[i]))
        kept: list[int] = []
        for i in idxs:
            fm = fmasks[i]
            if not any(fmasks[j] | fm == fm for j in kept):
                kept.append(i)
        keep.extend(kept)
    keep.sort()
    return keep


def _has_cross_conflicts(fmasks: Sequence[int], tmasks: Sequence[int]) -> bool:
    """True when some pair overlaps outside the support but not on it."""
    n = len(fmasks)
    for i in range(n):
        fi, ti = fmasks[i], tmasks[i]
        for j in range(i + 1, n):
            if fi & fmasks[j] and not ti & tmasks[j]:
                return True
    return False


def _component_atom_masks(tmasks: Sequence[int], k: int) -> list[int]:
    """Union-find the support atoms linked by shared traces; one mask each."""
    parent = list(range(k))

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for tm in tmasks:
        first = (tm & -tm).bit_length() - 1
        rest = tm ^ (tm & -tm)
        while rest:
            low = rest & -rest
            ra, rb = find(first), find(low.bit_length() - 1)
            if ra != rb:
                parent[rb] = ra
            rest ^= low
    comps: dict[int, int] = {}
    for a in range(k):
        r = find(a)
        comps[r] = comps.get(r, 0) | (1 << a)
    return [comps[r] for r in sorted(comps)]


def _component_dp(tmasks: list[int], squares: list[int], k_c: int) -> tuple[int, list[int]]:
    """Exact max Σ squares over trace-disjoint candidates, by subset DP.

    States are masks of still-free support atoms; each state either skips its
    lowest atom or covers it with a candidate. Candidates are scanned in
    canonical order with strict improvement, so ties resolve the same way
    every run.
    """
    size = 1 << k_c
    cands_by_atom: list[list[int]] = [[] for _ in range(k_c)]
    for j, tm in enumerate(tmasks):
        cands_by_atom[(tm & -tm).bit_length() - 1].append(j)
    best = [0] * size
    choice = [-1] * size
    for free in range(1, size):
        low = free & -free
        b = best[free ^ low]
        c = -1
        for j in cands_by_atom[low.bit_length() - 1]:
            tm = tmasks[j]
            if tm & free == tm:
                v = squares[j] + best[free ^ tm]
                if v > b:
                    b, c = v, j
        best[free] = b
        choice[free] = c
    picked: list[int] = []
    free = size - 1
    while free:
        c = choice[free]
        if c < 0:
            free ^= free & -free
        else:
            picked.append(c)
            free ^= tmasks[c]
    return best[size - 1], picked


def norm_oracle(
    family: SetFamily,
    phi: FinVector,
    oracle_limit: int = DEFAULT_ORACLE_LIMIT,
) -> NormResult:
    """Exhaustive James-style norm over all pairwise disjoint subfamilies.

    Members not meeting supp φ contribute nothing and are dropped up front;
    among members with equal trace only inclusion-minimal ones can matter.
    When no pair overlaps outside the support (always true for the minimal
    representatives of tree segments), packing feasibility depends on traces
    alone and a subset DP over support atoms is exact; otherwise the search
    falls back to branch and bound on full member masks.
    """
    if not family.ground.covers(phi.support):
        raise GroundMismatchError("vector support is not contained in the family ground set")
    supp = phi.support
    if len(supp) > oracle_limit:
        raise ResourceLimitError(f"|supp phi| = {len(supp)} exceeds oracle limit {oracle_limit}")
    if phi.is_zero():
        return NormResult(Fraction(0), (), "oracle")

    scaled, denom = _scale_to_ints([phi.entries[a] for a in supp])
    weight = dict(zip(supp, scaled))
    k = len(supp)
    bit: dict[str, int] = {a: 1 << i for i, a in enumerate(supp)}

    cand_members: list[Member] = []
    cand_values: list[int] = []
    cand_fmasks: list[int] = []
    cand_tmasks: list[int] = []
    for m in family.members:
        v = 0
        tmask = 0
        for a in m:
            w = weight.get(a)
            if w is not None:
                v += w
                tmask |= bit[a]
        if v == 0:
            continue
        fmask = tmask
        for a in m:
            b = bit.get(a)
            if b is None:
                bit[a] = b = 1 << len(bit)
            fmask |= b
        cand_members.append(m)
        cand_values.append(v)
        cand_fmasks.append(fmask)
        cand_tmasks.append(tmask)

    keep = _min_per_trace(cand_members, cand_fmasks, cand_tmasks)
    members = [cand_members[i] for i in keep]
    values = [cand_values[i] for i in keep]
    fmasks = [cand_fmasks[i] for i in keep]
    tmasks = [cand_tmasks[i] for i in keep]

    if _has_cross_conflicts(fmasks, tmasks):
        best, idx = _best_disjoint(fmasks, values)
        witness = sort_members(members[i] for i in idx)
        return NormResult(Fraction(best, denom * denom), witness, "oracle")

    total = 0
    picked_members: list[Member] = []
    for cmask in _component_atom_masks(tmasks, k):
        local_atoms = [a for a in range(k) if cmask >> a & 1]
        local_bit = {a: 1 << i for i, a in enumerate(local_atoms)}
        local_idx = [j for j, tm in enumerate(tmasks) if tm & cmask]
        local_tmasks = []
        for j in local_idx:
            tm, lm = tmasks[j], 0
            while tm:
                low = tm & -tm
                lm |= local_bit[low.bit_length() - 1]
                tm ^= low
            local_tmasks.append(lm)
        squares = [values[j] * values[j] for j in local_idx]
        b, picked = _component_dp(local_tmasks, squares, len(local_atoms))
        total += b
        picked_members.extend(members[local_idx[p]] for p in picked)
    witness = sort_members(picked_members)
    return NormResult(Fraction(total, denom * denom), witness, "oracle")


def norm_tree_dp(tree: FiniteTree, phi: FinVector) -> NormResult:
    """Same value as ``norm_oracle`` over the segment family of ``tree``.

    Bottom-up over the tree: each node keeps its best fully-closed packing
    and a frontier of (open-chain sum, closed value) states where the open
    chain may still grow through the node toward its parent. Frontier states
    are keyed on the exact signed chain sum; squaring is convex, so states
    with distinct sums are incomparable and must all be kept.
    """
    if not set(phi.ground.elements) <= set(tree.nodes):
        raise GroundMismatchError("vector ground set is not contained in the tree nodes")

    supp = phi.support
    scaled, denom = _scale_to_ints([phi.entries[a] for a in supp])
    weight = dict(zip(supp, scaled))

    order: list[str] = []
    stack = [(r, False) for r in reversed(tree.roots)]
    while stack:
        node, expanded = stack.pop()
        if expanded:
            order.append(node)
            continue
        stack.append((node, True))
        for c in reversed(tree.children(node)):
            stack.append((c, False))

    # per node: (closed best, closed witness, frontier)
    # frontier: dict sigma -> (value, closed witness, open chain)
    done: dict[str, tuple[int, list[Member], dict[int, tuple[int, list[Member], tuple[str, ...]]]]] = {}
    for v in order:
        phi_v = weight.get(v, 0)
        closed_best: list[int] = []
        closed_wit: list[list[Member]] = []
        child_frontiers = []
        for c in tree.children(v):
            b, bw, fr = done.pop(c)
            cb, cw = b, bw
            for sigma, (val, wit, chain) in fr.items():
                cand = val + sigma * sigma
                if cand > cb:
                    cb = cand
                    cw = wit + [canonical_member(chain)]
            closed_best.append(cb)
            closed_wit.append(cw)
            child_frontiers.append(fr)
        sum_closed = sum(closed_best)

        frontier: dict[int, tuple[int, list[Member], tuple[str, ...]]] = {}
        all_closed: list[Member] = [m for w in closed_wit for m in w]
        frontier[phi_v] = (sum_closed, all_closed, (v,))
        for j, fr in enumerate(child_frontiers):
            others = [m for i, w in enumerate(closed_wit) if i != j for m in w]
            rest = sum_closed - closed_best[j]
            for sigma, (val, wit, chain) in fr.items():
                ns = phi_v + sigma
                nv = val + rest
                if ns not in frontier or nv > frontier[ns][0]:
                    frontier[ns] = (nv, wit + others, chain + (v,))

        b_v = sum_closed
        bw_v = all_closed
        for sigma, (val, wit, chain) in frontier.items():
            cand = val + sigma * sigma
            if cand > b_v:
                b_v = cand
                bw_v = wit + [canonical_member(chain)]
        done[v] = (b_v, bw_v, frontier)

    total = 0
    witness: list[Member] = []
    for r in tree.roots:
        b, bw, fr = done[r]
        for sigma, (val, wit, chain) in fr.items():
            cand = val + sigma * sigma
            if cand > b:
                b = cand
                bw = wit + [canonical_member(chain)]
        total += b
        witness.extend(bw)
    return NormResult(Fraction(total, denom * denom), sort_members(witness), "tree-dp")


def norm_weighted(
    familyE: Sequence[WeightedSet],
    phi: FinVector,
    oracle_limit: int = DEFAULT_ORACLE_LIMIT,
) -> NormResult:
    """Max Σ⟨φ,gᵢ⟩² over subfamilies with pairwise disjoint supports."""
    supp = phi.support
    if len(supp) > oracle_limit:
        raise ResourceLimitError(f"|supp phi| = {len(supp)} exceeds oracle limit {oracle_limit}")
    values = [weighted_eval(g, phi) for g in familyE]
    scaled, denom = _scale_to_ints(values)

    cands: list[WeightedSet] = []
    cand_values: list[int] = []
    for g, v in zip(familyE, scaled):
        if v != 0:
            cands.append(g)
            cand_values.append(v)

    bit: dict[str, int] = {}
    cand_masks = []
    for g in cands:
        mask = 0
        for a in g.support:
            if a not in bit:
                bit[a] = 1 << len(bit)
            mask |= bit[a]
        cand_masks.append(mask)

    best, idx = _best_disjoint(cand_masks, cand_values)
    return NormResult(Fraction(best, denom * denom), tuple(cands[i] for i in idx), "oracle")


@dataclass(frozen=True)
class DualCombination:
    """Σλᵢsᵢ* with pairwise disjoint sᵢ and Σλᵢ² ≤ 1."""

    terms: tuple[tuple[Fraction, Member], ...]

    def __init__(self, terms: Iterable[tuple[Fraction | int | str, Iterable[str]]]):
        canon = tuple((Fraction(lam), canonical_member(s)) for lam, s in terms)
        seen: set = set()
        for _, s in canon:
            for a in s:
                if a in seen:
                    raise InvalidComboError(f"dual combination members overlap at {a!r}")
                seen.add(a)
        if sum((lam * lam for lam, _ in canon), Fraction(0)) > 1:
            raise InvalidComboError("dual combination has sum of squared coefficients > 1")
        object.__setattr__(self, "terms", canon)


def dual_eval(combo: DualCombination, phi: FinVector) -> Fraction:
    """Σλᵢ·sᵢ*(φ)."""
    return sum((lam * functional_eval(s, phi) for lam, s in combo.terms), Fraction(0))


@dataclass(frozen=True)
class DecreasingL2Seq:
    """Nonincreasing nonnegative rationals with Σλᵢ² ≤ 1."""

    values: tuple[Fraction, ...]

    def __init__(self, values: Iterable[Fraction | int | str]):
        vals = tuple(Fraction(v) for v in values)
        if any(v < 0 for v in vals):
            raise InvalidComboError("sequence entries must be nonnegative")
        if any(vals[i] < vals[i + 1] for i in range(len(vals) - 1)):
            raise InvalidComboError("sequence must be nonincreasing")
        if sum((v * v for v in vals), Fraction(0)) > 1:
            raise InvalidComboError("sequence has sum of squares > 1")
        object.__setattr__(self, "values", vals)


@dataclass(frozen=True)
class GreedyCertificate:
    epsilon: Fraction
    chosen_sets: tuple[Member, ...]
    surviving_indices: tuple[int, ...]
    k_bound: int


def greedy_bound(epsilon: Fraction) -> int:
    """Smallest n with ε²·n > 1."""
    return int(1 / (epsilon * epsilon)) + 1


def greedy_extract(
    family: SetFamily,
    phis: Sequence[FinVector],
    epsilon: Fraction | int | str,
    fraction: Fraction = Fraction(1, 2),
    oracle_limit: int = DEFAULT_ORACLE_LIMIT,
    trusted: bool = False,
) -> GreedyCertificate:
    """Iteratively pick disjoint members acting above ε on most survivors.

    Each pick keeps only the indices it certifies, so after k picks every
    survivor has squared norm above ε²k; that caps the number of rounds at
    the first n with ε√n > 1. Vectors are checked against the unit ball via
    the oracle unless ``trusted`` is set.
    """
    epsilon = Fraction(epsilon)
    if epsilon <= 0:
        raise InvalidEpsilonError("epsilon must be positive")
    if not 0 < fraction <= 1:
        raise InvalidEpsilonError("fraction must lie in (0, 1]")
    if not trusted:
        for i, phi in enumerate(phis):
            if norm_oracle(family, phi, oracle_limit=oracle_limit).norm_sq > 1:
                raise InvalidComboError(f"vector {i} lies outside the unit ball")

    k_bound = greedy_bound(epsilon)
    values = {
        m: [sum((phi.value(a) for a in m), Fraction(0)) for phi in phis] for m in family.members
    }
    surviving = list(range(len(phis)))
    chosen: list[Member] = []
    used: set[str] = set()
    while len(chosen) < k_bound and surviving:
        threshold = max(1, math.ceil(fraction * len(surviving)))
        found = None
        for m in family.members:
            if used.intersection(m):
                continue
            hits = [n for n in surviving if values[m][n] > epsilon]
            if len(hits) >= threshold:
                found = (m, hits)
                break
        if found is None:
            break
        m, hits = found
        chosen.append(m)
        used.update(m)
        surviving = hits
    return GreedyCertificate(
        epsilon=epsilon,
        chosen_sets=tuple(chosen),
        surviving_indices=tuple(surviving),
        k_bound=k_bound,
    )
