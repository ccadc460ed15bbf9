"""Checkers for the countably-intersected family axioms and disjointification.

Condition (b) is an exact-cover search; condition (c) asks, for the trace
s∖⋃s_ti of every short envelope tuple, how much of it a pairwise-disjoint
packing of members can cover. Residuals above the configured bound fail the
check with a replayable witness. All searches run over bitmasks in canonical
atom order, so reports are deterministic.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping, Optional

from .core import Member, SetFamily, canonical_member
from .errors import (
    DecompositionError,
    InvalidEnvelopeError,
    ResourceLimitError,
    UnknownMemberError,
)

DEFAULT_COVER_LIMIT = 24
DEFAULT_SAMPLE_BOUND = 3
DEFAULT_RESIDUAL_BOUND = 0
DEFAULT_PAIR_BUDGET = 200_000
DEFAULT_TRACE_BUDGET = 200_000


@dataclass(frozen=True)
class Decomposition:
    """Pairwise disjoint family members covering the target set exactly."""

    parts: tuple[Member, ...]

    def union(self) -> frozenset:
        out: set = set()
        for p in self.parts:
            out.update(p)
        return frozenset(out)


@dataclass(frozen=True)
class ConditionResult:
    passed: bool
    witness: Optional[dict] = None


@dataclass(frozen=True)
class CiReport:
    condition_a: ConditionResult
    condition_b: ConditionResult
    condition_c: ConditionResult
    max_trace_size: int
    envelope_identity: bool = True

    @property
    def passed(self) -> bool:
        return self.condition_a.passed and self.condition_b.passed and self.condition_c.passed


class _Masks:
    """Bitmask view of a family: bit i = i-th ground atom in canonical order."""

    def __init__(self, family: SetFamily):
        atoms = sorted(family.ground.elements)
        self.bit = {a: 1 << i for i, a in enumerate(atoms)}
        self.atoms = atoms
        self.member_masks = [self._mask(m) for m in family.members]
        self.by_member = dict(zip(family.members, self.member_masks))

    def _mask(self, atoms: Iterable[str]) -> int:
        m = 0
        for a in atoms:
            m |= self.bit[a]
        return m

    def unmask(self, mask: int) -> Member:
        return tuple(a for a in self.atoms if self.bit[a] & mask)


def _packing_candidates(family: SetFamily, masks: _Masks, target: int) -> list[tuple[int, Member]]:
    cands = [
        (mask, member)
        for member, mask in zip(family.members, masks.member_masks)
        if mask and mask & ~target == 0
    ]
    cands.sort(key=lambda c: (-len(c[1]), c[1]))
    return cands


def _max_coverage_packing(cands: list[tuple[int, Member]], target: int) -> tuple[list[Member], int]:
    """Best pairwise-disjoint packing of ``target`` by the candidate members.

    Candidates must already be subsets of target. Returns (parts, covered
    mask); the first maximal packing in candidate DFS order wins ties.
    """
    n = len(cands)
    full = target.bit_count()
    suffix_union = [0] * (n + 1)
    for j in range(n - 1, -1, -1):
        suffix_union[j] = suffix_union[j + 1] | cands[j][0]

    best_parts: list[Member] = []
    best_mask = 0
    best_count = 0
    stack_parts: list[Member] = []

    def rec(start: int, used: int, count: int) -> bool:
        nonlocal best_parts, best_mask, best_count
        if count > best_count:
            best_count = count
            best_parts = list(stack_parts)
            best_mask = used
            if count == full:
                return True
        for j in range(start, n):
            mask, member = cands[j]
            if count + (suffix_union[j] & ~used).bit_count() <= best_count:
                break
            if mask & used:
                continue
            stack_parts.append(member)
            done = rec(j + 1, used | mask, count + mask.bit_count())
            stack_parts.pop()
            if done:
                return True
        return False

    rec(0, 0, 0)
    return best_parts, best_mask


def check_condition_b(
    family: SetFamily,
    s: Iterable[str],
    t: Iterable[str],
    cover_limit: int = DEFAULT_COVER_LIMIT,
    _masks: Optional[_Masks] = None,
) -> Optional[Decomposition]:
    """Exact cover of s∖t by pairwise disjoint members; None if impossible."""
    s = family.require(s)
    t = family.require(t)
    masks = _masks or _Masks(family)
    diff = masks.by_member[s] & ~masks.by_member[t]
    if diff.bit_count() > cover_limit:
        raise ResourceLimitError(f"|s \\ t| = {diff.bit_count()} exceeds cover limit {cover_limit}")
    if diff == 0:
        return Decomposition(parts=())
    cands = _packing_candidates(family, masks, diff)
    parts, covered = _max_coverage_packing(cands, diff)
    if covered == diff:
        return Decomposition(parts=tuple(parts))
    return None


def identity_envelope(family: SetFamily) -> dict[Member, Member]:
    return {m: m for m in family.members}


def _checked_envelope(
    family: SetFamily, envelope: Optional[Mapping[Member, Member]]
) -> dict[Member, Member]:
    if envelope is None:
        return identity_envelope(family)
    out: dict[Member, Member] = {}
    for t in family.members:
        if t not in envelope:
            raise InvalidEnvelopeError(f"envelope missing member {t!r}")
        s_t = canonical_member(envelope[t])
        if s_t not in family:
            raise InvalidEnvelopeError(f"envelope target {s_t!r} is not a family member")
        if not set(t) <= set(s_t):
            raise InvalidEnvelopeError(f"envelope target {s_t!r} does not contain {t!r}")
        out[t] = s_t
    return out


def check_condition_c(
    family: SetFamily,
    envelope: Optional[Mapping[Member, Member]] = None,
    sample_bound: int = DEFAULT_SAMPLE_BOUND,
    residual_bound: int = DEFAULT_RESIDUAL_BOUND,
    trace_budget: int = DEFAULT_TRACE_BUDGET,
    _masks: Optional[_Masks] = None,
) -> ConditionResult:
    """For every member s and every envelope tuple of length <= sample_bound,
    the trace s∖⋃s_ti must be packable by disjoint members up to the residual
    bound. Tuples are enumerated through their distinct union traces."""
    env = _checked_envelope(family, envelope)
    masks = _masks or _Masks(family)
    env_masks = [(t, masks.by_member[env[t]]) for t in family.members]
    checks = 0
    for s in family.members:
        s_mask = masks.by_member[s]
        # distinct values of s ∩ s_t with a representative t each
        traces: dict[int, Member] = {}
        for t, sm in env_masks:
            r = s_mask & sm
            if r not in traces:
                traces[r] = t
        # unions of up to sample_bound distinct traces, first-found representatives
        unions: dict[int, tuple[Member, ...]] = {}
        frontier = {r: (t,) for r, t in traces.items()}
        for _ in range(sample_bound):
            unions_next: dict[int, tuple[Member, ...]] = {}
            for u, rep in frontier.items():
                if u not in unions:
                    unions[u] = rep
                for r, t in traces.items():
                    nu = u | r
                    if nu not in unions and nu not in unions_next:
                        unions_next[nu] = rep + (t,)
            frontier = unions_next
            if not frontier:
                break
        for u, rep in unions.items():
            checks += 1
            if checks > trace_budget:
                raise ResourceLimitError(f"condition (c) trace budget {trace_budget} exceeded")
            target = s_mask & ~u
            if target == 0:
                continue
            cands = _packing_candidates(family, masks, target)
            parts, covered = _max_coverage_packing(cands, target)
            residual = (target & ~covered).bit_count()
            if residual > residual_bound:
                return ConditionResult(
                    passed=False,
                    witness={
                        "s": s,
                        "tuple": list(rep),
                        "uncovered": masks.unmask(target & ~covered),
                        "packing": [list(p) for p in parts],
                        "residual": residual,
                    },
                )
    return ConditionResult(passed=True)


def disjointify(
    family: SetFamily,
    inputs: list,
    cover_limit: int = DEFAULT_COVER_LIMIT,
    _masks: Optional[_Masks] = None,
) -> Decomposition:
    """Rewrite ⋃inputs as pairwise disjoint members, each inside some input.

    Follows the inductive proof: fold each new input through iterated
    condition-(b) decompositions against the members already kept.
    """
    canon_inputs = [family.require(m) for m in inputs]
    masks = _masks or _Masks(family)
    kept: list[Member] = []
    for s in canon_inputs:
        parts = [s]
        for t in kept:
            t_mask = masks.by_member[t]
            next_parts: list[Member] = []
            for p in parts:
                p_mask = masks.by_member[p]
                if p_mask & t_mask == 0:
                    next_parts.append(p)
                    continue
                if p_mask & ~t_mask == 0:
                    continue  # fully swallowed
                dec = check_condition_b(family, p, t, cover_limit=cover_limit, _masks=masks)
                if dec is None:
                    raise DecompositionError(
                        f"condition (b) fails for {p!r} \\ {t!r}", pair=(p, t)
                    )
                next_parts.extend(dec.parts)
            parts = next_parts
        kept.extend(parts)
    return Decomposition(parts=tuple(kept))


def check_ci(
    family: SetFamily,
    envelope: Optional[Mapping[Member, Member]] = None,
    sample_bound: int = DEFAULT_SAMPLE_BOUND,
    residual_bound: int = DEFAULT_RESIDUAL_BOUND,
    pair_budget: int = DEFAULT_PAIR_BUDGET,
    cover_limit: int = DEFAULT_COVER_LIMIT,
) -> CiReport:
    """Run all four axioms; failing conditions carry replayable witnesses."""
    masks = _Masks(family)

    missing = next((a for a in sorted(family.ground.elements) if (a,) not in family), None)
    cond_a = ConditionResult(passed=missing is None, witness=None if missing is None else {"atom": missing})

    n = len(family.members)
    if n * (n - 1) > pair_budget:
        raise ResourceLimitError(
            f"{n * (n - 1)} ordered pairs exceed budget {pair_budget}",
            partial_report={"condition_a": cond_a},
        )
    cond_b = ConditionResult(passed=True)
    for s in family.members:
        done = False
        for t in family.members:
            if s == t:
                continue
            if check_condition_b(family, s, t, cover_limit=cover_limit, _masks=masks) is None:
                cond_b = ConditionResult(passed=False, witness={"s": s, "t": t})
                done = True
                break
        if done:
            break

    cond_c = check_condition_c(
        family,
        envelope,
        sample_bound=sample_bound,
        residual_bound=residual_bound,
        _masks=masks,
    )

    max_trace = 0
    for s_mask in masks.member_masks:
        seen = {s_mask & m for m in masks.member_masks}
        max_trace = max(max_trace, len(seen))

    return CiReport(
        condition_a=cond_a,
        condition_b=cond_b,
        condition_c=cond_c,
        max_trace_size=max_trace,
        envelope_identity=envelope is None,
    )


def report_to_dict(report: CiReport) -> dict:
    def cr(result: ConditionResult) -> dict:
        out: dict = {"passed": result.passed}
        if result.witness is not None:
            witness = {}
            for key, value in result.witness.items():
                if isinstance(value, tuple):
                    witness[key] = list(value)
                else:
                    witness[key] = value
            out["witness"] = witness
        return out

    return {
        "condition_a": cr(report.condition_a),
        "condition_b": cr(report.condition_b),
        "condition_c": cr(report.condition_c),
        "envelope": "identity" if report.envelope_identity else "explicit",
        "max_trace_size": report.max_trace_size,
        "passed": report.passed,
    }
