"""Finite staged construction of an entangled system of trees.

Atoms are stage:label pairs. Tree n starts as the single root 0:n; at each
later stage we enumerate extension requests (a set of tree indices plus
pairwise disjoint root-anchored chains, one per tree) and satisfy up to
label_pool of them, adjoining one fresh node per satisfied request as a new
child in every requested tree. When the request count exceeds the pool, a
seeded generator draws which ones survive; the stage log records exactly
what happened so the lossiness stays visible.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

from .core import FiniteTree, GroundSet, Member, SetFamily, canonical_member
from .errors import (
    IndexOutOfRangeError,
    InputFormatError,
    InvalidPartitionError,
    MissingStratumError,
    ResourceLimitError,
)
from .talagrand import validate_partition

DEFAULT_SEGMENT_BUDGET = 200_000
DEFAULT_ENUM_BUDGET = 100_000
SAMPLE_RETRIES = 64

LCG_MULT = 6364136223846793005
LCG_INC = 1442695040888963407
LCG_MOD = 1 << 64


class Lcg64:
    """64-bit linear congruential generator, constants fixed for replay."""

    def __init__(self, seed: int):
        self.state = seed % LCG_MOD

    def next(self) -> int:
        self.state = (self.state * LCG_MULT + LCG_INC) % LCG_MOD
        return self.state

    def bounded(self, n: int) -> int:
        if n <= 0:
            raise ValueError("bound must be positive")
        return self.next() % n


def node_name(stage: int, label: int) -> str:
    return f"{stage}:{label}"


def node_key(atom: str) -> tuple[int, int]:
    try:
        a, b = atom.split(":")
        return int(a), int(b)
    except ValueError as exc:
        raise InputFormatError(f"node name {atom!r} is not stage:label") from exc


@dataclass(frozen=True)
class ReznParams:
    n_trees: int = 8
    stages: int = 32
    label_pool: int = 64
    rng_seed: int = 0

    def __post_init__(self):
        if self.n_trees < 2:
            raise InputFormatError("need at least 2 trees")
        if self.stages < 1:
            raise InputFormatError("need at least 1 stage")
        # roots occupy labels 1..n_trees at stage 0, so the pool must exceed them
        if self.label_pool <= self.n_trees:
            raise InputFormatError("label_pool must exceed n_trees")
        if not 0 <= self.rng_seed < LCG_MOD:
            raise InputFormatError("rng_seed must be an unsigned 64-bit integer")


@dataclass(frozen=True)
class ExtensionRequest:
    """Tree indices with one root-anchored chain each, pairwise disjoint."""

    trees: tuple[int, ...]
    segments: tuple[Member, ...]

    def __post_init__(self):
        if len(self.trees) != len(self.segments):
            raise InputFormatError("one segment per requested tree")
        seen: set[str] = set()
        for seg in self.segments:
            for a in seg:
                if a in seen:
                    raise InputFormatError("request segments must be pairwise disjoint")
                seen.add(a)


@dataclass(frozen=True)
class SatisfiedRequest:
    label: int
    request: ExtensionRequest


@dataclass(frozen=True)
class StageRecord:
    stage: int
    satisfied: tuple[SatisfiedRequest, ...]
    exceeded_pool: bool
    total_requests: Optional[int]  # None when only "more than the pool" is known


@dataclass(frozen=True)
class ReznSystem:
    params: ReznParams
    gamma: GroundSet
    trees: dict[int, FiniteTree]
    stage_log: tuple[StageRecord, ...]

    def level_map(self, n: int) -> dict[str, int]:
        tree = self.tree(n)
        return {v: len(tree.ancestors(v)) - 1 for v in tree.nodes}

    def tree(self, n: int) -> FiniteTree:
        if n not in self.trees:
            raise IndexOutOfRangeError(f"no tree {n}; indices run 1..{self.params.n_trees}")
        return self.trees[n]


class _TreeState:
    """Mutable per-tree view during the build: numeric-order node list plus
    precomputed root-anchored chains."""

    def __init__(self, root: str):
        self.parent: dict[str, Optional[str]] = {root: None}
        self.nodes: list[str] = [root]
        self.chain_sets: dict[str, frozenset] = {root: frozenset((root,))}

    def add(self, node: str, parent: str) -> None:
        self.parent[node] = parent
        self.nodes.append(node)
        self.chain_sets[node] = self.chain_sets[parent] | {node}


def _enumerate_requests(
    states: dict[int, _TreeState],
    snapshot: dict[int, int],
    n_trees: int,
    limit: int,
    enum_budget: int,
) -> tuple[list[ExtensionRequest], bool, Optional[int]]:
    """Valid requests in canonical order, stopping after ``limit`` of them.

    Returns (first requests up to limit, exceeded flag, exact total or None).
    The combo scan itself is budgeted; running past the budget counts as
    exceeding the pool since the exact total is then unknown.
    """
    found: list[ExtensionRequest] = []
    scanned = 0
    for k in range(2, n_trees + 1):
        for trees in itertools.combinations(range(1, n_trees + 1), k):
            ranges = [range(snapshot[n]) for n in trees]
            for pick in itertools.product(*ranges):
                scanned += 1
                if scanned > enum_budget:
                    return found, True, None
                chains = [states[n].chain_sets[states[n].nodes[i]] for n, i in zip(trees, pick)]
                total = sum(len(c) for c in chains)
                union = frozenset().union(*chains)
                if len(union) != total:
                    continue
                found.append(
                    ExtensionRequest(
                        trees=trees,
                        segments=tuple(canonical_member(c) for c in chains),
                    )
                )
                if len(found) > limit:
                    return found, True, None
    return found, False, len(found)


def build(params: ReznParams, enum_budget: int = DEFAULT_ENUM_BUDGET) -> ReznSystem:
    """Run the staged construction under the given parameters."""
    states = {n: _TreeState(node_name(0, n)) for n in range(1, params.n_trees + 1)}
    rng = Lcg64(params.rng_seed)
    log: list[StageRecord] = []

    for stage in range(1, params.stages):
        snapshot = {n: len(states[n].nodes) for n in states}
        requests, exceeded, total = _enumerate_requests(
            states, snapshot, params.n_trees, params.label_pool, enum_budget
        )
        satisfied: list[SatisfiedRequest] = []
        if not exceeded:
            for label, req in enumerate(requests):
                satisfied.append(SatisfiedRequest(label=label, request=req))
        else:
            seen_keys: set = set()
            for label in range(params.label_pool):
                for _ in range(SAMPLE_RETRIES):
                    size = 2 + rng.bounded(params.n_trees - 1)
                    deck = list(range(1, params.n_trees + 1))
                    for i in range(size):
                        j = i + rng.bounded(params.n_trees - i)
                        deck[i], deck[j] = deck[j], deck[i]
                    trees = tuple(sorted(deck[:size]))
                    chains = []
                    for n in trees:
                        w = states[n].nodes[rng.bounded(snapshot[n])]
                        chains.append(states[n].chain_sets[w])
                    total_len = sum(len(c) for c in chains)
                    union = frozenset().union(*chains)
                    if len(union) != total_len:
                        continue
                    key = (trees, tuple(canonical_member(c) for c in chains))
                    if key in seen_keys:
                        continue
                    seen_keys.add(key)
                    satisfied.append(
                        SatisfiedRequest(
                            label=label,
                            request=ExtensionRequest(trees=key[0], segments=key[1]),
                        )
                    )
                    break
        for sat in satisfied:
            node = node_name(stage, sat.label)
            for n, seg in zip(sat.request.trees, sat.request.segments):
                tip = max(seg, key=node_key)
                states[n].add(node, tip)
        log.append(
            StageRecord(
                stage=stage,
                satisfied=tuple(satisfied),
                exceeded_pool=exceeded,
                total_requests=total,
            )
        )

    gamma = GroundSet(
        node_name(s, t) for s in range(params.stages) for t in range(params.label_pool)
    )
    trees = {n: FiniteTree(states[n].parent) for n in states}
    return ReznSystem(params=params, gamma=gamma, trees=trees, stage_log=tuple(log))


def _comparable_pairs(tree: FiniteTree) -> set[frozenset]:
    """All unordered pairs of distinct comparable nodes.

    Two root-anchored chains of different trees share two points exactly when
    some such pair is comparable in both trees, so intersecting these sets
    across trees decides near-disjointness without walking every chain pair.
    """
    out: set[frozenset] = set()
    for v in tree.nodes:
        chain = tree.ancestors(v)
        for u in chain[1:]:
            out.add(frozenset((u, v)))
    return out


def verify_system(
    sys: ReznSystem,
    sample: int = 1000,
    rng_seed: Optional[int] = None,
    full: bool = False,
) -> dict:
    """Re-check the construction invariants; returns a per-check report.

    With ``full`` set, extension and near-disjointness checks scan everything
    instead of sampling.
    """
    params = sys.params
    checks: dict[str, dict] = {}

    bound_failures = []
    for n in range(1, params.n_trees + 1):
        tree = sys.tree(n)
        if set(tree.roots) != {node_name(0, n)}:
            bound_failures.append({"tree": n, "roots": list(tree.roots)})
        for v in tree.nodes:
            stage, label = node_key(v)
            if not (0 <= stage < params.stages and 0 <= label < params.label_pool):
                bound_failures.append({"tree": n, "node": v})
    checks["bounds"] = {"passed": not bound_failures, "failures": bound_failures[:5]}

    stage_failures = []
    added: dict[int, set[str]] = {n: set() for n in range(1, params.n_trees + 1)}
    for rec in sys.stage_log:
        for sat in rec.satisfied:
            node = node_name(rec.stage, sat.label)
            for n in sat.request.trees:
                added[n].add(node)
    for n in range(1, params.n_trees + 1):
        tree = sys.tree(n)
        non_roots = set(tree.nodes) - {node_name(0, n)}
        if non_roots != added[n]:
            stage_failures.append({"tree": n, "log_mismatch": True})
        for v in tree.nodes:
            p = tree.parent[v]
            if p is not None and node_key(p)[0] >= node_key(v)[0]:
                stage_failures.append({"tree": n, "node": v, "parent": p})
    checks["stage_monotone"] = {"passed": not stage_failures, "failures": stage_failures[:5]}

    all_sat = [
        (rec.stage, sat) for rec in sys.stage_log for sat in rec.satisfied
    ]
    rng = Lcg64(params.rng_seed if rng_seed is None else rng_seed)
    ext_failures = []
    ext_checked = 0
    if all_sat:
        if full:
            picks = all_sat
        else:
            picks = [
                all_sat[rng.bounded(len(all_sat))]
                for _ in range(min(sample, len(all_sat) * 4))
            ]
        for stage, sat in picks:
            node = node_name(stage, sat.label)
            ext_checked += 1
            for n, seg in zip(sat.request.trees, sat.request.segments):
                tree = sys.tree(n)
                chain = tree.ancestors(node)
                if set(chain[1:]) != set(seg) or tree.parent[node] != max(seg, key=node_key):
                    ext_failures.append({"tree": n, "node": node, "segment": list(seg)})
    checks["extensions"] = {
        "passed": not ext_failures,
        "checked": ext_checked,
        "failures": ext_failures[:5],
    }

    nd_failures = []
    nd_checked = 0
    if full or params.stages <= 6:
        pair_sets = {n: _comparable_pairs(sys.tree(n)) for n in sys.trees}
        for n, m in itertools.combinations(sorted(pair_sets), 2):
            nd_checked += 1
            clash = pair_sets[n] & pair_sets[m]
            if clash:
                pair = sorted(sorted(p) for p in clash)[0]
                nd_failures.append({"trees": [n, m], "nodes": pair})
        mode = "exhaustive"
    else:
        for _ in range(sample):
            n = 1 + rng.bounded(params.n_trees)
            m = 1 + rng.bounded(params.n_trees)
            if n == m:
                continue
            tn, tm = sys.tree(n), sys.tree(m)
            a = tn.nodes[rng.bounded(len(tn.nodes))]
            b = tm.nodes[rng.bounded(len(tm.nodes))]
            nd_checked += 1
            shared = set(tn.ancestors(a)) & set(tm.ancestors(b))
            if len(shared) > 1:
                nd_failures.append({"trees": [n, m], "nodes": sorted(shared)[:2]})
        mode = "sampled"
    checks["near_disjoint"] = {
        "passed": not nd_failures,
        "checked": nd_checked,
        "mode": mode,
        "failures": nd_failures[:5],
    }

    checks["passed"] = all(
        c["passed"] for name, c in checks.items() if isinstance(c, dict)
    )
    return checks


def segment_family(
    sys: ReznSystem,
    adjoin_ground: bool = False,
    segment_budget: int = DEFAULT_SEGMENT_BUDGET,
) -> SetFamily:
    """Every chain of every tree as a set family; optionally all ground
    singletons are adjoined so the family covers unused atoms too."""
    members: set[Member] = set()
    for n in sorted(sys.trees):
        tree = sys.trees[n]
        for w in tree.nodes:
            chain = tree.ancestors(w)
            for i in range(1, len(chain) + 1):
                members.add(canonical_member(chain[:i]))
                if len(members) > segment_budget:
                    raise ResourceLimitError(f"segment count exceeds budget {segment_budget}")
    if adjoin_ground:
        for a in sys.gamma.elements:
            members.add((a,))
            if len(members) > segment_budget:
                raise ResourceLimitError(f"segment count exceeds budget {segment_budget}")
    return SetFamily(sys.gamma, members, provenance="reznichenko")


def _is_segment_of(tree: FiniteTree, member: Member) -> bool:
    atoms = set(member)
    if not atoms <= set(tree.nodes):
        return False
    deepest = max(member, key=lambda v: len(tree.ancestors(v)))
    chain = tree.ancestors(deepest)
    if not atoms <= set(chain):
        return False
    idx = [chain.index(a) for a in atoms]
    return max(idx) - min(idx) + 1 == len(atoms)


def segment_strata(sys: ReznSystem, family: SetFamily) -> dict[Member, int]:
    """Stratum of a member: the least tree it is a segment of; adjoined
    singletons outside every tree land in stratum 1."""
    strata: dict[Member, int] = {}
    for m in family.members:
        n = next((n for n in sorted(sys.trees) if _is_segment_of(sys.trees[n], m)), None)
        if n is None:
            if len(m) == 1:
                n = 1
            else:
                raise MissingStratumError(f"{m!r} is not a segment of any tree")
        strata[m] = n
    return strata


def levels_partition(sys: ReznSystem, phi: Sequence[int]) -> Member:
    """Union over i of the phi[i]-th level of tree i+1."""
    if not phi:
        raise IndexOutOfRangeError("phi must name at least one level")
    if len(phi) > sys.params.n_trees:
        raise IndexOutOfRangeError(
            f"phi has {len(phi)} entries but there are {sys.params.n_trees} trees"
        )
    atoms: set[str] = set()
    for i, k in enumerate(phi, start=1):
        if not isinstance(k, int) or k < 0:
            raise IndexOutOfRangeError(f"level {k!r} is not a natural number")
        levels = sys.level_map(i)
        picked = [v for v, lv in levels.items() if lv == k]
        if not picked:
            raise IndexOutOfRangeError(f"tree {i} has no level {k}")
        atoms.update(picked)
    return canonical_member(atoms)


@dataclass(frozen=True)
class PartitionWitness:
    member: Member
    tree: int
    block: int
    intersection: Member
    per_block_counts: dict[int, int] = field(hash=False, default_factory=dict)


def _scan_witness(
    sys: ReznSystem,
    d_of: dict[str, int],
    g_of: Optional[dict[str, int]],
    threshold: int,
) -> Optional[PartitionWitness]:
    for n in sorted(sys.trees):
        tree = sys.trees[n]
        for w in sorted(tree.nodes):
            counts: dict[int, int] = {}
            gcounts: dict[int, int] = {}
            segment: list[str] = []
            hit: Optional[int] = None
            for u in tree.ancestors(w):
                segment.append(u)
                if g_of is not None:
                    g = g_of[u]
                    gcounts[g] = gcounts.get(g, 0) + 1
                    if gcounts[g] > 1:
                        break
                d = d_of[u]
                counts[d] = counts.get(d, 0) + 1
                if hit is None and counts[d] >= threshold:
                    hit = d
                if hit is not None:
                    member = canonical_member(segment)
                    return PartitionWitness(
                        member=member,
                        tree=n,
                        block=hit,
                        intersection=canonical_member(a for a in segment if d_of[a] == hit),
                        per_block_counts=dict(sorted(counts.items())),
                    )
    return None


def _greedy_witness(
    sys: ReznSystem,
    d_of: dict[str, int],
    g_of: Optional[dict[str, int]],
    threshold: int,
) -> Optional[PartitionWitness]:
    """Grow one root chain per tree, always stepping toward a repeated block."""
    for n in sorted(sys.trees):
        tree = sys.trees[n]
        node = tree.roots[0]
        chain = [node]
        counts: dict[int, int] = {d_of[node]: 1}
        gcounts: dict[int, int] = {}
        if g_of is not None:
            gcounts[g_of[node]] = 1
        while True:
            best = max(counts.values())
            if best >= threshold:
                hit = min(d for d, c in counts.items() if c >= threshold)
                return PartitionWitness(
                    member=canonical_member(chain),
                    tree=n,
                    block=hit,
                    intersection=canonical_member(a for a in chain if d_of[a] == hit),
                    per_block_counts=dict(sorted(counts.items())),
                )
            step = None
            step_gain = -1
            for c in tree.children(node):
                if g_of is not None and gcounts.get(g_of[c], 0) >= 1:
                    continue
                gain = counts.get(d_of[c], 0)
                if gain > step_gain:
                    step, step_gain = c, gain
            if step is None:
                break
            node = step
            chain.append(node)
            counts[d_of[node]] = counts.get(d_of[node], 0) + 1
            if g_of is not None:
                gcounts[g_of[node]] = gcounts.get(g_of[node], 0) + 1
    return None


def partition_search(
    sys: ReznSystem,
    d_partition: Iterable[Iterable[str]],
    gamma_d: Optional[Iterable[Iterable[str]]] = None,
    threshold: int = 1,
) -> Optional[PartitionWitness]:
    """Segment meeting one block of d_partition at least ``threshold`` times
    while meeting every block of gamma_d (when given) at most once.

    A greedy per-tree chain growth runs first; if it stalls, an incremental
    exhaustive scan over all segments settles the answer, so None really
    means no witness exists.
    """
    if threshold < 1:
        raise InvalidPartitionError("threshold must be at least 1")
    d_blocks = validate_partition(sys.gamma, d_partition, name="d_partition")
    d_of = {a: i for i, block in enumerate(d_blocks) for a in block}
    g_of = None
    if gamma_d is not None:
        g_blocks = validate_partition(sys.gamma, gamma_d, name="gamma_d")
        g_of = {a: i for i, block in enumerate(g_blocks) for a in block}
    witness = _greedy_witness(sys, d_of, g_of, threshold)
    if witness is not None:
        return witness
    return _scan_witness(sys, d_of, g_of, threshold)


def system_to_dict(sys: ReznSystem) -> dict:
    return {
        "params": {
            "n_trees": sys.params.n_trees,
            "stages": sys.params.stages,
            "label_pool": sys.params.label_pool,
            "rng_seed": sys.params.rng_seed,
        },
        "trees": {
            str(n): {v: sys.trees[n].parent[v] for v in sorted(sys.trees[n].nodes)}
            for n in sorted(sys.trees)
        },
        "stage_log": [
            {
                "stage": rec.stage,
                "exceeded_pool": rec.exceeded_pool,
                "total_requests": rec.total_requests,
                "satisfied": [
                    {
                        "label": sat.label,
                        "trees": list(sat.request.trees),
                        "segments": [list(seg) for seg in sat.request.segments],
                    }
                    for sat in rec.satisfied
                ],
            }
            for rec in sys.stage_log
        ],
    }


def system_from_dict(payload: dict) -> ReznSystem:
    try:
        params = ReznParams(
            n_trees=payload["params"]["n_trees"],
            stages=payload["params"]["stages"],
            label_pool=payload["params"]["label_pool"],
            rng_seed=payload["params"]["rng_seed"],
        )
        trees = {
            int(n): FiniteTree(dict(parent_map)) for n, parent_map in payload["trees"].items()
        }
        log = tuple(
            StageRecord(
                stage=rec["stage"],
                exceeded_pool=rec["exceeded_pool"],
                total_requests=rec["total_requests"],
                satisfied=tuple(
                    SatisfiedRequest(
                        label=sat["label"],
                        request=ExtensionRequest(
                            trees=tuple(sat["trees"]),
                            segments=tuple(canonical_member(s) for s in sat["segments"]),
                        ),
                    )
                    for sat in rec["satisfied"]
                ),
            )
            for rec in payload["stage_log"]
        )
    except (KeyError, TypeError) as exc:
        raise InputFormatError(f"malformed system payload: {exc}") from exc
    gamma = GroundSet(
        node_name(s, t) for s in range(params.stages) for t in range(params.label_pool)
    )
    return ReznSystem(params=params, gamma=gamma, trees=trees, stage_log=log)
