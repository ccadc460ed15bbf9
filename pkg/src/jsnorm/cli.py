"""Command line front end.

Every command reads JSON inputs, runs one library operation, and writes a
single canonical JSON report with a ``command`` discriminator. Exit codes:
0 success, 1 domain failure (report carries the witness), 2 usage or parse
error, 3 resource budget exceeded.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from fractions import Fraction
from typing import Optional

from . import ci, norm, reznichenko, talagrand
from .core import GroundSet, canonical_member
from .errors import InputFormatError, JsnormError, ResourceLimitError
from .serialize import (
    canonical_json,
    family_from_dict,
    format_fraction,
    load_json,
    partition_from_dict,
    supports_from_dict,
    tree_from_dict,
    vector_from_dict,
    weighted_family_from_dict,
    weighted_to_dict,
)

BUDGET_DEFAULTS = {
    "oracle_limit": norm.DEFAULT_ORACLE_LIMIT,
    "cover_limit": ci.DEFAULT_COVER_LIMIT,
    "sample_bound": ci.DEFAULT_SAMPLE_BOUND,
    "pair_budget": ci.DEFAULT_PAIR_BUDGET,
    "trace_budget": ci.DEFAULT_TRACE_BUDGET,
    "grid_budget": talagrand.DEFAULT_GRID_BUDGET,
    "family_budget": talagrand.DEFAULT_FAMILY_BUDGET,
    "segment_budget": reznichenko.DEFAULT_SEGMENT_BUDGET,
    "enum_budget": reznichenko.DEFAULT_ENUM_BUDGET,
}

ENV_BUDGET_VAR = "JSNORM_BUDGET_OVERRIDE"


def _resolve_budgets(args) -> dict[str, int]:
    budgets = dict(BUDGET_DEFAULTS)
    raw = os.environ.get(ENV_BUDGET_VAR)
    if raw:
        try:
            overrides = json.loads(raw)
        except json.JSONDecodeError as exc:
            raise InputFormatError(f"{ENV_BUDGET_VAR} is not valid JSON: {exc}") from exc
        if not isinstance(overrides, dict):
            raise InputFormatError(f"{ENV_BUDGET_VAR} must be a JSON object")
        for key, value in overrides.items():
            if key not in budgets:
                raise InputFormatError(f"unknown budget {key!r} in {ENV_BUDGET_VAR}")
            budgets[key] = value
    if getattr(args, "oracle_limit", None) is not None:
        budgets["oracle_limit"] = args.oracle_limit
    for key, value in budgets.items():
        if not isinstance(value, int) or value <= 0:
            raise ResourceLimitError(f"budget {key} must be a positive integer, got {value!r}")
    return budgets


def _member_list(members) -> list[list[str]]:
    return [list(m) for m in members]


def _load_envelope(path: Optional[str]):
    if path is None:
        return None
    payload = load_json(path)
    pairs = payload.get("envelope") if isinstance(payload, dict) else payload
    if not isinstance(pairs, list):
        raise InputFormatError("envelope file must hold a list of [t, s_t] pairs")
    try:
        return {canonical_member(t): canonical_member(s) for t, s in pairs}
    except (TypeError, ValueError) as exc:
        raise InputFormatError(f"malformed envelope pair: {exc}") from exc


def _cmd_check_ci(args, budgets) -> tuple[dict, int]:
    family = family_from_dict(load_json(args.family))
    envelope = _load_envelope(args.envelope)
    report = ci.check_ci(
        family,
        envelope,
        sample_bound=budgets["sample_bound"],
        pair_budget=budgets["pair_budget"],
        cover_limit=budgets["cover_limit"],
    )
    payload = {"command": "check-ci", **ci.report_to_dict(report)}
    return payload, 0 if report.passed else 1


def _cmd_norm(args, budgets) -> tuple[dict, int]:
    if (args.family is None) == (args.tree is None):
        raise InputFormatError("norm needs exactly one of --family or --tree")
    if args.family is not None:
        family = family_from_dict(load_json(args.family))
        phi = vector_from_dict(load_json(args.vector), family.ground)
        result = norm.norm_oracle(family, phi, oracle_limit=budgets["oracle_limit"])
    else:
        tree = tree_from_dict(load_json(args.tree))
        phi = vector_from_dict(load_json(args.vector), tree.ground_set())
        result = norm.norm_tree_dp(tree, phi)
    payload = {
        "command": "norm",
        "norm_sq": format_fraction(result.norm_sq),
        "norm_decimal": result.norm_decimal(args.precision),
        "witness": _member_list(result.witness),
        "method": result.method,
    }
    return payload, 0


def _cmd_norm_re(args, budgets) -> tuple[dict, int]:
    sets, ground = weighted_family_from_dict(load_json(args.weighted))
    phi = vector_from_dict(load_json(args.vector), ground)
    result = norm.norm_weighted(sets, phi, oracle_limit=budgets["oracle_limit"])
    payload = {
        "command": "norm-re",
        "norm_sq": format_fraction(result.norm_sq),
        "norm_decimal": result.norm_decimal(args.precision),
        "witness": [weighted_to_dict(g) for g in result.witness],
        "method": result.method,
    }
    return payload, 0


def _cmd_disjointify(args, budgets) -> tuple[dict, int]:
    family = family_from_dict(load_json(args.family))
    payload_in = load_json(args.members)
    members = payload_in.get("members") if isinstance(payload_in, dict) else payload_in
    if not isinstance(members, list):
        raise InputFormatError("members file must hold a list of members")
    result = ci.disjointify(family, members, cover_limit=budgets["cover_limit"])
    return {"command": "disjointify", "parts": _member_list(result.parts)}, 0


def _cmd_build_reznichenko(args, budgets) -> tuple[dict, int]:
    params = reznichenko.ReznParams(
        n_trees=args.trees,
        stages=args.stages,
        label_pool=args.pool,
        rng_seed=args.seed,
    )
    sys_ = reznichenko.build(params, enum_budget=budgets["enum_budget"])
    return {"command": "build-reznichenko", "system": reznichenko.system_to_dict(sys_)}, 0


def _witness_dict(w: Optional[reznichenko.PartitionWitness]):
    if w is None:
        return None
    return {
        "member": list(w.member),
        "tree": w.tree,
        "block": w.block,
        "intersection": list(w.intersection),
        "per_block_counts": {str(k): v for k, v in w.per_block_counts.items()},
    }


def _cmd_search_partition(args, budgets) -> tuple[dict, int]:
    payload_in = load_json(args.system)
    if isinstance(payload_in, dict) and "system" in payload_in:
        payload_in = payload_in["system"]  # accept a build report directly
    sys_ = reznichenko.system_from_dict(payload_in)
    blocks = partition_from_dict(load_json(args.partition))
    gamma_d = None
    if args.gamma_d is not None:
        gamma_d = partition_from_dict(load_json(args.gamma_d))
    witness = reznichenko.partition_search(sys_, blocks, gamma_d, threshold=args.threshold)
    return {"command": "search-partition", "witness": _witness_dict(witness)}, 0


def _cmd_qe_search(args, budgets) -> tuple[dict, int]:
    family = family_from_dict(load_json(args.family))
    gamma_d = partition_from_dict(load_json(args.gamma_d))
    gamma_n = partition_from_dict(load_json(args.gamma_n))
    witness = talagrand.qe_partition_search(family, gamma_d, gamma_n, threshold=args.threshold)
    if witness is None:
        return {"command": "qe-search", "witness": None}, 0
    payload = {
        "command": "qe-search",
        "witness": {
            "s": list(witness.s),
            "n0": witness.n0,
            "intersection": list(witness.intersection),
            "per_d_counts": {str(k): v for k, v in witness.per_d_counts.items()},
        },
    }
    return payload, 0


def _character_strata(family) -> dict:
    """Stratum = first differing character position; valid for digit grids
    with branching at most 10. Singletons sit in stratum 1."""
    strata = {}
    for m in family.members:
        if len(m) == 1:
            strata[m] = 1
            continue
        a, b = m[0], m[1]
        pos = next((i for i, (x, y) in enumerate(zip(a, b)) if x != y), None)
        if pos is None:
            raise InputFormatError(f"members of {m!r} are not distinct sequences")
        strata[m] = pos + 1
    return strata


def _cmd_eberleinize(args, budgets) -> tuple[dict, int]:
    family = family_from_dict(load_json(args.family))
    if args.strata is not None:
        payload_in = load_json(args.strata)
        rows = payload_in.get("strata") if isinstance(payload_in, dict) else payload_in
        if not isinstance(rows, list):
            raise InputFormatError("strata file must hold a list of [member, n] pairs")
        try:
            strata = {canonical_member(m): int(n) for m, n in rows}
        except (TypeError, ValueError) as exc:
            raise InputFormatError(f"malformed strata row: {exc}") from exc
    elif family.provenance == "admissible":
        strata = _character_strata(family)
    else:
        strata = {m: 1 for m in family.members}
    sets = talagrand.eberleinize(family, strata)
    payload = {
        "command": "eberleinize",
        "ground": list(family.ground.elements),
        "weighted": [weighted_to_dict(g)["weights"] for g in sets],
    }
    return payload, 0


def _cmd_saturate(args, budgets) -> tuple[dict, int]:
    supports, gamma_atoms = supports_from_dict(load_json(args.supports))
    delta = GroundSet(sorted(supports))
    if gamma_atoms is None:
        atoms = sorted({g for atoms in supports.values() for g in atoms})
        if not atoms:
            raise InputFormatError("supports file names no gamma atoms")
        gamma = GroundSet(atoms)
    else:
        gamma = GroundSet(gamma_atoms)
    result = talagrand.saturation_partition(gamma, delta, supports)
    payload = {
        "command": "saturate",
        "gamma_blocks": _member_list(result.gamma_blocks),
        "delta_blocks": _member_list(result.delta_blocks),
    }
    return payload, 0


def _cmd_suite(args, budgets) -> tuple[dict, int]:
    from . import suite

    report = suite.run_acceptance_suite(seed=args.seed, budgets=budgets)
    return report, 0 if report["passed"] else 1


HANDLERS = {
    "check-ci": _cmd_check_ci,
    "norm": _cmd_norm,
    "norm-re": _cmd_norm_re,
    "disjointify": _cmd_disjointify,
    "build-reznichenko": _cmd_build_reznichenko,
    "search-partition": _cmd_search_partition,
    "qe-search": _cmd_qe_search,
    "eberleinize": _cmd_eberleinize,
    "saturate": _cmd_saturate,
    "suite": _cmd_suite,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="jsnorm",
        description="Set-family norms, axiom checkers, and tree-system searches.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name: str, **flags) -> argparse.ArgumentParser:
        p = sub.add_parser(name)
        p.add_argument("--out", help="write the JSON report here instead of stdout")
        p.add_argument("--precision", type=int, default=50, help="decimal digits for square roots")
        p.add_argument("--oracle-limit", type=int, default=None, dest="oracle_limit")
        return p

    p = add("check-ci")
    p.add_argument("--family", required=True)
    p.add_argument("--envelope", default=None)

    p = add("norm")
    p.add_argument("--family", default=None)
    p.add_argument("--tree", default=None)
    p.add_argument("--vector", required=True)

    p = add("norm-re")
    p.add_argument("--weighted", required=True)
    p.add_argument("--vector", required=True)

    p = add("disjointify")
    p.add_argument("--family", required=True)
    p.add_argument("--members", required=True)

    p = add("build-reznichenko")
    p.add_argument("--trees", type=int, default=8)
    p.add_argument("--stages", type=int, default=32)
    p.add_argument("--pool", type=int, default=64)
    p.add_argument("--seed", type=int, default=0)

    p = add("search-partition")
    p.add_argument("--system", required=True)
    p.add_argument("--partition", required=True)
    p.add_argument("--gamma-d", default=None, dest="gamma_d")
    p.add_argument("--threshold", type=int, default=1)

    p = add("qe-search")
    p.add_argument("--family", required=True)
    p.add_argument("--gamma-d", required=True, dest="gamma_d")
    p.add_argument("--gamma-n", required=True, dest="gamma_n")
    p.add_argument("--threshold", type=int, default=1)

    p = add("eberleinize")
    p.add_argument("--family", required=True)
    p.add_argument("--strata", default=None)

    p = add("saturate")
    p.add_argument("--supports", required=True)

    p = add("suite")
    p.add_argument("--seed", type=int, default=0)

    return parser


def _emit(payload: dict, out_path: Optional[str]) -> None:
    text = canonical_json(payload)
    if out_path:
        with open(out_path, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def main(argv: Optional[list[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)

    command = args.command
    if not 10 <= args.precision <= 200:
        _emit(
            {
                "command": command,
                "error": {"code": "input-format", "message": "precision must be in [10, 200]"},
            },
            args.out,
        )
        return 2

    try:
        budgets = _resolve_budgets(args)
        payload, code = HANDLERS[command](args, budgets)
    except InputFormatError as exc:
        payload, code = {
            "command": command,
            "error": {"code": exc.code, "message": str(exc)},
        }, 2
    except ResourceLimitError as exc:
        payload, code = {
            "command": command,
            "error": {"code": exc.code, "message": str(exc)},
        }, 3
    except JsnormError as exc:
        error = {"code": exc.code, "message": str(exc)}
        pair = getattr(exc, "pair", None)
        if pair is not None:
            error["witness"] = {"s": list(pair[0]), "t": list(pair[1])}
        payload, code = {"command": command, "error": error}, 1
    except OSError as exc:
        payload, code = {
            "command": command,
            "error": {"code": "input-format", "message": str(exc)},
        }, 2
    _emit(payload, args.out)
    return code


def entrypoint() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entrypoint()
