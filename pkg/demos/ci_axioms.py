"""Check the covering/independence axioms on segment families.

Run with:  python demos/ci_axioms.py
"""

from jsnorm import (
    check_ci,
    check_condition_b,
    disjointify,
    dyadic_tree,
    report_to_dict,
    SetFamily,
    tree_segments,
)


def main() -> None:
    family = tree_segments(dyadic_tree(2))
    report = check_ci(family)
    print(f"segment family of the depth-2 dyadic tree: passed={report.passed}")
    as_dict = report_to_dict(report)
    for cond in ("condition_a", "condition_b", "condition_c"):
        print(f"  {cond}: {as_dict[cond]['passed']}")

    # Condition (b) in action: the difference of two members splits into members.
    dec = check_condition_b(family, ("0:0", "1:0", "2:0"), ("1:0",))
    print(f"\n('0:0','1:0','2:0') minus ('1:0',) decomposes as: {dec.parts}")

    # disjointify splits overlapping members into disjoint ones with the
    # same union, which is what makes the packing norms well behaved.
    pieces = disjointify(family, [("0:0", "1:0"), ("1:0", "2:0")])
    print(f"overlapping pair disjointifies into: {pieces.parts}")

    # Removing a singleton breaks the axioms, and the report says where.
    broken = SetFamily(family.ground,
                       [m for m in family.members if m != ("2:0",)])
    bad = check_ci(broken)
    print(f"\nafter deleting the singleton ('2:0',): passed={bad.passed}")
    bad_dict = report_to_dict(bad)
    failing = [c for c in ("condition_a", "condition_b", "condition_c")
               if not bad_dict[c]["passed"]]
    print(f"  failing condition(s): {failing}")
    print(f"  first witness: {bad_dict[failing[0]]['witness']}")


if __name__ == "__main__":
    main()
