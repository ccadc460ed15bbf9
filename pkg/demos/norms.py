"""Walk through the packing norms on a small dyadic tree.

Run with:  python demos/norms.py
"""

from fractions import Fraction

from jsnorm import (
    FinVector,
    dual_eval,
    DualCombination,
    dyadic_tree,
    norm_oracle,
    norm_tree_dp,
    norm_weighted,
    tree_segments,
    WeightedSet,
)


def main() -> None:
    tree = dyadic_tree(2)
    family = tree_segments(tree)
    print(f"dyadic tree of depth 2: {len(tree.nodes)} nodes, "
          f"{len(family.members)} segments")

    # A vector that rewards stacking the whole leftmost branch.
    phi = FinVector(family.ground, {"0:0": 1, "1:0": 1, "2:0": 1, "1:1": -2})

    res = norm_oracle(family, phi)
    print("\nexhaustive packing over segments:")
    print(f"  norm^2  = {res.norm_sq}")
    print(f"  norm    ~ {res.norm_decimal(9)}")
    print(f"  witness = {res.witness}")

    dp = norm_tree_dp(tree, phi)
    assert dp.norm_sq == res.norm_sq, "tree DP must agree with the oracle"
    print(f"  tree DP agrees: norm^2 = {dp.norm_sq} (method={dp.method})")

    # Any disjoint dual combination gives a lower bound on the norm.
    combo = DualCombination([
        (Fraction(3, 5), ("0:0", "1:0", "2:0")),
        (Fraction(-4, 5), ("1:1",)),
    ])
    val = dual_eval(combo, phi)
    print(f"\ndual combination value = {val} (must be <= norm)")
    assert val * val <= res.norm_sq

    # Weighted variant: fractional indicators scale quadratically.
    halves = [WeightedSet(family.ground, {a: Fraction(1, 2) for a in m})
              for m in family.members]
    wres = norm_weighted(halves, phi)
    print(f"\nhalf-weight packing: norm^2 = {wres.norm_sq} "
          f"(= {res.norm_sq} / 4)")
    assert wres.norm_sq * 4 == res.norm_sq


if __name__ == "__main__":
    main()
