"""Admissible sequence sets over a digit grid, and the saturation partition.

Run with:  python demos/talagrand_grid.py
"""

from jsnorm import (
    admissible_family,
    eberleinize,
    GroundSet,
    is_admissible,
    qe_partition_search,
    saturation_partition,
    SeqGrid,
)


def main() -> None:
    grid = SeqGrid(branching=3, length=2)
    points = grid.elements
    print(f"grid: sequences of length {grid.length} over {grid.branching} "
          f"digits, {len(points)} points")

    # Admissible = pairwise first-disagreement happens at one shared position.
    good = is_admissible(grid, ["00", "10", "20"])
    bad = is_admissible(grid, ["00", "10", "01"])
    print(f"  ['00','10','20'] -> {good}")
    print(f"  ['00','10','01'] -> {bad}")

    family, strata = admissible_family(grid, max_size=3)
    sizes = sorted({len(m) for m in family.members})
    print(f"\nall admissible sets of size <= 3: {len(family.members)} members, "
          f"sizes {sizes}")

    # Eberleinization: a member of stratum n becomes the indicator scaled
    # by 1/n, so deeper strata contribute flatter functionals.
    weighted = eberleinize(family, strata)
    w = max(weighted, key=lambda ws: len(ws.support))
    stratum = strata[w.support]
    print(f"largest weighted member: support={w.support}, stratum={stratum}, "
          f"weights all {w.weights[w.support[0]]} (= 1/{stratum})")

    # Quantifier-elimination style search: find a member spread across
    # blocks of one partition while confined to a block of the other.
    gamma_d = [[e] for e in points]  # singletons
    gamma_n = [list(points)]         # one big block
    hit = qe_partition_search(family, gamma_d, gamma_n, threshold=3)
    print(f"\nmember meeting >= 3 singleton blocks inside one n-block: "
          f"{hit.s if hit else None}")

    # Saturation: bipartite incidence components become matched partitions.
    gamma = GroundSet(["g1", "g2", "g3", "g4"])
    delta = GroundSet(["d1", "d2", "d3"])
    supports = {"d1": ["g1", "g2"], "d2": ["g2", "g3"], "d3": ["g4"]}
    sat = saturation_partition(gamma, delta, supports)
    print(f"\nsaturation blocks (gamma): {sat.gamma_blocks}")
    print(f"saturation blocks (delta): {sat.delta_blocks}")


if __name__ == "__main__":
    main()
