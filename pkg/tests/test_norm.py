import decimal
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from jsnorm.core import (
    FiniteTree,
    FinVector,
    GroundSet,
    SetFamily,
    WeightedSet,
    dyadic_tree,
    tree_segments,
    unit_vector,
)
from jsnorm.errors import (
    GroundMismatchError,
    InvalidComboError,
    InvalidEpsilonError,
    ResourceLimitError,
)
from jsnorm.norm import (
    DecreasingL2Seq,
    DualCombination,
    dual_eval,
    functional_eval,
    greedy_bound,
    greedy_extract,
    norm_oracle,
    norm_tree_dp,
    norm_weighted,
    sqrt_decimal,
    weighted_eval,
)


def depth1():
    tree = dyadic_tree(1)
    return tree, tree_segments(tree), tree.ground_set()


def rand_vector(rnd, ground, max_support=None):
    atoms = ground.elements
    if max_support is not None:
        atoms = rnd.sample(atoms, rnd.randint(0, min(max_support, len(atoms))))
    return FinVector(
        ground, {a: Fraction(rnd.randint(-3, 3), rnd.randint(1, 4)) for a in atoms}
    )


def test_sqrt_decimal():
    assert str(sqrt_decimal(Fraction(4), 10)) == "2"
    assert str(sqrt_decimal(Fraction(1, 4), 10)) == "0.5"
    assert str(sqrt_decimal(Fraction(5), 10)) == "2.236067977"
    assert sqrt_decimal(Fraction(0)) == 0
    with pytest.raises(ValueError):
        sqrt_decimal(Fraction(-1))


def test_functional_eval():
    g = GroundSet(["a", "b", "c"])
    phi = FinVector(g, {"a": Fraction(1, 2), "b": Fraction(1, 3), "c": Fraction(1, 6)})
    assert functional_eval(("a", "b", "c"), phi) == 1
    psi = FinVector(g, {"a": 1, "b": -1})
    assert functional_eval(("a", "b"), psi) == 0
    with pytest.raises(GroundMismatchError):
        functional_eval(("z",), phi)


def test_norm_oracle_all_ones_depth1():
    _, fam, g = depth1()
    r = norm_oracle(fam, FinVector(g, {a: 1 for a in g.elements}))
    assert r.norm_sq == 5
    assert r.witness == (("0:0", "1:0"), ("1:1",))
    assert r.method == "oracle"
    assert r.norm_decimal(10) == "2.236067977"


def test_norm_oracle_cancellation():
    _, fam, g = depth1()
    r = norm_oracle(fam, FinVector(g, {"0:0": 1, "1:0": -1, "1:1": -1}))
    assert r.norm_sq == 3
    assert r.witness == (("0:0",), ("1:0",), ("1:1",))


def test_norm_oracle_unit_vector_and_zero():
    _, fam, g = depth1()
    assert norm_oracle(fam, unit_vector(g, "0:0")).norm_sq == 1
    z = norm_oracle(fam, FinVector(g, {}))
    assert z.norm_sq == 0 and z.witness == ()


def test_norm_oracle_witness_members_belong_to_family():
    _, fam, g = depth1()
    r = norm_oracle(fam, FinVector(g, {a: Fraction(1, 2) for a in g.elements}))
    for m in r.witness:
        assert m in fam


def test_norm_oracle_limit():
    _, fam, g = depth1()
    with pytest.raises(ResourceLimitError):
        norm_oracle(fam, FinVector(g, {a: 1 for a in g.elements}), oracle_limit=2)


def test_norm_oracle_ground_mismatch():
    _, fam, _ = depth1()
    other = GroundSet(["q"])
    with pytest.raises(GroundMismatchError):
        norm_oracle(fam, FinVector(other, {"q": 1}))


def test_norm_oracle_respects_overlap_outside_support():
    g = GroundSet(["a", "b", "x"])
    fam = SetFamily(g, [("a", "x"), ("b", "x")])
    phi = FinVector(g, {"a": 2, "b": 3})
    r = norm_oracle(fam, phi)
    assert r.norm_sq == 9
    assert r.witness == (("b", "x"),)


def test_norm_oracle_prefers_minimal_representative():
    g = GroundSet(["a", "b", "x"])
    fam = SetFamily(g, [("a", "x"), ("a",), ("b", "x")])
    r = norm_oracle(fam, FinVector(g, {"a": 2, "b": 3}))
    assert r.norm_sq == 13
    assert r.witness == (("a",), ("b", "x"))


def test_norm_tree_dp_path():
    tree = FiniteTree({"a": None, "b": "a", "c": "b"})
    phi = FinVector(tree.ground_set(), {"a": 1, "b": 1, "c": 1})
    r = norm_tree_dp(tree, phi)
    assert r.norm_sq == 9
    assert r.witness == (("a", "b", "c"),)
    assert r.method == "tree-dp"


def test_norm_tree_dp_matches_oracle_golden():
    tree, fam, g = depth1()
    phi = FinVector(g, {a: 1 for a in g.elements})
    assert norm_tree_dp(tree, phi).norm_sq == 5
    assert norm_tree_dp(tree, FinVector(g, {})).norm_sq == 0


def test_norm_tree_dp_ground_mismatch():
    tree = dyadic_tree(1)
    with pytest.raises(GroundMismatchError):
        norm_tree_dp(tree, FinVector(GroundSet(["q"]), {"q": 1}))


def test_norm_weighted_prefers_singletons():
    g = GroundSet(["a", "b"])
    sets = [
        WeightedSet(g, {"a": 1}),
        WeightedSet(g, {"b": 1}),
        WeightedSet(g, {"a": Fraction(1, 2), "b": Fraction(1, 2)}),
    ]
    phi = FinVector(g, {"a": 1, "b": 1})
    r = norm_weighted(sets, phi)
    assert r.norm_sq == 2
    assert [w.weights for w in r.witness] == [{"a": 1}, {"b": 1}]


def test_norm_weighted_scales_quadratically():
    g = GroundSet(["a", "b", "c"])
    s = ("a", "b", "c")
    for n in (1, 2, 3):
        scaled = WeightedSet(g, {a: Fraction(1, n) for a in s})
        phi = FinVector(g, {a: 1 for a in s})
        assert norm_weighted([scaled], phi).norm_sq == Fraction(len(s), n) ** 2


def test_weighted_eval():
    g = GroundSet(["a", "b"])
    w = WeightedSet(g, {"a": Fraction(1, 2)})
    phi = FinVector(g, {"a": 2, "b": 5})
    assert weighted_eval(w, phi) == 1
    with pytest.raises(GroundMismatchError):
        weighted_eval(WeightedSet(GroundSet(["a"]), {"a": 1}), phi)


def test_dual_combination_validation():
    with pytest.raises(InvalidComboError):
        DualCombination([(Fraction(1), ("a", "b")), (Fraction(1, 2), ("b",))])
    with pytest.raises(InvalidComboError):
        DualCombination([(1, ("a",)), (1, ("b",))])
    combo = DualCombination([(Fraction(3, 5), ("a",)), (Fraction(4, 5), ("b",))])
    assert len(combo.terms) == 2


def test_dual_eval_and_cauchy_schwarz():
    _, fam, g = depth1()
    combo = DualCombination(
        [(Fraction(3, 5), ("0:0", "1:0")), (Fraction(4, 5), ("1:1",))]
    )
    phi = FinVector(g, {a: 1 for a in g.elements})
    val = dual_eval(combo, phi)
    assert val == Fraction(3, 5) * 2 + Fraction(4, 5)
    sumsq = sum((lam * lam for lam, _ in combo.terms), Fraction(0))
    assert val * val <= sumsq * norm_oracle(fam, phi).norm_sq


def test_decreasing_l2_seq_validation():
    DecreasingL2Seq([Fraction(3, 5), Fraction(3, 5), Fraction(1, 5)])
    with pytest.raises(InvalidComboError):
        DecreasingL2Seq([Fraction(1, 2), Fraction(3, 4)])
    with pytest.raises(InvalidComboError):
        DecreasingL2Seq([Fraction(-1, 2)])
    with pytest.raises(InvalidComboError):
        DecreasingL2Seq([1, 1])


def test_greedy_bound_goldens():
    assert greedy_bound(Fraction(1, 2)) == 5
    assert greedy_bound(Fraction(1)) == 2


def test_greedy_extract_zero_vectors():
    _, fam, g = depth1()
    phis = [FinVector(g, {}) for _ in range(3)]
    cert = greedy_extract(fam, phis, Fraction(1, 2))
    assert cert.chosen_sets == ()
    assert cert.surviving_indices == (0, 1, 2)


def test_greedy_extract_picks_disjoint_certified_sets():
    _, fam, g = depth1()
    phis = [FinVector(g, {"1:0": Fraction(3, 5)}) for _ in range(4)]
    cert = greedy_extract(fam, phis, Fraction(1, 2))
    assert 1 <= len(cert.chosen_sets) <= cert.k_bound
    used = set()
    for s in cert.chosen_sets:
        assert not used.intersection(s)
        used.update(s)
    for n in cert.surviving_indices:
        for s in cert.chosen_sets:
            assert functional_eval(s, phis[n]) > Fraction(1, 2)


def test_greedy_extract_rejects_bad_epsilon_and_fat_vectors():
    _, fam, g = depth1()
    with pytest.raises(InvalidEpsilonError):
        greedy_extract(fam, [], 0)
    fat = FinVector(g, {a: 5 for a in g.elements})
    with pytest.raises(InvalidComboError):
        greedy_extract(fam, [fat], Fraction(1, 2))
    # trusted skips the unit-ball precheck
    greedy_extract(fam, [fat], Fraction(1, 2), trusted=True)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**30), st.integers(1, 3))
def test_oracle_dp_agree_on_random_vectors(seed, depth):
    rnd = random.Random(seed)
    tree = dyadic_tree(depth)
    fam = tree_segments(tree)
    phi = rand_vector(rnd, tree.ground_set())
    assert norm_oracle(fam, phi).norm_sq == norm_tree_dp(tree, phi).norm_sq


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**30))
def test_homogeneity_exact(seed):
    rnd = random.Random(seed)
    tree = dyadic_tree(2)
    fam = tree_segments(tree)
    phi = rand_vector(rnd, tree.ground_set())
    c = Fraction(rnd.choice([-3, -2, -1, 1, 2, 3]), rnd.randint(1, 4))
    assert norm_oracle(fam, phi.scale(c)).norm_sq == c * c * norm_oracle(fam, phi).norm_sq


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**30))
def test_triangle_inequality(seed):
    rnd = random.Random(seed)
    tree = dyadic_tree(2)
    fam = tree_segments(tree)
    g = tree.ground_set()
    phi, psi = rand_vector(rnd, g), rand_vector(rnd, g)
    lhs = sqrt_decimal(norm_oracle(fam, phi + psi).norm_sq)
    rhs = sqrt_decimal(norm_oracle(fam, phi).norm_sq) + sqrt_decimal(
        norm_oracle(fam, psi).norm_sq
    )
    assert lhs <= rhs + decimal.Decimal("1e-9")


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**30))
def test_l2_lower_bound_and_witness_identity(seed):
    rnd = random.Random(seed)
    tree = dyadic_tree(2)
    fam = tree_segments(tree)
    phi = rand_vector(rnd, tree.ground_set())
    r = norm_oracle(fam, phi)
    assert r.norm_sq >= sum((v * v for v in phi.entries.values()), Fraction(0))
    recomputed = sum((functional_eval(s, phi) ** 2 for s in r.witness), Fraction(0))
    assert recomputed == r.norm_sq


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**30))
def test_monotone_in_members(seed):
    rnd = random.Random(seed)
    tree = dyadic_tree(2)
    fam = tree_segments(tree)
    g = tree.ground_set()
    keep = [m for m in fam.members if len(m) == 1 or rnd.random() < 0.5]
    small = SetFamily(g, keep)
    phi = rand_vector(rnd, g)
    assert norm_oracle(small, phi).norm_sq <= norm_oracle(fam, phi).norm_sq


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**30))
def test_functional_bound(seed):
    rnd = random.Random(seed)
    tree = dyadic_tree(2)
    fam = tree_segments(tree)
    phi = rand_vector(rnd, tree.ground_set())
    nsq = norm_oracle(fam, phi).norm_sq
    m = rnd.choice(fam.members)
    assert functional_eval(m, phi) ** 2 <= nsq
