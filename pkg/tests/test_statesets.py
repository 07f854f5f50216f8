"""Named families, set predicates, partitions, serialization."""

import random

import pytest

from lpcckit.exact import Scalar, Vec, inner
from lpcckit.generators import random_orthogonal_set
from lpcckit.statesets import (Partition, PartySpec, StateSet,
                               build_named_set, check_mutual_orthogonality,
                               is_locally_redundant, local_support_indices,
                               merge_parties, restrict_support,
                               separability_degree,
                               sets_equal_up_to_relabeling)


def test_named_set_shapes():
    cases = {"S1": ((3, 2, 3), 9), "S2": ((3, 2, 3), 9),
             "S2prime": ((3, 3, 2), 9), "S2doubleprime": ((2, 3, 3), 9),
             "Domino": ((3, 3), 9), "UnionS": ((8, 8, 8), 27)}
    for name, (dims, count) in cases.items():
        s = build_named_set(name)
        assert s.spec.dims == dims
        assert len(s) == count
        assert check_mutual_orthogonality(s)


@pytest.mark.parametrize("m", [1, 2, 3, 4])
@pytest.mark.parametrize("family", ["S1m", "S2m"])
def test_generalized_families_orthogonal(family, m):
    s = build_named_set(family, m=m)
    assert check_mutual_orthogonality(s)
    assert s.spec.dims == (2 * m + 1, 2, 2 * m + 1)


def test_family_counts_match_independent_enumeration():
    # count the index grid directly, without touching the generator
    for m in range(1, 5):
        expected = 1
        for i in range(m):
            for _k in range(m - i):
                expected += 8
        assert expected == 4 * m * (m + 1) + 1
        assert len(build_named_set("S1m", m=m)) == expected


def test_m1_degenerations():
    assert sets_equal_up_to_relabeling(build_named_set("S1m", m=1),
                                       build_named_set("S1"))
    assert sets_equal_up_to_relabeling(build_named_set("S2m", m=1),
                                       build_named_set("S2"))


def test_m_parameter_validation():
    with pytest.raises(ValueError):
        build_named_set("S1m")
    with pytest.raises(ValueError):
        build_named_set("S2m", m=0)
    with pytest.raises(ValueError):
        build_named_set("S1", m=2)


def test_s2prime_matches_published_digits():
    # first state: middle party at role level 0, the cyclic (C,A) weight
    # pattern |0>(|0>+|1>+|2>) - |1>|2> written over (A, B, C) = dims (3,3,2)
    s = build_named_set("S2prime")
    v = s.state("1")
    expect = {(0, 0, 0): 1, (1, 0, 0): 1, (2, 0, 0): 1, (2, 0, 1): -1}
    from lpcckit.indexing import index_of
    for digs, coeff in expect.items():
        assert v.entries[index_of(digs, s.spec.dims)] == Scalar(coeff)
    assert sum(1 for a in v.entries if not a.is_zero()) == 4


def test_orthogonality_witness():
    spec = PartySpec((2,))
    s = StateSet(spec, [("a", Vec([1, 0])), ("b", Vec([1, 1]))])
    verdict = check_mutual_orthogonality(s)
    assert not verdict
    assert verdict.witness[0:2] == (0, 1)
    assert verdict.witness[2] == Scalar(1)


def test_redundancy_witness():
    spec = PartySpec((2, 2, 2))
    s = StateSet(spec, [("a", Vec([1] + [0] * 7)),
                        ("b", Vec([0, 0, 0, 0, 0, 0, 1, 0]))])
    verdict = is_locally_redundant(s)
    assert verdict.redundant
    # discarding the third party keeps the first two factors orthogonal;
    # the reported witness is whichever valid discard is found first
    assert verdict.discarded_parties is not None


def test_s1_irredundant(s1):
    assert not is_locally_redundant(s1)


def test_union_irredundant(union_s):
    assert not is_locally_redundant(union_s)


def test_union_supports_disjoint(union_s):
    ranges = {"S2": ((0, 1, 2), (0, 1), (0, 1, 2)),
              "S2p": ((3, 4, 5), (2, 3, 4), (3, 4)),
              "S2pp": ((6, 7), (5, 6, 7), (5, 6, 7))}
    for tag, want in ranges.items():
        sub = StateSet(union_s.spec,
                       [(l, v) for l, v in union_s.states if l.startswith(tag + ":")])
        got = tuple(local_support_indices(sub, p) for p in range(3))
        assert got == want
    for party in range(3):
        seen = set()
        for tag in ranges:
            block = set(ranges[tag][party])
            assert not (seen & block)
            seen |= block


def test_merge_s2_a_bc(s2):
    merged = merge_parties(s2, Partition(((0,), (1, 2))))
    assert merged.spec.dims == (3, 6)
    assert check_mutual_orthogonality(merged)


def test_merge_trivial_identity(s1):
    merged = merge_parties(s1, Partition.trivial(3))
    assert merged.spec.dims == s1.spec.dims
    assert [v for _, v in merged.states] == [v for _, v in s1.states]


def test_merge_preserves_inner_products():
    rng = random.Random(5)
    for _ in range(10):
        s = random_orthogonal_set(rng, (2, 3, 2), 4, complex_amps=True)
        parts = [Partition(((0,), (1, 2))), Partition(((1,), (2, 0))),
                 Partition(((0, 2), (1,)))]
        p = rng.choice(parts)
        merged = merge_parties(s, p)
        for i in range(len(s)):
            for j in range(len(s)):
                assert inner(s.vectors()[i], s.vectors()[j]) == \
                    inner(merged.vectors()[i], merged.vectors()[j])


def test_separability_full_product():
    spec = PartySpec((2, 2, 2))
    v = Vec([1] + [0] * 7)
    m, part = separability_degree(v, spec)
    assert m == 3


def test_separability_s1_state_biseparable(s1):
    m, part = separability_degree(s1.state("1"), s1.spec)
    assert m == 2
    assert part.blocks == ((0,), (1, 2))


def test_separability_entangled():
    spec = PartySpec((2, 2))
    m, _ = separability_degree(Vec([1, 0, 0, 1]), spec)
    assert m == 1


def test_separability_scale_invariant(s1):
    v = s1.state("1")
    m1, _ = separability_degree(v, s1.spec)
    m2, _ = separability_degree(v.scale(Scalar(-7, 3)), s1.spec)
    assert m1 == m2


def test_json_round_trip(s2):
    back = StateSet.loads(s2.dumps())
    assert back.spec.dims == s2.spec.dims
    assert back.labels() == s2.labels()
    assert all(a == b for (_, a), (_, b) in zip(back.states, s2.states))


def test_json_round_trip_fractional_complex():
    from fractions import Fraction
    spec = PartySpec((2,))
    v = Vec([Scalar(Fraction(1, 3), Fraction(-2, 7)), Scalar(0, 1)])
    s = StateSet(spec, [("x", v)])
    back = StateSet.loads(s.dumps())
    assert back.state("x") == v


def test_restrict_support():
    spec = PartySpec((3, 3))
    s = StateSet(spec, [("a", Vec([0, 1, 0, 0, 0, 0, 0, 0, 0])),
                        ("b", Vec([0, 0, 0, 0, 0, 0, 0, 1, 0]))])
    small = restrict_support(s)
    assert small.spec.dims == (2, 1)
    assert check_mutual_orthogonality(small)


def test_partition_validation():
    with pytest.raises(ValueError):
        Partition(((0, 1), (1, 2)))
    p = Partition(((0,), (1,)))
    with pytest.raises(ValueError):
        p.validate(PartySpec((2, 2, 2)))
