"""Activation verification, domino recognition, locality classification."""

import random

import pytest

from lpcckit.activation import (ActivationError, classify, check_dim2_nogo,
                                domino_match, is_m_activable,
                                verify_activation)
from lpcckit.exact import Scalar, Vec, tensor
from lpcckit.generators import (random_biseparable_322, random_product_set,
                                random_two_state_set)
from lpcckit.kets import parse_pvm
from lpcckit.measurements import LocalPVM, apply
from lpcckit.statesets import (Partition, PartySpec, StateSet,
                               merge_parties, separability_degree)
from lpcckit.theorems import fixture_activation, fixture_protocol


def test_domino_match_identity(domino):
    match = domino_match(domino)
    assert match is not None
    assert match.row_basis == (0, 1, 2)
    assert match.col_basis == (0, 1, 2)


def test_domino_match_rejects_wrong_sets(s2):
    merged = merge_parties(s2, Partition(((0,), (1, 2))))
    assert domino_match(merged) is None


def test_domino_match_type1_branch(s1):
    lp = LocalPVM(parse_pvm("0;1", [2]), (1,))
    branch = apply(s1, lp)[0].states
    merged = merge_parties(branch, Partition(((0,), (1, 2))))
    match = domino_match(merged)
    assert match is not None
    assert match.col_basis == (0, 1, 2)


def test_domino_match_joint_branch(s2):
    s, first, p = fixture_activation("s2_joint_activation")
    branch = apply(s, first)[0].states
    merged = merge_parties(branch, p)
    match = domino_match(merged)
    assert match is not None
    assert match.col_basis == (0, 2, 4)


def test_verify_activation_type1(s1):
    first = LocalPVM(parse_pvm("0;1", [2]), (1,))
    report = verify_activation(s1, first, Partition.trivial(3))
    assert report.asserted and report.genuine
    assert [b.domino.col_basis for b in report.branches] == [(0, 1, 2), (3, 4, 5)]
    assert all(b.certified for b in report.branches)


def test_verify_activation_joint(s2):
    s, first, p = fixture_activation("s2_joint_activation")
    _, tree = fixture_protocol("s2_discrimination")
    report = verify_activation(s, first, p, protocol=tree)
    assert report.asserted
    assert [b.domino.col_basis for b in report.branches] == [(0, 2, 4), (1, 5, 3)]


def test_single_party_cannot_activate_type2(s2):
    from lpcckit.opsolve import enumerate_op_pvms
    for party in range(3):
        for lp in enumerate_op_pvms(s2, (party,)):
            report = verify_activation(
                s2, lp, Partition.trivial(3),
                assume_distinguishable="verified elsewhere")
            assert not report.asserted


def test_activation_requires_op_first(s2):
    bad = LocalPVM(parse_pvm("0;1,2", [3]), (0,))
    with pytest.raises(ActivationError):
        verify_activation(s2, bad, Partition.trivial(3),
                          assume_distinguishable="n/a")


def test_activation_never_asserted_on_redundant_sets():
    # orthogonality is carried entirely by the first two parties, so the
    # third is redundant; activation must be refused on genuineness
    spec = PartySpec((3, 3, 2))
    states = []
    for i in range(3):
        a = Vec([1 if j == i else 0 for j in range(3)])
        states.append((str(i), tensor(a, a, Vec([1, 0]))))
    s = StateSet(spec, states)
    first = LocalPVM(parse_pvm("0;1;2", [3]), (0,))
    report = verify_activation(s, first, Partition.trivial(3),
                               assume_distinguishable="product set")
    assert not report.genuine
    assert not report.asserted


def test_classify_type1(s1):
    out = classify(s1)
    assert out.klass == "TYPE-I"
    assert out.witness.first.group == (1,)


def test_classify_type2(s2):
    out = classify(s2)
    assert out.klass == "TYPE-II"
    assert out.witness.first.group == (1, 2)


def test_classify_two_state_exact():
    rng = random.Random(3)
    for _ in range(3):
        s = random_two_state_set(rng, (2, 3))
        out = classify(s)
        assert out.klass == "strong-local-evidence" and out.exact


def test_classify_product_nx2_exact():
    rng = random.Random(9)
    for _ in range(3):
        s = random_product_set(rng, (rng.randint(2, 4), 2), 4)
        out = classify(s)
        assert out.klass == "strong-local-evidence" and out.exact


def test_classify_domino_indistinguishable(domino):
    out = classify(domino)
    assert out.klass == "indistinguishable-already"


def test_classify_invariant_under_scaling_and_relabeling(s1):
    rng = random.Random(12)
    scaled = [(f"x{i}", v.scale(Scalar(rng.randint(1, 5), rng.randint(0, 3))))
              for i, (l, v) in enumerate(s1.states)]
    rng.shuffle(scaled)
    s = StateSet(s1.spec, scaled, provenance="scrambled")
    out = classify(s)
    assert out.klass == "TYPE-I"


def test_dim2_nogo_on_random_biseparable():
    rng = random.Random(31)
    for _ in range(5):
        s = random_biseparable_322(rng, n_states=5)
        rep = check_dim2_nogo(s, probes=6, seed=1)
        assert rep.confirmed


def test_dim2_nogo_oracle_product_degree():
    # independent oracle for the same claim: apply a probe PVM and check
    # full separability of every surviving state directly
    rng = random.Random(8)
    s = random_biseparable_322(rng, n_states=5)
    direction = Vec([1, 2])
    from lpcckit.measurements import PVM, Projector
    p = Projector.from_ray(direction)
    lp = LocalPVM(PVM([p, p.complement()]), (1,))
    for br in apply(s, lp).values():
        if br.states is None:
            continue
        for _, v in br.states.states:
            m, _ = separability_degree(v, s.spec)
            assert m == 3


def test_dim2_nogo_requires_biseparable():
    spec = PartySpec((3, 2, 2))
    s = StateSet(spec, [("a", Vec([1] + [0] * 10 + [1])),
                        ("b", Vec([1] + [0] * 10 + [-1]))])
    with pytest.raises(ValueError):
        check_dim2_nogo(s)


def test_fully_product_422_nogo():
    rng = random.Random(77)
    s = random_product_set(rng, (4, 2, 2), 6, domino_moves=2)
    rep = check_dim2_nogo(s, probes=6, seed=0)
    assert rep.confirmed


def test_m_activability_type1(s1):
    assert is_m_activable(s1, 3).status == "activable"
    assert is_m_activable(s1, 2).status == "activable"


def test_m_activability_type2(s2):
    v3 = is_m_activable(s2, 3)
    assert v3.status == "not-activable" and v3.exact
    v2 = is_m_activable(s2, 2)
    assert v2.status == "activable"
    assert v2.witness_partition.blocks == ((0,), (1, 2))


def test_proposition2_consistency(s1, s2):
    strong3 = is_m_activable(s1, 3, strong=True)
    two = is_m_activable(s1, 2)
    if strong3.status == "activable":
        assert two.status != "not-activable"
    s2_strong3 = is_m_activable(s2, 3, strong=True)
    s2_two = is_m_activable(s2, 2)
    if s2_strong3.status == "activable":
        assert s2_two.status != "not-activable"


def test_m_validation(s1):
    with pytest.raises(ValueError):
        is_m_activable(s1, 1)
    with pytest.raises(ValueError):
        is_m_activable(s1, 4)


def test_domino_match_implies_irreducible(s1, s2):
    # cross-check on every match: a matched bipartite set must itself be
    # certified irreducible
    from lpcckit.opsolve import is_pvm_irreducible
    cases = []
    lp = LocalPVM(parse_pvm("0;1", [2]), (1,))
    for br in apply(s1, lp).values():
        cases.append(merge_parties(br.states, Partition(((0,), (1, 2)))))
    _, first, p = fixture_activation("s2_joint_activation")
    for br in apply(s2, first).values():
        cases.append(merge_parties(br.states, p))
    for merged in cases:
        match = domino_match(merged)
        assert match is not None
        verdict = is_pvm_irreducible(merged, Partition.trivial(2))
        assert verdict.irreducible
