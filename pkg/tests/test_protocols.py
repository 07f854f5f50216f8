"""Protocol trees: construction, verification, bounded search."""

import random

import pytest

from lpcckit.exact import Vec, tensor
from lpcckit.generators import (random_lemma_structured_set,
                                random_product_set)
from lpcckit.kets import parse_pvm
from lpcckit.measurements import LocalPVM, apply
from lpcckit.protocols import (Leaf, LemmaStructureError, Node, ProtocolError,
                               execute_and_verify, lemma1_protocol,
                               lpcc_search, three_product_protocol,
                               tree_from_script)
from lpcckit.statesets import (Partition, PartySpec, StateSet,
                               check_mutual_orthogonality)
from lpcckit.theorems import fixture_protocol, _leaf_sets


def test_s1_discrimination_fixture_verifies(s1):
    s, tree = fixture_protocol("s1_discrimination")
    verdict = execute_and_verify(s, tree)
    assert verdict.distinguishable


def test_s2_discrimination_fixture_verifies(s2):
    s, tree = fixture_protocol("s2_discrimination")
    verdict = execute_and_verify(s, tree)
    assert verdict.distinguishable


def test_single_state_leaf():
    spec = PartySpec((2, 2))
    s = StateSet(spec, [("only", Vec([1, 0, 0, 1]))])
    verdict = execute_and_verify(s, Leaf("identified"))
    assert verdict.distinguishable


def test_wrong_children_rejected(s1):
    tree = Node((2,), parse_pvm("0,1;2", [3]), {0: Leaf("identified")})
    with pytest.raises(ProtocolError):
        execute_and_verify(s1, tree)


def test_non_preserving_tree_rejected(s2):
    tree = Node((0,), parse_pvm("0;1,2", [3]),
                {0: Leaf("two-orthogonal"), 1: Leaf("two-orthogonal")})
    with pytest.raises(ProtocolError):
        execute_and_verify(s2, tree)


def test_no_label_lost_across_leaves(s1):
    s, tree = fixture_protocol("s1_discrimination")
    leaves = _leaf_sets(s, tree)
    seen = set()
    for _path, branch in leaves:
        seen |= set(branch.labels())
    assert seen == set(s.labels())


def test_lemma1_on_outcome_two_leaf(s1):
    lp = LocalPVM(parse_pvm("0,1;2", [3]), (2,))
    branch = apply(s1, lp)[1].states
    tree = lemma1_protocol(branch)
    verdict = execute_and_verify(branch, tree)
    assert verdict.distinguishable


def test_lemma1_two_product_states():
    spec = PartySpec((2, 2))
    s = StateSet(spec, [("a", tensor(Vec([1, 0]), Vec([1, 0]))),
                        ("b", tensor(Vec([0, 1]), Vec([0, 1])))])
    tree = lemma1_protocol(s)
    assert execute_and_verify(s, tree).distinguishable


def test_lemma1_random_structured_sets():
    rng = random.Random(17)
    for _ in range(40):
        s = random_lemma_structured_set(rng, rng.randint(2, 5))
        tree = lemma1_protocol(s)
        if isinstance(tree, Leaf):
            continue
        assert execute_and_verify(s, tree).distinguishable


def test_lemma1_rejects_entangled():
    spec = PartySpec((2, 2))
    s = StateSet(spec, [("a", Vec([1, 0, 0, 1])),
                        ("b", Vec([1, 0, 0, -1])),
                        ("c", Vec([0, 1, 1, 0]))])
    with pytest.raises(LemmaStructureError):
        lemma1_protocol(s)


def test_three_product_small_case():
    spec = PartySpec((2, 2))
    s = StateSet(spec, [("1", tensor(Vec([1, 0]), Vec([1, 0]))),
                        ("2", tensor(Vec([0, 1]), Vec([1, 1]))),
                        ("3", tensor(Vec([0, 1]), Vec([1, -1])))])
    tree = three_product_protocol(s)
    assert execute_and_verify(s, tree).distinguishable


def test_three_product_outcome_orthogonality_identity():
    # the algebraic step behind the protocol: post-measurement survivors
    # of the separating outcome remain orthogonal
    rng = random.Random(23)
    for _ in range(15):
        s = random_product_set(rng, (3, 3, 3), 3, domino_moves=0)
        tree = three_product_protocol(s)
        branches = apply(s, LocalPVM(tree.pvm, tree.group))
        for br in branches.values():
            if br.states is not None:
                assert check_mutual_orthogonality(br.states)
        assert execute_and_verify(s, tree).distinguishable


def test_three_product_requires_products():
    spec = PartySpec((2, 2))
    s = StateSet(spec, [("1", Vec([1, 0, 0, 1])),
                        ("2", Vec([1, 0, 0, -1])),
                        ("3", Vec([0, 1, -1, 0]))])
    with pytest.raises(ValueError):
        three_product_protocol(s)


def test_search_domino_indistinguishable(domino):
    verdict = lpcc_search(domino, Partition(((0,), (1,))), depth=1)
    assert verdict.status == "indistinguishable"
    assert verdict.certificate is not None
    assert verdict.certificate.irreducible


def test_search_s1_distinguishable(s1):
    verdict = lpcc_search(s1, Partition.trivial(3), depth=3)
    assert verdict.status == "distinguishable"
    assert execute_and_verify(s1, verdict.tree).distinguishable


def test_search_monotone_in_depth(s1):
    v3 = lpcc_search(s1, Partition.trivial(3), depth=3)
    v4 = lpcc_search(s1, Partition.trivial(3), depth=4)
    assert v3.status == "distinguishable"
    assert v4.status == "distinguishable"


def test_search_case1_residue_distinguishable(s2):
    from lpcckit.theorems import _type2_case_residue
    branch = _type2_case_residue("2;0,1", outcome=1)
    verdict = lpcc_search(branch, Partition.trivial(3), depth=3)
    assert verdict.status == "distinguishable"
    from lpcckit.opsolve import rank1_op_directions
    rep = rank1_op_directions(branch, (0,))
    assert rep.is_none_found or not rep.nontrivial_directions()


def test_script_round_trip(s1):
    s, tree = fixture_protocol("s1_discrimination")
    rebuilt = tree_from_script(tree.to_json(), s.spec)
    assert execute_and_verify(s, rebuilt).distinguishable


def test_two_state_leaf_accepts_entangled_pair():
    spec = PartySpec((2, 2))
    s = StateSet(spec, [("a", Vec([1, 0, 0, 1])), ("b", Vec([1, 0, 0, -1]))])
    verdict = execute_and_verify(s, Leaf("two-orthogonal"))
    assert verdict.distinguishable
    search = lpcc_search(s, Partition.trivial(2))
    assert search.status == "distinguishable"
    assert isinstance(search.tree, Leaf)
