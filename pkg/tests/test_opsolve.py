"""Orthogonality-preserving measurement solver."""

import random

from lpcckit.exact import Scalar, Vec, inner, tensor
from lpcckit.generators import (planted_direction_set, random_orthogonal_set,
                                random_product_set)
from lpcckit.measurements import LocalPVM, PVM, Projector, preserves_orthogonality
from lpcckit.opsolve import (constraint_matrices, diagonal_op_subsets,
                             enumerate_op_pvms, form_value,
                             is_pvm_irreducible, rank1_op_directions)
from lpcckit.statesets import Partition, PartySpec, StateSet


def ray(*xs):
    return Vec(list(xs)).normalized_leading()


def test_constraint_matrix_forcing_pattern(s2):
    cmats = {c.pair: c.mat for c in constraint_matrices(s2, (0,))}
    c13 = cmats[(0, 2)]
    # the only coupling between these two states is through levels 0 and 1
    for a in range(3):
        for b in range(3):
            want = Scalar(2) if (a, b) == (0, 1) else Scalar(0)
            assert c13.entries[a][b] == want


def test_constraint_matrix_zero_for_locally_orthogonal():
    spec = PartySpec((2, 2))
    s = StateSet(spec, [("a", tensor(Vec([1, 0]), Vec([1, 1]))),
                        ("b", tensor(Vec([0, 1]), Vec([1, -1])))])
    c = constraint_matrices(s, (0,))[0].mat
    assert c.is_zero()


def test_constraint_matrix_product_structure_oracle():
    # for product states the matrices factor as conj(alpha_i) alpha_j^T
    # times the overlap of the rest factors
    rng = random.Random(2)
    from lpcckit.exact import sc
    from lpcckit.indexing import GroupIndexer
    for _ in range(10):
        s = random_product_set(rng, (3, 3), 4, domino_moves=0)
        idx = GroupIndexer(s.spec.dims, (0,))
        factors = []
        for v in s.vectors():
            slices = idx.local_vectors(v)
            alpha = next(u for u in slices if not u.is_zero())
            # exact rest factor by contracting with alpha
            rest = Vec([inner(alpha, u) for u in slices]).scale(
                sc(1) / sc(alpha.norm2()))
            factors.append((alpha, rest))
        for cm in constraint_matrices(s, (0,)):
            i, j = cm.pair
            ai, ri = factors[i]
            aj, rj = factors[j]
            overlap = inner(ri, rj)
            for a in range(3):
                for b in range(3):
                    want = ai.entries[a].conj() * aj.entries[b] * overlap
                    assert cm.mat.entries[a][b] == want


def test_form_value_matches_preservation():
    rng = random.Random(4)
    s = random_orthogonal_set(rng, (3, 3), 3, complex_amps=True)
    cmats = constraint_matrices(s, (0,))
    theta = Vec([1, 2, -1])
    p = Projector.from_ray(theta)
    lp = LocalPVM(PVM([p, p.complement()]), (0,))
    all_zero = all(form_value(c.mat, theta).is_zero() for c in cmats)
    assert all_zero == bool(preserves_orthogonality(s, lp))


def test_s2_first_party_none_found(s2):
    rep = rank1_op_directions(s2, (0,))
    assert rep.is_none_found
    assert rep.none_found["method"] == "exact-case-split"


def test_s2_second_party_none_found(s2):
    rep = rank1_op_directions(s2, (1,))
    assert rep.is_none_found


def test_s2_third_party_three_directions(s2):
    rep = rank1_op_directions(s2, (2,))
    got = {v.entries for v in rep.nontrivial_directions()}
    want = {ray(0, 0, 1).entries, ray(1, -1, 0).entries, ray(1, 1, 0).entries}
    assert got == want
    assert not rep.unresolved


def test_domino_none_found_both_parties(domino):
    for party in (0, 1):
        rep = rank1_op_directions(domino, (party,))
        assert rep.is_none_found


def test_solutions_reverify(s2):
    rep = rank1_op_directions(s2, (2,))
    for sol in rep.solutions:
        p = Projector.from_ray(sol.vector)
        lp = LocalPVM(PVM([p, p.complement()]), (2,))
        assert preserves_orthogonality(s2, lp)


def test_scaling_state_leaves_solutions_unchanged(s2):
    scaled = s2.with_states(
        [(l, v.scale(Scalar(3, 2)) if l == "4" else v) for l, v in s2.states])
    rep = rank1_op_directions(scaled, (2,))
    got = {v.entries for v in rep.nontrivial_directions()}
    want = {ray(0, 0, 1).entries, ray(1, -1, 0).entries, ray(1, 1, 0).entries}
    assert got == want


def test_planted_direction_recovery_sample():
    rng = random.Random(99)
    for _ in range(100):
        s, theta = planted_direction_set(rng, group_dim=3, rest_dim=3,
                                         n_states=3)
        rep = rank1_op_directions(s, (0,))
        assert rep.contains_ray(theta), f"missed planted direction {theta}"
        assert not rep.unresolved


def test_dim2_groups_always_exact():
    rng = random.Random(41)
    for _ in range(40):
        s, _theta = planted_direction_set(rng, group_dim=2, rest_dim=3,
                                          n_states=3)
        rep = rank1_op_directions(s, (0,))
        assert all(sol.exact for sol in rep.solutions)
    for _ in range(20):
        s = random_product_set(rng, (2, 4), 4)
        rep = rank1_op_directions(s, (0,))
        assert all(sol.exact for sol in rep.solutions)
        assert not rep.unresolved


def test_diagonal_subsets_find_joint_elements(s2):
    subs = diagonal_op_subsets(s2, (1, 2))
    assert (0, 2, 4) in subs          # |00>, |02>, |11>
    assert (1, 3, 5) in subs          # |01>, |10>, |12>


def test_enumerate_charlie_pvms(s2):
    pvms = enumerate_op_pvms(s2, (2,), max_outcomes=3)
    ranks = sorted(tuple(sorted(e.rank() for e in lp.pvm.elements))
                   for lp in pvms)
    assert ranks == [(1, 1, 1), (1, 2), (1, 2), (1, 2)]
    rank1_triple = [lp for lp in pvms if len(lp.pvm) == 3][0]
    dirs = {e.span[0].normalized_leading().entries
            for e in rank1_triple.pvm.elements}
    assert dirs == {ray(0, 0, 1).entries, ray(1, -1, 0).entries,
                    ray(1, 1, 0).entries}


def test_enumerate_bob_on_type1(s1):
    pvms = enumerate_op_pvms(s1, (1,))
    keys = {frozenset(e.span[0].normalized_leading().entries
                      for e in lp.pvm.elements if e.span)
            for lp in pvms}
    assert frozenset({ray(1, 0).entries, ray(0, 1).entries}) in keys


def test_enumerate_empty_for_dim2_none_found(s2):
    assert enumerate_op_pvms(s2, (1,)) == []


def test_domino_irreducible(domino):
    verdict = is_pvm_irreducible(domino, Partition(((0,), (1,))))
    assert verdict.irreducible
    assert all(level == "complete" for level in verdict.block_levels.values())


def test_s2_reducible_via_third_party(s2):
    verdict = is_pvm_irreducible(s2, Partition.trivial(3))
    assert verdict.status == "reducible"
    assert verdict.witness is not None
    assert verdict.witness.group == (2,)


def test_two_state_never_irreducible():
    rng = random.Random(5)
    from lpcckit.generators import random_two_state_set
    s = random_two_state_set(rng, (2, 2))
    verdict = is_pvm_irreducible(s, Partition.trivial(2))
    assert verdict.status == "two-state"
    assert not verdict.irreducible


def test_annihilating_family_reported():
    # states confined to two levels of a qutrit: the third level's ray
    # annihilates everything and shows up as an annihilating family
    spec = PartySpec((3, 2))
    s = StateSet(spec, [("a", tensor(Vec([1, 0, 0]), Vec([1, 0]))),
                        ("b", tensor(Vec([0, 1, 0]), Vec([0, 1]))),
                        ("c", tensor(Vec([1, 0, 0]), Vec([0, 1])))])
    rep = rank1_op_directions(s, (0,))
    assert any(f.annihilating for f in rep.families)


def test_numeric_hunt_runs(s2):
    rep = rank1_op_directions(s2, (2,), exact_only=False, seed=7,
                              numeric_starts=4)
    assert rep.numeric is not None
    assert rep.numeric["seed"] == 7
