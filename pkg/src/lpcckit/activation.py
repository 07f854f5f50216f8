"""Hidden-nonlocality activation: verification and locality classification.

An activation is a first-round orthogonality-preserving local PVM after
which every surviving branch is certified locally indistinguishable (via
PVM-irreducibility), on a set that is free from local redundancy. Sets
are then classified by who can activate: a single party (TYPE-I), only a
joint measurement of two parties (TYPE-II), or nobody that the bounded
search can find (strong-local evidence).
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from typing import Sequence

from .exact import Mat, Scalar, Vec, rank
from .indexing import GroupIndexer, digits_of, index_of
from .measurements import (LocalPVM, PVM, Projector, apply,
                           is_trivial_for_set, local_support_vectors,
                           preserves_orthogonality)
from .opsolve import (IrreducibilityVerdict, enumerate_op_pvms,
                      is_pvm_irreducible)
from .protocols import ProtocolTree, execute_and_verify, lpcc_search
from .statesets import (Partition, StateSet, check_mutual_orthogonality,
                        is_locally_redundant, merge_parties)


# ---------------------------------------------------------------------------
# domino recognition

@dataclass(frozen=True)
class DominoMatch:
    """Support-basis relabeling carrying a set onto the nine-state
    nonlocal product basis in 3x3."""

    row_basis: tuple[int, ...]        # ordered computational indices, first party
    col_basis: tuple[int, ...]        # ordered computational indices, second party
    permutation: tuple[tuple[str, str], ...]   # (input label, target label)

    def to_json(self) -> dict:
        return {"row_basis": list(self.row_basis),
                "col_basis": list(self.col_basis),
                "permutation": [list(p) for p in self.permutation]}


def domino_match(s: StateSet) -> DominoMatch | None:
    """Try to map a bipartite 9-state set, per-party, onto the nonlocal
    3x3 product basis via an ordered computational support triple on each
    side, up to state permutation and nonzero scalars."""
    from .statesets import build_named_set, local_support_indices
    if s.spec.n_parties != 2 or len(s) != 9:
        return None
    sup_a = local_support_indices(s, 0)
    sup_b = local_support_indices(s, 1)
    if len(sup_a) != 3 or len(sup_b) != 3:
        return None
    target = build_named_set("Domino")
    t_rays = [(l, v.normalized_leading()) for l, v in target.states]
    dims = s.spec.dims
    for pa in itertools.permutations(sup_a):
        for pb in itertools.permutations(sup_b):
            grids = []
            ok = True
            for label, v in s.states:
                grid = [v.entries[index_of((pa[i], pb[j]), dims)]
                        for i in range(3) for j in range(3)]
                gv = Vec(grid)
                if gv.is_zero():
                    ok = False
                    break
                grids.append((label, gv.normalized_leading()))
            if not ok:
                continue
            perm = _proportional_matching(grids, t_rays)
            if perm is not None:
                return DominoMatch(pa, pb, tuple(perm))
    return None


def _proportional_matching(grids, targets) -> list[tuple[str, str]] | None:
    """Perfect matching between input rays and target rays (exact ray
    equality after leading-1 normalization)."""
    n = len(grids)
    adj = [[grids[i][1] == targets[j][1] for j in range(n)] for i in range(n)]
    match_of_target = [-1] * n

    def try_assign(i, seen):
        for j in range(n):
            if adj[i][j] and not seen[j]:
                seen[j] = True
                if match_of_target[j] == -1 or try_assign(match_of_target[j], seen):
                    match_of_target[j] = i
                    return True
        return False

    for i in range(n):
        if not try_assign(i, [False] * n):
            return None
    out = [None] * n
    for j, i in enumerate(match_of_target):
        out[i] = (grids[i][0], targets[j][0])
    return out


def support_triple_labels(s_before_merge: StateSet, p: Partition,
                          block_index: int, indices: Sequence[int]) -> list[str]:
    """Render merged-block computational indices as per-party digit strings."""
    block = p.blocks[block_index]
    dims = [s_before_merge.spec.dims[q] for q in block]
    return ["".join(str(d) for d in digits_of(i, dims)) for i in indices]


# ---------------------------------------------------------------------------
# activation verification

@dataclass
class BranchReport:
    outcome: int
    n_states: int
    certificate: IrreducibilityVerdict | None
    domino: DominoMatch | None = None
    domino_blocks: tuple[int, int] | None = None    # bipartition used

    @property
    def certified(self) -> bool:
        return self.certificate is not None and self.certificate.irreducible

    def to_json(self) -> dict:
        return {"outcome": self.outcome, "n_states": self.n_states,
                "certified": self.certified,
                "certificate": self.certificate.to_json() if self.certificate else None,
                "domino": self.domino.to_json() if self.domino else None}


@dataclass
class ActivationReport:
    first: LocalPVM
    partition: Partition
    branches: list[BranchReport]
    genuine: bool
    distinguishable_before: str
    asserted: bool
    trace: list[str] = field(default_factory=list)

    def to_json(self) -> dict:
        return {"asserted": self.asserted, "genuine": self.genuine,
                "distinguishable_before": self.distinguishable_before,
                "partition": [list(b) for b in self.partition.blocks],
                "first_group": list(self.first.group),
                "branches": [b.to_json() for b in self.branches],
                "trace": self.trace}


class ActivationError(Exception):
    pass


_REDUNDANCY_CACHE: dict = {}


def _cached_redundancy(s: StateSet):
    from .opsolve import _set_group_key
    key = _set_group_key(s, ())
    if key not in _REDUNDANCY_CACHE:
        if len(_REDUNDANCY_CACHE) > 1024:
            _REDUNDANCY_CACHE.clear()
        _REDUNDANCY_CACHE[key] = is_locally_redundant(s)
    return _REDUNDANCY_CACHE[key]


def verify_activation(s: StateSet, first: LocalPVM, p: Partition, *,
                      protocol: ProtocolTree | None = None,
                      assume_distinguishable: str | None = None,
                      search_depth: int = 3,
                      max_exact_dim: int = 9,
                      fail_fast: bool = False) -> ActivationReport:
    """Check a claimed activation: the first-round PVM must be nontrivial
    for the set and orthogonality-preserving; every surviving branch must
    be certified PVM-irreducible within the partition; genuineness
    requires the source set to be locally irredundant.

    The LPCC-distinguishability precondition is established by a supplied
    protocol, by search, or by an `assume_distinguishable` note (used by
    callers that already verified it in a finer partition, which implies
    it in every coarsening).

    A domino match (merging the partition to a bipartition) is recorded
    per branch as corroborating structure when it exists.
    """
    p.validate(s.spec)
    first.validate(s.spec)
    if not check_mutual_orthogonality(s):
        raise ActivationError("source set is not orthogonal")
    if not any(set(first.group) <= set(b) for b in p.blocks):
        raise ActivationError("first-round group crosses partition blocks")
    if is_trivial_for_set(first, s):
        raise ActivationError("first-round PVM is trivial for the set")
    ov = preserves_orthogonality(s, first)
    if not ov:
        raise ActivationError(
            f"first-round PVM breaks orthogonality at {ov.witness}")

    trace: list[str] = []
    if protocol is not None:
        execute_and_verify(s, protocol)
        before = "verified-by-protocol"
    elif assume_distinguishable is not None:
        before = assume_distinguishable
    else:
        verdict = lpcc_search(s, p, depth=search_depth)
        before = verdict.status
        if verdict.status != "distinguishable":
            raise ActivationError(
                f"could not establish LPCC-distinguishability of the source "
                f"set (search says {verdict.status}); pass a protocol fixture")
    trace.append(f"source distinguishability: {before}")

    red = _cached_redundancy(s)
    genuine = not red.redundant
    trace.append("source set is locally "
                 + ("irredundant" if genuine else
                    f"REDUNDANT (discard {red.discarded_parties})"))

    branches: list[BranchReport] = []
    for outcome, br in sorted(apply(s, first).items()):
        if br.states is None:
            continue
        if len(br.states) < 2:
            branches.append(BranchReport(outcome, len(br.states), None))
            if fail_fast:
                trace.append(f"outcome {outcome}: state count dropped to "
                             f"{len(br.states)}, stopping early")
                break
            continue
        cert = is_pvm_irreducible(br.states, p, max_exact_dim=max_exact_dim)
        match, blocks = _domino_in_some_bipartition(br.states, p)
        if match is not None and not cert.irreducible:
            raise AssertionError(
                "domino-matched branch failed the irreducibility cross-check")
        branches.append(BranchReport(outcome, len(br.states), cert, match, blocks))
        trace.append(f"outcome {outcome}: {len(br.states)} states, "
                     f"certificate {cert.status}"
                     + (", domino matched" if match else ""))
        if fail_fast and not cert.irreducible:
            trace.append("stopping at first uncertified branch")
            break

    asserted = (genuine and bool(branches)
                and all(b.certified for b in branches))
    return ActivationReport(first=first, partition=p, branches=branches,
                            genuine=genuine, distinguishable_before=before,
                            asserted=asserted, trace=trace)


def _domino_in_some_bipartition(branch: StateSet, p: Partition):
    """Run domino matching on every bipartite coarsening of the partition."""
    blocks = p.blocks
    if len(blocks) == 2:
        coarsenings = [((0,), (1,))]
    elif len(blocks) < 2:
        return None, None
    else:
        coarsenings = []
        for subset in itertools.combinations(range(len(blocks)), 1):
            rest = tuple(i for i in range(len(blocks)) if i not in subset)
            coarsenings.append((subset, rest))
    for left, right in coarsenings:
        merged_blocks = (tuple(q for i in left for q in blocks[i]),
                         tuple(q for i in right for q in blocks[i]))
        merged = merge_parties(branch, Partition(merged_blocks))
        match = domino_match(merged)
        if match is not None:
            return match, merged_blocks
    return None, None


# ---------------------------------------------------------------------------
# dimension-2 no-go (biseparable n x 2 x 2 sets)

@dataclass
class Dim2NogoReport:
    confirmed: bool
    parties_checked: tuple[int, ...]
    probes_per_party: int
    residual_party: int
    trace: list[str] = field(default_factory=list)

    def to_json(self) -> dict:
        return {"confirmed": self.confirmed,
                "parties_checked": list(self.parties_checked),
                "probes_per_party": self.probes_per_party,
                "residual_party": self.residual_party,
                "trace": self.trace}


def check_dim2_nogo(s: StateSet, *, probes: int = 8, seed: int = 0) -> Dim2NogoReport:
    """For orthogonal biseparable sets (product across first party vs the
    rest) in n x 2 x 2: any nontrivial PVM by a dimension-2 party is a
    rank-1 pair, and every outcome leaves a fully product set in an
    effective n x 2 system, which cannot be activated; only the first
    party could ever activate. Probed on canonical plus seeded rational
    directions (the product structure of the outcome is direction-free)."""
    dims = s.spec.dims
    if len(dims) != 3 or dims[1] != 2 or dims[2] != 2:
        raise ValueError("expected a tripartite n x 2 x 2 system")
    for label, v in s.states:
        if not _product_across(v, dims, (0,)):
            raise ValueError(f"state {label!r} is not biseparable across "
                             f"first party | rest")
    rng = random.Random(seed)
    directions = [Vec([1, 0]), Vec([0, 1]), Vec([1, 1]), Vec([1, -1]),
                  Vec([Scalar(1), Scalar(0, 1)]), Vec([Scalar(1), Scalar(0, -1)])]
    while len(directions) < max(probes, 6):
        a = Scalar(rng.randint(-3, 3), rng.randint(-3, 3))
        b = Scalar(rng.randint(-3, 3), rng.randint(-3, 3))
        v = Vec([a, b])
        if not v.is_zero():
            directions.append(v)
    directions = directions[:max(probes, 6)]
    trace = []
    for party in (1, 2):
        other = 2 if party == 1 else 1
        for theta in directions:
            proj = Projector.from_ray(theta)
            pvm = PVM([proj, proj.complement()])
            lp = LocalPVM(pvm, (party,))
            for outcome, br in apply(s, lp).items():
                if br.states is None:
                    continue
                for label, v in br.states.states:
                    if not _fully_product_in(v, dims, (0,), (party,), (other,)):
                        return Dim2NogoReport(
                            False, (1, 2), len(directions), 0,
                            [f"party {party}, direction {theta}: state "
                             f"{label!r} not product after outcome {outcome}"])
        trace.append(f"party {party}: all probed rank-1 PVMs leave fully "
                     f"product sets in effective {dims[0]}x2 form")
    trace.append("activation, if any, can only come from the first party")
    return Dim2NogoReport(True, (1, 2), len(directions), 0, trace)


def _product_across(v: Vec, dims, block) -> bool:
    idx = GroupIndexer(dims, block)
    m = Mat(tuple(tuple(u.entries[g] for u in idx.local_vectors(v))
                  for g in range(idx.group_dim)))
    return rank(m) == 1


def _fully_product_in(v: Vec, dims, *blocks) -> bool:
    return all(_product_across(v, dims, b) for b in blocks)


# ---------------------------------------------------------------------------
# classification

@dataclass
class ClassifyBounds:
    search_depth: int = 3
    max_first_rounds: int = 24
    max_exact_dim: int = 9
    joint_candidates: dict | None = None    # (i, j) -> list[LocalPVM]


@dataclass
class LocalityClass:
    klass: str            # strong-local-evidence | TYPE-I | TYPE-II |
                          # indistinguishable-already | unknown
    exact: bool = False
    witness: ActivationReport | None = None
    trace: list[str] = field(default_factory=list)

    def to_json(self) -> dict:
        return {"class": self.klass, "exact": self.exact,
                "witness": self.witness.to_json() if self.witness else None,
                "trace": self.trace}


def classify(s: StateSet, joint_pairs: Sequence[tuple[int, int]] | None = None,
             bounds: ClassifyBounds | None = None) -> LocalityClass:
    """Place a set on the locality line: already indistinguishable, a
    single party can hide the information (TYPE-I), only a joint pair can
    (TYPE-II), or no activation was found (strong-local evidence; labeled
    exact only for the structurally recognized theorem cases)."""
    bounds = bounds or ClassifyBounds()
    n = s.spec.n_parties
    trace: list[str] = []

    if len(s) <= 2:
        return LocalityClass(
            "strong-local-evidence", exact=True,
            trace=["at most two orthogonal states: distinguishable in every "
                   "partition, activation impossible"])
    structural = _structural_strong_local(s)
    if structural:
        return LocalityClass("strong-local-evidence", exact=True,
                             trace=[structural])

    singles = Partition.trivial(n)
    verdict = lpcc_search(s, singles, depth=bounds.search_depth)
    if verdict.status == "indistinguishable":
        return LocalityClass("indistinguishable-already",
                             trace=["set is already locally indistinguishable"])
    if verdict.status != "distinguishable":
        trace.append(f"distinguishability search: {verdict.status}")
        return LocalityClass("unknown", trace=trace)
    # distinguishability in the finest partition carries to every
    # coarsening, so activation checks below need not re-search
    assume = "distinguishable (finest partition)"

    exhaustive = True
    for party in range(n):
        try:
            candidates = enumerate_op_pvms(
                s, (party,), nontrivial_for_set=True,
                max_exact_dim=bounds.max_exact_dim)
        except ValueError:
            exhaustive = False
            continue
        candidates = _activation_order(s, candidates)
        for lp in candidates[:bounds.max_first_rounds]:
            try:
                report = verify_activation(s, lp, singles,
                                           assume_distinguishable=assume,
                                           search_depth=bounds.search_depth,
                                           max_exact_dim=bounds.max_exact_dim,
                                           fail_fast=True)
            except ActivationError:
                continue
            if report.asserted:
                trace.append(f"party {party} activates")
                return LocalityClass("TYPE-I", witness=report, trace=trace)
        if len(candidates) > bounds.max_first_rounds:
            exhaustive = False
    trace.append("no single party activates"
                 + ("" if exhaustive else " (bounded search)"))

    pairs = list(joint_pairs) if joint_pairs else list(itertools.combinations(range(n), 2))
    for pair in pairs:
        others = tuple((q,) for q in range(n) if q not in pair)
        part = Partition((tuple(pair),) + others)
        candidates = []
        supplied = (bounds.joint_candidates or {}).get(tuple(pair), [])
        candidates.extend(supplied)
        eff = _effective_dim(s, pair)
        if eff <= bounds.max_exact_dim:
            candidates.extend(_activation_order(s, enumerate_op_pvms(
                s, tuple(pair), nontrivial_for_set=True,
                max_exact_dim=bounds.max_exact_dim)))
        else:
            exhaustive = False
            trace.append(f"pair {pair}: effective dimension {eff} beyond "
                         f"enumeration bound, verifying supplied candidates only")
        for lp in candidates[:bounds.max_first_rounds]:
            try:
                report = verify_activation(s, lp, part,
                                           assume_distinguishable=assume,
                                           search_depth=bounds.search_depth,
                                           max_exact_dim=bounds.max_exact_dim,
                                           fail_fast=True)
            except ActivationError:
                continue
            if report.asserted:
                trace.append(f"joint pair {pair} activates")
                return LocalityClass("TYPE-II", witness=report, trace=trace)
        if len(candidates) > bounds.max_first_rounds:
            exhaustive = False
    trace.append("no joint pair activates"
                 + ("" if exhaustive else " (bounded search)"))
    return LocalityClass("strong-local-evidence", exact=False, trace=trace)


def _activation_order(s: StateSet, candidates: list[LocalPVM]) -> list[LocalPVM]:
    """Most promising activators first: a hiding measurement keeps states
    alive, so sort by total branch survivals descending."""
    keyed = []
    for lp in candidates:
        idx = GroupIndexer(s.spec.dims, lp.group)
        count = sum(1 for e in lp.pvm.elements for v in s.vectors()
                    if not idx.apply_operator(e.mat, v).is_zero())
        keyed.append((-count, len(lp.pvm), lp))
    keyed.sort(key=lambda t: t[:2])
    return [t[2] for t in keyed]


def _structural_strong_local(s: StateSet) -> str | None:
    """Theorem-level recognitions: bipartite product sets with a (<=2)-
    dimensional side; three fully product states."""
    n = s.spec.n_parties
    if n == 2:
        all_product = all(_product_across(v, s.spec.dims, (0,))
                          for v in s.vectors())
        if all_product:
            from .exact import vectors_rank
            for party in (0, 1):
                k = vectors_rank(local_support_vectors(s, (party,)))
                if k <= 2:
                    return ("orthogonal product set with a two-dimensional "
                            "side: activation impossible in n x 2")
    if len(s) == 3:
        from .protocols import _full_factors
        if all(_full_factors(v, s.spec) is not None for v in s.vectors()):
            return "three orthogonal fully product states are strong local"
    return None


def _effective_dim(s: StateSet, group) -> int:
    from .exact import vectors_rank
    support = local_support_vectors(s, tuple(group))
    occupied = sorted({a for u in support for a in u.support()})
    if vectors_rank(support) == len(occupied):
        return len(occupied)
    return GroupIndexer(s.spec.dims, tuple(group)).group_dim


# ---------------------------------------------------------------------------
# m-activability

@dataclass
class MActivabilityVerdict:
    status: str               # activable | not-activable | unknown
    m: int
    strong: bool
    witness: ActivationReport | None = None
    witness_partition: Partition | None = None
    weaker_partition: Partition | None = None
    exact: bool = False
    trace: list[str] = field(default_factory=list)

    def to_json(self) -> dict:
        return {"status": self.status, "m": self.m, "strong": self.strong,
                "exact": self.exact,
                "witness": self.witness.to_json() if self.witness else None,
                "trace": self.trace}


def iter_m_partitions(n: int, m: int):
    """All ways to view n parties as m groups."""
    def rec(p: int, blocks: list[list[int]]):
        if p == n:
            if len(blocks) == m:
                yield Partition(tuple(tuple(b) for b in blocks))
            return
        if len(blocks) + (n - p) < m:
            return
        for b in blocks:
            b.append(p)
            yield from rec(p + 1, blocks)
            b.pop()
        if len(blocks) < m:
            blocks.append([p])
            yield from rec(p + 1, blocks)
            blocks.pop()
    yield from rec(0, [])


def is_m_activable(s: StateSet, m: int, strong: bool = False,
                   bounds: ClassifyBounds | None = None) -> MActivabilityVerdict:
    """Search all m-partitions for a first-round OP-PVM on one block that
    leaves every branch certified irreducible within that partition; the
    strong variant additionally needs every branch irreducible in some
    (m-1)-partition. Negative verdicts are exact only when every branch
    of every candidate was refuted by an explicit discrimination tree;
    bounded gaps surface as unknown, never as a silent negative."""
    bounds = bounds or ClassifyBounds()
    n = s.spec.n_parties
    if m < 2 or m > n:
        raise ValueError(f"m must be between 2 and {n}")
    exhaustive = True
    any_unknown = False
    trace: list[str] = []
    finest = lpcc_search(s, Partition.trivial(n), depth=bounds.search_depth)
    assume = ("distinguishable (finest partition)"
              if finest.status == "distinguishable" else None)
    for part in iter_m_partitions(n, m):
        candidates: list[LocalPVM] = []
        for block in part.blocks:
            supplied = (bounds.joint_candidates or {}).get(tuple(block), [])
            candidates.extend(supplied)
            eff = _effective_dim(s, block)
            if eff <= bounds.max_exact_dim:
                candidates.extend(enumerate_op_pvms(
                    s, block, nontrivial_for_set=True,
                    max_exact_dim=bounds.max_exact_dim))
            else:
                exhaustive = False
                trace.append(f"{part.describe(s.spec)}: block {block} beyond "
                             f"enumeration bound")
        candidates = _activation_order(s, candidates)
        for lp in candidates:
            outcome_reports = []
            all_irreducible = True
            refuted = False
            for outcome, br in sorted(apply(s, lp).items()):
                if br.states is None:
                    continue
                if len(br.states) < 2:
                    all_irreducible = False
                    refuted = True
                    break
                cert = is_pvm_irreducible(br.states, part,
                                          max_exact_dim=bounds.max_exact_dim)
                outcome_reports.append((outcome, br.states, cert))
                if not cert.irreducible:
                    all_irreducible = False
                    sub = lpcc_search(br.states, part, depth=bounds.search_depth)
                    if sub.status == "distinguishable":
                        refuted = True
                    else:
                        any_unknown = True
                    break
            if not all_irreducible:
                if not refuted:
                    any_unknown = True
                continue
            red = _cached_redundancy(s)
            if red.redundant:
                trace.append("activation found but set is locally redundant")
                continue
            weaker = None
            if strong:
                for q in iter_m_partitions(n, m - 1):
                    if all(is_pvm_irreducible(st, q,
                                              max_exact_dim=bounds.max_exact_dim).irreducible
                           for _, st, _ in outcome_reports):
                        weaker = q
                        break
                if weaker is None:
                    continue
            report = verify_activation(s, lp, part,
                                       assume_distinguishable=assume,
                                       search_depth=bounds.search_depth,
                                       max_exact_dim=bounds.max_exact_dim)
            if report.asserted:
                trace.append(f"activation in {part.describe(s.spec)} via "
                             f"group {lp.group}")
                return MActivabilityVerdict(
                    "activable", m, strong, witness=report,
                    witness_partition=part, weaker_partition=weaker,
                    exact=True, trace=trace)
    if exhaustive and not any_unknown:
        return MActivabilityVerdict(
            "not-activable", m, strong, exact=True,
            trace=trace + ["every candidate first round leaves some branch "
                           "distinguishable"])
    return MActivabilityVerdict("unknown", m, strong, exact=False,
                                trace=trace + ["bounded search exhausted"])
