"""Discrimination protocol trees: construction, execution, verification,
and a bounded search for distinguishability verdicts.

A tree node applies a LocalPVM and recurses per surviving outcome; leaves
carry terminal claims. Leaf rules:

  identified        exactly one state survives
  two-orthogonal    two orthogonal states (distinguishable, Walgate-style,
                    accepted by citation)
  lemma1-2xn        the branch is an orthogonal product set with a
                    two-dimensional side; the constructive three-round
                    protocol is built and replayed on the spot
  three-product     three fully product states; the separating-party
                    protocol is built and replayed

Verification replays every measurement exactly, asserting orthogonality
preservation at each node and the claimed rule at each leaf.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from .exact import Vec, inner, rank, vectors_rank, Mat
from .indexing import GroupIndexer
from .measurements import (LocalPVM, PVM, Projector, apply,
                           local_support_vectors, preserves_orthogonality)
from .opsolve import IrreducibilityVerdict, enumerate_op_pvms, is_pvm_irreducible
from .statesets import Partition, PartySpec, StateSet

LEAF_RULES = ("identified", "two-orthogonal", "lemma1-2xn", "three-product")


@dataclass(frozen=True)
class Leaf:
    claim: str

    def __post_init__(self):
        if self.claim not in LEAF_RULES:
            raise ValueError(f"unknown leaf rule {self.claim!r}")

    def to_json(self) -> dict:
        return {"claim": self.claim}


@dataclass(frozen=True)
class Node:
    group: tuple[int, ...]
    pvm: PVM
    children: dict[int, "Node | Leaf"]

    def to_json(self) -> dict:
        return {"group": list(self.group),
                "pvm": self.pvm.to_json(),
                "children": {str(k): v.to_json() for k, v in self.children.items()}}


ProtocolTree = Node | Leaf


class ProtocolError(Exception):
    """A tree failed verification; carries the branch path."""

    def __init__(self, message: str, path: tuple[int, ...] = ()):
        super().__init__(f"{message} (branch path {list(path)})")
        self.path = path


class LemmaStructureError(Exception):
    """Input set does not expose the two-dimensional-side product
    structure the constructive protocol needs."""


@dataclass
class Verdict:
    status: str                                  # distinguishable | indistinguishable | unknown
    tree: ProtocolTree | None = None
    certificate: IrreducibilityVerdict | None = None
    trace: list[str] = field(default_factory=list)

    @property
    def distinguishable(self) -> bool:
        return self.status == "distinguishable"

    def to_json(self) -> dict:
        out = {"status": self.status, "trace": self.trace}
        if self.tree is not None:
            out["tree"] = self.tree.to_json()
        if self.certificate is not None:
            out["certificate"] = self.certificate.to_json()
        return out


# ---------------------------------------------------------------------------
# execution / verification

def execute_and_verify(s: StateSet, tree: ProtocolTree) -> Verdict:
    """Walk the tree, re-deriving every post-measurement branch exactly;
    distinguishable iff every node preserves orthogonality, children cover
    exactly the surviving outcomes, and every leaf claim checks out."""
    trace: list[str] = []
    _exec(s, tree, (), trace)
    return Verdict(status="distinguishable", tree=tree, trace=trace)


def _exec(s: StateSet, tree: ProtocolTree, path: tuple[int, ...],
          trace: list[str]) -> None:
    if isinstance(tree, Leaf):
        _check_leaf(s, tree.claim, path, trace)
        return
    lp = LocalPVM(tree.pvm, tree.group)
    try:
        lp.validate(s.spec)
    except ValueError as exc:
        raise ProtocolError(str(exc), path) from None
    ov = preserves_orthogonality(s, lp)
    if not ov:
        raise ProtocolError(
            f"measurement on group {tree.group} breaks orthogonality of pair "
            f"{ov.witness[1:]} at outcome {ov.witness[0]}", path)
    branches = apply(s, lp)
    surviving = {o for o, br in branches.items() if br.states is not None}
    declared = set(tree.children.keys())
    if declared != surviving:
        raise ProtocolError(
            f"children {sorted(declared)} do not match surviving outcomes "
            f"{sorted(surviving)}", path)
    lost = set(s.labels())
    for o in surviving:
        lost -= set(branches[o].states.labels())
    if lost:
        raise ProtocolError(f"states {sorted(lost)} lost in every outcome", path)
    trace.append(f"{'.'.join(map(str, path)) or 'root'}: group {tree.group} -> "
                 f"outcomes {sorted(surviving)}")
    for o in sorted(surviving):
        _exec(branches[o].states, tree.children[o], path + (o,), trace)


def _check_leaf(s: StateSet, claim: str, path: tuple[int, ...],
                trace: list[str]) -> None:
    n = len(s)
    if claim == "identified":
        if n != 1:
            raise ProtocolError(f"leaf claims one state, found {n}", path)
    elif claim == "two-orthogonal":
        if n > 2:
            raise ProtocolError(f"leaf claims at most two states, found {n}", path)
        if n == 2:
            a, b = s.vectors()
            if not inner(a, b).is_zero():
                raise ProtocolError("two-state leaf is not orthogonal", path)
    elif claim == "lemma1-2xn":
        sub = lemma1_protocol(s)
        _exec(s, sub, path, trace)
    elif claim == "three-product":
        sub = three_product_protocol(s)
        _exec(s, sub, path, trace)
    trace.append(f"{'.'.join(map(str, path)) or 'root'}: leaf {claim} ok ({n} state(s))")


# ---------------------------------------------------------------------------
# constructive protocols

def _party_support_dims(s: StateSet) -> list[int]:
    return [vectors_rank(local_support_vectors(s, (p,)))
            for p in range(s.spec.n_parties)]


def _factor_across(s: StateSet, party: int) -> list[tuple[Vec, Vec]]:
    """Per state, the (party factor, rest factor) of a product across
    party | rest; raises LemmaStructureError when some state is not."""
    idx = GroupIndexer(s.spec.dims, (party,))
    out = []
    for label, v in s.states:
        slices = idx.local_vectors(v)
        m = Mat(tuple(tuple(u.entries[g] for u in slices)
                      for g in range(idx.group_dim)))
        if rank(m) != 1:
            raise LemmaStructureError(
                f"state {label!r} is not a product across party {party}")
        g0, r0 = _first_nonzero_cell(m)
        out.append((m.col(r0), m.row(g0)))
    return out


def _first_nonzero_cell(m: Mat) -> tuple[int, int]:
    for i, row in enumerate(m.entries):
        for j, a in enumerate(row):
            if not a.is_zero():
                return i, j
    raise ValueError("zero matrix")


def lemma1_protocol(s: StateSet, two_side: int | None = None) -> ProtocolTree:
    """Constructive three-round tree for orthogonal product sets whose
    one side is (effectively) two-dimensional.

    Round 1 groups the wide side by blocks, round 2 measures the
    two-dimensional side in a direction pair, round 3 identifies states
    with rank-1 projectors. Parties whose joint support is
    one-dimensional are inert and never measured.
    """
    if len(s) == 1:
        return Leaf("identified")
    dims = s.spec.dims
    sup = _party_support_dims(s)
    live = [p for p in range(len(dims)) if sup[p] > 1]
    if not live:
        raise LemmaStructureError("multiple states share every local factor")
    if len(live) == 1:
        # degenerate instance: all structure sits on one party, whose
        # slices are mutually orthogonal; rank-1 projectors finish it
        return _single_party_identification(s, live[0])
    if two_side is None:
        candidates = [p for p in live if sup[p] == 2]
        if not candidates:
            raise LemmaStructureError("no party has a two-dimensional support")
        two_side = candidates[0]
    elif sup[two_side] != 2:
        raise LemmaStructureError(
            f"party {two_side} has support dimension {sup[two_side]}, not 2")
    rest = tuple(p for p in live if p != two_side)
    if not rest:
        if len(s) <= 2:
            return Leaf("two-orthogonal") if len(s) == 2 else Leaf("identified")
        raise LemmaStructureError(
            "more than two states but only the two-dimensional side varies")

    pairs = _factor_across(s, two_side)
    alphas = [a for a, _ in pairs]
    rest_idx = GroupIndexer(dims, rest)
    # inert parties factor out of every state, so any nonzero slice on the
    # live wide side is (a multiple of) that state's wide-side vector
    etas = []
    for label, v in s.states:
        eta = next((u for u in rest_idx.local_vectors(v) if not u.is_zero()), None)
        if eta is None:
            raise LemmaStructureError(f"state {label!r} vanishes on the wide side")
        etas.append(eta)

    v_basis = _support_basis(alphas)
    if len(v_basis) != 2:
        raise LemmaStructureError("two-side support is not two-dimensional")

    classes = _alpha_classes(alphas, v_basis)
    # cross-class rest spans must be orthogonal
    for i in range(len(classes)):
        for j in range(i + 1, len(classes)):
            for si in classes[i]["members"][0] + classes[i]["members"][1]:
                for sj in classes[j]["members"][0] + classes[j]["members"][1]:
                    if not inner(etas[si], etas[sj]).is_zero():
                        raise LemmaStructureError(
                            "wide-side blocks of different direction classes overlap")
    # within a class and side, rest vectors must be mutually orthogonal
    for cls in classes:
        for side in (0, 1):
            mem = cls["members"][side]
            for x in range(len(mem)):
                for y in range(x + 1, len(mem)):
                    if not inner(etas[mem[x]], etas[mem[y]]).is_zero():
                        raise LemmaStructureError(
                            "same-direction states are not orthogonal on the wide side")

    rest_dim = rest_idx.group_dim
    two_dim = dims[two_side]

    def round3(members: list[int]) -> Node | Leaf:
        if len(members) == 1:
            return Leaf("identified")
        projs = [Projector.from_ray(etas[m]) for m in members]
        elements = list(projs)
        comp = _complement(elements, rest_dim)
        if comp is not None:
            elements.append(comp)
        children: dict[int, Node | Leaf] = {i: Leaf("identified")
                                            for i in range(len(members))}
        return Node(rest, PVM(elements), children)

    def round2(cls) -> Node | Leaf:
        d0, d1 = cls["dirs"]
        elements = [Projector.from_ray(d0), Projector.from_ray(d1)]
        comp = _complement(elements, two_dim)
        if comp is not None:
            elements.append(comp)
        children: dict[int, Node | Leaf] = {}
        for side in (0, 1):
            if cls["members"][side]:
                children[side] = round3(cls["members"][side])
        return Node((two_side,), PVM(elements), children)

    block_projs = []
    for cls in classes:
        vecs = [etas[m] for m in cls["members"][0] + cls["members"][1]]
        block_projs.append(Projector.from_span(vecs, rest_dim))
    elements = list(block_projs)
    comp = _complement(elements, rest_dim)
    if comp is not None:
        elements.append(comp)
    children = {i: round2(cls) for i, cls in enumerate(classes)}
    return Node(rest, PVM(elements), children)


def _single_party_identification(s: StateSet, party: int) -> ProtocolTree:
    """Rank-1 discrimination on the only varying party."""
    idx = GroupIndexer(s.spec.dims, (party,))
    rays = []
    for label, v in s.states:
        u = next((u for u in idx.local_vectors(v) if not u.is_zero()), None)
        if u is None:
            raise LemmaStructureError(f"state {label!r} has no local weight")
        rays.append(u)
    for i in range(len(rays)):
        for j in range(i + 1, len(rays)):
            if not inner(rays[i], rays[j]).is_zero():
                raise LemmaStructureError(
                    "single varying party with non-orthogonal local factors")
    elements = [Projector.from_ray(r) for r in rays]
    comp = _complement(elements, idx.group_dim)
    if comp is not None:
        elements.append(comp)
    children: dict[int, Node | Leaf] = {i: Leaf("identified")
                                        for i in range(len(rays))}
    return Node((party,), PVM(elements), children)


def _support_basis(vecs: list[Vec]) -> list[Vec]:
    from .exact import gram_schmidt
    return gram_schmidt(vecs)


def _alpha_classes(alphas: list[Vec], v_basis: list[Vec]) -> list[dict]:
    """Group states by two-side rays, pairing each ray with its
    orthocomplement inside the two-dimensional support."""
    rays: list[Vec] = []
    ray_members: list[list[int]] = []
    for i, a in enumerate(alphas):
        ca = a.normalized_leading()
        for k, r in enumerate(rays):
            if r == ca:
                ray_members[k].append(i)
                break
        else:
            rays.append(ca)
            ray_members.append([i])
    classes: list[dict] = []
    used = [False] * len(rays)
    for k, r in enumerate(rays):
        if used[k]:
            continue
        used[k] = True
        partner = None
        for l in range(k + 1, len(rays)):
            if not used[l] and inner(r, rays[l]).is_zero():
                partner = l
                used[l] = True
                break
        if partner is not None:
            classes.append({"dirs": (r, rays[partner]),
                            "members": (ray_members[k], ray_members[partner])})
        else:
            perp = _orthocomplement_in(r, v_basis)
            classes.append({"dirs": (r, perp),
                            "members": (ray_members[k], [])})
    return classes


def _orthocomplement_in(ray: Vec, v_basis: list[Vec]) -> Vec:
    """The ray orthogonal to `ray` inside the 2-dim span of v_basis."""
    from .exact import sc
    b0, b1 = v_basis
    c0, c1 = inner(ray, b0), inner(ray, b1)
    # candidate = c1'*b0 - c0'*b1 style combination orthogonal to ray
    cand = b0.scale(c1.conj()) - b1.scale(c0.conj())
    if cand.is_zero():
        # ray is proportional to one basis vector; the other one works
        cand = b1 if c1.is_zero() else b0
    if not inner(ray, cand).is_zero():
        # project out the ray component exactly
        cand = cand - ray.scale(inner(ray, cand) / sc(ray.norm2()))
    return cand.normalized_leading()


def _complement(elements: list[Projector], dim: int) -> Projector | None:
    from .exact import identity
    total = elements[0].mat
    for e in elements[1:]:
        total = total + e.mat
    rest = identity(dim) - total
    if rest.is_zero():
        return None
    return Projector(rest, _validated=True)


def three_product_protocol(s: StateSet) -> ProtocolTree:
    """Separating-party protocol for three orthogonal fully product
    states: measure {P_alpha, 1 - P_alpha} on a party where the first two
    states have orthogonal factors; each outcome leaves at most two
    orthogonal states."""
    if len(s) != 3:
        raise ValueError("exactly three states required")
    factors = [_full_factors(v, s.spec) for v in s.vectors()]
    if any(f is None for f in factors):
        raise ValueError("all three states must be fully product")
    j = None
    for party in range(s.spec.n_parties):
        if inner(factors[0][party], factors[1][party]).is_zero():
            j = party
            break
    if j is None:
        raise AssertionError(
            "orthogonal product states with no orthogonal factor pair")
    p0 = Projector.from_ray(factors[0][j])
    pvm = PVM([p0, p0.complement()])
    branches = apply(s, LocalPVM(pvm, (j,)))
    children: dict[int, Node | Leaf] = {}
    for o, br in branches.items():
        if br.states is None:
            continue
        n = len(br.states)
        children[o] = Leaf("identified") if n == 1 else Leaf("two-orthogonal")
    return Node((j,), pvm, children)


def _full_factors(v: Vec, spec: PartySpec) -> list[Vec] | None:
    """Per-party factors of a fully product state, else None."""
    out: list[Vec] = []
    dims = list(spec.dims)
    current = v
    remaining = list(range(len(dims)))
    while len(remaining) > 1:
        sub_dims = [dims[p] for p in remaining]
        idx = GroupIndexer(sub_dims, (0,))
        slices = idx.local_vectors(current)
        m = Mat(tuple(tuple(u.entries[g] for u in slices)
                      for g in range(idx.group_dim)))
        if rank(m) != 1:
            return None
        g0, r0 = _first_nonzero_cell(m)
        out.append(m.col(r0))
        current = m.row(g0)
        remaining = remaining[1:]
    out.append(current)
    return out


# ---------------------------------------------------------------------------
# bounded search

@dataclass
class SearchConfig:
    depth: int = 4
    max_candidates_per_node: int = 12
    max_pvms_per_block: int = 32
    max_exact_dim: int = 9


_SEARCH_MEMO: dict = {}
_SEARCH_MEMO_CAP = 8192


def lpcc_search(s: StateSet, p: Partition, depth: int | None = None,
                config: SearchConfig | None = None) -> Verdict:
    """Breadth-limited distinguishability decision within a partition.

    Measurements are restricted to single blocks of the partition;
    terminal rules are the leaf rules of execute_and_verify. Returns an
    indistinguishability certificate when no block admits a nontrivial
    orthogonality-preserving PVM, and unknown when the bound bites.
    Verdicts are memoized across calls (they depend only on exact data).
    """
    cfg = config or SearchConfig()
    if depth is not None:
        cfg = SearchConfig(depth=depth,
                           max_candidates_per_node=cfg.max_candidates_per_node,
                           max_pvms_per_block=cfg.max_pvms_per_block,
                           max_exact_dim=cfg.max_exact_dim)
    p.validate(s.spec)
    if len(_SEARCH_MEMO) > _SEARCH_MEMO_CAP:
        _SEARCH_MEMO.clear()
    return _search(s, p, cfg.depth, cfg, _SEARCH_MEMO)


def _ray_key(v: Vec):
    return tuple((a.re, a.im) for a in v.normalized_leading().entries)


def _signature(s: StateSet, p: Partition, cfg: SearchConfig | None = None):
    rays = tuple(sorted(_ray_key(v) for v in s.vectors()))
    caps = ((cfg.max_candidates_per_node, cfg.max_pvms_per_block,
             cfg.max_exact_dim) if cfg else ())
    return (s.spec.dims, p.blocks, rays, caps)


def _search(s: StateSet, p: Partition, depth: int, cfg: SearchConfig,
            memo: dict) -> Verdict:
    if len(s) == 1:
        return Verdict("distinguishable", tree=Leaf("identified"))
    if len(s) == 2:
        return Verdict("distinguishable", tree=Leaf("two-orthogonal"))
    sig = _signature(s, p, cfg)
    if sig in memo:
        status, payload, tried_depth = memo[sig]
        if status == "distinguishable":
            return payload
        if status in ("indistinguishable",):
            return payload
        if tried_depth >= depth:
            return payload

    quick = _structural_leaf(s, p)
    if quick is not None:
        verdict = Verdict("distinguishable", tree=quick)
        memo[sig] = ("distinguishable", verdict, depth)
        return verdict

    candidates: list[LocalPVM] = []
    solver_unknown = False
    for block in p.blocks:
        try:
            found = enumerate_op_pvms(
                s, block, nontrivial_for_set=True,
                max_pvms=cfg.max_pvms_per_block,
                max_exact_dim=cfg.max_exact_dim)
        except ValueError:
            continue
        candidates.extend(found)
    if not candidates:
        cert = is_pvm_irreducible(s, p, max_exact_dim=cfg.max_exact_dim)
        if cert.irreducible:
            verdict = Verdict("indistinguishable", certificate=cert,
                              trace=["no block admits a nontrivial "
                                     "orthogonality-preserving PVM"])
            memo[sig] = ("indistinguishable", verdict, depth)
            return verdict
        verdict = Verdict("unknown",
                          trace=[f"no usable candidates; certificate status "
                                 f"{cert.status}"])
        memo[sig] = ("unknown", verdict, depth)
        return verdict

    if depth <= 0:
        verdict = Verdict("unknown", trace=["depth bound exhausted"])
        memo[sig] = ("unknown", verdict, depth)
        return verdict

    candidates = _order_candidates(s, candidates)[:cfg.max_candidates_per_node]
    for lp in candidates:
        branches = apply(s, lp)
        children: dict[int, Node | Leaf] = {}
        ok = True
        for o, br in branches.items():
            if br.states is None:
                continue
            if len(br.states) == len(s) and _same_rays(br.states, s):
                ok = False      # measurement did nothing useful on this branch
                break
            sub = _search(br.states, p, depth - 1, cfg, memo)
            if not sub.distinguishable:
                ok = False
                break
            children[o] = sub.tree
        if ok:
            tree = Node(lp.group, lp.pvm, children)
            verdict = Verdict("distinguishable", tree=tree)
            memo[sig] = ("distinguishable", verdict, depth)
            return verdict
    verdict = Verdict("unknown", trace=["no candidate measurement led to a "
                                        "full discrimination tree"])
    memo[sig] = ("unknown", verdict, depth)
    return verdict


def _order_candidates(s: StateSet, candidates: list[LocalPVM]) -> list[LocalPVM]:
    """Most informative first: fewest total survivals across outcomes,
    then fewer outcomes; deterministic tiebreak on the PVM itself."""
    idx_cache: dict = {}

    def survivals(lp: LocalPVM) -> int:
        key = lp.group
        if key not in idx_cache:
            idx_cache[key] = GroupIndexer(s.spec.dims, lp.group)
        idx = idx_cache[key]
        count = 0
        for e in lp.pvm.elements:
            for v in s.vectors():
                if not idx.apply_operator(e.mat, v).is_zero():
                    count += 1
        return count

    keyed = []
    for lp in candidates:
        keyed.append((survivals(lp), len(lp.pvm),
                      tuple(tuple((x.re, x.im) for x in row)
                            for e in lp.pvm.elements for row in e.mat.entries),
                      lp))
    keyed.sort(key=lambda t: t[:3])
    return [t[3] for t in keyed]


def _same_rays(a: StateSet, b: StateSet) -> bool:
    ra = sorted(_ray_key(v) for v in a.vectors())
    rb = sorted(_ray_key(v) for v in b.vectors())
    return ra == rb


def _structural_leaf(s: StateSet, p: Partition) -> Leaf | None:
    """Recognize terminal structures: three fully product states, or a
    product set with an (effectively) two-dimensional side whose wide
    side sits inside one partition block."""
    if len(s) == 3:
        try:
            tree = three_product_protocol(s)
            _exec(s, tree, (), [])
            return Leaf("three-product")
        except (ValueError, ProtocolError, AssertionError):
            pass
    try:
        tree = lemma1_protocol(s)
    except LemmaStructureError:
        return None
    groups = _tree_groups(tree)
    for g in groups:
        if not any(set(g) <= set(b) for b in p.blocks):
            return None
    try:
        _exec(s, tree, (), [])
        return Leaf("lemma1-2xn")
    except ProtocolError:
        return None


def _tree_groups(tree: ProtocolTree) -> list[tuple[int, ...]]:
    if isinstance(tree, Leaf):
        return []
    out = [tree.group]
    for child in tree.children.values():
        out.extend(_tree_groups(child))
    return out


# ---------------------------------------------------------------------------
# protocol scripts (JSON)

def tree_from_script(data: dict, spec: PartySpec) -> ProtocolTree:
    """Elaborate a protocol script against a party spec.

    Nodes: {"group": ["C"] or [2], "pvm": "0,1;2" or explicit matrix
    list, "children": {"0": ...}}; leaves: {"claim": rule}.
    """
    from .kets import parse_pvm
    if "claim" in data:
        return Leaf(data["claim"])
    raw_group = data["group"]
    group = tuple(spec.party_index(g) if isinstance(g, str) else int(g)
                  for g in raw_group)
    dims = [spec.dims[p] for p in group]
    pvm_spec = data["pvm"]
    if isinstance(pvm_spec, str):
        pvm = parse_pvm(pvm_spec, dims)
    else:
        pvm = PVM.from_json(pvm_spec)
    children = {int(k): tree_from_script(v, spec)
                for k, v in data.get("children", {}).items()}
    return Node(group, pvm, children)
