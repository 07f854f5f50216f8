"""Projective measurements attached to party groups.

A LocalPVM carries a PVM together with the ordered party group it acts
on; `apply` produces the exact unnormalized post-measurement branches and
`preserves_orthogonality` decides the orthogonality-preservation property
with one sesquilinear zero test per (element, pair).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

from .exact import (Mat, Scalar, Vec, ZERO, ONE, identity, inner, mat_mul,
                    projector_onto, rank)
from .indexing import GroupIndexer, total_dim
from .statesets import Partition, PartySpec, StateSet


class Projector:
    """Exact orthogonal projector; square, Hermitian, idempotent.

    When built from an explicit span, an orthogonal basis of the range is
    kept alongside the dense matrix; it makes pairwise-orthogonality
    tests linear instead of cubic in the dimension.
    """

    def __init__(self, mat: Mat, *, _validated: bool = False,
                 span: tuple[Vec, ...] | None = None):
        if mat.rows != mat.cols:
            raise ValueError("projector must be square")
        if not _validated:
            if not mat.is_hermitian():
                raise ValueError("projector is not Hermitian")
            if mat_mul(mat, mat) != mat:
                raise ValueError("projector is not idempotent")
        self.mat = mat
        self.span = span

    @staticmethod
    def from_span(vecs: Sequence[Vec], dim: int) -> "Projector":
        """Projector onto span(vecs); idempotent by construction."""
        from .exact import gram_schmidt
        basis = tuple(gram_schmidt([v for v in vecs if not v.is_zero()]))
        return Projector(projector_onto(basis, dim), _validated=True, span=basis)

    @staticmethod
    def from_ray(v: Vec) -> "Projector":
        return Projector.from_span([v], v.dim)

    @staticmethod
    def zero(dim: int) -> "Projector":
        return Projector(Mat(tuple(ZERO for _ in range(dim)) for _ in range(dim)),
                         _validated=True, span=())

    @staticmethod
    def full(dim: int) -> "Projector":
        return Projector(identity(dim), _validated=True)

    @staticmethod
    def diagonal(indices: Iterable[int], dim: int) -> "Projector":
        keep = sorted(set(indices))
        from .exact import basis_vec
        return Projector(Mat(tuple(ONE if (i == j and i in keep) else ZERO
                                   for j in range(dim)) for i in range(dim)),
                         _validated=True,
                         span=tuple(basis_vec(dim, i) for i in keep))

    @property
    def dim(self) -> int:
        return self.mat.rows

    def rank(self) -> int:
        return rank(self.mat)

    def complement(self) -> "Projector":
        from .exact import nullspace
        return Projector(identity(self.dim) - self.mat, _validated=True,
                         span=tuple(nullspace(self.mat)))

    def is_zero(self) -> bool:
        return self.mat.is_zero()

    def is_identity(self) -> bool:
        return self.mat == identity(self.dim)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Projector):
            return NotImplemented
        return self.mat == other.mat

    def __hash__(self) -> int:
        return hash(self.mat)

    def orthogonal_to(self, other: "Projector") -> bool:
        """P Q = 0; linear-time via span bases when both carry one."""
        if self.span is not None and other.span is not None:
            return all(inner(u, w).is_zero()
                       for u in self.span for w in other.span)
        return mat_mul(self.mat, other.mat).is_zero()

    def __repr__(self) -> str:
        return f"Projector(dim={self.dim}, rank={self.rank()})"

    def to_json(self) -> list:
        return [[a.to_quad() for a in row] for row in self.mat.entries]

    @staticmethod
    def from_json(rows: list) -> "Projector":
        return Projector(Mat(tuple(Scalar.from_quad(q) for q in row) for row in rows))


class PVM:
    """Complete set of mutually orthogonal projectors summing to identity.

    Hermiticity + idempotence of each element + sum-to-identity already
    force pairwise orthogonality, so that is the whole validity check.
    """

    def __init__(self, elements: Sequence[Projector]):
        if not elements:
            raise ValueError("PVM needs at least one element")
        dim = elements[0].dim
        if any(e.dim != dim for e in elements):
            raise ValueError("PVM elements have mixed dimensions")
        total = elements[0].mat
        for e in elements[1:]:
            total = total + e.mat
        if total != identity(dim):
            raise ValueError("PVM elements do not sum to the identity")
        self.elements = tuple(elements)
        self.dim = dim

    def __len__(self) -> int:
        return len(self.elements)

    def __iter__(self):
        return iter(self.elements)

    def is_trivial(self) -> bool:
        """Every element is 0 or the identity (the projective reading of
        'proportional to the identity')."""
        return all(e.is_zero() or e.is_identity() for e in self.elements)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, PVM):
            return NotImplemented
        return self.elements == other.elements

    def __hash__(self) -> int:
        return hash(self.elements)

    def __repr__(self) -> str:
        ranks = ",".join(str(e.rank()) for e in self.elements)
        return f"PVM(dim={self.dim}, ranks=[{ranks}])"

    def to_json(self) -> list:
        return [e.to_json() for e in self.elements]

    @staticmethod
    def from_json(data: list) -> "PVM":
        return PVM([Projector.from_json(rows) for rows in data])


def is_trivial(p: PVM) -> bool:
    return p.is_trivial()


@dataclass(frozen=True)
class LocalPVM:
    """A PVM acting on an ordered group of parties.

    The group is typically one block of a partition; the block-internal
    digit order is the listed party order.
    """

    pvm: PVM
    group: tuple[int, ...]
    partition: Partition | None = None

    def __post_init__(self):
        object.__setattr__(self, "group", tuple(self.group))

    def validate(self, spec: PartySpec) -> None:
        expect = total_dim([spec.dims[p] for p in self.group])
        if self.pvm.dim != expect:
            raise ValueError(
                f"PVM dim {self.pvm.dim} does not match group {self.group} "
                f"dimension {expect}")
        if any(p < 0 or p >= spec.n_parties for p in self.group):
            raise ValueError(f"group {self.group} outside spec")

    def describe(self, spec: PartySpec) -> str:
        return "".join(spec.labels[p] for p in self.group)


def embed(lp: LocalPVM, spec: PartySpec) -> list[Mat]:
    """Each element tensored with identity on the other parties."""
    lp.validate(spec)
    idx = GroupIndexer(spec.dims, lp.group)
    out = []
    for e in lp.pvm.elements:
        rows = [[ZERO] * spec.total_dim for _ in range(spec.total_dim)]
        for r in range(idx.rest_dim):
            for g_out in range(idx.group_dim):
                for g_in in range(idx.group_dim):
                    val = e.mat.entries[g_out][g_in]
                    if not val.is_zero():
                        rows[idx.flat(g_out, r)][idx.flat(g_in, r)] = val
        out.append(Mat(tuple(tuple(row) for row in rows)))
    return out


@dataclass(frozen=True)
class OutcomeBranch:
    outcome: int
    states: StateSet | None          # None when every state is annihilated
    annihilated: tuple[str, ...]


def apply(s: StateSet, lp: LocalPVM) -> dict[int, OutcomeBranch]:
    """Unnormalized post-measurement branches, one per outcome.

    States mapped to zero are dropped from the branch and recorded as
    annihilated (that is what lets protocol verification confirm
    elimination claims).
    """
    lp.validate(s.spec)
    idx = GroupIndexer(s.spec.dims, lp.group)
    branches: dict[int, OutcomeBranch] = {}
    for outcome, e in enumerate(lp.pvm.elements):
        survivors: list[tuple[str, Vec]] = []
        killed: list[str] = []
        for label, v in s.states:
            image = idx.apply_operator(e.mat, v)
            if image.is_zero():
                killed.append(label)
            else:
                survivors.append((label, image))
        group_name = lp.describe(s.spec)
        branch_set = None
        if survivors:
            branch_set = StateSet(
                s.spec, survivors,
                provenance=f"{s.provenance}|{group_name}:{outcome}")
        branches[outcome] = OutcomeBranch(outcome, branch_set, tuple(killed))
    return branches


@dataclass(frozen=True)
class OPVerdict:
    ok: bool
    witness: tuple[int, int, int] | None = None   # (outcome, i, j)

    def __bool__(self) -> bool:
        return self.ok


def preserves_orthogonality(s: StateSet, lp: LocalPVM) -> OPVerdict:
    """ok iff <psi_i| (P tensor I) |psi_j> = 0 for every element and pair.

    For projectors this single sesquilinear value equals the post-
    measurement inner product, so no Gram recomputation is needed.
    """
    lp.validate(s.spec)
    idx = GroupIndexer(s.spec.dims, lp.group)
    vecs = s.vectors()
    for outcome, e in enumerate(lp.pvm.elements):
        images = [idx.apply_operator(e.mat, v) for v in vecs]
        for i in range(len(vecs)):
            for j in range(i + 1, len(vecs)):
                if not inner(vecs[i], images[j]).is_zero():
                    return OPVerdict(False, (outcome, i, j))
    return OPVerdict(True)


def local_support_vectors(s: StateSet, group: Sequence[int]) -> list[Vec]:
    """All nonzero group-side slices of all states (they span the group's
    joint local support)."""
    idx = GroupIndexer(s.spec.dims, group)
    out = []
    for _, v in s.states:
        for u in idx.local_vectors(v):
            if not u.is_zero():
                out.append(u)
    return out


def acts_as_scalar_on(e: Projector, support: Sequence[Vec]) -> bool:
    """True when the element is 0 or the identity on span(support), i.e.
    trivial relative to the set living there."""
    idx_all_fixed = True
    idx_all_killed = True
    for v in support:
        image_entries = []
        for row in e.mat.entries:
            acc = ZERO
            for x, y in zip(row, v.entries):
                if not x.is_zero() and not y.is_zero():
                    acc = acc + x * y
            image_entries.append(acc)
        image = Vec(image_entries)
        if image != v:
            idx_all_fixed = False
        if not image.is_zero():
            idx_all_killed = False
        if not idx_all_fixed and not idx_all_killed:
            return False
    return idx_all_fixed or idx_all_killed


def is_trivial_for_set(lp: LocalPVM, s: StateSet) -> bool:
    """The PVM cannot eliminate a state or extract information from the
    set: every element acts as 0 or 1 on the group's joint local support,
    or that support is one-dimensional (a common factor, so outcome
    statistics are state-independent and the branch problems are
    isomorphic to the original)."""
    from .exact import vectors_rank
    support = local_support_vectors(s, lp.group)
    if vectors_rank(support) <= 1:
        return True
    return all(acts_as_scalar_on(e, support) for e in lp.pvm.elements)
