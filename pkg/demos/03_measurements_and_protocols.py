# %% [markdown]
# # Local measurements, branches, and discrimination protocols
#
# A LocalPVM is a projection-valued measure attached to an ordered party
# group. Applying one returns the exact unnormalized branch per outcome,
# with annihilated states recorded. Protocol trees chain such
# measurements and end in leaf rules; verification replays everything.

# %%
from lpcckit.kets import parse_pvm
from lpcckit.measurements import LocalPVM, apply, preserves_orthogonality
from lpcckit.statesets import build_named_set

s1 = build_named_set("S1")
charlie = LocalPVM(parse_pvm("0,1;2", [3]), (2,))
print("preserves orthogonality:", bool(preserves_orthogonality(s1, charlie)))
for outcome, br in apply(s1, charlie).items():
    print(f"outcome {outcome}: keeps {br.states.labels()}, "
          f"annihilates {br.annihilated}")

# %% [markdown]
# The shipped fixture replays the full published discrimination tree for
# the TYPE-I family: the third party splits its levels, the middle party
# measures the +/- pair, and each leaf closes with the constructive
# protocol for product sets with a two-dimensional side.

# %%
from lpcckit.protocols import execute_and_verify
from lpcckit.theorems import fixture_protocol

s, tree = fixture_protocol("s1_discrimination")
verdict = execute_and_verify(s, tree)
print(verdict.status)
for line in verdict.trace:
    print("  ", line)

# %% [markdown]
# The constructive pieces are available on their own: any orthogonal
# product set whose one side is effectively two-dimensional gets a
# three-round tree, and any three orthogonal fully product states are
# finished by one separating party.

# %%
import random

from lpcckit.generators import random_lemma_structured_set, random_product_set
from lpcckit.protocols import lemma1_protocol, three_product_protocol

rng = random.Random(1)
s2xn = random_lemma_structured_set(rng, 5)
print("random 2 x 5 structured set:", len(s2xn), "states ->",
      execute_and_verify(s2xn, lemma1_protocol(s2xn)).status)

triple = random_product_set(rng, (3, 3, 3), 3, domino_moves=0)
print("random product triple ->",
      execute_and_verify(triple, three_product_protocol(triple)).status)

# %% [markdown]
# `lpcc_search` decides distinguishability within a partition: it finds a
# tree for the TYPE-I family and an irreducibility certificate for the
# nine-state nonlocal basis.

# %%
from lpcckit.protocols import lpcc_search
from lpcckit.statesets import Partition

print("TYPE-I family:", lpcc_search(s1, Partition.trivial(3), depth=3).status)
dom = build_named_set("Domino")
print("nonlocal basis:", lpcc_search(dom, Partition.trivial(2), depth=2).status)
