# %% [markdown]
# # The named state families
#
# The package ships the two 3 x 2 x 3 families with opposite activation
# behavior (TYPE-I and TYPE-II), their (2m+1) x 2 x (2m+1)
# generalizations, the nine-state nonlocal product basis in 3 x 3, and
# the 8 x 8 x 8 union of three TYPE-II copies.

# %%
from lpcckit.diagram import render_ascii
from lpcckit.statesets import (Partition, build_named_set,
                               check_mutual_orthogonality,
                               is_locally_redundant,
                               sets_equal_up_to_relabeling)

for name in ("S1", "S2", "Domino", "UnionS"):
    s = build_named_set(name)
    print(f"{name}: {len(s)} states in {'x'.join(map(str, s.spec.dims))},",
          "orthogonal" if check_mutual_orthogonality(s) else "NOT orthogonal")

# %% [markdown]
# The generalized families collapse to the base examples at m = 1, and
# their size follows the quadratic law 4m(m+1)+1.

# %%
for m in (1, 2, 3):
    fam = build_named_set("S1m", m=m)
    print(f"m={m}: {len(fam)} states", "(matches base set)" if m == 1 and
          sets_equal_up_to_relabeling(fam, build_named_set("S1")) else "")

# %% [markdown]
# Block diagrams show where each state lives once a partition is merged
# to two effective parties. The TYPE-I family tiles the 3 x 6 grid the
# same way the nine-state nonlocal basis tiles 3 x 3.

# %%
print(render_ascii(build_named_set("S1"), Partition(((0,), (1, 2)))))
print()
print(render_ascii(build_named_set("Domino")))

# %% [markdown]
# Genuine activation claims need sets free from local redundancy: no
# subsystem can be discarded without breaking perfect distinguishability.
# All prime local dimensions already rule redundancy out.

# %%
for name in ("S1", "S2", "UnionS"):
    verdict = is_locally_redundant(build_named_set(name))
    print(name, "->", "redundant" if verdict else "irredundant")
