# %% [markdown]
# # Exact arithmetic for state discrimination
#
# Every check in this package is an equality or zero test, so the whole
# stack runs on Gaussian-rational scalars (exact rational real and
# imaginary parts) and unnormalized state vectors. Normalizing would drag
# square roots into the field; leaving states unnormalized keeps every
# inner product a plain rational number.

# %%
from fractions import Fraction

from lpcckit.exact import Mat, Scalar, Vec, inner, nullspace, rank, reshape, tensor

half = Scalar(Fraction(1, 2), Fraction(3, 4))
print("a scalar:", half, " conjugate:", half.conj(), " |.|^2:", half.norm2())

# %% [markdown]
# Kets are dense vectors; `tensor` builds multiparty states with the
# leftmost party slowest. The two weight-four states below live on one
# 3 x 2 x 3 system and are exactly orthogonal.

# %%
ket0 = Vec([1, 0, 0])
plus = Vec([1, 1])
minus = Vec([1, -1])

a = tensor(ket0, plus, Vec([1, 1, 0]))
b = tensor(ket0, minus, Vec([1, -1, 0]))
print("dim:", a.dim)
print("<a|b> =", inner(a, b))
print("<a|a> =", inner(a, a), "(no normalization, stays integer)")

# %% [markdown]
# Reshaping a bipartite vector into a matrix turns separability into a
# rank question: product states reshape to rank one, entangled states do
# not. Rank and nullspace are computed by fraction-exact elimination, so
# there is no tolerance anywhere.

# %%
product = tensor(plus, minus)
entangled = Vec([1, 0, 0, 1])
print("rank of reshaped product:", rank(reshape(product, 2, 2)))
print("rank of reshaped entangled:", rank(reshape(entangled, 2, 2)))

m = Mat([[1, 2, 3], [2, 4, 6], [0, 1, 1]])
print("rank:", rank(m), " nullspace basis:", nullspace(m))
