# %% [markdown]
# # Pseudo-antichains
#
# A pseudo-element `(x, alpha)` stands for the states below `x` that are not
# below any element of `alpha`. Finite unions of them describe any set of
# states, and the set algebra never needs to list those states one by one.

# %%
from pamdp.lattice import BitsetDomain, GridDomain, PseudoAntichain

d = GridDomain(2, 5)
A = PseudoAntichain(d, [((3, 2), ((2, 1), (0, 2)))])
print(sorted(A.states()))

# %% [markdown]
# Union, intersection and difference stay symbolic. Results are kept in a
# simplified form, so equal sets usually print the same way.

# %%
B = PseudoAntichain.closure(d, [(2, 4)])
print(A | B)
print(A & B)
print(sorted((B - A).states()))

# %% [markdown]
# On bitsets a state is a set of true conditions. Bigger sets sit lower in
# the order, so the closure of a single mask holds every superset of it.

# %%
bits = BitsetDomain(4)
C = PseudoAntichain.closure(bits, [0b0011])
print(sorted(C.states()))
