# %% [markdown]
# # The monkey problem
#
# A monkey wants bananas. It can grab a box, a stone, or pieces of a stick
# that it then assembles, and each attempt at the bananas has its own odds.
# We minimise the expected cost of getting them.

# %%
from pamdp import CostModel, gen_monkey, mss_to_mdp, solve_ssp_symblicit
from pamdp.oracle import enumerate_mdp, explicit_ssp

mdp, goal = mss_to_mdp(gen_monkey(1, 2))
costs = CostModel(mdp)
report = solve_ssp_symblicit(mdp, costs, goal)
print(report.value_of(mdp.initial), report.action_of(mdp.initial))

# %% [markdown]
# Each iteration lumps the chain induced by the current strategy into a small
# quotient, solves it exactly and then improves the strategy.

# %%
for k, h in enumerate(report.history):
    print(k, h.quotient_size, h.residual)

# %% [markdown]
# The explicit engine lists all 256 states and reaches the same answer.

# %%
e = enumerate_mdp(mdp, costs, goal)
x = explicit_ssp(e)
print(len(e.states), x.values[e.index[mdp.initial]])
