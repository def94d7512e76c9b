# %% [markdown]
# # Mean payoff on a random model
#
# Without a goal we look at the long-run average cost per step (the gain)
# and the bias, which breaks ties between strategies with equal gain.

# %%
from pamdp import CostModel, gen_random, mss_to_mdp, solve_emp_symblicit

mdp, _ = mss_to_mdp(gen_random(3, with_goal=False), keep_goal=False)
report = solve_emp_symblicit(mdp, CostModel(mdp))
gain, bias = report.value_of(mdp.initial)
print("gain", gain, "bias", bias)

# %% [markdown]
# Maximising instead of minimising only flips the sign of the costs.

# %%
best = solve_emp_symblicit(mdp, CostModel(mdp, "maximize"))
gain, bias = best.value_of(mdp.initial)
print("gain", gain, "bias", bias)
