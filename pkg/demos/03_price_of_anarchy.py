# %% [markdown]
# # Price of anarchy
#
# Selfish equilibria stay within a constant factor of the optimum; the
# altruistic ones do not.

# %%
from pgl import GameParams, altruistic_poa_growth, selfish_poa
from pgl.analysis import altruistic_witness_size

params = GameParams(r0=2.0, eta=0.01, c=0.05)
report = selfish_poa(params)
print(f"worst selfish ESS cost {report.worst_ess_cost:.4f} (n={report.worst_ess_support})")
print(f"optimum in [{report.opt_lower}, {report.opt_upper:.4f}] (best uniform n={report.opt_argmin_n})")
print(f"PoA in [{report.poa_lower:.3f}, {report.poa_upper_estimate:.3f}], bound 3/c + r0 = {report.theorem_bound}")

# %%
for entry in altruistic_poa_growth(params, [1, 100, 200, 400, 800]):
    if entry.is_ess:
        print(f"K={entry.k:4d}  ratio={entry.ratio:8.2f}  floor Kc/(c+1)={entry.floor:7.2f}")
    else:
        print(f"K={entry.k:4d}  {entry.error}")

# %% [markdown]
# For any target ratio there is an altruistic ESS that beats it.

# %%
for target in (10, 1000):
    k = altruistic_witness_size(params, target)
    (entry,) = altruistic_poa_growth(params, [k])
    print(f"target {target}: K={k} gives ratio {entry.ratio:.1f}")

# %% [markdown]
# With r0 < 1 the single-location selfish ESS can cost more than
# ``max(2, c r0 + 1)``; the report flags it.

# %%
low = selfish_poa(GameParams(r0=0.5, eta=0.5, c=5.0))
print(f"cost {low.worst_ess_cost:.4f} vs bound {low.ess_cost_bound}; certified={low.certified}")
