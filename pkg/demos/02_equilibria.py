# %% [markdown]
# # Selfish versus altruistic equilibria
#
# Selfish agents pay ``c/x + p(x)``; altruists pay the marginal social
# cost ``R'(x)`` and ``c + eta`` to open an empty location.  Equal costs
# force equal densities, so it is enough to scan uniform allocations.

# %%
from pgl import Allocation, GameParams, check_ess, enumerate_uniform_ess, max_selfish_support
from pgl.equilibrium import altruistic_ess_threshold, altruistic_stability_interval

params = GameParams(r0=2.0, eta=0.01, c=0.05)

selfish = enumerate_uniform_ess(params, "selfish", 1000)
bound = max_selfish_support(params)
print("selfish ESS supports:", [r.support_size for r in selfish], f"(M_G = {bound.m_g})")

# %% [markdown]
# Altruistic ESS never stop: every uniform allocation beyond a threshold
# qualifies.

# %%
altruistic = enumerate_uniform_ess(params, "altruistic", 1000)
print(f"{len(altruistic)} altruistic ESS with n <= 1000; smallest n = {altruistic[0].support_size}")
print(f"R'' > 0 on (0, {altruistic_stability_interval(params):.4f}); "
      f"every n >= {altruistic_ess_threshold(params)} is an ESS")

# %% [markdown]
# Without disease, ten equal locations are a Nash equilibrium but not
# stable: adding people to one location makes it cheaper.

# %%
report = check_ess(Allocation.uniform(10), "selfish", GameParams.disease_free(r0=2.0, c=0.05))
print(f"nash={report.is_nash} stable={report.is_stable}")
for v in report.violations[:2]:
    print(" ", v.detail)
