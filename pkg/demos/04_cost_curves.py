# %% [markdown]
# # Location cost curves with equilibrium markers
#
# Plots the selfish location cost against density for the default
# parameter quartet, marking selfish (dots) and altruistic (stars)
# equilibrium densities.  Requires matplotlib.

# %%
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

from pgl.figure import DEFAULT_QUARTET, curve_series

fig, ax = plt.subplots(figsize=(7, 4.5))
for params in DEFAULT_QUARTET:
    series = curve_series(params, points=400, n_max=1000)
    x = [s["x"] for s in series.samples]
    y = [s["selfish_total"] for s in series.samples]
    style = "--" if params.eta > 0.1 else "-"
    (line,) = ax.plot(x, y, style, label=f"eta={params.eta}, c={params.c}")
    for kind, marker in (("selfish", "o"), ("altruistic", "*")):
        pts = [m for m in series.markers if m["type"] == kind and m["density"] >= 1e-3]
        ax.plot([m["density"] for m in pts], [m["selfish_cost"] for m in pts], marker,
                color=line.get_color(), ms=5, ls="none")
    print(f"eta={params.eta}, c={params.c}: best selfish {series.best_marker_cost('selfish'):.3f}, "
          f"best altruistic {series.best_marker_cost('altruistic'):.3f}")

ax.set_xscale("log")
ax.set_ylim(0, 3)
ax.set_xlabel("population density x")
ax.set_ylabel("selfish location cost")
ax.legend()
out = Path(__file__).parent / "output"
out.mkdir(exist_ok=True)
fig.savefig(out / "cost_curves.png", dpi=120, bbox_inches="tight")
print("saved", out / "cost_curves.png")
