# %% [markdown]
# # Final size of a local epidemic
#
# At a location holding density ``x``, the fraction of the whole population
# that is eventually infected solves ``R = x - (1-eta) x exp(-r0 R)``.
# We solve it, compare against a direct RK4 integration of the SIR
# equations, and look at how the marginal final size ``R'(x)`` crosses 1
# exactly at ``x = 1/r0``.

# %%
import numpy as np

from pgl import GameParams, final_size, final_size_array, final_size_derivative, simulate_sir

params = GameParams(r0=2.0, eta=0.01, c=0.05)
sol = final_size(1.0, params)
print(f"R(1) = {sol.r_inf:.12f}  p = {sol.p:.6f}  residual = {sol.residual:.1e}")
print(f"R'(1) = {sol.r_prime:.6f}  R''(1) = {sol.r_double_prime:.6f}")

# %% [markdown]
# The transcendental solve and the ODE agree to well below 1e-6.

# %%
traj = simulate_sir(1.0, params)
print(f"RK4 terminal R = {traj.terminal_r:.12f} after t = {traj.times[-1]:.1f} recovery periods")
print(f"gap = {abs(traj.terminal_r - sol.r_inf):.2e}")

# %% [markdown]
# Below ``1/r0`` an extra resident adds less than one infection, above it
# more than one.

# %%
x = np.array([0.1, 0.3, 0.5, 0.7, 0.9])
slopes = final_size_derivative(x, final_size_array(x, params), params)
for xi, si in zip(x, slopes):
    print(f"x = {xi:.1f}  R'(x) = {si:.4f}")
