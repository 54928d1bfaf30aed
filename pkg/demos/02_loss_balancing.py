# %% [markdown]
# # Why the client pre-compensates loss
#
# Each time bin takes a different path through the hardware: a bin that
# interacts with H(x) qubits survives with probability
# eta_t * eta_d * eta_1**H(x) * eta_0**(n - H(x)). If the client sent a
# uniform superposition, lossier bins would be under-represented in the
# detected photon and the heralded state would be biased. Weighting
# |c_x|**2 proportional to 1/eta_x makes every *detected* bin equally
# likely, at the price of a slightly lower overall click probability.

# %%
import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from rrsp import (
    DistanceModel,
    EfficiencyModel,
    balanced_amplitudes,
    hamming_weight,
    ideal_success_probability,
    mode_efficiencies,
)

model = EfficiencyModel(eta_t=1.0, eta_0=0.9, eta_1=0.81, eta_d=0.9, n=4)
etas = mode_efficiencies(model)
weights = balanced_amplitudes(model, np.zeros(model.n)).weights

print("bin  H(x)  survival   |c_x|^2   product")
for x in range(model.num_modes):
    h = int(hamming_weight(x))
    print(f"{x:>3}  {h:>4}  {etas[x]:>8.4f}  {weights[x]:>8.4f}  {etas[x] * weights[x]:.6f}")

# %% [markdown]
# The last column is flat: survival times weight is the same for every bin,
# which is exactly the balancing condition. Its common value times 2**n is
# the click probability.

# %%
print("click probability:", ideal_success_probability(model))
print("flat product * 2^n:", etas[0] * weights[0] * model.num_modes)

# %% [markdown]
# The click probability factorizes as eta_t * eta_d * h**n where h is the
# harmonic mean of the two reflection survivals, so registers cost a fixed
# factor h per extra qubit. Distance enters only through eta_t.

# %%
fig, (left, right) = plt.subplots(1, 2, figsize=(9, 3.4))

sizes = np.arange(1, 11)
for eta_pair in [(0.95, 0.9), (0.9, 0.81), (0.8, 0.64)]:
    probs = [
        ideal_success_probability(EfficiencyModel(1.0, eta_pair[0], eta_pair[1], 0.9, n=int(m)))
        for m in sizes
    ]
    left.semilogy(sizes, probs, "o-", label=f"$\\eta_0$={eta_pair[0]}, $\\eta_1$={eta_pair[1]}")
left.set_xlabel("register size n")
left.set_ylabel("click probability")
left.legend(fontsize=8)

distances = np.linspace(0, 200, 81)
transmissions = [DistanceModel(d, eta_t_intrinsic=0.9).eta_t() for d in distances]
right.semilogy(distances, transmissions)
right.set_xlabel("fibre length (km)")
right.set_ylabel("$\\eta_t$ at 0.2 dB/km")

fig.tight_layout()
fig.savefig("demos/output/loss_balancing.png", dpi=150)
print("wrote demos/output/loss_balancing.png")
