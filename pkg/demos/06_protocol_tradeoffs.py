# %% [markdown]
# # Reflection vs emission: who wins where
#
# The natural benchmark for remotely preparing one qubit is an emission
# protocol: entangle a photon with the server qubit, send it, and either
# measure it directly (single click, SC) or twice for loss robustness
# (double click, DC). All three protocols trade success probability P
# against fidelity F along a line, so P/(1-F) is a single figure of merit
# for each.

# %%
import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from rrsp import sweep_figure2

# %% [markdown]
# Regime (a): losses dominated by routing photons into and out of the
# node, identical for every protocol. Reflection sits exactly a factor
# two under single-click here, and both beat double-click easily.

# %%
etas = list(np.linspace(0.05, 0.95, 19))
points = sweep_figure2("a", etas)

fig, (left, right) = plt.subplots(1, 2, figsize=(9, 3.6))
for protocol, style in (("R", "o-"), ("SC", "s-"), ("DC", "^-")):
    merits = [pt.merit() for pt in points if pt.protocol == protocol]
    left.semilogy(etas, merits, style, ms=3, label=protocol)
left.set_xlabel("routing efficiency $\\eta$")
left.set_ylabel("P / (1 - F)")
left.set_title("regime (a): shared routing loss")
left.legend()

# %% [markdown]
# Regime (b): the interface itself is the bottleneck. The reflection
# protocol pays (C/(C+2))^2 per bounce while the emission protocols pay
# the extraction efficiency C/(C+1) per photon. Reflection wins outright
# at low cooperativity, always beats double-click, and the double-click
# merit closes the gap only asymptotically as C grows.

# %%
cs = list(np.logspace(-1, 3, 25))
points_b = sweep_figure2("b", cs)
for protocol, style in (("R", "o-"), ("SC", "s-"), ("DC", "^-")):
    merits = [pt.merit() for pt in points_b if pt.protocol == protocol]
    right.loglog(cs, merits, style, ms=3, label=protocol)
right.set_xlabel("cooperativity C")
right.set_title("regime (b): interface-limited")
right.legend()

fig.tight_layout()
fig.savefig("demos/output/protocol_tradeoffs.png", dpi=150)
print("wrote demos/output/protocol_tradeoffs.png")

# %%
for c in (0.1, 1.0, 10.0, 1e6):
    merits = {pt.protocol: pt.merit() for pt in sweep_figure2("b", [c])}
    print(
        f"C={c:<8g} R={merits['R']:.4g}  SC={merits['SC']:.4g}  DC={merits['DC']:.4g}"
        f"  R/DC={merits['R'] / merits['DC']:.3f}"
    )
