"""Analytic error budget for realistic client pulses.

The ideal protocol assumes exactly one photon in the right mode.  This
module models what a heralding click means when the source emits weak
coherent pulses (vacuum, one- and two-photon terms), a fraction
``epsilon`` of the light sits in a mode that never sees the phase gate,
and the photon can be lost at any stage of its path.  Everything is
closed-form or exhaustive enumeration over loss branches; no sampling.

Branch bookkeeping, with ``P0`` the balanced single-photon success:

* one photon sent and detected (weight ``|a1|**2 * P0``): ideal;
* two photons sent, one lost before any interaction, the other detected
  (weight ``2|a2|**2 * P0 * (1 - eta_t)``): the survivor still performs
  the full gate, so this branch is also faithful;
* two photons sent, one lost mid-protocol in bin ``x`` at stage ``l``,
  the other detected: the lost photon leaves partial which-bin
  information behind, degrading the heralded state;
* two photons transmitted: only visible without photon-number
  resolution, counted as zero fidelity in the worst case.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .efficiency import (
    EfficiencyModel,
    balanced_amplitudes,
    ideal_success_probability,
    mode_bits,
    mode_efficiencies,
)

__all__ = [
    "ClientPulse",
    "WcpSource",
    "LossLedger",
    "Branch",
    "BranchEnsemble",
    "loss_ledger",
    "herald_probability",
    "single_photon_fraction",
    "fidelity_lower_bound",
    "fidelity_estimate",
    "fidelity_estimate_single_qubit",
    "non_pnr_probability_correction",
    "wcp_amplitudes",
    "branch_ensemble",
]


@dataclass(frozen=True)
class ClientPulse:
    """Photon-number content of one client pulse.

    ``alpha0/alpha1/alpha2`` are the vacuum, one-photon and two-photon
    amplitudes; ``epsilon`` is the fraction of single-photon weight in
    a mode that misses the phase gate entirely.
    """

    alpha0: complex
    alpha1: complex
    alpha2: complex
    epsilon: float = 0.0

    def __post_init__(self) -> None:
        total = abs(self.alpha0) ** 2 + abs(self.alpha1) ** 2 + abs(self.alpha2) ** 2
        if abs(total - 1.0) > 1e-12:
            raise ValueError(f"photon-number amplitudes must be normalized, got {total!r}")
        if not 0.0 <= self.epsilon <= 1.0:
            raise ValueError(f"epsilon must lie in [0, 1], got {self.epsilon!r}")

    @classmethod
    def single_photon(cls, epsilon: float = 0.0) -> "ClientPulse":
        return cls(0.0, 1.0, 0.0, epsilon)

    @property
    def p1(self) -> float:
        """One-photon probability ``|alpha1|**2``."""
        return abs(self.alpha1) ** 2

    @property
    def p2(self) -> float:
        """Two-photon probability ``|alpha2|**2``."""
        return abs(self.alpha2) ** 2


@dataclass(frozen=True)
class WcpSource:
    """Weak coherent pulse of mean amplitude ``alpha``.

    Intensities above ``|alpha|**2 = 0.5`` are rejected: the photon
    statistics are truncated at two photons, and beyond that point the
    dropped tail stops being negligible.
    """

    mean_amplitude: complex

    def __post_init__(self) -> None:
        if abs(self.mean_amplitude) ** 2 > 0.5:
            raise ValueError(
                "mean intensity exceeds 0.5; the two-photon truncation is not valid"
            )


@dataclass(frozen=True, eq=False)
class LossLedger:
    """Where the photon can disappear, per bin and per stage.

    ``table[x, 0]`` is loss on the way in, ``table[x, q]`` for
    ``1 <= q < n`` is loss at the ``q``-th reflection, and
    ``table[x, n]`` lumps the final reflection with detection.  Each row
    sums to ``1 - eta_x``.
    """

    n: int
    table: np.ndarray = field(repr=False)

    def __post_init__(self) -> None:
        table = np.array(self.table, dtype=float)
        if table.shape != (1 << self.n, self.n + 1):
            raise ValueError(
                f"expected shape {(1 << self.n, self.n + 1)}, got {table.shape}"
            )
        table.setflags(write=False)
        object.__setattr__(self, "table", table)


@dataclass(frozen=True)
class Branch:
    """One heralding branch: its label, weight, and heralded fidelity."""

    label: str
    weight: float
    fidelity_contribution: float


@dataclass(frozen=True)
class BranchEnsemble:
    """Exhaustive decomposition of the heralding probability."""

    branches: tuple[Branch, ...]

    def total_weight(self) -> float:
        return float(sum(b.weight for b in self.branches))

    def weight_of(self, label_prefix: str) -> float:
        return float(
            sum(b.weight for b in self.branches if b.label.startswith(label_prefix))
        )

    def mean_fidelity(self, epsilon: float = 0.0) -> float:
        """Weight-averaged heralded fidelity, with the orthogonal-mode
        fraction written off completely."""
        total = self.total_weight()
        if total <= 0.0:
            raise ValueError("ensemble carries no weight; no herald to condition on")
        avg = sum(b.weight * b.fidelity_contribution for b in self.branches) / total
        return (1.0 - epsilon) * avg


def _prefix_weights(n: int) -> np.ndarray:
    """``pw[x, l] = popcount(x & (2**l - 1))`` for stages ``l`` in ``[0, n]``."""
    x = np.arange(1 << n, dtype=np.uint64)
    masks = (np.uint64(1) << np.arange(n + 1, dtype=np.uint64)) - np.uint64(1)
    return np.bitwise_count(x[:, None] & masks[None, :]).astype(np.int64)


def loss_ledger(model: EfficiencyModel) -> LossLedger:
    """Split ``1 - eta_x`` into per-stage loss probabilities.

    Stage 0 is the path to the register; stage ``q`` for ``1 <= q < n``
    is the reflection off qubit ``q-1`` conditioned on surviving up to
    it; stage ``n`` combines the last reflection and detection.
    """
    n = model.n
    num = model.num_modes
    bits = mode_bits(n)
    # per-reflection survival of bin x at qubit m
    step = np.where(bits == 1, model.eta_1, model.eta_0)
    # survival of everything strictly before reflection m
    before = np.ones((num, n))
    if n > 1:
        before[:, 1:] = np.cumprod(step[:, :-1], axis=1)
    table = np.zeros((num, n + 1))
    table[:, 0] = 1.0 - model.eta_t
    for q in range(1, n):
        table[:, q] = (1.0 - step[:, q - 1]) * model.eta_t * before[:, q - 1]
    table[:, n] = (1.0 - step[:, n - 1] * model.eta_d) * model.eta_t * before[:, n - 1]
    return LossLedger(n, table)


def herald_probability(pulse: ClientPulse, model: EfficiencyModel) -> float:
    """Click probability with a photon-number-resolving detector.

    A single sent photon clicks with the balanced success probability;
    a photon pair clicks (exactly once) when either photon survives and
    the other does not.
    """
    p0 = ideal_success_probability(model)
    return pulse.p1 * p0 + 2.0 * pulse.p2 * p0 * (1.0 - p0)


def single_photon_fraction(pulse: ClientPulse, model: EfficiencyModel) -> float:
    """Fraction of heralds caused by a pulse that carried one photon."""
    p = herald_probability(pulse, model)
    if p <= 0.0:
        raise ValueError("herald probability is zero; the fraction is undefined")
    return pulse.p1 * ideal_success_probability(model) / p


def _faithful_fraction(pulse: ClientPulse, model: EfficiencyModel) -> float:
    """Fraction of heralds that performed the full phase gate.

    Counts the single-photon branch plus the pair branch whose partner
    photon was lost before reaching the register.
    """
    p = herald_probability(pulse, model)
    if p <= 0.0:
        raise ValueError("herald probability is zero; the fraction is undefined")
    p0 = ideal_success_probability(model)
    faithful = pulse.p1 * p0 + 2.0 * pulse.p2 * p0 * (1.0 - model.eta_t)
    return faithful / p


def fidelity_lower_bound(pulse: ClientPulse, model: EfficiencyModel) -> float:
    """Worst-case heralded fidelity: every unfaithful branch scores zero."""
    return (1.0 - pulse.epsilon) * _faithful_fraction(pulse, model)


def fidelity_estimate(pulse: ClientPulse, model: EfficiencyModel) -> float:
    """Heralded fidelity with mid-protocol loss branches scored honestly.

    A partner photon lost in bin ``x`` at stage ``l`` has already
    imprinted which-bin information on every qubit it addressed before
    vanishing, collapsing each of those qubits with probability 1/2;
    the branch therefore retains fidelity ``2**-(x_0 + ... + x_{l-1})``
    instead of the zero the lower bound assigns.
    """
    p = herald_probability(pulse, model)
    if p <= 0.0:
        raise ValueError("herald probability is zero; the fidelity is undefined")
    p0 = ideal_success_probability(model)
    weights = balanced_amplitudes(model, np.zeros(model.n)).weights
    ledger = loss_ledger(model).table
    recovered = _prefix_weights(model.n).astype(float)
    late = float(
        np.sum(weights[:, None] * ledger[:, 1:] * 2.0 ** -recovered[:, 1:])
    )
    bound_part = _faithful_fraction(pulse, model)
    upgrade = (2.0 * pulse.p2 * p0 / p) * late
    return (1.0 - pulse.epsilon) * (bound_part + upgrade)


def fidelity_estimate_single_qubit(pulse: ClientPulse, model: EfficiencyModel) -> float:
    """Closed-form single-qubit estimate, for cross-checking.

    Agrees with :func:`fidelity_estimate` when the two reflection
    survivals are equal; with asymmetric survivals the two ways of
    averaging the late-loss branches differ and the exhaustive sum in
    :func:`fidelity_estimate` is the one this package trusts.
    """
    if model.n != 1:
        raise ValueError(f"closed form only covers n=1, got n={model.n}")
    faithful = _faithful_fraction(pulse, model)
    ratio = model.eta_1 / (model.eta_0 + model.eta_1)
    return (1.0 - pulse.epsilon) * (1.0 - 0.5 * ratio * (1.0 - faithful))


def non_pnr_probability_correction(pulse: ClientPulse, model: EfficiencyModel) -> float:
    """Extra click weight from photon pairs that both arrive.

    A detector without photon-number resolution cannot reject these
    events, so the heralding probability grows by the norm of the
    two-photon-transmitted component.  Enumerated over ordered bin
    pairs: distinct bins contribute both orderings, a doubly occupied
    bin once.
    """
    weights = balanced_amplitudes(model, np.zeros(model.n)).weights
    flux = weights * mode_efficiencies(model)
    pair = np.outer(flux, flux)
    both_bins = float(pair.sum() - np.trace(pair))
    same_bin = float(np.trace(pair))
    return pulse.p2 * (both_bins + same_bin)


def wcp_amplitudes(source: WcpSource, epsilon: float = 0.0) -> ClientPulse:
    """Photon-number content of a weak coherent pulse.

    Truncates the Poissonian amplitudes at two photons and renormalizes
    so the dropped tail does not leave probabilities ill-defined.
    """
    alpha = source.mean_amplitude
    raw = np.array(
        [1.0 - abs(alpha) ** 2 / 2.0, alpha, alpha**2 / math.sqrt(2.0)], dtype=complex
    )
    raw /= np.linalg.norm(raw)
    return ClientPulse(raw[0], raw[1], raw[2], epsilon)


def branch_ensemble(
    pulse: ClientPulse, model: EfficiencyModel, include_transmitted: bool = False
) -> BranchEnsemble:
    """Enumerate every heralding branch with its weight and fidelity.

    The default branches sum to :func:`herald_probability`; with
    ``include_transmitted`` the two-photon-transmitted branches are
    appended, raising the total to the non-resolving click probability.
    """
    p0 = ideal_success_probability(model)
    weights = balanced_amplitudes(model, np.zeros(model.n)).weights
    ledger = loss_ledger(model).table
    recovered = _prefix_weights(model.n)
    branches = [Branch("ideal-single", pulse.p1 * p0, 1.0)]
    branches.append(
        Branch("two-minus-early-loss", 2.0 * pulse.p2 * p0 * (1.0 - model.eta_t), 1.0)
    )
    for x in range(model.num_modes):
        for stage in range(1, model.n + 1):
            branches.append(
                Branch(
                    f"two-minus-late-loss(x={x},l={stage})",
                    2.0 * pulse.p2 * p0 * float(weights[x] * ledger[x, stage]),
                    2.0 ** -int(recovered[x, stage]),
                )
            )
    if include_transmitted:
        flux = weights * mode_efficiencies(model)
        for x in range(model.num_modes):
            for y in range(model.num_modes):
                branches.append(
                    Branch(
                        f"two-transmitted(x={x},x'={y})",
                        pulse.p2 * float(flux[x] * flux[y]),
                        0.0,
                    )
                )
    return BranchEnsemble(tuple(branches))
