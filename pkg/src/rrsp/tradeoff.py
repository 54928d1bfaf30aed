"""Rate-versus-fidelity comparison against emission-based preparation.

All three protocols trade success probability P against fidelity F along
a line, so each is summarized by the merit P/(1-F): how much success
probability one attempt buys per unit of infidelity.  The reflection
protocol's merit comes from its single-qubit weak-pulse error budget;
the single-click (SC) and double-click (DC) baselines use their printed
closed forms.  Two comparison scenarios are provided: one limited by
photon routing and detection, one limited by the light-matter interface.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .cavity import emission_efficiency, reflection_efficiency
from .efficiency import EfficiencyModel

__all__ = [
    "PROTOCOLS",
    "REGIMES",
    "TradeoffPoint",
    "sc_tradeoff",
    "dc_tradeoff",
    "sc_merit",
    "dc_merit",
    "r_tradeoff_merit",
    "routing_limited_model",
    "interface_limited_model",
    "sweep_figure2",
    "success_probability_comparison",
]

PROTOCOLS = ("R", "SC", "DC", "R-intensity")
REGIMES = ("routing-limited", "interface-limited")

_REGIME_ALIASES = {
    "a": "routing-limited",
    "routing-limited": "routing-limited",
    "b": "interface-limited",
    "interface-limited": "interface-limited",
}


@dataclass(frozen=True)
class TradeoffPoint:
    """One protocol evaluated at one sweep setting.

    P and F are a point on the protocol's tradeoff line; the line's
    slope is recovered as ``merit()``.  F may be negative (the line is
    extrapolated), but never exceeds 1.
    """

    protocol: str
    P: float
    F: float
    regime: str
    sweep_parameter: float

    def __post_init__(self) -> None:
        if self.protocol not in PROTOCOLS:
            raise ValueError(f"unknown protocol {self.protocol!r}")
        if self.regime not in REGIMES:
            raise ValueError(f"unknown regime {self.regime!r}")
        if not 0.0 <= self.P <= 1.0:
            raise ValueError(f"P must lie in [0, 1], got {self.P!r}")
        if not self.F <= 1.0:
            raise ValueError(f"F must not exceed 1, got {self.F!r}")

    def merit(self) -> float:
        """P/(1-F); infinite when the point sits at perfect fidelity."""
        gap = 1.0 - self.F
        if gap == 0.0:
            return math.inf
        return self.P / gap


def _check_probability(name: str, value: float) -> None:
    if not 0.0 <= value <= 1.0:
        raise ValueError(f"{name} must lie in [0, 1], got {value!r}")


def sc_tradeoff(p_sc: float, eta_s: float) -> float:
    """Single-click fidelity at success probability ``p_sc``."""
    _check_probability("p_sc", p_sc)
    if not 0.0 < eta_s <= 1.0:
        raise ValueError(f"eta_s must lie in (0, 1], got {eta_s!r}")
    return 1.0 - (p_sc / 8.0) * (1.0 - eta_s) / eta_s


def dc_tradeoff(p_dc: float, eta_s: float) -> float:
    """Double-click fidelity at success probability ``p_dc``."""
    _check_probability("p_dc", p_dc)
    if not 0.0 < eta_s <= 1.0:
        raise ValueError(f"eta_s must lie in (0, 1], got {eta_s!r}")
    return 1.0 - (p_dc / 2.0) * (1.0 - eta_s) / eta_s**2


def sc_merit(eta_s: float) -> float:
    """P/(1-F) of the single-click line: 8*eta_s/(1-eta_s)."""
    if not 0.0 < eta_s <= 1.0:
        raise ValueError(f"eta_s must lie in (0, 1], got {eta_s!r}")
    if eta_s == 1.0:
        return math.inf
    return 8.0 * eta_s / (1.0 - eta_s)


def dc_merit(eta_s: float) -> float:
    """P/(1-F) of the double-click line: 2*eta_s**2/(1-eta_s)."""
    if not 0.0 < eta_s <= 1.0:
        raise ValueError(f"eta_s must lie in (0, 1], got {eta_s!r}")
    if eta_s == 1.0:
        return math.inf
    return 2.0 * eta_s**2 / (1.0 - eta_s)


def r_tradeoff_merit(model: EfficiencyModel) -> float:
    """P/(1-F) of single-qubit reflection preparation with weak pulses.

    Leading order in the pulse intensity the infidelity is linear in the
    herald probability with slope (1/(eta_0*eta_d) - 2*eta_1/(eta_0+eta_1))/4,
    so the merit is 4 over that bracket.  The bracket vanishes only at
    the fully lossless point, reported as an infinite merit; fibre
    transmission cancels between P and 1-F and does not appear.
    """
    if model.n != 1:
        raise ValueError(f"merit is defined for one qubit, got n={model.n}")
    if model.eta_0 * model.eta_d == 0.0:
        return 0.0
    denominator = 1.0 / (model.eta_0 * model.eta_d) - 2.0 * model.eta_1 / (
        model.eta_0 + model.eta_1
    )
    if denominator <= 0.0:
        return math.inf
    return 4.0 / denominator


def routing_limited_model(eta: float) -> EfficiencyModel:
    """Scenario where fibre routing and detection dominate the loss.

    Both interaction survivals equal the swept eta and detection is
    perfect, so the reflection protocol and the emission baselines see
    the same per-photon survival eta_s = eta.
    """
    if not 0.0 < eta <= 1.0:
        raise ValueError(f"eta must lie in (0, 1], got {eta!r}")
    return EfficiencyModel(eta_t=1.0, eta_0=eta, eta_1=eta, eta_d=1.0, n=1)


def interface_limited_model(cooperativity: float) -> EfficiencyModel:
    """Scenario where the cavity interface dominates the loss.

    Routing and detection are perfect; the swept cooperativity sets the
    tuned reflection survival of the interacting bin.
    """
    if not cooperativity > 0.0 or not math.isfinite(cooperativity):
        raise ValueError(f"cooperativity must be positive, got {cooperativity!r}")
    return EfficiencyModel(
        eta_t=1.0,
        eta_0=1.0,
        eta_1=reflection_efficiency(cooperativity),
        eta_d=1.0,
        n=1,
    )


def sweep_figure2(regime: str, grid, reference_success: float = 0.01) -> list[TradeoffPoint]:
    """Merit curves for R, SC and DC over a parameter grid.

    ``regime`` is "routing-limited" (grid of survivals eta, alias "a")
    or "interface-limited" (grid of cooperativities, alias "b").  Each
    point carries the shared ``reference_success`` as P and the fidelity
    the protocol's line reaches there, so ``merit()`` reproduces the
    protocol's P/(1-F).
    """
    try:
        canonical = _REGIME_ALIASES[regime]
    except KeyError:
        raise ValueError(f"unknown regime {regime!r}; use one of {REGIMES}") from None
    if not 0.0 < reference_success <= 1.0:
        raise ValueError(
            f"reference_success must lie in (0, 1], got {reference_success!r}"
        )
    points = []
    for value in grid:
        value = float(value)
        if canonical == "routing-limited":
            model = routing_limited_model(value)
            eta_s = value
        else:
            model = interface_limited_model(value)
            eta_s = emission_efficiency(value)
        merits = {
            "R": r_tradeoff_merit(model),
            "SC": sc_merit(eta_s),
            "DC": dc_merit(eta_s),
        }
        for protocol in ("R", "SC", "DC"):
            merit = merits[protocol]
            fidelity = 1.0 if math.isinf(merit) else 1.0 - reference_success / merit
            points.append(
                TradeoffPoint(protocol, reference_success, fidelity, canonical, value)
            )
    return points


def success_probability_comparison(
    model: EfficiencyModel,
    eta_s: float,
    regime: str,
    sweep_parameter: float,
    intensity: float = 0.1,
) -> list[TradeoffPoint]:
    """Leading-order success probabilities of all four protocols.

    Emits one point per protocol with P set to the protocol's success
    probability at the given single-photon intensity and F pinned to 1
    (this comparison ranks rates only, not fidelities):

    - R: transmit, reflect off the register (harmonic-mean survival),
      detect.
    - R-intensity: the one-qubit presence/absence variant; half the
      interacting-bin survival.
    - SC: one emitted photon, one detector click, amplitude branch
      factor 2.
    - DC: two-photon interference, both photons must arrive; half the
      emission survival.
    """
    if model.n != 1:
        raise ValueError(f"comparison is defined for one qubit, got n={model.n}")
    _check_probability("eta_s", eta_s)
    if not 0.0 < intensity <= 1.0:
        raise ValueError(f"intensity must lie in (0, 1], got {intensity!r}")
    canonical = _REGIME_ALIASES.get(regime)
    if canonical is None:
        raise ValueError(f"unknown regime {regime!r}; use one of {REGIMES}")
    shared = model.eta_t * model.eta_d * intensity
    total = model.eta_0 + model.eta_1
    harm = 2.0 * model.eta_0 * model.eta_1 / total if total else 0.0
    successes = {
        "R": shared * harm,
        "SC": 2.0 * shared,
        "DC": shared * eta_s / 2.0,
        "R-intensity": shared * model.eta_1 / 2.0,
    }
    for protocol, p in successes.items():
        if p > 1.0:
            raise ValueError(
                f"leading-order {protocol} success {p!r} exceeds 1; "
                "reduce the intensity"
            )
    return [
        TradeoffPoint(protocol, successes[protocol], 1.0, canonical, sweep_parameter)
        for protocol in PROTOCOLS
    ]
