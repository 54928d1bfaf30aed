"""Single-sided cavity reflection model for the qubit-photon interface.

The qubit's ground level couples to the cavity mode, so a photon
reflecting off the cavity sees an atom-dressed response when the qubit
is in state 0 and a bare-cavity response when it is in state 1.  With
the output coupling tuned to ``(C + 1)/(C + 2)``, both responses have
the same magnitude ``C/(C + 2)`` at resonance and opposite signs, which
is exactly the conditional pi phase the preparation protocol needs.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "CavityParams",
    "transfer_function",
    "reflection_efficiency",
    "emission_efficiency",
    "intensity_encoding_success",
]


@dataclass(frozen=True)
class CavityParams:
    """Interface parameters in cavity-QED conventions.

    ``kappa_out_ratio`` is the fraction of the total cavity decay that
    goes through the input/output port; ``delta`` is the detuning of
    the atomic transition from the drive.
    """

    cooperativity: float
    kappa: float
    kappa_out_ratio: float
    gamma: float
    delta: float = 0.0

    def __post_init__(self) -> None:
        if self.cooperativity < 0:
            raise ValueError(f"cooperativity must be >= 0, got {self.cooperativity!r}")
        if self.kappa <= 0:
            raise ValueError(f"kappa must be > 0, got {self.kappa!r}")
        if not 0.0 <= self.kappa_out_ratio <= 1.0:
            raise ValueError(
                f"kappa_out_ratio must lie in [0, 1], got {self.kappa_out_ratio!r}"
            )
        if self.gamma <= 0:
            raise ValueError(f"gamma must be > 0, got {self.gamma!r}")

    @classmethod
    def tuned(
        cls,
        cooperativity: float,
        kappa: float = 1.0,
        gamma: float = 1.0,
        delta: float = 0.0,
    ) -> "CavityParams":
        """Parameters with the output coupling set to ``(C+1)/(C+2)``."""
        ratio = (cooperativity + 1.0) / (cooperativity + 2.0)
        return cls(cooperativity, kappa, ratio, gamma, delta)


def transfer_function(params: CavityParams, qubit_state: int, omega):
    """Reflection amplitude at photon detuning ``omega`` from the cavity.

    With ``A = 1 - 2i(omega - delta)/gamma``, ``B = 1 - 2i*omega/kappa``
    and ``rho = kappa_out/kappa``:

    * qubit in 0 (atom coupled):  ``r = 1 - 2*rho*A / (A*B + C)``
    * qubit in 1 (bare cavity):   ``r = 1 - 2*rho / B``

    ``omega`` may be a scalar or an array; the return matches.
    """
    if qubit_state not in (0, 1):
        raise ValueError(f"qubit_state must be 0 or 1, got {qubit_state!r}")
    w = np.asarray(omega, dtype=float)
    bare = 1.0 - 2.0j * w / params.kappa
    rho = params.kappa_out_ratio
    if qubit_state == 1:
        r = 1.0 - 2.0 * rho / bare
    else:
        atom = 1.0 - 2.0j * (w - params.delta) / params.gamma
        r = 1.0 - 2.0 * rho * atom / (atom * bare + params.cooperativity)
    if np.ndim(omega) == 0:
        return complex(r)
    return r


def reflection_efficiency(cooperativity: float) -> float:
    """Resonant reflection probability ``(C/(C+2))**2`` of a tuned cavity.

    This is the survival probability of an interacting bin: the photon
    is reflected with amplitude ``-C/(C+2)`` when the qubit sits in the
    coupled level (and ``+C/(C+2)`` when it does not).
    """
    if cooperativity < 0:
        raise ValueError(f"cooperativity must be >= 0, got {cooperativity!r}")
    return (cooperativity / (cooperativity + 2.0)) ** 2


def emission_efficiency(cooperativity: float) -> float:
    """Probability ``C/(C+1)`` that an excited emitter decays into the cavity.

    This is the relevant interface efficiency for emission-based
    entanglement schemes, used when comparing them against reflection.
    """
    if cooperativity < 0:
        raise ValueError(f"cooperativity must be >= 0, got {cooperativity!r}")
    return cooperativity / (cooperativity + 1.0)


def intensity_encoding_success(eta_t: float, eta_1: float, eta_d: float) -> float:
    """Herald probability when the bit is encoded in presence/absence.

    Half of the attempts place the photon in the bin that interacts, and
    only that bin must survive the reflection, so the success rate is
    ``eta_t * eta_1 * eta_d / 2``.
    """
    for name, value in (("eta_t", eta_t), ("eta_1", eta_1), ("eta_d", eta_d)):
        if not 0.0 <= value <= 1.0:
            raise ValueError(f"{name} must lie in [0, 1], got {value!r}")
    return eta_t * eta_1 * eta_d / 2.0
