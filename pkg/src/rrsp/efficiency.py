"""Loss bookkeeping for a single photon spread over ``2**n`` time-bins.

Bit ``l`` (least significant = ``l = 0``) of a bin index ``x`` records
whether that bin interacts with register qubit ``l``.  Register basis
indices use the same convention everywhere in this package.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "FIBRE_ATTENUATION_LENGTH_KM",
    "DegenerateEfficiencyError",
    "EfficiencyModel",
    "DistanceModel",
    "ModeAmplitudes",
    "hamming_weight",
    "mode_bits",
    "mode_efficiency",
    "mode_efficiencies",
    "balanced_amplitudes",
    "ideal_success_probability",
]

#: Attenuation length of standard fibre at 0.2 dB/km, in km.
FIBRE_ATTENUATION_LENGTH_KM = 10.0 / (0.2 * math.log(10.0))


class DegenerateEfficiencyError(ValueError):
    """A bin has zero survival probability, so balancing is undefined."""


def hamming_weight(x):
    """Number of set bits of ``x``, elementwise for integer arrays."""
    return np.bitwise_count(np.asarray(x, dtype=np.uint64)).astype(np.int64)


def mode_bits(n: int) -> np.ndarray:
    """``(2**n, n)`` array of bin-index bits; column ``l`` is bit ``l``."""
    x = np.arange(1 << n, dtype=np.int64)
    return (x[:, None] >> np.arange(n)) & 1


def _check_probability(name: str, value: float) -> None:
    if not 0.0 <= value <= 1.0:
        raise ValueError(f"{name} must lie in [0, 1], got {value!r}")


@dataclass(frozen=True)
class EfficiencyModel:
    """Per-stage survival probabilities of the client photon.

    ``eta_t`` covers everything from the client source up to the
    register, ``eta_0``/``eta_1`` one reflection off a qubit for a
    non-interacting/interacting bin, and ``eta_d`` everything from the
    register to the detector, mode erasure included.
    """

    eta_t: float
    eta_0: float
    eta_1: float
    eta_d: float
    n: int

    def __post_init__(self) -> None:
        for name in ("eta_t", "eta_0", "eta_1", "eta_d"):
            _check_probability(name, getattr(self, name))
        if not 1 <= self.n <= 16:
            raise ValueError(f"register size n must be in [1, 16], got {self.n!r}")

    @property
    def num_modes(self) -> int:
        return 1 << self.n

    def is_lossless(self) -> bool:
        return self.eta_t == self.eta_0 == self.eta_1 == self.eta_d == 1.0

    @classmethod
    def lossless(cls, n: int) -> "EfficiencyModel":
        return cls(eta_t=1.0, eta_0=1.0, eta_1=1.0, eta_d=1.0, n=n)


@dataclass(frozen=True)
class DistanceModel:
    """Fibre span between client and register.

    The transmission follows ``exp(-L / attenuation_length)`` on top of
    a distance-independent intrinsic factor.
    """

    length_km: float
    attenuation_length_km: float = FIBRE_ATTENUATION_LENGTH_KM
    eta_t_intrinsic: float = 1.0

    def __post_init__(self) -> None:
        if self.length_km < 0:
            raise ValueError(f"length_km must be >= 0, got {self.length_km!r}")
        if self.attenuation_length_km <= 0:
            raise ValueError(
                f"attenuation_length_km must be > 0, got {self.attenuation_length_km!r}"
            )
        _check_probability("eta_t_intrinsic", self.eta_t_intrinsic)

    def eta_t(self) -> float:
        """Source-to-register transmission at this distance."""
        return math.exp(-self.length_km / self.attenuation_length_km) * self.eta_t_intrinsic


@dataclass(frozen=True, eq=False)
class ModeAmplitudes:
    """Client amplitudes ``c_x * exp(i*phi_x)`` over the ``2**n`` bins.

    The amplitude vector must already be normalized; off-by-more-than
    1e-12 norms are rejected rather than silently rescaled, since an
    unnormalized vector usually signals a bug in the caller.
    """

    n: int
    amplitudes: np.ndarray = field(repr=False)

    def __post_init__(self) -> None:
        if not 1 <= self.n <= 16:
            raise ValueError(f"register size n must be in [1, 16], got {self.n!r}")
        amps = np.array(self.amplitudes, dtype=complex)
        if amps.shape != (1 << self.n,):
            raise ValueError(
                f"expected {1 << self.n} amplitudes for n={self.n}, got shape {amps.shape}"
            )
        norm = float(np.sum(np.abs(amps) ** 2))
        if abs(norm - 1.0) > 1e-12:
            raise ValueError(f"amplitudes must be normalized; got squared norm {norm!r}")
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)

    @property
    def weights(self) -> np.ndarray:
        """Per-bin probabilities ``|c_x|**2``."""
        return np.abs(self.amplitudes) ** 2

    @property
    def phases(self) -> np.ndarray:
        """Per-bin phases ``phi_x`` (zero where the amplitude vanishes)."""
        return np.where(self.weights > 0, np.angle(self.amplitudes), 0.0)


def mode_efficiencies(model: EfficiencyModel) -> np.ndarray:
    """Survival probability of every bin through the full path.

    Bin ``x`` reflects off each qubit once, picking up ``eta_1`` per
    interacting qubit (set bit) and ``eta_0`` per non-interacting one:
    ``eta_x = eta_t * eta_d * eta_1**H(x) * eta_0**(n - H(x))``.
    """
    h = hamming_weight(np.arange(model.num_modes))
    return model.eta_t * model.eta_d * model.eta_1**h * model.eta_0 ** (model.n - h)


def mode_efficiency(model: EfficiencyModel, x: int) -> float:
    """Survival probability of bin ``x``; raises IndexError out of range."""
    if not 0 <= x < model.num_modes:
        raise IndexError(f"bin index {x!r} out of range for n={model.n}")
    h = int(hamming_weight(x))
    return model.eta_t * model.eta_d * model.eta_1**h * model.eta_0 ** (model.n - h)


def balanced_amplitudes(model: EfficiencyModel, target_phases) -> ModeAmplitudes:
    """Client amplitudes that make every surviving bin equally likely.

    Weighting ``|c_x|**2`` proportional to ``1/eta_x`` cancels the
    bin-dependent loss, so each detected photon is equally likely to
    have come from any bin.  Phases are ``phi_x = sum_l theta_l x_l``.
    """
    thetas = np.asarray(target_phases, dtype=float)
    if thetas.shape != (model.n,):
        raise ValueError(f"expected {model.n} phases, got shape {thetas.shape}")
    etas = mode_efficiencies(model)
    if np.any(etas == 0.0):
        raise DegenerateEfficiencyError(
            "some bin has zero survival probability; amplitude balancing is undefined"
        )
    inv = 1.0 / etas
    weights = inv / np.sum(inv)
    phases = mode_bits(model.n) @ thetas
    return ModeAmplitudes(model.n, np.sqrt(weights) * np.exp(1j * phases))


def ideal_success_probability(model: EfficiencyModel) -> float:
    """Detection probability with balanced amplitudes and one photon sent.

    Equals ``sum_x |c_x|**2 * eta_x``, which for balanced weights
    collapses to ``eta_t * eta_d * h**n`` with ``h`` the harmonic mean
    ``2*eta_0*eta_1/(eta_0 + eta_1)`` of the two reflection survivals.
    Conditioned on detection, each bin carries weight ``P/2**n``.
    """
    if model.eta_0 == 0.0 or model.eta_1 == 0.0:
        raise DegenerateEfficiencyError(
            "zero reflection survival makes the balanced protocol impossible"
        )
    harm = 2.0 * model.eta_0 * model.eta_1 / (model.eta_0 + model.eta_1)
    return model.eta_t * model.eta_d * harm**model.n
