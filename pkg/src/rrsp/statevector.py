"""Exact single-photon-sector simulation of the preparation protocol.

The joint state lives on (time-bin mode) x (register); both indices use
the shared convention that bit ``l`` belongs to qubit ``l``.  Photon
loss never enters here: the vacuum and two-photon branches are handled
analytically in :mod:`rrsp.imperfections`, so these states stay pure
and of size ``4**n``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .efficiency import (
    EfficiencyModel,
    ModeAmplitudes,
    balanced_amplitudes,
    mode_bits,
    mode_efficiencies,
)

__all__ = [
    "MAX_REGISTER_QUBITS",
    "TargetState",
    "JointState",
    "HeraldOutcome",
    "initial_joint_state",
    "apply_controlled_phase",
    "apply_register_hadamards",
    "run_ideal_protocol",
    "apply_corrections",
    "run_absorption_oracle",
    "absorption_sign_correction",
    "sample_absorption_outcomes",
    "run_reversed_protocol",
    "state_fidelity",
]

#: Joint states hold 4**n complex numbers; ten qubits is already a megabyte.
MAX_REGISTER_QUBITS = 10


@dataclass(frozen=True, eq=False)
class TargetState:
    """Equatorial product state with one phase per qubit.

    Qubit ``l`` carries ``(|0> + exp(i*thetas[l])|1>)/sqrt(2)``, so basis
    state ``|v>`` has amplitude ``exp(i*sum_l thetas[l]*v_l)/sqrt(2**n)``.
    """

    n: int
    thetas: np.ndarray = field(repr=False)

    def __post_init__(self) -> None:
        if not 1 <= self.n <= 16:
            raise ValueError(f"register size n must be in [1, 16], got {self.n!r}")
        thetas = np.array(self.thetas, dtype=float)
        if thetas.shape != (self.n,):
            raise ValueError(f"expected {self.n} phases, got shape {thetas.shape}")
        thetas.setflags(write=False)
        object.__setattr__(self, "thetas", thetas)

    def statevector(self) -> np.ndarray:
        phases = mode_bits(self.n) @ self.thetas
        return np.exp(1j * phases) / np.sqrt(1 << self.n)


@dataclass(frozen=True, eq=False)
class JointState:
    """Photon-register wavefunction, indexed ``amplitudes[mode, register]``."""

    n: int
    amplitudes: np.ndarray = field(repr=False)

    def __post_init__(self) -> None:
        if not 1 <= self.n <= MAX_REGISTER_QUBITS:
            raise ValueError(
                f"register size n must be in [1, {MAX_REGISTER_QUBITS}], got {self.n!r}"
            )
        num = 1 << self.n
        amps = np.array(self.amplitudes, dtype=complex)
        if amps.shape != (num, num):
            raise ValueError(f"expected shape {(num, num)}, got {amps.shape}")
        norm = float(np.sum(np.abs(amps) ** 2))
        if abs(norm - 1.0) > 1e-10:
            raise ValueError(f"joint state must be normalized; got squared norm {norm!r}")
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)


@dataclass(frozen=True, eq=False)
class HeraldOutcome:
    """One detector port: its index, probability, and the state it leaves."""

    port: int
    register_state: np.ndarray = field(repr=False)
    probability: float = 0.0

    def __post_init__(self) -> None:
        state = np.array(self.register_state, dtype=complex)
        state.setflags(write=False)
        object.__setattr__(self, "register_state", state)
        if not 0.0 <= self.probability <= 1.0:
            raise ValueError(f"probability must lie in [0, 1], got {self.probability!r}")

    @property
    def n(self) -> int:
        return int(self.register_state.size).bit_length() - 1


def _sign_table(n: int) -> np.ndarray:
    """``(-1)**popcount(x & v)`` for all mode/register index pairs."""
    idx = np.arange(1 << n, dtype=np.uint64)
    parity = np.bitwise_count(idx[:, None] & idx[None, :]) & 1
    return np.where(parity, -1.0, 1.0)


def initial_joint_state(client: ModeAmplitudes) -> JointState:
    """Client photon amplitudes against a register prepared in ``|+>^n``."""
    num = 1 << client.n
    register = np.full(num, 1.0 / np.sqrt(num))
    return JointState(client.n, np.outer(client.amplitudes, register))


def apply_controlled_phase(state: JointState) -> JointState:
    """Reflection of every bin off every qubit it addresses.

    Bin ``x`` picks up one conditional pi phase per qubit ``l`` with
    ``x_l = 1`` and ``v_l = 1``, i.e. the sign ``(-1)**popcount(x & v)``.
    """
    return JointState(state.n, state.amplitudes * _sign_table(state.n))


def apply_register_hadamards(state: JointState) -> JointState:
    """Hadamard on every register qubit."""
    walsh = _sign_table(state.n) / np.sqrt(1 << state.n)
    return JointState(state.n, state.amplitudes @ walsh)


def _fourier_kernel(n: int) -> np.ndarray:
    """Mode-erasing transform; port ``k`` weighs bin ``x`` by ``e^{2*pi*i*k*x/2**n}``."""
    num = 1 << n
    k = np.arange(num)
    return np.exp(2j * np.pi * np.outer(k, k) / num) / np.sqrt(num)


def _collect_ports(n: int, joint_amplitudes: np.ndarray) -> list[HeraldOutcome]:
    ports = _fourier_kernel(n) @ joint_amplitudes
    outcomes = []
    for k in range(1 << n):
        row = ports[k]
        probability = float(np.sum(np.abs(row) ** 2))
        if probability <= 0.0:
            raise ValueError(f"port {k} has zero probability; cannot condition on it")
        outcomes.append(HeraldOutcome(k, row / np.sqrt(probability), probability))
    return outcomes


def run_ideal_protocol(model: EfficiencyModel, target: TargetState) -> list[HeraldOutcome]:
    """Full lossless run: balanced photon, reflections, Hadamards, erasure.

    Returns all ``2**n`` herald outcomes; each carries probability
    ``1/2**n`` and a register state that :func:`apply_corrections` maps
    onto the target.
    """
    if not model.is_lossless():
        raise ValueError(
            "run_ideal_protocol checks the unitary logic only; "
            "lossy budgets belong in rrsp.imperfections"
        )
    if model.n != target.n:
        raise ValueError(f"model has n={model.n} but target has n={target.n}")
    client = balanced_amplitudes(model, target.thetas)
    state = initial_joint_state(client)
    state = apply_controlled_phase(state)
    state = apply_register_hadamards(state)
    return _collect_ports(state.n, state.amplitudes)


def apply_corrections(outcome: HeraldOutcome) -> np.ndarray:
    """Undo the port-dependent phases left on the register.

    Port ``k`` imprints ``e^{2*pi*i*k*v/2**n}`` on basis state ``|v>``,
    which factors over qubits; qubit ``q`` therefore needs a Z rotation
    by ``-2*pi*k*2**q/2**n`` on its ``|1>`` level.
    """
    n = outcome.n
    num = 1 << n
    state = np.array(outcome.register_state, dtype=complex)
    v = np.arange(num)
    for q in range(n):
        on = ((v >> q) & 1) == 1
        state[on] *= np.exp(-2j * np.pi * outcome.port * (1 << q) / num)
    return state


def run_absorption_oracle(target: TargetState, measurement_outcomes) -> np.ndarray:
    """Sequential-absorption implementation of the same preparation.

    A single communication qubit absorbs each time-bin in turn; CNOTs
    copy the absorption event onto a heralding qubit and onto every
    register qubit addressed by the bin index; the communication qubit
    is then measured in the X basis with the forced outcome for that
    bin and reset.  The branch absorbed at bin ``x`` ends in register
    state ``|x>`` with sign ``(-1)**m_x``, so the returned vector is
    ``sum_x sigma_x c_x e^{i*phi_x} |x>`` (normalized).  The signs are
    known to the operator and removable afterwards.

    The circuit is traced amplitude-by-amplitude rather than evaluated
    from the closed form, so it doubles as an independent check on the
    reflection-based path.
    """
    n = target.n
    if n > MAX_REGISTER_QUBITS:
        raise ValueError(f"register size n must be <= {MAX_REGISTER_QUBITS}, got {n}")
    num = 1 << n
    outcomes = np.asarray(measurement_outcomes)
    if outcomes.shape != (num,):
        raise ValueError(f"need one measurement outcome per bin, got shape {outcomes.shape}")
    if not np.all((outcomes == 0) | (outcomes == 1)):
        raise ValueError("measurement outcomes must be 0/1 bits")

    client = target.statevector()  # lossless bins carry the target phases uniformly
    # basis: (photon position or None once absorbed, register v, herald h, comm c)
    state: dict[tuple, complex] = {
        (y, 0, 0, 0): complex(client[y]) for y in range(num)
    }
    for x in range(num):
        # photon at bin x transfers into the communication qubit
        absorbed = {}
        for (pos, v, h, c), amp in state.items():
            if pos == x:
                absorbed[(None, v, h, 1)] = absorbed.get((None, v, h, 1), 0.0) + amp
            else:
                absorbed[(pos, v, h, c)] = absorbed.get((pos, v, h, c), 0.0) + amp
        # CNOTs from the communication qubit onto herald and register
        fanned = {}
        for (pos, v, h, c), amp in absorbed.items():
            if c == 1:
                key = (pos, v ^ x, h ^ 1, c)
            else:
                key = (pos, v, h, c)
            fanned[key] = fanned.get(key, 0.0) + amp
        # X-basis measurement with forced outcome m, then reset to |0>
        m = int(outcomes[x])
        sign = -1.0 if m == 1 else 1.0
        measured = {}
        for (pos, v, h, c), amp in fanned.items():
            weight = amp * (sign if c == 1 else 1.0) / np.sqrt(2.0)
            key = (pos, v, h, 0)
            measured[key] = measured.get(key, 0.0) + weight
        state = measured

    register = np.zeros(num, dtype=complex)
    for (pos, v, h, c), amp in state.items():
        if pos is not None or h != 1 or c != 0:
            raise AssertionError("photon not fully absorbed; circuit trace is broken")
        register[v] += amp
    return register / np.linalg.norm(register)


def absorption_sign_correction(register_state: np.ndarray, measurement_outcomes) -> np.ndarray:
    """Strip the recorded measurement signs; pure classical bookkeeping."""
    outcomes = np.asarray(measurement_outcomes)
    if outcomes.shape != np.asarray(register_state).shape:
        raise ValueError("need exactly one measurement outcome per basis state")
    signs = np.where(outcomes == 1, -1.0, 1.0)
    return np.asarray(register_state) * signs


def sample_absorption_outcomes(n: int, seed=None) -> np.ndarray:
    """Fair-coin X-basis outcomes, one per bin, for demonstration runs."""
    rng = np.random.default_rng(seed)
    return rng.integers(0, 2, size=1 << n)


def run_reversed_protocol(model: EfficiencyModel, target: TargetState) -> list[HeraldOutcome]:
    """Server-side preparation with the photon detected at the client.

    The server entangles a balanced photon with its register (same gate
    as the forward direction), sends it out, and the client imprints the
    per-bin phases before erasing the mode information.  Loss is allowed
    here: amplitude balancing makes every port equally likely and keeps
    the heralded states exact, while the summed herald probability drops
    to the balanced single-photon success probability.
    """
    if model.n != target.n:
        raise ValueError(f"model has n={model.n} but target has n={target.n}")
    client = balanced_amplitudes(model, np.zeros(model.n))
    state = initial_joint_state(client)
    state = apply_controlled_phase(state)
    state = apply_register_hadamards(state)
    # travel loss and the client's phase imprint act on the mode index only
    phases = mode_bits(model.n) @ target.thetas
    factors = np.sqrt(mode_efficiencies(model)) * np.exp(1j * phases)
    surviving = state.amplitudes * factors[:, None]
    return _collect_ports(model.n, surviving)


def state_fidelity(a: np.ndarray, b: np.ndarray) -> float:
    """``|<a|b>|**2``; global phase drops out."""
    return float(abs(np.vdot(np.asarray(a), np.asarray(b))) ** 2)
