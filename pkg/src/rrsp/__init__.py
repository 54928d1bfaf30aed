"""Reflection-based remote state preparation toolkit.

A single photon spread over 2**n time bins reflects off n cavity-coupled
qubits; detecting it after an exact discrete-Fourier mode erasure heralds
an n-qubit product state that local phase corrections turn into the
requested target.  The subpackages model each layer of that protocol:

``efficiency``
    per-mode transmission bookkeeping and loss-balanced amplitudes
``cavity``
    single-sided cavity reflection and the cooperativity budget
``statevector``
    exact simulation of the ideal, reversed, and absorption variants
``imperfections``
    weak-coherent-pulse sources, multi-photon terms, fidelity bounds
``windowing``
    repeat-until-success rates under a sliding coherence window
``tradeoff``
    success/fidelity comparison against swap-based alternatives
``cli``
    the ``rrsp`` command wrapping all of the above
"""

from .cavity import (
    CavityParams,
    emission_efficiency,
    intensity_encoding_success,
    reflection_efficiency,
    transfer_function,
)
from .efficiency import (
    FIBRE_ATTENUATION_LENGTH_KM,
    DegenerateEfficiencyError,
    DistanceModel,
    EfficiencyModel,
    ModeAmplitudes,
    balanced_amplitudes,
    hamming_weight,
    ideal_success_probability,
    mode_bits,
    mode_efficiencies,
    mode_efficiency,
)
from .imperfections import (
    Branch,
    BranchEnsemble,
    ClientPulse,
    LossLedger,
    WcpSource,
    branch_ensemble,
    fidelity_estimate,
    fidelity_estimate_single_qubit,
    fidelity_lower_bound,
    herald_probability,
    loss_ledger,
    non_pnr_probability_correction,
    single_photon_fraction,
    wcp_amplitudes,
)
from .statevector import (
    MAX_REGISTER_QUBITS,
    HeraldOutcome,
    JointState,
    TargetState,
    absorption_sign_correction,
    apply_corrections,
    run_absorption_oracle,
    run_ideal_protocol,
    run_reversed_protocol,
    sample_absorption_outcomes,
    state_fidelity,
)
from .tradeoff import (
    PROTOCOLS,
    REGIMES,
    TradeoffPoint,
    dc_merit,
    dc_tradeoff,
    interface_limited_model,
    r_tradeoff_merit,
    routing_limited_model,
    sc_merit,
    sc_tradeoff,
    success_probability_comparison,
    sweep_figure2,
)
from .windowing import (
    DEFAULT_MC_SUCCESS_BUDGET,
    InfeasibleWindowError,
    RateResult,
    WindowExperiment,
    analytic_single_batch_rate,
    asymptotic_rate,
    attempt_success_probability,
    choose_method,
    dc_attempt_success_probability,
    default_partitions,
    fig3_base_model,
    fig3_experiment,
    figure3_sweep,
    multiplexing_advantage,
    simulate_window_rate,
    window_success_probability,
)

__version__ = "0.1.0"

__all__ = [
    "__version__",
    # efficiency
    "FIBRE_ATTENUATION_LENGTH_KM",
    "DegenerateEfficiencyError",
    "DistanceModel",
    "EfficiencyModel",
    "ModeAmplitudes",
    "balanced_amplitudes",
    "hamming_weight",
    "ideal_success_probability",
    "mode_bits",
    "mode_efficiencies",
    "mode_efficiency",
    # cavity
    "CavityParams",
    "emission_efficiency",
    "intensity_encoding_success",
    "reflection_efficiency",
    "transfer_function",
    # statevector
    "MAX_REGISTER_QUBITS",
    "HeraldOutcome",
    "JointState",
    "TargetState",
    "absorption_sign_correction",
    "apply_corrections",
    "run_absorption_oracle",
    "run_ideal_protocol",
    "run_reversed_protocol",
    "sample_absorption_outcomes",
    "state_fidelity",
    # imperfections
    "Branch",
    "BranchEnsemble",
    "ClientPulse",
    "LossLedger",
    "WcpSource",
    "branch_ensemble",
    "fidelity_estimate",
    "fidelity_estimate_single_qubit",
    "fidelity_lower_bound",
    "herald_probability",
    "loss_ledger",
    "non_pnr_probability_correction",
    "single_photon_fraction",
    "wcp_amplitudes",
    # windowing
    "DEFAULT_MC_SUCCESS_BUDGET",
    "InfeasibleWindowError",
    "RateResult",
    "WindowExperiment",
    "analytic_single_batch_rate",
    "asymptotic_rate",
    "attempt_success_probability",
    "choose_method",
    "dc_attempt_success_probability",
    "default_partitions",
    "fig3_base_model",
    "fig3_experiment",
    "figure3_sweep",
    "multiplexing_advantage",
    "simulate_window_rate",
    "window_success_probability",
    # tradeoff
    "PROTOCOLS",
    "REGIMES",
    "TradeoffPoint",
    "dc_merit",
    "dc_tradeoff",
    "interface_limited_model",
    "r_tradeoff_merit",
    "routing_limited_model",
    "sc_merit",
    "sc_tradeoff",
    "success_probability_comparison",
    "sweep_figure2",
]
