"""Quantum limits on waveform detection for linear measurement chains.

The package answers two kinds of question about detecting a weak force
waveform with a linear (cavity optomechanical) detector:

* what no receiver can beat: fidelity-based lower bounds on Bayesian and
  Neyman-Pearson error probabilities and their long-time exponents, for
  known waveforms and for stationary Gaussian waveform priors;
* what concrete receivers achieve: homodyne detection with the exact
  likelihood-ratio test, a Kennedy-style displaced photon counter, the
  Dolinar value, plus seeded Monte Carlo simulations of each.

See the ``demos`` directory of the repository for worked examples and the
``qdetlim`` command line for scenario-driven runs.
"""

from ._version import __version__
from .bounds import (
    BoundsReport,
    bounds_report,
    fidelity_deterministic_freq,
    fidelity_optomech,
    fidelity_sinusoid,
    fidelity_stochastic_circulant,
    gamma_f_deterministic,
    gamma_f_stochastic,
    helstrom_bayes_bound,
    log_fidelity_deterministic_freq,
    log_fidelity_optomech,
    log_fidelity_sinusoid,
    log_fidelity_stochastic_circulant,
    neyman_pearson_bound,
    np_curve,
)
from .errors import (
    BandwidthWarning,
    GridError,
    NumericsError,
    QdetlimError,
    ValidationError,
)
from .linsys import (
    GaussianState,
    LinearSystem,
    autocovariance_row,
    fidelity_deterministic_timedomain,
    log_fidelity_deterministic_timedomain,
    position_autocovariance,
    propagator_row,
)
from .optomech import OptomechDetector, natural_units_detector
from .receivers import (
    ChernoffResult,
    KennedyDeterministic,
    KennedyStochastic,
    McStats,
    ReceiverResult,
    bayes_threshold,
    chernoff_exponent_stochastic,
    dolinar_error,
    homodyne_error_probs,
    homodyne_exponent_deterministic,
    homodyne_snr,
    kennedy_p01_deterministic,
    kennedy_p01_stochastic,
    lambda_for_target_p10,
    simulate_homodyne_mc,
    simulate_kennedy_mc,
)
from .scenario import (
    Scenario,
    Tolerances,
    canonical_payload_bytes,
    dumps_output,
    load_scenario,
    run_bounds,
    run_receivers,
    run_sweep,
    scenario_echo,
    scenario_from_dict,
    sweep_csv,
    validate_run_output,
    validate_scenario_dict,
)
from .spectral import (
    Spectrum,
    TimeGrid,
    TimeSeries,
    bandwidth_overrides,
    circulant_eigenvalues,
    forward_transform,
    freq_integral,
    inverse_transform,
    matrix_exponential,
    natural_order,
    psd_to_covariance_row,
)
from .waveform import (
    FlatBandPrior,
    GaussianPulse,
    LorentzianPrior,
    SampledWaveform,
    Sinusoid,
    covariance_row,
    render,
    resonant_burst,
    sample_gp,
)

__all__ = [
    "__version__",
    # errors
    "QdetlimError",
    "ValidationError",
    "GridError",
    "NumericsError",
    "BandwidthWarning",
    # spectral substrate
    "TimeGrid",
    "TimeSeries",
    "Spectrum",
    "forward_transform",
    "inverse_transform",
    "natural_order",
    "freq_integral",
    "bandwidth_overrides",
    "circulant_eigenvalues",
    "psd_to_covariance_row",
    "matrix_exponential",
    # linear systems
    "LinearSystem",
    "GaussianState",
    "propagator_row",
    "position_autocovariance",
    "autocovariance_row",
    "log_fidelity_deterministic_timedomain",
    "fidelity_deterministic_timedomain",
    # detector model
    "OptomechDetector",
    "natural_units_detector",
    # waveforms and priors
    "Sinusoid",
    "GaussianPulse",
    "SampledWaveform",
    "LorentzianPrior",
    "FlatBandPrior",
    "render",
    "resonant_burst",
    "covariance_row",
    "sample_gp",
    # bounds
    "log_fidelity_deterministic_freq",
    "fidelity_deterministic_freq",
    "log_fidelity_sinusoid",
    "fidelity_sinusoid",
    "log_fidelity_optomech",
    "fidelity_optomech",
    "gamma_f_deterministic",
    "log_fidelity_stochastic_circulant",
    "fidelity_stochastic_circulant",
    "gamma_f_stochastic",
    "helstrom_bayes_bound",
    "neyman_pearson_bound",
    "np_curve",
    "BoundsReport",
    "bounds_report",
    # receivers
    "homodyne_snr",
    "homodyne_error_probs",
    "homodyne_exponent_deterministic",
    "bayes_threshold",
    "lambda_for_target_p10",
    "chernoff_exponent_stochastic",
    "ChernoffResult",
    "kennedy_p01_deterministic",
    "KennedyDeterministic",
    "kennedy_p01_stochastic",
    "KennedyStochastic",
    "dolinar_error",
    "ReceiverResult",
    "McStats",
    "simulate_homodyne_mc",
    "simulate_kennedy_mc",
    # scenarios
    "Scenario",
    "Tolerances",
    "load_scenario",
    "scenario_from_dict",
    "scenario_echo",
    "validate_scenario_dict",
    "validate_run_output",
    "run_bounds",
    "run_receivers",
    "run_sweep",
    "sweep_csv",
    "canonical_payload_bytes",
    "dumps_output",
]
