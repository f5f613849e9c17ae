"""Recovery of finitely many missing samples of discrete-time signals whose
spectrum degenerates near the Nyquist frequency.

The kernel built here is an even sequence that vanishes on the differences
of the missing times, so a convolution over observed samples estimates the
missing ones exactly for band-limited inputs as the window grows.
"""
from .band_space import BandGeometry, CosineSpan, gram_condition, gram_matrix, inner_product, w, xi
from .exceptions import (
    DegenerateProjection,
    GapfillError,
    GridTooCoarse,
    IllConditioned,
    MaskViolation,
    NonRealSignal,
    WindowTooSmall,
    ZeroSignal,
)
from .index_sets import DifferenceStructure, MissingIndexSet, difference_set, parse_times, partition
from .kernel import (
    RecoveryKernel,
    TransferFunction,
    build_kernel,
    is_member_H_T,
    kappa,
    l1_mass,
    mask_correction_l1,
    tilde_tap,
    transfer_eval,
    transfer_function,
)
from .recovery import (
    RecoveryResult,
    SignalWindow,
    degeneracy_diagnostic,
    recover,
    relative_error,
    robustness_bound,
)
from .signal_lab import (
    ExperimentReport,
    GeneratorConfig,
    SpectralProfile,
    generate_profile,
    inject_noise,
    run_experiment,
    synthesize,
    trial_rng,
)

__version__ = "0.1.0"
