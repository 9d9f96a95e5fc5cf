"""RIS-assisted anchor-free near-field localization toolkit.

Pipeline: synthesize the UE-RIS line-of-sight channel, receive the
reference block through the co-phased surface, equalize, pick the best
dictionary grid point, then polish the estimate with damped per-coordinate
Newton iterations on the Fresnel-domain model fit. A Monte Carlo harness
sweeps SNR, array sizes, and grid resolution and reports NMSE curves.
"""

from .channel import (
    ChannelMatrix,
    ChannelModel,
    a_pq,
    channel,
    effective_channel,
    exact_channel,
    fresnel_channel,
    fresnel_phase_distance,
)
from .dictionary import (
    CoarseEstimate,
    Dictionary,
    Grid,
    build_dictionary,
    build_grid,
    coarse_estimate,
    get_dictionary,
    load_dictionary,
    save_dictionary,
)
from .experiments import (
    ExperimentConfig,
    SweepRow,
    TrialRecord,
    export_csv,
    read_csv,
    run_nmse,
    sample_ue,
)
from .geometry import (
    NearFieldBounds,
    SystemConfig,
    UePosition,
    near_field_bounds,
    ris_element_position,
    ue_element_position,
)
from .refinement import (
    RefinementResult,
    RefinementSettings,
    model_derivatives,
    model_vector,
    objective,
    objective_derivatives,
    refine,
)
from .ris_phase import (
    OptimalityReport,
    PhaseConfig,
    khatri_rao_gram,
    optimal_phase,
    snr_channel_term,
    verify_optimality,
)
from .signaling import (
    Observation,
    ReferenceSequence,
    equalize,
    make_reference_sequence,
    simulate_received,
)

__version__ = "0.1.0"
