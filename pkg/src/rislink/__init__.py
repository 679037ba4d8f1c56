"""Link-level simulation and analysis for RIS-based single-RF-chain links.

Modules: :mod:`channel` (Rician fading and the B-bit phase quantizer),
:mod:`modulation` (PSK / A-PSK / QA-PSK patterns and constellations),
:mod:`detection` (ML detection), :mod:`analysis` (moments, Gamma fit,
DCMC capacity, SEP theory), :mod:`montecarlo` (seeded sweeps),
:mod:`cli` (CSV-writing command line).
"""

from .channel import (
    ChannelRealization,
    EquivalentLink,
    LinkConfig,
    db_to_linear,
    draw_channel,
    equivalent_link,
    linear_to_db,
    quantize_phase,
    quantize_phase_index,
)
from .detection import Detection, ReceivedSample, ml_detect, ml_detect_batch
from .errors import ConfigError, NumericalError
from .modulation import (
    APSK,
    PSK,
    QAPSK,
    BlockPartition,
    ConstellationSet,
    RisPattern,
    SchemeConfig,
    apsk_pattern,
    partition_blocks,
    psk_pattern,
    qapsk_pattern,
    received_signal_set,
    statistical_signal_set,
    validate_scheme,
)
from .analysis import (
    GainMoments,
    GammaFit,
    QuadratureRule,
    Wedge,
    craig_wedge,
    dcmc_capacity_gh,
    dcmc_capacity_ub,
    gain_moments,
    gamma_fit,
    laguerre_half,
    sep_apsk_theory,
    sep_qapsk_theory,
)
from .montecarlo import (
    SweepResult,
    SweepRow,
    SweepSpec,
    capacity_curve_gh,
    capacity_ub_sweep,
    crossover_scan,
    simulate_capacity,
    simulate_sep,
    theory_sep_sweep,
)

__version__ = "0.1.0"
