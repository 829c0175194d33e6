"""Four-key Huffman-coded text entry: code generation, interactive engine,
evaluation metrics and experiment harness."""

from .codec import (
    BKSP,
    ENTER,
    SPACE,
    CodecError,
    CodeTable,
    CodeTree,
    Direction,
    SymbolFrequencyTable,
    build_code_table,
    decode,
    encode,
    load_code_table,
    load_frequency_table,
    save_code_table,
    weighted_code_length,
)
from .engine import Engine, EngineError, KeystrokeEvent, Trial, new_trial, replay
from .metrics import (
    TrialMetrics,
    compute_trial_metrics,
    efficiency,
    entry_speed_wpm,
    kspc_empirical,
    kspc_theoretical,
    msd,
    uncorrected_error_rate,
)
from .stats import AnovaResult, FitResult, fit_learning_curve, rm_anova

__all__ = [name for name in dir() if not name.startswith("_")]
