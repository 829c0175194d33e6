"""Dependent variables of an entry session.

Entry speed, theoretical and empirical keystrokes-per-character, efficiency
and uncorrected error rate, all computed from trial logs and code tables.
Pure functions over immutable records.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass

from .codec import CodeTable, SymbolFrequencyTable, encode
from .engine import Trial, counted_keystrokes, emission_keystroke_times
from .strings import msd

__all__ = [
    "TrialMetrics",
    "entry_speed_wpm",
    "kspc_theoretical",
    "kspc_empirical",
    "efficiency",
    "uncorrected_error_rate",
    "msd",
    "compute_trial_metrics",
    "METRICS_CSV_COLUMNS",
]


class MetricsError(ValueError):
    pass


@dataclass(frozen=True)
class TrialMetrics:
    wpm: float
    kspc_empirical: float
    efficiency: float  # percent
    uncorrected_error_rate: float  # percent
    corrected_count: int
    duration_s: float
    keystrokes: int
    transcribed_chars: int

    def to_json(self) -> str:
        return json.dumps(asdict(self), separators=(",", ":"), sort_keys=True)


METRICS_CSV_COLUMNS = [
    "wpm",
    "kspc_empirical",
    "efficiency",
    "uncorrected_error_rate",
    "corrected_count",
    "duration_s",
    "keystrokes",
    "transcribed_chars",
]


def trial_duration_s(trial: Trial) -> float:
    """Seconds from the first keystroke to the last non-Enter emission."""
    if trial.started_ms is None:
        raise MetricsError("trial has no keystrokes")
    times = emission_keystroke_times(trial)
    if not times:
        raise MetricsError("trial has no emissions")
    return (times[-1] - trial.started_ms) / 1000.0


def entry_speed_wpm(trial: Trial) -> float:
    """((chars - 1) / 5) words per elapsed minute, first key to last emission."""
    n = len(trial.transcribed)
    if n < 2:
        raise MetricsError(f"need at least 2 transcribed characters, got {n}")
    duration = trial_duration_s(trial)
    if duration <= 0:
        raise MetricsError(f"non-positive duration {duration}")
    return ((n - 1) / 5.0) * (60.0 / duration)


def kspc_theoretical(
    table: CodeTable, freqs: SymbolFrequencyTable, mode: str = "weighted"
) -> float:
    """Predicted keystrokes per character of a code table.

    weighted: sum(F_c * K_c) / sum(F_c); unweighted: plain mean of the code
    lengths K_c over the symbol set. Both are exposed because published
    averages rarely state their convention.
    """
    if mode == "weighted":
        total_f = 0.0
        total = 0.0
        for sym, f in freqs.entries:
            if f > 0 and sym not in table.entries:
                raise MetricsError(f"code table does not cover symbol {sym!r}")
            if sym in table.entries:
                total += f * len(table.entries[sym])
                total_f += f
        return total / total_f
    if mode == "unweighted":
        for sym, f in freqs.entries:
            if f > 0 and sym not in table.entries:
                raise MetricsError(f"code table does not cover symbol {sym!r}")
        lengths = [len(table.entries[s]) for s, _ in freqs.entries if s in table.entries]
        return sum(lengths) / len(lengths)
    raise MetricsError(f"unknown mode {mode!r}")


def kspc_empirical(trial: Trial, count_enter: bool = False) -> float:
    """Keystrokes actually spent per character of the final transcription."""
    n = len(trial.transcribed)
    if n == 0:
        raise MetricsError("empty transcription")
    return counted_keystrokes(trial, count_enter) / n


def efficiency(trial: Trial, table: CodeTable, count_enter: bool = False) -> float:
    """Minimum keystrokes for the final transcription over keystrokes spent, %."""
    if not trial.transcribed:
        raise MetricsError("empty transcription")
    minimal = len(encode(table, trial.transcribed))
    actual = counted_keystrokes(trial, count_enter)
    return 100.0 * minimal / actual


def uncorrected_error_rate(trial: Trial) -> float:
    """100 * MSD(presented, transcribed) / max(|presented|, |transcribed|)."""
    denom = max(len(trial.presented), len(trial.transcribed))
    if denom == 0:
        return 0.0
    return 100.0 * msd(trial.presented, trial.transcribed) / denom


def compute_trial_metrics(
    trial: Trial, table: CodeTable, count_enter: bool = False
) -> TrialMetrics:
    return TrialMetrics(
        wpm=entry_speed_wpm(trial),
        kspc_empirical=kspc_empirical(trial, count_enter),
        efficiency=efficiency(trial, table, count_enter),
        uncorrected_error_rate=uncorrected_error_rate(trial),
        corrected_count=trial.corrected_count,
        duration_s=trial_duration_s(trial),
        keystrokes=counted_keystrokes(trial, count_enter),
        transcribed_chars=len(trial.transcribed),
    )
