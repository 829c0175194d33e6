import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from h4writer.codec import BKSP, ENTER, Direction, encode
from h4writer.engine import Trial, new_trial
from h4writer.metrics import (
    MetricsError,
    compute_trial_metrics,
    efficiency,
    entry_speed_wpm,
    kspc_empirical,
    kspc_theoretical,
    msd,
    uncorrected_error_rate,
)
from oracles import msd_recursive

L, R, U, D = Direction.L, Direction.R, Direction.U, Direction.D


def scripted_trial(table, presented, timestamps=None, step=1000):
    """Perfect transcription of `presented`; timestamps override the cadence."""
    eng = new_trial(table, presented)
    keys = []
    while True:
        nxt = eng.expected_next_key()
        if nxt is None:
            break
        keys.append(nxt)
        eng_t = timestamps[len(keys) - 1] if timestamps else (len(keys) - 1) * step
        eng.press(nxt, eng_t)
    return eng


def press_codes(eng, symbols, step=1000):
    t = len(eng.trial.keystrokes) * step
    for sym in symbols:
        for d in eng.table.code_of(sym):
            eng.press(d, t)
            t += step
    return eng


# --- entry speed ------------------------------------------------------------


def test_wpm_formula_11_chars_30s(full_table):
    phrase = "hello world"  # 11 chars
    n_keys = len(encode(full_table, phrase))
    # First keystroke at 0, last emission keystroke at 30 s.
    times = [0] * (n_keys - 1) + [30_000]
    eng = scripted_trial(full_table, phrase, timestamps=times)
    assert entry_speed_wpm(eng.trial) == pytest.approx(4.0)


def test_wpm_requires_two_chars(full_table):
    eng = scripted_trial(full_table, "e")
    with pytest.raises(MetricsError, match="2"):
        entry_speed_wpm(eng.trial)


def test_wpm_rejects_zero_duration(full_table):
    eng = scripted_trial(full_table, "to", timestamps=[0] * 10)
    with pytest.raises(MetricsError, match="duration"):
        entry_speed_wpm(eng.trial)


def test_wpm_scripted_log_matches_hand_recomputation(full_table):
    phrase = "we move"
    eng = scripted_trial(full_table, phrase, step=700)
    trial = eng.trial
    # Hand recomputation on the same log, spreadsheet style.
    last_emit_t = max(
        ev.t_ms for ev in trial.keystrokes if ev.outcome.startswith("emit:")
    )
    duration_s = (last_emit_t - trial.keystrokes[0].t_ms) / 1000
    expected = ((len(phrase) - 1) / 5) * (60 / duration_s)
    assert entry_speed_wpm(trial) == pytest.approx(expected, abs=1e-9)


# --- theoretical KSPC -------------------------------------------------------


def test_kspc_theoretical_equiprobable_is_one():
    from h4writer.codec import SymbolFrequencyTable, build_code_table

    freqs = SymbolFrequencyTable.from_dict({c: 0.25 for c in "abcd"})
    table = build_code_table(freqs)
    assert kspc_theoretical(table, freqs, "weighted") == 1.0
    assert kspc_theoretical(table, freqs, "unweighted") == 1.0


def test_kspc_theoretical_fig3_unweighted(fig3_table):
    from h4writer.codec import SymbolFrequencyTable

    syms = ["e", "t", "r", "g", "b", "v", "q", "z"]
    freqs = SymbolFrequencyTable.from_dict({s: 1.0 for s in syms})
    # (2+2+3+3+4+4+6+6)/8
    assert kspc_theoretical(fig3_table, freqs, "unweighted") == pytest.approx(3.75)


def test_kspc_theoretical_coverage_gap(fig3_table):
    from h4writer.codec import SymbolFrequencyTable

    with pytest.raises(MetricsError, match="cover"):
        kspc_theoretical(fig3_table, SymbolFrequencyTable.from_dict({"a": 1.0}), "weighted")


def test_kspc_theoretical_unknown_mode(fig3_table, english_freqs):
    with pytest.raises(MetricsError, match="mode"):
        kspc_theoretical(fig3_table, english_freqs, "mean")


# --- empirical KSPC ---------------------------------------------------------


def test_kspc_empirical_single_e(fig3_table):
    eng = new_trial(fig3_table, "e")
    press_codes(eng, ["e"])
    assert kspc_empirical(eng.trial) == 2.0


def test_kspc_empirical_corrected_ee(fig3_table):
    # presented "ee": e, wrong t, bksp, e -> 8 keystrokes for 2 chars.
    eng = new_trial(fig3_table, "ee")
    press_codes(eng, ["e", "t", BKSP, "e"])
    assert eng.trial.transcribed == "ee"
    assert kspc_empirical(eng.trial) == 4.0


def test_kspc_empirical_empty_transcription(fig3_table):
    eng = new_trial(fig3_table, "e")
    with pytest.raises(MetricsError, match="empty"):
        kspc_empirical(eng.trial)


def test_kspc_empirical_error_free_equals_encoding_ratio(full_table):
    phrase = "a quiet song"
    eng = scripted_trial(full_table, phrase)
    assert kspc_empirical(eng.trial) == len(encode(full_table, phrase)) / len(phrase)


def test_kspc_empirical_count_enter_flag(full_table):
    phrase = "to"
    eng = scripted_trial(full_table, phrase)
    press_codes(eng, [ENTER])
    base = len(encode(full_table, phrase))
    assert kspc_empirical(eng.trial) == base / 2
    assert kspc_empirical(eng.trial, count_enter=True) == (
        base + len(full_table.code_of(ENTER))
    ) / 2


# --- efficiency -------------------------------------------------------------


def test_efficiency_error_free_is_100(full_table):
    eng = scripted_trial(full_table, "the cat")
    assert efficiency(eng.trial, full_table) == 100.0


def test_efficiency_corrected_ee_is_50(fig3_table):
    eng = new_trial(fig3_table, "ee")
    press_codes(eng, ["e", "t", BKSP, "e"])
    assert efficiency(eng.trial, fig3_table) == 50.0


def test_efficiency_with_rejected_presses(fig3_table):
    eng = new_trial(fig3_table, "e")
    k = 3
    for i in range(k):
        eng.press(R, i)  # no R child at root: rejected
    press_codes(eng, ["e"])
    assert efficiency(eng.trial, fig3_table) == pytest.approx(100 * 2 / (2 + k))


def test_backspace_episode_degrades_both_metrics(fig3_table):
    clean = new_trial(fig3_table, "ee")
    press_codes(clean, ["e", "e"])
    fixed = new_trial(fig3_table, "ee")
    press_codes(fixed, ["e", "t", BKSP, "e"])
    assert efficiency(fixed.trial, fig3_table) < efficiency(clean.trial, fig3_table)
    assert kspc_empirical(fixed.trial) > kspc_empirical(clean.trial)


# --- uncorrected error rate -------------------------------------------------


def test_error_rate_zero_when_equal(fig3_table):
    eng = new_trial(fig3_table, "e")
    press_codes(eng, ["e"])
    assert uncorrected_error_rate(eng.trial) == 0.0


def test_error_rate_the_teh():
    trial = Trial(presented="the", transcribed="teh")
    assert uncorrected_error_rate(trial) == pytest.approx(100 * 2 / 3)


def test_error_rate_everything_missing():
    trial = Trial(presented="abc", transcribed="")
    assert uncorrected_error_rate(trial) == 100.0


def test_error_rate_both_empty():
    assert uncorrected_error_rate(Trial(presented="", transcribed="")) == 0.0


# --- msd --------------------------------------------------------------------


def test_msd_identity():
    assert msd("abc", "abc") == 0


def test_msd_empty():
    assert msd("", "abcd") == 4
    assert msd("abcd", "") == 4


def test_msd_the_teh():
    assert msd("the", "teh") == 2


@given(st.text(alphabet="abc", max_size=8), st.text(alphabet="abc", max_size=8))
@settings(max_examples=200, deadline=None)
def test_msd_matches_recursive_oracle(a, b):
    assert msd(a, b) == msd_recursive(a, b)


@given(
    st.text(alphabet="ab", max_size=6),
    st.text(alphabet="ab", max_size=6),
    st.text(alphabet="ab", max_size=6),
)
@settings(max_examples=200, deadline=None)
def test_msd_symmetry_and_triangle(a, b, c):
    assert msd(a, b) == msd(b, a)
    assert msd(a, c) <= msd(a, b) + msd(b, c)


# --- bundle -----------------------------------------------------------------


def test_compute_trial_metrics_bundle(full_table):
    phrase = "hello"
    eng = scripted_trial(full_table, phrase, step=500)
    m = compute_trial_metrics(eng.trial, full_table)
    assert m.efficiency == 100.0
    assert m.uncorrected_error_rate == 0.0
    assert m.transcribed_chars == 5
    assert m.corrected_count == 0
    assert m.kspc_empirical >= 1.0
