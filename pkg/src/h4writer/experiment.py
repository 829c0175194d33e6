"""Experiment harness: phrase sets, counterbalanced schedules, session
persistence and scripted typists.

Sessions persist as append-only JSON Lines (one header line per trial, one
line per keystroke, one metrics line) plus a derived metrics.csv, so every
stored metric can be re-derived from its stored log.
"""

from __future__ import annotations

import csv
import hashlib
import json
import random
from dataclasses import asdict, dataclass, field
from pathlib import Path

from .codec import ENTER, CodeTable, Direction, code_str
from .engine import Engine, KeystrokeEvent, replay
from .metrics import METRICS_CSV_COLUMNS, TrialMetrics, compute_trial_metrics


class ExperimentError(ValueError):
    pass


# ---------------------------------------------------------------------------
# Phrase sets


@dataclass(frozen=True)
class PhraseSet:
    phrases: tuple[str, ...]
    dropped_chars: int = 0  # characters removed during normalization

    def __len__(self) -> int:
        return len(self.phrases)


_ALLOWED = set("abcdefghijklmnopqrstuvwxyz ")


def normalize_phrase(line: str) -> tuple[str, int]:
    """Lowercase, drop characters outside a-z and space, collapse whitespace."""
    lowered = line.lower()
    kept = "".join(ch for ch in lowered if ch in _ALLOWED)
    dropped = len(lowered.strip()) - len(kept.strip())
    return " ".join(kept.split()), max(dropped, 0)


def load_phrase_set(path) -> PhraseSet:
    phrases = []
    dropped = 0
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            phrase, d = normalize_phrase(line)
            dropped += d
            if phrase:
                phrases.append(phrase)
    if not phrases:
        raise ExperimentError(f"{path}: no usable phrases after normalization")
    return PhraseSet(tuple(phrases), dropped)


# ---------------------------------------------------------------------------
# Scheduling


@dataclass(frozen=True)
class PlannedTrial:
    participant: str
    device: str
    block: int  # 1-based
    phrase_index: int  # position within the block, 0-based
    phrase: str


@dataclass(frozen=True)
class Schedule:
    participants: tuple[str, ...]
    devices: tuple[str, ...]
    blocks: int
    phrases_per_block: int
    seed: int
    orders: dict[str, tuple[str, ...]]  # participant -> device order
    trials: tuple[PlannedTrial, ...]

    def to_json(self) -> str:
        return json.dumps(
            {
                "participants": list(self.participants),
                "devices": list(self.devices),
                "blocks": self.blocks,
                "phrases_per_block": self.phrases_per_block,
                "seed": self.seed,
                "orders": {p: list(o) for p, o in self.orders.items()},
                "trials": [asdict(t) for t in self.trials],
            },
            indent=2,
        )

    @classmethod
    def from_json(cls, text: str) -> "Schedule":
        obj = json.loads(text)
        return cls(
            participants=tuple(obj["participants"]),
            devices=tuple(obj["devices"]),
            blocks=obj["blocks"],
            phrases_per_block=obj["phrases_per_block"],
            seed=obj["seed"],
            orders={p: tuple(o) for p, o in obj["orders"].items()},
            trials=tuple(PlannedTrial(**t) for t in obj["trials"]),
        )


def latin_square(items: tuple[str, ...]) -> list[tuple[str, ...]]:
    """Cyclic Latin square: row i is items rotated by i."""
    k = len(items)
    return [tuple(items[(i + j) % k] for j in range(k)) for i in range(k)]


def make_schedule(
    participants: int,
    devices: list[str],
    blocks: int,
    phrases_per_block: int,
    phrase_set: PhraseSet,
    seed: int,
) -> Schedule:
    k = len(devices)
    if k < 1 or blocks < 1 or phrases_per_block < 1:
        raise ExperimentError("devices, blocks and phrases_per_block must be positive")
    if participants % k != 0:
        raise ExperimentError(
            f"{participants} participants cannot be counterbalanced over {k} devices; "
            f"use a multiple of {k}"
        )
    if phrases_per_block > len(phrase_set):
        raise ExperimentError(
            f"block needs {phrases_per_block} distinct phrases, set has {len(phrase_set)}"
        )
    square = latin_square(tuple(devices))
    ids = tuple(f"P{i + 1:02d}" for i in range(participants))
    orders = {pid: square[i % k] for i, pid in enumerate(ids)}

    rng = random.Random(seed)
    trials = []
    for pid in ids:
        for device in orders[pid]:
            for block in range(1, blocks + 1):
                # Without replacement within a block; blocks may repeat phrases.
                chosen = rng.sample(range(len(phrase_set)), phrases_per_block)
                for idx, pi in enumerate(chosen):
                    trials.append(
                        PlannedTrial(pid, device, block, idx, phrase_set.phrases[pi])
                    )
    return Schedule(
        participants=ids,
        devices=tuple(devices),
        blocks=blocks,
        phrases_per_block=phrases_per_block,
        seed=seed,
        orders=orders,
        trials=tuple(trials),
    )


# ---------------------------------------------------------------------------
# Session store


def table_hash(table: CodeTable) -> str:
    canon = "\n".join(f"{s}\t{code_str(c)}" for s, c in sorted(table.entries.items()))
    return hashlib.sha256(canon.encode()).hexdigest()[:16]


@dataclass
class TrialRecord:
    participant: str
    device: str
    block: int
    phrase_index: int
    presented: str
    table_hash: str
    count_enter: bool
    events: list[KeystrokeEvent]
    metrics: TrialMetrics


@dataclass
class SessionStore:
    """Append-only store of trial logs and their metrics."""

    path: Path
    records: list[TrialRecord] = field(default_factory=list)

    SESSION_FILE = "session.jsonl"
    METRICS_FILE = "metrics.csv"

    @classmethod
    def open(cls, directory) -> "SessionStore":
        path = Path(directory)
        path.mkdir(parents=True, exist_ok=True)
        store = cls(path)
        session = path / cls.SESSION_FILE
        if session.exists():
            store.records = list(_read_session(session))
        return store

    def append(self, record: TrialRecord) -> None:
        self.records.append(record)
        with open(self.path / self.SESSION_FILE, "a", encoding="utf-8") as fh:
            header = {
                "kind": "header",
                "participant": record.participant,
                "device": record.device,
                "block": record.block,
                "phrase_index": record.phrase_index,
                "presented": record.presented,
                "table_hash": record.table_hash,
                "count_enter": record.count_enter,
            }
            fh.write(json.dumps(header, separators=(",", ":")) + "\n")
            for ev in record.events:
                fh.write(ev.to_json() + "\n")
            fh.write(
                json.dumps(
                    {"kind": "metrics", **json.loads(record.metrics.to_json())},
                    separators=(",", ":"),
                    sort_keys=True,
                )
                + "\n"
            )
        self._write_metrics_csv()

    def _write_metrics_csv(self) -> None:
        with open(self.path / self.METRICS_FILE, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh)
            w.writerow(
                ["participant", "device", "block", "phrase_index", "presented"]
                + METRICS_CSV_COLUMNS
            )
            for r in self.records:
                m = asdict(r.metrics)
                w.writerow(
                    [r.participant, r.device, r.block, r.phrase_index, r.presented]
                    + [m[c] for c in METRICS_CSV_COLUMNS]
                )

    def verify_replay(self, table: CodeTable) -> None:
        """Recompute every stored metric from its stored log; must match exactly."""
        for r in self.records:
            trial, _ = replay(table, r.presented, r.events)
            recomputed = compute_trial_metrics(trial, table, r.count_enter)
            if recomputed != r.metrics:
                raise ExperimentError(
                    f"stored metrics for {r.participant}/{r.device}/b{r.block}/"
                    f"p{r.phrase_index} do not replay: {recomputed} != {r.metrics}"
                )


def _read_session(path: Path):
    header = None
    events: list[KeystrokeEvent] = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            obj = json.loads(line)
            kind = obj.get("kind")
            if kind == "header":
                header = obj
                events = []
            elif kind == "metrics":
                if header is None:
                    raise ExperimentError(f"{path}: metrics line without header")
                m = {k: v for k, v in obj.items() if k != "kind"}
                yield TrialRecord(
                    participant=header["participant"],
                    device=header["device"],
                    block=header["block"],
                    phrase_index=header["phrase_index"],
                    presented=header["presented"],
                    table_hash=header["table_hash"],
                    count_enter=header["count_enter"],
                    events=events,
                    metrics=TrialMetrics(**m),
                )
                header = None
            else:
                events.append(KeystrokeEvent(Direction[obj["d"]], obj["t"], obj["o"]))


# ---------------------------------------------------------------------------
# Scripted typists

# Base inter-key interval (ms) per device; unknown devices fall back to 1000.
_DEVICE_CADENCE = {"mouse": 850, "gamepad": 900, "eyetracker": 1450}


def _interval_ms(device: str, block: int, rng: random.Random) -> int:
    base = _DEVICE_CADENCE.get(device, 1000)
    practice = block ** -0.15  # mild power-law speedup over blocks
    jitter = rng.uniform(0.85, 1.15)
    return max(1, round(base * practice * jitter))


def run_scripted_trial(
    table: CodeTable,
    planned: PlannedTrial,
    typist: str,
    rng: random.Random,
    error_rate: float = 0.08,
) -> Engine:
    """Type one planned phrase with a scripted typist.

    "perfect" follows the expected-key path exactly. "noisy" occasionally
    types a wrong symbol (then corrects it with backspace); its error
    probability shrinks over blocks.
    """
    eng = Engine(table, planned.phrase)
    t = rng.randint(0, 500)
    letters = [s for s in table.symbols if len(s) == 1]
    err = error_rate * (0.6 ** (planned.block - 1)) if typist == "noisy" else 0.0

    def press_code(sym: str):
        nonlocal t
        for d in table.code_of(sym):
            t += _interval_ms(planned.device, planned.block, rng)
            eng.press(d, t)

    guard = 0
    while not eng.trial.finished:
        guard += 1
        if guard > 100000:
            raise ExperimentError("scripted typist did not terminate")
        nxt = eng.expected_next_key()
        if nxt is None:
            press_code(ENTER)
            break
        at_root = eng.depth == 0
        if at_root and err > 0 and rng.random() < err:
            target = eng.trial.presented[len(eng.trial.transcribed)] if (
                eng.trial.presented.startswith(eng.trial.transcribed)
            ) else None
            wrong_pool = [s for s in letters if s != target]
            press_code(rng.choice(wrong_pool))
            continue
        t += _interval_ms(planned.device, planned.block, rng)
        eng.press(nxt, t)
    return eng


def simulate(
    schedule: Schedule,
    table: CodeTable,
    store: SessionStore,
    typist: str = "perfect",
    count_enter: bool = False,
    seed: int | None = None,
    error_rate: float = 0.08,
) -> SessionStore:
    """Run a scripted typist over every planned trial and persist the session."""
    if typist not in ("perfect", "noisy"):
        raise ExperimentError(f"unknown typist {typist!r}")
    base_seed = schedule.seed if seed is None else seed
    h = table_hash(table)
    for i, planned in enumerate(schedule.trials):
        rng = random.Random(base_seed * 1000003 + i)
        eng = run_scripted_trial(table, planned, typist, rng, error_rate)
        metrics = compute_trial_metrics(eng.trial, table, count_enter)
        store.append(
            TrialRecord(
                participant=planned.participant,
                device=planned.device,
                block=planned.block,
                phrase_index=planned.phrase_index,
                presented=planned.phrase,
                table_hash=h,
                count_enter=count_enter,
                events=list(eng.trial.keystrokes),
                metrics=metrics,
            )
        )
    return store


# ---------------------------------------------------------------------------
# Aggregation

SUMMARY_METRICS = ["wpm", "kspc_empirical", "efficiency", "uncorrected_error_rate"]


def _mean_sd(values: list[float]) -> tuple[float, float]:
    n = len(values)
    mean = sum(values) / n
    if n < 2:
        return mean, 0.0
    var = sum((v - mean) ** 2 for v in values) / (n - 1)
    return mean, var**0.5


def summarize(store: SessionStore, group_by: str = "device") -> dict:
    """Mean and sample SD (n-1) per metric, per group.

    group_by: "device", "block" or "device,block". Returns
    {group_key: {metric: {"mean": .., "sd": .., "n": ..}}}.
    """
    if not store.records:
        raise ExperimentError("empty store")
    keys = [k.strip() for k in group_by.replace("x", ",").split(",") if k.strip()]
    if not keys or any(k not in ("device", "block") for k in keys):
        raise ExperimentError(f"unsupported group_by {group_by!r}")

    groups: dict[tuple, list[TrialRecord]] = {}
    for r in store.records:
        gk = tuple(getattr(r, k) for k in keys)
        groups.setdefault(gk, []).append(r)

    out = {}
    for gk in sorted(groups, key=lambda g: tuple(str(x) for x in g)):
        recs = groups[gk]
        label = ",".join(str(x) for x in gk)
        out[label] = {}
        for metric in SUMMARY_METRICS:
            vals = [getattr(r.metrics, metric) for r in recs]
            mean, sd = _mean_sd(vals)
            out[label][metric] = {"mean": mean, "sd": sd, "n": len(vals)}
    return out


def condition_matrix(store: SessionStore, factor: str, metric: str = "wpm"):
    """Participant x level matrix of per-cell means, for repeated-measures ANOVA."""
    if factor not in ("device", "block"):
        raise ExperimentError(f"unsupported factor {factor!r}")
    participants = sorted({r.participant for r in store.records})
    levels = sorted({getattr(r, factor) for r in store.records}, key=str)
    matrix = []
    for p in participants:
        row = []
        for lv in levels:
            vals = [
                getattr(r.metrics, metric)
                for r in store.records
                if r.participant == p and getattr(r, factor) == lv
            ]
            if not vals:
                raise ExperimentError(f"incomplete design: {p} has no {factor}={lv}")
            row.append(sum(vals) / len(vals))
        matrix.append(row)
    return matrix, participants, levels
