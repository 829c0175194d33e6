"""Interactive four-key selection engine.

One Engine instance drives one trial: it consumes directional keystrokes,
tracks the current position in the code tree, keeps the live candidate
partition for the four boxes, applies command semantics and logs every
press with its timestamp. Replaying a log through a fresh engine reproduces
the trial exactly; all metrics are computed from such logs.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from .codec import (
    BKSP,
    DIRECTIONS,
    ENTER,
    SPACE,
    CodeTable,
    Direction,
    encode,
    text_to_symbols,
)


class EngineError(ValueError):
    pass


@dataclass(frozen=True)
class KeystrokeEvent:
    direction: Direction
    t_ms: int
    outcome: str  # "descend" | "emit:<token>" | "rejected"

    @property
    def emitted(self) -> str | None:
        return self.outcome[5:] if self.outcome.startswith("emit:") else None

    def to_json(self) -> str:
        return json.dumps(
            {"d": self.direction.name, "t": self.t_ms, "o": self.outcome},
            separators=(",", ":"),
        )

    @classmethod
    def from_json(cls, line: str) -> "KeystrokeEvent":
        obj = json.loads(line)
        return cls(Direction[obj["d"]], obj["t"], obj["o"])


@dataclass(frozen=True)
class PressOutcome:
    kind: str  # "descend" | "emit" | "rejected"
    symbol: str | None = None
    wrong: bool = False  # emission moved transcription away from presented


@dataclass
class Trial:
    presented: str
    transcribed: str = ""
    keystrokes: list[KeystrokeEvent] = field(default_factory=list)
    corrected_count: int = 0
    started_ms: int | None = None
    finished_ms: int | None = None
    finished: bool = False


class Engine:
    """Selection state machine bound to one trial."""

    def __init__(self, table: CodeTable, presented: str):
        if not presented:
            raise EngineError("presented phrase is empty")
        for i, sym in enumerate(text_to_symbols(presented)):
            if sym not in table.entries:
                raise EngineError(f"presented symbol {sym!r} at position {i} is not encodable")
        self.table = table
        self.tree = table.tree()
        self.cursor = self.tree.root
        self.trial = Trial(presented=presented)
        self._depth = 0

    @property
    def depth(self) -> int:
        """Keys pressed since the cursor was last at the root."""
        return self._depth

    def partition(self) -> dict[Direction, list[str]]:
        """Symbols reachable through each child of the cursor (empty if none)."""
        return {
            d: (self.cursor.children[d].leaves() if d in self.cursor.children else [])
            for d in DIRECTIONS
        }

    def press(self, direction: Direction, t_ms: int) -> PressOutcome:
        trial = self.trial
        if trial.finished:
            raise EngineError("press after trial finished")
        if trial.keystrokes and t_ms < trial.keystrokes[-1].t_ms:
            raise EngineError("timestamps must be non-decreasing")
        if trial.started_ms is None:
            trial.started_ms = t_ms

        child = self.cursor.children.get(direction)
        if child is None:
            # Costs the user a keystroke but changes nothing else.
            trial.keystrokes.append(KeystrokeEvent(direction, t_ms, "rejected"))
            return PressOutcome("rejected")
        if not child.is_leaf:
            trial.keystrokes.append(KeystrokeEvent(direction, t_ms, "descend"))
            self.cursor = child
            self._depth += 1
            return PressOutcome("descend")

        symbol = child.symbol
        trial.keystrokes.append(KeystrokeEvent(direction, t_ms, f"emit:{symbol}"))
        self.cursor = self.tree.root
        self._depth = 0
        expected = self._target_symbol()
        if symbol == BKSP:
            if trial.transcribed:
                trial.transcribed = trial.transcribed[:-1]
                trial.corrected_count += 1
        elif symbol == ENTER:
            trial.finished = True
            trial.finished_ms = t_ms
        elif symbol == SPACE:
            trial.transcribed += " "
        else:
            trial.transcribed += symbol
        # Wrong at emission granularity: not what the shortest correct path
        # would have emitted from the pre-emission transcription.
        return PressOutcome("emit", symbol=symbol, wrong=symbol != expected)

    def _target_symbol(self) -> str:
        """Symbol the shortest correct path emits next ([enter] when done)."""
        trial = self.trial
        if trial.transcribed == trial.presented:
            return ENTER
        if trial.presented.startswith(trial.transcribed):
            ch = trial.presented[len(trial.transcribed)]
            return SPACE if ch == " " else ch
        return BKSP

    def expected_next_key(self) -> Direction | None:
        """Next direction on the shortest correct path, or None when done.

        The first divergence between transcribed and presented determines the
        target symbol: the next needed character while transcription is a
        correct prefix, otherwise backspace. If a mid-code descent has left
        the target unreachable, steers to the nearest leaf so the cursor
        returns to the root as fast as possible.
        """
        trial = self.trial
        if trial.finished:
            return None
        if trial.transcribed == trial.presented:
            return None
        return self._toward(self._target_symbol())

    def _toward(self, target: str) -> Direction:
        for d in DIRECTIONS:
            child = self.cursor.children.get(d)
            if child is not None and target in child.leaves():
                return d
        # Target unreachable from here: head for the shallowest leaf.
        best_d, best_depth = None, None
        for d in DIRECTIONS:
            child = self.cursor.children.get(d)
            if child is None:
                continue
            depth = _min_leaf_depth(child)
            if best_depth is None or depth < best_depth:
                best_d, best_depth = d, depth
        return best_d


def _min_leaf_depth(node) -> int:
    if node.is_leaf:
        return 0
    return 1 + min(_min_leaf_depth(c) for c in node.children.values())


def new_trial(table: CodeTable, presented: str) -> Engine:
    return Engine(table, presented)


def replay(
    table: CodeTable, presented: str, keystrokes: list[KeystrokeEvent]
) -> tuple[Trial, Engine]:
    """Re-derive a trial from its keystroke log.

    The log's recorded outcomes are ignored; outcomes are recomputed and must
    follow from the presses alone, which is what makes stored logs auditable.
    """
    for a, b in zip(keystrokes, keystrokes[1:]):
        if b.t_ms < a.t_ms:
            raise EngineError("keystroke log timestamps out of order")
    eng = Engine(table, presented)
    for ev in keystrokes:
        eng.press(ev.direction, ev.t_ms)
    return eng.trial, eng


def counted_keystrokes(trial: Trial, count_enter: bool = False) -> int:
    """Keystrokes charged to the user: descend + rejected + trailing partial.

    The presses spelling an [enter] emission are excluded unless
    `count_enter`; rejected presses always count.
    """
    total = 0
    pending: list[KeystrokeEvent] = []  # descend chain since last root reset
    for ev in trial.keystrokes:
        if ev.outcome == "rejected":
            total += 1
        elif ev.outcome == "descend":
            pending.append(ev)
        else:  # emit
            if ev.emitted == ENTER and not count_enter:
                pending.clear()
            else:
                total += len(pending) + 1
                pending.clear()
    return total + len(pending)


def emission_keystroke_times(trial: Trial) -> list[int]:
    """Timestamps of the keystrokes that completed non-Enter emissions."""
    return [
        ev.t_ms
        for ev in trial.keystrokes
        if ev.emitted is not None and ev.emitted != ENTER
    ]


def perfect_typing_keystrokes(table: CodeTable, presented: str) -> int:
    """Keystroke count of an error-free transcription (Enter excluded)."""
    return len(encode(table, presented))
