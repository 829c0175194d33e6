"""Configuration and bundled reference data.

Config files are TOML; anything not set falls back to the packaged defaults
(data/default_config.toml). Command frequencies are fractions of total
traffic; letters share the remaining mass in proportion to their relative
frequencies.
"""

from __future__ import annotations

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib
from dataclasses import dataclass, field
from importlib import resources

from .codec import (
    BKSP,
    ENTER,
    SPACE,
    CodeTable,
    SymbolFrequencyTable,
    load_code_table,
    load_frequency_table,
)

_COMMAND_KEYS = {"space": SPACE, "bksp": BKSP, "enter": ENTER}


@dataclass
class Config:
    letters: str = "abcdefghijklmnopqrstuvwxyz"
    command_freqs: dict[str, float] = field(
        default_factory=lambda: {SPACE: 0.18, BKSP: 0.02, ENTER: 0.01}
    )
    count_enter: bool = False
    seed: int = 7
    devices: list[str] = field(default_factory=lambda: ["mouse", "gamepad", "eyetracker"])
    blocks: int = 3
    phrases_per_block: int = 3


def _data_path(name: str):
    return resources.files("h4writer.data") / name


def load_config(path=None) -> Config:
    """Load a TOML config; values missing from the file keep their defaults."""
    cfg = Config()
    if path is None:
        raw = (_data_path("default_config.toml")).read_bytes()
        doc = tomllib.loads(raw.decode())
    else:
        with open(path, "rb") as fh:
            doc = tomllib.load(fh)
    if "symbols" in doc and "letters" in doc["symbols"]:
        cfg.letters = doc["symbols"]["letters"]
    if "commands" in doc:
        cfg.command_freqs = {
            _COMMAND_KEYS.get(k, k): float(v) for k, v in doc["commands"].items()
        }
    eng = doc.get("engine", {})
    if "count_enter" in eng:
        cfg.count_enter = bool(eng["count_enter"])
    exp = doc.get("experiment", {})
    cfg.seed = int(exp.get("seed", cfg.seed))
    cfg.devices = list(exp.get("devices", cfg.devices))
    cfg.blocks = int(exp.get("blocks", cfg.blocks))
    cfg.phrases_per_block = int(exp.get("phrases_per_block", cfg.phrases_per_block))
    return cfg


def english_letter_frequencies() -> SymbolFrequencyTable:
    """The packaged 26-letter relative frequency table."""
    with resources.as_file(_data_path("english_letter_frequencies.tsv")) as p:
        return load_frequency_table(p)


def figure3_partial_table() -> CodeTable:
    """The packaged partial published key-code table."""
    with resources.as_file(_data_path("figure3_partial.tsv")) as p:
        return load_code_table(p)


def packaged_phrase_file():
    """Context manager yielding a path to the packaged 500-phrase set."""
    return resources.as_file(_data_path("phrases500.txt"))


def combined_frequency_table(
    letters: SymbolFrequencyTable, command_freqs: dict[str, float]
) -> SymbolFrequencyTable:
    """Merge letter frequencies with command traffic shares.

    Commands take their configured fractions of total traffic; letters are
    rescaled into the remainder.
    """
    command_total = sum(command_freqs.values())
    if not 0.0 <= command_total < 1.0:
        raise ValueError(f"command frequencies must sum into [0, 1), got {command_total}")
    letter_mass = 1.0 - command_total
    norm = letters.normalized()
    entries = [(s, letter_mass * p) for s, p in norm.items()]
    entries.extend(command_freqs.items())
    return SymbolFrequencyTable(tuple(entries))
