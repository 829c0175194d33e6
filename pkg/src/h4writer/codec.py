"""Quaternary prefix codes over the four directional keys.

Builds minimum-redundancy 4-ary Huffman codes from symbol frequencies and
provides encode/decode between symbol sequences and direction sequences.
Everything here is immutable after construction and safe to share between
threads.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Sequence

SPACE = "[space]"
BKSP = "[bksp]"
ENTER = "[enter]"

COMMAND_TOKENS = (SPACE, BKSP, ENTER)

# Rank string sorting all dummy padding symbols after every real token.
_DUMMY_PREFIX = "￿"


class CodecError(ValueError):
    """Invalid frequency table, code table or key sequence."""


class Direction(Enum):
    """One of the four directional keys. Canonical order: L < R < U < D."""

    L = 0
    R = 1
    U = 2
    D = 3

    def __lt__(self, other: "Direction") -> bool:
        return self.value < other.value

    def __str__(self) -> str:
        return self.name


DIRECTIONS = (Direction.L, Direction.R, Direction.U, Direction.D)


def parse_code(s: str) -> tuple[Direction, ...]:
    """Parse a string like 'LUR' into a Direction tuple."""
    try:
        return tuple(Direction[ch] for ch in s)
    except KeyError as e:
        raise CodecError(f"invalid direction character {e.args[0]!r} in code {s!r}") from None


def code_str(code: Sequence[Direction]) -> str:
    return "".join(d.name for d in code)


@dataclass(frozen=True)
class SymbolFrequencyTable:
    """Symbols with relative frequencies (dimensionless, any positive scale)."""

    entries: tuple[tuple[str, float], ...]

    def __post_init__(self):
        if not self.entries:
            raise CodecError("frequency table is empty")
        seen = set()
        for sym, freq in self.entries:
            if sym in seen:
                raise CodecError(f"duplicate symbol {sym!r}")
            seen.add(sym)
            if freq < 0:
                raise CodecError(f"negative frequency for {sym!r}")
        if not any(f > 0 for _, f in self.entries):
            raise CodecError("all frequencies are zero")

    @classmethod
    def from_dict(cls, freqs: dict[str, float]) -> "SymbolFrequencyTable":
        return cls(tuple(freqs.items()))

    @property
    def symbols(self) -> tuple[str, ...]:
        return tuple(s for s, _ in self.entries)

    def frequency(self, symbol: str) -> float:
        for s, f in self.entries:
            if s == symbol:
                return f
        raise KeyError(symbol)

    def normalized(self) -> dict[str, float]:
        """Frequencies rescaled to sum to 1."""
        total = sum(f for _, f in self.entries)
        return {s: f / total for s, f in self.entries}


@dataclass
class TreeNode:
    """Node of a 4-ary code tree. Leaves hold exactly one symbol."""

    symbol: str | None = None
    children: dict[Direction, "TreeNode"] = field(default_factory=dict)

    @property
    def is_leaf(self) -> bool:
        return self.symbol is not None

    def leaves(self) -> list[str]:
        """Symbols in this subtree, in code order (L,R,U,D depth-first)."""
        if self.is_leaf:
            return [self.symbol]
        out = []
        for d in DIRECTIONS:
            if d in self.children:
                out.extend(self.children[d].leaves())
        return out


class CodeTree:
    """Tree form of a prefix-free code table; round-trips exactly with it."""

    def __init__(self, root: TreeNode):
        self.root = root

    @classmethod
    def from_table(cls, table: "CodeTable") -> "CodeTree":
        root = TreeNode()
        for sym, code in table.entries.items():
            node = root
            for i, d in enumerate(code):
                if node.is_leaf:
                    raise CodecError(
                        f"code for {sym!r} has {table.code_of(node.symbol)} "
                        f"({node.symbol!r}) as a prefix"
                    )
                if d not in node.children:
                    node.children[d] = TreeNode()
                node = node.children[d]
            if node.is_leaf or node.children:
                other = node.symbol or node.leaves()[0]
                raise CodecError(
                    f"code for {sym!r} conflicts with code for {other!r} (prefix violation)"
                )
            node.symbol = sym
        return cls(root)

    def to_table(self, source: str = "generated") -> "CodeTable":
        entries: dict[str, tuple[Direction, ...]] = {}

        def walk(node: TreeNode, prefix: tuple[Direction, ...]):
            if node.is_leaf:
                entries[node.symbol] = prefix
                return
            for d in DIRECTIONS:
                if d in node.children:
                    walk(node.children[d], prefix + (d,))

        walk(self.root, ())
        return CodeTable(entries, source=source)


@dataclass(frozen=True)
class CodeTable:
    """Prefix-free mapping symbol -> direction sequence."""

    entries: dict[str, tuple[Direction, ...]]
    source: str = "generated"

    def __post_init__(self):
        if not self.entries:
            raise CodecError("code table is empty")
        for sym, code in self.entries.items():
            if not code:
                raise CodecError(f"empty code for {sym!r}")
        # Building the tree validates prefix-freeness.
        CodeTree.from_table(self)

    def code_of(self, symbol: str) -> tuple[Direction, ...]:
        return self.entries[symbol]

    @property
    def symbols(self) -> tuple[str, ...]:
        return tuple(self.entries)

    def tree(self) -> CodeTree:
        return CodeTree.from_table(self)


class _HuffNode:
    """Merge-queue node. Ordering key: (weight, tie class, smallest token)."""

    __slots__ = ("weight", "cls", "rank", "symbol", "children")

    def __init__(self, weight, cls, rank, symbol=None, children=None):
        self.weight = weight
        self.cls = cls
        self.rank = rank
        self.symbol = symbol
        self.children = children  # None for leaves

    def __lt__(self, other: "_HuffNode") -> bool:
        return (self.weight, self.cls, self.rank) < (other.weight, other.cls, other.rank)


# Tie classes: dummies merge first (end up deepest, then pruned),
# zero-frequency real symbols behave like epsilon weight, after dummies
# but before any positive-weight symbol at the same weight.
_CLS_DUMMY = 0
_CLS_ZERO = 1
_CLS_POSITIVE = 2


def build_code_table(freqs: SymbolFrequencyTable, arity: int = 4) -> CodeTable:
    """Build a minimum-redundancy prefix code over the direction alphabet.

    Pads with zero-weight dummy symbols until (m + d - 1) mod (arity - 1) == 0,
    then repeatedly merges the `arity` lowest-weight nodes. Fully deterministic:
    weight ties break on the smallest contained token (plain string order), and
    each merged node's children take directions L,R,U,D in descending subtree
    weight.
    """
    if not 2 <= arity <= len(DIRECTIONS):
        raise CodecError(f"arity must be between 2 and {len(DIRECTIONS)}")
    syms = freqs.entries
    if len(syms) == 1:
        # Degenerate alphabet: one keystroke per emission, never zero.
        return CodeTable({syms[0][0]: (Direction.L,)})

    heap: list[_HuffNode] = []
    for sym, f in syms:
        cls = _CLS_POSITIVE if f > 0 else _CLS_ZERO
        heap.append(_HuffNode(f, cls, sym, symbol=sym))
    n_dummies = (-(len(syms) - 1)) % (arity - 1)
    for i in range(n_dummies):
        heap.append(_HuffNode(0.0, _CLS_DUMMY, _DUMMY_PREFIX + str(i)))
    heapq.heapify(heap)

    while len(heap) > 1:
        picked = [heapq.heappop(heap) for _ in range(arity)]
        merged = _HuffNode(
            sum(p.weight for p in picked),
            max(p.cls for p in picked),
            min(p.rank for p in picked if p.cls != _CLS_DUMMY),
            children=picked,
        )
        heapq.heappush(heap, merged)

    root = heap[0]
    entries: dict[str, tuple[Direction, ...]] = {}

    def assign(node: _HuffNode, prefix: tuple[Direction, ...]):
        if node.children is None:
            if node.cls != _CLS_DUMMY:
                entries[node.symbol] = prefix
            return
        real = [c for c in node.children if not (c.children is None and c.cls == _CLS_DUMMY)]
        real.sort(key=lambda c: (-c.weight, c.rank))
        for d, child in zip(DIRECTIONS, real):
            assign(child, prefix + (d,))

    assign(root, ())
    return CodeTable(entries)


def text_to_symbols(text: str) -> list[str]:
    """Map a phrase string to symbol tokens (' ' becomes [space])."""
    return [SPACE if ch == " " else ch for ch in text]


def symbols_to_text(symbols: Iterable[str]) -> str:
    """Inverse of text_to_symbols for printable symbols ([space] -> ' ')."""
    return "".join(" " if s == SPACE else s for s in symbols)


def encode(table: CodeTable, symbols: Iterable[str] | str) -> list[Direction]:
    """Concatenate the per-symbol codes of `symbols` (a str is split per char)."""
    if isinstance(symbols, str):
        symbols = text_to_symbols(symbols)
    out: list[Direction] = []
    for i, sym in enumerate(symbols):
        code = table.entries.get(sym)
        if code is None:
            raise CodecError(f"symbol {sym!r} at position {i} is not in the code table")
        out.extend(code)
    return out


def decode(table: CodeTable, keys: Sequence[Direction]) -> list[str]:
    """Split a key sequence back into symbols (unique, by prefix-freeness)."""
    tree = table.tree()
    out: list[str] = []
    node = tree.root
    for i, d in enumerate(keys):
        child = node.children.get(d)
        if child is None:
            raise CodecError(f"key {d} at position {i} exits the code tree")
        if child.is_leaf:
            out.append(child.symbol)
            node = tree.root
        else:
            node = child
    if node is not tree.root:
        raise CodecError("trailing incomplete code")
    return out


def weighted_code_length(table: CodeTable, freqs: SymbolFrequencyTable) -> float:
    """Sum of normalized frequency times code length over all symbols."""
    norm = freqs.normalized()
    total = 0.0
    for sym, p in norm.items():
        if p > 0 and sym not in table.entries:
            raise CodecError(f"code table does not cover symbol {sym!r}")
        if sym in table.entries:
            total += p * len(table.entries[sym])
    return total


def _parse_token(raw: str) -> str:
    """Normalize a symbol token: bracketed command names are lowercased."""
    if raw.startswith("[") and raw.endswith("]") and len(raw) > 2:
        return raw.lower()
    if len(raw) != 1:
        raise CodecError(f"symbol token must be one character or [command], got {raw!r}")
    return raw


def load_code_table(path) -> CodeTable:
    """Load a TSV code table (`token<TAB>code`, '#' comments)."""
    entries: dict[str, tuple[Direction, ...]] = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split("\t")
            if len(parts) != 2:
                raise CodecError(f"{path}:{lineno}: expected 'token<TAB>code', got {line!r}")
            sym = _parse_token(parts[0])
            if sym in entries:
                raise CodecError(f"{path}:{lineno}: duplicate symbol {sym!r}")
            entries[sym] = parse_code(parts[1])
    if not entries:
        raise CodecError(f"{path}: no entries")
    return CodeTable(entries, source="loaded")


def save_code_table(table: CodeTable, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for sym, code in table.entries.items():
            fh.write(f"{sym}\t{code_str(code)}\n")


def load_frequency_table(path) -> SymbolFrequencyTable:
    """Load a TSV frequency table (`token<TAB>frequency`, '#' comments)."""
    entries: list[tuple[str, float]] = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split("\t")
            if len(parts) != 2:
                raise CodecError(f"{path}:{lineno}: expected 'token<TAB>frequency'")
            try:
                freq = float(parts[1])
            except ValueError:
                raise CodecError(f"{path}:{lineno}: bad frequency {parts[1]!r}") from None
            entries.append((_parse_token(parts[0]), freq))
    return SymbolFrequencyTable(tuple(entries))


def save_frequency_table(freqs: SymbolFrequencyTable, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for sym, f in freqs.entries:
            fh.write(f"{sym}\t{f}\n")
