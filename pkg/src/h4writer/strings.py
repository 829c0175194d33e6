"""Minimum string distance (unit-cost Levenshtein)."""

from __future__ import annotations


def msd(a: str, b: str) -> int:
    """Minimum number of insertions, deletions and substitutions to turn a into b."""
    if not a:
        return len(b)
    if not b:
        return len(a)
    prev = list(range(len(b) + 1))
    for i, ca in enumerate(a, 1):
        cur = [i] + [0] * len(b)
        for j, cb in enumerate(b, 1):
            cur[j] = min(
                prev[j] + 1,  # delete from a
                cur[j - 1] + 1,  # insert into a
                prev[j - 1] + (ca != cb),  # substitute
            )
        prev = cur
    return prev[-1]
