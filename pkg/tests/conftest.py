import pytest

from h4writer.codec import build_code_table
from h4writer.config import (
    combined_frequency_table,
    english_letter_frequencies,
    figure3_partial_table,
    load_config,
)


@pytest.fixture(scope="session")
def fig3_table():
    return figure3_partial_table()


@pytest.fixture(scope="session")
def english_freqs():
    return english_letter_frequencies()


@pytest.fixture(scope="session")
def full_freqs(english_freqs):
    cfg = load_config()
    return combined_frequency_table(english_freqs, cfg.command_freqs)


@pytest.fixture(scope="session")
def full_table(full_freqs):
    """Generated table over letters + space/bksp/enter defaults."""
    return build_code_table(full_freqs)
