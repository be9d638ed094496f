"""Year extraction and sentence splitting contracts."""

from __future__ import annotations

import re

from hypothesis import given
from hypothesis import strategies as st

from docs2kg.text import extract_years, split_sentences

# -- extract_years -----------------------------------------------------------------


def test_years_demo_phrase():
    assert extract_years("from 2011 to 2021") == [2011, 2021]


def test_years_empty():
    assert extract_years("") == []


def test_years_boundary_and_range_rules():
    # 20111 is five digits, 1899 is below range; only 2021 survives
    assert extract_years("room 20111 built 1899, reno 2021") == [2021]


def test_years_deduplicated_and_sorted():
    assert extract_years("2021, 1999 and 2021 again, then 1950") == [1950, 1999, 2021]


def test_years_not_matched_inside_words():
    assert extract_years("x2021 2021y a2021b") == []


def test_years_range_edges():
    assert extract_years("1900 2099 1899 2100") == [1900, 2099]


@given(st.text(max_size=200))
def test_years_appear_verbatim_and_in_range(text):
    for year in extract_years(text):
        assert 1900 <= year <= 2099
        assert str(year) in text


# -- split_sentences ------------------------------------------------------------------


def test_split_two_sentences():
    assert split_sentences("A. B.") == ["A.", "B."]


def test_split_no_terminator():
    assert split_sentences("No terminator") == ["No terminator"]


def test_split_four_sentences():
    got = split_sentences("Pop grew. See Table 1! Why? Data.")
    assert got == ["Pop grew.", "See Table 1!", "Why?", "Data."]


def test_split_requires_whitespace_after_delimiter():
    assert split_sentences("v1.2 is out. Yes.") == ["v1.2 is out.", "Yes."]


def test_split_empty():
    assert split_sentences("") == []
    assert split_sentences("   ") == []


@given(st.text(max_size=300))
def test_split_preserves_non_whitespace(text):
    parts = split_sentences(text)
    assert all(parts), "no empty sentences"
    stripped = re.sub(r"\s", "", text)
    joined = re.sub(r"\s", "", "".join(parts))
    assert joined == stripped


@given(st.text(max_size=300))
def test_split_single_space_join_reconstructs(text):
    # joining with single spaces reconstructs the trimmed sentence content
    parts = split_sentences(text)
    rejoined = " ".join(parts)
    assert split_sentences(rejoined) == parts
