from __future__ import annotations

import pytest

from sunadakit.words import (
    PresentationError,
    Word,
    WordParseError,
    free_reduce,
    invert,
    parse_presentation,
    parse_word,
)

GENS = ("a", "b", "c")


def test_parse_and_format_round_trip():
    w = parse_word("aBcC", GENS)
    assert w.letters == ((0, 1), (1, -1))
    assert parse_word("", GENS) == Word(())


def test_unknown_letter_rejected():
    with pytest.raises(WordParseError):
        parse_word("ad", GENS)


def test_free_reduce_cancels_nested_pairs():
    assert free_reduce([(0, 1), (1, 1), (1, -1), (0, -1), (2, 1)]) == ((2, 1),)


def test_inverse_and_power():
    w = parse_word("abC", GENS)
    assert (w * invert(w)).letters == ()
    assert (w**-2).letters == (invert(w) * invert(w)).letters
    assert len(w**0) == 0


def test_presentation_text_round_trip():
    text = (
        "# test\n"
        "generators: a b\n"
        "relator: abaBAB\n"
        "cusp: meridian=a longitude=bAAb\n"
    )
    P = parse_presentation(text)
    assert P.ngens == 2
    assert parse_presentation(P.to_text()) == P


def test_cusp_with_undeclared_generator_rejected():
    with pytest.raises((PresentationError, WordParseError)):
        parse_presentation("generators: a b\ncusp: meridian=c longitude=a\n")
