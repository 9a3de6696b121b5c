"""Free-group words and finitely presented groups with peripheral data.

Words use the single-letter convention common in 3-manifold software:
a lowercase letter is a generator and the matching uppercase letter is its
inverse, so ``"aaCbAccBB"`` means a a c^-1 b a^-1 c c b^-1 b^-1.
Whitespace and commas inside a word are ignored.
"""
from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Any, Callable, Iterable, Sequence

Letter = tuple[int, int]  # (generator index, +1 or -1)


class WordParseError(ValueError):
    pass


class PresentationError(ValueError):
    pass


def free_reduce(letters: Iterable[Letter]) -> tuple[Letter, ...]:
    out: list[Letter] = []
    for g, e in letters:
        if out and out[-1][0] == g and out[-1][1] == -e:
            out.pop()
        else:
            out.append((g, e))
    return tuple(out)


@dataclass(frozen=True)
class Word:
    """A freely reduced word; ``letters`` is a tuple of (generator, sign)."""

    letters: tuple[Letter, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "letters", free_reduce(self.letters))

    def __len__(self) -> int:
        return len(self.letters)

    def __iter__(self):
        return iter(self.letters)

    def __mul__(self, other: Word) -> Word:
        return Word(self.letters + other.letters)

    def __pow__(self, n: int) -> Word:
        if n < 0:
            return invert(self) ** (-n)
        return Word(self.letters * n)

    def inverse(self) -> Word:
        return invert(self)

    def generators_used(self) -> set[int]:
        return {g for g, _ in self.letters}


def invert(w: Word) -> Word:
    return Word(tuple((g, -e) for g, e in reversed(w.letters)))


def parse_word(text: str, generators: Sequence[str]) -> Word:
    index = {name: i for i, name in enumerate(generators)}
    letters = []
    for pos, ch in enumerate(text):
        if ch.isspace() or ch == ",":
            continue
        if ch in index:
            letters.append((index[ch], 1))
        elif ch.lower() in index and ch.isupper():
            letters.append((index[ch.lower()], -1))
        else:
            raise WordParseError(
                f"undeclared generator {ch!r} at position {pos} in {text!r}"
            )
    return Word(tuple(letters))


def format_word(w: Word, generators: Sequence[str]) -> str:
    return "".join(
        generators[g] if e > 0 else generators[g].upper() for g, e in w.letters
    )


def evaluate(
    w: Word,
    images: Sequence[Any],
    mul: Callable[[Any, Any], Any],
    inv: Callable[[Any], Any],
    identity: Any,
):
    """Push ``w`` through the homomorphism sending generator i to images[i]."""
    inverses: dict[int, Any] = {}
    result = identity
    for g, e in w.letters:
        if e > 0:
            x = images[g]
        else:
            if g not in inverses:
                inverses[g] = inv(images[g])
            x = inverses[g]
        result = mul(result, x)
    return result


@dataclass(frozen=True)
class Cusp:
    meridian: Word
    longitude: Word


@dataclass(frozen=True)
class Presentation:
    generators: tuple[str, ...]
    relators: tuple[Word, ...] = ()
    cusps: tuple[Cusp, ...] = ()
    name: str = ""

    def __post_init__(self):
        gens = tuple(self.generators)
        object.__setattr__(self, "generators", gens)
        object.__setattr__(self, "relators", tuple(self.relators))
        object.__setattr__(self, "cusps", tuple(self.cusps))
        if len(set(gens)) != len(gens):
            raise PresentationError(f"repeated generator names in {gens}")
        for g in gens:
            if len(g) != 1 or not ("a" <= g <= "z"):
                raise PresentationError(
                    f"generator names must be single lowercase letters, got {g!r}"
                )
        n = len(gens)
        words = list(self.relators)
        for c in self.cusps:
            words += [c.meridian, c.longitude]
        for w in words:
            if any(g >= n or g < 0 for g in w.generators_used()):
                raise PresentationError("word uses an undeclared generator")

    @property
    def ngens(self) -> int:
        return len(self.generators)

    def word(self, text: str) -> Word:
        return parse_word(text, self.generators)

    def fmt(self, w: Word) -> str:
        return format_word(w, self.generators)

    @classmethod
    def from_strings(
        cls,
        generators: str | Sequence[str],
        relators: Iterable[str] = (),
        cusps: Iterable[tuple[str, str]] = (),
        name: str = "",
    ) -> Presentation:
        if isinstance(generators, str):
            generators = generators.split()
        gens = tuple(generators)
        rels = tuple(parse_word(r, gens) for r in relators)
        cs = tuple(Cusp(parse_word(m, gens), parse_word(l, gens)) for m, l in cusps)
        return cls(gens, rels, cs, name)

    def to_text(self) -> str:
        lines = []
        if self.name:
            lines.append(f"# {self.name}")
        lines.append("generators: " + " ".join(self.generators))
        for r in self.relators:
            lines.append("relator: " + self.fmt(r))
        for c in self.cusps:
            lines.append(
                f"cusp: meridian={self.fmt(c.meridian)} longitude={self.fmt(c.longitude)}"
            )
        return "\n".join(lines) + "\n"


def parse_presentation(text: str, name: str = "") -> Presentation:
    """Parse the line-oriented presentation format.

    Grammar (one directive per line, ``#`` starts a comment line)::

        generators: a b c
        relator: aaCbAccBB
        cusp: meridian=CbAcb longitude=AAbCCbacb

    ``generators`` must come first. Words may contain spaces and commas.
    """
    generators: list[str] | None = None
    relators: list[Word] = []
    cusps: list[Cusp] = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        key, sep, rest = line.partition(":")
        if not sep:
            raise PresentationError(f"line {lineno}: expected 'key: value'")
        key = key.strip().lower()
        rest = rest.strip()
        if key == "generators":
            if generators is not None:
                raise PresentationError(f"line {lineno}: generators declared twice")
            generators = rest.replace(",", " ").split()
            continue
        if generators is None:
            raise PresentationError(f"line {lineno}: '{key}' before 'generators'")
        try:
            if key == "relator":
                relators.append(parse_word(rest, generators))
            elif key == "cusp":
                fields = _parse_cusp_fields(rest, lineno)
                cusps.append(
                    Cusp(
                        parse_word(fields["meridian"], generators),
                        parse_word(fields["longitude"], generators),
                    )
                )
            else:
                raise PresentationError(f"line {lineno}: unknown directive {key!r}")
        except WordParseError as exc:
            raise PresentationError(f"line {lineno}: {exc}") from None
    if generators is None:
        raise PresentationError("no 'generators:' line")
    return Presentation(tuple(generators), tuple(relators), tuple(cusps), name)


def _parse_cusp_fields(rest: str, lineno: int) -> dict[str, str]:
    # values may contain spaces, so split on the key names rather than whitespace
    fields: dict[str, str] = {}
    lower = rest
    mi = lower.find("meridian=")
    li = lower.find("longitude=")
    if mi < 0 or li < 0:
        raise PresentationError(f"line {lineno}: cusp needs meridian= and longitude=")
    if mi < li:
        fields["meridian"] = rest[mi + 9 : li]
        fields["longitude"] = rest[li + 10 :]
    else:
        fields["longitude"] = rest[li + 10 : mi]
        fields["meridian"] = rest[mi + 9 :]
    return fields


def load_presentation(path: str | Path) -> Presentation:
    path = Path(path)
    return parse_presentation(path.read_text(encoding="utf-8"), name=path.stem)
