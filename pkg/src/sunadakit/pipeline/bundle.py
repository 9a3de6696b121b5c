"""Fixture bundles: a presentation plus optional field, matrices and expected values.

A bundle is a directory holding ``presentation.txt`` and any of
``field.json``, ``matrices.json`` and ``expected.json``.  A bare
presentation file is also accepted as a bundle with nothing else.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

from ..numfield import NFMatrix, NumberField, load_field, load_matrices
from ..psl2 import ProjectiveMatrix
from ..words import Presentation, load_presentation

PERIPHERAL_NAMES = ("mu", "lambda")


class BundleError(ValueError):
    pass


def _fixture_root() -> Path:
    return Path(str(resources.files("sunadakit").joinpath("data", "fixtures")))


def fixture_names() -> list[str]:
    root = _fixture_root()
    return sorted(p.name for p in root.iterdir() if (p / "presentation.txt").is_file())


@dataclass
class FixtureBundle:
    name: str
    root: Path
    presentation: Presentation
    field: NumberField | None = None
    matrices: dict[str, NFMatrix] | None = None
    expected: dict | None = None

    @classmethod
    def load(cls, path: str | Path) -> FixtureBundle:
        path = Path(path)
        if path.is_file():
            pres = load_presentation(path)
            return cls(path.stem, path.parent, pres)
        pfile = path / "presentation.txt"
        if not pfile.is_file():
            raise BundleError(f"{path} has no presentation.txt")
        pres = load_presentation(pfile)
        field = load_field(path / "field.json") if (path / "field.json").is_file() else None
        matrices = None
        if (path / "matrices.json").is_file():
            if field is None:
                raise BundleError(f"{path}: matrices.json needs field.json")
            matrices = load_matrices(path / "matrices.json", field)
        expected = None
        if (path / "expected.json").is_file():
            expected = json.loads((path / "expected.json").read_text())
        b = cls(path.name, path, pres, field, matrices, expected)
        b.validate()
        return b

    @classmethod
    def bundled(cls, name: str) -> FixtureBundle:
        root = _fixture_root() / name
        if not root.is_dir():
            raise BundleError(f"no bundled fixture {name!r}; known: {', '.join(fixture_names())}")
        return cls.load(root)

    @classmethod
    def resolve(cls, ref: str | Path) -> FixtureBundle:
        """A path if it exists, otherwise the name of a bundled fixture."""
        if Path(ref).exists():
            return cls.load(ref)
        return cls.bundled(str(ref))

    def validate(self) -> None:
        """Check that every file names the same generators."""
        gens = set(self.presentation.generators)
        allowed = gens | set(PERIPHERAL_NAMES)
        if self.matrices is not None:
            missing = gens - set(self.matrices)
            extra = set(self.matrices) - allowed
            if missing or extra:
                raise BundleError(
                    f"{self.name}: matrices.json generators mismatch "
                    f"(missing {sorted(missing)}, unknown {sorted(extra)})"
                )
        for red in (self.expected or {}).get("reductions", []):
            names = set(red.get("images", {}))
            if not gens <= names or not names <= allowed:
                raise BundleError(f"{self.name}: reduction {red.get('label')} names {sorted(names)}")

    def source(self, key: str, filename: str = "expected.json") -> str:
        return f"{self.name}/{filename}:{key}"

    def expected_reductions(self) -> list[dict]:
        return list((self.expected or {}).get("reductions", []))

    def published_images(self, red: dict) -> dict[str, ProjectiveMatrix]:
        """Published reduced matrices as canonical PSL elements."""
        return {k: ProjectiveMatrix.from_rows(v, red["prime"]) for k, v in red["images"].items()}
