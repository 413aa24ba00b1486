"""Timed Creol: parser, interpreter and explorer for timed concurrent objects."""

from __future__ import annotations

from pathlib import Path

from . import ast
from .desugar import desugar
from .parser import SourceModel, parse
from .validate import validate

__version__ = "0.1.0"

MODELS_DIR = Path(__file__).parent / "models"


def bundled_models() -> dict[str, Path]:
    """Model name (file stem) -> path of every model shipped with the package."""
    return {p.stem: p for p in sorted(MODELS_DIR.glob("*.tcreol"))}


def bundled_model(name: str) -> Path:
    path = MODELS_DIR / f"{name}.tcreol"
    if not path.is_file():
        raise FileNotFoundError(f"no bundled model named {name!r}")
    return path


def load_model(source: SourceModel | str | Path, main: str = "Main") -> ast.Program:
    """Parse, validate and desugar a model given as text, path or SourceModel."""
    if isinstance(source, Path):
        source = SourceModel.from_path(source)
    elif isinstance(source, str):
        source = SourceModel(source)
    program = parse(source, main)
    validate(program, source.origin)
    return desugar(program)


__all__ = ["SourceModel", "load_model", "bundled_model", "bundled_models", "MODELS_DIR", "parse", "validate", "desugar", "__version__"]
