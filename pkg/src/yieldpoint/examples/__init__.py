# File: yieldpoint/examples/__init__.py
"""The bundled corpus programs (`*.dap`)."""
from __future__ import annotations

from importlib import resources
from typing import List

from yieldpoint.errors import ConfigError


def corpus_names() -> List[str]:
    return sorted(p.name[:-4] for p in resources.files(__name__).iterdir() if p.name.endswith(".dap"))


def corpus_text(name: str) -> str:
    """Source of a bundled program, by name with or without the `.dap` suffix."""
    stem = name[:-4] if name.endswith(".dap") else name
    res = resources.files(__name__) / f"{stem}.dap"
    if not res.is_file():
        raise ConfigError(f"no bundled program {name!r}; available: {', '.join(corpus_names())}")
    return res.read_text(encoding="utf-8")
