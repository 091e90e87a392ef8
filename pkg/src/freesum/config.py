"""Flat ``subcommand.key = value`` configuration files.

Blank lines and lines starting with ``#`` are ignored.  Keys use the long
option name of the subcommand with dashes or underscores, e.g.
``clt.resolution = 8192``.  Unknown subcommands or keys are rejected.
"""
from __future__ import annotations

from pathlib import Path

from .errors import ConfigError


def parse(text: str, source: str = "<config>") -> dict[str, dict[str, str]]:
    """Split a config text into ``{subcommand: {key: raw value}}``."""
    out: dict[str, dict[str, str]] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ConfigError(f"{source}:{lineno}: expected 'subcommand.key = value'")
        key, value = (s.strip() for s in line.split("=", 1))
        sub, dot, name = key.partition(".")
        if not dot or not sub or not name:
            raise ConfigError(f"{source}:{lineno}: key {key!r} is not namespaced as subcommand.key")
        name = name.replace("-", "_")
        section = out.setdefault(sub, {})
        if name in section:
            raise ConfigError(f"{source}:{lineno}: duplicate key {key!r}")
        section[name] = value
    return out


def load(path) -> dict[str, dict[str, str]]:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    return parse(text, str(path))


def resolve(section: dict[str, str], allowed: dict, where: str) -> dict:
    """Convert raw values with ``allowed[key]`` (a callable); unknown keys raise."""
    unknown = sorted(set(section) - set(allowed))
    if unknown:
        raise ConfigError(f"unknown key(s) for {where}: {', '.join(unknown)}")
    out = {}
    for key, raw in section.items():
        try:
            out[key] = allowed[key](raw)
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"{where}.{key}: cannot parse {raw!r}: {exc}") from None
    return out
