"""Experiment manifests, versioned JSON configs and atomic, stamped output files."""

from __future__ import annotations

import csv
import hashlib
import io
import json
import numbers
import os
import tempfile
from dataclasses import dataclass, field, fields
from pathlib import Path
from typing import Any, Iterable

from . import __version__

SCHEMA_VERSION = 1


class ConfigError(ValueError):
    """Malformed configuration; the message names the offending key."""


def _jsonable(obj):
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    if hasattr(obj, "tolist"):
        return obj.tolist()
    if isinstance(obj, Path):
        return str(obj)
    raise TypeError(f"not serializable: {type(obj).__name__}")


def canonical_json(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2, default=_jsonable, allow_nan=True) + "\n"


@dataclass
class ExperimentManifest:
    command: str
    config: dict
    seed: int = 0
    config_path: str | None = None
    out_dir: str = "."
    version: str = __version__

    def identity(self) -> dict:
        # the output directory is where results go, not what they are
        return {"command": self.command, "config": self.config, "seed": self.seed, "version": self.version}

    @property
    def hash(self) -> str:
        return hashlib.sha256(canonical_json(self.identity()).encode()).hexdigest()[:16]

    def stamp(self) -> dict:
        return {"manifest_hash": self.hash, "version": self.version, "seed": self.seed}


def parse_override(text: str) -> tuple[list[str], Any]:
    if "=" not in text:
        raise ConfigError(f"override {text!r} is not of the form key=value")
    key, raw = text.split("=", 1)
    try:
        value = json.loads(raw)
    except json.JSONDecodeError:
        value = raw
    return key.strip().split("."), value


def apply_overrides(cfg: dict, overrides: Iterable[str]) -> dict:
    for text in overrides:
        path, value = parse_override(text)
        node = cfg
        for part in path[:-1]:
            if not isinstance(node.get(part), dict):
                node[part] = {}
            node = node[part]
        node[path[-1]] = value
    return cfg


def load_config(path: str | Path | None, overrides: Iterable[str] = ()) -> dict:
    cfg: dict = {}
    if path is not None:
        try:
            cfg = json.loads(Path(path).read_text())
        except FileNotFoundError as exc:
            raise ConfigError(f"config file not found: {path}") from exc
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config is not valid JSON: {exc}") from exc
        if not isinstance(cfg, dict):
            raise ConfigError("config must be a JSON object")
    cfg = apply_overrides(cfg, overrides)
    version = cfg.pop("schema_version", SCHEMA_VERSION)
    if version != SCHEMA_VERSION:
        raise ConfigError(f"schema_version {version!r} is not supported (expected {SCHEMA_VERSION})")
    return cfg


def build_dataclass(cls, cfg: dict, where: str = ""):
    """Instantiate a config dataclass, rejecting unknown keys by name."""
    known = {f.name for f in fields(cls)}
    unknown = sorted(set(cfg) - known)
    if unknown:
        raise ConfigError(f"unknown config key '{where}{unknown[0]}'; allowed: {', '.join(sorted(known))}")
    try:
        return cls(**cfg)
    except TypeError as exc:
        raise ConfigError(str(exc)) from exc


# output ---------------------------------------------------------------------

def atomic_write(path: str | Path, text: str) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        Path(tmp).unlink(missing_ok=True)
        raise


@dataclass
class OutputWriter:
    manifest: ExperimentManifest
    written: list[str] = field(default_factory=list)

    @property
    def root(self) -> Path:
        return Path(self.manifest.out_dir)

    def _header(self) -> str:
        return f"# manifest={self.manifest.hash} version={self.manifest.version} seed={self.manifest.seed}\n"

    def json(self, name: str, payload: dict) -> Path:
        body = {**self.manifest.stamp(), **payload}
        return self._write(name, canonical_json(body))

    def csv(self, name: str, header: list[str], rows: Iterable[Iterable]) -> Path:
        buf = io.StringIO()
        buf.write(self._header())
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([_fmt(v) for v in row])
        return self._write(name, buf.getvalue())

    def dat(self, name: str, columns: tuple[str, str], xs, ys) -> Path:
        lines = [self._header().rstrip("\n"), f"# {columns[0]} {columns[1]}"]
        lines += [f"{_fmt(x)} {_fmt(y)}" for x, y in zip(xs, ys)]
        return self._write(name, "\n".join(lines) + "\n")

    def text(self, name: str, body: str) -> Path:
        return self._write(name, self._header() + body)

    def timing(self, seconds: float) -> Path:
        # wall time lives apart from the data files so those stay reproducible
        return self._write("timing.json", canonical_json({"manifest_hash": self.manifest.hash, "wall_time_s": seconds}))

    def _write(self, name: str, text: str) -> Path:
        path = self.root / name
        atomic_write(path, text)
        self.written.append(name)
        return path


def _fmt(v) -> str:
    if isinstance(v, bool):
        return str(v)
    if isinstance(v, numbers.Integral):
        return str(int(v))
    if isinstance(v, numbers.Real):
        return repr(float(v))
    return str(v)
