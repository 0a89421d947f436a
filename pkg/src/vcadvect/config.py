"""Run configuration: plain ``key=value`` files with command-line overrides."""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass, fields
from pathlib import Path
from typing import Mapping

from .cases import CaseId, make_case
from .nodes import MAX_DEGREE
from .sbp import FD_ORDERS, fd_min_nodes
from .semidisc import FluxKind, Sampling, SchemeConfig, VolumeForm


class ConfigError(ValueError):
    """Invalid configuration; ``key`` names the offending entry when known."""

    def __init__(self, message: str, key: str | None = None):
        super().__init__(message)
        self.key = key


@dataclass(frozen=True)
class RunConfig:
    case: str
    variant: str = "default"
    basis: str = "gl"
    N: int = 3
    K: int = 40
    flux: str = "split_upwind"
    form: str = "split"
    t_final: float = 1.0
    steps: int | None = None  # None: derive from cfl
    cfl: float = 0.5
    samples: int = 201
    output: str | None = None
    diagnostics: bool = True
    fd_order: int = 4
    fd_nodes: int = 100
    dissipation: float | None = None
    sampling: str = "lobatto"

    def __post_init__(self):
        try:
            CaseId(self.case)
        except ValueError:
            raise ConfigError(f"unknown case {self.case!r}", "case") from None
        for key, enum_type in (("flux", FluxKind), ("form", VolumeForm), ("sampling", Sampling)):
            try:
                enum_type(getattr(self, key))
            except ValueError:
                choices = ", ".join(m.value for m in enum_type)
                raise ConfigError(f"{key} must be one of {choices}", key) from None
        if self.basis not in ("gl", "gll", "fd"):
            raise ConfigError("basis must be one of gl, gll, fd", "basis")
        if not (self.basis == "gll" and 1 <= self.N or self.basis != "gll" and 0 <= self.N):
            raise ConfigError(f"N={self.N} is too small for basis {self.basis}", "N")
        if self.N > MAX_DEGREE:
            raise ConfigError(f"N must not exceed {MAX_DEGREE}", "N")
        if self.K < 1:
            raise ConfigError("K must be at least 1", "K")
        if not self.t_final > 0:
            raise ConfigError("t_final must be positive", "t_final")
        if self.steps is not None and self.steps < 1:
            raise ConfigError("steps must be at least 1", "steps")
        if not self.cfl > 0:
            raise ConfigError("cfl must be positive", "cfl")
        if self.samples < 2:
            raise ConfigError("samples must be at least 2", "samples")
        if self.fd_order not in FD_ORDERS:
            raise ConfigError(f"fd_order must be one of {FD_ORDERS}", "fd_order")
        if self.fd_nodes < fd_min_nodes(self.fd_order):
            raise ConfigError(
                f"fd_nodes must be at least {fd_min_nodes(self.fd_order)}", "fd_nodes"
            )
        if self.dissipation is not None:
            if self.basis != "fd":
                raise ConfigError("dissipation is only available for basis=fd", "dissipation")
            if self.dissipation < 0:
                raise ConfigError("dissipation must be nonnegative", "dissipation")
        try:
            make_case(self.case, self.variant)
        except ValueError as exc:
            raise ConfigError(str(exc), "variant") from None

    def scheme(self) -> SchemeConfig:
        return SchemeConfig(
            basis=self.basis, N=self.N, flux=self.flux, volume_form=self.form,
            fd_order=self.fd_order, fd_nodes=self.fd_nodes, dissipation=self.dissipation,
            sampling=self.sampling,
        )

    def test_case(self):
        return make_case(self.case, self.variant)

    def replace(self, **changes) -> RunConfig:
        return dataclasses.replace(self, **changes)

    def items(self):
        """``(key, text)`` pairs in declaration order, round-trippable by :func:`parse_value`."""
        for f in fields(self):
            yield f.name, format_value(getattr(self, f.name))


CONFIG_KEYS = tuple(f.name for f in fields(RunConfig))
_TYPES = {
    "case": str, "variant": str, "basis": str, "N": int, "K": int, "flux": str, "form": str,
    "t_final": float, "steps": (int, None), "cfl": float, "samples": int,
    "output": (str, None), "diagnostics": bool, "fd_order": int, "fd_nodes": int,
    "dissipation": (float, None), "sampling": str,
}
_TRUE = {"true", "yes", "on", "1"}
_FALSE = {"false", "no", "off", "0"}


def format_value(value) -> str:
    if value is None:
        return "none"
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return f"{value:.17g}"
    return str(value)


def parse_value(key: str, text: str):
    if key not in _TYPES:
        raise ConfigError(f"unknown key {key!r}", key)
    kind = _TYPES[key]
    text = text.strip()
    if isinstance(kind, tuple):
        if text.lower() in ("none", ""):
            return None
        kind = kind[0]
    try:
        if kind is bool:
            low = text.lower()
            if low in _TRUE:
                return True
            if low in _FALSE:
                return False
            raise ValueError(text)
        if kind is int:
            f = float(text)
            if not f.is_integer():
                raise ValueError(text)
            return int(f)
        return kind(text)
    except ValueError:
        raise ConfigError(f"bad value {text!r} for key {key!r}", key) from None


def parse_lines(lines) -> dict[str, str]:
    """Collect ``key=value`` pairs from config text or an output CSV's metadata.

    Blank lines and ``#`` comments are skipped, except ``# config: key=value``
    lines, which carry the configuration of an earlier run.
    """
    raw: dict[str, str] = {}
    for lineno, line in enumerate(lines, 1):
        line = line.strip()
        if line.startswith("# config:"):
            line = line[len("# config:"):].strip()
        elif not line or line.startswith("#"):
            continue
        for token in line.split():
            if "=" not in token:
                raise ConfigError(f"line {lineno}: expected key=value, got {token!r}")
            key, value = token.split("=", 1)
            if key not in _TYPES:
                raise ConfigError(f"unknown key {key!r}", key)
            raw[key] = value
    return raw


def _read_source(path: Path) -> list[str]:
    text = path.read_text()
    if path.suffix == ".csv":
        # only the metadata block of an output file is configuration
        return [ln for ln in text.splitlines() if ln.startswith("# config:")]
    return text.splitlines()


def parse_config(
    path: str | Path | None = None, overrides: Mapping[str, object] | None = None
) -> RunConfig:
    """Build a :class:`RunConfig` from a file and/or overrides (overrides win).

    Override values may be strings (parsed like file values) or typed values.
    """
    raw: dict[str, object] = {}
    if path is not None:
        try:
            lines = _read_source(Path(path))
        except OSError as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from None
        raw.update(parse_lines(lines))
    for key, value in (overrides or {}).items():
        if value is None:
            continue
        if key not in _TYPES:
            raise ConfigError(f"unknown key {key!r}", key)
        raw[key] = value
    values = {k: parse_value(k, v) if isinstance(v, str) else v for k, v in raw.items()}
    if "case" not in values:
        raise ConfigError("missing required key 'case'", "case")
    return RunConfig(**values)
