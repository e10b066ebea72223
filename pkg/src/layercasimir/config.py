"""TOML run configuration.

Layout::

    [plate.left]            # type = "phase" (Rp, Rs) or "halfspace"
    type = "phase"
    Rp = 1.0
    Rs = -1.0

    [plate.right]
    type = "halfspace"
    [plate.right.substrate] # a material table
    type = "constant"
    eps_inf = 2.25
    [[plate.right.coating]] # optional, gap-facing coating first
    type = "vacuum"
    d = 1e-8

    [[layer]]               # medium layers, left plate to right plate
    type = "vacuum"         # "vacuum" | "constant" | "oscillator"
    d = 1e-6

    [quadrature]            # optional: rel_tol, abs_floor, max_levels, xi_scale
    [task]                  # optional: kind, target, values, output, format

Material tables use ``eps_inf``, ``mu_inf`` (constant) or ``terms`` and
``mu_terms``, lists of ``{wp2, w0, gamma}`` (oscillator).  Lengths are in
meters and frequencies in rad/s.
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Union

from .errors import ParseError, ValidationError
from .fresnel import CoatedHalfSpace, Layer, PhaseReflector
from .kernel import SystemConfig
from .materials import Constant, Oscillator, OscillatorSum, Vacuum
from .quadrature import QuadratureSpec

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

__all__ = ["RunConfig", "Sweep", "load_config", "parse_config", "TASKS", "FORMATS"]

TASKS = ("compute", "sweep", "check")
FORMATS = ("table", "csv")


@dataclass(frozen=True)
class Sweep:
    """1-D scan; ``target`` is "d1", "dn" or a 1-based layer index."""

    target: Union[str, int]
    values: tuple[float, ...]

    def layer_index(self, n: int) -> int:
        """0-based index of the swept layer in a medium of ``n`` layers."""
        if self.target == "d1":
            return 0
        if self.target == "dn":
            return n - 1
        return int(self.target) - 1


@dataclass(frozen=True)
class RunConfig:
    system: SystemConfig
    quadrature: QuadratureSpec
    task: str = "compute"
    sweep: Optional[Sweep] = None
    output_path: Optional[str] = None
    output_format: Optional[str] = None  # None: csv for sweeps, table otherwise


class _Lines:
    """Maps table paths to source line numbers for error messages."""

    def __init__(self, text: str, source: str):
        self.source = source
        self.headers = []  # (line number, header name, is_array)
        for no, line in enumerate(text.splitlines(), start=1):
            m = re.match(r"\s*(\[\[?)\s*([A-Za-z0-9_.\s\"]+?)\s*\]\]?", line)
            if m:
                name = re.sub(r"[\s\"]", "", m.group(2))
                self.headers.append((no, name, m.group(1) == "[["))
        self.lines = text.splitlines()

    def header_line(self, name: str, occurrence: int = 0) -> Optional[int]:
        hits = [no for no, h, _ in self.headers if h == name]
        return hits[occurrence] if occurrence < len(hits) else None

    def key_line(self, name: str, key: str, occurrence: int = 0) -> Optional[int]:
        return self.key_after(self.header_line(name, occurrence), key)

    def key_after(self, start: Optional[int], key: str) -> Optional[int]:
        """Line of ``key`` in the table whose header is on line ``start``."""
        if start is None:
            return None
        ends = [no for no, _, _ in self.headers if no > start]
        end = ends[0] if ends else len(self.lines) + 1
        for no in range(start + 1, end):
            if re.match(rf"\s*{re.escape(key)}\s*=", self.lines[no - 1]):
                return no
        return start

    def where(self, line: Optional[int]) -> str:
        return f"{self.source}:{line}" if line else self.source


def _fail(loc: _Lines, line, field: str, msg: str):
    raise ValidationError(f"{loc.where(line)}: {field}: {msg}")


def _number(table, key, loc, line, field, default=None):
    if key not in table:
        if default is None:
            _fail(loc, line, field, f"missing required key '{key}'")
        return default
    v = table[key]
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        _fail(loc, line, f"{field}.{key}", f"expected a number, got {v!r}")
    v = float(v)
    if not math.isfinite(v):
        _fail(loc, line, f"{field}.{key}", "must be finite")
    return v


def _check_keys(table, allowed, loc, line, field):
    extra = sorted(set(table) - set(allowed))
    if extra:
        _fail(loc, line, field, f"unknown key(s) {', '.join(extra)}")


def _oscillators(items, loc, line, field):
    if not isinstance(items, list):
        _fail(loc, line, field, "expected a list of {wp2, w0, gamma} tables")
    out = []
    for i, t in enumerate(items):
        f = f"{field}[{i}]"
        if not isinstance(t, dict):
            _fail(loc, line, f, "expected a table")
        _check_keys(t, ("wp2", "w0", "gamma"), loc, line, f)
        try:
            out.append(Oscillator(_number(t, "wp2", loc, line, f),
                                  _number(t, "w0", loc, line, f, 0.0),
                                  _number(t, "gamma", loc, line, f, 0.0)))
        except ValueError as e:
            if isinstance(e, ValidationError):
                raise
            _fail(loc, line, f, str(e))
    return tuple(out)


_MATERIAL_KEYS = ("type", "eps_inf", "mu_inf", "terms", "mu_terms")


def _material(table, loc, line, field):
    kind = table.get("type")
    if kind == "vacuum":
        _check_keys(table, ("type",), loc, line, field)
        return Vacuum()
    if kind == "constant":
        _check_keys(table, ("type", "eps_inf", "mu_inf"), loc, line, field)
        eps = _number(table, "eps_inf", loc, line, field)
        mu = _number(table, "mu_inf", loc, line, field, 1.0)
        for key, v in (("eps_inf", eps), ("mu_inf", mu)):
            if v < 1.0:
                _fail(loc, line, f"{field}.{key}", f"must be >= 1 (passive medium), got {v!r}")
        return Constant(eps, mu)
    if kind == "oscillator":
        _check_keys(table, ("type", "terms", "mu_terms"), loc, line, field)
        return OscillatorSum(_oscillators(table.get("terms", []), loc, line, f"{field}.terms"),
                             _oscillators(table.get("mu_terms", []), loc, line, f"{field}.mu_terms"))
    _fail(loc, line, f"{field}.type", f"expected 'vacuum', 'constant' or 'oscillator', got {kind!r}")


def _layer(table, loc, line, field):
    if not isinstance(table, dict):
        _fail(loc, line, field, "expected a table")
    _check_keys(table, _MATERIAL_KEYS + ("d",), loc, line, field)
    d = _number(table, "d", loc, line, field)
    if d < 0:
        _fail(loc, loc.key_after(line, "d"), f"{field}.d", f"thickness must be >= 0, got {d!r}")
    mat = _material({k: v for k, v in table.items() if k != "d"}, loc, line, field)
    return Layer(mat, d)


def _plate(table, side, loc):
    name = f"plate.{side}"
    line = loc.header_line(name)
    if not isinstance(table, dict):
        _fail(loc, line, name, "missing plate table")
    kind = table.get("type")
    if kind == "phase":
        _check_keys(table, ("type", "Rp", "Rs"), loc, line, name)
        rp = _number(table, "Rp", loc, line, name)
        rs = _number(table, "Rs", loc, line, name)
        for key, v in (("Rp", rp), ("Rs", rs)):
            if not -1.0 <= v <= 1.0:
                _fail(loc, loc.key_line(name, key), f"{name}.{key}", f"must lie in [-1, 1], got {v!r}")
        return PhaseReflector(rp, rs)
    if kind == "halfspace":
        _check_keys(table, ("type", "substrate", "coating"), loc, line, name)
        sub = table.get("substrate")
        if not isinstance(sub, dict):
            _fail(loc, line, f"{name}.substrate", "missing substrate material table")
        substrate = _material(sub, loc, loc.header_line(f"{name}.substrate") or line, f"{name}.substrate")
        coatings = []
        for i, t in enumerate(table.get("coating", [])):
            cl = loc.header_line(f"{name}.coating", i) or line
            coatings.append(_layer(t, loc, cl, f"{name}.coating[{i}]"))
        return CoatedHalfSpace(tuple(coatings), substrate)
    _fail(loc, line, f"{name}.type", f"expected 'phase' or 'halfspace', got {kind!r}")


def _quadrature(table, loc):
    line = loc.header_line("quadrature")
    if not isinstance(table, dict):
        _fail(loc, line, "quadrature", "expected a table")
    _check_keys(table, ("rel_tol", "abs_floor", "max_levels", "xi_scale"), loc, line, "quadrature")
    kw = {}
    for key in ("rel_tol", "abs_floor", "xi_scale"):
        if key in table:
            kw[key] = _number(table, key, loc, loc.key_line("quadrature", key), "quadrature")
    if "max_levels" in table:
        v = table["max_levels"]
        if isinstance(v, bool) or not isinstance(v, int):
            _fail(loc, loc.key_line("quadrature", "max_levels"), "quadrature.max_levels", "expected an integer")
        kw["max_levels"] = v
    try:
        return QuadratureSpec(**kw)
    except ValueError as e:
        _fail(loc, line, "quadrature", str(e))


def _task(table, loc, n):
    line = loc.header_line("task")
    _check_keys(table, ("kind", "target", "values", "output", "format"), loc, line, "task")
    kind = table.get("kind", "compute")
    if kind not in TASKS:
        _fail(loc, loc.key_line("task", "kind"), "task.kind", f"expected one of {TASKS}, got {kind!r}")
    fmt = table.get("format")
    if fmt is not None and fmt not in FORMATS:
        _fail(loc, loc.key_line("task", "format"), "task.format", f"expected one of {FORMATS}, got {fmt!r}")
    out = table.get("output")
    if out is not None and not isinstance(out, str):
        _fail(loc, loc.key_line("task", "output"), "task.output", "expected a path string")
    sweep = None
    if "target" in table or "values" in table:
        sweep = _sweep(table, loc, n)
    elif kind == "sweep":
        _fail(loc, line, "task", "sweep needs 'target' and 'values'")
    return kind, sweep, out, fmt


def _sweep(table, loc, n):
    target = table.get("target")
    tline = loc.key_line("task", "target")
    if isinstance(target, bool) or not (target in ("d1", "dn") or isinstance(target, int)):
        _fail(loc, tline, "task.target", f"expected 'd1', 'dn' or a layer index, got {target!r}")
    if isinstance(target, int) and not 1 <= target <= n:
        _fail(loc, tline, "task.target", f"layer index {target} outside 1..{n}")
    vline = loc.key_line("task", "values")
    values = table.get("values")
    if not isinstance(values, list) or not values:
        _fail(loc, vline, "task.values", "expected a non-empty list of thicknesses")
    vals = []
    for i, v in enumerate(values):
        if isinstance(v, bool) or not isinstance(v, (int, float)) or not math.isfinite(v) or v <= 0:
            _fail(loc, vline, f"task.values[{i}]", f"must be a positive number, got {v!r}")
        vals.append(float(v))
    if any(b <= a for a, b in zip(vals, vals[1:])):
        _fail(loc, vline, "task.values", "must be strictly increasing")
    return Sweep(target, tuple(vals))


def parse_config(text: str, source: str = "<config>") -> RunConfig:
    """Parse and validate configuration text."""
    try:
        doc = tomllib.loads(text)
    except tomllib.TOMLDecodeError as e:
        raise ParseError(f"{source}: {e}") from None
    loc = _Lines(text, source)
    _check_keys(doc, ("plate", "layer", "quadrature", "task"), loc, None, "top level")
    plates = doc.get("plate")
    if not isinstance(plates, dict):
        _fail(loc, None, "plate", "missing [plate.left] and [plate.right]")
    _check_keys(plates, ("left", "right"), loc, None, "plate")
    left = _plate(plates.get("left"), "left", loc)
    right = _plate(plates.get("right"), "right", loc)
    layers = doc.get("layer")
    if not isinstance(layers, list) or not layers:
        _fail(loc, None, "layer", "the medium needs at least one [[layer]]")
    medium = tuple(_layer(t, loc, loc.header_line("layer", i), f"layer[{i + 1}]")
                   for i, t in enumerate(layers))
    for i in (0, len(medium) - 1):
        if not medium[i].d > 0:
            _fail(loc, loc.key_line("layer", "d", i), f"layer[{i + 1}].d",
                  "the layers touching the plates must have d > 0")
    spec = _quadrature(doc.get("quadrature", {}), loc)
    kind, sweep, out, fmt = _task(doc.get("task", {}), loc, len(medium))
    return RunConfig(SystemConfig(left, medium, right), spec, kind, sweep, out, fmt)


def load_config(path) -> RunConfig:
    """Read and validate a TOML run configuration.

    Raises
    ------
    ParseError
        The file is missing or not valid TOML.
    ValidationError
        A value violates an invariant; the message names the file line and field.
    """
    p = Path(path)
    try:
        text = p.read_text(encoding="utf-8")
    except OSError as e:
        raise ParseError(f"{p}: {e.strerror or e}") from None
    return parse_config(text, str(p))
