"""Scenario configuration files.

A scenario is a line-oriented ``key = value`` file::

    omega = 1
    Lambda = harmonic 0.7 0.9 pi
    c = const 0.1
    init.xi_1 = 2, 0.2, 0.5
    t_end = 200

Coefficient values use the grammar ``const <v>``, ``harmonic <base> <amp>
<phase>`` or ``sampled <file.csv>`` (one value per line on a uniform grid
over ``[0, omega)``). Numbers may be written with ``pi`` (``pi``, ``-pi``,
``0.5*pi``, ``pi/2``).
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

from .errors import ParseError, ValidationError
from .model import Coefficients
from .periodic import Constant, Harmonic, PeriodicFn, Sampled

COEFFICIENT_KEYS = ("Lambda", "beta", "mu", "c", "eta", "k", "r", "b")
_ALIASES = {"Λ": "Lambda", "lambda": "Lambda", "β": "beta", "μ": "mu", "η": "eta"}
SCALAR_KEYS = ("omega", "t_end", "dt")
BUNDLED = ("paper_gamma045.cfg", "paper_gamma060.cfg")

_PI = re.compile(r"^([+-]?)(?:(\d+(?:\.\d*)?|\.\d+)\*?)?pi(?:/(\d+(?:\.\d*)?))?$")


def parse_number(tok: str) -> float:
    tok = tok.strip()
    m = _PI.match(tok)
    if m:
        sign, coef, den = m.groups()
        v = math.pi * (float(coef) if coef else 1.0) / (float(den) if den else 1.0)
        return -v if sign == "-" else v
    v = float(tok)
    if not math.isfinite(v):
        raise ValueError(f"non-finite number {tok!r}")
    return v


@dataclass(frozen=True)
class CoefSpec:
    kind: str  # const | harmonic | sampled
    args: tuple = ()
    path: str | None = None
    values: tuple | None = field(default=None, compare=False)

    def build(self, omega: float) -> PeriodicFn:
        if self.kind == "const":
            return Constant(self.args[0], omega)
        if self.kind == "harmonic":
            return Harmonic(*self.args, period=omega)
        return Sampled(self.values, omega, source=self.path)

    def emit(self) -> str:
        if self.kind == "sampled":
            return f"sampled {self.path}"
        return " ".join([self.kind] + [repr(float(a)) for a in self.args])


@dataclass
class Scenario:
    specs: dict
    omega: float = 1.0
    inits: dict = field(default_factory=dict)
    t_end: float | None = None
    dt: float | None = None
    outputs: dict = field(default_factory=dict)
    source: str | None = field(default=None, compare=False)

    def __post_init__(self):
        self._coefficients = None

    @property
    def coefficients(self) -> Coefficients:
        if self._coefficients is None:
            self._coefficients = Coefficients(
                **{k: self.specs[k].build(self.omega) for k in COEFFICIENT_KEYS})
        return self._coefficients

    @property
    def horizon(self) -> float:
        return self.t_end if self.t_end is not None else 200.0 * self.omega

    @property
    def sample_dt(self) -> float:
        return self.dt if self.dt is not None else self.omega / 200.0

    def emit(self) -> str:
        lines = [f"omega = {self.omega!r}"]
        lines += [f"{k} = {self.specs[k].emit()}" for k in COEFFICIENT_KEYS]
        for name, x in self.inits.items():
            lines.append(f"init.{name} = " + ", ".join(repr(float(v)) for v in x))
        if self.t_end is not None:
            lines.append(f"t_end = {self.t_end!r}")
        if self.dt is not None:
            lines.append(f"dt = {self.dt!r}")
        for name, path in self.outputs.items():
            lines.append(f"output.{name} = {path}")
        return "\n".join(lines) + "\n"


def _read_sampled(path: Path) -> tuple:
    vals = []
    for raw in path.read_text().splitlines():
        raw = raw.strip()
        if raw and not raw.startswith("#"):
            vals.append(float(raw.split(",")[0]))
    return tuple(vals)


def parse_config(text: str, base_dir: str | Path | None = None, strict: bool = False,
                 source: str | None = None) -> Scenario:
    """Parse and validate a scenario.

    Syntax problems are collected and raised together as :class:`ParseError`;
    a syntactically complete scenario violating the model conditions raises
    :class:`ValidationError`.
    """
    base = Path(base_dir) if base_dir is not None else Path.cwd()
    errors = []
    specs, inits, outputs, scalars = {}, {}, {}, {}
    seen = {}
    nlines = 0
    for ln, raw in enumerate(text.splitlines(), start=1):
        nlines = ln
        line = raw.split("#", 1)[0].rstrip()
        if not line.strip():
            continue
        indent = len(line) - len(line.lstrip())
        if "=" not in line:
            errors.append((ln, indent + 1, "expected 'key = value'"))
            continue
        key_part, val_part = line.split("=", 1)
        key = _ALIASES.get(key_part.strip(), key_part.strip())
        vcol = len(key_part) + 2 + (len(val_part) - len(val_part.lstrip()))
        value = val_part.strip()
        if key in seen:
            errors.append((ln, indent + 1, f"duplicate key {key!r} (first on line {seen[key]})"))
            continue
        seen[key] = ln
        try:
            if key in COEFFICIENT_KEYS:
                specs[key] = _parse_coef(value, base)
            elif key in SCALAR_KEYS:
                scalars[key] = parse_number(value)
            elif key.startswith("init."):
                name = key[5:]
                if not re.fullmatch(r"[A-Za-z_][\w\-]*", name):
                    raise ValueError(f"invalid initial-condition name {name!r}")
                parts = [p for p in re.split(r"[,\s]+", value) if p]
                if len(parts) != 3:
                    raise ValueError("initial condition needs three values S, I, Y")
                inits[name] = tuple(parse_number(p) for p in parts)
            elif key.startswith("output."):
                outputs[key[7:]] = value
            else:
                errors.append((ln, indent + 1, f"unknown key {key!r}"))
        except (ValueError, OSError) as exc:
            errors.append((ln, vcol, str(exc)))
    missing = [k for k in COEFFICIENT_KEYS if k not in specs]
    for k in missing:
        errors.append((nlines + 1, 1, f"missing coefficient {k!r}"))
    if errors:
        raise ParseError(errors)
    omega = scalars.get("omega", 1.0)
    if not omega > 0:
        raise ValidationError(f"omega must be positive, got {omega}")
    for name, x in inits.items():
        if min(x) < 0:
            raise ValidationError(f"initial condition {name!r} leaves the nonnegative cone")
    for key in ("t_end", "dt"):
        if key in scalars and not scalars[key] > 0:
            raise ValidationError(f"{key} must be positive")
    sc = Scenario(specs, omega, inits, scalars.get("t_end"), scalars.get("dt"), outputs, source)
    sc.coefficients.check(strict=strict)
    return sc


def _parse_coef(value: str, base: Path) -> CoefSpec:
    toks = value.split()
    if not toks:
        raise ValueError("empty coefficient specification")
    kind = toks[0]
    if kind == "const":
        if len(toks) != 2:
            raise ValueError("usage: const <value>")
        return CoefSpec("const", (parse_number(toks[1]),))
    if kind == "harmonic":
        if len(toks) != 4:
            raise ValueError("usage: harmonic <base> <amp> <phase>")
        return CoefSpec("harmonic", tuple(parse_number(t) for t in toks[1:]))
    if kind == "sampled":
        if len(toks) != 2:
            raise ValueError("usage: sampled <file.csv>")
        path = Path(toks[1])
        full = path if path.is_absolute() else base / path
        vals = _read_sampled(full)
        if len(vals) < 3:
            raise ValueError(f"{toks[1]}: need at least 3 samples")
        return CoefSpec("sampled", (), toks[1], vals)
    raise ValueError(f"unknown coefficient form {kind!r}; expected const, harmonic or sampled")


def resolve_config(path: str | Path) -> Path:
    """Return ``path`` if it exists, else the bundled scenario of that name."""
    p = Path(path)
    if p.exists():
        return p
    if p.name in BUNDLED:
        return Path(str(resources.files("ecoepi") / "data" / p.name))
    raise FileNotFoundError(f"config file not found: {path}")


def load_config(path: str | Path, strict: bool = False) -> Scenario:
    p = resolve_config(path)
    return parse_config(p.read_text(), base_dir=p.parent, strict=strict, source=str(p))
