"""Domain and run configuration files.

Both use one ``key = value`` pair per line; ``#`` starts a comment and
blank lines are ignored. A domain file looks like::

    # ellipse with half axes 2 and 1
    kind = ellipse
    a = 2
    b = 1
    phi = 0
    center = 0, 0
    n = 256

Keys per kind:

==========  ==================================================
circle      radius, center
ellipse     a, b, phi, center
kite        scale
star        c0, amp, fold
custom      x_cos, x_sin, y_cos, y_sin (comma separated lists)
==========  ==================================================

``n`` (even, >= 16) is accepted for every kind. Errors cite the line and
key.
"""

from __future__ import annotations

from dataclasses import dataclass, fields

from .errors import ConfigError
from .geometry import BoundaryCurve, Ellipse, FourierCurve, Kite, Star

__all__ = [
    "DomainConfig",
    "RunConfig",
    "parse_domain",
    "load_domain",
    "serialize_domain",
    "parse_run",
    "serialize_run",
    "DEFAULT_N",
]

DEFAULT_N = 256

_SCHEMA = {
    "circle": {"radius": ("float", 1.0), "center": ("point", (0.0, 0.0))},
    "ellipse": {"a": ("float", None), "b": ("float", None), "phi": ("float", 0.0),
                "center": ("point", (0.0, 0.0))},
    "kite": {"scale": ("float", 1.0)},
    "star": {"c0": ("float", 1.0), "amp": ("float", 0.3), "fold": ("int", 3)},
    "custom": {"x_cos": ("list", None), "x_sin": ("list", None),
               "y_cos": ("list", None), "y_sin": ("list", None)},
}


def _pairs(text):
    """Yield ``(line_number, key, value)``; duplicate keys are errors."""
    seen = {}
    for i, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError("expected 'key = value'", line=i)
        key, value = (s.strip() for s in line.split("=", 1))
        if not key:
            raise ConfigError("empty key", line=i)
        if key in seen:
            raise ConfigError(f"duplicate key (first on line {seen[key]})", line=i, key=key)
        seen[key] = i
        yield i, key, value


def _convert(kind, value, line, key):
    try:
        if kind == "float":
            return float(value)
        if kind == "int":
            f = float(value)
            if f != int(f):
                raise ValueError
            return int(f)
        if kind == "point":
            parts = [float(v) for v in value.split(",")]
            if len(parts) != 2:
                raise ValueError
            return tuple(parts)
        if kind == "list":
            parts = tuple(float(v) for v in value.split(",") if v.strip())
            if not parts:
                raise ValueError
            return parts
    except ValueError:
        raise ConfigError(f"cannot read {value!r} as {kind}", line=line, key=key) from None
    raise AssertionError(kind)  # pragma: no cover


def _fmt(value):
    if isinstance(value, tuple):
        return ", ".join(repr(float(v)) for v in value)
    if isinstance(value, float):
        return repr(value)
    return str(value)


@dataclass(frozen=True)
class DomainConfig:
    """A parsed domain file."""

    kind: str
    params: tuple  # sorted (key, value) pairs, hashable and ordered
    n: int = DEFAULT_N

    def param(self, key):
        return dict(self.params)[key]

    def curve(self) -> BoundaryCurve:
        p = dict(self.params)
        if self.kind == "circle":
            r = p["radius"]
            return Ellipse(r, r, 0.0, p["center"])
        if self.kind == "ellipse":
            return Ellipse(p["a"], p["b"], p["phi"], p["center"])
        if self.kind == "kite":
            return Kite(p["scale"])
        if self.kind == "star":
            return Star(p["c0"], p["amp"], p["fold"])
        return FourierCurve(p["x_cos"], p["x_sin"], p["y_cos"], p["y_sin"])

    @classmethod
    def make(cls, kind, n=DEFAULT_N, **params):
        """Build a config from keyword parameters, filling defaults."""
        lines = [f"kind = {kind}", f"n = {n}"] + [f"{k} = {_fmt(v)}" for k, v in params.items()]
        return parse_domain("\n".join(lines))


def parse_domain(text: str) -> DomainConfig:
    """Parse a domain file.

    Raises
    ------
    ConfigError
        On syntax errors, unknown or missing keys and invalid values.
    """
    items = list(_pairs(text))
    where = {key: line for line, key, _ in items}
    values = {key: value for _, key, value in items}
    if "kind" not in values:
        raise ConfigError("missing required key", key="kind")
    kind = values.pop("kind")
    if kind not in _SCHEMA:
        raise ConfigError(f"unknown domain kind {kind!r} (expected one of "
                          f"{', '.join(sorted(_SCHEMA))})", line=where["kind"], key="kind")
    n = DEFAULT_N
    if "n" in values:
        n = _convert("int", values.pop("n"), where["n"], "n")
        if n < 16 or n % 2:
            raise ConfigError("n must be an even integer >= 16", line=where["n"], key="n")
    schema = _SCHEMA[kind]
    params = {}
    for key, value in values.items():
        if key not in schema:
            raise ConfigError(f"not a parameter of kind {kind!r}", line=where[key], key=key)
        params[key] = _convert(schema[key][0], value, where[key], key)
    for key, (_, default) in schema.items():
        if key not in params:
            if default is None:
                raise ConfigError(f"missing required parameter of kind {kind!r}", key=key)
            params[key] = default
    cfg = DomainConfig(kind, tuple(sorted(params.items())), n)
    try:
        cfg.curve()
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    return cfg


def load_domain(path) -> DomainConfig:
    try:
        with open(path) as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read domain file {path}: {exc.strerror}") from None
    return parse_domain(text)


def serialize_domain(cfg: DomainConfig) -> str:
    lines = [f"kind = {cfg.kind}"]
    lines += [f"{k} = {_fmt(v)}" for k, v in cfg.params]
    lines.append(f"n = {cfg.n}")
    return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class RunConfig:
    """Everything that determines one CLI run.

    ``mu`` and ``mu_grid`` are kept as strings so a run file reproduces the
    exact command line values.
    """

    command: str
    domain: str = ""
    mu: str = ""
    mu_grid: str = ""
    n: int = 0  # 0: use the domain file
    method: str = "auto"
    guard: float = 1e-6
    tol: float = 1e-6
    max_poles: int = 6
    samples: str = ""
    tensor: str = ""
    output: str = ""
    format: str = "csv"
    figure: str = ""
    strict: bool = False


_RUN_TYPES = {f.name: f.type for f in fields(RunConfig)}


def serialize_run(cfg: RunConfig) -> str:
    lines = []
    for f in fields(RunConfig):
        v = getattr(cfg, f.name)
        lines.append(f"{f.name} = {_fmt(v)}")
    return "\n".join(lines) + "\n"


def parse_run(text: str) -> RunConfig:
    kw = {}
    for line, key, value in _pairs(text):
        if key not in _RUN_TYPES:
            raise ConfigError("unknown run option", line=line, key=key)
        t = _RUN_TYPES[key]
        if t == "int":
            kw[key] = _convert("int", value, line, key)
        elif t == "float":
            kw[key] = _convert("float", value, line, key)
        elif t == "bool":
            if value not in ("True", "False"):
                raise ConfigError(f"expected True or False, got {value!r}", line=line, key=key)
            kw[key] = value == "True"
        else:
            kw[key] = value
    if "command" not in kw:
        raise ConfigError("missing required key", key="command")
    return RunConfig(**kw)
