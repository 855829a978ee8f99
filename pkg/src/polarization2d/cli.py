"""Command-line driver.

::

    polarization2d compute  --domain D --mu MU
    polarization2d sweep    --domain D --mu-grid START:STOP:COUNT
    polarization2d spectrum --domain D
    polarization2d measures --domain D
    polarization2d fit      --samples SWEEP.csv --max-poles K
    polarization2d recover-ellipse    --samples SWEEP.csv
    polarization2d equivalent-ellipse (--tensor M11,M12,M22 | --domain D) --mu MU
    polarization2d hs-check --domain D --mu-grid START:STOP:COUNT
    polarization2d oracle   --output FIXTURES.json
    polarization2d run      RUN.cfg

Exit status: 0 success, 2 configuration error, 3 numerical failure (the
error class is named on stderr), 4 near-spectrum warning under
``--strict``.
"""

from __future__ import annotations

import argparse
import dataclasses
import sys

import numpy as np

from . import __version__
from .analysis import hs_check
from .config import DEFAULT_N, RunConfig, load_domain, parse_run
from .errors import ConfigError, NoEquivalentEllipse, PolarizationError
from .pipeline import Problem
from .poltensor import GUARD
from .rational import RationalModel, detect_two_pole, fit_rational
from .shape import equivalent_ellipse, recover_ellipse
from .spectral import cluster_eigenvalues, smooth_coefficients
from .tables import (TENSOR_COLUMNS, Series, read_tensor_csv, tensor_rows, write_plot_data,
                     write_table)

__all__ = ["main", "run", "build_parser", "parse_mu", "parse_grid", "EXIT_OK",
           "EXIT_CONFIG", "EXIT_NUMERICAL", "EXIT_STRICT"]

EXIT_OK, EXIT_CONFIG, EXIT_NUMERICAL, EXIT_STRICT = 0, 2, 3, 4

COMMANDS = ("compute", "sweep", "spectrum", "measures", "fit", "recover-ellipse",
            "equivalent-ellipse", "hs-check", "oracle")


class StrictWarning(Exception):
    """A near-spectrum warning promoted to an error."""


def parse_mu(text):
    """Contrast from ``2``, ``-0.5``, ``1+1j`` or ``1+i``."""
    s = str(text).strip().replace(" ", "")
    if not s:
        raise ConfigError("missing contrast", key="mu")
    if s.endswith("i") and not s.endswith("j"):
        s = s[:-1] + "j"
        if s in ("j", "+j", "-j") or s[-2] in "+-":
            s = s[:-1] + "1j"
    try:
        return complex(s)
    except ValueError:
        raise ConfigError(f"cannot read contrast {text!r}", key="mu") from None


def parse_grid(text):
    """``START:STOP:COUNT`` (inclusive linspace) or a comma separated list."""
    s = str(text).strip()
    if ":" in s:
        parts = s.split(":")
        if len(parts) != 3:
            raise ConfigError("grid must be START:STOP:COUNT", key="mu_grid")
        try:
            start, stop, count = float(parts[0]), float(parts[1]), int(parts[2])
        except ValueError:
            raise ConfigError(f"cannot read grid {text!r}", key="mu_grid") from None
        if count < 1:
            raise ConfigError("grid COUNT must be positive", key="mu_grid")
        return [complex(v) for v in np.linspace(start, stop, count)]
    return [parse_mu(v) for v in s.split(",") if v.strip()]


def _mkey(mu):
    mu = complex(mu)
    return repr(mu.real) if mu.imag == 0 else f"{mu.real!r}{mu.imag:+.17g}j"


# -- command implementations ------------------------------------------------
# Each returns (rows, columns, series, warnings, extra_meta).

def _problem(cfg: RunConfig):
    if not cfg.domain:
        raise ConfigError("this command needs --domain", key="domain")
    dom = load_domain(cfg.domain)
    n = cfg.n or dom.n or DEFAULT_N
    if n < 16 or n % 2:
        raise ConfigError("n must be an even integer >= 16", key="n")
    return Problem(dom.curve(), n), dom


def _mus(cfg):
    if cfg.mu_grid:
        mus = parse_grid(cfg.mu_grid)
    elif cfg.mu:
        mus = [parse_mu(v) for v in cfg.mu.split(",")]
    else:
        raise ConfigError("give --mu or --mu-grid", key="mu")
    if not mus:
        raise ConfigError("empty contrast list", key="mu")
    return mus


def _tensor_series(tensors):
    mu = np.array([t.mu.real for t in tensors])
    out = []
    for name, (i, j) in (("M11", (0, 0)), ("M12", (0, 1)), ("M22", (1, 1))):
        out.append(Series(f"{name}_re", mu, [t.m[i, j].real for t in tensors], "mu_re", f"{name}_re"))
        if any(t.m[i, j].imag != 0 for t in tensors):
            out.append(Series(f"{name}_im", mu, [t.m[i, j].imag for t in tensors], "mu_re",
                              f"{name}_im"))
    return out


def _cmd_tensors(cfg):
    prob, dom = _problem(cfg)
    tensors = [prob.tensor(mu, method=cfg.method, guard=cfg.guard) for mu in _mus(cfg)]
    warnings = [f"mu={_mkey(t.mu)} distance {t.distance:.3g} to the spectrum"
                for t in tensors if t.condition_warning]
    rows = tensor_rows(tensors, prob.n)
    meta = [("domain_kind", dom.kind), ("n", prob.n), ("method", cfg.method),
            ("guard", cfg.guard)]
    return rows, TENSOR_COLUMNS, _tensor_series(tensors), warnings, meta


def _cmd_spectrum(cfg):
    prob, dom = _problem(cfg)
    values = prob.eigenvalues
    tol = max(1e-8, 1e-6 * float(np.max(np.abs(values))))
    clusters = cluster_eigenvalues(values, tol)
    rows = [{"lambda": float(values[c].mean()), "multiplicity": len(c)} for c in clusters]
    # flip so the leading eigenvalues come first
    rows = rows[::-1]
    series = [Series("eigenvalues", np.arange(1, len(values) + 1), values[::-1],
                     "index", "lambda", "points")]
    meta = [("domain_kind", dom.kind), ("n", prob.n), ("cluster_tol", tol)]
    return rows, ("lambda", "multiplicity"), series, [], meta


def _cmd_measures(cfg):
    prob, dom = _problem(cfg)
    sd = prob.spectral
    coef = smooth_coefficients(sd)
    rows = []
    for i, c in enumerate(coef):
        rows.append({"lambda": c.lam, "alpha": float(sd.alpha[i]), "beta": float(sd.beta[i]),
                     "gamma": float(sd.gamma[i]), "r_sq": c.r_sq, "r_neg_sq": c.r_neg_sq,
                     "c": c.c, "c_defined": c.c_defined})
    cols = ("lambda", "alpha", "beta", "gamma", "r_sq", "r_neg_sq", "c", "c_defined")
    series = [Series("alpha", sd.lam, sd.alpha, "lambda", "alpha", "stem"),
              Series("beta", sd.lam, sd.beta, "lambda", "beta", "stem"),
              Series("gamma", sd.lam, sd.gamma, "lambda", "gamma", "stem")]
    meta = [("domain_kind", dom.kind), ("n", prob.n), ("area", sd.area),
            ("cluster_tol", sd.cluster_tol), ("mass_total", float(sd.alpha.sum()))]
    return rows, cols, series, [], meta


def _samples(cfg):
    if not cfg.samples:
        raise ConfigError("this command needs --samples", key="samples")
    return read_tensor_csv(cfg.samples)


def _model_rows(model: RationalModel):
    return [{"pole": float(p), "R11": float(R[0, 0]), "R12": float(R[0, 1]), "R22": float(R[1, 1])}
            for p, R in zip(model.poles, model.residues)]


def _cmd_fit(cfg):
    model = fit_rational(_samples(cfg), cfg.max_poles)
    rows = _model_rows(model)
    series = [Series("R11", model.poles, model.residues[:, 0, 0], "pole", "R11", "stem"),
              Series("R22", model.poles, model.residues[:, 1, 1], "pole", "R22", "stem")]
    meta = [("max_poles", cfg.max_poles), ("n_poles", model.n_poles),
            ("fit_residual", model.fit_residual), ("projection", model.projection)]
    return rows, ("pole", "R11", "R12", "R22"), series, [], meta


_ELLIPSE_COLS = ("a", "b", "phi", "angle_undefined", "area")


def _ellipse_row(e):
    return {"a": e.a, "b": e.b, "phi": e.phi, "angle_undefined": e.angle_undefined,
            "area": e.area}


def _ellipse_series(e):
    t = np.linspace(0, 2 * np.pi, 181)
    c, s = np.cos(e.phi), np.sin(e.phi)
    x = e.a * np.cos(t) * c - e.b * np.sin(t) * s
    y = e.a * np.cos(t) * s + e.b * np.sin(t) * c
    return [Series("ellipse", x, y, "x", "y")]


def _cmd_recover(cfg):
    model = fit_rational(_samples(cfg), min(cfg.max_poles, 2))
    cert = detect_two_pole(model, cfg.tol)
    if cert is None:
        raise NoEquivalentEllipse(
            f"samples carry no two-pole certificate at tol {cfg.tol:g} "
            f"(fit residual {model.fit_residual:.3g} with {model.n_poles} poles)"
        )
    e = recover_ellipse(cert)
    meta = [("tol", cfg.tol), ("lambda", cert.lam), ("r_plus_sq", cert.r_plus_sq),
            ("r_minus_sq", cert.r_minus_sq), ("frame_angle", cert.frame_angle),
            ("constraint_defect", cert.constraint_defect),
            ("fit_residual", model.fit_residual)]
    return [_ellipse_row(e)], _ELLIPSE_COLS, _ellipse_series(e), [], meta


def _cmd_equivalent(cfg):
    mus = _mus(cfg)
    if cfg.tensor:
        try:
            m11, m12, m22 = (float(v) for v in cfg.tensor.split(","))
        except ValueError:
            raise ConfigError("tensor must be M11,M12,M22", key="tensor") from None
        if len(mus) != 1:
            raise ConfigError("a fixed tensor needs a single --mu", key="mu")
        tensors = [np.array([[m11, m12], [m12, m22]])]
        meta = [("source", "tensor")]
    else:
        prob, dom = _problem(cfg)
        tensors = [prob.tensor(mu, guard=cfg.guard).m for mu in mus]
        meta = [("source", "domain"), ("domain_kind", dom.kind), ("n", prob.n)]
    rows, series = [], []
    for mu, m in zip(mus, tensors):
        if mu.imag != 0:
            raise ConfigError("equivalent ellipses need real mu", key="mu")
        e = equivalent_ellipse(m, mu.real)
        rows.append({"mu": mu.real, **_ellipse_row(e)})
        for s in _ellipse_series(e):
            s.name = f"ellipse_mu={mu.real!r}"
            series.append(s)
    return rows, ("mu",) + _ELLIPSE_COLS, series, [], meta


_HS_COLS = ("mu", "trace_M", "trace_Minv", "lower1", "upper1", "bound2", "margin_lower1",
            "margin_upper1", "margin_bound2", "disk_equality", "ellipse_equality")


def _cmd_hs(cfg):
    prob, dom = _problem(cfg)
    omega = prob.area
    rows = []
    for mu in _mus(cfg):
        if mu.imag != 0 or abs(mu.real) < 0.5:
            raise ConfigError(f"bound checks need real |mu| >= 1/2, got {_mkey(mu)}", key="mu")
        t = prob.tensor(mu, guard=cfg.guard)
        rows.append(hs_check(t, mu.real, omega).as_dict())
    mus = [r["mu"] for r in rows]
    series = [Series(k, mus, [r[k] for r in rows], "mu", k)
              for k in ("margin_lower1", "margin_bound2")]
    meta = [("domain_kind", dom.kind), ("n", prob.n), ("area", omega)]
    return rows, _HS_COLS, series, [], meta


_HANDLERS = {
    "compute": _cmd_tensors,
    "sweep": _cmd_tensors,
    "spectrum": _cmd_spectrum,
    "measures": _cmd_measures,
    "fit": _cmd_fit,
    "recover-ellipse": _cmd_recover,
    "equivalent-ellipse": _cmd_equivalent,
    "hs-check": _cmd_hs,
}


def _render(cfg, rows, cols, series, meta):
    if cfg.format == "plot-data":
        return write_plot_data(series, meta)
    return write_table(rows, cols, meta, cfg.format)


def execute(cfg: RunConfig):
    """Run ``cfg`` and return the output text; raises on failure."""
    if cfg.format not in ("csv", "json", "plot-data"):
        raise ConfigError(f"unknown format {cfg.format!r}", key="format")
    if cfg.command == "oracle":
        from .oracle import write_fixtures

        path = cfg.output or "tests/fixtures/oracle_fixtures.json"
        fixtures = write_fixtures(path)
        return "".join(f"{f.name}\n" for f in fixtures), None
    if cfg.command not in _HANDLERS:
        raise ConfigError(f"unknown command {cfg.command!r}", key="command")
    rows, cols, series, warnings, extra = _HANDLERS[cfg.command](cfg)
    if warnings and cfg.strict:
        raise StrictWarning("; ".join(warnings))
    meta = [("program", "polarization2d"), ("version", __version__), ("command", cfg.command)]
    meta += extra
    meta.append(("warnings", len(warnings)))
    return _render(cfg, rows, cols, series, meta), series


def run(cfg: RunConfig, stdout=None, stderr=None) -> int:
    """Execute ``cfg``, write its output and return the exit status."""
    stdout = sys.stdout if stdout is None else stdout
    stderr = sys.stderr if stderr is None else stderr
    try:
        text, series = execute(cfg)
        if cfg.figure and series is not None:
            from .plotting import render_series

            render_series(series, cfg.figure, title=cfg.command)
    except StrictWarning as exc:
        print(f"error: near-spectrum warning (strict): {exc}", file=stderr)
        return EXIT_STRICT
    except ConfigError as exc:
        print(f"error: ConfigError: {exc}", file=stderr)
        return EXIT_CONFIG
    except PolarizationError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=stderr)
        return EXIT_NUMERICAL
    except ValueError as exc:
        print(f"error: invalid input: {exc}", file=stderr)
        return EXIT_CONFIG
    if cfg.output and cfg.command != "oracle":
        with open(cfg.output, "w") as fh:
            fh.write(text)
    else:
        stdout.write(text)
    return EXIT_OK


def build_parser():
    parser = argparse.ArgumentParser(
        prog="polarization2d",
        description="Polarization tensors of planar inclusions via boundary integrals.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, domain=True, mu=False, grid=False):
        if domain:
            p.add_argument("--domain", default="", help="domain config file")
            p.add_argument("--n", type=int, default=0, help="node count (overrides the file)")
            p.add_argument("--guard", type=float, default=GUARD,
                           help="minimal distance of mu from the spectrum")
        if mu:
            p.add_argument("--mu", default="", help="contrast, e.g. 2, -0.5, 1+1j; comma list")
        if grid:
            p.add_argument("--mu-grid", dest="mu_grid", default="",
                           help="START:STOP:COUNT or comma list")
        p.add_argument("--format", choices=("csv", "json", "plot-data"), default="csv")
        p.add_argument("--output", default="", help="output file (default stdout)")
        p.add_argument("--figure", default="", help="also render the plot data with matplotlib")
        p.add_argument("--strict", action="store_true",
                       help="treat near-spectrum warnings as errors (exit 4)")
        p.add_argument("--save-config", dest="save_config", default="",
                       help="write the run configuration to this file first")

    p = sub.add_parser("compute", help="tensor at one or more contrasts")
    common(p, mu=True)
    p.add_argument("--method", choices=("auto", "direct", "dual", "spectral"), default="auto")
    p = sub.add_parser("sweep", help="tensor on a contrast grid")
    common(p, mu=True, grid=True)
    p.add_argument("--method", choices=("auto", "direct", "dual", "spectral"), default="auto")
    p = sub.add_parser("spectrum", help="Fredholm eigenvalues with multiplicities")
    common(p)
    p = sub.add_parser("measures", help="spectral masses alpha, beta, gamma and c_n")
    common(p)
    p = sub.add_parser("fit", help="rational model of sampled tensors")
    common(p, domain=False)
    p.add_argument("--samples", required=True, help="sweep CSV")
    p.add_argument("--max-poles", dest="max_poles", type=int, default=6)
    p = sub.add_parser("recover-ellipse", help="ellipse from two-pole samples")
    common(p, domain=False)
    p.add_argument("--samples", required=True, help="sweep CSV")
    p.add_argument("--tol", type=float, default=1e-6, help="certificate tolerance")
    p = sub.add_parser("equivalent-ellipse", help="ellipse matching a tensor at one contrast")
    common(p, mu=True)
    p.add_argument("--tensor", default="", help="M11,M12,M22 instead of a domain")
    p = sub.add_parser("hs-check", help="Hashin-Shtrikman bound audit")
    common(p, mu=True, grid=True)
    p = sub.add_parser("oracle", help="regenerate the reference fixture file")
    p.add_argument("--output", default="tests/fixtures/oracle_fixtures.json")
    p = sub.add_parser("run", help="execute a saved run configuration")
    p.add_argument("config", help="run config file")
    return parser


def _config_from_args(args) -> RunConfig:
    known = {f.name for f in dataclasses.fields(RunConfig)}
    kw = {k: v for k, v in vars(args).items() if k in known and v is not None}
    return RunConfig(**kw)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "run":
            with open(args.config) as fh:
                cfg = parse_run(fh.read())
        else:
            cfg = _config_from_args(args)
    except ConfigError as exc:
        print(f"error: ConfigError: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"error: ConfigError: cannot read {args.config}: {exc.strerror}", file=sys.stderr)
        return EXIT_CONFIG
    if getattr(args, "save_config", ""):
        from .config import serialize_run

        with open(args.save_config, "w") as fh:
            fh.write(serialize_run(cfg))
    return run(cfg)


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
