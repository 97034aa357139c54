"""Command-line front end: ``selfzeta {eval,verify,sample,suite}``.

Exit codes: 0 success, 1 a check failed, 2 usage or configuration error,
3 numerical error.  Reports are written atomically (temp file + rename).

A ``--config`` file holds ``key = value`` lines named after the long flags
(``tol = 1e-6``, ``grid = real:-3:4:0.5``); flags given on the command line
win.  In ``suite`` configs, each ``check = NAME [target=T] [grid=G] [tol=X]``
line adds one check.
"""
from __future__ import annotations

import argparse
import csv
import datetime as _dt
import io
import json
import math
import os
import sys
import tempfile
import time
from dataclasses import dataclass, field

import numpy as np

from . import __version__
from . import density as D
from . import montecarlo as MC
from . import verify as V
from .errors import ConfigError, SelfZetaError
from .grids import SGrid, parse_grid, parse_point
from .theta import psi as psi_value
from .theta import theta as theta_value

EXIT_OK, EXIT_FAILED, EXIT_USAGE, EXIT_NUMERIC = 0, 1, 2, 3
FORMATS = ("csv", "json")
COMMANDS = ("eval", "verify", "sample", "suite")


class UsageError(ConfigError):
    """Bad command line or config file."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.format_usage().strip()}\n{self.prog}: error: {message}")


def _build_parser() -> _Parser:
    p = _Parser(prog="selfzeta", description="Self-reciprocal densities and Riemann-type xi functions.")
    p.add_argument("--version", action="version", version=f"selfzeta {__version__}")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp):
        sp.add_argument("--config", help="key = value file with defaults for these flags")
        sp.add_argument("--out", help="write the report here (atomically)")
        sp.add_argument("--format", help="csv or json (default: from --out suffix, else json)")
        sp.add_argument("--reproducible", action="store_true", default=None,
                        help="omit timings and metadata so reruns are byte-identical")

    e = sub.add_parser("eval", help="evaluate a function at points")
    what = e.add_mutually_exclusive_group()
    what.add_argument("--xi", help="riemann | cosh | xi4 | g3:a=A | psi:DENSITY | xi1:FAMILY")
    what.add_argument("--psi", metavar="DENSITY", help="psi series of a density at --x")
    what.add_argument("--theta", metavar="DENSITY", help="theta series of a density at --x")
    what.add_argument("--mixing-pdf", metavar="FAMILY", help="mixing density g at --x")
    what.add_argument("--cf", metavar="DENSITY", help="characteristic function at --x")
    what.add_argument("--pdf", metavar="DENSITY", help="self-reciprocal density at --x")
    e.add_argument("--s", action="append", help="complex point 're,im' (repeatable)")
    e.add_argument("--grid", help="grid of s values")
    e.add_argument("--x", help="comma-separated real arguments")
    common(e)

    v = sub.add_parser("verify", help="run one registered check")
    v.add_argument("--check", help="check name, e.g. sinh_mixing_xi1")
    v.add_argument("--target", help="density / family / xi selector for the check")
    v.add_argument("--grid", help="real:a:b:step | rect:re0:re1:im0:im1:n_re:n_im | critline:t0:t1:n | standard")
    v.add_argument("--tol", type=float, help="pass tolerance")
    v.add_argument("--list", action="store_true", default=None, help="list registered checks")
    common(v)

    s = sub.add_parser("sample", help="sample a mixing law or the subordinated variable")
    s.add_argument("--family", help="sinh_z | cosh_h1 | cosh_t | ggc_alpha | gig | levy | custom_exp")
    s.add_argument("--a", type=float)
    s.add_argument("--alpha", type=float)
    s.add_argument("--lam", type=float)
    s.add_argument("--n", type=int, help="sample size (default 100000)")
    s.add_argument("--seed", type=int, help="64-bit seed (default 42)")
    s.add_argument("--mixing", action="store_true", default=None,
                   help="emit Y ~ g instead of X = sqrt(Y) Z")
    s.add_argument("--check-cf", action="store_true", default=None,
                   help="compare the empirical cf with sqrt(2 pi) pdf and check the variance")
    s.add_argument("--t", help="comma-separated t values for --check-cf (default 0.5,1,2)")
    s.add_argument("--band", type=float, help="band multiplier (default 4)")
    common(s)

    u = sub.add_parser("suite", help="run a list of checks")
    u.add_argument("--default", action="store_true", default=None, help="run every registered check")
    u.add_argument("--checks", help="comma-separated NAME or NAME@TARGET entries")
    common(u)
    return p


@dataclass
class RunConfig:
    command: str
    options: dict
    checks: list = field(default_factory=list)
    out: str | None = None
    format: str = "json"
    reproducible: bool = False


def _read_config(path: str) -> tuple[dict, list]:
    try:
        with open(path, encoding="utf-8") as fh:
            lines = fh.read().splitlines()
    except OSError as exc:
        raise UsageError(f"cannot read config {path!r}: {exc}") from None
    values, checks = {}, []
    for no, raw in enumerate(lines, 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, eq, val = line.partition("=")
        if not eq:
            raise UsageError(f"{path}:{no}: expected 'key = value'")
        key, val = key.strip().replace("-", "_"), val.strip()
        if key == "check":
            checks.append(_check_entry(val, f"{path}:{no}"))
        else:
            values[key] = val
    return values, checks


def _check_entry(text: str, where: str) -> dict:
    name, *rest = text.split()
    entry = {"name": name}
    for tok in rest:
        k, eq, v = tok.partition("=")
        if not eq or k not in ("target", "grid", "tol"):
            raise UsageError(f"{where}: bad check option {tok!r}")
        entry["tolerance" if k == "tol" else k] = float(v) if k == "tol" else v
    return entry


def _coerce(parser_action, text: str):
    if parser_action.type is not None:
        return parser_action.type(text)
    if parser_action.const is True:  # store_true
        return text.lower() in ("1", "true", "yes", "on")
    return text


def parse_args(argv) -> RunConfig:
    """Parse ``argv`` (without the program name) into a :class:`RunConfig`."""
    parser = _build_parser()
    ns = parser.parse_args(list(argv))
    opts = vars(ns)
    cfg_checks = []
    if opts.get("config"):
        values, cfg_checks = _read_config(opts["config"])
        sub = parser._subparsers._group_actions[0].choices[ns.command]
        actions = {a.dest: a for a in sub._actions}
        for key, val in values.items():
            if key in ("command", "config") or key not in actions:
                if key == "command" and val == ns.command:
                    continue
                raise UsageError(f"unknown config key {key!r} for '{ns.command}'")
            if opts.get(key) is None:
                try:
                    opts[key] = _coerce(actions[key], val)
                except ValueError:
                    raise UsageError(f"bad value {val!r} for config key {key!r}") from None

    fmt = opts.get("format")
    out = opts.get("out")
    if fmt is None:
        fmt = "csv" if out and out.lower().endswith(".csv") else "json"
    if fmt not in FORMATS:
        raise UsageError(f"unsupported format {fmt!r}; choose from {', '.join(FORMATS)}")
    tol = opts.get("tol")
    if tol is not None and not tol > 0:
        raise UsageError("--tol must be positive")
    return RunConfig(ns.command, opts, cfg_checks, out, fmt, bool(opts.get("reproducible")))


# --- output -----------------------------------------------------------------------


def _num(x):
    x = float(x)
    if math.isfinite(x):
        return x
    return "nan" if math.isnan(x) else ("inf" if x > 0 else "-inf")


def _jsonable(obj):
    if isinstance(obj, float):
        return _num(obj)
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    return obj


def _atomic_write(path: str, text: str):
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(prefix=".selfzeta-", dir=directory)
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def reports_json(reports, reproducible: bool, wall_ms: float) -> str:
    doc = {
        "reports": [r.to_dict(timing=not reproducible) for r in reports],
        "passed": all(r.passed for r in reports),
    }
    if not reproducible:
        doc["metadata"] = {
            "created": _dt.datetime.now(_dt.timezone.utc).isoformat(timespec="seconds"),
            "total_wall_ms": round(wall_ms, 3),
            "version": __version__,
        }
    return json.dumps(_jsonable(doc), indent=2) + "\n"


def reports_csv(reports) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["check", "s_re", "s_im", "residual", "passed"])
    for r in reports:
        for p, res in zip(r.points, r.residuals):
            w.writerow([r.check.label, repr(p.real), repr(p.imag), repr(float(res)),
                        "true" if res < r.check.tolerance else "false"])
    return buf.getvalue()


def strip_volatile(doc: dict) -> dict:
    """Drop timing and metadata so two report documents can be compared."""
    doc = dict(doc)
    doc.pop("metadata", None)
    doc["reports"] = [{**r, "wall_ms": None} for r in doc.get("reports", [])]
    return doc


def _emit_reports(cfg: RunConfig, reports, wall_ms: float) -> int:
    for r in reports:
        print(r.summary())
        for i, msg in r.errors:
            print(f"    point {i}: {msg}")
        if r.note:
            print(f"    note: {r.note}")
    if cfg.out:
        text = reports_csv(reports) if cfg.format == "csv" else reports_json(reports, cfg.reproducible, wall_ms)
        _atomic_write(cfg.out, text)
    return EXIT_OK if all(r.passed for r in reports) else EXIT_FAILED


# --- commands ---------------------------------------------------------------------


def _fmt_value(v: complex) -> str:
    if v.imag == 0.0:
        return repr(v.real)
    sign = "+" if v.imag >= 0 else "-"
    return f"{v.real!r}{sign}{abs(v.imag)!r}j"


def _eval_points(opts) -> SGrid:
    pts = [parse_point(s) for s in (opts.get("s") or [])]
    if opts.get("grid"):
        pts += list(parse_grid(opts["grid"]).points)
    if not pts:
        raise UsageError("eval --xi needs --s or --grid")
    return SGrid(tuple(dict.fromkeys(pts)), "eval")


def _x_values(opts) -> list[float]:
    if not opts.get("x"):
        raise UsageError("this evaluation needs --x")
    try:
        return [float(t) for t in opts["x"].split(",") if t.strip()]
    except ValueError:
        raise UsageError(f"bad --x list {opts['x']!r}") from None


def _cmd_eval(cfg: RunConfig) -> int:
    o = cfg.options
    if o.get("xi"):
        fn = V.xi_function(o["xi"])
        label = o["xi"]
        args = list(_eval_points(o).points)
        values = [complex(fn(s)) for s in args]
    else:
        for key, label_key in (("psi", "psi"), ("theta", "theta"), ("mixing_pdf", "mixing_pdf"),
                               ("cf", "cf"), ("pdf", "pdf")):
            if o.get(key):
                break
        else:
            raise UsageError("eval needs one of --xi, --psi, --theta, --mixing-pdf, --cf, --pdf")
        sel = o[key]
        label = f"{label_key}:{sel}"
        xs = _x_values(o)
        args = [complex(x) for x in xs]
        if key == "psi":
            values = [psi_value(V.series_for(sel), x) for x in xs]
        elif key == "theta":
            values = [theta_value(V.series_for(sel), x) for x in xs]
        elif key == "mixing_pdf":
            values = [D.mixing_pdf(V.mixing_family(sel), x) for x in xs]
        elif key == "cf":
            values = [D.density_cf(V.sr_density(sel), x) for x in xs]
        else:
            values = [D.mixture_pdf(V.sr_density(sel), x) for x in xs]
        values = [complex(float(v)) for v in values]

    if len(values) == 1:
        print(_fmt_value(values[0]))
    else:
        for a, v in zip(args, values):
            print(f"{_fmt_value(a)}\t{_fmt_value(v)}")
    if cfg.out:
        if cfg.format == "csv":
            buf = io.StringIO()
            w = csv.writer(buf, lineterminator="\n")
            w.writerow(["function", "s_re", "s_im", "value_re", "value_im"])
            for a, v in zip(args, values):
                w.writerow([label, repr(a.real), repr(a.imag), repr(v.real), repr(v.imag)])
            text = buf.getvalue()
        else:
            doc = {"function": label,
                   "points": [{"s_re": a.real, "s_im": a.imag, "value_re": v.real, "value_im": v.imag}
                              for a, v in zip(args, values)]}
            text = json.dumps(_jsonable(doc), indent=2) + "\n"
        _atomic_write(cfg.out, text)
    return EXIT_OK


def _cmd_verify(cfg: RunConfig) -> int:
    o = cfg.options
    if o.get("list"):
        for name, d in V.REGISTRY.items():
            print(f"{name:29s} {d.kind:10s} {d.description}")
        return EXIT_OK
    if not o.get("check"):
        raise UsageError("verify needs --check NAME (or --list)")
    t0 = time.perf_counter()
    spec = V.CheckSpec(o["check"], o.get("target"), o.get("grid"), o.get("tol"))
    report = V.run_check(spec)
    return _emit_reports(cfg, [report], 1e3 * (time.perf_counter() - t0))


def _family_selector(o) -> str:
    fam = o.get("family")
    if not fam:
        raise UsageError("sample needs --family")
    params = [f"{k}={o[k]!r}" for k in ("a", "alpha", "lam") if o.get(k) is not None]
    return fam + (":" + ",".join(params) if params else "")


def _cmd_sample(cfg: RunConfig) -> int:
    o = cfg.options
    g = V.mixing_family(_family_selector(o))
    n = 100_000 if o.get("n") is None else o["n"]
    seed = MC.DEFAULT_SEED if o.get("seed") is None else o["seed"]
    t0 = time.perf_counter()
    if o.get("check_cf"):
        batch = MC.sample_subordinated(g, n, seed)
        band = MC.DEFAULT_BAND if o.get("band") is None else o["band"]
        ts = _x_values({"x": o.get("t") or "0.5,1,2"})
        reports = [MC.check_sr_empirical(g, n, seed, ts, band, batch=batch),
                   MC.check_variance(g, n, seed, band, batch=batch)]
        return _emit_reports(cfg, reports, 1e3 * (time.perf_counter() - t0))

    batch = MC.sample_mixing(g, n, seed) if o.get("mixing") else MC.sample_subordinated(g, n, seed)
    vals = batch.values
    print(f"{batch.kind} {g.label} n={n} seed={seed} method={batch.method!r} "
          f"mean={float(np.mean(vals))!r} var={float(np.var(vals, ddof=1)) if n > 1 else 0.0!r}")
    if cfg.out:
        if cfg.format == "csv":
            text = "value\n" + "".join(f"{float(v)!r}\n" for v in vals)
        else:
            doc = {"family": g.label, "kind": batch.kind, "seed": seed, "n": n, "method": batch.method,
                   "values": [float(v) for v in vals]}
            text = json.dumps(doc) + "\n"
        _atomic_write(cfg.out, text)
    return EXIT_OK


def _cmd_suite(cfg: RunConfig) -> int:
    o = cfg.options
    entries = list(cfg.checks)
    if o.get("checks"):
        entries += [c.strip() for c in o["checks"].split(",") if c.strip()]
    if o.get("default"):
        if entries:
            raise UsageError("--default cannot be combined with an explicit check list")
        config = None
    elif entries:
        config = entries
    else:
        raise UsageError("suite needs --default, --checks, or check lines in --config")
    t0 = time.perf_counter()
    reports = V.run_suite(config)
    code = _emit_reports(cfg, reports, 1e3 * (time.perf_counter() - t0))
    print(f"{sum(r.passed for r in reports)}/{len(reports)} checks passed")
    return code


_COMMANDS = {"eval": _cmd_eval, "verify": _cmd_verify, "sample": _cmd_sample, "suite": _cmd_suite}


def execute(cfg: RunConfig) -> int:
    try:
        return _COMMANDS[cfg.command](cfg)
    except ConfigError as exc:
        print(f"selfzeta: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (SelfZetaError, ArithmeticError, ValueError) as exc:
        print(f"selfzeta: numerical error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    try:
        cfg = parse_args(argv)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_USAGE
    except SystemExit as exc:  # --help / --version
        return int(exc.code or 0)
    return execute(cfg)


if __name__ == "__main__":
    sys.exit(main())
