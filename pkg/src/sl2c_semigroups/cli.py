"""Command-line front end.

Exit codes: 0 success, 1 verification failure, 2 usage or regime error,
3 numerical non-convergence. Option values resolve as command-line flag,
then ``--config`` file (``key = value`` lines), then built-in default.
"""
import argparse
import dataclasses
import os
import sys

import numpy as np

from . import io as tio
from . import kernels as K
from . import metaplectic as MP
from . import oracle as O
from . import verify as V
from .errors import (DomainError, GridMismatch, InsufficientAcceptance, NonConvergence,
                     RegimeError, StructureError, ToleranceNotMet)

OUTPUT_DIR_ENV = "SL2C_OUTPUT_DIR"

DEFAULTS = {
    "t": 1.0,
    "omega": 0.0,
    "grid": (-10.0, 10.0, 201),
    "rel_tol": 1e-10,
    "max_m": 80,
    "max_j": 400,
    "format": "csv",
    "output": None,
    "alpha": 1.0,
    "x": (1.0,),
    "seed": 0,
    "n_paths": 1_000_000,
    "n_steps": 4096,
    "bandwidth": 0.1,
    "workers": 1,
    "times": (0.25, 0.5, 1.0, 2.0),
}


class UsageError(Exception):
    pass


def _floats(text):
    return tuple(float(v) for v in text.replace(",", " ").split())


def _grid(values):
    if len(values) != 3:
        raise UsageError("grid needs MIN MAX N")
    lo, hi, n = float(values[0]), float(values[1]), float(values[2])
    if n != int(n) or n < 2:
        raise UsageError("grid N must be an integer >= 2")
    if not hi > lo:
        raise UsageError("grid MAX must exceed MIN")
    return lo, hi, int(n)


CONVERT = {
    "t": float, "omega": float, "rel_tol": float, "max_m": int, "max_j": int,
    "format": str, "output": str, "alpha": float, "seed": int, "n_paths": int,
    "n_steps": int, "bandwidth": float, "workers": int,
    "grid": lambda s: _grid(s.split()), "x": _floats, "times": _floats,
}


def read_config(path):
    """Parse ``key = value`` lines; ``#`` starts a comment."""
    out = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise UsageError(f"{path}:{lineno}: expected key = value")
            key, value = (s.strip() for s in line.split("=", 1))
            key = key.replace("-", "_")
            if key not in CONVERT:
                raise UsageError(f"{path}:{lineno}: unknown key {key!r}")
            try:
                out[key] = CONVERT[key](value)
            except ValueError as exc:
                raise UsageError(f"{path}:{lineno}: {exc}") from None
    return out


class Options:
    """Flag > config file > default lookup."""

    def __init__(self, args):
        self.args = args
        self.file = read_config(args.config) if getattr(args, "config", None) else {}

    def __getattr__(self, name):
        if name in vars(self.args):
            value = vars(self.args)[name]
            return _grid(value) if name == "grid" else value
        if name in self.file:
            return self.file[name]
        return DEFAULTS[name]

    def policy(self):
        if not 0 < self.rel_tol < 1:
            raise UsageError("rel_tol must lie in (0, 1)")
        return K.TruncationPolicy(rel_tol=self.rel_tol, max_m=self.max_m, max_j=self.max_j)


def _open_output(opts, default_name):
    """Return a writable text stream; stdout unless --output or the env var says otherwise."""
    path = opts.output
    if path is None:
        base = os.environ.get(OUTPUT_DIR_ENV)
        if not base:
            return sys.stdout, False
        os.makedirs(base, exist_ok=True)
        path = os.path.join(base, default_name)
    if path == "-":
        return sys.stdout, False
    return open(path, "w", encoding="utf-8", newline="\n"), True


def _emit(opts, default_name, text):
    stream, close = _open_output(opts, default_name)
    try:
        stream.write(text)
    finally:
        if close:
            stream.close()


# --------------------------------------------------------------------------
# density


def evaluate_density(kind, t, omega, xi, policy):
    """Return (values, atom or None) for density kind q, p, c or g."""
    if not t > 0:
        raise DomainError("t must be positive")
    if kind == "q":
        return K.qt_density(t, xi, policy), None
    if kind == "p":
        return K.principal_density(t, omega, xi, policy), None
    if kind == "c":
        if not abs(omega) < 1:
            raise RegimeError("kind c needs |omega| < 1")
        if t < abs(omega):
            raise RegimeError("kind c needs t >= |omega|; use kind g below it")
        return K.complementary_density(t, omega, xi, policy), None
    if kind == "g":
        if not (0 < t < abs(omega) < 1):
            raise RegimeError("kind g needs 0 < t < |omega| < 1")
        atom = K.Atom(abs(omega) - t, K.atom_mass(t, omega))
        return K.subcritical_density(t, omega, xi, policy), atom
    raise UsageError(f"unknown density kind {kind!r}")


def sanity_scan(xi, values, rel=1e-12):
    """Reject non-finite output and asymmetry on grids symmetric about 0 (all kinds are even)."""
    if not np.all(np.isfinite(values)):
        raise ToleranceNotMet("non-finite density value")
    if np.allclose(xi, -xi[::-1], rtol=0, atol=1e-12 * max(1.0, np.max(np.abs(xi)))):
        scale = max(float(np.max(np.abs(values))), 1e-300)
        asym = float(np.max(np.abs(values - values[::-1])))
        if asym > rel * scale + 1e-15:
            raise ToleranceNotMet(f"density not even on a symmetric grid (deviation {asym:.2e})")


def density_table(kind, opts):
    lo, hi, n = opts.grid
    xi = np.linspace(lo, hi, n)
    if lo == -hi:
        xi = 0.5 * (xi - xi[::-1])  # exact mirror image about 0
    policy = opts.policy()
    # every kind is even in xi, so evaluating at |xi| makes tables exactly symmetric
    values, atom = evaluate_density(kind, opts.t, opts.omega, np.abs(xi), policy)
    values = np.asarray(values, dtype=float)
    sanity_scan(xi, values)
    return xi, values, atom, policy


def cmd_density(opts):
    kind = opts.args.kind
    xi, values, atom, policy = density_table(kind, opts)
    name = f"density_{kind}.{opts.format}"
    if opts.format == "json":
        doc = {"kind": kind, "t": opts.t, "omega": opts.omega, "rel_tol": policy.rel_tol,
               "xi": xi, "value": values}
        if atom is not None:
            doc["atom"] = {"location": atom.location, "mass": atom.mass}
        _emit(opts, name, tio.dumps(doc))
        return 0
    comments = []
    if atom is not None:
        comments.append(f"atom_location={tio.fmt(atom.location)},atom_mass={tio.fmt(atom.mass)}")
    comments.append(f"kind={kind},t={tio.fmt(opts.t)},omega={tio.fmt(opts.omega)}")
    comments.append(f"rel_tol={tio.fmt(policy.rel_tol)},max_m={policy.max_m},max_j={policy.max_j}")
    stream, close = _open_output(opts, name)
    try:
        tio.write_csv(stream, xi, values, comments)
    finally:
        if close:
            stream.close()
    return 0


def cmd_tabulate(opts):
    """One CSV per time in ``--times`` for the chosen kind, written to a directory."""
    kind = opts.args.kind
    directory = opts.output or os.environ.get(OUTPUT_DIR_ENV) or "tables"
    os.makedirs(directory, exist_ok=True)
    for t in opts.times:
        opts.args.t = t
        xi, values, atom, policy = density_table(kind, opts)
        comments = [f"kind={kind},t={tio.fmt(t)},omega={tio.fmt(opts.omega)}"]
        if atom is not None:
            comments.insert(0, f"atom_location={tio.fmt(atom.location)},atom_mass={tio.fmt(atom.mass)}")
        path = os.path.join(directory, f"{kind}_t{t:g}_w{opts.omega:g}.csv")
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            tio.write_csv(fh, xi, values, comments)
        print(path)
    return 0


# --------------------------------------------------------------------------
# verify / metaplectic / area-sim


def _area_spec(opts):
    return O.AreaSimSpec(n_paths=opts.n_paths, n_steps=opts.n_steps, bandwidth=opts.bandwidth,
                         seed=opts.seed, workers=opts.workers)


def cmd_verify(opts):
    settings = V.Settings(policy=opts.policy(), fault=opts.args.fault, alpha=opts.alpha,
                          t=opts.t, area=_area_spec(opts))
    report = V.run(opts.args.suite, settings, include_slow=opts.args.include_slow)
    report.pop("seconds")  # keep the report byte-stable across runs
    _emit(opts, f"verify_{opts.args.suite}.json", tio.dumps(report))
    for c in report["checks"]:
        if not c["passed"]:
            print(f"FAIL {c['name']}: measured {c['measured']:.3e}, tolerance {c['tolerance']:.1e}",
                  file=sys.stderr)
    return 0 if report["passed"] else 1


def cmd_metaplectic(opts):
    if not opts.alpha > 0:
        raise DomainError("alpha must be positive")
    doc = MP.pipeline(opts.alpha, opts.t)
    _emit(opts, "metaplectic.json", tio.dumps(doc))
    return 0


def cmd_area_sim(opts):
    spec = _area_spec(opts)
    rows = []
    for x in opts.x:
        res = O.conditional_area_cf(opts.t, x, spec)
        tol = max(3 * res.stderr, 0.05 * abs(res.target))
        row = dataclasses.asdict(res)
        row.update(x=x, within_tolerance=abs(res.estimate - res.target) <= tol)
        rows.append(row)
    doc = {"t": opts.t, "spec": dataclasses.asdict(spec), "results": rows}
    _emit(opts, "area_sim.json", tio.dumps(doc))
    return 0


# --------------------------------------------------------------------------


def build_parser():
    S = argparse.SUPPRESS
    common = argparse.ArgumentParser(add_help=False, argument_default=S)
    common.add_argument("--config", help="key = value file; flags override it")
    common.add_argument("--output", "-o",
                        help=f"output path ('-' for stdout); default ${OUTPUT_DIR_ENV}/<name> or stdout")
    common.add_argument("--rel-tol", dest="rel_tol", type=float, help="series truncation tolerance (default 1e-10)")
    common.add_argument("--max-m", dest="max_m", type=int, help="outer series cap (default 80)")
    common.add_argument("--max-j", dest="max_j", type=int, help="inner direct-sum cap (default 400)")
    common.add_argument("--t", type=float, help="time parameter")

    ap = argparse.ArgumentParser(prog="sl2c-semigroups",
                                 description="Levy-Khintchine kernels on SL(2,C) and the sp(4,R) matrix pipeline.")
    sub = ap.add_subparsers(dest="command", required=True)

    grid_kw = dict(nargs=3, metavar=("MIN", "MAX", "N"), help="xi grid (default -10 10 201)")

    p = sub.add_parser("density", parents=[common], argument_default=S, help="tabulate one density on a grid")
    p.add_argument("kind", choices=["q", "p", "c", "g"],
                   help="q: q_t; p: principal; c: complementary; g: subcritical continuous part")
    p.add_argument("--omega", type=float)
    p.add_argument("--grid", **grid_kw)
    p.add_argument("--format", choices=["csv", "json"])

    p = sub.add_parser("tabulate", parents=[common], argument_default=S, help="one CSV per time into a directory")
    p.add_argument("kind", choices=["q", "p", "c", "g"])
    p.add_argument("--omega", type=float)
    p.add_argument("--grid", **grid_kw)
    p.add_argument("--times", type=float, nargs="+")

    p = sub.add_parser("verify", parents=[common], argument_default=S, help="run verification suites")
    p.add_argument("suite", choices=["all"] + list(V.SUITES))
    p.add_argument("--include-slow", action="store_true", default=False,
                   help="add the Monte Carlo suite to 'all'")
    p.add_argument("--fault", action="store_true", default=False,
                   help="test hook: evaluate q at t + 1e-3 so the checks must fail")
    p.add_argument("--alpha", type=float)
    _area_flags(p)

    p = sub.add_parser("metaplectic", parents=[common], argument_default=S, help="matrix pipeline as JSON")
    p.add_argument("--alpha", type=float)

    p = sub.add_parser("area-sim", parents=[common], argument_default=S, help="Monte Carlo Levy area")
    p.add_argument("--x", type=float, nargs="+")
    _area_flags(p)
    return ap


def _area_flags(p):
    p.add_argument("--n-paths", dest="n_paths", type=int)
    p.add_argument("--n-steps", dest="n_steps", type=int)
    p.add_argument("--bandwidth", type=float)
    p.add_argument("--seed", type=int)
    p.add_argument("--workers", type=int)


COMMANDS = {
    "density": cmd_density,
    "tabulate": cmd_tabulate,
    "verify": cmd_verify,
    "metaplectic": cmd_metaplectic,
    "area-sim": cmd_area_sim,
}


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        opts = Options(args)
        return COMMANDS[args.command](opts)
    except (UsageError, DomainError, RegimeError, GridMismatch, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (NonConvergence, ToleranceNotMet, StructureError, InsufficientAcceptance) as exc:
        print(f"non-convergence: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
