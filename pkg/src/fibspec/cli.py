"""Command-line front end.

Every subcommand emits a table (CSV) or a JSON document that embeds the
full run configuration and the tool version.  Options may also come from a
``key = value`` config file; explicit flags win.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from dataclasses import asdict, dataclass, fields

import numpy as np

from . import __version__
from .fibword import fib_word, fibonacci
from .jacobi import CONVENTIONS, TRACE, Coupling, band_edges_oracle
from .spectrum import (
    DEFAULT_TOL,
    BandCountError,
    bands,
    escape_spectrum,
    measure_scan,
    trace_bounded_set,
    trace_poly_eval,
)
from .tracemap import DEFAULT_MAXITER, invariant, orbit, surface_mesh

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_NUMERIC = 3
EXIT_VERIFY = 4

COMMANDS = ("word", "oracle", "orbit", "bands", "spectrum", "measure-scan", "dimension",
            "profile", "scan", "dos", "surface", "verify")


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    command: str
    p: float = 1.0
    q: float = 0.0
    level: int | None = None
    kmin: int = 4
    kmax: int = 16
    bound_C: float | None = None
    tol: float = DEFAULT_TOL
    depth: int = 30
    resolution: float = 1e-4
    maxiter: int = DEFAULT_MAXITER
    lam: float | None = None
    windows: int | None = None
    n_scales: int = 12
    at: float | None = None
    report: int | None = None
    v: float = 0.0
    n: int = 50
    box: tuple[float, float] = (-2.0, 2.0)
    path: str | None = None
    cell: str = TRACE
    format: str = "csv"
    out: str | None = None
    seed: int = 0

    @property
    def coupling(self) -> Coupling:
        return Coupling(self.p, self.q)


_FIELD_TYPES = {
    "p": float, "q": float, "level": int, "kmin": int, "kmax": int, "bound_C": float,
    "tol": float, "depth": int, "resolution": float, "maxiter": int, "lam": float,
    "windows": int, "n_scales": int, "at": float, "report": int, "v": float, "n": int,
    "path": str, "cell": str, "format": str, "out": str, "seed": int,
}
_ALIASES = {"lambda": "lam", "c": "bound_C", "C": "bound_C", "n-scales": "n_scales"}

# per command: flags that must end up set
_REQUIRED = {
    "word": ("level",),
    "oracle": ("level",),
    "orbit": ("lam",),
    "bands": ("level",),
    "dimension": ("level",),
    "profile": ("level",),
    "scan": ("path", "level"),
    "dos": ("level",),
}


def _build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    S = argparse.SUPPRESS
    common.add_argument("--config", default=S, help="key = value file; flags override it")
    common.add_argument("--p", type=float, default=S, help="hopping modulation (nonzero, default 1)")
    common.add_argument("--q", type=float, default=S, help="potential modulation (default 0)")
    common.add_argument("--level", type=int, default=S, help="approximant level k")
    common.add_argument("--C", dest="bound_C", type=float, default=S,
                        help="trace bound C (default max(1, |z|) + 1)")
    common.add_argument("--tol", type=float, default=S, help=f"edge tolerance (default {DEFAULT_TOL})")
    common.add_argument("--format", choices=("csv", "json"), default=S, help="output format (default csv)")
    common.add_argument("--out", default=S, help="output file (default stdout)")
    common.add_argument("--seed", type=int, default=S, help="random seed (default 0)")

    parser = argparse.ArgumentParser(
        prog="fibspec", description="Spectra of tridiagonal Fibonacci Hamiltonians via the trace map.")
    parser.add_argument("--version", action="version", version=f"fibspec {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, metavar="command")

    sub.add_parser("word", parents=[common], help="Fibonacci word of a level")
    p = sub.add_parser("oracle", parents=[common], help="band edges from the matrix eigensolver")
    p.add_argument("--cell", choices=CONVENTIONS, default=S, help="cell convention (default trace)")
    p = sub.add_parser("orbit", parents=[common], help="trace-map orbit of gamma(lambda)")
    p.add_argument("--lambda", dest="lam", type=float, default=S)
    p.add_argument("--maxiter", type=int, default=S, help=f"orbit length (default {DEFAULT_MAXITER})")
    sub.add_parser("bands", parents=[common], help="Floquet bands, or {|x_k| <= C} with --C")
    p = sub.add_parser("spectrum", parents=[common], help="escape-time cover of the spectrum")
    p.add_argument("--depth", type=int, default=S, help="escape depth (default 30)")
    p.add_argument("--resolution", type=float, default=S, help="cell width (default 1e-4)")
    p = sub.add_parser("measure-scan", parents=[common], help="measure of the level-k covers")
    p.add_argument("--kmin", type=int, default=S, help="first level (default 4)")
    p.add_argument("--kmax", type=int, default=S, help="last level (default 16)")
    for name, text in (("dimension", "global box dimension"), ("profile", "local dimension profile")):
        p = sub.add_parser(name, parents=[common], help=text)
        p.add_argument("--windows", type=int, default=S, help="number of equal-count windows")
        p.add_argument("--n-scales", dest="n_scales", type=int, default=S, help="regression scales (default 12)")
    p = sub.add_parser("scan", parents=[common], help="dimension for couplings read from a CSV file")
    p.add_argument("--path", default=S, help="CSV file with rows p,q")
    p.add_argument("--n-scales", dest="n_scales", type=int, default=S)
    p = sub.add_parser("dos", parents=[common], help="integrated density of states")
    g = p.add_mutually_exclusive_group()
    g.add_argument("--at", type=float, default=S, help="pointwise dimension at this energy")
    g.add_argument("--report", type=int, default=S, help="dimension-gap report over n sampled energies")
    p = sub.add_parser("surface", parents=[common], help="points of the invariant surface I = V")
    p.add_argument("--v", type=float, default=S, help="invariant value (default 0)")
    p.add_argument("--n", type=int, default=S, help="grid resolution (default 50)")
    p.add_argument("--box", type=float, nargs=2, default=S, metavar=("LO", "HI"))
    sub.add_parser("verify", parents=[common], help="oracle cross-checks, pass/fail per check")
    return parser


def read_config_file(path: str) -> dict:
    """Parse ``key = value`` lines; '#' starts a comment."""
    out = {}
    with open(path, encoding="utf-8") as fh:
        for num, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise UsageError(f"{path}:{num}: expected key = value")
            key, val = (s.strip() for s in line.split("=", 1))
            key = _ALIASES.get(key, key.replace("-", "_"))
            if key == "box":
                out[key] = tuple(float(x) for x in val.replace(",", " ").split())
                continue
            if key not in _FIELD_TYPES:
                raise UsageError(f"{path}:{num}: unknown key {key!r}")
            try:
                out[key] = _FIELD_TYPES[key](val)
            except ValueError:
                raise UsageError(f"{path}:{num}: bad value for {key}: {val!r}") from None
    return out


def _validate(cfg: RunConfig) -> None:
    if not (math.isfinite(cfg.p) and math.isfinite(cfg.q)):
        raise UsageError("p and q must be finite")
    if cfg.p == 0:
        raise UsageError("p must be nonzero")
    for key in _REQUIRED.get(cfg.command, ()):
        if getattr(cfg, key) is None:
            raise UsageError(f"--{'lambda' if key == 'lam' else key} is required for {cfg.command}")
    if cfg.level is not None and cfg.level < 2:
        raise UsageError("level must be >= 2")
    if cfg.kmin < 2 or cfg.kmax < cfg.kmin:
        raise UsageError("need 2 <= kmin <= kmax")
    if not cfg.tol > 0 or not cfg.resolution > 0:
        raise UsageError("tolerances must be positive")
    if cfg.format not in ("csv", "json"):
        raise UsageError("format must be csv or json")
    if cfg.cell not in CONVENTIONS:
        raise UsageError(f"cell must be one of {CONVENTIONS}")
    if cfg.bound_C is not None and cfg.bound_C < 1:
        raise UsageError("C must be >= 1")
    if cfg.windows is not None and cfg.windows < 3:
        raise UsageError("windows must be >= 3")
    if cfg.n_scales < 5:
        raise UsageError("n-scales must be >= 5")
    if cfg.report is not None and cfg.report < 5:
        raise UsageError("report needs at least 5 points")
    if cfg.n < 2 or cfg.maxiter < 1 or cfg.depth < 2:
        raise UsageError("n >= 2, maxiter >= 1 and depth >= 2 are required")


def parse_args(argv=None) -> RunConfig:
    """Validated RunConfig; raises UsageError (or SystemExit from argparse)."""
    ns = vars(_build_parser().parse_args(argv))
    values = {}
    if "config" in ns:
        values.update(read_config_file(ns.pop("config")))
    values.update(ns)
    names = {f.name for f in fields(RunConfig)}
    cfg = RunConfig(**{k: v for k, v in values.items() if k in names})
    if isinstance(cfg.box, list):
        cfg.box = tuple(cfg.box)
    _validate(cfg)
    return cfg


# -- serialization -------------------------------------------------------------

def _fmt(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return format(float(v), ".17g")
    return str(v)


def _plain(v):
    if isinstance(v, (np.floating,)):
        return float(v)
    if isinstance(v, (np.integer,)):
        return int(v)
    if isinstance(v, (np.bool_,)):
        return bool(v)
    if isinstance(v, tuple):
        return [_plain(x) for x in v]
    if isinstance(v, list):
        return [_plain(x) for x in v]
    if isinstance(v, dict):
        return {k: _plain(x) for k, x in v.items()}
    return v


@dataclass
class Table:
    columns: list[str]
    rows: list[tuple]


def render(cfg: RunConfig, result) -> str:
    if cfg.format == "csv":
        buf = io.StringIO()
        if isinstance(result, Table):
            w = csv.writer(buf, lineterminator="\n")
            w.writerow(result.columns)
            for row in result.rows:
                w.writerow([_fmt(x) for x in row])
        else:
            w = csv.writer(buf, lineterminator="\n")
            w.writerow(["key", "value"])
            for key, val in result.items():
                w.writerow([key, json.dumps(_plain(val)) if isinstance(val, (list, dict)) else _fmt(val)])
        return buf.getvalue()
    doc = {"tool": "fibspec", "version": __version__, "config": _plain(asdict(cfg))}
    if isinstance(result, Table):
        doc["columns"] = result.columns
        doc["rows"] = [_plain(list(r)) for r in result.rows]
    else:
        doc["result"] = _plain(result)
    return json.dumps(doc, indent=2) + "\n"


def load_json(text: str) -> dict:
    """Parse a JSON artifact; tables come back as lists of row dicts."""
    doc = json.loads(text)
    if "rows" in doc:
        doc["records"] = [dict(zip(doc["columns"], r)) for r in doc["rows"]]
    return doc


def threads() -> int:
    env = os.environ.get("FIBSPEC_THREADS")
    n = os.cpu_count() or 1
    if env:
        try:
            n = min(n, max(1, int(env)))
        except ValueError:
            raise UsageError("FIBSPEC_THREADS must be an integer") from None
    return n


# -- subcommands -----------------------------------------------------------------

def _interval_table(s) -> Table:
    return Table(["band_index", "left", "right"], [(i, l, r) for i, (l, r) in enumerate(s)])


def cmd_word(cfg):
    return Table(["level", "length", "word"], [(cfg.level, fibonacci(cfg.level), fib_word(cfg.level))])


def cmd_oracle(cfg):
    return _interval_table(band_edges_oracle(cfg.level, cfg.coupling, convention=cfg.cell))


def cmd_orbit(cfg):
    pts = orbit(cfg.lam, cfg.coupling, cfg.maxiter)
    rows = []
    for i, t in enumerate(pts):
        if max(abs(t.x), abs(t.y), abs(t.z)) > 1e150:
            break
        rows.append((i, t.x, t.y, t.z, invariant(t)))
    return Table(["index", "x", "y", "z", "invariant"], rows)


def cmd_bands(cfg):
    if cfg.bound_C is None:
        return _interval_table(bands(cfg.level, cfg.coupling, cfg.tol).bands)
    return _interval_table(trace_bounded_set(cfg.level, cfg.coupling, cfg.bound_C, cfg.tol))


def cmd_spectrum(cfg):
    s = escape_spectrum(cfg.coupling, cfg.depth, cfg.resolution, cfg.bound_C)
    return _interval_table(s)


def cmd_measure_scan(cfg):
    rows = measure_scan(cfg.coupling, cfg.kmin, cfg.kmax, cfg.bound_C, cfg.tol)
    return Table(["k", "band_count", "measure"], rows)


def cmd_dimension(cfg):
    from .fractal import COVER_BOUND, dimension_profile, global_dimension

    bound = COVER_BOUND if cfg.bound_C is None else cfg.bound_C
    est = global_dimension(cfg.coupling, cfg.level, cfg.n_scales, bound, cfg.tol)
    out = est.as_dict()
    if cfg.windows:
        prof = dimension_profile(cfg.coupling, cfg.windows, cfg.level, cfg.n_scales, bound,
                                 cfg.tol, workers=threads())
        out["windows"] = [dict(center=x, **e.as_dict()) for x, e in prof]
    return out


def cmd_profile(cfg):
    from .fractal import COVER_BOUND, dimension_profile

    bound = COVER_BOUND if cfg.bound_C is None else cfg.bound_C
    prof = dimension_profile(cfg.coupling, cfg.windows or 5, cfg.level, cfg.n_scales, bound,
                             cfg.tol, workers=threads())
    return Table(["window_center", "value", "stderr", "r2", "converged"],
                 [(x, e.value, e.stderr, e.r_squared, e.converged) for x, e in prof])


def read_couplings(path: str) -> list[Coupling]:
    out = []
    with open(path, encoding="utf-8", newline="") as fh:
        for row in csv.reader(fh):
            if not row or row[0].strip().startswith("#"):
                continue
            try:
                p, q = float(row[0]), float(row[1])
            except (ValueError, IndexError):
                if not out and row[0].strip().lower() == "p":
                    continue  # header
                raise UsageError(f"{path}: bad coupling row {row!r}") from None
            if p == 0:
                raise UsageError("p must be nonzero")
            out.append(Coupling(p, q))
    if not out:
        raise UsageError(f"{path}: no couplings")
    return out


def cmd_scan(cfg):
    from .fractal import COVER_BOUND, dimension_vs_params

    bound = COVER_BOUND if cfg.bound_C is None else cfg.bound_C
    res = dimension_vs_params(read_couplings(cfg.path), cfg.level, cfg.n_scales, bound, cfg.tol,
                              workers=threads())
    return Table(["p", "q", "estimate", "stderr", "r2", "converged"],
                 [(c.p, c.q, e.value, e.stderr, e.r_squared, e.converged) for c, e in res])


def cmd_dos(cfg):
    from .dos import dimension_gap_report, ids, pointwise_dimension

    f = ids(cfg.level, cfg.coupling, cfg.tol)
    if cfg.at is not None:
        est = pointwise_dimension(cfg.at, cfg.coupling, cfg.level, ids_fn=f)
        out = est.as_dict()
        out["E"] = cfg.at
        out["ids"] = f(cfg.at)
        out["converged"] = est.r_squared >= 0.9
        return out
    if cfg.report is not None:
        rows = dimension_gap_report(cfg.coupling, cfg.level, cfg.report, cfg.seed, ids_fn=f)
        return Table(["E", "d", "d_stderr", "local_dim", "local_stderr", "gap", "converged"],
                     [(E, d.value, d.stderr, loc.value, loc.stderr, gap, ok)
                      for E, d, loc, gap, ok in rows])
    bp = f.breakpoints
    return Table(["energy", "ids"], list(zip(bp, f(bp))))


def cmd_surface(cfg):
    pts = surface_mesh(cfg.v, cfg.box, cfg.n)
    return Table(["x", "y", "z"], [tuple(t) for t in pts])


VERIFY_COUPLINGS = [Coupling(1, 0), Coupling(2, 0), Coupling(1, 2), Coupling(2, 1), Coupling(0.5, -1)]


def _check_trace(seed):
    from .transfer import half_trace

    rng = np.random.default_rng(seed)
    worst = 0.0
    for c in VERIFY_COUPLINGS:
        lams = rng.uniform(-3.0, 3.0, 20)
        for k in range(2, 13):
            a = trace_poly_eval(k, lams, c)
            b = half_trace(fib_word(k), lams, c, TRACE)
            worst = max(worst, float(np.max(np.abs(a - b) / np.maximum(1.0, np.abs(b)))))
    return worst <= 1e-9, f"max rel err {worst:.3g}"


def _check_bands(seed):
    worst = 0.0
    for c in VERIFY_COUPLINGS:
        for k in range(2, 9):
            a = bands(k, c).bands
            b = band_edges_oracle(k, c, convention=TRACE)
            if len(a) != len(b):
                return False, f"band count differs at k={k}, c={c}"
            worst = max(worst, float(np.max(np.abs(a.array - b.array))))
    return worst <= 1e-8, f"max edge err {worst:.3g}"


def _check_invariant(seed):
    from .spectrum import bounded_seeds

    rng = np.random.default_rng(seed)
    worst = 0.0
    n_orbits = 0
    while n_orbits < 200:
        c = Coupling(rng.uniform(0.3, 3.0) * rng.choice([-1, 1]), rng.uniform(-3.0, 3.0))
        for lam in bounded_seeds(c, 10, rng, depth=40, k=14):
            pts = orbit(float(lam), c, 40)
            i0 = invariant(pts[0])
            for t in pts:
                if max(abs(t.x), abs(t.y), abs(t.z)) > 1e6:
                    break
                worst = max(worst, abs(invariant(t) - i0) / (1.0 + abs(i0)))
            n_orbits += 1
    return worst <= 1e-8, f"{n_orbits} bounded orbits, max rel drift {worst:.3g}"


def _check_calibration(seed):
    from .tracemap import calibrate_cell

    conv = calibrate_cell(kmax=12, seed=seed)
    return conv == TRACE, f"orbit traces the {conv} cell"


def cmd_verify(cfg):
    checks = [("trace_vs_matrix", _check_trace), ("bands_vs_eigensolver", _check_bands),
              ("invariant_conservation", _check_invariant), ("cell_calibration", _check_calibration)]
    rows = []
    for name, fn in checks:
        ok, detail = fn(cfg.seed)
        rows.append((name, "pass" if ok else "fail", detail))
    return Table(["check", "status", "detail"], rows)


_DISPATCH = {
    "word": cmd_word, "oracle": cmd_oracle, "orbit": cmd_orbit, "bands": cmd_bands,
    "spectrum": cmd_spectrum, "measure-scan": cmd_measure_scan, "dimension": cmd_dimension,
    "profile": cmd_profile, "scan": cmd_scan, "dos": cmd_dos, "surface": cmd_surface,
    "verify": cmd_verify,
}


def run(cfg: RunConfig) -> tuple[int, str]:
    """Execute a validated config; returns (exit status, rendered output)."""
    result = _DISPATCH[cfg.command](cfg)
    text = render(cfg, result)
    status = EXIT_OK
    if cfg.command == "verify" and any(r[1] != "pass" for r in result.rows):
        status = EXIT_VERIFY
    return status, text


def main(argv=None) -> int:
    try:
        cfg = parse_args(argv)
    except UsageError as exc:
        print(f"fibspec: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except SystemExit as exc:  # argparse usage errors and --help
        return int(exc.code or 0)
    try:
        status, text = run(cfg)
    except UsageError as exc:
        print(f"fibspec: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ArithmeticError, BandCountError) as exc:  # includes FloatingPointError
        print(f"fibspec: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except ValueError as exc:  # a precondition on the requested values
        print(f"fibspec: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    if cfg.out:
        with open(cfg.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return status


if __name__ == "__main__":
    sys.exit(main())
