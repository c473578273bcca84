"""Command-line front end.

::

    vqlm verify --profile tanh_step:m0=1,a=0.5,lambda=2
    vqlm energy --profile affine:m0=1,a=0.5 --d 10 --format json
    vqlm coefficients --profile constant:m0=2 --output coeffs.csv
    vqlm loop-invariant --profile affine:m0=1,a=0.5,m_ref=1 --c 0.5

Exit status: 0 on success, 1 when a check fails or a computation raises a
numerical error, 2 on invalid arguments.
"""

import argparse
from dataclasses import dataclass, field
import csv
import io
import json
import math
import os
import sys
import tempfile

from .checks import LOOP_C_VALUES, coefficient_rows, run_battery
from .embedding import SolvabilityError
from .energy import ConsistencyError, leading_closed, leading_assembled, leading_numeric
from .loopinv import invariant
from .massaspect import dec_satisfied, parse_profile
from .s2grid import DEFAULT_N, build_grid
from .seriesx import DEFAULT_SCHEDULE
from .vaidyageom import GeometryError

__all__ = ["RunConfig", "build_parser", "parse_config", "run", "main"]

COMMANDS = ("verify", "energy", "coefficients", "loop-invariant")
DEFAULT_PROFILE = "tanh_step:m0=1,a=0.5,lambda=2"
GRID_ENV = "VQLM_GRID_N"

ENERGY_COLUMNS = ("profile", "d", "E_closed", "E_lemma", "E_numeric",
                  "lemma_minus_closed", "numeric_minus_closed", "dec_satisfied")
LOOP_COLUMNS = ("profile", "c", "numeric", "closed", "error", "signed_numeric", "signed_closed")
VERIFY_COLUMNS = ("check", "value", "tolerance", "relation", "passed", "detail")
COEFF_LABELS = ("sigma", "alpha", "V_m1", "bh_m1", "div_m1", "V_m2", "bh_m2")
COEFF_COLUMNS = ("Z",) + tuple(f"{k}_{s}" for k in COEFF_LABELS
                               for s in ("extracted", "closed", "abs_error"))

NUMERICAL_ERRORS = (SolvabilityError, ConsistencyError, GeometryError, ArithmeticError,
                    FloatingPointError)


@dataclass(frozen=True)
class RunConfig:
    command: str
    profile: str = DEFAULT_PROFILE
    grid_n: int = DEFAULT_N
    d_list: tuple = DEFAULT_SCHEDULE
    schedule: tuple = DEFAULT_SCHEDULE
    c_list: tuple = LOOP_C_VALUES
    output_path: str = None
    format: str = "csv"
    tolerance_overrides: dict = field(default_factory=dict)

    def to_argv(self):
        """Command-line form; ``parse_config(cfg.to_argv()) == cfg``."""
        # "=" keeps lists that start with a minus sign from reading as options
        argv = [self.command, f"--profile={self.profile}", f"--n={self.grid_n}",
                f"--d={_join(self.d_list)}", f"--schedule={_join(self.schedule)}",
                f"--c={_join(self.c_list)}", f"--format={self.format}"]
        if self.output_path is not None:
            argv.append(f"--output={self.output_path}")
        for k in sorted(self.tolerance_overrides):
            argv.append(f"--tol={k}={_num(self.tolerance_overrides[k])}")
        return argv


def _num(v):
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, int):
        return str(v)
    return format(v, ".17g")


def _join(values):
    return ",".join(_num(float(v)) for v in values)


def _float_list(text):
    try:
        vals = tuple(float(t) for t in text.replace(" ", ",").split(",") if t)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a comma-separated list of numbers: {text!r}") from None
    if not vals or not all(math.isfinite(v) for v in vals):
        raise argparse.ArgumentTypeError(f"need finite numbers, got {text!r}")
    return vals


def _tolerance(text):
    name, sep, value = text.partition("=")
    try:
        v = float(value)
    except ValueError:
        v = math.nan
    if not sep or not name or not math.isfinite(v):
        raise argparse.ArgumentTypeError(f"expected NAME=VALUE, got {text!r}")
    return name.strip(), v


_EPILOGS = {
    "verify": "Prints one line per check. Report columns: " + ", ".join(VERIFY_COLUMNS) + ".",
    "energy": "Rows per d. Columns: " + ", ".join(ENERGY_COLUMNS) + ". E_numeric is the "
              "numerically extracted leading coefficient (from --schedule) divided by d^2.",
    "coefficients": "Rows per grid node. Columns: Z, then <name>_extracted, <name>_closed, "
                    "<name>_abs_error for " + ", ".join(COEFF_LABELS) + ".",
    "loop-invariant": "Rows per c. Columns: " + ", ".join(LOOP_COLUMNS) + ".",
}

_SUMMARIES = {
    "verify": "run the full check battery and exit 1 on any failure",
    "energy": "closed, lemma-path and numeric energies per distance d",
    "coefficients": "extracted vs closed-form expansion coefficients per grid node",
    "loop-invariant": "cap integral vs closed boundary form per circle height c",
}


def build_parser():
    parser = argparse.ArgumentParser(
        prog="vqlm", description="Quasi-local energy of unit spheres near null infinity "
                                 "of Vaidya spacetimes: checks and reports.")
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")
    env_n = os.environ.get(GRID_ENV)
    for name in COMMANDS:
        p = sub.add_parser(name, help=_SUMMARIES[name], epilog=_EPILOGS[name])
        p.add_argument("--profile", default=DEFAULT_PROFILE,
                       help="mass aspect profile as name:key=value,... (default %(default)s)")
        p.add_argument("--n", dest="grid_n", default=env_n, type=str,
                       help=f"grid size, >= 8 (default ${GRID_ENV} or {DEFAULT_N})")
        p.add_argument("--d", dest="d_list", type=_float_list, default=DEFAULT_SCHEDULE,
                       help="comma-separated distances d >= 10 for report rows")
        p.add_argument("--schedule", type=_float_list, default=DEFAULT_SCHEDULE,
                       help="distances used for coefficient extraction (default 250,500,1000,2000)")
        p.add_argument("--c", dest="c_list", type=_float_list, default=LOOP_C_VALUES,
                       help="comma-separated circle heights c in (-0.99, 0.99)")
        p.add_argument("--output", dest="output_path", default=None,
                       help="report file (default: standard output)")
        p.add_argument("--format", choices=("csv", "json"), default="csv")
        p.add_argument("--tol", action="append", type=_tolerance, default=[],
                       metavar="NAME=VALUE", help="override a verify tolerance (repeatable)")
    return parser


def parse_config(argv):
    """Parse arguments into a :class:`RunConfig`; invalid input exits with status 2."""
    parser = build_parser()
    ns = parser.parse_args(argv)
    n_text = ns.grid_n if ns.grid_n is not None else str(DEFAULT_N)
    try:
        grid_n = int(n_text)
    except ValueError:
        parser.error(f"grid size must be an integer, got {n_text!r}")
    if grid_n < 8:
        parser.error(f"grid size must be >= 8, got {grid_n}")
    try:
        profile = parse_profile(ns.profile).spec
    except ValueError as exc:
        parser.error(str(exc))
    if any(d < 10 for d in ns.d_list):
        parser.error("every --d value must be >= 10")
    if len(ns.schedule) < 3 or min(ns.schedule) < 10:
        parser.error("--schedule needs at least 3 distances, each >= 10")
    if len(set(ns.schedule)) != len(ns.schedule):
        parser.error("--schedule values must be distinct")
    if any(not -0.99 < c < 0.99 for c in ns.c_list):
        parser.error("every --c value must lie in (-0.99, 0.99)")
    from .checks import DEFAULT_TOLERANCES
    tols = dict(ns.tol)
    unknown = sorted(set(tols) - set(DEFAULT_TOLERANCES))
    if unknown:
        parser.error(f"unknown tolerance name(s) {unknown}; known: {sorted(DEFAULT_TOLERANCES)}")
    return RunConfig(ns.command, profile, grid_n, tuple(ns.d_list), tuple(ns.schedule),
                     tuple(ns.c_list), ns.output_path, ns.format, tols)


# -- serialization -----------------------------------------------------------

def _cell(v):
    if isinstance(v, float):
        return format(v, ".17g")
    return _num(v) if isinstance(v, (bool, int)) else str(v)


def to_csv(rows, columns):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\r\n")
    w.writerow(columns)
    for row in rows:
        w.writerow([_cell(row[c]) for c in columns])
    return buf.getvalue()


def _json_value(v):
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return format(v, ".17g") if math.isfinite(v) else "null"
    if isinstance(v, int):
        return str(v)
    return json.dumps(v, ensure_ascii=False)


def to_json(rows, columns):
    items = []
    for row in rows:
        body = ", ".join(f"{json.dumps(c)}: {_json_value(row[c])}" for c in columns)
        items.append("  {" + body + "}")
    return "[\n" + ",\n".join(items) + "\n]\n" if items else "[]\n"


def render(rows, columns, fmt):
    return to_csv(rows, columns) if fmt == "csv" else to_json(rows, columns)


def write_atomic(path, text):
    """Write ``text`` to ``path`` through a temporary file in the same directory."""
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(prefix=".vqlm-", suffix=".tmp", dir=directory)
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


# -- commands ---------------------------------------------------------------

def energy_rows(p, grid, d_list, schedule):
    lc = leading_closed(p, grid)
    ll = leading_assembled(p, grid)
    ln, _, _ = leading_numeric(p, grid, schedule)
    dec = dec_satisfied(p)
    rows = []
    for d in d_list:
        d2 = d * d
        ec, el, en = lc / d2, ll / d2, ln / d2
        rows.append({"profile": p.spec, "d": float(d), "E_closed": ec, "E_lemma": el,
                     "E_numeric": en, "lemma_minus_closed": el - ec,
                     "numeric_minus_closed": en - ec, "dec_satisfied": dec})
    return rows


def loop_rows(p, c_list, n):
    rows = []
    for c in c_list:
        s = invariant(p, c, n)
        rows.append({"profile": p.spec, "c": s.c, "numeric": s.numeric, "closed": s.closed,
                     "error": s.error, "signed_numeric": s.signed_numeric,
                     "signed_closed": s.signed_closed})
    return rows


def _emit(cfg, rows, columns, stdout):
    text = render(rows, columns, cfg.format)
    if cfg.output_path is None:
        stdout.write(text)
    else:
        write_atomic(cfg.output_path, text)


def run(cfg, stdout=None, stderr=None):
    """Execute a configuration; returns the exit status."""
    stdout = sys.stdout if stdout is None else stdout
    stderr = sys.stderr if stderr is None else stderr
    p = parse_profile(cfg.profile)
    grid = build_grid(cfg.grid_n)
    try:
        if cfg.command == "verify":
            results = run_battery(p, grid, cfg.schedule, cfg.tolerance_overrides)
            width = max(len(r.name) for r in results)
            for r in results:
                # runtime varies run to run; keep the table itself deterministic
                shown = "ok" if r.name == "battery.runtime_seconds" else format(r.value, ".3e")
                stdout.write(f"{'PASS' if r.passed else 'FAIL'}  {r.name:<{width}}  "
                             f"{shown:>10} {r.relation} {r.tolerance:.1e}  {r.detail}\n")
            failed = [r.name for r in results if not r.passed]
            stdout.write(f"{len(results) - len(failed)}/{len(results)} checks passed\n")
            if cfg.output_path is not None:
                rows = [r.row() for r in results]
                for row in rows:
                    if row["check"] == "battery.runtime_seconds":
                        row["value"] = "ok" if row["passed"] else "exceeded"
                write_atomic(cfg.output_path, render(rows, VERIFY_COLUMNS, cfg.format))
            if failed:
                stderr.write("failed checks: " + ", ".join(failed) + "\n")
                return 1
            return 0
        if cfg.command == "energy":
            _emit(cfg, energy_rows(p, grid, cfg.d_list, cfg.schedule), ENERGY_COLUMNS, stdout)
        elif cfg.command == "coefficients":
            _emit(cfg, coefficient_rows(p, grid, cfg.schedule), COEFF_COLUMNS, stdout)
        else:
            _emit(cfg, loop_rows(p, cfg.c_list, cfg.grid_n), LOOP_COLUMNS, stdout)
    except NUMERICAL_ERRORS as exc:
        stderr.write(f"{cfg.command}: numerical failure ({type(exc).__name__}): {exc}\n")
        return 1
    return 0


def main(argv=None):
    cfg = parse_config(sys.argv[1:] if argv is None else argv)
    return run(cfg)


if __name__ == "__main__":
    sys.exit(main())
