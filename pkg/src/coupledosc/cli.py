"""Command-line interface: ``coupledosc {spectrum,verify,trace,sweep,eigenstate}``.

Parameters come from flags or a flat JSON config file (``--config``); flags
override file values. Tables go to standard output unless ``--out`` is given.

Exit codes: 0 success, 1 verification failure, 2 usage, config or domain error.
"""
import argparse
import csv
import io
import json
import math
import sys
from dataclasses import dataclass, fields

import numpy as np

from .algebra import ModelParams
from .errors import ConfigError, DomainError, LeakageError
from .fock import FockBasis, FockStateLabel

COMMANDS = ("spectrum", "verify", "trace", "sweep", "eigenstate")

SCHEMAS = {
    "spectrum": ("N", "m", "n1", "n2", "E"),
    "sweep": ("lambda", "omega_plus", "omega_minus", "E_ground", "domain_ok"),
    "trace": ("stage", "offdiag_residual"),
    "verify": ("suite", "assertion", "status", "measured", "bound"),
    "eigenstate": ("section", "n_a", "n_b", "r", "phi", "re", "im"),
}


@dataclass
class RunConfig:
    omega1: float = None
    omega2: float = None
    lam: float = None
    psi: float = 0.0
    cutoff: int = 30
    tolerance: float = 1e-8
    levels: int = 10
    lambda_range: tuple = None
    N: int = None
    m: int = None
    grid: tuple = None
    format: str = None
    out: str = None
    suite: str = "all"

    def model(self, lam=None):
        for name, value in (("omega1", self.omega1), ("omega2", self.omega2)):
            if value is None:
                raise ConfigError(name, "required for this command")
        lam = self.lam if lam is None else lam
        if lam is None:
            raise ConfigError("lambda", "required for this command")
        return ModelParams(self.omega1, self.omega2, lam, self.psi)


# config keys as they appear in a JSON file, mapped to RunConfig attributes
_FILE_KEYS = {
    "omega1": "omega1", "omega2": "omega2", "lambda": "lam", "psi": "psi",
    "cutoff": "cutoff", "tolerance": "tolerance", "levels": "levels",
    "lambda-range": "lambda_range", "lambda_range": "lambda_range",
    "N": "N", "m": "m", "grid": "grid", "format": "format", "out": "out", "suite": "suite",
}


def _build_parser():
    parser = argparse.ArgumentParser(prog="coupledosc", description=__doc__.splitlines()[0])
    parser.add_argument("command", choices=COMMANDS)
    parser.add_argument("--omega1", type=str)
    parser.add_argument("--omega2", type=str)
    parser.add_argument("--lambda", dest="lam", type=str)
    parser.add_argument("--psi", type=str)
    parser.add_argument("--cutoff", type=str)
    parser.add_argument("--tolerance", type=str)
    parser.add_argument("--levels", type=str)
    parser.add_argument("--lambda-range", dest="lambda_range", type=str, metavar="A:B:S")
    parser.add_argument("--N", dest="N", type=str)
    parser.add_argument("--m", dest="m", type=str)
    parser.add_argument("--grid", type=str, metavar="RMAX:PTS")
    parser.add_argument("--format", choices=("csv", "json"))
    parser.add_argument("--out", type=str, metavar="PATH")
    parser.add_argument("--config", type=str, metavar="PATH")
    parser.add_argument("--suite", type=str)
    return parser


def _as_float(field, value):
    try:
        out = float(value)
    except (TypeError, ValueError):
        raise ConfigError(field, f"expected a number, got {value!r}") from None
    if not math.isfinite(out):
        raise ConfigError(field, f"must be finite, got {value!r}")
    return out


def _as_int(field, value):
    if isinstance(value, bool):
        raise ConfigError(field, f"expected an integer, got {value!r}")
    try:
        out = float(value)
    except (TypeError, ValueError):
        raise ConfigError(field, f"expected an integer, got {value!r}") from None
    if not out.is_integer():
        raise ConfigError(field, f"expected an integer, got {value!r}")
    return int(out)


def _split(field, value, parts):
    items = str(value).split(":")
    if len(items) != parts:
        raise ConfigError(field, f"expected {parts} colon-separated values, got {value!r}")
    return items


def _read_config_file(path):
    try:
        with open(path, encoding="utf-8") as handle:
            data = json.load(handle)
    except OSError as exc:
        raise ConfigError("config", f"cannot read {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError("config", f"{path} is not valid JSON ({exc.msg})") from None
    if not isinstance(data, dict):
        raise ConfigError("config", f"{path} must hold a JSON object")
    merged = {}
    for key, value in data.items():
        name = key.lstrip("-")
        if name not in _FILE_KEYS:
            raise ConfigError(key, "unknown config field")
        merged[_FILE_KEYS[name]] = value
    return merged


def parse_config(argv):
    """Return ``(command, RunConfig)`` from command-line tokens.

    Precedence: flags, then the ``--config`` file, then built-in defaults.
    """
    args = _build_parser().parse_args(argv)
    raw = {}
    if args.config:
        raw.update(_read_config_file(args.config))
    for f in fields(RunConfig):
        value = getattr(args, f.name, None)
        if value is not None:
            raw[f.name] = value

    cfg = RunConfig()
    for key in ("omega1", "omega2", "lam", "psi", "tolerance"):
        if key in raw:
            setattr(cfg, key, _as_float("lambda" if key == "lam" else key, raw[key]))
    for key in ("cutoff", "levels", "N", "m"):
        if key in raw:
            setattr(cfg, key, _as_int(key, raw[key]))
    for key in ("format", "out", "suite"):
        if key in raw:
            setattr(cfg, key, str(raw[key]))
    if "lambda_range" in raw:
        a, b, s = (_as_float("lambda-range", x) for x in _split("lambda-range", raw["lambda_range"], 3))
        if s <= 0:
            raise ConfigError("lambda-range", "step must be positive")
        if b < a:
            raise ConfigError("lambda-range", "stop must not be below start")
        cfg.lambda_range = (a, b, s)
    if "grid" in raw:
        rmax, pts = _split("grid", raw["grid"], 2)
        rmax, pts = _as_float("grid", rmax), _as_int("grid", pts)
        if rmax <= 0 or pts < 2:
            raise ConfigError("grid", "need r_max > 0 and at least 2 points")
        cfg.grid = (rmax, pts)
    _validate(cfg)
    return args.command, cfg


def _validate(cfg):
    for name, value in (("omega1", cfg.omega1), ("omega2", cfg.omega2)):
        if value is not None and value <= 0:
            raise ConfigError(name, f"must be positive, got {value}")
    if cfg.lam is not None and cfg.lam < 0:
        raise ConfigError("lambda", f"must be non-negative, got {cfg.lam}")
    if cfg.cutoff < 1:
        raise ConfigError("cutoff", f"must be at least 1, got {cfg.cutoff}")
    if cfg.tolerance <= 0:
        raise ConfigError("tolerance", f"must be positive, got {cfg.tolerance}")
    if cfg.levels < 1:
        raise ConfigError("levels", f"must be at least 1, got {cfg.levels}")
    if cfg.format not in (None, "csv", "json"):
        raise ConfigError("format", f"must be csv or json, got {cfg.format!r}")


# ---------------------------------------------------------------------------
# output


def _csv_cell(value):
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (float, np.floating)):
        return format(float(value), ".17g")
    return value


def _json_value(value):
    if isinstance(value, (np.floating, float)):
        value = float(value)
        return value if math.isfinite(value) else None
    if isinstance(value, np.integer):
        return int(value)
    return value


def render_table(rows, columns, fmt):
    """Rows (dicts) as CSV with a header line, or as a JSON array of objects."""
    if fmt == "json":
        data = [{c: _json_value(row.get(c)) for c in columns} for row in rows]
        return json.dumps(data, indent=1) + "\n"
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([_csv_cell(row.get(c)) for c in columns])
    return buf.getvalue()


def write_table(rows, columns, fmt, destination=None):
    text = render_table(rows, columns, fmt)
    if destination is None:
        sys.stdout.write(text)
        return
    try:
        with open(destination, "w", encoding="utf-8", newline="") as handle:
            handle.write(text)
    except OSError as exc:
        raise ConfigError("out", f"cannot write {destination}: {exc.strerror}") from None


# ---------------------------------------------------------------------------
# commands


def _cmd_spectrum(cfg):
    from .spectrum import enumerate_levels

    lines = enumerate_levels(cfg.model(), cfg.levels)
    return [{"N": ln.N, "m": ln.m, "n1": ln.n1, "n2": ln.n2, "E": ln.E} for ln in lines], 0


def _cmd_verify(cfg):
    from .verification import SUITES, run_suites

    names = tuple(s.strip() for s in cfg.suite.split(","))
    bad = [n for n in names if n != "all" and n not in SUITES]
    if bad:
        raise ConfigError("suite", f"unknown suite {bad[0]!r}; choose from {', '.join(SUITES + ('all',))}")
    checks, timings = run_suites(names, cutoff=cfg.cutoff, tolerance=cfg.tolerance)
    failed = sum(c.status != "pass" for c in checks)
    summary = ", ".join(f"{k} {v:.1f}s" for k, v in timings.items())
    print(f"{len(checks) - failed}/{len(checks)} checks passed ({summary})", file=sys.stderr)
    return [c.as_dict() for c in checks], (1 if failed else 0)


def _cmd_trace(cfg):
    from .tilting import stage_hamiltonians

    reports = stage_hamiltonians(cfg.model(), FockBasis(cfg.cutoff))
    return [{"stage": r.stage, "offdiag_residual": r.offdiag_residual} for r in reports], 0


def _sweep_values(a, b, s):
    count = int(math.floor((b - a) / s + 1e-9)) + 1
    return [a + i * s for i in range(count)]


def _cmd_sweep(cfg):
    from .spectrum import closed_form_coefficients, energy

    if cfg.lambda_range is None:
        raise ConfigError("lambda-range", "required for sweep")
    rows = []
    for lam in _sweep_values(*cfg.lambda_range):
        params = cfg.model(lam)
        row = {"lambda": lam, "omega_plus": None, "omega_minus": None, "E_ground": None, "domain_ok": False}
        if params.valid:
            try:
                c = closed_form_coefficients(params)
            except DomainError:
                c = None
            if c is not None:
                row.update(omega_plus=c.omega_plus, omega_minus=c.omega_minus,
                           E_ground=energy(params, 0, 0), domain_ok=True)
        rows.append(row)
    return rows, 0


def _cmd_eigenstate(cfg):
    from .wavefunctions import radial_eigenfunction, tilted_eigenstate

    for name in ("N", "m"):
        if getattr(cfg, name) is None:
            raise ConfigError(name, "required for eigenstate")
    try:
        FockStateLabel(cfg.N, cfg.m)
    except ValueError as exc:
        raise ConfigError("N" if cfg.N < 0 else "m", str(exc)) from None
    if 4 * cfg.N > cfg.cutoff:
        raise ConfigError("N", f"must not exceed cutoff/4 = {cfg.cutoff // 4}")
    basis = FockBasis(cfg.cutoff)
    try:
        state = tilted_eigenstate(cfg.model(), basis, cfg.N, cfg.m)
    except LeakageError as exc:
        raise ConfigError("cutoff", str(exc)) from None
    rows = []
    for idx in np.flatnonzero(np.abs(state.amplitudes) > 1e-15):
        na, nb = basis.occupations(idx)
        amp = state.amplitudes[idx]
        rows.append({"section": "fock", "n_a": na, "n_b": nb, "re": amp.real, "im": amp.imag})
    if cfg.grid is not None:
        rmax, pts = cfg.grid
        r = np.linspace(0.0, rmax, pts)
        phi = np.linspace(0.0, 2 * np.pi, pts, endpoint=False)
        rr, pp = np.meshgrid(r, phi, indexing="ij")
        n_r = (cfg.N - abs(cfg.m)) // 2
        values = radial_eigenfunction(n_r, cfg.m, rr, pp)
        for ri, pi, v in zip(rr.ravel(), pp.ravel(), values.ravel()):
            rows.append({"section": "polar", "r": ri, "phi": pi, "re": v.real, "im": v.imag})
    return rows, 0


_HANDLERS = {
    "spectrum": _cmd_spectrum,
    "verify": _cmd_verify,
    "trace": _cmd_trace,
    "sweep": _cmd_sweep,
    "eigenstate": _cmd_eigenstate,
}


def run(command, cfg):
    """Execute ``command``; returns the exit status after writing the table."""
    rows, status = _HANDLERS[command](cfg)
    fmt = cfg.format or ("json" if command == "verify" else "csv")
    write_table(rows, SCHEMAS[command], fmt, cfg.out)
    return status


def main(argv=None):
    try:
        command, cfg = parse_config(sys.argv[1:] if argv is None else argv)
        return run(command, cfg)
    except ConfigError as exc:
        print(f"coupledosc: config error: {exc}", file=sys.stderr)
        return 2
    except DomainError as exc:
        where = f" ({exc.argument})" if exc.argument else ""
        print(f"coupledosc: domain error{where}: {exc}", file=sys.stderr)
        return 2
    except SystemExit as exc:  # argparse usage errors
        return exc.code if isinstance(exc.code, int) else 2


if __name__ == "__main__":
    sys.exit(main())
