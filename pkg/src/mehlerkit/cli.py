"""Command-line interface: ``mehlerkit eval | verify | table``.

Exit codes: 0 success, 1 evaluation or check failure, 2 usage or
configuration error.  A JSON config file (``--config`` or the
``MEHLERKIT_CONFIG`` environment variable) may set ``quad``,
``output_format``, ``seed`` and ``tolerances``; unknown keys are rejected.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import re
import os
import sys
import tempfile
from dataclasses import dataclass, field, fields
from typing import Callable

import numpy as np

from . import kernels, verify
from .errors import MehlerError
from .kernels import KernelParams, PFlowParams, RadialPoint
from .quadrature import EvalResult, QuadConfig

CONFIG_ENV = "MEHLERKIT_CONFIG"
FORMATS = ("json", "csv", "plain")
VERIFY_SUITES = ("identities", "conformal", "pde", "limit", "homogeneity", "cauchy", "pflow", "all")


class UsageError(Exception):
    """Bad flags or configuration (exit code 2)."""


@dataclass(frozen=True)
class CliConfig:
    quad: QuadConfig | None = None
    output_format: str = "plain"
    seed: int = verify.DEFAULT_SEED
    tolerances: verify.Tolerances = field(default_factory=verify.Tolerances)

    @classmethod
    def from_dict(cls, data: dict) -> "CliConfig":
        if not isinstance(data, dict):
            raise UsageError("config must be a JSON object")
        allowed = {f.name for f in fields(cls)}
        unknown = set(data) - allowed
        if unknown:
            raise UsageError(f"unknown config keys: {sorted(unknown)}")
        kwargs = {}
        try:
            if "quad" in data:
                _reject_unknown(data["quad"], QuadConfig, "quad")
                kwargs["quad"] = QuadConfig(**data["quad"])
            if "tolerances" in data:
                _reject_unknown(data["tolerances"], verify.Tolerances, "tolerances")
                kwargs["tolerances"] = verify.Tolerances(**data["tolerances"])
        except (TypeError, ValueError) as exc:
            raise UsageError(f"invalid config: {exc}") from exc
        if "output_format" in data:
            if data["output_format"] not in FORMATS:
                raise UsageError(f"output_format must be one of {FORMATS}")
            kwargs["output_format"] = data["output_format"]
        if "seed" in data:
            if not isinstance(data["seed"], int) or isinstance(data["seed"], bool):
                raise UsageError("seed must be an integer")
            kwargs["seed"] = data["seed"]
        return cls(**kwargs)


def _reject_unknown(section, kind, name):
    if not isinstance(section, dict):
        raise UsageError(f"config section {name!r} must be an object")
    unknown = set(section) - {f.name for f in fields(kind)}
    if unknown:
        raise UsageError(f"unknown keys in {name!r}: {sorted(unknown)}")


def load_config(path: str | None) -> CliConfig:
    path = path or os.environ.get(CONFIG_ENV)
    if not path:
        return CliConfig()
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except OSError as exc:
        raise UsageError(f"cannot read config {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise UsageError(f"config {path} is not valid JSON: {exc}") from exc
    return CliConfig.from_dict(data)


# ---------------------------------------------------------------------------
# subjects


def _need(ns, *names):
    missing = [n for n in names if getattr(ns, n, None) is None]
    if missing:
        raise UsageError("missing required flag(s): " + ", ".join("--" + m.replace("_", "-") for m in missing))
    return [getattr(ns, n) for n in names]


def _radii(ns):
    """``(r, s)`` from ``--r/--s`` or the vector forms ``--z/--sigma``."""
    r = ns.r if ns.r is not None else (float(np.linalg.norm(ns.z)) if ns.z is not None else None)
    s = ns.s if ns.s is not None else (float(np.linalg.norm(ns.sigma)) if ns.sigma is not None else None)
    if r is None:
        raise UsageError("missing required flag: --r (or --z)")
    if s is None:
        raise UsageError("missing required flag: --s (or --sigma)")
    return r, s


def _int(x, name):
    if int(x) != x:
        raise UsageError(f"--{name} must be an integer")
    return int(x)


def _ev_gauge(ns, cfg):
    r, s = _radii(ns)
    return kernels.gauge(r, s)


def _ev_mehler_g(ns, cfg):
    alpha, beta, k, t = _need(ns, "alpha", "beta", "k", "t")
    r, s = _radii(ns)
    return kernels.mehler_g(KernelParams(alpha, beta, _int(k, "k")), RadialPoint(r, s, t), cfg)


def _ev_gh(ns, cfg):
    m, k, t = _need(ns, "m", "k", "t")
    r, s = _radii(ns)
    return kernels.gh_kernel(_int(m, "m"), _int(k, "k"), RadialPoint(r, s, t), cfg)


def _ev_kernel_k(ns, cfg):
    alpha, k, rho, t = _need(ns, "alpha", "k", "rho", "t")
    r, s = _radii(ns)
    return kernels.mehler_kernel_k(alpha, _int(k, "k"), r, rho, s, t, cfg)


def _ev_pole(ns, cfg):
    alpha, k, t = _need(ns, "alpha", "k", "t")
    r, s = _radii(ns)
    return kernels.kernel_k_at_pole(alpha, _int(k, "k"), RadialPoint(r, s, t), cfg)


def _ev_ou(ns, cfg):
    omega, t = _need(ns, "omega", "t")
    x, y = _need(ns, "x", "y")
    if len(x) != len(y):
        raise UsageError("--x and --y must have the same length")
    return kernels.ou_mehler_kernel(len(x), omega, x, y, t)


def _ev_hat(ns, cfg):
    alpha, lam, r, rho, t = _need(ns, "alpha", "lam", "r", "rho", "t")
    return kernels.hat_propagator(alpha, lam, r, rho, t)


def _ev_gp_euclid(ns, cfg):
    n, p, r, t = _need(ns, "n", "p", "r", "t")
    return kernels.gp_euclid(PFlowParams(_int(n, "n"), p), r, t)


def _ev_gp_euclid_energy(ns, cfg):
    n, p, r = _need(ns, "n", "p", "r")
    return kernels.gp_euclid_energy(PFlowParams(_int(n, "n"), p), r)


def _ev_gp_heis(ns, cfg):
    n, p, t = _need(ns, "n", "p", "t")
    r, s = _radii(ns)
    return kernels.gp_heisenberg(PFlowParams(_int(n, "n"), p, heisenberg=True), RadialPoint(r, s, t), cfg,
                                 method=ns.method or "reduction")


def _ev_gp_heis_energy(ns, cfg):
    n, p = _need(ns, "n", "p")
    r, s = _radii(ns)
    return kernels.gp_heisenberg_energy(PFlowParams(_int(n, "n"), p, heisenberg=True), r, s, cfg)


def _ev_energy_num(ns, cfg):
    alpha, k = _need(ns, "alpha", "k")
    r, s = _radii(ns)
    return kernels.energy_numeric(alpha, _int(k, "k"), r, s, cfg)


def _ev_energy_closed(ns, cfg):
    alpha, k = _need(ns, "alpha", "k")
    r, s = _radii(ns)
    return kernels.energy_closed(alpha, _int(k, "k"), r, s, ns.variant or "thm")


SUBJECTS: dict[str, Callable] = {
    "gauge": _ev_gauge,
    "mehler-g": _ev_mehler_g,
    "kernel-k": _ev_kernel_k,
    "pole": _ev_pole,
    "gh": _ev_gh,
    "ou": _ev_ou,
    "hat": _ev_hat,
    "gp-euclid": _ev_gp_euclid,
    "gp-euclid-energy": _ev_gp_euclid_energy,
    "gp-heis": _ev_gp_heis,
    "gp-heis-energy": _ev_gp_heis_energy,
    "energy-num": _ev_energy_num,
    "energy-closed": _ev_energy_closed,
}

_ENERGY_SUBJECTS = ("energy-num", "energy-closed")


def evaluate(subject: str, ns, cfg: QuadConfig | None) -> dict:
    """Evaluate one subject; returns a flat record with ``value`` and ``err_estimate``."""
    out = SUBJECTS[subject](ns, cfg)
    if isinstance(out, EvalResult):
        value, err, converged = float(out.value), out.err_estimate, out.converged
    else:
        value, err, converged = float(out), 0.0, True
    rec = {"subject": subject, "inputs": _inputs(ns), "value": value, "err_estimate": err, "converged": converged}
    if subject in _ENERGY_SUBJECTS:
        r, s = _radii(ns)
        rec["value_times_gauge_power"] = value * kernels.gauge(r, s) ** (2 * ns.alpha + 2 * ns.k - 2)
    return rec


_INT_FLAGS = ("k", "m", "n")
_PARAM_FLAGS = ("alpha", "beta", "k", "m", "n", "p", "r", "s", "t", "rho", "omega", "lam")
_VECTOR_FLAGS = ("z", "sigma", "x", "y")


def _inputs(ns) -> dict:
    d = {n: getattr(ns, n) for n in _PARAM_FLAGS + _VECTOR_FLAGS if getattr(ns, n, None) is not None}
    for n in ("variant", "method"):
        if getattr(ns, n, None):
            d[n] = getattr(ns, n)
    return d


# ---------------------------------------------------------------------------
# argument parsing


def _vector(text: str) -> list[float]:
    try:
        vals = [float(x) for x in text.split(",") if x.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"not a comma-separated list of numbers: {text!r}") from exc
    if not vals:
        raise argparse.ArgumentTypeError("empty vector")
    return vals


def parse_grid(text: str) -> np.ndarray:
    """``"start:stop:count"`` (count >= 2, inclusive endpoints) to an array."""
    parts = text.split(":")
    if len(parts) != 3:
        raise argparse.ArgumentTypeError(f"grid must look like start:stop:count, got {text!r}")
    try:
        a, b = float(parts[0]), float(parts[1])
        n = int(parts[2])
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"malformed grid {text!r}") from exc
    if n < 2 or not (math.isfinite(a) and math.isfinite(b)):
        raise argparse.ArgumentTypeError(f"grid needs finite endpoints and count >= 2, got {text!r}")
    return np.linspace(a, b, n)


class _Parser(argparse.ArgumentParser):
    def __init__(self, *args, **kwargs):
        super().__init__(*args, **kwargs)
        # let vector values such as "-0.2,0.4" through as arguments
        self._negative_number_matcher = re.compile(r"^-[0-9.][0-9.eE+\-,]*$")

    def error(self, message):
        raise UsageError(message)


def _add_params(p):
    for name in _PARAM_FLAGS:
        p.add_argument(f"--{name}", type=int if name in _INT_FLAGS else float, default=None)
    for name in _VECTOR_FLAGS:
        p.add_argument(f"--{name}", type=_vector, default=None, help="comma-separated components")
    p.add_argument("--variant", choices=("thm", "meh"), default=None)
    p.add_argument("--method", choices=("reduction", "direct"), default=None)


def _add_common(p):
    p.add_argument("--format", choices=FORMATS, default=None)
    p.add_argument("--out", default=None, help="output file (default: standard output)")
    p.add_argument("--config", default=None, help=f"JSON config (default: ${CONFIG_ENV})")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="mehlerkit", description="Mehler-type kernels for Grushin operators and numerical checks of their identities.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p_eval = sub.add_parser("eval", help="evaluate one quantity")
    p_eval.add_argument("subject", choices=sorted(SUBJECTS))
    _add_params(p_eval)
    _add_common(p_eval)

    p_ver = sub.add_parser("verify", help="run a verification suite")
    p_ver.add_argument("suite", choices=VERIFY_SUITES)
    p_ver.add_argument("--tol", type=float, default=None, help="headline tolerance of the suite")
    p_ver.add_argument("--seed", type=int, default=None)
    p_ver.add_argument("--samples", type=int, default=50, help="random draws per identity")
    _add_common(p_ver)

    p_tab = sub.add_parser("table", help="sweep a subject over a grid (CSV)")
    p_tab.add_argument("subject", choices=sorted(SUBJECTS))
    _add_params(p_tab)
    for name in ("r", "s", "t", "rho", "alpha", "lam"):
        p_tab.add_argument(f"--{name}-grid", type=parse_grid, default=None, dest=f"{name}_grid")
    _add_common(p_tab)
    return parser


# ---------------------------------------------------------------------------
# output


def _write(text: str, out: str | None) -> None:
    if out is None:
        sys.stdout.write(text)
        sys.stdout.flush()
        return
    directory = os.path.dirname(os.path.abspath(out))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".mehlerkit-", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, out)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _csv_rows(rows: list[dict]) -> str:
    keys = []
    for row in rows:
        for key in row["inputs"]:
            if key not in keys:
                keys.append(key)
    extra = [k for k in ("value_times_gauge_power",) if any(k in row for row in rows)]
    header = ["subject"] + keys + ["value", "err_estimate", "converged"] + extra
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        cells = [row["subject"]]
        for key in keys:
            v = row["inputs"].get(key, "")
            cells.append(",".join(repr(x) for x in v) if isinstance(v, list) else v)
        cells += [repr(row["value"]), repr(row["err_estimate"]), row["converged"]]
        cells += [repr(row[k]) for k in extra]
        w.writerow(cells)
    return buf.getvalue()


def _format_eval(rec: dict, fmt: str) -> str:
    if fmt == "json":
        return json.dumps(rec, sort_keys=True) + "\n"
    if fmt == "csv":
        return _csv_rows([rec])
    text = repr(rec["value"])
    if rec["err_estimate"]:
        text += f" +/- {rec['err_estimate']:.2e}"
    if not rec["converged"]:
        text += " (not converged)"
    return text + "\n"


# ---------------------------------------------------------------------------
# commands


def cmd_eval(ns, conf: CliConfig) -> int:
    rec = evaluate(ns.subject, ns, conf.quad)
    _write(_format_eval(rec, ns.format or conf.output_format), ns.out)
    return 0


def cmd_verify(ns, conf: CliConfig) -> int:
    tol = conf.tolerances
    if ns.tol is not None:
        if not ns.tol > 0:
            raise UsageError("--tol must be positive")
        tol = tol.with_primary(ns.suite, ns.tol)
    if ns.samples < 1:
        raise UsageError("--samples must be positive")
    seed = ns.seed if ns.seed is not None else conf.seed
    report = verify.run_suite(ns.suite, tol, seed, conf.quad, ns.samples)
    fmt = ns.format or conf.output_format
    text = report.to_json() + "\n" if fmt == "json" else report.to_csv() if fmt == "csv" else report.to_plain()
    _write(text, ns.out)
    return 0 if report.overall_pass else 1


def cmd_table(ns, conf: CliConfig) -> int:
    grids = {name: getattr(ns, f"{name}_grid") for name in ("r", "s", "t", "rho", "alpha", "lam")
             if getattr(ns, f"{name}_grid") is not None}
    if not grids:
        raise UsageError("table needs at least one --<name>-grid")
    names = list(grids)
    mesh = np.meshgrid(*[grids[n] for n in names], indexing="ij")
    rows = []
    failed = False
    for idx in np.ndindex(mesh[0].shape):
        point = argparse.Namespace(**vars(ns))
        for n, arr in zip(names, mesh):
            setattr(point, n, float(arr[idx]))
        try:
            rows.append(evaluate(ns.subject, point, conf.quad))
        except MehlerError as exc:
            failed = True
            rows.append({"subject": ns.subject, "inputs": _inputs(point), "value": math.nan,
                         "err_estimate": math.nan, "converged": False})
            print(f"mehlerkit: {exc}", file=sys.stderr)
    fmt = ns.format or "csv"
    if fmt == "json":
        text = json.dumps(rows, sort_keys=True) + "\n"
    else:
        text = _csv_rows(rows)
    _write(text, ns.out)
    return 1 if failed else 0


COMMANDS = {"eval": cmd_eval, "verify": cmd_verify, "table": cmd_table}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
        conf = load_config(ns.config)
        return COMMANDS[ns.command](ns, conf)
    except UsageError as exc:
        print(f"mehlerkit: usage error: {exc}", file=sys.stderr)
        return 2
    except (MehlerError, ArithmeticError, ValueError) as exc:
        print(f"mehlerkit: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
