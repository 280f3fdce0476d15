"""Command-line front end.

Each subcommand writes one data file (CSV or JSON), a matching plotting
stub, and a JSON manifest recording the merged configuration.  Parameter
precedence: command-line flags, then a ``key = value`` config file, then
built-in defaults.

Exit status: 0 success, 1 computation or certification failure, 2 usage.
"""
from __future__ import annotations

import argparse
import datetime as _dt
import json
import logging
import math
import platform
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable

import numpy as np

from . import __version__, arith, orbits, rmt, spectra, zeros

log = logging.getLogger("rsl")


class UsageError(Exception):
    pass


@dataclass(frozen=True)
class Param:
    type: Callable[[str], Any]
    default: Any
    help: str
    check: Callable[[Any], bool] | None = None
    rule: str = ""


def _ints(text) -> list[int]:
    if isinstance(text, list):
        return [int(t) for t in text]
    return [int(t) for t in str(text).replace(",", " ").split()]


def _floats(text) -> list[float]:
    if isinstance(text, list):
        return [float(t) for t in text]
    return [float(t) for t in str(text).replace(",", " ").split()]


def _bool(text) -> bool:
    if isinstance(text, bool):
        return text
    t = str(text).strip().lower()
    if t in ("1", "true", "yes", "on"):
        return True
    if t in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


_pos = (lambda v: v > 0, "must be positive")
_nonneg = (lambda v: v >= 0, "must be non-negative")
_ge1 = (lambda v: v >= 1, "must be >= 1")


def P(type_, default, help_, check=None):
    fn, rule = check if check else (None, "")
    return Param(type_, default, help_, fn, rule)


COMMANDS: dict[str, dict[str, Param]] = {
    "zeros": {
        "emax": P(float, 100.0, "search zeros with 0 < gamma < EMAX", (lambda v: 0 < v <= zeros.MAX_HEIGHT, "must lie in (0, 1e4]")),
    },
    "count": {
        "emin": P(float, 10.0, "first height", _pos),
        "emax": P(float, 100.0, "last height", _pos),
        "step": P(float, 1.0, "grid step", _pos),
    },
    "orbitsum": {
        "emin": P(float, 0.0, "first height", _nonneg),
        "emax": P(float, 50.0, "last height", _nonneg),
        "step": P(float, 0.5, "grid step", _pos),
        "primes": P(int, 100, "prime cutoff", _ge1),
        "reps": P(int, 8, "repetition cutoff (n_max for the closed class-C sum)", _ge1),
        "mu": P(float, 0.0, "Maslov phase for the generic Gutzwiller sum"),
    },
    "identity": {
        "x": P(float, 0.5, "f(n) = x^n", (lambda v: 0 <= v < 1, "must lie in [0, 1)")),
    },
    "equiv": {
        "energy": P(float, 1.0, "height E", _nonneg),
        "nmax": P(int, 8, "closure bound n = 2^k r <= NMAX", _ge1),
        "primes": P(int, 11, "prime cutoff", _ge1),
    },
    "rmt": {
        "class": P(str, "GUE", "ensemble class: GUE, C or D", (lambda v: v in rmt.CLASSES, "must be GUE, C or D")),
        "n": P(int, 50, "base dimension N", _ge1),
        "samples": P(int, 1, "number of samples", _ge1),
        "seed": P(int, 0, "RNG seed", _nonneg),
        "sigma2": P(float, 1.0, "entry variance scale", _pos),
    },
    "stats": {
        "source": P(str, "zeros", "zeros, file or ensemble", (lambda v: v in ("zeros", "file", "ensemble"), "must be zeros, file or ensemble")),
        "emax": P(float, 1420.0, "zero search height for source=zeros", (lambda v: 0 < v <= zeros.MAX_HEIGHT, "must lie in (0, 1e4]")),
        "count": P(int, 1000, "use the first COUNT zeros", _ge1),
        "input": P(str, "", "zero table for source=file"),
        "class": P(str, "GUE", "ensemble class for source=ensemble", (lambda v: v in rmt.CLASSES, "must be GUE, C or D")),
        "n": P(int, 200, "base dimension N", _ge1),
        "samples": P(int, 100, "number of samples", _ge1),
        "seed": P(int, 0, "RNG seed", _nonneg),
        "bin": P(float, spectra.PAIR_BIN_WIDTH, "pair-correlation window width", _pos),
    },
    "family": {
        "dmax": P(int, 200, "use odd primes d <= DMAX with even quadratic character", _ge1),
        "moduli": P(_ints, [], "explicit moduli (overrides dmax)"),
        "ewindow": P(float, 12.0, "search window (0, EWINDOW)", _pos),
    },
    "progression": {
        "d": P(int, 4, "modulus", _ge1),
        "x": P(_floats, [100.0, 1e5], "bounds x", None),
    },
    "ingest": {
        "input": P(str, "", "zero table to import"),
    },
}

COMMON: dict[str, Param] = {
    "out": P(str, "", "data file to write"),
    "format": P(str, "csv", "csv or json", (lambda v: v in ("csv", "json"), "must be csv or json")),
    "threads": P(int, 1, "worker threads", _ge1),
}

_HELP = {
    "zeros": "find (and cache) zeta zeros below EMAX",
    "count": "N(E) decomposition table over a grid",
    "orbitsum": "prime, class-C and generic orbit sums over a grid",
    "identity": "doubling identity check for f(n) = x^n",
    "equiv": "class-C ansatz sum versus prime form on a closed index set",
    "rmt": "sample an ensemble and emit spectra",
    "stats": "spacing, pair-correlation and near-zero statistics",
    "family": "lowest zeros of quadratic-character L-functions",
    "progression": "primes in progressions versus Li(x)/phi(d)",
    "ingest": "import a zero table",
}


@dataclass
class RunConfig:
    command: str
    params: dict[str, Any]
    out: Path
    format: str = "csv"
    threads: int = 1
    outputs: list[str] = field(default_factory=list)

    @property
    def seed(self):
        return self.params.get("seed")


def _read_config(path: str) -> dict[str, str]:
    out: dict[str, str] = {}
    try:
        lines = Path(path).read_text(encoding="utf-8").splitlines()
    except OSError as exc:
        raise UsageError(f"cannot read config {path}: {exc}") from None
    for lineno, raw in enumerate(lines, start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{lineno}: expected 'key = value'")
        k, v = (s.strip() for s in line.split("=", 1))
        out[k.replace("-", "_")] = v
    return out


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="rsl", description="Riemann-zero spectral laboratory")
    ap.add_argument("--version", action="version", version=f"rsl {__version__}")
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)
    for name, table in COMMANDS.items():
        sp = sub.add_parser(name, help=_HELP[name])
        sp.add_argument("--config", default=None, help="key = value file")
        sp.add_argument("--manifest", default=None, help="manifest path (default OUT.manifest.json)")
        for key, prm in {**table, **COMMON}.items():
            flag = "--" + key.replace("_", "-")
            kwargs: dict[str, Any] = dict(dest=key, default=argparse.SUPPRESS, help=f"{prm.help} (default {prm.default!r})")
            if prm.type is _ints:
                kwargs.update(type=int, nargs="+")
            elif prm.type is _floats:
                kwargs.update(type=float, nargs="+")
            else:
                kwargs.update(type=prm.type)
            sp.add_argument(flag, **kwargs)
    return ap


def resolve_config(ns: argparse.Namespace) -> RunConfig:
    """Merge defaults < config file < flags and validate everything."""
    table = {**COMMANDS[ns.command], **COMMON}
    merged = {k: p.default for k, p in table.items()}
    if ns.config:
        for k, v in _read_config(ns.config).items():
            if k not in table:
                raise UsageError(f"unknown config key {k!r} for {ns.command}")
            try:
                merged[k] = table[k].type(v)
            except ValueError as exc:
                raise UsageError(f"config key {k}: {exc}") from None
    for k in table:
        if hasattr(ns, k):
            merged[k] = getattr(ns, k)
    for k, prm in table.items():
        if prm.check is not None and not prm.check(merged[k]):
            raise UsageError(f"--{k.replace('_', '-')}={merged[k]!r} {prm.rule}")
    if not merged["out"]:
        raise UsageError("--out is required")
    common = {k: merged.pop(k) for k in COMMON}
    return RunConfig(ns.command, merged, Path(common["out"]), common["format"], common["threads"])


# -- output helpers ---------------------------------------------------------

def fmt(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return "1" if v else "0"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        if math.isnan(v):
            return "nan"
        return f"{float(v):.12g}"
    return str(v)


def _round(v):
    if isinstance(v, dict):
        return {k: _round(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_round(x) for x in v]
    if isinstance(v, (np.integer,)):
        return int(v)
    if isinstance(v, (float, np.floating)):
        return float(f"{float(v):.12g}")
    if isinstance(v, np.ndarray):
        return _round(v.tolist())
    return v


def csv_text(header: list[str], rows) -> str:
    lines = [",".join(header)] + [",".join(fmt(x) for x in row) for row in rows]
    return "\n".join(lines) + "\n"


def json_text(obj) -> str:
    return json.dumps(_round(obj), indent=2, sort_keys=True) + "\n"


def table_text(cfg: RunConfig, header: list[str], rows) -> str:
    rows = list(rows)
    if cfg.format == "json":
        return json_text({"columns": header, "rows": [list(r) for r in rows]})
    return csv_text(header, rows)


def report_text(cfg: RunConfig, report: dict) -> str:
    if cfg.format == "json":
        return json_text(report)
    flat = []
    for k in sorted(report):
        v = report[k]
        if isinstance(v, (list, tuple, np.ndarray)):
            for i, x in enumerate(v):
                flat.append((k, i, x))
        else:
            flat.append((k, "", v))
    return csv_text(["key", "index", "value"], flat)


_PLOT_STUB = '''"""Plot a data file written by rsl. Needs matplotlib (not an rsl dependency)."""
import csv
import sys

import matplotlib.pyplot as plt

path = sys.argv[1] if len(sys.argv) > 1 else {path!r}
with open(path) as fh:
    rows = list(csv.reader(fh))
header, data = rows[0], rows[1:]
cols = list(zip(*data))
x = [float(v) for v in cols[0]]
for name, col in zip(header[1:], cols[1:]):
    try:
        plt.plot(x, [float(v) for v in col], label=name)
    except ValueError:
        pass
plt.xlabel(header[0])
plt.legend()
plt.show()
'''


def emit(cfg: RunConfig, text: str, path: Path | None = None) -> None:
    path = path or cfg.out
    zeros.write_atomic(path, text)
    cfg.outputs.append(str(path))
    if path.suffix == ".csv":
        stub = path.with_suffix(".plot.py")
        zeros.write_atomic(stub, _PLOT_STUB.format(path=path.name))
        cfg.outputs.append(str(stub))


def versions() -> dict[str, str]:
    import numba
    import scipy

    return {
        "rsl": __version__,
        "python": platform.python_version(),
        "numpy": np.__version__,
        "scipy": scipy.__version__,
        "numba": numba.__version__,
    }


def write_manifest(cfg: RunConfig, path: Path | None, status: str) -> Path:
    path = path or cfg.out.with_name(cfg.out.name + ".manifest.json")
    manifest = {
        "command": cfg.command,
        "params": {**cfg.params, "format": cfg.format, "threads": cfg.threads, "out": str(cfg.out)},
        "seed": cfg.seed,
        "versions": versions(),
        "outputs": cfg.outputs,
        "status": status,
        "timestamp": _dt.datetime.now(_dt.timezone.utc).isoformat(),
    }
    zeros.write_atomic(path, json.dumps(manifest, indent=2, sort_keys=True, default=str) + "\n")
    return path


# -- subcommands ------------------------------------------------------------

def _grid(lo: float, hi: float, step: float) -> np.ndarray:
    if hi < lo:
        raise UsageError(f"--emax={hi} is below --emin={lo}")
    n = int(math.floor((hi - lo) / step + 1e-9))
    return lo + step * np.arange(n + 1)


def cmd_zeros(cfg: RunConfig) -> None:
    zl = zeros.cached_zeros(cfg.params["emax"], threads=cfg.threads)
    if cfg.format == "json":
        emit(cfg, json_text({"k": list(range(1, len(zl) + 1)), "gamma": list(zl.gammas)}))
    else:
        emit(cfg, zeros.format_zero_table(zl))


def cmd_ingest(cfg: RunConfig) -> None:
    if not cfg.params["input"]:
        raise UsageError("--input is required")
    zl = zeros.ingest_zero_table(cfg.params["input"])
    emit(cfg, zeros.format_zero_table(zl))


def cmd_count(cfg: RunConfig) -> None:
    p = cfg.params
    grid = _grid(p["emin"], p["emax"], p["step"])
    n_exact, n_smooth, n_osc = zeros.decompose_grid(grid)
    from .lfunc import smooth_count_asymptotic

    asym = np.asarray(smooth_count_asymptotic(grid))
    rows = zip(grid, n_exact, n_smooth, n_osc, asym)
    emit(cfg, table_text(cfg, ["E", "n_exact", "n_smooth", "n_osc", "n_smooth_asymptotic"], rows))


def _prime_orbits(P: int) -> list[orbits.OrbitTerm]:
    out = []
    for p in arith.primes_up_to(P):
        lp = math.log(int(p))
        out.append(orbits.OrbitTerm((int(p), 0), lp, stability_fn=lambda r, lp=lp: math.exp(r * lp)))
    return out


def cmd_orbitsum(cfg: RunConfig) -> None:
    p = cfg.params
    grid = _grid(p["emin"], p["emax"], p["step"])
    open_trunc = orbits.TruncationSpec(p["primes"], rep_cutoff=p["reps"])
    closed = orbits.TruncationSpec(p["primes"], rep_cutoff=p["reps"], closed=True)
    ansatz = orbits.ansatz_orbits(closed)
    generic = [
        orbits.OrbitTerm(po.label, po.period, p["mu"], po.stability_fn) for po in _prime_orbits(p["primes"])
    ]
    prime = orbits.nosc_prime_sum_grid(grid, open_trunc)
    rows = []
    for E, v8 in zip(grid, prime):
        rows.append(
            (
                E,
                v8,
                orbits.class_c_sum(ansatz, E, closed),
                orbits.gutzwiller_sum(generic, E, p["reps"]),
            )
        )
    emit(cfg, table_text(cfg, ["E", "prime_sum", "class_c_ansatz", "gutzwiller_prime"], rows))


def cmd_identity(cfg: RunConfig) -> None:
    x = cfg.params["x"]
    lhs, rhs = orbits.doubling_identity_check(lambda n: x**n, x)
    closed = math.log1p(-x)
    report = {
        "x": x,
        "lhs": lhs,
        "rhs": rhs,
        "closed_form": closed,
        "lhs_minus_rhs": lhs - rhs,
        "max_abs_error": max(abs(lhs - closed), abs(rhs - closed)),
    }
    emit(cfg, report_text(cfg, report))


def cmd_equiv(cfg: RunConfig) -> None:
    p = cfg.params
    ansatz_value, prime_value = orbits.equivalence_check(p["energy"], p["nmax"], p["primes"])
    report = {"E": p["energy"], "n_max": p["nmax"], "primes": p["primes"], "class_c_ansatz": ansatz_value, "prime_form": prime_value, "difference": ansatz_value - prime_value}
    emit(cfg, report_text(cfg, report))


def cmd_rmt(cfg: RunConfig) -> None:
    p = cfg.params
    spec = rmt.EnsembleSpec(p["class"], p["n"], p["sigma2"], p["seed"])
    samples = rmt.sample_spectra(spec, p["samples"], threads=cfg.threads)
    rows = [(s.sample_index, k, lam) for s in samples for k, lam in enumerate(s.eigenvalues)]
    emit(cfg, table_text(cfg, ["sample", "k", "eigenvalue"], rows))


def cmd_stats(cfg: RunConfig) -> None:
    p = cfg.params
    report: dict[str, Any] = {"source": p["source"]}
    x_grid = np.arange(p["bin"] / 2, 3.0, p["bin"])
    if p["source"] in ("zeros", "file"):
        if p["source"] == "file":
            if not p["input"]:
                raise UsageError("--input is required for --source file")
            zl = zeros.ingest_zero_table(p["input"])
        else:
            zl = zeros.cached_zeros(p["emax"], threads=cfg.threads)
        g = zl.as_array()[: p["count"]]
        seqs = spectra.unfold_zeros(g)
        report["n_zeros"] = int(g.size)
    else:
        spec = rmt.EnsembleSpec(p["class"], p["n"], seed=p["seed"])
        samples = rmt.sample_spectra(spec, p["samples"], threads=cfg.threads)
        seqs = [spectra.unfold_ensemble(s) for s in samples]
        report["class"] = p["class"]
        if p["class"] in ("C", "D"):
            near, bulk = spectra.near_zero_density(samples)
            report.update(near_zero_density=near, bulk_density=bulk, near_zero_ratio=near / bulk)
    sp = spectra.pooled_spacings(seqs)
    report["spacing_mean"] = float(np.mean(sp))
    report["spacing_variance"] = float(np.var(sp))
    report["ks_gue"] = spectra.spacing_ks(seqs, "GUE")
    report["ks_poisson"] = spectra.spacing_ks(seqs, "Poisson")
    r2 = spectra.pair_correlation(seqs, x_grid, p["bin"])
    ref = spectra.gue_pair_correlation_window(x_grid, p["bin"])
    report["pair_x"] = x_grid
    report["pair_r2"] = r2
    report["pair_gue"] = ref
    report["pair_sup_deviation"] = float(np.max(np.abs(r2 - ref)))
    emit(cfg, report_text(cfg, report))


def cmd_family(cfg: RunConfig) -> None:
    p = cfg.params
    moduli = p["moduli"] or spectra.even_quadratic_moduli(p["dmax"])
    gammas = spectra.family_low_zeros(moduli, p["ewindow"])
    scaled = spectra.scale_low_zeros(moduli, gammas)
    rows = zip(moduli, gammas, scaled)
    emit(cfg, table_text(cfg, ["d", "lowest_zero", "scaled"], rows))


def cmd_progression(cfg: RunConfig) -> None:
    p = cfg.params
    d = p["d"]
    phi = arith.totient(d)
    rows = []
    for x in p["x"]:
        if x <= 1:
            raise UsageError(f"--x={x} must exceed 1")
        main = arith.log_integral(x) / phi
        for a in range(1, d):
            if math.gcd(a, d) == 1:
                c = arith.prime_count_progression(a, d, x)
                rows.append((a, d, x, c, main, (c - main) / main))
    emit(cfg, table_text(cfg, ["a", "d", "x", "pi_ad", "li_over_phi", "relative_deviation"], rows))


HANDLERS = {
    "zeros": cmd_zeros,
    "count": cmd_count,
    "orbitsum": cmd_orbitsum,
    "identity": cmd_identity,
    "equiv": cmd_equiv,
    "rmt": cmd_rmt,
    "stats": cmd_stats,
    "family": cmd_family,
    "progression": cmd_progression,
    "ingest": cmd_ingest,
}


def run(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(level=logging.INFO if ns.verbose else logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = resolve_config(ns)
    except UsageError as exc:
        print(f"rsl {ns.command}: {exc}", file=sys.stderr)
        return 2
    manifest = Path(ns.manifest) if ns.manifest else None
    try:
        HANDLERS[cfg.command](cfg)
    except UsageError as exc:
        print(f"rsl {cfg.command}: {exc}", file=sys.stderr)
        return 2
    except (ArithmeticError, ValueError, OSError) as exc:
        print(f"rsl {cfg.command}: {type(exc).__name__}: {exc}", file=sys.stderr)
        write_manifest(cfg, manifest, "failed")
        return 1
    write_manifest(cfg, manifest, "ok")
    return 0


def main() -> None:
    sys.exit(run())
