"""Zeros of zeta on the critical line and the exact counting decomposition.

N(E) is computed two ways: by tallying sign changes of Hardy's Z function and
by transporting arg Lambda continuously to 1/2 + iE.  The two must agree to
the integer; ``find_zeros`` refuses to return a list when they do not.
"""
from __future__ import annotations

import glob
import logging
import math
import os
import re
import tempfile
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import lfunc
from .arith import Character

log = logging.getLogger(__name__)

MAX_HEIGHT = 1.0e4
BASE_STEP = 0.05
BISECT_TOL = 1e-9
ZERO_PROXIMITY = 1e-6
CERT_BLOCK = 25.0


class CertificationError(ArithmeticError):
    """Sign-change tally disagrees with the argument-principle count."""

    def __init__(self, interval: tuple[float, float], tally: int, expected: int):
        self.interval = interval
        self.tally = tally
        self.expected = expected
        super().__init__(
            f"found {tally} sign changes in ({interval[0]:.6f}, {interval[1]:.6f}) "
            f"but argument principle gives {expected}"
        )


class ZeroProximityError(ValueError):
    """Counting requested too close to a zero for the argument to be defined."""


class ZeroTableError(ValueError):
    def __init__(self, lineno: int, msg: str):
        self.lineno = lineno
        super().__init__(f"line {lineno}: {msg}")


@dataclass(frozen=True)
class ZeroList:
    gammas: tuple[float, ...]
    source: str = "computed"
    tolerance: float = 0.0

    def __post_init__(self):
        if self.source not in ("computed", "ingested"):
            raise ValueError(f"unknown source {self.source!r}")
        g = self.gammas
        if any(b <= a for a, b in zip(g, g[1:])):
            raise ValueError("gammas must be strictly increasing")
        if g and g[0] <= 0:
            raise ValueError("gammas must be positive")

    def __len__(self) -> int:
        return len(self.gammas)

    def as_array(self) -> np.ndarray:
        return np.asarray(self.gammas, dtype=float)

    def below(self, E: float) -> "ZeroList":
        return ZeroList(tuple(g for g in self.gammas if g < E), self.source, self.tolerance)


@dataclass(frozen=True)
class CountDecomposition:
    E: float
    n_exact: int
    n_smooth: float
    n_osc: float


def scan_step(E):
    """Sign-change scan step: 0.05 up to E = 100, then shrinking with the mean gap."""
    e = np.maximum(np.asarray(E, dtype=float), 100.0)
    gap = 2 * np.pi / np.log(e / (2 * np.pi))
    gap100 = 2 * np.pi / math.log(100 / (2 * math.pi))
    return BASE_STEP * gap / gap100


def scan_grid(lo: float, hi: float, refine: int = 1) -> np.ndarray:
    pts = [lo]
    x = lo
    while x < hi:
        x = min(hi, x + float(scan_step(x)) / refine)
        pts.append(x)
    return np.asarray(pts)


def _z_on(points: np.ndarray, threads: int = 1, chunk: int = 512) -> np.ndarray:
    pieces = [points[i : i + chunk] for i in range(0, points.size, chunk)]
    if threads > 1 and len(pieces) > 1:
        with ThreadPoolExecutor(max_workers=threads) as ex:
            parts = list(ex.map(lfunc.hardy_z, pieces))
    else:
        parts = [lfunc.hardy_z(p) for p in pieces]
    return np.concatenate(parts) if parts else np.empty(0)


def _brackets(grid: np.ndarray, z: np.ndarray) -> list[tuple[float, float]]:
    s = np.sign(z)
    idx = np.flatnonzero(s[:-1] * s[1:] < 0)
    out = [(grid[i], grid[i + 1]) for i in idx]
    # exact zeros on grid points are rare; widen them into a bracket
    for i in np.flatnonzero(s == 0):
        if 0 < i < grid.size - 1:
            out.append((grid[i - 1], grid[i + 1]))
    return sorted(out)


def _bisect(brackets: list[tuple[float, float]], f=lfunc.hardy_z) -> np.ndarray:
    if not brackets:
        return np.empty(0)
    lo = np.array([b[0] for b in brackets])
    hi = np.array([b[1] for b in brackets])
    flo = np.asarray(f(lo))
    while np.max(hi - lo) > BISECT_TOL / 4:
        mid = 0.5 * (lo + hi)
        fm = np.asarray(f(mid))
        left = np.sign(fm) == np.sign(flo)
        lo = np.where(left, mid, lo)
        flo = np.where(left, fm, flo)
        hi = np.where(left, hi, mid)
    return 0.5 * (lo + hi)


def count_via_argument(E) -> float | np.ndarray:
    """N(E) = (1/pi) Im log Lambda(1/2 + iE) + 1 with continuous branch."""
    e = np.atleast_1d(np.asarray(E, dtype=float))
    if np.any(e <= 0):
        raise ValueError("E must be positive")
    if np.any(e > MAX_HEIGHT):
        raise lfunc.DomainError(f"E above {MAX_HEIGHT:g}")
    arg, end = lfunc.transported_arg(lfunc.zeta_array, e)
    near = np.abs(end) < ZERO_PROXIMITY
    if np.any(near):
        raise ZeroProximityError(f"E = {e[near][0]:.9f} is within reach of a zero")
    n = (np.asarray(lfunc.theta(e)) + arg) / np.pi + 1.0
    return float(n[0]) if np.ndim(E) == 0 else n


def _safe_boundary(grid: np.ndarray, z: np.ndarray, i: int) -> int:
    # move off grid points where |Z| is tiny
    for j in (i, i - 1, i + 1, i - 2, i + 2):
        if 0 <= j < grid.size and abs(z[j]) > 1e-4:
            return j
    return i


def _tally(brackets, a: float, b: float) -> int:
    return sum(1 for lo, hi in brackets if a <= lo and hi <= b)


def find_zeros(E_max: float, threads: int = 1) -> ZeroList:
    """All gamma_k < E_max, certified complete against the argument principle."""
    if not 0 < E_max <= MAX_HEIGHT:
        raise ValueError(f"E_max must lie in (0, {MAX_HEIGHT:g}], got {E_max}")
    grid = scan_grid(0.0, float(E_max))
    z = _z_on(grid, threads)
    brackets = _brackets(grid, z)

    # block boundaries for certification, nudged away from zeros
    n_blocks = max(1, int(math.ceil(E_max / CERT_BLOCK)))
    cut_idx = [0]
    for b in range(1, n_blocks + 1):
        target = min(E_max, b * CERT_BLOCK)
        i = int(np.searchsorted(grid, target))
        i = min(i, grid.size - 1)
        i = _safe_boundary(grid, z, i)
        if i > cut_idx[-1]:
            cut_idx.append(i)
    cuts = grid[cut_idx]
    counts = np.rint(count_via_argument(cuts[1:])).astype(int)
    counts = np.concatenate([[0], counts])

    final: list[tuple[float, float]] = []
    for j in range(len(cuts) - 1):
        a, b = cuts[j], cuts[j + 1]
        expected = int(counts[j + 1] - counts[j])
        here = [br for br in brackets if a <= br[0] and br[1] <= b]
        if len(here) != expected:
            log.info("refining (%g, %g): %d sign changes, %d expected", a, b, len(here), expected)
            fine = scan_grid(a, b, refine=10)
            here = _brackets(fine, _z_on(fine, threads))
            if len(here) != expected:
                raise CertificationError((float(a), float(b)), len(here), expected)
        final.extend(here)

    # zeros between the last safe cut and E_max
    tail = [br for br in brackets if br[0] >= cuts[-1]]
    final.extend(tail)
    roots = _bisect(final)
    roots = roots[roots < E_max]
    tol = float(np.max(np.abs(lfunc.hardy_z(roots)))) if roots.size else 0.0
    return ZeroList(tuple(float(r) for r in roots), "computed", tol)


def sign_change_tally(E: float) -> int:
    """Sign changes of Z on (0, E) at the default scan resolution."""
    grid = scan_grid(0.0, float(E))
    return len(_brackets(grid, _z_on(grid)))


def staircase(E, zeros: ZeroList | np.ndarray):
    g = zeros.as_array() if isinstance(zeros, ZeroList) else np.asarray(zeros, dtype=float)
    out = np.searchsorted(g, np.asarray(E, dtype=float), side="left")
    return int(out) if np.ndim(out) == 0 else out


def decompose_grid(E) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Vectorized (n_exact, n_smooth, n_osc) over an array of heights."""
    e = np.atleast_1d(np.asarray(E, dtype=float))
    if np.any(e <= 0):
        raise ValueError("E must be positive")
    arg, end = lfunc.transported_arg(lfunc.zeta_array, e)
    near = np.abs(end) < ZERO_PROXIMITY
    if np.any(near):
        raise ZeroProximityError(f"E = {e[near][0]:.9f} is within reach of a zero")
    n_smooth = np.asarray(lfunc.smooth_count(e))
    n_osc = arg / np.pi
    n_exact = np.rint(n_smooth + n_osc).astype(int)
    return n_exact, n_smooth, n_osc


def decompose(E: float) -> CountDecomposition:
    n_exact, n_smooth, n_osc = decompose_grid(E)
    return CountDecomposition(float(E), int(n_exact[0]), float(n_smooth[0]), float(n_osc[0]))


# -- L-function zeros -------------------------------------------------------

def l_count_via_argument(E, chi: Character):
    """Zeros of L(s, chi) with 0 < gamma < E, for real even primitive chi."""
    e = np.atleast_1d(np.asarray(E, dtype=float))
    arg, end = lfunc.transported_arg(lambda s: lfunc.l_function_array(s, chi), e)
    if np.any(np.abs(end) < ZERO_PROXIMITY):
        raise ZeroProximityError("evaluation height is within reach of an L-zero")
    n = (np.asarray(lfunc.l_theta(e, chi)) + arg) / np.pi
    return float(n[0]) if np.ndim(E) == 0 else n


def find_l_zeros(chi: Character, E_max: float, step: float = 0.02) -> np.ndarray:
    """Zeros of L(s, chi) on (0, E_max) from sign changes of its Hardy function."""
    grid = np.arange(0.0, E_max + step / 2, step)
    grid[-1] = min(grid[-1], E_max)
    z = lfunc.l_hardy_z(grid, chi)
    br = _brackets(grid, z)
    return _bisect(br, lambda x: lfunc.l_hardy_z(x, chi))


# -- tables on disk ---------------------------------------------------------

_HEADER = "k,gamma"


def ingest_zero_table(path) -> ZeroList:
    """Read zero ordinates: one decimal per line, or a ``k,gamma`` CSV."""
    gammas: list[float] = []
    with open(path, "r", encoding="utf-8") as fh:
        lines = fh.read().splitlines()
    csv = bool(lines) and lines[0].strip() == _HEADER
    for lineno, raw in enumerate(lines, start=1):
        line = raw.strip()
        if csv and lineno == 1:
            continue
        if not line:
            continue
        if csv:
            parts = line.split(",")
            if len(parts) != 2:
                raise ZeroTableError(lineno, f"expected 'k,gamma', got {line!r}")
            try:
                k = int(parts[0])
            except ValueError:
                raise ZeroTableError(lineno, f"bad index {parts[0]!r}") from None
            if k != len(gammas) + 1:
                raise ZeroTableError(lineno, f"index {k} out of sequence")
            text = parts[1]
        else:
            text = line
        try:
            g = float(text)
        except ValueError:
            raise ZeroTableError(lineno, f"not a number: {text!r}") from None
        if not math.isfinite(g) or g <= 0:
            raise ZeroTableError(lineno, f"zero ordinate must be positive and finite, got {text!r}")
        if gammas and g <= gammas[-1]:
            raise ZeroTableError(lineno, f"not increasing ({g} after {gammas[-1]})")
        gammas.append(g)
    return ZeroList(tuple(gammas), "ingested", 0.0)


def format_zero_table(zeros: ZeroList) -> str:
    rows = [_HEADER] + [f"{k},{g:.12f}" for k, g in enumerate(zeros.gammas, start=1)]
    return "\n".join(rows) + "\n"


def write_atomic(path, text: str) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_zero_table(zeros: ZeroList, path) -> None:
    write_atomic(path, format_zero_table(zeros))


def cache_dir() -> Path:
    env = os.environ.get("RSL_CACHE_DIR")
    return Path(env) if env else Path.home() / ".cache" / "rsl"


_CACHE_RE = re.compile(r"zeros_emax_([0-9.]+)\.csv$")


def cached_zeros(E_max: float, directory=None, threads: int = 1) -> ZeroList:
    """Zeros below E_max, read from the cache when a wide enough table exists."""
    d = Path(directory) if directory is not None else cache_dir()
    best = None
    for f in glob.glob(str(d / "zeros_emax_*.csv")):
        m = _CACHE_RE.search(f)
        if m and float(m.group(1)) >= E_max:
            if best is None or float(m.group(1)) < best[0]:
                best = (float(m.group(1)), f)
    if best is not None:
        table = ingest_zero_table(best[1]).below(E_max)
        return ZeroList(table.gammas, "computed", 5e-13)
    zl = find_zeros(E_max, threads=threads)
    write_zero_table(zl, d / f"zeros_emax_{E_max:.6f}.csv")
    return zl
