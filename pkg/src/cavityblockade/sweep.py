"""
One-axis parameter scans and Fock-cutoff convergence.

Grid points are independent; they can be farmed out to worker processes
and are always reassembled by grid index, so the output does not depend
on the worker count.
"""
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .dynamics import SolverError, solve_model
from .model import ModelParams
from .observables import photon_stats

AXES = ("delta_p", "omega_c", "delta_c", "omega_p")
DEFAULT_CEILING = 14


class CutoffConvergenceError(SolverError):
    """Observables kept changing up to the cutoff ceiling."""


@dataclass(frozen=True)
class SweepSpec:
    base: ModelParams
    axis: str
    start: float
    stop: float
    points: int
    auto_converge: bool = False

    def __post_init__(self):
        if self.axis not in AXES:
            raise ValueError(f"axis must be one of {AXES}, got {self.axis!r}")
        if not (math.isfinite(self.start) and math.isfinite(self.stop)):
            raise ValueError("sweep bounds must be finite")
        if not self.start < self.stop:
            raise ValueError(f"need start < stop, got {self.start} >= {self.stop}")
        if isinstance(self.points, bool) or int(self.points) != self.points or self.points < 2:
            raise ValueError(f"points must be an integer >= 2, got {self.points!r}")

    def grid(self) -> np.ndarray:
        """Inclusive uniform grid; refining to ``2 * points - 1`` keeps every old node bit-exact."""
        step = (self.stop - self.start) / (self.points - 1)
        return np.array([self.start + i * step for i in range(self.points)])

    def params_at(self, value: float, fock_cutoff: int = None) -> ModelParams:
        changes = {self.axis: float(value)}
        if fock_cutoff is not None:
            changes["fock_cutoff"] = fock_cutoff
        return self.base.replace(**changes)


@dataclass(frozen=True)
class SweepRow:
    axis_value: float
    mean_n: float
    g2: float
    g3: float
    residual: float
    fock_cutoff_used: int
    converged: bool
    error: str = None

    @property
    def g2_defined(self) -> bool:
        return self.g2 is not None

    @property
    def g3_defined(self) -> bool:
        return self.g3 is not None


def solve_point(params: ModelParams, axis_value: float = math.nan) -> SweepRow:
    """Steady state and photon statistics at one parameter point; never raises on solver failure."""
    try:
        rho, info = solve_model(params, full_output=True)
    except SolverError as exc:
        return SweepRow(axis_value, math.nan, None, None, math.nan, params.fock_cutoff, False,
                        f"{type(exc).__name__}: {exc}")
    stats = photon_stats(rho)
    return SweepRow(axis_value, stats.mean_n, stats.g2, stats.g3, info.residual,
                    params.fock_cutoff, True)


def _solve_task(task):
    params, value = task
    return solve_point(params, value)


def _map(tasks, workers):
    if workers is None or workers <= 1 or len(tasks) < 2:
        return [_solve_task(t) for t in tasks]
    chunk = max(1, len(tasks) // (4 * workers))
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(_solve_task, tasks, chunksize=chunk))


def _close(a, b, rel_tol, abs_floor):
    if a is None or b is None:
        return a is None and b is None
    return abs(a - b) <= max(rel_tol * abs(b), abs_floor)


def converge_cutoff(params: ModelParams, rel_tol: float = 1e-6, abs_floor: float = 1e-12,
                    minimum: int = 3, ceiling: int = DEFAULT_CEILING) -> int:
    """Smallest cutoff ``N >= minimum`` whose observables match those at ``N + 2``.

    ``ceiling`` is the largest candidate ``N`` tried (the comparison run
    uses ``ceiling + 2``).
    """
    if not rel_tol > 0:
        raise ValueError("rel_tol must be > 0")
    cache = {}

    def stats_at(n):
        if n not in cache:
            row = solve_point(params.replace(fock_cutoff=n))
            if not row.converged:
                raise CutoffConvergenceError(f"solve failed at fock_cutoff={n}: {row.error}")
            cache[n] = row
        return cache[n]

    for n in range(minimum, ceiling + 1):
        lo, hi = stats_at(n), stats_at(n + 2)
        if all(_close(getattr(lo, k), getattr(hi, k), rel_tol, abs_floor)
               for k in ("mean_n", "g2", "g3")):
            return n
    raise CutoffConvergenceError(
        f"observables not converged to rel_tol={rel_tol:g} for fock_cutoff <= {ceiling}")


def brightest_point(spec: SweepSpec, max_points: int = 25, workers: int = 1) -> ModelParams:
    """Parameter point of largest mean photon number on a coarse sub-grid."""
    grid = spec.grid()
    stride = max(1, math.ceil((len(grid) - 1) / (max_points - 1)))
    coarse = grid[::stride]
    rows = _map([(spec.params_at(v), v) for v in coarse], workers)
    means = [r.mean_n if r.converged else -np.inf for r in rows]
    return spec.params_at(coarse[int(np.argmax(means))])


def run_sweep(spec: SweepSpec, workers: int = 1, rel_tol: float = 1e-6) -> list:
    """Solve every grid point of ``spec``; rows come back in ascending axis order.

    With ``auto_converge`` the cutoff is fixed once, by
    :func:`converge_cutoff` at the brightest point of a coarse pre-pass.
    Per-point failures produce rows with ``converged=False``.
    """
    cutoff = spec.base.fock_cutoff
    if spec.auto_converge:
        cutoff = converge_cutoff(brightest_point(spec, workers=workers), rel_tol=rel_tol)
    tasks = [(spec.params_at(v, cutoff), float(v)) for v in spec.grid()]
    return _map(tasks, workers)


def rows_to_arrays(rows) -> dict:
    """Column arrays with undefined correlations as NaN."""
    nan = lambda v: np.nan if v is None else v
    return {
        "axis_value": np.array([r.axis_value for r in rows]),
        "mean_n": np.array([r.mean_n for r in rows]),
        "g2": np.array([nan(r.g2) for r in rows], dtype=float),
        "g3": np.array([nan(r.g3) for r in rows], dtype=float),
        "residual": np.array([r.residual for r in rows]),
    }
