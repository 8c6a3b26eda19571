"""
Parameter-space studies: fidelity maps over detuning and amplitude error,
log-log fits of the error order, and fixed-point comparison tables.

Frequencies are in units of the nominal Rabi frequency (``Omega_0 = 1``),
so the nominal pulse has duration ``T = pi`` and area pi.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, List, NamedTuple, Optional, Sequence, Tuple

import mpmath
import numpy as np

from . import su2
from .model import compose_phased, ideal_propagator
from .pulses import DriveConfig, IntegratorConfig, PulseShape, free_propagator, pulse_propagator
from .sequences import PhaseSequence, big_phi, ur_phases
from .su2 import DomainError

# fixed work unit so that results never depend on the thread count
CHUNK = 1024


@dataclass(frozen=True)
class SweepGrid:
    detuning_range: Tuple[float, float] = (-0.5, 0.5)
    amplitude_range: Tuple[float, float] = (-0.5, 0.5)
    resolution: Tuple[int, int] = (101, 101)

    def __post_init__(self):
        for lo, hi in (self.detuning_range, self.amplitude_range):
            if not lo < hi:
                raise DomainError(f"range must satisfy lo < hi, got ({lo}, {hi})")
        nx, ny = self.resolution
        if int(nx) != nx or int(ny) != ny or nx < 2 or ny < 2:
            raise DomainError(f"resolution must be >= 2 per axis, got {self.resolution}")
        if self.amplitude_range[0] < -1:
            raise DomainError("amplitude error below -1 gives a negative Rabi frequency")

    @property
    def detunings(self) -> np.ndarray:
        return np.linspace(*self.detuning_range, int(self.resolution[0]))

    @property
    def amplitude_errors(self) -> np.ndarray:
        return np.linspace(*self.amplitude_range, int(self.resolution[1]))


@dataclass
class MapResult:
    grid: SweepGrid
    sequence_name: str
    total_pulses: int
    values: np.ndarray = field(repr=False)


def repetitions_for(seq: PhaseSequence, total_pulses: int) -> int:
    if total_pulses < 1 or total_pulses % seq.n:
        raise DomainError(
            f"{total_pulses} pulses cannot be split into whole repetitions of {seq.name} (n={seq.n})"
        )
    return total_pulses // seq.n


def sequence_fidelity(seq: PhaseSequence, total_pulses: int, detuning, amplitude_error,
                      tau_over_T: float = 4.0, shape: Optional[PulseShape] = None,
                      integrator: IntegratorConfig = IntegratorConfig()) -> np.ndarray:
    """Fidelity of ``seq`` repeated to ``total_pulses`` at (batched) error points."""
    shape = shape or PulseShape()
    reps = repetitions_for(seq, total_pulses)
    detuning = np.asarray(detuning, dtype=float)
    amplitude_error = np.asarray(amplitude_error, dtype=float)
    tau = tau_over_T * shape.duration
    pulse = pulse_propagator(DriveConfig(shape, amplitude_error, detuning, 0.0), integrator)
    half = free_propagator(detuning, tau / 2)
    cycle = su2.mul(half, su2.mul(pulse, half))
    U = compose_phased(cycle, seq.phases, reps)
    return su2.trace_fidelity(U, ideal_propagator(seq, reps))


def fidelity_map(seq: PhaseSequence, total_pulses: int, grid: SweepGrid = SweepGrid(),
                 tau_over_T: float = 4.0, shape: Optional[PulseShape] = None,
                 integrator: IntegratorConfig = IntegratorConfig(), threads: int = 1) -> MapResult:
    """Fidelity of ``seq`` over a detuning x amplitude-error grid.

    ``values[i, j]`` holds the point ``(detunings[i], amplitude_errors[j])``.
    """
    repetitions_for(seq, total_pulses)
    xs, ys = grid.detunings, grid.amplitude_errors
    X, Y = np.meshgrid(xs, ys, indexing="ij")
    flat_x, flat_y = X.ravel(), Y.ravel()
    out = np.empty(flat_x.size)
    starts = range(0, flat_x.size, CHUNK)

    def work(start):
        sl = slice(start, min(start + CHUNK, flat_x.size))
        out[sl] = sequence_fidelity(seq, total_pulses, flat_x[sl], flat_y[sl],
                                    tau_over_T, shape, integrator)

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            list(pool.map(work, starts))
    else:
        for s in starts:
            work(s)
    return MapResult(grid, seq.name, total_pulses, out.reshape(X.shape))


def comparison_table(sequences: Iterable[PhaseSequence], total_pulses: int,
                     error_point: Tuple[float, float], tau_over_T: float = 4.0,
                     shape: Optional[PulseShape] = None) -> List[Tuple[str, float]]:
    """Rank sequences by fidelity error ``1 - F`` at one (detuning, amplitude error) point."""
    x, y = error_point
    rows = []
    for seq in sequences:
        F = float(sequence_fidelity(seq, total_pulses, x, y, tau_over_T, shape))
        rows.append((seq.name, 1.0 - F))
    return sorted(rows, key=lambda r: (r[1], r[0]))


# -- error-order fits ---------------------------------------------------------


class ScalingFit(NamedTuple):
    n: int
    slope: float
    points_used: int
    flagged: bool


def _mp_cycle(p, a, b):
    sa, sb = mpmath.sqrt(1 - p), mpmath.sqrt(p)
    return mpmath.matrix([[sa * mpmath.expj(a), sb * mpmath.expj(b)],
                          [-sb * mpmath.expj(-b), sa * mpmath.expj(-a)]])


def static_error_mp(phases: Sequence[float], q, alpha, delta, beta=0.0):
    """``1 - F`` of the static model at ``p = 1 - q``, composed in extended precision.

    Composing in double precision cannot resolve errors below ~1e-16, far
    above the values reached by high-order sequences near ``p = 1``.
    """
    q = mpmath.mpf(q)
    p = 1 - q
    a = mpmath.mpf(alpha) + mpmath.mpf(delta)
    U = mpmath.eye(2)
    U0 = mpmath.eye(2)
    for phi in phases:
        U = _mp_cycle(p, a, mpmath.mpf(beta) + phi) * U
        U0 = _mp_cycle(mpmath.mpf(1), 0, phi) * U0
    tr = (U0.H * U)
    return 1 - abs(tr[0, 0] + tr[1, 1]) / 2


def _mp_pi_units(x):
    if isinstance(x, Fraction):
        return mpmath.pi * mpmath.mpf(x.numerator) / x.denominator
    return mpmath.pi * mpmath.mpf(x)


def _family_phases(n: int, phi2_over_pi=None) -> Tuple[list, float]:
    """Phases (mpf radians) and phi2 (radians) for UR n, or CPMG ``(0, phi2)`` when n = 2."""
    if n == 2:
        phi2 = Fraction(0) if phi2_over_pi is None else phi2_over_pi
        return [mpmath.mpf(0), _mp_pi_units(phi2)], math.pi * float(phi2)
    phi2 = big_phi(n) if phi2_over_pi is None else phi2_over_pi
    seq = ur_phases(n, phi2)
    return [_mp_pi_units(x) for x in seq.phases_over_pi], math.pi * float(phi2)


def node_residue(n: int, alpha: float, delta: float, phi2: float) -> float:
    """Distance of the phase argument of the error law from its nearest zero."""
    if n == 2:
        arg = alpha + delta - phi2 / 2 - math.pi / 2
    else:
        arg = n / 2 * (alpha + delta - math.pi / 2 - phi2 / 2)
    return abs(math.remainder(arg, math.pi))


def scaling_fit(n_list: Sequence[int], q_values: Sequence[float], alpha: float = 0.1,
                delta: float = 0.1, beta: float = 0.0, phi2_over_pi=None,
                dps: int = 60, node_tol: float = 1e-6) -> List[ScalingFit]:
    """Least-squares slope of ``log(1 - F)`` against ``log(1 - p)`` for each order.

    ``n = 2`` fits the CPMG pair; other ``n`` use the UR family (symmetric
    unless ``phi2_over_pi`` is given). ``q_values`` are the values of ``1 - p``.
    A fit whose phase point lies on a zero of the error law, or whose errors
    all vanish at working precision, is returned with ``flagged=True`` and a
    NaN slope.
    """
    if len(q_values) < 2 or any(not 0 < q < 1 for q in q_values):
        raise DomainError("need at least two values of 1-p inside (0, 1)")
    floor = mpmath.mpf(10) ** (-(dps - 8))
    fits = []
    with mpmath.workdps(dps):
        for n in n_list:
            phases, phi2 = _family_phases(n, phi2_over_pi)
            if node_residue(n, alpha, delta, phi2) < node_tol:
                fits.append(ScalingFit(n, float("nan"), 0, True))
                continue
            xs, ys = [], []
            for q in q_values:
                eps = static_error_mp(phases, q, alpha, delta, beta)
                if eps > floor:
                    xs.append(math.log(q))
                    ys.append(float(mpmath.log(eps)))
            if len(xs) < 2:
                fits.append(ScalingFit(n, float("nan"), len(xs), True))
                continue
            slope = float(np.polyfit(xs, ys, 1)[0])
            fits.append(ScalingFit(n, slope, len(xs), False))
    return fits


# -- output -------------------------------------------------------------------


def write_map_csv(result: MapResult, fh) -> None:
    """Row-major CSV (detuning outer, amplitude inner) with 17 significant digits."""
    fh.write("det_over_rabi,amp_error,fidelity\n")
    xs, ys = result.grid.detunings, result.grid.amplitude_errors
    for i, x in enumerate(xs):
        for j, y in enumerate(ys):
            fh.write(f"{x:.17g},{y:.17g},{result.values[i, j]:.17g}\n")


def write_map_pgm(result: MapResult, fh) -> None:
    """16-bit ASCII PGM of ``-log10(1 - F)`` clamped to [0, 12].

    Columns follow detuning, rows follow amplitude error with the largest at the top.
    """
    err = np.clip(1.0 - result.values, 1e-12, 1.0)
    level = np.clip(-np.log10(err), 0.0, 12.0)
    pix = np.rint(level / 12.0 * 65535).astype(int)
    nx, ny = pix.shape
    fh.write(f"P2\n{nx} {ny}\n65535\n")
    for j in reversed(range(ny)):
        fh.write(" ".join(str(v) for v in pix[:, j]) + "\n")
