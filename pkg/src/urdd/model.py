"""
Cycle and sequence propagators for dynamical decoupling.

A cycle is free evolution for ``tau/2``, a phased pulse, and free evolution
for ``tau/2``. In the static model the pulse is described by ``(p, alpha,
beta)`` and the free evolution folds into ``alpha`` as
``delta = -Delta * tau / 2``; in the integrated model the pulse is
integrated from its drive.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Union

import numpy as np

from . import su2
from .pulses import DriveConfig, IntegratorConfig, free_propagator, pulse_propagator
from .sequences import PhaseSequence, big_phi, ur_phases
from .su2 import DomainError, PulseParams

STATIC = "static"
INTEGRATED = "integrated"


@dataclass(frozen=True)
class CycleParams:
    p: float
    alpha: float = 0.0
    beta: float = 0.0
    delta: float = 0.0

    def __post_init__(self):
        PulseParams(self.p)  # validates p


@dataclass(frozen=True)
class IntegratedCycle:
    drive: DriveConfig
    tau: float
    integrator: IntegratorConfig = IntegratorConfig()


@dataclass(frozen=True)
class SequenceRun:
    sequence: PhaseSequence
    cycle: Union[CycleParams, IntegratedCycle]
    repetitions: int = 1

    def __post_init__(self):
        if int(self.repetitions) != self.repetitions or self.repetitions < 1:
            raise DomainError(f"repetitions must be a positive integer, got {self.repetitions}")

    @property
    def model(self) -> str:
        return STATIC if isinstance(self.cycle, CycleParams) else INTEGRATED


def cycle_propagator_static(c: CycleParams, phi: float) -> np.ndarray:
    return su2.make_propagator(PulseParams(c.p, c.alpha + c.delta, c.beta + phi))


def cycle_propagator_integrated(drive: DriveConfig, tau: float, phi: float,
                                icfg: IntegratorConfig = IntegratorConfig()) -> np.ndarray:
    half = free_propagator(drive.static_detuning, tau / 2)
    pulse = pulse_propagator(drive.with_phase(np.asarray(drive.drive_phase) + phi), icfg)
    return su2.mul(half, su2.mul(pulse, half))


def _power(U: np.ndarray, k: int) -> np.ndarray:
    out = su2.identity(U.shape[:-2])
    for _ in range(k):
        out = su2.mul(U, out)
    return out


def compose_phased(base_cycle: np.ndarray, phases: np.ndarray, repetitions: int = 1) -> np.ndarray:
    """Sequence propagator from one unphased cycle, using the phase-imprint rule.

    A drive phase ``phi`` conjugates the cycle by ``diag(e^{i phi/2}, e^{-i phi/2})``;
    the free evolution is diagonal and commutes with it.
    """
    U = su2.identity(base_cycle.shape[:-2])
    for phi in phases:
        U = su2.mul(su2.phase_rotate(base_cycle, phi), U)
    return _power(U, repetitions)


def sequence_propagator(run: SequenceRun) -> np.ndarray:
    phases = run.sequence.phases
    if isinstance(run.cycle, CycleParams):
        one = su2.compose([cycle_propagator_static(run.cycle, phi) for phi in phases])
        return _power(one, run.repetitions)
    ic = run.cycle
    cycles = [cycle_propagator_integrated(ic.drive, ic.tau, phi, ic.integrator) for phi in phases]
    one = cycles[0]
    for c in cycles[1:]:
        one = su2.mul(c, one)
    return _power(one, run.repetitions)


def ideal_propagator(sequence: PhaseSequence, repetitions: int = 1) -> np.ndarray:
    """Ideal (p = 1, alpha = beta = delta = 0) composition of the phased cycles."""
    run = SequenceRun(sequence, CycleParams(1.0), repetitions)
    return sequence_propagator(run)


def target_propagator(n: int, phi2_over_pi=None, phi_tilde_over_pi=0) -> np.ndarray:
    """Target of a UR sequence: its composition with ideal pulses.

    ``phi2_over_pi=None`` selects the symmetric member, whose target is
    ``(-1)^(n/2) I``.
    """
    phi2 = big_phi(n) if phi2_over_pi is None else phi2_over_pi
    seq = ur_phases(n, phi2)
    if phi_tilde_over_pi:
        seq = seq.shifted(phi_tilde_over_pi)
    return ideal_propagator(seq)


def _fold(raw: float) -> float:
    # 1 - F = 1 - |1 - raw|: exact for every raw in [0, 2]
    return min(1.0, max(0.0, 1.0 - abs(1.0 - raw)))


def analytic_error_ur(n: int, p: float, alpha: float, delta: float, phi2: float) -> float:
    """Closed-form fidelity error of a UR sequence with identical cycles.

    ``eps = 2 (1-p)^(n/2) sin^2[(n/2)(alpha + delta - pi/2 - phi2/2)]`` whenever
    that value is <= 1. Above 1 the trace changes sign and the fidelity error
    is ``2 - eps``; the fold keeps the result exact on all of ``p`` in [0, 1].
    """
    if n < 4 or n % 2:
        raise DomainError(f"UR error law needs an even n >= 4, got {n}")
    PulseParams(p)
    raw = 2 * (1 - p) ** (n / 2) * math.sin(n / 2 * (alpha + delta - math.pi / 2 - phi2 / 2)) ** 2
    return _fold(raw)


def analytic_error_cpmg(p: float, alpha: float, delta: float, phi2: float) -> float:
    """Closed-form fidelity error of the two-cycle sequence ``(0, phi2)``."""
    PulseParams(p)
    raw = 2 * (1 - p) * math.cos(alpha + delta - phi2 / 2) ** 2
    return _fold(raw)


def sequence_error(run: SequenceRun, target: Optional[np.ndarray] = None) -> float:
    """Fidelity error of a run against ``target`` (default: its ideal composition)."""
    U = sequence_propagator(run)
    if target is None:
        target = ideal_propagator(run.sequence, run.repetitions)
    return su2.fidelity(U, target)[1]
