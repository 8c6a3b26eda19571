"""
Monte Carlo model of an inhomogeneously broadened qubit ensemble under
repeated dynamical decoupling.

Each qubit carries a static detuning and a relative Rabi-amplitude error.
Its coherence starts on the equator of the Bloch sphere and is read back
phase-matched to its own starting phase; the retrieved signal is the
squared modulus of the ensemble-averaged coherence, multiplied by a
homogeneous ``exp(-2 t / T2)`` decay. Units are SI (seconds, rad/s).
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, fields
from typing import Iterable, List, Optional, Sequence, Tuple

import numpy as np

from . import su2
from .model import compose_phased
from .pulses import DriveConfig, IntegratorConfig, PulseShape, free_propagator, pulse_propagator
from .sequences import PhaseSequence
from .su2 import DomainError

CHUNK = 1024
PHASE_MODES = ("random", "fixed")


@dataclass(frozen=True)
class EnsembleSpec:
    """Distribution of qubit parameters.

    ``coherence_phase="random"`` draws each qubit's initial coherence phase
    uniformly; ``"fixed"`` starts every qubit in ``(|0> + |1>)/sqrt(2)``.
    """

    n_qubits: int = 2000
    detuning_sigma: float = 0.0
    rabi_spread: float = 0.1
    rabi_offset: float = 0.0
    drive_detuning: float = 0.0
    T2: float = 500e-6
    seed: int = 0
    coherence_phase: str = "random"

    def __post_init__(self):
        if int(self.n_qubits) != self.n_qubits or self.n_qubits < 1:
            raise DomainError(f"n_qubits must be a positive integer, got {self.n_qubits}")
        if not self.T2 > 0:
            raise DomainError(f"T2 must be positive, got {self.T2}")
        if not self.detuning_sigma >= 0 or not self.rabi_spread >= 0:
            raise DomainError("detuning_sigma and rabi_spread must be >= 0")
        if self.coherence_phase not in PHASE_MODES:
            raise DomainError(f"coherence_phase must be one of {PHASE_MODES}")
        if not 0 <= int(self.seed) < 2 ** 64:
            raise DomainError("seed must be a 64-bit unsigned integer")

    # JSON uses camelCase keys
    _JSON_KEYS = {
        "nQubits": "n_qubits", "detuningSigma": "detuning_sigma", "rabiSpread": "rabi_spread",
        "rabiOffset": "rabi_offset", "driveDetuning": "drive_detuning", "T2": "T2",
        "seed": "seed", "coherencePhase": "coherence_phase",
    }

    @classmethod
    def from_json_dict(cls, d: dict) -> "EnsembleSpec":
        unknown = set(d) - set(cls._JSON_KEYS)
        if unknown:
            raise DomainError(f"unknown ensemble fields: {sorted(unknown)}")
        return cls(**{cls._JSON_KEYS[k]: v for k, v in d.items()})

    def to_json_dict(self) -> dict:
        back = {v: k for k, v in self._JSON_KEYS.items()}
        return {back[f.name]: getattr(self, f.name) for f in fields(self)}


@dataclass(frozen=True)
class EnsembleSample:
    detuning: np.ndarray
    amplitude_error: np.ndarray
    coherence_phase: np.ndarray


@dataclass(frozen=True)
class DDRun:
    """Pulse and spacing used for every qubit. ``ideal`` swaps in instantaneous perfect pi pulses."""

    shape: PulseShape
    tau: float
    ideal: bool = False
    integrator: IntegratorConfig = IntegratorConfig()

    @property
    def cycle_time(self) -> float:
        return self.tau + self.shape.duration


@dataclass(frozen=True)
class StorageResult:
    storage_time: float
    efficiency_proxy: float
    per_sequence: List[Tuple[str, float]]


def pryso_like_spec(n_qubits: int = 2000, seed: int = 2016, t_deph: float = 13e-6,
                    T2: float = 500e-6, **kw) -> EnsembleSpec:
    """Rare-earth memory regime: dephasing time ~13 us, T2 = 500 us."""
    return EnsembleSpec(n_qubits=n_qubits, detuning_sigma=math.sqrt(2) / t_deph,
                        T2=T2, seed=seed, **kw)


def pryso_like_run(tau: float = 40e-6, ideal: bool = False) -> DDRun:
    """10 us rectangular pulses at Rabi frequency 2 pi x 50 kHz (area pi)."""
    return DDRun(PulseShape("rectangular", 10e-6, 2 * math.pi * 50e3), tau, ideal)


def _qubit_draw(seed: int, k: int, spec: EnsembleSpec) -> Tuple[float, float, float]:
    rng = np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(k,)))
    d = spec.detuning_sigma * rng.standard_normal()
    z = rng.standard_normal()
    while abs(z) > 3.0:
        z = rng.standard_normal()
    theta = rng.uniform(0.0, 2 * math.pi)
    return d, spec.rabi_offset + spec.rabi_spread * z, theta


def sample_ensemble(spec: EnsembleSpec) -> EnsembleSample:
    """Per-qubit detunings, amplitude errors and initial coherence phases.

    Qubit ``k`` draws from its own stream keyed by ``(seed, k)``, so any
    subset can be regenerated independently of evaluation order.
    """
    draws = np.array([_qubit_draw(int(spec.seed), k, spec) for k in range(spec.n_qubits)])
    theta = draws[:, 2] if spec.coherence_phase == "random" else np.zeros(spec.n_qubits)
    return EnsembleSample(draws[:, 0], draws[:, 1], theta)


def repetitions_in(seq: PhaseSequence, run: DDRun, storage_time: float) -> int:
    seq_time = seq.n * run.cycle_time
    reps = int(math.floor(storage_time / seq_time * (1 + 1e-12)))
    if reps < 1:
        raise DomainError(
            f"storage time {storage_time:g} s is shorter than one {seq.name} sequence ({seq_time:g} s)"
        )
    return reps


def _evolve(detuning, amp_error, seq: Optional[PhaseSequence], run: DDRun,
            storage_time: float) -> np.ndarray:
    if seq is None:
        return free_propagator(detuning, storage_time)
    reps = repetitions_in(seq, run, storage_time)
    if run.ideal:
        half = free_propagator(detuning, run.cycle_time / 2)
        pulse = su2.make_propagator(su2.PulseParams(1.0))
    else:
        half = free_propagator(detuning, run.tau / 2)
        pulse = pulse_propagator(DriveConfig(run.shape, amp_error, detuning, 0.0), run.integrator)
    cycle = su2.mul(half, su2.mul(pulse, half))
    return compose_phased(cycle, seq.phases, reps)


def _readout(U: np.ndarray, theta: np.ndarray) -> np.ndarray:
    # coherence rho_10 = conj(psi_0) psi_1, referenced to the qubit's starting phase
    e = np.exp(1j * theta)
    psi0 = (U[..., 0, 0] + U[..., 0, 1] * e) / math.sqrt(2)
    psi1 = (U[..., 1, 0] + U[..., 1, 1] * e) / math.sqrt(2)
    return np.conj(psi0) * psi1 * np.conj(e)


def storage_efficiency(spec: EnsembleSpec, seq: Optional[PhaseSequence], run: DDRun,
                       storage_time: float, threads: int = 1,
                       sample: Optional[EnsembleSample] = None) -> StorageResult:
    """Efficiency proxy after ``storage_time`` of decoupling with ``seq``.

    ``seq=None`` gives free-induction decay. The sequence is repeated as
    many whole times as fit into the storage time and read out at its end.
    """
    if not storage_time > 0:
        raise DomainError(f"storage time must be positive, got {storage_time}")
    sample = sample or sample_ensemble(spec)
    n = spec.n_qubits
    coh = np.empty(n, dtype=complex)
    det = sample.detuning + spec.drive_detuning

    def work(start):
        sl = slice(start, min(start + CHUNK, n))
        U = _evolve(det[sl], sample.amplitude_error[sl], seq, run, storage_time)
        coh[sl] = _readout(U, sample.coherence_phase[sl])

    starts = range(0, n, CHUNK)
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            list(pool.map(work, starts))
    else:
        for s in starts:
            work(s)
    mean = complex(math.fsum(coh.real), math.fsum(coh.imag)) / n
    # initial coherence modulus is 1/2
    proxy = abs(mean) ** 2 / 0.25 * math.exp(-2 * storage_time / spec.T2)
    proxy = min(1.0, max(0.0, proxy))
    name = "none" if seq is None else seq.name
    return StorageResult(storage_time, proxy, [(name, proxy)])


def compare_storage(spec: EnsembleSpec, sequences: Iterable[Optional[PhaseSequence]], run: DDRun,
                    storage_time: float, threads: int = 1) -> StorageResult:
    """Proxy for several sequences on the same ensemble; ``efficiency_proxy`` is the best one."""
    sample = sample_ensemble(spec)
    rows = []
    for seq in sequences:
        rows.extend(storage_efficiency(spec, seq, run, storage_time, threads, sample).per_sequence)
    best = max(v for _, v in rows)
    return StorageResult(storage_time, best, rows)


def storage_curves(spec: EnsembleSpec, sequences: Sequence[Optional[PhaseSequence]], run: DDRun,
                   times: Sequence[float], threads: int = 1) -> List[Tuple[float, str, float]]:
    sample = sample_ensemble(spec)
    rows = []
    for seq in sequences:
        for t in times:
            res = storage_efficiency(spec, seq, run, t, threads, sample)
            rows.append((t, res.per_sequence[0][0], res.efficiency_proxy))
    return rows


def write_storage_csv(rows: Iterable[Tuple[float, str, float]], fh) -> None:
    fh.write("storage_time_s,sequence,efficiency_proxy\n")
    for t, name, v in rows:
        fh.write(f"{t:.17g},{name},{v:.17g}\n")
