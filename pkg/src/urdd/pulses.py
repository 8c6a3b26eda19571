"""
Single-pulse propagators by time-ordered integration.

In the frame rotating at the drive frequency the two-level Hamiltonian is::

    h(t) = [[ D(t)/2,               W(t) e^{i phi}/2 ],
            [ W(t) e^{-i phi}/2,   -D(t)/2           ]]

with Rabi envelope ``W(t) = (1 + amplitude_error) * envelope(t)`` and
detuning ``D(t) = static_detuning + chirp_rate * (t - T/2)``. The
propagator is the product of exact step exponentials, each evaluated at
the step midpoint (second order in the step size).

All drive quantities (``static_detuning``, ``amplitude_error``,
``drive_phase``) may be numpy arrays; they broadcast into a batch of
propagators of shape ``(..., 2, 2)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Optional

import numpy as np

from . import su2
from .su2 import DomainError

RECTANGULAR = "rectangular"
GAUSSIAN = "gaussian"
CHIRPED = "chirped_rectangular"
SHAPES = (RECTANGULAR, GAUSSIAN, CHIRPED)


@dataclass(frozen=True)
class PulseShape:
    """Envelope of one pulse.

    Gaussian envelopes are centred at ``T/2`` and truncated to ``[0, T]``;
    ``gaussian_width`` defaults to ``T/6``.
    """

    kind: str = RECTANGULAR
    duration: float = math.pi
    peak_rabi: float = 1.0
    gaussian_width: Optional[float] = None
    chirp_rate: float = 0.0

    def __post_init__(self):
        if self.kind not in SHAPES:
            raise DomainError(f"unknown pulse shape {self.kind!r}; expected one of {SHAPES}")
        if not self.duration > 0:
            raise DomainError(f"pulse duration must be positive, got {self.duration}")
        if not self.peak_rabi >= 0:
            raise DomainError(f"peak Rabi frequency must be >= 0, got {self.peak_rabi}")
        if self.kind == GAUSSIAN:
            if self.gaussian_width is None:
                object.__setattr__(self, "gaussian_width", self.duration / 6)
            if not self.gaussian_width > 0:
                raise DomainError(f"gaussian width must be positive, got {self.gaussian_width}")

    def envelope(self, t: np.ndarray) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        if self.kind == GAUSSIAN:
            return self.peak_rabi * np.exp(-((t - self.duration / 2) ** 2) / (2 * self.gaussian_width ** 2))
        return np.full_like(t, self.peak_rabi)

    def detuning_sweep(self, t: np.ndarray) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        if self.kind == CHIRPED:
            return self.chirp_rate * (t - self.duration / 2)
        return np.zeros_like(t)

    def area(self) -> float:
        """Pulse area (integral of the envelope over the pulse)."""
        if self.kind == GAUSSIAN:
            s = self.gaussian_width
            half = self.duration / 2
            return self.peak_rabi * s * math.sqrt(2 * math.pi) * math.erf(half / (s * math.sqrt(2)))
        return self.peak_rabi * self.duration

    @classmethod
    def gaussian_pi(cls, duration: float, width: Optional[float] = None) -> "PulseShape":
        """Truncated Gaussian scaled to area pi."""
        probe = cls(GAUSSIAN, duration, 1.0, width)
        return cls(GAUSSIAN, duration, math.pi / probe.area(), probe.gaussian_width)


@dataclass(frozen=True)
class DriveConfig:
    shape: PulseShape = PulseShape()
    amplitude_error: object = 0.0
    static_detuning: object = 0.0
    drive_phase: object = 0.0

    def __post_init__(self):
        if np.any(1 + np.asarray(self.amplitude_error, dtype=float) < 0):
            raise DomainError("amplitude error must satisfy 1 + amplitude_error >= 0")

    def with_phase(self, phi) -> "DriveConfig":
        return replace(self, drive_phase=phi)


@dataclass(frozen=True)
class IntegratorConfig:
    steps_per_pulse: int = 2000
    method: str = "piecewise_constant_exponential"

    def __post_init__(self):
        if int(self.steps_per_pulse) != self.steps_per_pulse or self.steps_per_pulse < 16:
            raise DomainError(f"steps_per_pulse must be an integer >= 16, got {self.steps_per_pulse}")
        if self.method != "piecewise_constant_exponential":
            raise DomainError(f"unknown integration method {self.method!r}")


def expm_traceless(hx, hy, hz, dt: float) -> np.ndarray:
    """``exp(-i dt (hx sx + hy sy + hz sz))`` for real, broadcastable coefficients."""
    hx, hy, hz = np.broadcast_arrays(*(np.asarray(v, dtype=float) for v in (hx, hy, hz)))
    norm = np.sqrt(hx * hx + hy * hy + hz * hz)
    theta = norm * dt
    c = np.cos(theta)
    # sin(theta)/norm, finite as norm -> 0
    s = dt * np.sinc(theta / np.pi)
    U = np.empty(hx.shape + (2, 2), dtype=complex)
    U[..., 0, 0] = c - 1j * s * hz
    U[..., 1, 1] = c + 1j * s * hz
    U[..., 0, 1] = -1j * s * (hx - 1j * hy)
    U[..., 1, 0] = -1j * s * (hx + 1j * hy)
    return U


def pulse_propagator(cfg: DriveConfig, icfg: IntegratorConfig = IntegratorConfig()) -> np.ndarray:
    """Time-ordered propagator of one pulse over ``[0, T]``."""
    shape = cfg.shape
    n = int(icfg.steps_per_pulse)
    dt = shape.duration / n
    scale = 1.0 + np.asarray(cfg.amplitude_error, dtype=float)
    det0 = np.asarray(cfg.static_detuning, dtype=float)
    phi = np.asarray(cfg.drive_phase, dtype=float)
    batch = np.broadcast_shapes(scale.shape, det0.shape, phi.shape)
    cphi, sphi = np.cos(phi), np.sin(phi)

    t_mid = (np.arange(n) + 0.5) * dt
    env = shape.envelope(t_mid)
    sweep = shape.detuning_sweep(t_mid)
    # constant-Hamiltonian pulses: one exponential serves every step
    constant = shape.kind == RECTANGULAR

    U = su2.identity(batch)
    step = None
    for j in range(n):
        if step is None or not constant:
            w = scale * env[j]
            # h01 = w e^{i phi}/2 = hx - i hy
            step = expm_traceless(w * cphi / 2, -w * sphi / 2, (det0 + sweep[j]) / 2, dt)
        U = su2.mul(step, U)
    return U


def free_propagator(detuning, tau: float) -> np.ndarray:
    """Free evolution ``diag(e^{-i D tau/2}, e^{i D tau/2})``."""
    if np.any(np.asarray(tau) < 0):
        raise DomainError(f"free-evolution time must be >= 0, got {tau}")
    x = np.asarray(detuning, dtype=float) * tau / 2
    U = np.zeros(x.shape + (2, 2), dtype=complex)
    U[..., 0, 0] = np.exp(-1j * x)
    U[..., 1, 1] = np.exp(1j * x)
    return U


def rect_oracle(rabi, detuning, duration: float, phi=0.0) -> np.ndarray:
    """Closed-form propagator of a constant-Hamiltonian (rectangular) pulse."""
    rabi = np.asarray(rabi, dtype=float)
    detuning = np.asarray(detuning, dtype=float)
    phi = np.asarray(phi, dtype=float)
    rabi, detuning, phi = np.broadcast_arrays(rabi, detuning, phi)
    gen = np.sqrt(rabi ** 2 + detuning ** 2)
    half = gen * duration / 2
    c = np.cos(half)
    # sin(W T/2)/W
    s = (duration / 2) * np.sinc(half / np.pi)
    U = np.empty(rabi.shape + (2, 2), dtype=complex)
    U[..., 0, 0] = c - 1j * s * detuning
    U[..., 1, 1] = c + 1j * s * detuning
    U[..., 0, 1] = -1j * s * rabi * np.exp(1j * phi)
    U[..., 1, 0] = -1j * s * rabi * np.exp(-1j * phi)
    return U


def rabi_probability(rabi: float, detuning: float, duration: float) -> float:
    """Transition probability of a rectangular pulse, ``(W^2/G^2) sin^2(G T/2)``."""
    gen2 = rabi ** 2 + detuning ** 2
    if gen2 == 0:
        return 0.0
    return rabi ** 2 / gen2 * math.sin(math.sqrt(gen2) * duration / 2) ** 2
