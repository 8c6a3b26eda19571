"""
Algebra of 2x2 unitary propagators.

A propagator is a plain ``(2, 2)`` complex numpy array (batched code uses
``(..., 2, 2)``). Single-pulse propagators are parametrized by a transition
probability ``p`` and two phases ``alpha``, ``beta``::

    U(alpha, beta, p) = [[ sqrt(1-p) e^{i alpha},  sqrt(p) e^{i beta}  ],
                         [-sqrt(p) e^{-i beta},    sqrt(1-p) e^{-i alpha}]]

A drive phase shift ``phi`` enters only as ``beta -> beta + phi``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Optional, Sequence

import numpy as np

SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)
IDENTITY = np.eye(2, dtype=complex)

UNITARITY_TOL = 1e-10
# below this |u12| (resp. |u11|) the phase beta (resp. alpha) is not defined
DEGENERACY_TOL = 1e-12


class DomainError(ValueError):
    """Raised when an argument lies outside the domain of an operation."""


def wrap_phase(x: float) -> float:
    """Reduce an angle to the interval (-pi, pi]."""
    y = math.remainder(x, 2 * math.pi)
    if y <= -math.pi:
        y += 2 * math.pi
    return y


@dataclass(frozen=True)
class PulseParams:
    """Transition probability and phases of one (possibly imperfect) pulse.

    Phases are stored reduced to (-pi, pi].
    """

    p: float
    alpha: float = 0.0
    beta: float = 0.0

    def __post_init__(self):
        if not 0.0 <= self.p <= 1.0 or math.isnan(self.p):
            raise DomainError(f"transition probability must lie in [0, 1], got {self.p}")
        object.__setattr__(self, "alpha", wrap_phase(float(self.alpha)))
        object.__setattr__(self, "beta", wrap_phase(float(self.beta)))


class Extraction(NamedTuple):
    params: PulseParams
    global_phase: float
    # "beta" when p == 0, "alpha" when p == 1, otherwise None
    degenerate: Optional[str] = None


def make_propagator(params: PulseParams) -> np.ndarray:
    a = math.sqrt(1.0 - params.p)
    b = math.sqrt(params.p)
    ea = complex(math.cos(params.alpha), math.sin(params.alpha))
    eb = complex(math.cos(params.beta), math.sin(params.beta))
    return np.array([[a * ea, b * eb], [-b * eb.conjugate(), a * ea.conjugate()]])


def apply_phase_shift(params: PulseParams, phi: float) -> PulseParams:
    """Return the parameters of the same pulse driven with an extra phase ``phi``."""
    return PulseParams(params.p, params.alpha, params.beta + phi)


def unitarity_error(U: np.ndarray) -> float:
    """Max-entry deviation of ``U U^dagger`` from the identity."""
    U = np.asarray(U)
    return float(np.max(np.abs(U @ U.conj().swapaxes(-1, -2) - IDENTITY)))


def _check_unitary(U: np.ndarray, tol: float = UNITARITY_TOL) -> np.ndarray:
    U = np.asarray(U, dtype=complex)
    if U.shape != (2, 2):
        raise DomainError(f"expected a 2x2 matrix, got shape {U.shape}")
    err = unitarity_error(U)
    if not err < tol:
        raise DomainError(f"matrix is not unitary (|UU^dag - I| = {err:.3e})")
    return U


def extract_params(U: np.ndarray) -> Extraction:
    """Invert :func:`make_propagator` up to a global phase.

    The global phase ``g`` is fixed by ``det(exp(-i g) U) = 1`` with
    ``g`` in (-pi/2, pi/2]. When ``p`` is 0 (or 1) the phase ``beta``
    (or ``alpha``) carries no information; it is reported as 0 and the
    ``degenerate`` field names it.
    """
    U = _check_unitary(U)
    det = U[0, 0] * U[1, 1] - U[0, 1] * U[1, 0]
    g = 0.5 * math.atan2(det.imag, det.real)
    # atan2 gives (-pi, pi]; -pi/2 only arises from a det of exactly -1 + (-0)j
    if g <= -math.pi / 2:
        g += math.pi
    V = U * complex(math.cos(g), -math.sin(g))
    p = min(1.0, abs(V[0, 1]) ** 2)
    degenerate = None
    if abs(V[0, 1]) < DEGENERACY_TOL:
        beta = 0.0
        degenerate = "beta"
        p = 0.0
    else:
        beta = math.atan2(V[0, 1].imag, V[0, 1].real)
    if abs(V[0, 0]) < DEGENERACY_TOL:
        alpha = 0.0
        degenerate = "alpha"
        p = 1.0
    else:
        alpha = math.atan2(V[0, 0].imag, V[0, 0].real)
    return Extraction(PulseParams(p, alpha, beta), g, degenerate)


def compose(Us: Sequence[np.ndarray]) -> np.ndarray:
    """Product of propagators in time order: ``Us[0]`` acts first."""
    if len(Us) == 0:
        raise DomainError("cannot compose an empty list of propagators")
    out = np.asarray(Us[0], dtype=complex)
    for U in Us[1:]:
        out = np.asarray(U) @ out
    return out


def fidelity(U: np.ndarray, U0: np.ndarray) -> tuple[float, float]:
    """Gate fidelity ``F = |Tr(U0^dag U)| / 2`` and the error ``1 - F``."""
    U = _check_unitary(U)
    U0 = _check_unitary(U0)
    F = min(1.0, abs(np.trace(U0.conj().T @ U)) / 2)
    return F, 1.0 - F


# -- batched helpers --------------------------------------------------------
# Entry-wise formulas rather than np.matmul so that the result for one element
# of a batch never depends on the batch size or memory layout.


def mul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Batched 2x2 product ``a @ b`` over leading axes."""
    a, b = np.broadcast_arrays(a, b)
    out = np.empty(a.shape, dtype=complex)
    out[..., 0, 0] = a[..., 0, 0] * b[..., 0, 0] + a[..., 0, 1] * b[..., 1, 0]
    out[..., 0, 1] = a[..., 0, 0] * b[..., 0, 1] + a[..., 0, 1] * b[..., 1, 1]
    out[..., 1, 0] = a[..., 1, 0] * b[..., 0, 0] + a[..., 1, 1] * b[..., 1, 0]
    out[..., 1, 1] = a[..., 1, 0] * b[..., 0, 1] + a[..., 1, 1] * b[..., 1, 1]
    return out


def identity(shape: tuple = ()) -> np.ndarray:
    out = np.zeros(tuple(shape) + (2, 2), dtype=complex)
    out[..., 0, 0] = 1.0
    out[..., 1, 1] = 1.0
    return out


def phase_rotate(U: np.ndarray, phi) -> np.ndarray:
    """Conjugate by ``diag(e^{i phi/2}, e^{-i phi/2})``: the effect of a drive phase ``phi``."""
    e = np.exp(1j * np.asarray(phi, dtype=float))
    out = np.array(U, dtype=complex, copy=True)
    out[..., 0, 1] *= e
    out[..., 1, 0] *= np.conj(e)
    return out


def trace_fidelity(U: np.ndarray, U0: np.ndarray) -> np.ndarray:
    """Batched ``|Tr(U0^dag U)| / 2`` without unitarity checks."""
    tr = (
        np.conj(U0[..., 0, 0]) * U[..., 0, 0]
        + np.conj(U0[..., 1, 0]) * U[..., 1, 0]
        + np.conj(U0[..., 0, 1]) * U[..., 0, 1]
        + np.conj(U0[..., 1, 1]) * U[..., 1, 1]
    )
    return np.minimum(np.abs(tr) / 2, 1.0)
