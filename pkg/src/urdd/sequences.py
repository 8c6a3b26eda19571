"""
Phase sequences for dynamical decoupling.

Phases are kept in units of pi. When the inputs are exact (``int`` or
``Fraction``) the phases stay exact rationals, so the closed-form
universally robust (UR) family can be compared digit-for-digit with
tabulated values; floats are accepted where exactness is not needed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from numbers import Rational
from typing import Optional, Sequence, Union

import numpy as np

from .su2 import DomainError

PiUnits = Union[Fraction, int, float]

BASELINES = ("CPMG", "XY4", "XY8", "KDD", "KDD_XY4")


def _mod2(x: PiUnits) -> PiUnits:
    if isinstance(x, Rational):
        return Fraction(x) % 2
    return float(x) % 2.0


@dataclass(frozen=True)
class PhaseSequence:
    """An ordered list of pulse phases, stored in units of pi (mod 2)."""

    name: str
    phases_over_pi: tuple
    phi2_over_pi: Optional[PiUnits] = None
    big_phi_over_pi: Optional[PiUnits] = None
    family: str = "custom"
    sign: int = 1
    exact: bool = field(init=False)

    def __post_init__(self):
        ph = tuple(_mod2(x) for x in self.phases_over_pi)
        if not ph:
            raise DomainError("a phase sequence needs at least one pulse")
        object.__setattr__(self, "phases_over_pi", ph)
        object.__setattr__(self, "exact", all(isinstance(x, Fraction) for x in ph))

    @property
    def n(self) -> int:
        return len(self.phases_over_pi)

    @property
    def phases(self) -> np.ndarray:
        """Phases in radians."""
        return np.array([math.pi * float(x) for x in self.phases_over_pi])

    def shifted(self, phi_tilde_over_pi: PiUnits) -> "PhaseSequence":
        """Add a constant phase to every pulse."""
        return PhaseSequence(
            f"{self.name}+shift",
            tuple(x + phi_tilde_over_pi for x in self.phases_over_pi),
            family=self.family,
            sign=self.sign,
        )

    def is_palindrome(self) -> bool:
        ph = self.phases_over_pi
        if self.exact:
            return ph == ph[::-1]
        return bool(np.allclose(np.exp(1j * self.phases), np.exp(1j * self.phases[::-1]), atol=1e-12))


def _check_order(n: int) -> None:
    if isinstance(n, bool) or int(n) != n:
        raise DomainError(f"pulse count must be an integer, got {n!r}")
    if n < 4 or n % 2:
        raise DomainError(
            f"UR sequences need an even number of pulses n >= 4, got n={n}"
        )


def _check_sign(sign: int) -> int:
    if sign not in (1, -1):
        raise DomainError(f"sign must be +1 or -1, got {sign!r}")
    return sign


def big_phi(n: int, sign: int = 1) -> Fraction:
    """The quadratic phase increment of the UR family, in units of pi."""
    _check_order(n)
    sign = _check_sign(sign)
    if n % 4 == 0:
        return Fraction(sign, n // 4)
    m = (n - 2) // 4
    return Fraction(sign * 2 * m, 2 * m + 1)


def ur_phases(n: int, phi2_over_pi: PiUnits, sign: int = 1) -> PhaseSequence:
    """UR sequence of ``n`` pulses with a free second phase.

    ``phi_k = (k-1)(k-2)/2 * Phi + (k-1) * phi2`` for k = 1..n, where
    ``Phi = +-pi/m`` for n = 4m and ``+-2m pi/(2m+1)`` for n = 4m+2.

    Parameters
    ----------
    n : int
        Even number of pulses, at least 4.
    phi2_over_pi : Fraction, int or float
        Phase of the second pulse in units of pi. Exact input gives exact phases.
    sign : {+1, -1}
        Branch of ``Phi``.
    """
    Phi = big_phi(n, sign)
    if isinstance(phi2_over_pi, Rational):
        phi2 = Fraction(phi2_over_pi)
    else:
        phi2 = float(phi2_over_pi)
    phases = tuple((k - 1) * (k - 2) // 2 * Phi + (k - 1) * phi2 for k in range(1, n + 1))
    return PhaseSequence(
        f"UR{n}", phases, phi2_over_pi=_mod2(phi2), big_phi_over_pi=_mod2(Phi),
        family="UR", sign=sign,
    )


def symmetric_ur(n: int, sign: int = 1) -> PhaseSequence:
    """The palindromic UR sequence, obtained by taking ``phi2 = Phi``."""
    return ur_phases(n, big_phi(n, sign), sign)


_KDD_BLOCK = (Fraction(1, 6), Fraction(0), Fraction(1, 2), Fraction(0), Fraction(1, 6))
_XY4 = (Fraction(0), Fraction(1, 2), Fraction(0), Fraction(1, 2))


def baseline(name: str) -> PhaseSequence:
    """Literature comparison sequences (CPMG, XY4, XY8, KDD, KDD_XY4)."""
    key = name.upper().replace("-", "_")
    if key == "CPMG":
        phases = (Fraction(0), Fraction(0))
    elif key == "XY4":
        phases = _XY4
    elif key == "XY8":
        phases = _XY4 + _XY4[::-1]
    elif key == "KDD":
        phases = _KDD_BLOCK
    elif key == "KDD_XY4":
        phases = tuple(k + off for off in _XY4 for k in _KDD_BLOCK)
    else:
        raise DomainError(f"unknown baseline sequence {name!r}; expected one of {BASELINES}")
    return PhaseSequence(key, phases, family="baseline")


def by_name(name: str, sign: int = 1) -> PhaseSequence:
    """Look up ``URn`` (symmetric) or a baseline by label."""
    key = name.upper().replace("-", "_")
    if key.startswith("UR") and key[2:].isdigit():
        return symmetric_ur(int(key[2:]), sign)
    return baseline(key)


def phase_gate_angle(n: int, phi2: float, phi_tilde: float) -> float:
    """Phase-gate angle ``chi = n (phi2 - phi_tilde) / 2`` (radians).

    With ideal pulses the UR sequence with second phase ``phi2`` (and all
    phases offset by ``phi_tilde``) composes to
    ``(-1)^(n/2) diag(e^{i chi}, e^{-i chi})``.
    """
    if n % 2:
        raise DomainError(f"phase gate needs an even pulse count, got {n}")
    return n * (phi2 - phi_tilde) / 2


def format_pi(x: PiUnits) -> str:
    """Render a phase in units of pi as ``num/den`` (exact) or a float string."""
    if isinstance(x, Fraction):
        return f"{x.numerator}/{x.denominator}"
    return repr(float(x))


def parse_pi(text: str) -> PiUnits:
    """Parse ``"num/den"``, an integer, or a decimal, in units of pi."""
    text = text.strip()
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        pass
    try:
        return float(text)
    except ValueError:
        raise DomainError(f"cannot parse phase {text!r} (expected num/den in units of pi)") from None


def to_json_dict(seq: PhaseSequence) -> dict:
    phi2 = seq.phi2_over_pi
    return {
        "name": seq.name,
        "n": seq.n,
        "phi2_over_pi": None if phi2 is None else format_pi(phi2),
        "phases_over_pi": [format_pi(x) for x in seq.phases_over_pi],
    }


def from_json_dict(d: dict) -> PhaseSequence:
    phases = tuple(parse_pi(str(x)) for x in d["phases_over_pi"])
    if "n" in d and int(d["n"]) != len(phases):
        raise DomainError(f"n={d['n']} does not match {len(phases)} listed phases")
    phi2 = d.get("phi2_over_pi")
    return PhaseSequence(d.get("name", "custom"), phases,
                         phi2_over_pi=None if phi2 is None else parse_pi(str(phi2)))


def from_phases(name: str, phases_over_pi: Sequence[PiUnits]) -> PhaseSequence:
    return PhaseSequence(name, tuple(phases_over_pi))
