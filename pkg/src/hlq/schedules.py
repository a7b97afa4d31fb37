"""Per-step preparations of the disposable spin that encodes the drive.

Each step of the spin-assisted engine consumes one freshly prepared spin,
described by an :class:`AtomPrep`: the state amplitudes (alpha, beta) and
the coupling strength eta for that step. The spin coherence
zeta = conj(alpha) * beta plays the role of the drive amplitude, so
|zeta| <= 1/2 always, with the maximum at an equal-weight superposition.

A schedule is simply a list of N preparations. The three bundled
generators cover the cases of interest:

- ``uniform``:     the same prep every step,
- ``alternating``: the sign of zeta flips step to step (pairwise
                   cancellation of the emitted field),
- ``rotating``:    the phase of zeta turns at the oscillator frequency,
                   evaluated at the mid-step times tau_j = (j - 1/2) dt.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

from .errors import InvalidCoherenceError, InvalidPreparationError

SCHEDULES = ("uniform", "alternating", "rotating")


@dataclass(frozen=True)
class AtomPrep:
    """One spin preparation: |phi> = alpha|up> + beta|down>, coupling eta."""

    alpha: complex
    beta: complex
    eta: complex

    @property
    def zeta(self) -> complex:
        """Spin coherence conj(alpha) * beta, the per-step drive amplitude."""
        return complex(self.alpha).conjugate() * complex(self.beta)

    def validate(self) -> None:
        norm = abs(self.alpha) ** 2 + abs(self.beta) ** 2
        if abs(norm - 1.0) > 1e-12:
            raise InvalidPreparationError(
                f"|alpha|^2 + |beta|^2 = {norm!r}, expected 1"
            )


def _mixing_angle(zeta_abs: float) -> float:
    # |zeta| = cos(theta) sin(theta) = sin(2 theta)/2, capped at 1/2.
    if not 0.0 <= zeta_abs <= 0.5:
        raise InvalidCoherenceError(
            f"|zeta| = {zeta_abs!r} outside the reachable range [0, 0.5]"
        )
    return 0.5 * math.asin(2.0 * zeta_abs)


def uniform_schedule(
    n_steps: int,
    zeta_abs: float,
    phase: float = 0.0,
    eta: complex = 1.0,
) -> list[AtomPrep]:
    """N identical preps with zeta = zeta_abs * exp(i phase)."""
    theta = _mixing_angle(zeta_abs)
    prep = AtomPrep(
        alpha=complex(math.cos(theta)),
        beta=cmath.exp(1j * phase) * math.sin(theta),
        eta=complex(eta),
    )
    return [prep] * n_steps

def alternating_schedule(
    n_steps: int,
    zeta_abs: float,
    eta: complex = 1.0,
) -> list[AtomPrep]:
    """Preps whose coherence flips sign every step: zeta_j = (-1)^(j-1) zeta_abs."""
    theta = _mixing_angle(zeta_abs)
    even = AtomPrep(complex(math.cos(theta)), complex(math.sin(theta)), complex(eta))
    odd = AtomPrep(complex(math.cos(theta)), complex(-math.sin(theta)), complex(eta))
    return [even if j % 2 == 0 else odd for j in range(n_steps)]


def rotating_schedule(
    n_steps: int,
    zeta_abs: float,
    omega: float,
    dt: float,
    eta: complex = 1.0,
) -> list[AtomPrep]:
    """Preps whose coherence turns with the mode: zeta_j = zeta_abs e^{-i omega tau_j}.

    tau_j = (j - 1/2) dt is the mid-step time at which the engines evaluate
    their couplings. At omega = 0 this degenerates to the uniform schedule.
    """
    theta = _mixing_angle(zeta_abs)
    a = complex(math.cos(theta))
    s = math.sin(theta)
    preps = []
    for j in range(1, n_steps + 1):
        tau = (j - 0.5) * dt
        preps.append(AtomPrep(a, s * cmath.exp(-1j * omega * tau), complex(eta)))
    return preps
