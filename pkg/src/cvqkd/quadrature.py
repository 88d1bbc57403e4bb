"""Gaussian single- and two-mode quadrature model.

All variances are in quantum-noise-limit units (coherent state = 1) with
``X = a + a^dagger`` and ``Y = -i(a - a^dagger)``. Signal powers are the
spectral powers carried at the encoding frequency; a binary symbol of power
``V_s`` is represented per time bin by a displacement of ``+/- sqrt(V_s)/2``,
which makes a threshold decision reproduce :func:`ber_from_snr` exactly.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError
from .numeric import erfc, solve_monotone


class Quadrature(str, enum.Enum):
    AMPLITUDE = "+"
    PHASE = "-"

    @property
    def other(self) -> "Quadrature":
        return Quadrature.PHASE if self is Quadrature.AMPLITUDE else Quadrature.AMPLITUDE


def _quad(q) -> Quadrature:
    try:
        return Quadrature(q)
    except ValueError:
        raise DomainError(f"quadrature must be '+' or '-', got {q!r}") from None


@dataclass(frozen=True)
class QuadratureVariances:
    """Noise powers of the amplitude (+) and phase (-) quadratures."""

    v_plus: float
    v_minus: float

    def __post_init__(self) -> None:
        if not (self.v_plus > 0 and self.v_minus > 0):
            raise DomainError(f"quadrature variances must be positive, got {self}")

    @classmethod
    def coherent(cls) -> "QuadratureVariances":
        return cls(1.0, 1.0)

    @classmethod
    def squeezed(cls, v_plus: float, v_minus: float | None = None) -> "QuadratureVariances":
        """Amplitude-squeezed state; minimum uncertainty unless ``v_minus`` is given."""
        if not v_plus > 0:
            raise DomainError(f"squeezed variance must be positive, got {v_plus!r}")
        return cls(v_plus, 1.0 / v_plus if v_minus is None else v_minus)

    @property
    def product(self) -> float:
        return self.v_plus * self.v_minus

    def __getitem__(self, q) -> float:
        return self.v_plus if _quad(q) is Quadrature.AMPLITUDE else self.v_minus


@dataclass(frozen=True)
class QuadratureSignal:
    vs_plus: float = 0.0
    vs_minus: float = 0.0

    def __post_init__(self) -> None:
        if self.vs_plus < 0 or self.vs_minus < 0:
            raise DomainError(f"signal powers must be non-negative, got {self}")

    def __getitem__(self, q) -> float:
        return self.vs_plus if _quad(q) is Quadrature.AMPLITUDE else self.vs_minus


@dataclass(frozen=True)
class TapParams:
    eta_plus: float = 0.5
    partition_noise: QuadratureVariances = field(default_factory=QuadratureVariances.coherent)

    def __post_init__(self) -> None:
        if not 0.0 <= self.eta_plus <= 1.0:
            raise DomainError(f"splitting ratio must lie in [0, 1], got {self.eta_plus!r}")

    @property
    def eta_minus(self) -> float:
        return 1.0 - self.eta_plus


@dataclass(frozen=True)
class GaussianMode:
    variances: QuadratureVariances
    signal: QuadratureSignal


def snr(signal: float, noise: float) -> float:
    if not noise > 0:
        raise DomainError(f"noise power must be positive, got {noise!r}")
    if signal < 0:
        raise DomainError(f"signal power must be non-negative, got {signal!r}")
    return signal / noise


def simultaneous_snr(
    signal: float, noise: QuadratureVariances, tap: TapParams, quadrature
) -> float:
    """Best SNR on one quadrature when both are measured through a beamsplitter.

    The port measuring ``quadrature`` receives fraction ``eta`` of the beam and
    ``1 - eta`` of the partition noise entering the splitter's open port.
    """
    q = _quad(quadrature)
    if q is Quadrature.AMPLITUDE:
        eta, eta_other = tap.eta_plus, tap.eta_minus
    else:
        eta, eta_other = tap.eta_minus, tap.eta_plus
    vn, vm = noise[q], tap.partition_noise[q]
    if eta == 0.0:
        return 0.0
    return eta * signal / (eta * vn + eta_other * vm)


def ber_from_snr(s: float) -> float:
    """Bit error rate of binary pulse-code modulation at signal-to-noise ``s``."""
    if s < 0 or math.isnan(s):
        raise DomainError(f"SNR must be non-negative, got {s!r}")
    if math.isinf(s):
        return 0.0
    return 0.5 * erfc(0.5 * math.sqrt(0.5 * s))


def snr_for_ber(target: float) -> float:
    """Inverse of :func:`ber_from_snr`."""
    if not 0.0 < target <= 0.5:
        raise DomainError(f"BER target must lie in (0, 0.5], got {target!r}")
    if target == 0.5:
        return 0.0
    hi = 64.0
    while ber_from_snr(hi) > target:
        hi *= 2.0
    return solve_monotone(ber_from_snr, target, 0.0, hi)


def tap_beam(
    in_vars: QuadratureVariances,
    in_signal: QuadratureSignal,
    tap_fraction: float,
    vacuum: QuadratureVariances | None = None,
) -> tuple[GaussianMode, GaussianMode]:
    """Split off ``tap_fraction`` of a beam; returns ``(kept, tapped)``."""
    f = tap_fraction
    if not 0.0 <= f <= 1.0:
        raise DomainError(f"tap fraction must lie in [0, 1], got {f!r}")
    vm = QuadratureVariances.coherent() if vacuum is None else vacuum

    def mix(w: float, w_open: float) -> GaussianMode:
        return GaussianMode(
            QuadratureVariances(
                w * in_vars.v_plus + w_open * vm.v_plus,
                w * in_vars.v_minus + w_open * vm.v_minus,
            ),
            QuadratureSignal(w * in_signal.vs_plus, w * in_signal.vs_minus),
        )

    return mix(1.0 - f, f), mix(f, 1.0 - f)


# Quadrature index order used for the EPR covariance matrices.
XC, YC, XD, YD = range(4)

# (X_c, Y_c, X_d, Y_d) as a linear map of (X_a, Y_a, X_b, Y_b) for
# c = (a + i b)/sqrt 2, d = (a - i b)/sqrt 2.
_EPR_MAP = np.array(
    [
        [1.0, 0.0, 0.0, -1.0],
        [0.0, 1.0, 1.0, 0.0],
        [1.0, 0.0, 0.0, 1.0],
        [0.0, 1.0, -1.0, 0.0],
    ]
) / math.sqrt(2.0)


@dataclass(frozen=True)
class EprPairState:
    """Two amplitude-squeezed, signal-carrying beams mixed into modes c and d."""

    a_vars: QuadratureVariances
    b_vars: QuadratureVariances
    signal_a: QuadratureSignal
    signal_b: QuadratureSignal
    covariance: np.ndarray = field(repr=False, compare=False)

    def variance(self, i: int) -> float:
        return float(self.covariance[i, i])

    def combined_variance(self, weights) -> float:
        w = np.asarray(weights, dtype=float)
        return float(w @ self.covariance @ w)

    @property
    def sum_spectrum(self) -> float:
        """Noise-plus-signal power of ``(X_c + X_d)/sqrt 2``: Bob's amplitude readout."""
        return self.combined_variance([1.0, 0.0, 1.0, 0.0]) / 2.0

    @property
    def difference_spectrum(self) -> float:
        """Noise-plus-signal power of ``(Y_c - Y_d)/sqrt 2``: Bob's phase readout."""
        return self.combined_variance([0.0, 1.0, 0.0, -1.0]) / 2.0


def epr_mix(
    a_vars: QuadratureVariances,
    b_vars: QuadratureVariances,
    signal_a: QuadratureSignal | None = None,
    signal_b: QuadratureSignal | None = None,
) -> EprPairState:
    sa = signal_a or QuadratureSignal()
    sb = signal_b or QuadratureSignal()
    source = np.diag(
        [
            a_vars.v_plus + sa.vs_plus,
            a_vars.v_minus + sa.vs_minus,
            b_vars.v_plus + sb.vs_plus,
            b_vars.v_minus + sb.vs_minus,
        ]
    )
    cov = _EPR_MAP @ source @ _EPR_MAP.T
    cov.setflags(write=False)
    return EprPairState(a_vars, b_vars, sa, sb, cov)


def single_mode_extractable_snr(state: EprPairState, beam: str, quadrature) -> float:
    """SNR for either source signal available from beam ``c`` or ``d`` alone."""
    if beam not in ("c", "d"):
        raise DomainError(f"beam must be 'c' or 'd', got {beam!r}")
    q = _quad(quadrature)
    # each output quadrature carries half of one source's amplitude and half
    # of the other source's (anti-squeezed) conjugate quadrature
    if q is Quadrature.AMPLITUDE:
        sig = 0.5 * (state.signal_a.vs_plus + state.signal_b.vs_minus)
        noise = 0.5 * (state.a_vars.v_plus + state.b_vars.v_minus)
    else:
        sig = 0.5 * (state.signal_a.vs_minus + state.signal_b.vs_plus)
        noise = 0.5 * (state.a_vars.v_minus + state.b_vars.v_plus)
    return snr(sig, noise)
