"""Analytic security bounds: uncertainty products, signal-transfer trade-offs
for the coherent and two-mode squeezed protocols, and trade-off curves."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .errors import DomainError, InfeasibleError
from .quadrature import ber_from_snr

UNCERTAINTY_SLACK = 1e-12


@dataclass(frozen=True)
class MeasurementPenalty:
    """Noise added to the amplitude/phase readout, referred to the input.

    An ideal single-quadrature measurement is ``(0, inf)``.
    """

    v_plus: float
    v_minus: float

    def __post_init__(self) -> None:
        if not (self.v_plus >= 0 and self.v_minus >= 0):
            raise DomainError(f"penalties must be non-negative, got {self}")

    @classmethod
    def symmetric(cls, v: float) -> "MeasurementPenalty":
        return cls(v, v)


@dataclass(frozen=True)
class ChannelParams:
    transmission_eta: float = 1.0
    squeezed_floor_vn: float = 0.05

    def __post_init__(self) -> None:
        if not 0.0 < self.transmission_eta <= 1.0:
            raise DomainError(f"transmission must lie in (0, 1], got {self.transmission_eta!r}")
        if not self.squeezed_floor_vn > 0:
            raise DomainError(f"squeezed noise floor must be positive, got {self.squeezed_floor_vn!r}")


def _product(a: float, b: float) -> float:
    # an unbounded penalty satisfies every product, including 0 * inf
    if math.isinf(a) or math.isinf(b):
        return math.inf
    return a * b


def check_uncertainty_products(
    eve: MeasurementPenalty, bob: MeasurementPenalty, slack: float = UNCERTAINTY_SLACK
) -> bool:
    """True when Eve's and Bob's penalties jointly respect the generalized
    uncertainty principle for simultaneous measurement."""
    floor = 1.0 - slack
    return (
        _product(eve.v_plus, eve.v_minus) >= floor
        and _product(bob.v_plus, eve.v_minus) >= floor
        and _product(eve.v_plus, bob.v_minus) >= floor
    )


def _transfer(v_in: float, penalty: float) -> float:
    if math.isinf(penalty):
        return 0.0
    return v_in / (v_in + penalty)


class CoherentTransfers(NamedTuple):
    t_eve_plus: float
    t_eve_minus: float
    t_bob_plus: float
    t_bob_minus: float


def coherent_transfers(eve: MeasurementPenalty) -> CoherentTransfers:
    """Eve's transfers and Bob's best-case transfers for a coherent input.

    Bob's penalty on each quadrature is the smallest allowed by Eve's penalty
    on the conjugate one, ``V_B(-/+) = 1 / V_E(+/-)``.
    """
    if eve.v_plus == 0 and eve.v_minus == 0:
        raise DomainError("Eve cannot measure both quadratures without penalty")
    te_p = _transfer(1.0, eve.v_plus)
    te_m = _transfer(1.0, eve.v_minus)
    return CoherentTransfers(te_p, te_m, 1.0 - te_m, 1.0 - te_p)


def coherent_penalty(t: float) -> float:
    """Input-referred penalty giving coherent-state transfer ``t``."""
    if not 0.0 < t <= 1.0:
        raise DomainError(f"transfer must lie in (0, 1], got {t!r}")
    return 1.0 / t - 1.0


def coherent_bob_bound(t_eve: float, eta: float = 1.0) -> float:
    """Largest Bob transfer for a symmetric attack on the coherent protocol.

    Loss after Eve adds ``(1 - eta)/eta`` to Bob's input-referred noise.
    """
    if not 0.0 <= t_eve < 1.0:
        raise DomainError(f"Eve's transfer must lie in [0, 1), got {t_eve!r}")
    if not 0.0 < eta <= 1.0:
        raise DomainError(f"transmission must lie in (0, 1], got {eta!r}")
    v_b = t_eve / (1.0 - t_eve)
    return 1.0 / (1.0 + v_b + (1.0 - eta) / eta)


def squeezed_transfer(vn: float, penalty: float) -> float:
    """Transfer onto a sub-QNL floor ``vn`` after the recombination with
    Alice's retained beam halves the penalty."""
    if not vn > 0:
        raise DomainError(f"squeezed floor must be positive, got {vn!r}")
    return _transfer(vn, 0.5 * penalty)


def squeezed_penalty(vn: float, t: float) -> float:
    if not 0.0 < t <= 1.0:
        raise DomainError(f"transfer must lie in (0, 1], got {t!r}")
    return 2.0 * vn * (1.0 / t - 1.0)


def squeezed_eve_bound(vn: float) -> float:
    """Largest symmetric transfer Eve can obtain from the squeezed protocol."""
    if not vn > 0:
        raise DomainError(f"squeezed floor must be positive, got {vn!r}")
    return 2.0 * vn / (2.0 * vn + 1.0)


def _check_eve(vn: float, t_eve: float) -> None:
    if not 0.0 <= t_eve < 1.0:
        raise DomainError(f"Eve's transfer must lie in [0, 1), got {t_eve!r}")
    bound = squeezed_eve_bound(vn)
    if t_eve > bound * (1.0 + 1e-12):
        raise InfeasibleError(
            f"Eve's transfer {t_eve!r} exceeds the bound {bound!r} for V_n={vn!r}"
        )


def squeezed_bob_bound(vn: float, t_eve: float, printed_form: bool = False) -> float:
    """Largest Bob transfer compatible with Eve's transfer ``t_eve``.

    Solves ``T_E T_B / ((1 - T_E)(1 - T_B)) <= K`` with ``K = 4 V_n**2``.
    ``printed_form=True`` uses ``K = 4 V_n`` instead, which does not follow
    from the penalty relations and is kept only for comparison.
    """
    _check_eve(vn, t_eve)
    k = 4.0 * vn if printed_form else 4.0 * vn * vn
    r = t_eve / (1.0 - t_eve)
    return k / (r + k)


class LossyBound(NamedTuple):
    t_bob: float
    extractable: bool


def lossy_bob_bound(
    vn: float, t_eve: float, eta: float, printed_form: bool = False
) -> LossyBound:
    """Bob's largest transfer when Eve masquerades as line loss.

    Inverts ``(1/T_E - 1)(1/T_B - 1 - (1 - eta)/(2 eta V_n)) >= R`` with
    ``R = 1/(4 V_n**2)`` (or ``1/(4 V_n)`` under ``printed_form``). Zero
    transmission gives a flagged zero rather than an error.
    """
    _check_eve(vn, t_eve)
    if not 0.0 <= eta <= 1.0:
        raise DomainError(f"transmission must lie in [0, 1], got {eta!r}")
    if eta == 0.0:
        return LossyBound(0.0, False)
    rhs = 1.0 / (4.0 * vn) if printed_form else 1.0 / (4.0 * vn * vn)
    loss = (1.0 - eta) / (2.0 * eta * vn)
    r = t_eve / (1.0 - t_eve)
    inv = 1.0 + loss + rhs * r
    if not math.isfinite(inv):
        return LossyBound(0.0, False)
    return LossyBound(1.0 / inv, True)


def single_quanta_reference(intercept_fraction: float) -> tuple[float, float]:
    """(eve_ber, bob_ber) of intercept-resend on a single-photon protocol.

    Documented approximation: Eve intercepts a fraction ``f`` of the photons
    in a random basis and guesses the rest.
    """
    f = intercept_fraction
    if not 0.0 <= f <= 1.0:
        raise DomainError(f"intercept fraction must lie in [0, 1], got {f!r}")
    return 0.5 - 0.25 * f, 0.25 * f


@dataclass(frozen=True)
class CurvePoint:
    v_e: float
    t_e: float
    t_b: float
    eve_ber: float
    bob_ber: float
    extractable: bool = True


@dataclass(frozen=True)
class SecurityCurve:
    protocol: str
    vn: float | None
    eta: float
    base_snr: float
    printed_form: bool
    points: tuple[CurvePoint, ...] = field(repr=False)
    # Bob's BER with no eavesdropper, for measuring Eve's excess disturbance
    baseline_bob_ber: float = 0.0

    def column(self, name: str) -> np.ndarray:
        return np.array([getattr(p, name) for p in self.points])


def eve_penalty_grid(n_points: int, v_e_max: float = 1e3) -> np.ndarray:
    """Symmetric Eve penalties from ``v_e_max`` down to the bound ``V_E = 1``."""
    if n_points < 2:
        raise DomainError(f"a curve needs at least 2 points, got {n_points!r}")
    return np.logspace(math.log10(v_e_max), 0.0, n_points)


def tradeoff_curve(
    protocol: str,
    params: ChannelParams,
    base_snr: float,
    n_points: int = 200,
    printed_form: bool = False,
    v_e_max: float = 1e3,
) -> SecurityCurve:
    """Minimum Bob BER against Eve's BER for symmetric attacks.

    Each point takes a symmetric Eve penalty and the least disturbance it
    permits on Bob, ``V_B = 1/V_E``.
    """
    if protocol not in ("coherent", "squeezed"):
        raise DomainError(f"unknown protocol {protocol!r}")
    eta = params.transmission_eta
    vn = params.squeezed_floor_vn
    points = []
    for v_e in eve_penalty_grid(n_points, v_e_max):
        v_e = float(v_e)
        if protocol == "coherent":
            t_e = _transfer(1.0, v_e)
            t_b, ok = coherent_bob_bound(t_e, eta), True
        else:
            t_e = squeezed_transfer(vn, v_e)
            # v_e is clipped to 1 on the grid, so t_e never exceeds the bound
            t_b, ok = lossy_bob_bound(vn, min(t_e, squeezed_eve_bound(vn)), eta, printed_form)
        points.append(
            CurvePoint(
                v_e=v_e,
                t_e=t_e,
                t_b=t_b,
                eve_ber=ber_from_snr(t_e * base_snr),
                bob_ber=ber_from_snr(t_b * base_snr),
                extractable=ok,
            )
        )
    if protocol == "coherent":
        baseline = ber_from_snr(eta * base_snr)
    else:
        baseline = ber_from_snr(lossy_bob_bound(vn, 0.0, eta).t_bob * base_snr)
    return SecurityCurve(
        protocol=protocol,
        vn=vn if protocol == "squeezed" else None,
        eta=eta,
        base_snr=base_snr,
        printed_form=printed_form,
        points=tuple(points),
        baseline_bob_ber=baseline,
    )


def single_quanta_curve(n_points: int = 200) -> list[tuple[float, float, float]]:
    """``(fraction, eve_ber, bob_ber)`` rows of the single-photon reference."""
    if n_points < 2:
        raise DomainError(f"a curve needs at least 2 points, got {n_points!r}")
    return [(float(f), *single_quanta_reference(float(f))) for f in np.linspace(0.0, 1.0, n_points)]


def curve_penalties(curve: SecurityCurve) -> list[tuple[MeasurementPenalty, MeasurementPenalty]]:
    """Map each curve point back to the (Eve, Bob) penalty pair it implies."""
    out = []
    for p in curve.points:
        if curve.protocol == "coherent":
            v_e, v_b = coherent_penalty(p.t_e), coherent_penalty(p.t_b)
        else:
            v_e, v_b = squeezed_penalty(curve.vn, p.t_e), squeezed_penalty(curve.vn, p.t_b)
        out.append((MeasurementPenalty.symmetric(v_e), MeasurementPenalty.symmetric(v_b)))
    return out
