"""Continuous-variable teleporter used as an eavesdropper.

Eve reads the teleporter's classical channel, which carries the input plus
the noise of one entangled beam, and Bob receives the reconstructed output.
Penalties are referred to the input (normalised by the teleporter gain), so
the classical amplification ``K`` never enters.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from .bounds import MeasurementPenalty
from .errors import DegenerateGainError, DomainError


@dataclass(frozen=True)
class TeleporterParams:
    pump_gain_g: float
    gain_lambda: float | None = None  # None selects the optimal gain
    amplification_k: float = 1e3

    def __post_init__(self) -> None:
        if not self.pump_gain_g >= 1.0:
            raise DomainError(f"pump gain must be >= 1, got {self.pump_gain_g!r}")
        if self.gain_lambda is not None and not self.gain_lambda > 0:
            raise DomainError(f"teleporter gain must be positive, got {self.gain_lambda!r}")
        if self.gain_lambda is None and self.pump_gain_g == 1.0:
            raise DegenerateGainError("optimal teleporter gain is undefined at G = 1")

    @property
    def effective_lambda(self) -> float:
        return lambda_opt(self.pump_gain_g) if self.gain_lambda is None else self.gain_lambda


@dataclass(frozen=True)
class TeleportPenalties:
    eve: MeasurementPenalty
    bob: MeasurementPenalty
    signal_gain: float

    @property
    def product(self) -> float:
        return self.eve.v_plus * self.bob.v_plus


def _check_g(g: float) -> None:
    if not g >= 1.0:
        raise DomainError(f"pump gain must be >= 1, got {g!r}")


def classical_channel_penalty(g: float) -> float:
    """Eve's penalty on both quadratures: ``2G - 1``."""
    _check_g(g)
    return 2.0 * g - 1.0


def squeezing_parameter(g: float) -> float:
    """Squeezed variance ``(sqrt G - sqrt(G-1))**2`` of the entanglement source."""
    _check_g(g)
    # 1/(sqrt G + sqrt(G-1))**2 is the same value without cancellation at large G
    return 1.0 / (math.sqrt(g) + math.sqrt(g - 1.0)) ** 2


def lambda_opt(g: float) -> float:
    """Teleporter gain at which Bob's penalty saturates ``V_E V_B = 1``."""
    _check_g(g)
    if g == 1.0:
        raise DegenerateGainError("optimal teleporter gain diverges at G = 1")
    v2 = squeezing_parameter(g) ** 2
    return (1.0 + v2) / (1.0 - v2)


def output_noise_coefficients(g: float, lam: float) -> tuple[float, float]:
    """Amplitudes of the two squeezer vacuum inputs in the teleporter output."""
    sg, sg1 = math.sqrt(g), math.sqrt(g - 1.0)
    return lam * sg - sg1, sg - lam * sg1


def bob_penalty(g: float, lam: float) -> float:
    _check_g(g)
    if not lam > 0:
        raise DomainError(f"teleporter gain must be positive, got {lam!r}")
    c1, c2 = output_noise_coefficients(g, lam)
    return (c1 * c1 + c2 * c2) / (lam * lam)


def optimality_report(g: float) -> TeleportPenalties:
    lam = lambda_opt(g)
    v_e = classical_channel_penalty(g)
    v_b = bob_penalty(g, lam)
    if abs(v_e * v_b - 1.0) > 1e-9:
        raise ArithmeticError(f"V_E V_B = {v_e * v_b!r} at G={g!r}; expected 1")
    return TeleportPenalties(
        MeasurementPenalty.symmetric(v_e), MeasurementPenalty.symmetric(v_b), lam
    )


def penalties(params: TeleporterParams) -> TeleportPenalties:
    lam = params.effective_lambda
    g = params.pump_gain_g
    return TeleportPenalties(
        MeasurementPenalty.symmetric(classical_channel_penalty(g)),
        MeasurementPenalty.symmetric(bob_penalty(g, lam)),
        lam,
    )
