"""Eavesdropper strategies as linear Gaussian maps on sampled quadratures."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

import numpy as np

from .bounds import MeasurementPenalty
from .errors import DomainError
from .numeric import RandomStream
from .teleport import TeleporterParams, bob_penalty, classical_channel_penalty, output_noise_coefficients


@dataclass(frozen=True)
class NoEve:
    def __str__(self) -> str:
        return "none"


@dataclass(frozen=True)
class GuessResend:
    """Homodyne a randomly guessed quadrature, then re-prepare the state."""

    def __str__(self) -> str:
        return "guess"


@dataclass(frozen=True)
class SplitSimultaneous:
    """50:50 split, homodyne both halves, re-impose the photocurrents.

    ``resend_gain`` is the modulation depth of the re-imposed analog
    estimates; Bob's input-referred penalty is ``1 + 1/resend_gain**2``.
    """

    resend_gain: float = 1e3

    def __post_init__(self) -> None:
        if not self.resend_gain > 0:
            raise DomainError(f"resend gain must be positive, got {self.resend_gain!r}")

    def __str__(self) -> str:
        return "split"


@dataclass(frozen=True)
class PartialTap:
    fraction: float

    def __post_init__(self) -> None:
        if not 0.0 <= self.fraction <= 1.0:
            raise DomainError(f"tap fraction must lie in [0, 1], got {self.fraction!r}")

    def __str__(self) -> str:
        return f"tap:{self.fraction:g}"


@dataclass(frozen=True)
class Teleport:
    pump_gain: float
    gain_lambda: float | None = None

    def __post_init__(self) -> None:
        # validates G >= 1, lambda > 0 and the G = 1 pole
        TeleporterParams(self.pump_gain, self.gain_lambda)

    @property
    def params(self) -> TeleporterParams:
        return TeleporterParams(self.pump_gain, self.gain_lambda)

    def __str__(self) -> str:
        if self.gain_lambda is None:
            return f"teleport:{self.pump_gain:g}"
        return f"teleport:{self.pump_gain:g},{self.gain_lambda:g}"


EveStrategy = Union[NoEve, GuessResend, SplitSimultaneous, PartialTap, Teleport]


def parse_strategy(text: str) -> EveStrategy:
    """Parse ``none|guess|split|tap:F|teleport:G[,lambda]``."""
    name, _, arg = text.strip().partition(":")
    try:
        if name == "none" and not arg:
            return NoEve()
        if name == "guess" and not arg:
            return GuessResend()
        if name == "split":
            return SplitSimultaneous(float(arg)) if arg else SplitSimultaneous()
        if name == "tap" and arg:
            return PartialTap(float(arg))
        if name == "teleport" and arg:
            g, _, lam = arg.partition(",")
            return Teleport(float(g), float(lam) if lam else None)
    except ValueError as exc:
        if isinstance(exc, DomainError):
            raise
        raise DomainError(f"bad strategy argument in {text!r}") from None
    raise DomainError(f"unknown strategy {text!r}")


def implied_penalties(strategy: EveStrategy) -> tuple[MeasurementPenalty, MeasurementPenalty]:
    """Input-referred (Eve, Bob) penalties of a strategy.

    Guess-and-resend is given for Eve guessing the amplitude quadrature; the
    phase guess is the mirror image.
    """
    inf = math.inf
    if isinstance(strategy, NoEve):
        return MeasurementPenalty(inf, inf), MeasurementPenalty(0.0, 0.0)
    if isinstance(strategy, GuessResend):
        return MeasurementPenalty(0.0, inf), MeasurementPenalty(1.0, inf)
    if isinstance(strategy, SplitSimultaneous):
        v_b = 1.0 + 1.0 / strategy.resend_gain**2
        return MeasurementPenalty.symmetric(1.0), MeasurementPenalty.symmetric(v_b)
    if isinstance(strategy, PartialTap):
        f = strategy.fraction
        v_e = inf if f == 0.0 else (2.0 - f) / f
        v_b = inf if f == 1.0 else f / (1.0 - f)
        return MeasurementPenalty.symmetric(v_e), MeasurementPenalty.symmetric(v_b)
    if isinstance(strategy, Teleport):
        p = strategy.params
        return (
            MeasurementPenalty.symmetric(classical_channel_penalty(p.pump_gain_g)),
            MeasurementPenalty.symmetric(bob_penalty(p.pump_gain_g, p.effective_lambda)),
        )
    raise TypeError(f"not a strategy: {strategy!r}")


def bob_signal_gain(strategy: EveStrategy) -> float:
    """Signal amplitude gain of the beam Eve forwards to Bob.

    Loss after Eve adds ``(1 - eta)/(eta * gain**2)`` of input-referred noise,
    so an amplifying Eve shields Bob from the line loss.
    """
    if isinstance(strategy, SplitSimultaneous):
        return strategy.resend_gain
    if isinstance(strategy, PartialTap):
        return math.sqrt(1.0 - strategy.fraction)
    if isinstance(strategy, Teleport):
        return strategy.params.effective_lambda
    return 1.0


@dataclass
class Beam:
    """Sampled quadratures of one mode; ``gain`` is the signal amplitude gain."""

    x: np.ndarray
    y: np.ndarray
    gain: float = 1.0


@dataclass
class Interception:
    bob_beam: Beam | None  # None: the protocol must re-prepare (guess strategy)
    eve_x: np.ndarray | None  # input-referred estimates; None when Eve is blind
    eve_y: np.ndarray | None
    eve_basis: np.ndarray | None = None  # 0 amplitude, 1 phase (guess only)


def apply_strategy(strategy: EveStrategy, beam: Beam, stream: RandomStream) -> Interception:
    """Pass ``beam`` through Eve's apparatus."""
    n = beam.x.shape[0]
    g_in = beam.gain
    if isinstance(strategy, NoEve):
        return Interception(beam, None, None)

    if isinstance(strategy, GuessResend):
        basis = stream.bits(n)
        nan = np.full(n, np.nan)
        eve_x = np.where(basis == 0, beam.x / g_in, nan)
        eve_y = np.where(basis == 1, beam.y / g_in, nan)
        return Interception(None, eve_x, eve_y, basis)

    if isinstance(strategy, SplitSimultaneous):
        wx, wy = stream.normals(n), stream.normals(n)
        # ports (c + w)/sqrt2 -> X and (c - w)/sqrt2 -> Y, rescaled by sqrt2
        est_x = beam.x + wx
        est_y = beam.y - wy
        g = strategy.resend_gain
        bob = Beam(g * est_x + stream.normals(n), g * est_y + stream.normals(n), g * g_in)
        return Interception(bob, est_x / g_in, est_y / g_in)

    if isinstance(strategy, PartialTap):
        f = strategy.fraction
        vx, vy = stream.normals(n), stream.normals(n)
        wx, wy = stream.normals(n), stream.normals(n)
        rf, rk = math.sqrt(f), math.sqrt(1.0 - f)
        kept = Beam(rk * beam.x + rf * vx, rk * beam.y + rf * vy, rk * g_in)
        if f == 0.0:
            return Interception(kept, None, None)
        tx = rf * beam.x - rk * vx
        ty = rf * beam.y - rk * vy
        # 50:50 split of the tapped beam, each port rescaled by sqrt2
        est_x = (tx + wx) / (rf * g_in)
        est_y = (ty - wy) / (rf * g_in)
        return Interception(kept, est_x, est_y)

    if isinstance(strategy, Teleport):
        p = strategy.params
        g, lam = p.pump_gain_g, p.effective_lambda
        sg, sg1 = math.sqrt(g), math.sqrt(g - 1.0)
        c1, c2 = output_noise_coefficients(g, lam)
        v1x, v1y = stream.normals(n), stream.normals(n)
        v2x, v2y = stream.normals(n), stream.normals(n)
        # classical channel f_in + sqrt(G) v1^dag + sqrt(G-1) v2; K cancels
        est_x = beam.x + sg * v1x + sg1 * v2x
        est_y = beam.y - sg * v1y + sg1 * v2y
        bob = Beam(
            lam * beam.x + c1 * v1x + c2 * v2x,
            lam * beam.y - c1 * v1y + c2 * v2y,
            lam * g_in,
        )
        return Interception(bob, est_x / g_in, est_y / g_in)

    raise TypeError(f"not a strategy: {strategy!r}")

