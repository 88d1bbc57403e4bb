"""Symbol-level Monte Carlo of the coherent and two-mode squeezed protocols."""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from . import _kernel
from .bounds import MeasurementPenalty, squeezed_transfer
from .errors import ContractError, DomainError
from .numeric import RandomStream
from .quadrature import _EPR_MAP, QuadratureVariances, ber_from_snr
from .strategies import (
    Beam,
    EveStrategy,
    GuessResend,
    NoEve,
    apply_strategy,
    bob_signal_gain,
    implied_penalties,
)

BLOCK_SIZE = 1 << 17
WILSON_Z = 1.959963984540054
SQRT_HALF = math.sqrt(0.5)
QUADRATURES = ("amplitude", "phase")


@dataclass(frozen=True)
class SessionParams:
    protocol: str = "coherent"
    n_symbols: int = 1_000_000
    base_snr: float = 21.647577724217363
    vn: float = 0.05
    channel_eta: float = 1.0
    seed: int = 0
    strategy: EveStrategy = field(default_factory=NoEve)
    # anti-squeezed variance of the sources; None means minimum uncertainty
    v_anti: float | None = None

    def __post_init__(self) -> None:
        if self.protocol not in ("coherent", "squeezed"):
            raise DomainError(f"unknown protocol {self.protocol!r}")
        if self.n_symbols < 1:
            raise DomainError(f"n_symbols must be >= 1, got {self.n_symbols!r}")
        if not self.base_snr > 0:
            raise DomainError(f"base SNR must be positive, got {self.base_snr!r}")
        if not self.vn > 0:
            raise DomainError(f"squeezed floor must be positive, got {self.vn!r}")
        if not 0.0 < self.channel_eta <= 1.0:
            raise DomainError(f"transmission must lie in (0, 1], got {self.channel_eta!r}")
        if not 0 <= self.seed < 1 << 64:
            raise DomainError(f"seed must be a 64-bit unsigned integer, got {self.seed!r}")

    @property
    def noise_floor(self) -> float:
        return 1.0 if self.protocol == "coherent" else self.vn

    @property
    def amplitude(self) -> float:
        """Per-bin displacement of a binary symbol: half the rms signal amplitude."""
        return 0.5 * math.sqrt(self.base_snr * self.noise_floor)


@dataclass(frozen=True)
class BerEstimate:
    value: float
    lower: float
    upper: float
    errors: int
    n: int

    @property
    def sigma(self) -> float:
        return math.sqrt(max(self.value * (1.0 - self.value), 0.0) / self.n)

    def relabeled(self) -> "BerEstimate":
        """Flip decisions when that helps: a binary channel never needs BER > 0.5."""
        if self.value <= 0.5:
            return self
        return BerEstimate(1.0 - self.value, 1.0 - self.upper, 1.0 - self.lower, self.n - self.errors, self.n)


def _wilson(errors: int, n: int) -> BerEstimate:
    p = errors / n
    z2 = WILSON_Z * WILSON_Z
    centre = (p + z2 / (2 * n)) / (1 + z2 / n)
    half = WILSON_Z * math.sqrt(p * (1 - p) / n + z2 / (4 * n * n)) / (1 + z2 / n)
    # the interval touches the boundary exactly when no (or every) bit is wrong
    lower = 0.0 if errors == 0 else max(0.0, centre - half)
    upper = 1.0 if errors == n else min(1.0, centre + half)
    return BerEstimate(p, lower, upper, errors, n)


def estimate_ber(key_a, key_b) -> BerEstimate:
    """Raw mismatch fraction with a Wilson 95% interval (no relabelling)."""
    a = np.asarray(key_a).astype(bool)
    b = np.asarray(key_b).astype(bool)
    if a.shape != b.shape:
        raise ContractError(f"key lengths differ: {a.shape} vs {b.shape}")
    if a.size == 0:
        raise ContractError("cannot estimate a BER from empty keys")
    return _wilson(int(np.count_nonzero(a != b)), int(a.size))


def sift(alice_bases, bob_bases) -> np.ndarray:
    """Indices where Alice and Bob measured the same quadrature."""
    a = np.asarray(alice_bases)
    b = np.asarray(bob_bases)
    if a.shape != b.shape:
        raise ContractError(f"basis sequences differ in length: {a.shape} vs {b.shape}")
    return np.flatnonzero(a == b)


def _signs(bits: np.ndarray) -> np.ndarray:
    return 1.0 - 2.0 * bits


class _Tally:
    """Count-weighted sufficient statistics for one (party, quadrature)."""

    __slots__ = ("n", "errors", "s_sz", "s_zz")

    def __init__(self) -> None:
        self.n = 0
        self.errors = 0
        self.s_sz = 0.0
        self.s_zz = 0.0

    def add(self, stat: np.ndarray, bits: np.ndarray, mask: np.ndarray) -> None:
        n, e, sz, zz = _kernel.tally(
            np.ascontiguousarray(stat, dtype=np.float64),
            np.ascontiguousarray(bits, dtype=np.uint8),
            np.ascontiguousarray(mask, dtype=np.uint8),
        )
        self.n += n
        self.errors += e
        self.s_sz += sz
        self.s_zz += zz

    def merge(self, other: "_Tally") -> None:
        self.n += other.n
        self.errors += other.errors
        self.s_sz += other.s_sz
        self.s_zz += other.s_zz

    def noise_floor(self, amplitude: float) -> float:
        """Input-referred noise from regressing the statistic on the symbol."""
        if self.n == 0:
            return math.nan
        k = self.s_sz / self.n
        var = self.s_zz / self.n - k * k
        if k == 0.0:
            return math.inf
        return var * amplitude * amplitude / (k * k)


def _run_block(params: SessionParams, index: int, n: int) -> dict[str, _Tally]:
    stream = RandomStream(params.seed).spawn(index)
    if params.protocol == "coherent":
        return _coherent_block(params, stream, n)
    return _squeezed_block(params, stream, n)


def _new_tallies() -> dict[str, _Tally]:
    return {f"{who}_{q}": _Tally() for who in ("bob", "eve") for q in QUADRATURES}


def _record(tallies, key_bits, bob_stat, eve_stat, basis, sifted) -> None:
    for qi, q in enumerate(QUADRATURES):
        mask = sifted & (basis == qi)
        tallies[f"bob_{q}"].add(bob_stat, key_bits, mask)
        tallies[f"eve_{q}"].add(eve_stat, key_bits, mask)


def _loss(beam: Beam, eta: float, stream: RandomStream) -> Beam:
    if eta == 1.0:
        return beam
    n = beam.x.shape[0]
    re, rl = math.sqrt(eta), math.sqrt(1.0 - eta)
    return Beam(re * beam.x + rl * stream.normals(n), re * beam.y + rl * stream.normals(n), re * beam.gain)


def _coherent_block(params: SessionParams, stream: RandomStream, n: int) -> dict[str, _Tally]:
    d = params.amplitude
    bit_p, bit_m = stream.bits(n), stream.bits(n)
    bob_basis = stream.bits(n)
    eve_coin = stream.bits(n)  # Eve's decisions where she holds no information
    beam = Beam(d * _signs(bit_p) + stream.normals(n), d * _signs(bit_m) + stream.normals(n))

    icpt = apply_strategy(params.strategy, beam, stream)
    blind = d * _signs(eve_coin)
    if isinstance(params.strategy, GuessResend):
        on_p = icpt.eve_basis == 0
        eve_p = np.where(on_p, icpt.eve_x, blind)
        eve_m = np.where(~on_p, icpt.eve_y, blind)
        # fresh coherent beam carrying Eve's decisions
        sent_p = np.where(on_p, eve_p < 0, eve_coin).astype(np.uint8)
        sent_m = np.where(~on_p, eve_m < 0, eve_coin).astype(np.uint8)
        bob_in = Beam(d * _signs(sent_p) + stream.normals(n), d * _signs(sent_m) + stream.normals(n))
    else:
        bob_in = icpt.bob_beam
        eve_p = blind if icpt.eve_x is None else icpt.eve_x
        eve_m = blind if icpt.eve_y is None else icpt.eve_y

    rx = _loss(bob_in, params.channel_eta, stream)
    gain = rx.gain if rx.gain > 0 else 1.0
    on_amp = bob_basis == 0
    bob_stat = np.where(on_amp, rx.x, rx.y) / gain
    eve_stat = np.where(on_amp, eve_p, eve_m)
    key = np.where(on_amp, bit_p, bit_m)
    tallies = _new_tallies()
    # Alice encodes both quadratures, so every symbol is usable
    _record(tallies, key, bob_stat, eve_stat, bob_basis, np.ones(n, dtype=bool))
    return tallies


def _squeezed_block(params: SessionParams, stream: RandomStream, n: int) -> dict[str, _Tally]:
    d = params.amplitude
    vn = params.vn
    v_anti = 1.0 / vn if params.v_anti is None else params.v_anti
    bit_a, bit_b = stream.bits(n), stream.bits(n)
    alice_basis, bob_basis = stream.bits(n), stream.bits(n)
    eve_coin = stream.bits(n)

    def epr(sig_a, sig_b):
        sp, sm = math.sqrt(vn), math.sqrt(v_anti)
        xa = d * _signs(sig_a) + sp * stream.normals(n)
        ya = sm * stream.normals(n)
        xb = d * _signs(sig_b) + sp * stream.normals(n)
        yb = sm * stream.normals(n)
        c = Beam(SQRT_HALF * (xa - yb), SQRT_HALF * (ya + xb))
        dd = Beam(SQRT_HALF * (xa + yb), SQRT_HALF * (ya - xb))
        return c, dd

    c, d_mode = epr(bit_a, bit_b)
    on_amp = alice_basis == 0
    alice_meas = np.where(on_amp, d_mode.x, d_mode.y)

    icpt = apply_strategy(params.strategy, c, stream)
    blind = d * _signs(eve_coin)
    key = np.where(on_amp, bit_a, bit_b)

    if isinstance(params.strategy, GuessResend):
        # Eve reads her guessed quadrature of c, combined with Alice's disclosure
        informed = icpt.eve_basis == alice_basis
        eve_amp = SQRT_HALF * (icpt.eve_x + alice_meas)
        eve_ph = SQRT_HALF * (icpt.eve_y - alice_meas)
        eve_stat = np.where(informed, np.where(on_amp, eve_amp, eve_ph), blind)
        eve_bit = (eve_stat < 0).astype(np.uint8)
        # Eve's replica source carries her decision on the disclosed quadrature.
        # Physically she encodes random bits and later shifts her own
        # disclosure by the difference; the statistics Bob sees are the same.
        other = stream.bits(n)
        c_eve, d_eve = epr(np.where(on_amp, eve_bit, other), np.where(on_amp, other, eve_bit))
        bob_in = c_eve
        disclosed = np.where(on_amp, d_eve.x, d_eve.y)
    else:
        bob_in = icpt.bob_beam
        disclosed = alice_meas
        if icpt.eve_x is None:
            eve_stat = blind
        else:
            eve_stat = np.where(
                on_amp,
                SQRT_HALF * (icpt.eve_x + alice_meas),
                SQRT_HALF * (icpt.eve_y - alice_meas),
            )

    rx = _loss(bob_in, params.channel_eta, stream)
    gain = rx.gain if rx.gain > 0 else 1.0
    bob_on_amp = bob_basis == 0
    bob_meas = np.where(bob_on_amp, rx.x, rx.y) / gain
    bob_stat = np.where(bob_on_amp, SQRT_HALF * (bob_meas + disclosed), SQRT_HALF * (bob_meas - disclosed))
    sifted = np.zeros(n, dtype=bool)
    sifted[sift(alice_basis, bob_basis)] = True
    tallies = _new_tallies()
    _record(tallies, key, bob_stat, eve_stat, alice_basis, sifted)
    return tallies


@dataclass(frozen=True)
class QuadratureStats:
    n_sifted: int
    ber_alice_bob: BerEstimate
    ber_alice_eve: BerEstimate
    bob_noise_floor: float
    eve_noise_floor: float


@dataclass(frozen=True)
class SimReport:
    params: SessionParams
    n_symbols: int
    n_sifted: int
    sift_ratio: float
    ber_alice_bob: BerEstimate
    ber_alice_eve: BerEstimate
    per_quadrature: dict[str, QuadratureStats]
    eve_penalty: MeasurementPenalty
    bob_penalty: MeasurementPenalty

    def to_dict(self) -> dict:
        out = asdict(self)
        out["params"]["strategy"] = str(self.params.strategy)
        return out


def _penalty_from_floor(params: SessionParams, floor: float) -> float:
    if not math.isfinite(floor):
        return math.inf
    if params.protocol == "coherent":
        return max(floor - 1.0, 0.0)
    return max(2.0 * (floor - params.vn), 0.0)


def run_session(params: SessionParams, workers: int = 1) -> SimReport:
    """Simulate a full session, sharded into fixed-size blocks.

    Every block draws from its own sub-stream of ``params.seed`` and blocks
    are merged in index order, so the report depends neither on ``workers``
    nor on scheduling.
    """
    sizes = [BLOCK_SIZE] * (params.n_symbols // BLOCK_SIZE)
    if params.n_symbols % BLOCK_SIZE:
        sizes.append(params.n_symbols % BLOCK_SIZE)
    jobs = list(enumerate(sizes))
    if workers > 1 and len(jobs) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(lambda job: _run_block(params, *job), jobs))
    else:
        results = [_run_block(params, i, n) for i, n in jobs]

    total = _new_tallies()
    for block in results:
        for key, t in block.items():
            total[key].merge(t)

    d = params.amplitude
    per_q = {}
    for q in QUADRATURES:
        bob, eve = total[f"bob_{q}"], total[f"eve_{q}"]
        if bob.n == 0:
            continue
        per_q[q] = QuadratureStats(
            n_sifted=bob.n,
            ber_alice_bob=_wilson(bob.errors, bob.n),
            ber_alice_eve=_wilson(eve.errors, eve.n).relabeled(),
            bob_noise_floor=bob.noise_floor(d),
            eve_noise_floor=eve.noise_floor(d),
        )
    n_sifted = sum(s.n_sifted for s in per_q.values())
    if n_sifted == 0:
        raise ContractError("no symbols survived sifting; increase n_symbols")
    bob_err = sum(total[f"bob_{q}"].errors for q in QUADRATURES)
    eve_err = sum(total[f"eve_{q}"].errors for q in QUADRATURES)

    def pen(who: str) -> MeasurementPenalty:
        vals = [
            # a quadrature with no sifted symbols carries no information
            _penalty_from_floor(params, getattr(per_q[q], f"{who}_noise_floor")) if q in per_q else math.inf
            for q in QUADRATURES
        ]
        return MeasurementPenalty(*vals)

    return SimReport(
        params=params,
        n_symbols=params.n_symbols,
        n_sifted=n_sifted,
        sift_ratio=n_sifted / params.n_symbols,
        ber_alice_bob=_wilson(bob_err, n_sifted),
        ber_alice_eve=_wilson(eve_err, n_sifted).relabeled(),
        per_quadrature=per_q,
        eve_penalty=pen("eve"),
        bob_penalty=pen("bob"),
    )


@dataclass(frozen=True)
class Prediction:
    ber_alice_bob: float
    ber_alice_eve: float


def predict(params: SessionParams) -> Prediction:
    """Analytic BERs for a session, from the strategy's implied penalties."""
    s, eta = params.base_snr, params.channel_eta
    strategy = params.strategy
    coherent = params.protocol == "coherent"

    gain = bob_signal_gain(strategy)

    def bob_transfer(v_b: float) -> float:
        if gain == 0.0:
            return 0.0
        v = v_b + (1.0 - eta) / (eta * gain * gain)
        return 1.0 / (1.0 + v) if coherent else squeezed_transfer(params.vn, v)

    def eve_transfer(v_e: float) -> float:
        if math.isinf(v_e):
            return 0.0
        return 1.0 / (1.0 + v_e) if coherent else squeezed_transfer(params.vn, v_e)

    if isinstance(strategy, GuessResend):
        p_e = ber_from_snr(s)
        p_b = ber_from_snr(bob_transfer(0.0) * s)
        right = p_e * (1.0 - p_b) + (1.0 - p_e) * p_b
        return Prediction(0.5 * right + 0.25, 0.5 * p_e + 0.25)
    eve, bob = implied_penalties(strategy)
    return Prediction(
        ber_from_snr(bob_transfer(bob.v_plus) * s),
        ber_from_snr(eve_transfer(eve.v_plus) * s),
    )


def agreement(report: SimReport, n_sigma: float = 3.0) -> dict[str, bool]:
    """Whether each empirical BER lies within ``n_sigma`` binomial sigmas of
    the analytic prediction."""
    pred = predict(report.params)
    out = {}
    for name, emp, p in (
        ("alice_bob", report.ber_alice_bob, pred.ber_alice_bob),
        ("alice_eve", report.ber_alice_eve, pred.ber_alice_eve),
    ):
        sigma = math.sqrt(p * (1.0 - p) / emp.n)
        out[name] = abs(emp.value - p) <= n_sigma * sigma
    return out


def sample_epr_covariance(
    a_vars: QuadratureVariances, b_vars: QuadratureVariances, n: int, seed: int
) -> np.ndarray:
    """Empirical covariance of ``(X_c, Y_c, X_d, Y_d)`` for signal-free sources."""
    root = RandomStream(seed)
    scale = np.sqrt([a_vars.v_plus, a_vars.v_minus, b_vars.v_plus, b_vars.v_minus])
    acc = np.zeros((4, 4))
    done, k = 0, 0
    while done < n:
        m = min(BLOCK_SIZE * 8, n - done)
        stream = root.spawn(k)
        src = np.stack([stream.normals(m) for _ in range(4)]) * scale[:, None]
        modes = _EPR_MAP @ src
        acc += modes @ modes.T
        done += m
        k += 1
    return acc / n
