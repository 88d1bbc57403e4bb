"""Deterministic numeric primitives: special functions, dB conversion,
monotone root finding and seeded counter-based Gaussian streams."""
from __future__ import annotations

import math
from typing import Callable

import numpy as np
from scipy.optimize import brentq

from . import _kernel
from .errors import BracketError, DomainError

_MASK64 = (1 << 64) - 1


def erfc(x: float) -> float:
    """Complementary error function, accurate to ~1e-16 absolute."""
    if not math.isfinite(x):
        raise DomainError(f"erfc needs a finite argument, got {x!r}")
    return math.erfc(x)


def db_to_linear(db: float) -> float:
    return 10.0 ** (db / 10.0)


def linear_to_db(x: float) -> float:
    if not x > 0:
        raise DomainError(f"linear_to_db needs x > 0, got {x!r}")
    return 10.0 * math.log10(x)


def solve_monotone(
    f: Callable[[float], float], target: float, lo: float, hi: float
) -> float:
    """Solve ``f(x) = target`` for ``f`` monotone on ``[lo, hi]``.

    Raises
    ------
    BracketError
        If ``target`` does not lie between ``f(lo)`` and ``f(hi)``.
    """
    flo, fhi = f(lo) - target, f(hi) - target
    if flo == 0.0:
        return lo
    if fhi == 0.0:
        return hi
    if flo * fhi > 0:
        raise BracketError(
            f"target {target!r} not bracketed by f({lo})={flo + target!r}, f({hi})={fhi + target!r}"
        )
    x = brentq(lambda t: f(t) - target, lo, hi, xtol=1e-300, rtol=8.9e-16, maxiter=500)
    # brentq stops on x-resolution; polish with bisection if f is steep there
    tol = 1e-12 * max(1.0, abs(target))
    a, b = lo, hi
    fa = flo
    for _ in range(200):
        fx = f(x) - target
        if abs(fx) <= tol:
            break
        if (fx < 0) == (fa < 0):
            a, fa = x, fx
        else:
            b = x
        x = 0.5 * (a + b)
    return x


def _splitmix(z: int) -> int:
    z = (z + 0x9E3779B97F4A7C15) & _MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return z ^ (z >> 31)


class RandomStream:
    """Counter-based random stream.

    Sample ``i`` is a pure function of ``(key, i)``, so a stream can be split
    into independent shards with :meth:`spawn` without coordination. A stream
    is owned by one execution context at a time; its counter advances on
    every draw.
    """

    def __init__(self, seed: int, *, _key: int | None = None) -> None:
        if not 0 <= seed <= _MASK64:
            raise DomainError(f"seed must be a 64-bit unsigned integer, got {seed!r}")
        self.seed = seed
        self.key = _splitmix(seed) if _key is None else _key
        self.counter = 0

    def spawn(self, index: int) -> "RandomStream":
        """Independent sub-stream number ``index``; does not touch this stream."""
        key = _splitmix(self.key ^ _splitmix((index * 0xD1B54A32D192ED03 + 1) & _MASK64))
        return RandomStream(self.seed, _key=key)

    def _advance(self, n: int) -> int:
        start = self.counter
        # keep pairs aligned so normals never share uniforms across calls
        self.counter += n + (n & 1)
        return start

    def uniforms(self, n: int) -> np.ndarray:
        out = np.empty(n, dtype=np.float64)
        _kernel.fill_uniform(self.key, self._advance(n), out)
        return out

    def normals(self, n: int) -> np.ndarray:
        out = np.empty(n, dtype=np.float64)
        _kernel.fill_normal(self.key, self._advance(n), out)
        return out

    def bits(self, n: int) -> np.ndarray:
        out = np.empty(n, dtype=np.uint8)
        _kernel.fill_bits(self.key, self._advance(n), out)
        return out

    def __repr__(self) -> str:
        return f"RandomStream(seed={self.seed}, key={self.key:#018x}, counter={self.counter})"


def gaussian(stream: RandomStream, mean: float, variance: float) -> float:
    """One draw from N(mean, variance)."""
    if variance < 0:
        raise DomainError(f"variance must be non-negative, got {variance!r}")
    z = stream.normals(1)[0]
    if variance == 0:
        return float(mean)
    return float(mean + math.sqrt(variance) * z)
