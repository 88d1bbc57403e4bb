"""Numpy implementation of the sampling and tally kernels.

Output-identical to the compiled ``_ckernel`` module; used when the extension
is not built or ``CVQKD_PURE_PYTHON`` is set.
"""
from __future__ import annotations

import numpy as np

_GAMMA = np.uint64(0x9E3779B97F4A7C15)
_M1 = np.uint64(0xBF58476D1CE4E5B9)
_M2 = np.uint64(0x94D049BB133111EB)
_INV_2_53 = 1.0 / 9007199254740992.0
_TWO_PI = 6.283185307179586


def _mix_array(key: int, counter: int, n: int) -> np.ndarray:
    idx = np.arange(n, dtype=np.uint64)
    idx += np.uint64(counter + 1)
    z = idx * _GAMMA
    z += np.uint64(key)
    z ^= z >> np.uint64(30)
    z *= _M1
    z ^= z >> np.uint64(27)
    z *= _M2
    z ^= z >> np.uint64(31)
    return z


def mix(key: int, counter: int) -> int:
    return int(_mix_array(key, counter, 1)[0])


def _uniform(key: int, counter: int, n: int) -> np.ndarray:
    z = _mix_array(key, counter, n) >> np.uint64(11)
    return (z + np.uint64(1)).astype(np.float64) * _INV_2_53


def fill_uniform(key: int, counter: int, out: np.ndarray) -> None:
    out[:] = _uniform(key, counter, out.shape[0])


def fill_normal(key: int, counter: int, out: np.ndarray) -> None:
    n = out.shape[0]
    m = n + (n & 1)
    u = _uniform(key, counter, m)
    r = np.sqrt(-2.0 * np.log(u[0::2]))
    theta = _TWO_PI * u[1::2]
    out[0::2] = r * np.cos(theta)
    out[1::2] = (r * np.sin(theta))[: n // 2]


def fill_bits(key: int, counter: int, out: np.ndarray) -> None:
    out[:] = (_mix_array(key, counter, out.shape[0]) >> np.uint64(63)).astype(np.uint8)


def tally(stat: np.ndarray, bits: np.ndarray, mask: np.ndarray):
    sel = mask.astype(bool)
    z = stat[sel]
    b = bits[sel].astype(bool)
    count = int(z.shape[0])
    if count == 0:
        return 0, 0, 0.0, 0.0
    errors = int(np.count_nonzero((z < 0.0) != b))
    # sequential accumulation keeps the rounding identical to the C loop
    s_sz = float(np.add.accumulate(np.where(b, -z, z))[-1])
    s_zz = float(np.add.accumulate(z * z)[-1])
    return count, errors, s_sz, s_zz
