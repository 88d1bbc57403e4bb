"""Compare the compiled kernel against the numpy fallback.

    python benchmarks/bench_kernels.py [--n 4000000] [--repeat 5]

Times the random-number fills and the tally on identical inputs, then a full
session with each backend swapped in.
"""
from __future__ import annotations

import argparse
import time

import numpy as np

from cvqkd import _kernel, _pykernel
from cvqkd.session import SessionParams, run_session
from cvqkd.strategies import PartialTap

try:
    from cvqkd import _ckernel
except ImportError:  # extension not built
    _ckernel = None

KERNEL_FUNCS = ("fill_uniform", "fill_normal", "fill_bits", "tally")


def best_of(fn, repeat: int) -> float:
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def kernel_cases(mod, n: int):
    key = 0x1234_5678_9ABC_DEF0
    f64 = np.empty(n)
    u8 = np.empty(n, dtype=np.uint8)
    stat = np.random.default_rng(0).normal(size=n)
    bits = (np.random.default_rng(1).random(n) < 0.5).astype(np.uint8)
    mask = np.ones(n, dtype=np.uint8)
    return {
        "fill_uniform": lambda: mod.fill_uniform(key, 0, f64),
        "fill_normal": lambda: mod.fill_normal(key, 0, f64),
        "fill_bits": lambda: mod.fill_bits(key, 0, u8),
        "tally": lambda: mod.tally(stat, bits, mask),
    }


def session_time(mod, n: int, repeat: int) -> float:
    saved = {name: getattr(_kernel, name) for name in KERNEL_FUNCS}
    for name in KERNEL_FUNCS:
        setattr(_kernel, name, getattr(mod, name))
    try:
        params = SessionParams("squeezed", n, seed=1, strategy=PartialTap(0.2))
        return best_of(lambda: run_session(params), repeat)
    finally:
        for name, fn in saved.items():
            setattr(_kernel, name, fn)


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=4_000_000, help="array length for kernel timings")
    ap.add_argument("--session-symbols", type=int, default=1_000_000)
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()

    backends = {"python": _pykernel}
    if _ckernel is not None:
        backends["cython"] = _ckernel
    else:
        print("compiled kernel not built; timing the fallback only")

    print(f"{'operation':<22}" + "".join(f"{b:>12}" for b in backends) + ("     speedup" if len(backends) > 1 else ""))
    rows = {}
    for op in KERNEL_FUNCS:
        rows[op] = {b: best_of(kernel_cases(m, args.n)[op], args.repeat) for b, m in backends.items()}
    rows["run_session"] = {b: session_time(m, args.session_symbols, max(1, args.repeat // 2)) for b, m in backends.items()}
    for op, t in rows.items():
        line = f"{op:<22}" + "".join(f"{t[b] * 1e3:>10.1f}ms" for b in backends)
        if len(backends) > 1:
            line += f"{t['python'] / t['cython']:>11.1f}x"
        print(line)


if __name__ == "__main__":
    main()
