"""Compiled kernels vs the numpy fallback.

    python3 benchmarks/bench_kernels.py [--repeat N]

Times the greedy solver on the cached real-lifted systems used by the
decoder, Bernoulli matrix generation, and one full compressed decode per
backend.  The decode comparison swaps the dispatch module's functions in
place, so both backends run the same Python around the kernel.
"""
import argparse
import timeit

import numpy as np

from lora_cs import _fallback, kernels
from lora_cs.channel import apply_awgn
from lora_cs.cs import build_measurement, compress
from lora_cs.phy import ChirpParams, make_chirp
from lora_cs.recovery import demodulate_compressed, measurement_system

try:
    from lora_cs import _kernels
except ImportError:
    _kernels = None


def _time(fn, repeat):
    return min(timeit.repeat(fn, number=repeat, repeat=5)) / repeat


def bench_omp(mod, sf, chunk_m, repeat):
    system = measurement_system(sf, chunk_m).system
    rng = np.random.default_rng(0)
    y = compress(apply_awgn(make_chirp(ChirpParams(sf), 17), 0.0, rng), build_measurement(m=chunk_m))
    yr = np.concatenate([y.y.real, y.y.imag])
    return _time(lambda: mod.omp(system.theta_real, yr, system.norms, 8, 0.0, system.d, 4), repeat)


def bench_decode(mod, sf, chunk_m, repeat):
    saved = kernels.omp
    kernels.omp = mod.omp
    try:
        rng = np.random.default_rng(1)
        y = compress(apply_awgn(make_chirp(ChirpParams(sf), 17), 0.0, rng), build_measurement(m=chunk_m))
        return _time(lambda: demodulate_compressed(y), repeat)
    finally:
        kernels.omp = saved


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=200)
    args = ap.parse_args()
    backends = [("python", _fallback)] + ([("cython", _kernels)] if _kernels is not None else [])
    if _kernels is None:
        print("compiled extension not built; timing the fallback only")
    rows = []
    for sf, chunk_m in [(7, 32), (8, 16), (9, 8), (10, 32)]:
        for name, fn in [("omp k=4", bench_omp), ("decode", bench_decode)]:
            rows.append((f"{name} sf={sf} M={chunk_m << (sf - 7)}",
                         {b: fn(mod, sf, chunk_m, args.repeat) for b, mod in backends}))
    rows.append(("bernoulli 128x128",
                 {b: _time(lambda mod=mod: mod.bernoulli_signs(12345, 128, 128), args.repeat) for b, mod in backends}))

    print(f"{'kernel':<24}" + "".join(f"{b:>14}" for b, _ in backends) + ("     speedup" if len(backends) > 1 else ""))
    for label, t in rows:
        line = f"{label:<24}" + "".join(f"{t[b] * 1e6:>11.1f} us" for b, _ in backends)
        if len(backends) > 1:
            line += f"{t['python'] / t['cython']:>11.1f}x"
        print(line)


if __name__ == "__main__":
    main()
