"""Time the numba kernels against their numpy twins.

Usage: ``python benchmarks/bench_kernels.py [--repeat R] [--scale S]``.
Each kernel is run once to compile, then timed R times; the best time is
reported with the max relative difference between the two outputs.
"""
import argparse
import time

import numpy as np

from cbedigits import EnsembleParams
from cbedigits._accel import HAVE_NUMBA
from cbedigits._kernels import KERNELS


def _cases(scale: int):
    rng = np.random.default_rng(0)
    p = EnsembleParams(200 * scale, 2)
    floors, fracs = p.floors_fracs
    t = np.linspace(0.1, 50.0, 64 * scale)
    z = rng.uniform(-20, 20, 20_000 * scale) + 1j * rng.uniform(-50, 50, 20_000 * scale)
    return {
        "loggamma": (z,),
        "log_psi_gamma": (t, p.offsets),
        "log_weierstrass": (t[:8], floors, fracs, 2_000 * scale),
        "log_kprod": (t, 1.0 + fracs, floors),
        "hurwitz": (3, rng.uniform(0, 500, 50_000 * scale)),
    }


def _best(fn, args, repeat):
    out = fn(*args)
    best = np.inf
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best, out


def _first(out):
    return out[0] if isinstance(out, tuple) else out


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--scale", type=int, default=1)
    args = ap.parse_args(argv)
    if not HAVE_NUMBA:
        print("numba is not importable; only the numpy column is meaningful")
    print(f"{'kernel':<16}{'numba [ms]':>12}{'numpy [ms]':>12}{'speedup':>10}{'max rel diff':>14}")
    for name, case in _cases(args.scale).items():
        nb, npy = KERNELS[name]
        t_nb, o_nb = _best(nb, case, args.repeat)
        t_np, o_np = _best(npy, case, args.repeat)
        a, b = np.asarray(_first(o_nb)), np.asarray(_first(o_np))
        d = a - b
        if np.iscomplexobj(d):
            # logs of the same product may differ by multiples of 2 pi i
            d = d.real + 1j * (np.angle(np.exp(1j * d.imag)))
        diff = float(np.max(np.abs(d) / np.maximum(np.abs(b), 1.0)))
        print(f"{name:<16}{1e3 * t_nb:12.2f}{1e3 * t_np:12.2f}{t_np / t_nb:10.1f}{diff:14.2e}")


if __name__ == "__main__":
    main()
