"""Compare the compiled Lindblad kernel with the numpy fallback.

Times one generator application and one full adaptive integration for a
few system sizes.  Usage::

    python3 benchmarks/bench_kernels.py [--repeat 5] [--t-final 200]
"""

import argparse
import contextlib
import timeit

import numpy as np

from pseudochain import kernels
from pseudochain.config import ReservoirSpec
from pseudochain.dynamics import ExtendedState, generator, integrate
from pseudochain.model import RunConfig, SinkSpec, SystemSpec
from pseudochain.pipeline import build_model

SIZES = [(1, 3), (2, 3), (6, 3), (6, 5), (10, 8), (20, 10)]


@contextlib.contextmanager
def backend(cls):
    saved = generator.LindbladKernel
    generator.LindbladKernel = cls
    try:
        yield
    finally:
        generator.LindbladKernel = saved


def bench(cls, n, m, run, repeat):
    with backend(cls):
        _, gen = build_model(SystemSpec(n_chains=n, chain_len=m), ReservoirSpec(), SinkSpec(0.6))
    rho = ExtendedState.site_excitation(gen.index).rho
    rng = np.random.default_rng(0)
    probe = rho + 0.01 * (rng.normal(size=rho.shape) + 1j * rng.normal(size=rho.shape))
    probe = 0.5 * (probe + probe.conj().T)
    out = np.empty_like(probe)
    calls = max(10, int(2e6 / gen.dim ** 2))
    rhs = min(timeit.repeat(lambda: gen(probe, out), number=calls, repeat=repeat)) / calls
    full = min(timeit.repeat(lambda: integrate(gen, rho, run), number=1, repeat=max(1, repeat // 2)))
    return gen.dim, rhs, full


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=5)
    parser.add_argument("--t-final", type=float, default=200.0)
    parser.add_argument("--samples", type=int, default=401)
    args = parser.parse_args()
    if kernels.BACKEND != "cython":
        parser.exit(1, "compiled core not available; build with pip install -e . --no-build-isolation\n")

    run = RunConfig(t_final=args.t_final, sample_count=args.samples)
    print(f"{'N':>3} {'M':>3} {'D':>4} | {'rhs cython':>11} {'rhs numpy':>11} {'x':>6} | "
          f"{'run cython':>10} {'run numpy':>10} {'x':>6}")
    for n, m in SIZES:
        d, rc, fc = bench(kernels.LindbladKernel, n, m, run, args.repeat)
        _, rp, fp = bench(kernels.PythonKernel, n, m, run, args.repeat)
        print(f"{n:>3} {m:>3} {d:>4} | {rc * 1e6:>9.1f}us {rp * 1e6:>9.1f}us {rp / rc:>6.1f} | "
              f"{fc:>9.3f}s {fp:>9.3f}s {fp / fc:>6.1f}")


if __name__ == "__main__":
    main()
