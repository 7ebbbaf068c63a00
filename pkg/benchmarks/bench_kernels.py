"""Time the compiled kernels against the numpy fallback.

Usage: python3 benchmarks/bench_kernels.py [--repeat N]
"""

import argparse
import timeit

import numpy as np
from scipy.special import gammaln

from kerrquench.kernels import available_backends


def cases(rng):
    a = rng.normal(size=(64, 400)) + 1j * rng.normal(size=(64, 400))
    b = rng.normal(size=(64, 400)) + 1j * rng.normal(size=(64, 400))
    yield "convolve_direct 64x400*400", lambda k: k.convolve_direct(a, b, 500)

    n = 201 * 201
    beta = rng.normal(size=n) * 4 + 1j * rng.normal(size=n) * 4
    z = np.sqrt(100 / 3) * np.conj(beta)
    args = (np.log(np.abs(z)), np.angle(z), -0.5 * (100 / 3 + np.abs(beta) ** 2),
            np.full(n, np.pi), 150)
    yield "kerr_series 201x201 grid", lambda k: k.kerr_series(*args)

    S, M = 12, 6
    p = np.full(M, 1.0 / M)
    ks = np.arange(S + 1)
    logp = ks[None, :] * np.log(p)[:, None] - gammaln(ks + 1)[None, :]
    theta = np.linspace(0, 4 * np.pi, 64)
    yield "composition_autocorr S=12 M=6", lambda k: k.composition_autocorr(
        logp, ks * ks, theta, float(gammaln(S + 1)))


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.split("\n")[0])
    ap.add_argument("--repeat", type=int, default=5)
    opts = ap.parse_args(argv)
    backends = available_backends()
    names = list(backends)
    print(f"{'kernel':32s}" + "".join(f"{n:>12s}" for n in names) + ("     speedup" if len(names) > 1 else ""))
    for label, fn in cases(np.random.default_rng(0)):
        times = {}
        for name, mod in backends.items():
            times[name] = min(timeit.repeat(lambda: fn(mod), number=1, repeat=opts.repeat))
        row = f"{label:32s}" + "".join(f"{times[n] * 1e3:10.2f}ms" for n in names)
        if "cython" in times:
            row += f"{times['python'] / times['cython']:11.1f}x"
        print(row)


if __name__ == "__main__":
    main()
