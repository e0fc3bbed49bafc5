"""Compare the compiled kernels with the numpy fallback.

Times every array kernel on both backends, then one end-to-end VAST run per
backend in a fresh interpreter (the backend is fixed at import time).

    python benchmarks/bench_kernels.py [--size 256] [--repeat 5]
"""

import argparse
import os
import subprocess
import sys
import timeit

import numpy as np

from varsmooth import kernels
from varsmooth.linops import gaussian_kernel

END_TO_END = """
import time
from varsmooth import BACKEND, schedules, solvers
from varsmooth.problems import ImageProblemSpec, build_deblurring, KernelSpec, make_instance
spec = ImageProblemSpec(m={size}, n={size}, blur=KernelSpec(), seed=0)
_, data = make_instance(spec)
p = build_deblurring(data, 80.0, spec.blur)
start = time.perf_counter()
solvers.run_vast(p, schedules.vast_default(0.1, p.normK2), iters={iters}, trace_every={iters}, timing=False)
print(BACKEND, (time.perf_counter() - start) * 1e3 / {iters})
"""


def kernel_cases(size):
    rng = np.random.default_rng(0)
    x = rng.standard_normal((size, size))
    k = gaussian_kernel(9, 1.5)
    return {
        "diff_rows": (x,),
        "diff_rows_adj": (x,),
        "diff_cols": (x,),
        "diff_cols_adj": (x,),
        "correlate2d": (x, k, True),
        "correlate2d_adj": (x, k, True),
        "soft_threshold": (x, 0.5),
        "clip_abs": (x, 0.5),
    }


def time_call(fn, args, repeat):
    number = max(1, int(0.2 / max(timeit.timeit(lambda: fn(*args), number=1), 1e-7)))
    return min(timeit.repeat(lambda: fn(*args), number=number, repeat=repeat)) / number * 1e3


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--size", type=int, default=256)
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--iters", type=int, default=100, help="VAST iterations for the end-to-end run")
    args = ap.parse_args(argv)

    backends = kernels.available_backends()
    print(f"kernels on {args.size}x{args.size} (ms per call, best of {args.repeat})")
    print(f"{'kernel':<18}" + "".join(f"{b:>12}" for b in backends) + ("     speedup" if len(backends) > 1 else ""))
    for name, call_args in kernel_cases(args.size).items():
        times = [time_call(getattr(kernels.load_backend(b), name), call_args, args.repeat) for b in backends]
        row = f"{name:<18}" + "".join(f"{t:12.4f}" for t in times)
        if len(times) > 1:
            row += f"{times[1] / times[0]:11.2f}x"
        print(row)

    print(f"\nVAST deblurring {args.size}x{args.size}, {args.iters} iterations (ms per iteration)")
    for b in backends:
        env = dict(os.environ, VARSMOOTH_KERNELS=b)
        code = END_TO_END.format(size=args.size, iters=args.iters)
        out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True,
                             check=True)
        name, ms = out.stdout.split()
        print(f"{name:<18}{float(ms):12.3f}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
