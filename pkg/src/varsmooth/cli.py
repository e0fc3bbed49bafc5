"""Command-line harness: ``varsmooth {run, rate, check, opnorm}``."""

import argparse
import concurrent.futures
import os
import sys
from dataclasses import dataclass, fields, replace

import numpy as np

from . import __version__, checks, kernels, linops, schedules, solvers
from .pgm import save_pgm
from .problems import (DEFAULT_ALPHA, ImageProblemSpec, KernelSpec, build_deblurring,
                       build_denoising, make_instance)
from .spaces import ParameterError, RngStream

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_USAGE = 2
EXIT_DIVERGED = 3

CSV_COLUMNS = ("k", "wall_ms", "objective", "smoothed_objective", "rel_objective",
               "dist_to_ref", "mu", "gamma", "t")
PROBLEMS = ("denoise", "deblur")
SOLVERS = ("vast", "vast-constmu", "svast", "pdhg", "spdhg")


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class RunConfig:
    problem: str = "denoise"
    solver: str = "vast"
    m: int = 64
    n: int = 64
    alpha: float = None
    noise_sigma: float = 0.1
    blur_size: int = 9
    blur_sigma: float = 1.5
    b_param: float = 0.1
    iters: int = 2000
    trace_every: int = 10
    seed: int = 0
    ref_iters: int = 20000
    probs: tuple = None

    @property
    def weight(self):
        return self.alpha if self.alpha is not None else DEFAULT_ALPHA[self.problem]

    @property
    def n_terms(self):
        return 2 if self.problem == "denoise" else 3

    def validate(self):
        if self.problem not in PROBLEMS:
            raise ConfigError(f"problem must be one of {PROBLEMS}, got {self.problem!r}")
        if self.solver not in SOLVERS:
            raise ConfigError(f"solver must be one of {SOLVERS}, got {self.solver!r}")
        rules = [
            (self.m >= 8 and self.n >= 8, "m and n must be at least 8"),
            (self.weight > 0, "alpha must be positive"),
            (self.noise_sigma >= 0, "noise_sigma must be nonnegative"),
            (self.blur_size >= 1 and self.blur_size % 2 == 1, "blur_size must be odd and positive"),
            (self.blur_sigma > 0, "blur_sigma must be positive"),
            (self.b_param > 0, "b_param must be positive"),
            (self.iters >= 1, "iters must be >= 1"),
            (self.trace_every >= 1, "trace_every must be >= 1"),
            (0 <= self.seed < 2 ** 64, "seed must be an unsigned 64-bit integer"),
            (self.ref_iters >= 1, "ref_iters must be >= 1"),
        ]
        for ok, message in rules:
            if not ok:
                raise ConfigError(message)
        if self.probs is not None:
            if len(self.probs) != self.n_terms:
                raise ConfigError(f"probs needs {self.n_terms} entries for {self.problem}")
            if any(not (0 < p <= 1) for p in self.probs):
                raise ConfigError("each probability must lie in (0, 1]")
        return self

    def items(self):
        for f in fields(self):
            value = getattr(self, f.name)
            if f.name == "alpha":
                value = self.weight
            if f.name == "probs":
                value = "" if value is None else ",".join(repr(p) for p in value)
            yield f.name, value


_PARSERS = {f.name: f.type for f in fields(RunConfig)}


def _convert(key, raw):
    if key in ("problem", "solver"):
        return raw
    if key == "probs":
        return tuple(float(v) for v in raw.split(",") if v.strip())
    if _PARSERS[key] is int:
        return int(raw)
    return float(raw)


def parse_config(text):
    """Parse flat ``key=value`` lines; '#' starts a comment."""
    values = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected key=value")
        key, raw = (part.strip() for part in line.split("=", 1))
        if key not in _PARSERS:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        if key in values:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        try:
            values[key] = _convert(key, raw)
        except ValueError:
            raise ConfigError(f"line {lineno}: bad value {raw!r} for {key}") from None
    return RunConfig(**values).validate()


def load_config(path):
    try:
        with open(path, encoding="utf-8") as fh:
            return parse_config(fh.read())
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc.strerror}") from None


# -- run ------------------------------------------------------------------------


def build_problem(cfg):
    blur = KernelSpec(cfg.blur_size, cfg.blur_sigma) if cfg.problem == "deblur" else None
    spec = ImageProblemSpec(cfg.m, cfg.n, cfg.weight, cfg.noise_sigma, blur, cfg.seed)
    truth, data = make_instance(spec)
    if cfg.problem == "denoise":
        return build_denoising(data, cfg.weight), truth
    return build_deblurring(data, cfg.weight, blur), truth


def reference_solution(problem, ref_iters):
    """Long PDHG run; F* is the smallest traced objective."""
    res = solvers.run_pdhg(problem, iters=ref_iters, trace_every=max(1, min(10, ref_iters)),
                           timing=False)
    return res.x_final, float(np.min(res.trace.column("objective")))


def run_solver(problem, cfg, x_ref, timing):
    """Returns (result, metadata) for the configured solver."""
    rng = RngStream(cfg.seed).spawn(2)
    common = dict(iters=cfg.iters, trace_every=cfg.trace_every, x_ref=x_ref, timing=timing)
    meta = {}
    if cfg.solver in ("vast", "vast-constmu", "svast"):
        make = {"vast": schedules.vast_default, "vast-constmu": schedules.nesterov_const_mu,
                "svast": schedules.svast}[cfg.solver]
        kind = make(cfg.b_param, problem.normK2)
        meta["schedule"] = kind.variant
        if cfg.solver == "svast":
            probs = cfg.probs if cfg.probs is not None else (0.5,) * cfg.n_terms
            meta["probs"] = ",".join(repr(p) for p in probs)
            est = solvers.BernoulliGradient(probs, rng)
            return solvers.run_svast(problem, kind, est, **common), meta
        return solvers.run_vast(problem, kind, **common), meta
    if cfg.solver == "pdhg":
        tau, sigma = solvers.pdhg_steps(problem)
        meta.update(tau=repr(tau), sigma=",".join(repr(s) for s in sigma))
        return solvers.run_pdhg(problem, tau, sigma, **common), meta
    tau, sigma = solvers.spdhg_steps(problem)
    probs = cfg.probs if cfg.probs is not None else (1.0 / cfg.n_terms,) * cfg.n_terms
    meta.update(tau=repr(tau), sigma=",".join(repr(s) for s in sigma),
                probs=",".join(repr(p) for p in probs))
    return solvers.run_spdhg(problem, tau, sigma, probs, rng, **common), meta


def _fmt(value):
    if value is None:
        return "nan"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return repr(float(value))


def trace_csv(trace, f_star, header_lines):
    rows = list(trace)
    f0 = rows[0].objective if rows else float("nan")
    span = f0 - f_star
    out = [f"# {line}" for line in header_lines]
    out.append(",".join(CSV_COLUMNS))
    for r in rows:
        rel = (r.objective - f_star) / span if span != 0 else float("nan")
        out.append(",".join(_fmt(v) for v in (
            r.k, r.wall_ms, r.objective, r.smoothed_objective, rel, r.dist_to_ref,
            r.mu, r.gamma, r.t)))
    return "\n".join(out) + "\n"


def gnuplot_script(csv_path):
    name = os.path.basename(csv_path)
    return (
        "set datafile separator ','\n"
        "set datafile commentschars '#'\n"
        "set key autotitle columnhead\n"
        "set logscale xy\n"
        "set xlabel 'iteration k'\n"
        "set ylabel 'relative objective'\n"
        f"plot '{name}' using 1:5 with lines title 'rel_objective'\n"
    )


def _with_seed(path, seed):
    root, ext = os.path.splitext(path)
    return f"{root}-seed{seed}{ext}"


def execute_run(cfg, out_csv, out_image, timing=False):
    """One experiment; returns an exit code. Writes the trace even on divergence."""
    problem, _ = build_problem(cfg)
    x_ref, f_star = reference_solution(problem, cfg.ref_iters)
    code = EXIT_OK
    try:
        result, meta = run_solver(problem, cfg, x_ref, timing)
        trace, x_final = result.trace, result.x_final
    except solvers.DivergenceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        trace, x_final, meta = exc.trace, exc.x, {}
        code = EXIT_DIVERGED
    header = [f"varsmooth {__version__} backend={kernels.BACKEND}"]
    header += [" ".join(f"{k}={v}" for k, v in cfg.items())]
    header += [f"normK2={problem.normK2!r} L2={problem.lipschitz_sq!r} F_star={f_star!r}"]
    if meta:
        header += [" ".join(f"{k}={v}" for k, v in meta.items())]
    if code == EXIT_DIVERGED:
        header += ["status=diverged"]
    text = trace_csv(trace, f_star, header)
    if out_csv:
        with open(out_csv, "w", encoding="ascii", newline="\n") as fh:
            fh.write(text)
        with open(out_csv + ".gp", "w", encoding="ascii") as fh:
            fh.write(gnuplot_script(out_csv))
    else:
        sys.stdout.write(text)
    if out_image and x_final is not None:
        save_pgm(x_final, out_image)
    return code


def _sweep_job(args):
    cfg, out_csv, out_image, timing = args
    return execute_run(cfg, out_csv, out_image, timing)


def cmd_run(args):
    try:
        cfg = load_config(args.config) if args.config else RunConfig().validate()
        if args.seed is not None:
            cfg = replace(cfg, seed=args.seed).validate()
    except (ConfigError, ParameterError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    if args.sweep is None:
        return execute_run(cfg, args.out_csv, args.out_image, args.timing)
    if args.sweep < 1:
        print("config error: --sweep needs N >= 1", file=sys.stderr)
        return EXIT_USAGE
    jobs = []
    for s in range(cfg.seed, cfg.seed + args.sweep):
        csv = _with_seed(args.out_csv, s) if args.out_csv else None
        img = _with_seed(args.out_image, s) if args.out_image else None
        jobs.append((replace(cfg, seed=s), csv, img, args.timing))
    if args.jobs > 1:
        with concurrent.futures.ProcessPoolExecutor(args.jobs) as pool:
            codes = list(pool.map(_sweep_job, jobs))
    else:
        codes = [_sweep_job(j) for j in jobs]
    return max(codes)


# -- rate -----------------------------------------------------------------------


def read_trace_csv(path):
    """Columns of a trace CSV as a dict of float arrays."""
    with open(path, encoding="ascii") as fh:
        lines = [ln for ln in fh.read().splitlines() if ln and not ln.startswith("#")]
    if not lines:
        raise ValueError(f"{path}: no header row")
    names = lines[0].split(",")
    data = np.array([[float(v) for v in ln.split(",")] for ln in lines[1:]], dtype=np.float64)
    data = data.reshape(-1, len(names))
    return {name: data[:, i] for i, name in enumerate(names)}


def loglog_slope(k, values, k_min, k_max):
    """Least-squares slope of log(values) against log(k) on ``k_min <= k <= k_max``.

    Returns ``(slope, used, clipped)``; nonpositive values are left out of the
    fit and counted in ``clipped``.
    """
    k = np.asarray(k, dtype=np.float64)
    values = np.asarray(values, dtype=np.float64)
    window = (k >= k_min) & (k <= k_max) & (k > 0)
    good = window & (values > 0) & np.isfinite(values)
    clipped = int(np.sum(window & ~good))
    used = int(np.sum(good))
    if used < 2:
        return float("nan"), used, clipped
    slope = np.polyfit(np.log(k[good]), np.log(values[good]), 1)[0]
    return float(slope), used, clipped


def cmd_rate(args):
    try:
        cols = read_trace_csv(args.csv)
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    if "rel_objective" not in cols:
        print("error: no rel_objective column", file=sys.stderr)
        return EXIT_USAGE
    slope, used, clipped = loglog_slope(cols["k"], cols["rel_objective"], args.k_min, args.k_max)
    if clipped:
        print(f"clipped {clipped} nonpositive or non-finite values", file=sys.stderr)
    if used < 10:
        print(f"error: only {used} usable rows in [{args.k_min}, {args.k_max}], need 10",
              file=sys.stderr)
        return EXIT_USAGE
    print(f"slope {slope:.6f} rows {used} clipped {clipped}")
    return EXIT_OK


# -- check ----------------------------------------------------------------------


def cmd_check(args):
    if args.trials < 1:
        print("error: --trials must be >= 1", file=sys.stderr)
        return EXIT_USAGE
    try:
        results = checks.run_checks(args.seed, args.trials, args.property or None)
    except KeyError as exc:
        print(f"error: {exc.args[0]}", file=sys.stderr)
        return EXIT_USAGE
    for r in results:
        print(r.line())
    failed = checks.first_counterexample(results)
    if failed is not None:
        print(f"counterexample: {failed}")
        return EXIT_FAILED
    print(f"all {len(results)} properties passed")
    return EXIT_OK


# -- opnorm ---------------------------------------------------------------------


def _dims(text):
    try:
        m, n = (int(v) for v in text.lower().split("x"))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected MxN, got {text!r}") from None
    if m < 1 or n < 1:
        raise argparse.ArgumentTypeError("dimensions must be positive")
    return m, n


def make_operator(name, m, n, blur_size=9, blur_sigma=1.5):
    if name == "d1":
        return linops.d1_rows(m, n)
    if name == "d2":
        return linops.d2_cols(m, n)
    if name == "grad-stack":
        return linops.stack([linops.d1_rows(m, n), linops.d2_cols(m, n)])
    if name == "blur":
        return linops.conv2d(linops.gaussian_kernel(blur_size, blur_sigma), m, n, "symmetric")
    raise ValueError(f"unknown operator {name!r}")


def cmd_opnorm(args):
    m, n = args.dims
    op = make_operator(args.operator, m, n, args.blur_size, args.blur_sigma)
    est = linops.estimate_norm(op, iters=args.iters, rng=RngStream(args.seed))
    bound = op.norm_bound
    print(f"{args.operator} {m}x{n} estimate {est:.6f} bound {bound:.6f}")
    return EXIT_OK


# -- entry point ----------------------------------------------------------------


def build_parser():
    parser = argparse.ArgumentParser(prog="varsmooth", description=__doc__)
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run one experiment (or a seed sweep)")
    run.add_argument("--config", metavar="PATH")
    run.add_argument("--out-csv", metavar="PATH")
    run.add_argument("--out-image", metavar="PATH")
    run.add_argument("--seed", type=int, metavar="U64")
    run.add_argument("--sweep", type=int, metavar="N", help="run seeds seed .. seed+N-1")
    run.add_argument("--jobs", type=int, default=1, help="worker processes for --sweep")
    run.add_argument("--timing", action="store_true",
                     help="record wall-clock milliseconds (otherwise 0, keeping output byte-stable)")
    run.set_defaults(func=cmd_run)

    rate = sub.add_parser("rate", help="log-log slope of rel_objective in a trace CSV")
    rate.add_argument("csv")
    rate.add_argument("--k-min", type=float, default=100)
    rate.add_argument("--k-max", type=float, default=5000)
    rate.set_defaults(func=cmd_rate)

    check = sub.add_parser("check", help="run the randomized property suite")
    check.add_argument("--seed", type=int, default=0)
    check.add_argument("--trials", type=int, default=500)
    check.add_argument("--property", action="append", metavar="NAME",
                       help="restrict to this property (repeatable)")
    check.set_defaults(func=cmd_check)

    opnorm = sub.add_parser("opnorm", help="power-iteration norm estimate vs analytic bound")
    opnorm.add_argument("operator", choices=("d1", "d2", "grad-stack", "blur"))
    opnorm.add_argument("dims", type=_dims, metavar="MxN")
    opnorm.add_argument("--iters", type=int, default=100)
    opnorm.add_argument("--seed", type=int, default=0)
    opnorm.add_argument("--blur-size", type=int, default=9)
    opnorm.add_argument("--blur-sigma", type=float, default=1.5)
    opnorm.set_defaults(func=cmd_opnorm)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
