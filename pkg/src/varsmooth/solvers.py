"""VAST / sVAST variable-smoothing solvers and PDHG / sPDHG baselines."""

import time
from dataclasses import dataclass, field
from math import sqrt

import numpy as np

from . import schedules
from .linops import estimate_norm
from .moreau import composite_grad_dual, envelope_value
from .proxlib import ProxFunction
from .spaces import BlockVector, ParameterError, RngStream, ShapeError, lincomb, norm2

DIVERGENCE_FACTOR = 1e6


class DivergenceError(RuntimeError):
    """Objective became non-finite or blew up; carries the partial trace."""

    def __init__(self, message, trace, x=None):
        super().__init__(message)
        self.trace = trace
        self.x = x


class CompositeProblem:
    """min_x f(x) + sum_i g_i(K_i x) with Lipschitz g_i.

    ``normK2`` defaults to sum_i ||K_i||^2 using each operator's norm bound
    (power iteration when an operator carries none). ``x0`` is the default
    starting point for the solvers.
    """

    def __init__(self, f, terms, normK2=None, x0=None, name="problem"):
        if not isinstance(f, ProxFunction):
            raise TypeError("f must be a ProxFunction")
        terms = list(terms)
        if not terms:
            raise ParameterError("a composite problem needs at least one term")
        dom = terms[0].K.domain
        for t in terms:
            if t.K.domain != dom:
                raise ShapeError("all operators must share one domain")
            if t.L is None or not np.isfinite(t.L) or not t.L > 0:
                raise ParameterError(f"term {t.g!r} needs a finite positive Lipschitz constant")
        self.f = f
        self.terms = terms
        self.domain = dom
        self.op_norms = [
            t.K.norm_bound if t.K.norm_bound is not None else estimate_norm(t.K, iters=200)
            for t in terms
        ]
        self.normK2 = float(normK2) if normK2 is not None else float(sum(n * n for n in self.op_norms))
        if not self.normK2 > 0:
            raise ParameterError("normK2 must be positive")
        self.x0 = x0
        self.name = name

    @property
    def lipschitz_sq(self):
        """Squared Lipschitz constant of (y_i) -> sum g_i(y_i) on the product space."""
        return float(sum(t.L * t.L for t in self.terms))

    def zeros(self):
        return BlockVector.zeros(self.domain)

    def start(self, x0=None):
        x = x0 if x0 is not None else (self.x0 if self.x0 is not None else self.zeros())
        if len(x.blocks) != len(self.domain) or any(
            b.shape != s.dims for b, s in zip(x.blocks, self.domain)
        ):
            raise ShapeError("x0 does not live in the problem domain")
        return x

    def objective(self, x):
        val = self.f.eval(x)
        for t in self.terms:
            val += t.g.eval(t.K.apply(x))
        return val

    def smoothed_objective(self, x, mu):
        val = self.f.eval(x)
        for t in self.terms:
            val += envelope_value(t.g, mu, t.K.apply(x))
        return val

    def term_grad(self, i, y, mu):
        return composite_grad_dual(self.terms[i], mu, y)

    def grad(self, y, mu):
        """Full gradient of the smoothed part, summed in term order."""
        acc = self.term_grad(0, y, mu)
        for i in range(1, len(self.terms)):
            acc = acc + self.term_grad(i, y, mu)
        return acc


# -- gradient estimators ---------------------------------------------------


class FullGradient:
    rng = None

    def weights(self, m):
        return [1.0] * m


class BernoulliGradient:
    """Keeps term i with probability p_i and reweights it by 1/p_i."""

    def __init__(self, probs, rng):
        probs = [float(p) for p in probs]
        if any(not (0.0 < p <= 1.0) for p in probs):
            raise ParameterError(f"probabilities must lie in (0, 1], got {probs}")
        self.probs = probs
        self.rng = rng

    def weights(self, m):
        if m != len(self.probs):
            raise ParameterError(f"{len(self.probs)} probabilities for {m} terms")
        u = self.rng.uniform(m)
        return [1.0 / p if ui < p else 0.0 for ui, p in zip(u, self.probs)]


def estimate(problem, est, y, mu):
    """One draw of the gradient estimator at ``y``; returns (xi, evaluations)."""
    acc = None
    evals = 0
    for i, w in enumerate(est.weights(len(problem.terms))):
        if w == 0.0:
            continue
        g = problem.term_grad(i, y, mu)
        evals += 1
        if w != 1.0:
            g = w * g
        acc = g if acc is None else acc + g
    if acc is None:
        acc = problem.zeros()
    return acc, evals


# -- traces ------------------------------------------------------------------


@dataclass
class TraceRow:
    k: int
    wall_ms: float
    objective: float
    smoothed_objective: float = None
    mu: float = None
    gamma: float = None
    t: float = None
    dist_to_ref: float = None
    grad_evals: int = 0


@dataclass
class Trace:
    rows: list = field(default_factory=list)

    def __len__(self):
        return len(self.rows)

    def __iter__(self):
        return iter(self.rows)

    @property
    def last(self):
        return self.rows[-1]

    def column(self, name):
        return np.array(
            [np.nan if getattr(r, name) is None else getattr(r, name) for r in self.rows],
            dtype=np.float64,
        )


@dataclass
class SolverResult:
    x_final: BlockVector
    trace: Trace
    iterations: int
    seed: int = None
    extras: dict = field(default_factory=dict)


class _Recorder:
    def __init__(self, problem, x_ref, timing):
        self.problem = problem
        self.x_ref = x_ref
        self.timing = timing
        self.trace = Trace()
        self.start = time.perf_counter()
        self.overhead = 0.0
        self.limit = None

    def record(self, k, x, evals, mu=None, gamma=None, t=None):
        entered = time.perf_counter()
        wall = (entered - self.start - self.overhead) * 1e3 if self.timing else 0.0
        obj = self.problem.objective(x)
        sm = self.problem.smoothed_objective(x, mu) if mu is not None else None
        dist = norm2(x - self.x_ref) if self.x_ref is not None else None
        self.trace.rows.append(TraceRow(k, wall, obj, sm, mu, gamma, t, dist, evals))
        if self.limit is None:
            self.limit = DIVERGENCE_FACTOR * max(abs(obj), 1.0)
        if not np.isfinite(obj) or obj > self.limit:
            raise DivergenceError(
                f"objective {obj!r} at k={k} exceeds the divergence limit {self.limit:.3g}",
                self.trace, x,
            )
        self.overhead += time.perf_counter() - entered


def _check_run(iters, trace_every):
    if iters < 1:
        raise ParameterError("iters must be >= 1")
    if trace_every < 1:
        raise ParameterError("trace_every must be >= 1")


def _accelerated(problem, kind, est, x0, iters, trace_every, x_ref, timing):
    _check_run(iters, trace_every)
    f = problem.f
    state = schedules.init(kind)
    x_prev = problem.start(x0)
    y = x_prev
    rec = _Recorder(problem, x_ref, timing)
    evals = 0
    rec.record(0, x_prev, evals, state.mu, state.gamma, state.t)
    for k in range(1, iters + 1):
        gamma = state.gamma
        xi, used = estimate(problem, est, y, state.mu)
        evals += used
        x = f.prox(lincomb(1.0, y, -gamma, xi), gamma)
        nxt = schedules.advance(state, kind)
        beta = (state.t - 1.0) / nxt.t
        y = x + beta * (x - x_prev)
        x_prev = x
        if k % trace_every == 0 or k == iters:
            rec.record(k, x, evals, state.mu, state.gamma, state.t)
        state = nxt
    return SolverResult(x_prev, rec.trace, iters, seed=None if est.rng is None else est.rng.seed)


def run_vast(problem, kind, x0=None, iters=1000, trace_every=1, x_ref=None, timing=True):
    """Deterministic variable-smoothing accelerated proximal gradient.

    Each step takes a proximal-gradient step on f + sum_i env_{mu_k} g_i(K_i .)
    at the extrapolated point with step gamma_k = mu_k / normK2, then
    extrapolates with weight (t_k - 1) / t_{k+1}.
    """
    return _accelerated(problem, kind, FullGradient(), x0, iters, trace_every, x_ref, timing)


def run_svast(problem, kind, est, x0=None, iters=1000, trace_every=1, x_ref=None, timing=True):
    """Stochastic variant: the smoothed gradient is replaced by an unbiased estimate."""
    if kind.variant != schedules.SVAST:
        raise ParameterError("run_svast expects the 'svast' schedule")
    return _accelerated(problem, kind, est, x0, iters, trace_every, x_ref, timing)


# -- primal-dual baselines -----------------------------------------------------


def pdhg_steps(problem, gamma=0.99):
    """tau = sigma_i = gamma / ||K|| with ||K||^2 = normK2."""
    nK = sqrt(problem.normK2)
    return gamma / nK, [gamma / nK] * len(problem.terms)


def spdhg_steps(problem, gamma=0.99, per_block=False):
    """sigma_i = gamma / ||K|| (or gamma / ||K_i||), tau = gamma / (n max_i ||K_i||)."""
    n = len(problem.terms)
    nK = sqrt(problem.normK2)
    tau = gamma / (n * max(problem.op_norms))
    if per_block:
        sigma = [gamma / ni for ni in problem.op_norms]
    else:
        sigma = [gamma / nK] * n
    return tau, sigma


def _primal_dual(problem, tau, sigma, select, x0, iters, trace_every, x_ref, timing, rng):
    _check_run(iters, trace_every)
    if not tau > 0 or any(not s > 0 for s in sigma):
        raise ParameterError("step sizes must be positive")
    if len(sigma) != len(problem.terms):
        raise ParameterError(f"{len(sigma)} dual steps for {len(problem.terms)} terms")
    f = problem.f
    terms = problem.terms
    x = problem.start(x0)
    duals = [BlockVector.zeros(t.K.codomain) for t in terms]
    z = problem.zeros()
    zbar = z
    rec = _Recorder(problem, x_ref, timing)
    evals = 0
    rec.record(0, x, evals, gamma=tau)
    for k in range(1, iters + 1):
        x = f.prox(lincomb(1.0, x, -tau, zbar), tau)
        step = None
        for i, theta in select():
            t = terms[i]
            s = sigma[i]
            y_new = t.g.conj_prox(lincomb(1.0, duals[i], s, t.K.apply(x)), s)
            dz = t.K.adjoint_apply(y_new - duals[i])
            duals[i] = y_new
            evals += 1
            z = z + dz
            if theta != 1.0:
                dz = theta * dz
            step = dz if step is None else step + dz
        zbar = z if step is None else z + step
        if k % trace_every == 0 or k == iters:
            rec.record(k, x, evals, gamma=tau)
    return SolverResult(
        x, rec.trace, iters, seed=None if rng is None else rng.seed,
        extras={"duals": duals},
    )


def run_pdhg(problem, tau=None, sigma=None, x0=None, iters=1000, trace_every=1, x_ref=None,
             timing=True):
    """Primal-dual hybrid gradient with extrapolation on the dual side.

    Every dual block is updated each iteration; ``zbar = 2 z_new - z_old``
    with ``z = sum_i K_i* y_i`` drives the next primal prox step.
    """
    if tau is None or sigma is None:
        t0, s0 = pdhg_steps(problem)
        tau = t0 if tau is None else tau
        sigma = s0 if sigma is None else sigma
    everything = [(i, 1.0) for i in range(len(problem.terms))]
    return _primal_dual(problem, tau, list(sigma), lambda: everything, x0, iters, trace_every,
                        x_ref, timing, None)


def run_spdhg(problem, tau=None, sigma=None, probs=None, rng=None, x0=None, iters=1000,
              trace_every=1, x_ref=None, timing=True):
    """Stochastic PDHG with serial sampling.

    One dual block i is drawn per iteration with probability p_i and the
    dual extrapolation uses the weight 1 / p_i.
    """
    m = len(problem.terms)
    probs = [1.0 / m] * m if probs is None else [float(p) for p in probs]
    if len(probs) != m:
        raise ParameterError(f"{len(probs)} probabilities for {m} terms")
    if any(not (0.0 < p <= 1.0) for p in probs):
        raise ParameterError(f"probabilities must lie in (0, 1], got {probs}")
    total = sum(probs)
    p = [q / total for q in probs]
    cdf = np.cumsum(p)
    cdf[-1] = 1.0
    if tau is None or sigma is None:
        t0, s0 = spdhg_steps(problem)
        tau = t0 if tau is None else tau
        sigma = s0 if sigma is None else sigma
    rng = rng if rng is not None else RngStream(0)

    def select():
        i = int(np.searchsorted(cdf, rng.uniform(), side="right"))
        i = min(i, m - 1)
        return [(i, 1.0 / p[i])]

    return _primal_dual(problem, tau, list(sigma), select, x0, iters, trace_every, x_ref,
                        timing, rng)
