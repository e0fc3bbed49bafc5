"""Randomized property checks for the envelope calculus, operators and schedules.

Every property draws its own instances from a seeded :class:`RngStream` and
returns a :class:`PropertyResult`. Functions under test are looked up through
their modules at call time so that a patched implementation is the one that
gets checked.
"""

import json
from dataclasses import dataclass, field
from math import exp, log, sqrt

import numpy as np

from . import linops, moreau, proxlib, schedules, solvers
from .spaces import BlockVector, RngStream, Shape, dot, norm2

REGISTRY = {}


@dataclass
class PropertyResult:
    name: str
    passed: bool
    detail: str = ""
    counterexample: dict = None
    stats: dict = field(default_factory=dict)

    def line(self):
        return f"{'PASS' if self.passed else 'FAIL'}  {self.name}: {self.detail}"


class _Failed(Exception):
    def __init__(self, message, example):
        super().__init__(message)
        self.example = example


def register(name):
    def wrap(fn):
        REGISTRY[name] = fn
        return fn
    return wrap


def _jsonable(value):
    if isinstance(value, BlockVector):
        return [b.tolist() for b in value.blocks]
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, (np.floating, np.integer)):
        return value.item()
    if isinstance(value, dict):
        return {k: _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, (proxlib.L1Norm, proxlib.L2Distance, proxlib.ZeroFunction)):
        return _describe(value)
    return value


def _describe(g):
    if isinstance(g, proxlib.L1Norm):
        return {"g": "l1_norm", "lam": g.lam}
    if isinstance(g, proxlib.L2Distance):
        return {"g": "l2_dist", "alpha": g.alpha, "b": _jsonable(g.b)}
    return {"g": type(g).__name__}


def _require(ok, message, **example):
    if not ok:
        raise _Failed(message, example)


# -- random instances --------------------------------------------------------


def _loguniform(rng, lo, hi):
    return float(exp(log(lo) + (log(hi) - log(lo)) * rng.uniform()))


def _vec(rng, d, scale=None):
    scale = _loguniform(rng, 0.05, 5.0) if scale is None else scale
    return BlockVector(scale * rng.normal(d))


def random_function(rng, d, kind=None):
    """An l1 norm or an l2 distance on R^d with random parameters."""
    kind = kind if kind is not None else ("l1" if rng.uniform() < 0.5 else "l2")
    weight = 0.2 + 2.8 * rng.uniform()
    if kind == "l1":
        return proxlib.l1_norm(weight)
    return proxlib.l2_dist(weight, BlockVector(rng.normal(d)))


def _lip(g, d):
    return g.lipschitz_on((Shape((d,)),))


def _mu(rng):
    return _loguniform(rng, 1e-3, 10.0)


def kink_distance(g, mu, y):
    """Distance of ``y`` from the set where the envelope of ``g`` is not twice differentiable."""
    if isinstance(g, proxlib.L1Norm):
        return float(np.min(np.abs(np.abs(y.flat()) - g.lam * mu)))
    if isinstance(g, proxlib.L2Distance):
        return abs(norm2(y - g.b) - g.alpha * mu)
    return float("inf")


def fd_gradient_error(term, mu, x, h=None):
    """Relative error of ``composite_grad`` against central differences of the envelope.

    Returns ``None`` when ``K x`` is too close to a kink of the envelope's
    gradient for central differences to be meaningful.
    """
    h = 1e-5 * (1.0 + norm2(x)) if h is None else h
    nK = term.K.norm_bound if term.K.norm_bound is not None else linops.estimate_norm(term.K)
    if kink_distance(term.g, mu, term.K.apply(x)) < 10.0 * h * max(nK, 1e-300):
        return None
    grad = moreau.composite_grad(term, mu, x)
    base = x.flat()
    fd = np.empty_like(base)
    shape = x.blocks[0].shape
    for j in range(base.size):
        e = np.zeros_like(base)
        e[j] = h
        up = moreau.envelope_value(term.g, mu, term.K.apply(BlockVector((base + e).reshape(shape))))
        dn = moreau.envelope_value(term.g, mu, term.K.apply(BlockVector((base - e).reshape(shape))))
        fd[j] = (up - dn) / (2.0 * h)
    gflat = grad.flat()
    return float(np.linalg.norm(fd - gflat) / max(np.linalg.norm(gflat), 1e-300))


# -- spaces --------------------------------------------------------------------


@register("hilbert_inequality")
def _hilbert(rng, trials):
    worst = -np.inf
    for i in range(trials):
        d = 1 + int(10 * rng.uniform())
        x, y = _vec(rng, d), _vec(rng, d)
        a = rng.uniform()
        if a == 0.0:
            continue
        lhs = (1 - a) * norm2(x - y) ** 2 + a * norm2(y) ** 2
        rhs = a * (1 - a) * norm2(x) ** 2
        worst = max(worst, rhs - lhs)
        _require(lhs >= rhs - 1e-12, "(1-a)|x-y|^2 + a|y|^2 < a(1-a)|x|^2", trial=i, x=x, y=y, a=a)
    return f"max violation {worst:.2e}"


@register("cauchy_schwarz")
def _cauchy_schwarz(rng, trials):
    for i in range(trials):
        d = 1 + int(10 * rng.uniform())
        a, b = _vec(rng, d), _vec(rng, d)
        lhs, rhs = abs(dot(a, b)), norm2(a) * norm2(b)
        _require(lhs <= rhs * (1 + 1e-12), "|<a,b>| > |a||b|", trial=i, a=a, b=b)
    return f"{trials} pairs"


# -- envelope inequalities ------------------------------------------------------


def _env_case(rng):
    d = 1 + int(10 * rng.uniform())
    g = random_function(rng, d)
    return d, g, _lip(g, d), _mu(rng), _vec(rng, d)


def _slack(*vals):
    return 1e-12 * (1.0 + max(abs(v) for v in vals))


@register("envelope_sandwich")
def _sandwich(rng, trials):
    for i in range(trials):
        d, g, L, mu, x = _env_case(rng)
        env, gx = moreau.envelope_value(g, mu, x), g.eval(x)
        s = _slack(env, gx)
        _require(env <= gx + s and gx <= env + mu * L * L / 2 + s,
                 "env <= g <= env + mu L^2/2 violated", trial=i, g=g, mu=mu, x=x, env=env, gx=gx)
    return f"{trials} draws"


@register("envelope_monotone")
def _monotone(rng, trials):
    for i in range(trials):
        d, g, L, mu1, x = _env_case(rng)
        mu2 = _mu(rng)
        mu1, mu2 = min(mu1, mu2), max(mu1, mu2)
        e1, e2 = moreau.envelope_value(g, mu1, x), moreau.envelope_value(g, mu2, x)
        s = _slack(e1, e2)
        _require(e2 <= e1 + s and e1 <= e2 + (mu2 - mu1) * L * L / 2 + s,
                 "monotone comparison in mu violated", trial=i, g=g, mu1=mu1, mu2=mu2, x=x)
    return f"{trials} draws"


@register("envelope_two_parameter")
def _two_parameter(rng, trials):
    for i in range(trials):
        d, g, L, mu1, x = _env_case(rng)
        mu2 = _mu(rng)
        e1, e2 = moreau.envelope_value(g, mu1, x), moreau.envelope_value(g, mu2, x)
        gn = norm2(moreau.envelope_grad(g, mu1, x))
        bound = e2 + (mu2 - mu1) * 0.5 * gn * gn
        _require(e1 <= bound + _slack(e1, e2, bound), "two-parameter bound violated",
                 trial=i, g=g, mu1=mu1, mu2=mu2, x=x)
    return f"{trials} draws"


@register("gradient_inequality_composite")
def _grad_ineq_composite(rng, trials):
    for i in range(trials):
        n = 1 + int(8 * rng.uniform())
        d = 1 + int(8 * rng.uniform())
        g = random_function(rng, d)
        A = rng.normal((d, n))
        term = moreau.SmoothedTerm(g, linops.matrix_operator(A))
        mu = _mu(rng)
        x, y = _vec(rng, n), _vec(rng, n)
        Kx, Ky = term.K.apply(x), term.K.apply(y)
        gx = moreau.envelope_grad(g, mu, Kx)
        gy = moreau.envelope_grad(g, mu, Ky)
        lhs = moreau.envelope_value(g, mu, Kx) + dot(moreau.composite_grad(term, mu, x), y - x)
        diff = norm2(gx - gy)
        rhs = moreau.envelope_value(g, mu, Ky) - 0.5 * mu * diff * diff
        _require(lhs <= rhs + _slack(lhs, rhs), "co-coercive gradient inequality violated",
                 trial=i, g=g, A=A, mu=mu, x=x, y=y, lhs=lhs, rhs=rhs)
    return f"{trials} draws"


@register("gradient_inequality_prox")
def _grad_ineq_prox(rng, trials):
    for i in range(trials):
        d, g, L, mu, x = _env_case(rng)
        y = _vec(rng, d)
        gr = moreau.envelope_grad(g, mu, x)
        gn = norm2(gr)
        lhs = moreau.envelope_value(g, mu, x) + dot(gr, y - x)
        rhs = g.eval(y) - 0.5 * mu * gn * gn
        _require(lhs <= rhs + _slack(lhs, rhs), "env + <grad, y - x> <= g(y) - mu/2 |grad|^2 violated",
                 trial=i, g=g, mu=mu, x=x, y=y)
    return f"{trials} draws"


@register("envelope_near_lipschitz")
def _near_lipschitz(rng, trials):
    for i in range(trials):
        d, g, L, mu, x = _env_case(rng)
        y = _vec(rng, d)
        ex, ey = moreau.envelope_value(g, mu, x), moreau.envelope_value(g, mu, y)
        bound = L * norm2(x - y) + mu * L * L / 2
        _require(abs(ex - ey) <= bound + _slack(ex, ey), "|env(x) - env(y)| > L|x-y| + mu L^2/2",
                 trial=i, g=g, mu=mu, x=x, y=y)
    return f"{trials} draws"


@register("gradient_lipschitz")
def _grad_lipschitz(rng, trials):
    for i in range(trials):
        d, g, L, mu, x = _env_case(rng)
        y = x + _vec(rng, d, scale=_loguniform(rng, 1e-3, 1.0) * mu)
        lhs = norm2(moreau.envelope_grad(g, mu, x) - moreau.envelope_grad(g, mu, y))
        rhs = norm2(x - y) / mu
        _require(lhs <= rhs * (1 + 1e-9) + 1e-12, "gradient is not 1/mu-Lipschitz",
                 trial=i, g=g, mu=mu, x=x, y=y)
    return f"{trials} draws"


@register("gradient_prox_identity")
def _grad_prox(rng, trials):
    worst = 0.0
    for i in range(trials):
        d, g, L, mu, x = _env_case(rng)
        step = x - mu * moreau.envelope_grad(g, mu, x)
        p = g.prox(x, mu)
        err = norm2(step - p)
        worst = max(worst, err / (1.0 + norm2(x)))
        _require(err <= 1e-14 * (1.0 + norm2(x)) * sqrt(d), "x - mu grad differs from prox",
                 trial=i, g=g, mu=mu, x=x, err=err)
    return f"max scaled residual {worst:.2e}"


@register("envelope_dmu_fd")
def _dmu_fd(rng, trials):
    worst = 0.0
    done = 0
    while done < trials:
        d, g, L, mu, x = _env_case(rng)
        h = 1e-5 * mu
        if kink_distance(g, mu, x) < 1e-3 * mu * (1.0 + L):
            continue
        fd = (moreau.envelope_value(g, mu + h, x) - moreau.envelope_value(g, mu - h, x)) / (2 * h)
        an = moreau.envelope_dmu(g, mu, x)
        err = abs(fd - an) / max(abs(an), 1e-300)
        worst = max(worst, err)
        _require(err <= 1e-4, "d/dmu envelope disagrees with central differences",
                 trial=done, g=g, mu=mu, x=x, fd=fd, analytic=an)
        done += 1
    return f"max rel err {worst:.2e}"


@register("composite_grad_fd")
def _grad_fd(rng, trials):
    worst = 0.0
    done = 0
    while done < trials:
        n = 10
        d = 1 + int(10 * rng.uniform())
        g = random_function(rng, d)
        A = rng.normal((d, n))
        term = moreau.SmoothedTerm(g, linops.matrix_operator(A))
        mu = _mu(rng)
        x = _vec(rng, n)
        err = fd_gradient_error(term, mu, x)
        if err is None:
            continue
        worst = max(worst, err)
        _require(err <= 1e-5, "composite gradient disagrees with central differences",
                 trial=done, g=g, mu=mu, x=x, A=A, rel_err=err)
        done += 1
    return f"max rel err {worst:.2e}"


# -- prox layer -----------------------------------------------------------------


@register("moreau_decomposition")
def _decomposition(rng, trials):
    worst = 0.0
    for i in range(trials):
        d = 1 + int(10 * rng.uniform())
        choice = rng.uniform()
        g = proxlib.zero_function() if choice < 0.1 else random_function(rng, d)
        gamma = _mu(rng)
        x = _vec(rng, d)
        split = g.prox(x, gamma) + gamma * proxlib.conj_prox(g, x / gamma, 1.0 / gamma)
        err = norm2(x - split)
        closed = proxlib.conj_prox(g, x, gamma)
        route = proxlib.conj_prox_decomposition(g, x, gamma)
        err2 = norm2(closed - route)
        scale = 1.0 + norm2(x)
        worst = max(worst, err / scale, err2 / (1.0 + norm2(route)))
        _require(err <= 1e-12 * scale and err2 <= 1e-12 * (1.0 + norm2(route)),
                 "x != prox(x) + gamma conj_prox(x / gamma)", trial=i, g=g, gamma=gamma, x=x)
    return f"max scaled residual {worst:.2e}"


@register("conjugate_domain_bound")
def _conj_domain(rng, trials):
    for i in range(trials):
        d, g, L, gamma, x = _env_case(rng)
        r = norm2((x - g.prox(x, gamma)) / gamma)
        _require(r <= L * (1 + 1e-12) + 1e-12, "envelope gradient leaves B(0, L)",
                 trial=i, g=g, gamma=gamma, x=x, norm=r, L=L)
    return f"{trials} draws"


def _prox_objective(g, x, gamma, p):
    r = norm2(p - x)
    return g.eval(p) + r * r / (2.0 * gamma)


@register("prox_optimality")
def _prox_opt(rng, trials):
    for i in range(trials):
        d = 1 if i % 2 == 0 else 2
        g = random_function(rng, d)
        gamma = _mu(rng)
        x = _vec(rng, d)
        p = g.prox(x, gamma)
        best = _prox_objective(g, x, gamma, p)
        width = 1.5 * (norm2(x - p) + gamma) + 1e-3
        ticks = np.linspace(-width, width, 201 if d == 1 else 41)
        pts = ticks[:, None] if d == 1 else np.stack(np.meshgrid(ticks, ticks), -1).reshape(-1, 2)
        centre = p.blocks[0]
        for c in pts:
            cand = BlockVector(centre + c)
            val = _prox_objective(g, x, gamma, cand)
            _require(val - best >= -1e-9, "a grid point beats the prox",
                     trial=i, g=g, gamma=gamma, x=x, prox=p, candidate=cand)
    return f"{trials} instances"


@register("prox_nonexpansive")
def _nonexpansive(rng, trials):
    for i in range(trials):
        d = 1 + int(10 * rng.uniform())
        g = random_function(rng, d)
        gamma = _mu(rng)
        x, y = _vec(rng, d), _vec(rng, d)
        lhs = norm2(g.prox(x, gamma) - g.prox(y, gamma))
        _require(lhs <= norm2(x - y) * (1 + 1e-12) + 1e-15, "prox is expansive",
                 trial=i, g=g, gamma=gamma, x=x, y=y)
    return f"{trials} pairs"


# -- schedules --------------------------------------------------------------------


def vast_schedule_report(b=1.0, normK2=8.0, count=100_000):
    """Worst-case residuals of the VAST schedule over k = 1 .. count."""
    s = schedules.sequences(schedules.vast_default(b, normK2), count + 1)
    k = s["k"].astype(np.float64)
    t, mu, gamma = s["t"], s["mu"], s["gamma"]
    lhs = (1.0 - 1.0 / t[1:]) * gamma[1:] * t[1:] ** 2
    rhs = gamma[:-1] * t[:-1] ** 2
    coupling = float(np.max(np.abs(lhs - rhs) / np.abs(rhs)))
    smoothing = float(np.max(mu[:-1] - mu[1:] - mu[1:] / t[1:]))
    c = b * normK2
    kk, tt, mm = k[:-1], t[:-1], mu[:-1]
    return {
        "coupling_rel": coupling,
        "smoothing_max": smoothing,
        "t_lower_ok": bool(np.all((kk + 1) / 2 <= tt * (1 + 1e-15))),
        "t_upper_ok": bool(np.all(tt <= kk * (1 + 1e-15))),
        "mu_lower_ok": bool(np.all(c / tt <= mm * (1 + 1e-12))),
        "mu_upper_ok": bool(np.all(mm <= c * schedules.mu_upper_constant() / tt)),
        "mu_t_range": (float(np.min(mm * tt / c)), float(np.max(mm * tt / c))),
    }


def nesterov_schedule_report(b=1.0, normK2=8.0, count=100_000):
    s = schedules.sequences(schedules.nesterov_const_mu(b, normK2), count + 1)
    t, k = s["t"], s["k"].astype(np.float64)
    resid = np.abs(t[:-1] ** 2 - (t[1:] ** 2 - t[1:])) / t[1:] ** 2
    return {
        "identity_rel": float(np.max(resid)),
        "rho_rel": float(np.max(np.abs(s["rho"][1:]) / t[1:] ** 2)),
        "t_bounds_ok": bool(np.all(((k + 1) / 2 <= t) & (t <= k))),
        "mu_constant": bool(np.all(s["mu"] == s["mu"][0])),
    }


@register("schedule_vast")
def _sched_vast(rng, trials):
    b = _loguniform(rng, 1e-3, 10.0)
    normK2 = _loguniform(rng, 0.5, 20.0)
    rep = vast_schedule_report(b, normK2, count=100_000)
    ok = (rep["coupling_rel"] <= 1e-12 and rep["smoothing_max"] <= 1e-14
          and rep["t_lower_ok"] and rep["t_upper_ok"] and rep["mu_lower_ok"] and rep["mu_upper_ok"])
    _require(ok, "VAST schedule hypotheses violated", b=b, normK2=normK2, report=rep)
    return (f"coupling residual {rep['coupling_rel']:.2e}, smoothing max {rep['smoothing_max']:.2e}, "
            f"mu t / (b normK2) in [{rep['mu_t_range'][0]:.3f}, {rep['mu_t_range'][1]:.3f}]")


@register("schedule_nesterov")
def _sched_nesterov(rng, trials):
    rep = nesterov_schedule_report(1.0, 8.0, count=100_000)
    ok = rep["identity_rel"] <= 1e-10 and rep["t_bounds_ok"] and rep["mu_constant"]
    _require(ok, "t_k^2 = t_{k+1}^2 - t_{k+1} violated", report=rep)
    return f"identity residual {rep['identity_rel']:.2e}"


@register("schedule_svast")
def _sched_svast(rng, trials):
    b = _loguniform(rng, 1e-3, 10.0)
    s = schedules.sequences(schedules.svast(b, 8.0), 10_000)
    k = s["k"].astype(np.float64)
    ok = (np.all(np.diff(s["mu"]) <= 0)
          and np.allclose(s["mu"], b * 8.0 * k ** -1.5, rtol=1e-14, atol=0)
          and np.allclose(s["gamma"], b * k ** -1.5, rtol=1e-14, atol=0)
          and np.max(np.abs(s["rho"][1:]) / s["t"][1:] ** 2) <= 1e-10)
    _require(bool(ok), "sVAST schedule is not the k^-3/2 rule with rho = 0", b=b)
    return "mu nonincreasing, rho = 0"


# -- operators ---------------------------------------------------------------------


def operator_zoo(m=7, n=5):
    """Operators the adjoint and linearity properties are run on."""
    box = linops.gaussian_kernel(3, 0.8)
    skew = np.arange(1.0, 10.0).reshape(3, 3)
    ops = [
        linops.identity((linops.Shape((m, n)),)),
        linops.d1_rows(m, n),
        linops.d2_cols(m, n),
        linops.stack([linops.d1_rows(m, n), linops.d2_cols(m, n)]),
        linops.conv2d(box, m, n, "zero"),
        linops.conv2d(box, m, n, "symmetric"),
        linops.conv2d(skew, m, n, "zero"),
        linops.conv2d(skew, m, n, "symmetric"),
        linops.conv2d(linops.gaussian_kernel(), m, n, "symmetric"),
        linops.matrix_operator(np.arange(12.0).reshape(4, 3) - 5.0),
    ]
    return ops


@register("adjoint_consistency")
def _adjoint(rng, trials):
    worst = 0.0
    ops = operator_zoo()
    per_op = max(1, trials // len(ops))
    for op in ops:
        for i in range(per_op):
            x = linops.random_like_space(op.domain, rng)
            y = linops.random_like_space(op.codomain, rng)
            Kx = op.apply(x)
            lhs, rhs = dot(Kx, y), dot(x, op.adjoint_apply(y))
            scale = 1.0 + norm2(Kx) * norm2(y)
            worst = max(worst, abs(lhs - rhs) / scale)
            _require(abs(lhs - rhs) <= 1e-10 * scale, f"<Kx, y> != <x, K*y> for {op.name}",
                     trial=i, op=op.name, x=x, y=y)
    return f"{len(ops)} operators, max scaled gap {worst:.2e}"


@register("operator_linearity")
def _linearity(rng, trials):
    ops = operator_zoo()
    for op in ops:
        for i in range(max(1, trials // (5 * len(ops)))):
            x = linops.random_like_space(op.domain, rng)
            y = linops.random_like_space(op.domain, rng)
            a, b = rng.normal(2)
            lhs = op.apply(a * x + b * y)
            rhs = a * op.apply(x) + b * op.apply(y)
            _require(norm2(lhs - rhs) <= 1e-12 * (1.0 + norm2(rhs)), f"{op.name} is not linear",
                     trial=i, op=op.name)
    return f"{len(ops)} operators"


# -- gradient estimator ----------------------------------------------------------


def estimator_instance(rng, dim=6, probs=(0.6, 0.75, 0.9)):
    """A small three-term problem with matrix operators and a fixed point y."""
    terms = []
    for i, kind in enumerate(("l1", "l2", "l1")):
        g = random_function(rng, dim, kind=kind)
        terms.append(moreau.SmoothedTerm(g, linops.matrix_operator(rng.normal((dim, dim)))))
    problem = solvers.CompositeProblem(proxlib.zero_function(), terms)
    y = BlockVector(rng.normal(dim))
    return problem, y, list(probs)


def estimator_moments(problem, y, probs, mu, draws, rng):
    """Empirical mean error and second moment of the Bernoulli estimator at ``y``."""
    est = solvers.BernoulliGradient(probs, rng)
    full = problem.grad(y, mu).flat()
    total = np.zeros_like(full)
    sq = 0.0
    for _ in range(draws):
        xi, _ = solvers.estimate(problem, est, y, mu)
        v = xi.flat()
        total += v
        sq += float(np.sum((v - full) ** 2))
    mean = total / draws
    bound = sum((1 - p) / p * nk * nk * t.L * t.L
                for p, nk, t in zip(probs, problem.op_norms, problem.terms))
    return {
        "mean_rel_err": float(np.linalg.norm(mean - full) / np.linalg.norm(full)),
        "variance": sq / draws,
        "variance_bound": float(bound),
    }


@register("estimator_unbiased")
def _est_mean(rng, trials):
    problem, y, probs = estimator_instance(rng)
    mom = estimator_moments(problem, y, probs, 0.5, max(10_000, trials), rng)
    _require(mom["mean_rel_err"] <= 2e-2, "estimator mean is off by more than 2%", **mom)
    return f"mean rel err {mom['mean_rel_err']:.2e}"


@register("estimator_variance")
def _est_var(rng, trials):
    problem, y, probs = estimator_instance(rng)
    mom = estimator_moments(problem, y, probs, 0.5, max(2_000, trials), rng)
    _require(mom["variance"] <= mom["variance_bound"], "estimator variance exceeds its bound", **mom)
    return f"variance {mom['variance']:.3g} <= bound {mom['variance_bound']:.3g}"


# -- driver ----------------------------------------------------------------------


def run_property(name, seed=0, trials=500):
    rng = RngStream(seed).spawn(sorted(REGISTRY).index(name))
    try:
        detail = REGISTRY[name](rng, trials)
    except _Failed as exc:
        example = {"property": name, "seed": seed, "message": str(exc)}
        example.update(_jsonable(exc.example))
        return PropertyResult(name, False, str(exc), example)
    return PropertyResult(name, True, detail)


def run_checks(seed=0, trials=500, names=None):
    """Run the registered properties (all of them by default), in name order."""
    names = sorted(REGISTRY) if names is None else list(names)
    unknown = [n for n in names if n not in REGISTRY]
    if unknown:
        raise KeyError(f"unknown properties: {unknown}")
    return [run_property(n, seed, trials) for n in names]


def first_counterexample(results):
    for r in results:
        if not r.passed:
            return json.dumps(r.counterexample, sort_keys=True)
    return None
