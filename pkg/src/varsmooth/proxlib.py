"""Convex functions with cheap proximal maps."""

from math import sqrt

import numpy as np

from . import kernels
from .spaces import BlockVector, ParameterError, lincomb, norm2


def _check_step(gamma):
    if not gamma > 0:
        raise ParameterError(f"prox step must be positive, got {gamma}")


class ProxFunction:
    """Base class: value, proximal map and (optional) Lipschitz constant.

    ``prox(x, gamma)`` returns argmin_p f(p) + ||p - x||^2 / (2 gamma).
    Subclasses may override ``conj_prox`` with a closed form; the default
    goes through the Moreau decomposition.
    """

    lipschitz = None

    def __call__(self, x):
        return self.eval(x)

    def eval(self, x):
        raise NotImplementedError

    def prox(self, x, gamma):
        raise NotImplementedError

    def lipschitz_on(self, space):
        """Lipschitz constant w.r.t. the Euclidean norm on ``space``."""
        return self.lipschitz

    def conj_prox(self, x, gamma):
        """prox of ``gamma * f*`` at ``x``."""
        return conj_prox_decomposition(self, x, gamma)


def conj_prox_decomposition(g, x, gamma):
    """prox_{gamma g*}(x) = x - gamma prox_{g/gamma}(x / gamma)."""
    _check_step(gamma)
    return lincomb(1.0, x, -gamma, g.prox(x / gamma, 1.0 / gamma))


def conj_prox(g, x, gamma):
    _check_step(gamma)
    return g.conj_prox(x, gamma)


class L1Norm(ProxFunction):
    """lam * ||x||_1 summed over all blocks."""

    def __init__(self, lam=1.0, size=None):
        if lam < 0:
            raise ParameterError(f"l1 weight must be nonnegative, got {lam}")
        self.lam = float(lam)
        self.size = size
        self.lipschitz = None if size is None else self.lam * sqrt(size)

    def lipschitz_on(self, space):
        size = sum(s.size for s in space)
        return self.lam * sqrt(size)

    def eval(self, x):
        return self.lam * float(sum(np.abs(b).sum() for b in x.blocks))

    def prox(self, x, gamma):
        _check_step(gamma)
        t = self.lam * gamma
        return BlockVector([kernels.soft_threshold(b, t) for b in x.blocks])

    def conj_prox(self, x, gamma):
        _check_step(gamma)
        return BlockVector([kernels.clip_abs(b, self.lam) for b in x.blocks])

    def __repr__(self):
        return f"L1Norm(lam={self.lam})"


class L2Distance(ProxFunction):
    """alpha * ||x - b||_2 (the norm itself, not its square)."""

    def __init__(self, alpha, b):
        if not alpha > 0:
            raise ParameterError(f"alpha must be positive, got {alpha}")
        self.alpha = float(alpha)
        self.b = b
        self.lipschitz = self.alpha

    def eval(self, x):
        return self.alpha * norm2(x - self.b)

    def prox(self, x, gamma):
        _check_step(gamma)
        r = x - self.b
        nr = norm2(r)
        if nr == 0.0:
            return self.b.copy()
        scale = max(1.0 - gamma * self.alpha / nr, 0.0)
        return lincomb(1.0, self.b, scale, r)

    def conj_prox(self, x, gamma):
        # f*(u) = <u, b> + indicator(||u|| <= alpha): shift, then project.
        _check_step(gamma)
        v = lincomb(1.0, x, -gamma, self.b)
        nv = norm2(v)
        if nv <= self.alpha:
            return v
        return v * (self.alpha / nv)

    def __repr__(self):
        return f"L2Distance(alpha={self.alpha})"


class ZeroFunction(ProxFunction):
    lipschitz = 0.0

    def eval(self, x):
        return 0.0

    def prox(self, x, gamma):
        _check_step(gamma)
        return x

    def conj_prox(self, x, gamma):
        _check_step(gamma)
        return x * 0.0

    def __repr__(self):
        return "ZeroFunction()"


def l1_norm(lam=1.0, size=None):
    return L1Norm(lam, size)


def l2_dist(alpha, b):
    return L2Distance(alpha, b)


def zero_function():
    return ZeroFunction()
