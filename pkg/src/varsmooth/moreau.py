"""Moreau envelopes of Lipschitz functions and their compositions with operators."""

from dataclasses import dataclass

from .linops import LinearOperator
from .proxlib import ProxFunction
from .spaces import ParameterError, ShapeError, lincomb, norm2


def _check_mu(mu):
    if not mu > 0:
        raise ParameterError(f"smoothing parameter must be positive, got {mu}")


@dataclass
class SmoothedTerm:
    """One summand ``g(K x)`` of a composite objective.

    ``L`` defaults to the Lipschitz constant of ``g`` on the codomain of ``K``.
    """

    g: ProxFunction
    K: LinearOperator
    L: float = None

    def __post_init__(self):
        own = self.g.lipschitz_on(self.K.codomain)
        if self.L is None:
            self.L = own
        elif own is not None and abs(own - self.L) > 1e-12 * max(1.0, own):
            raise ParameterError(f"L={self.L} disagrees with g's Lipschitz constant {own}")

    def value(self, x):
        return self.g.eval(self.K.apply(x))


def envelope_value(g, mu, x):
    """Value of the Moreau envelope, via the infimal-convolution form."""
    _check_mu(mu)
    p = g.prox(x, mu)
    d = norm2(x - p)
    return g.eval(p) + d * d / (2.0 * mu)


def envelope_grad(g, mu, x):
    """(x - prox_{mu g}(x)) / mu."""
    _check_mu(mu)
    return lincomb(1.0 / mu, x, -1.0 / mu, g.prox(x, mu))


def envelope_dmu(g, mu, x):
    """Derivative of the envelope value with respect to ``mu``."""
    gr = envelope_grad(g, mu, x)
    n = norm2(gr)
    return -0.5 * n * n


def composite_grad(term, mu, x):
    """Gradient of ``x -> env_mu g(K x)``, i.e. K* grad env(K x)."""
    _check_mu(mu)
    K = term.K
    if len(x.blocks) != len(K.domain) or any(
        b.shape != s.dims for b, s in zip(x.blocks, K.domain)
    ):
        raise ShapeError(f"x does not live in the domain of {K.name}")
    return K.adjoint_apply(envelope_grad(term.g, mu, K.apply(x)))


def composite_grad_dual(term, mu, x):
    """Same gradient written through the conjugate: K* prox_{g*/mu}(K x / mu).

    This is the form the solvers evaluate.
    """
    _check_mu(mu)
    return term.K.adjoint_apply(term.g.conj_prox(term.K.apply(x) / mu, 1.0 / mu))


def smoothed_objective(f, terms, mu, x):
    """f(x) + sum_i env_mu g_i(K_i x)."""
    _check_mu(mu)
    val = f.eval(x)
    for t in terms:
        val += envelope_value(t.g, mu, t.K.apply(x))
    return val


def objective(f, terms, x):
    val = f.eval(x)
    for t in terms:
        val += t.value(x)
    return val
