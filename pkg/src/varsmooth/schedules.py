"""Extrapolation, smoothing and step-size sequences."""

from dataclasses import dataclass
from math import sqrt

import numpy as np

from .spaces import ParameterError

VAST = "vast"
NESTEROV = "nesterov"
SVAST = "svast"
KINDS = (VAST, NESTEROV, SVAST)


@dataclass(frozen=True)
class ScheduleKind:
    """Which parameter regime to use.

    ``vast``: coupled t/mu recursion with mu_1 = b * normK2.
    ``nesterov``: classical t recursion with constant mu = b * normK2.
    ``svast``: classical t recursion with mu_k = b * normK2 * k**-1.5.
    In every case gamma_k = mu_k / normK2.
    """

    variant: str
    b: float
    normK2: float

    def __post_init__(self):
        if self.variant not in KINDS:
            raise ParameterError(f"unknown schedule {self.variant!r}")
        if not self.b > 0:
            raise ParameterError(f"b must be positive, got {self.b}")
        if not self.normK2 > 0:
            raise ParameterError(f"normK2 must be positive, got {self.normK2}")


def vast_default(b, normK2):
    return ScheduleKind(VAST, float(b), float(normK2))


def nesterov_const_mu(b, normK2):
    return ScheduleKind(NESTEROV, float(b), float(normK2))


def svast(b, normK2):
    return ScheduleKind(SVAST, float(b), float(normK2))


@dataclass(frozen=True)
class ScheduleState:
    k: int
    t: float
    mu: float
    gamma: float
    rho: float = 0.0


def init(kind):
    return ScheduleState(k=1, t=1.0, mu=kind.b * kind.normK2, gamma=kind.b, rho=0.0)


def _nesterov_t(t):
    return (1.0 + sqrt(1.0 + 4.0 * t * t)) / 2.0


def advance(state, kind):
    t = state.t
    if kind.variant == VAST:
        t_next = sqrt(t * t + 2.0 * t)
        mu_next = state.mu * (t * t / (t_next * t_next - t_next))
        gamma_next = mu_next / kind.normK2
    elif kind.variant == NESTEROV:
        t_next = _nesterov_t(t)
        mu_next = state.mu
        gamma_next = state.gamma
    else:
        t_next = _nesterov_t(t)
        decay = (state.k + 1) ** -1.5
        mu_next = kind.b * kind.normK2 * decay
        gamma_next = kind.b * decay
    rho = t * t - t_next * t_next + t_next
    return ScheduleState(state.k + 1, t_next, mu_next, gamma_next, rho)


def iterate(kind, count):
    """Yield the first ``count`` states, k = 1 .. count."""
    state = init(kind)
    for _ in range(count):
        yield state
        state = advance(state, kind)


def sequences(kind, count):
    """Arrays ``k, t, mu, gamma, rho`` for k = 1 .. count."""
    rows = [(s.k, s.t, s.mu, s.gamma, s.rho) for s in iterate(kind, count)]
    arr = np.array(rows, dtype=np.float64)
    return {
        "k": arr[:, 0].astype(np.int64),
        "t": arr[:, 1],
        "mu": arr[:, 2],
        "gamma": arr[:, 3],
        "rho": arr[:, 4],
    }


def mu_upper_constant():
    """The constant exp(4 pi^2 / 6) in the upper bound on VAST's mu_k t_k."""
    return float(np.exp(4.0 * np.pi ** 2 / 6.0))
