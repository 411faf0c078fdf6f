"""Two-regime copula-Markov change-point models with Weibull marginals."""

import json

from . import _core
from ._core import (
    DomainError,
    Error,
    IOError,
    ParseError,
    h_function,
    kendall_tau,
    weibull_cdf,
    weibull_pdf,
    weibull_quantile,
)

__all__ = [
    "DomainError",
    "Error",
    "IOError",
    "ParseError",
    "bootstrap",
    "compare",
    "fit",
    "h_function",
    "interarrival",
    "kendall_tau",
    "log_likelihood",
    "simulate",
    "weibull_cdf",
    "weibull_pdf",
    "weibull_quantile",
]


def _params(params):
    p = {"alpha01": 2.0}
    p.update(params)
    return json.dumps(p)


def log_likelihood(values, params, tau):
    """params: dict with family, k0, k1, lambda0, lambda1, alpha0, alpha1[, alpha01]."""
    return _core.log_likelihood(list(values), _params(params), tau)


def simulate(params, tau, length=250, seed=1):
    return _core.simulate(_params(params), tau, length, seed)


def fit(values, family="clayton", alpha01=2.0, workers=1):
    return json.loads(_core.fit(list(values), family, alpha01, workers))


def bootstrap(values, family="clayton", alpha01=2.0, replications=1000, level=0.95, seed=1,
              workers=1):
    return json.loads(
        _core.bootstrap(list(values), family, alpha01, replications, level, seed, workers))


def compare(values, candidates=("clayton:2", "joe:2"), workers=1):
    return json.loads(_core.compare(list(values), list(candidates), workers))


def interarrival(labels, values, threshold=30.0):
    return json.loads(_core.interarrival(list(labels), list(values), threshold))
