"""Python bindings for the ergolab C++ core."""

import json

from . import _ergolab
from ._ergolab import ErgolabError, SCHEMA_VERSION, __version__

__all__ = [
    "ErgolabError",
    "SCHEMA_VERSION",
    "__version__",
    "app_falsifier",
    "birkhoff_average",
    "bowen_coverage",
    "bowen_weights",
    "count_language",
    "entropy_table",
    "is_legal",
    "lyapunov_estimate",
    "minimal_gap",
    "paper",
    "plan_oscillation",
    "rho_periodic",
    "run_acceptance",
    "splice_averages",
    "verify_m_transitivity",
]


def paper(kappa="1/4"):
    return {"type": "paper", "kappa": str(kappa)}


def _spec(spec):
    if spec is None:
        spec = paper()
    return spec if isinstance(spec, str) else json.dumps(spec)


def _obj(value):
    return value if isinstance(value, str) else json.dumps(value)


def count_language(spec, n, list_words=False, threads=1):
    return json.loads(_ergolab.count_language(_spec(spec), n, list_words, threads))


def entropy_table(spec, n_max, threads=1):
    return json.loads(_ergolab.entropy_table(_spec(spec), n_max, threads))


def is_legal(spec, word):
    return _ergolab.is_legal(_spec(spec), word)


def minimal_gap(spec, w, u, v_max=1000):
    return _ergolab.minimal_gap(_spec(spec), w, u, v_max)


def verify_m_transitivity(spec, w_max=8, u_max=8, threads=1):
    return json.loads(_ergolab.verify_m_transitivity(_spec(spec), w_max, u_max, threads))


def app_falsifier(spec, n, f_budget, g_budget):
    """Returns (w_hat, connector, u_hat) or None."""
    hit = _ergolab.app_falsifier(_spec(spec), n, f_budget, g_budget)
    return None if hit is None else tuple(hit)


def birkhoff_average(observable, word, n):
    """observable is "coordinate" or a {window, entries} table."""
    return _ergolab.birkhoff_average(_obj(observable), word, n)


def rho_periodic(p, q, terms=16):
    return _ergolab.rho_periodic(p, q, terms)


def plan_oscillation(spec, alpha, beta, tau=0.05, checkpoints=4, growth=10.0, p_lo="m", p_hi="p"):
    return json.loads(
        _ergolab.plan_oscillation(_spec(spec), alpha, beta, tau, checkpoints, growth, p_lo, p_hi)
    )


def splice_averages(spec, program):
    return _ergolab.splice_averages(_spec(spec), _obj(program))


def lyapunov_estimate(cocycle, word, n, norm="spectral"):
    return _ergolab.lyapunov_estimate(_obj(cocycle), word, n, norm)


def bowen_weights(lam, sigma, s0, cycles, t):
    return _ergolab.bowen_weights(lam, sigma, s0, cycles, t)


def bowen_coverage(lam, sigma, s0=1.0, cycles=20, grid=50, eps=0.02):
    return json.loads(_ergolab.bowen_coverage(lam, sigma, s0, cycles, grid, eps))


def run_acceptance(only=(), threads=1, check_thread_invariance=False):
    return json.loads(_ergolab.run_acceptance(list(only), threads, check_thread_invariance))
