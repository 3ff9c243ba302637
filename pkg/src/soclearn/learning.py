"""Belief updates, informativeness tests, and potential recursion.

All belief arithmetic happens in the natural-log domain. Linear-domain
probabilities appear only at the API boundary (total variation values,
CSV export). The informativeness test compares the one-step Bayesian
posterior against the current belief in total variation and declares
the signal informative when the distance reaches the threshold.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .model import LikelihoodModel

__all__ = [
    "initial_belief",
    "bayes_update",
    "tv_distance",
    "InformativenessVerdict",
    "is_informative",
    "binary_tv",
    "binary_informative",
    "potential_update",
    "belief_from_potentials",
]


def _logsumexp(rows: np.ndarray) -> np.ndarray:
    """Row-wise logsumexp with the usual max shift."""
    rows = np.atleast_2d(rows)
    peak = np.max(rows, axis=1, keepdims=True)
    peak = np.where(np.isfinite(peak), peak, 0.0)
    return (peak + np.log(np.sum(np.exp(rows - peak), axis=1, keepdims=True)))[:, 0]


def _log_normalize(rows: np.ndarray) -> np.ndarray:
    rows = np.atleast_2d(rows)
    return rows - _logsumexp(rows)[:, None]


def _tv_rows(log_p: np.ndarray, log_q: np.ndarray) -> np.ndarray:
    """Row-wise total variation between log-domain distributions.

    Written as 0.5 * sum q * |expm1(log p - log q)|. Where q has a
    zero, the term falls back to p, which is exact there. Accuracy is
    absolute (floored near machine epsilon by the log values' own
    rounding); belief-vs-own-posterior distances, which must keep
    relative accuracy far below that floor, go through
    ``_bayes_tv_rows`` instead.
    """
    log_p = np.atleast_2d(log_p)
    log_q = np.atleast_2d(log_q)
    with np.errstate(invalid="ignore"):
        terms = np.exp(log_q) * np.abs(np.expm1(log_p - log_q))
    dead = np.isneginf(log_q)
    if np.any(dead):
        terms = np.where(dead, np.exp(log_p), terms)
    return np.clip(0.5 * np.sum(terms, axis=1), 0.0, 1.0)


def _bayes_tv_rows(log_mu: np.ndarray, log_l: np.ndarray) -> np.ndarray:
    """Total variation from each belief row to its one-step posterior.

    The posterior never materializes: normalizing it would bury a tiny
    move under the normalizer's machine-epsilon noise, and thresholds
    sit far below that (1e-17 by default). Instead, with mu the belief
    and l the observed signal's likelihood column,

        tv = 0.5 * sum_k mu_k |sum_j mu_j (l_k - l_j)| / sum_j mu_j l_j,

    where likelihood values of observationally equivalent states cancel
    exactly, so the result keeps relative accuracy down to the underflow
    limit. Rows where the denominator vanishes (the signal is impossible
    under every supported state) are rejected.
    """
    mu = np.exp(log_mu)
    lvec = np.exp(log_l)
    total = np.sum(mu * lvec, axis=-1)
    if np.any(total == 0.0):
        raise ValueError(
            "signal has zero probability under every state its agent's "
            "belief supports"
        )
    diff = lvec[..., :, None] - lvec[..., None, :]
    skew = np.einsum("...kj,...j->...k", diff, mu)
    tv = 0.5 * np.sum(mu * np.abs(skew), axis=-1) / total
    return np.clip(tv, 0.0, 1.0)


def initial_belief(prior, lik: LikelihoodModel, agent: int, signal) -> np.ndarray:
    """Round-0 log belief: the prior conditioned on the first signal."""
    return bayes_update(prior.log_mass, lik, agent, signal)


def bayes_update(
    log_belief_row: np.ndarray, lik: LikelihoodModel, agent: int, signal
) -> np.ndarray:
    """One-step Bayesian posterior of a single agent's belief row.

    ``signal`` is an alphabet symbol, not a table row index.
    """
    s = lik.symbol_index(agent, signal)
    row = np.asarray(log_belief_row, dtype=float) + lik.log_lik[agent][s]
    if np.all(np.isneginf(row)):
        raise ValueError(
            f"agent {agent}: signal {signal!r} has zero probability under "
            "every state the belief supports"
        )
    return _log_normalize(row)[0]


def tv_distance(log_p: np.ndarray, log_q: np.ndarray) -> float:
    """Total variation between two log-domain distributions."""
    return float(_tv_rows(np.asarray(log_p, float), np.asarray(log_q, float))[0])


@dataclass(frozen=True)
class InformativenessVerdict:
    """Outcome of one agent's informativeness test in one round."""

    agent: int
    tv: float
    informative: bool
    threshold: float

    def __post_init__(self):
        if not 0.0 <= self.tv <= 1.0:
            raise ValueError(f"tv {self.tv!r} outside [0, 1]")
        if not 0.0 < self.threshold <= 1.0:
            raise ValueError(f"threshold {self.threshold!r} outside (0, 1]")
        if self.informative != (self.tv >= self.threshold):
            raise ValueError("verdict disagrees with its own tv and threshold")


def is_informative(
    belief_prev: np.ndarray,
    lik: LikelihoodModel,
    agent: int,
    signal,
    tau: float,
) -> InformativenessVerdict:
    """Test whether a fresh signal moves one agent's belief enough to matter.

    The move is measured as total variation from the current belief row
    to its one-step Bayesian posterior; ties count as informative.
    """
    if not 0.0 < tau <= 1.0:
        raise ValueError(f"threshold must lie in (0, 1], got {tau!r}")
    prev = np.asarray(belief_prev, dtype=float)
    s = lik.symbol_index(agent, signal)
    tv = float(_bayes_tv_rows(prev[None, :], lik.log_lik[agent][s][None, :])[0])
    return InformativenessVerdict(
        agent=agent, tv=tv, informative=tv >= tau, threshold=tau
    )


def binary_tv(epsilon_prev: float, r: float) -> float:
    """Closed-form belief move for a binary state space.

    ``epsilon_prev`` is the current mass on the second state and ``r``
    the likelihood ratio (first state over second) of the new signal.
    """
    if not 0.0 < epsilon_prev < 1.0:
        raise ValueError("epsilon_prev must lie strictly inside (0, 1)")
    if r < 0.0:
        raise ValueError("likelihood ratio must be nonnegative")
    e = epsilon_prev
    return e * (1.0 - e) * abs(r - 1.0) / ((1.0 - e) * r + e)


def binary_informative(epsilon_prev: float, r: float, tau: float) -> bool:
    """Closed-form informativeness verdict for a binary state space.

    Matches the total-variation test branch by branch: a ratio r >= 1
    is informative iff epsilon_prev exceeds tau and r clears a threshold
    that is always >= 1, and symmetrically for r < 1. Ties informative.
    """
    if not 0.0 < epsilon_prev < 1.0:
        raise ValueError("epsilon_prev must lie strictly inside (0, 1)")
    if r < 0.0:
        raise ValueError("likelihood ratio must be nonnegative")
    if not 0.0 < tau <= 1.0:
        raise ValueError(f"threshold must lie in (0, 1], got {tau!r}")
    e = epsilon_prev
    if r >= 1.0:
        if e <= tau:
            return False
        return r >= (tau * e + e * (1.0 - e)) / (e * (1.0 - e) - tau * (1.0 - e))
    if 1.0 - e <= tau:
        return False
    return r <= (e * (1.0 - e) - tau * e) / (e * (1.0 - e) + tau * (1.0 - e))


def potential_update(
    potentials_prev: np.ndarray,
    q,
    lik: LikelihoodModel,
    signals: np.ndarray,
) -> np.ndarray:
    """One round of the potential recursion for all agents.

    New potentials are the network-mixed previous potentials plus each
    agent's fresh log-likelihood row. ``q`` is a mixing matrix or any
    object exposing one as ``.q``; ``signals`` are alphabet row indices,
    one per agent.
    """
    phi = np.asarray(potentials_prev, dtype=float)
    mix = np.asarray(getattr(q, "q", q), dtype=float)
    n, m = phi.shape
    if mix.shape != (n, n):
        raise ValueError(f"mixing matrix must be {n}x{n}, got {mix.shape}")
    if (
        np.max(np.abs(np.sum(mix, axis=1) - 1.0)) > 1e-12
        or np.max(np.abs(np.sum(mix, axis=0) - 1.0)) > 1e-12
        or np.any(mix < 0.0)
    ):
        raise ValueError("mixing matrix must be doubly stochastic")
    sig = np.asarray(signals)
    if sig.shape != (n,):
        raise ValueError(f"need one signal index per agent, got shape {sig.shape}")
    fresh = lik.padded_log_lik[np.arange(n), sig, :]
    if not np.all(np.isfinite(fresh)):
        bad = int(np.nonzero(~np.all(np.isfinite(fresh), axis=1))[0][0])
        raise ValueError(
            f"agent {bad}: signal index {int(sig[bad])} hits a zero-probability "
            "or padded table row"
        )
    return mix @ phi + fresh


def belief_from_potentials(log_mu0: np.ndarray, potentials: np.ndarray) -> np.ndarray:
    """Normalized log beliefs from round-0 beliefs and current potentials."""
    log_mu0 = np.asarray(log_mu0, dtype=float)
    phi = np.asarray(potentials, dtype=float)
    if log_mu0.shape != phi.shape:
        raise ValueError("anchor beliefs and potentials must share a shape")
    return _log_normalize(log_mu0 + phi)
