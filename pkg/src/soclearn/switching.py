"""Round-by-round mixing matrices and the communication ledger.

The protocol communicates selectively: a network edge carries weight in
a given round only when at least one endpoint found its own signal
uninformative. Everyone else leans on their own accumulated potential,
which the diagonal absorbs. The ledger records which edges actually
fired so a run's communication cost can be audited afterwards.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from .model import PROB_SUM_TOL, Network

__all__ = [
    "SwitchingMatrix",
    "build_switching_matrix",
    "CommLedger",
    "record_round",
]


@dataclass(frozen=True)
class SwitchingMatrix:
    """Mixing matrix used in one specific round.

    Always symmetric and doubly stochastic with positive diagonal, like
    the underlying network weights; off-diagonal support is the subset
    of edges that fired this round.
    """

    q: np.ndarray
    uninformative_set: frozenset
    round: int

    def __post_init__(self):
        mat = np.array(self.q, dtype=float)
        if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
            raise ValueError("mixing matrix must be square")
        n = mat.shape[0]
        if np.max(np.abs(mat - mat.T), initial=0.0) > PROB_SUM_TOL:
            raise ValueError("mixing matrix must be symmetric")
        if np.any(mat < 0.0):
            raise ValueError("mixing matrix entries must be nonnegative")
        if (
            np.max(np.abs(np.sum(mat, axis=1) - 1.0)) > PROB_SUM_TOL
            or np.max(np.abs(np.sum(mat, axis=0) - 1.0)) > PROB_SUM_TOL
        ):
            raise ValueError("mixing matrix must be doubly stochastic")
        if np.any(np.diag(mat) <= 0.0):
            raise ValueError("mixing matrix diagonal must stay positive")
        members = frozenset(int(i) for i in self.uninformative_set)
        if members and (min(members) < 0 or max(members) >= n):
            raise ValueError("uninformative set contains out-of-range agents")
        if self.round < 0:
            raise ValueError("round must be nonnegative")
        mat.setflags(write=False)
        object.__setattr__(self, "q", mat)
        object.__setattr__(self, "uninformative_set", members)

    @property
    def n(self) -> int:
        return self.q.shape[0]

    def offdiagonal_support(self) -> frozenset:
        """Unordered pairs that exchanged potentials this round."""
        rows, cols = np.nonzero(self.q > 0.0)
        return frozenset((int(i), int(j)) for i, j in zip(rows, cols) if i < j)


def build_switching_matrix(
    net: Network, uninformative, round: int
) -> SwitchingMatrix:
    """Mixing matrix for one round given who found their signal weak.

    An edge carries its network weight iff either endpoint is in the
    uninformative set; the diagonal absorbs whatever each row sheds.
    An empty set yields the exact identity, the full set the network
    weights themselves.
    """
    members = frozenset(int(i) for i in uninformative)
    if members and (min(members) < 0 or max(members) >= net.n):
        raise ValueError("uninformative set contains out-of-range agents")
    if not members:
        q = np.eye(net.n)
    elif len(members) == net.n:
        # every edge fires; copy verbatim so the extreme case is exact
        # (the diagonal fill below only matches the weights to ~1 ulp)
        q = net.weights
    else:
        u = np.zeros(net.n, dtype=bool)
        u[list(members)] = True
        pair = u[:, None] | u[None, :]
        np.fill_diagonal(pair, False)
        q = np.where(pair, net.weights, 0.0)
        np.fill_diagonal(q, 1.0 - np.sum(q, axis=1))
    return SwitchingMatrix(q=q, uninformative_set=members, round=round)


class CommLedger:
    """Mutable record of which edges fired in which rounds.

    ``events`` holds ``(round, i, j)`` with ``i < j``, one entry per
    undirected exchange. ``per_agent_rounds`` counts, per agent, the
    rounds in which the agent touched at least one exchange.
    """

    def __init__(self, n: int):
        if n < 1:
            raise ValueError("need at least one agent")
        self.n = n
        self.events: list = []
        self.per_agent_rounds = np.zeros(n, dtype=int)
        self.rounds_recorded = 0

    def record(self, q: SwitchingMatrix) -> None:
        support = q.offdiagonal_support()
        touched = set()
        for i, j in sorted(support):
            self.events.append((q.round, i, j))
            touched.add(i)
            touched.add(j)
        for i in touched:
            self.per_agent_rounds[i] += 1
        self.rounds_recorded += 1

    def communication_fraction(self) -> np.ndarray:
        """Per-agent fraction of recorded rounds with any exchange."""
        if self.rounds_recorded == 0:
            raise ValueError("no rounds recorded")
        return self.per_agent_rounds / self.rounds_recorded

    def write_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["round", "agent_i", "agent_j"])
            writer.writerows(self.events)


def record_round(ledger: CommLedger, q: SwitchingMatrix) -> CommLedger:
    """Record one round's exchanges; returns the same ledger for chaining."""
    if q.n != ledger.n:
        raise ValueError(f"ledger covers {ledger.n} agents, matrix {q.n}")
    ledger.record(q)
    return ledger
