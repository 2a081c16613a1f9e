"""Markov model of alert-zone evolution over the power-set state space.

State i is the membership bitmask itself: bit j set means cell j is
alerted, so state 0 is the empty zone and state 2^n - 1 the full grid.
This matches the recursive state-space construction in which the states
for n+1 cells are those for n cells followed by the same states with the
new cell added.

Transitions connect states whose memberships differ by exactly one cell,
except the full state, which wraps deterministically to the empty one.
The spatially independent chain weighs a flip of cell v by p(v); the
spatially dependent chain divides by the distance between v and the
centroid of the current zone, so nearby cells are likelier to join or
leave.  Rows are normalized to keep the chain Markovian; damping mixes in
a uniform jump, PageRank style, to force aperiodicity.

The stationary distribution comes from power iteration (which doubles as
the marginal distribution of the chain after m steps) or from chained
Monte Carlo walks: walk r+1 starts where walk r ended, so the sequence of
walk end states is itself an ergodic chain with the same stationary
vector, and end-state frequencies converge to it as the walk count grows.
Restarting every walk at the empty state instead would estimate a
geometrically weighted average of short-horizon distributions, which does
not converge to the stationary vector no matter how many walks are run.
"""

from __future__ import annotations

import bisect
import math
import random
from dataclasses import dataclass
from typing import IO, List, Optional, Sequence, Tuple

import numpy as np
from scipy import sparse

from .grid import Grid

EXACT_CELL_CAP = 20
ROW_SUM_TOL = 1e-12
RESIDUAL_TOL = 1e-9
DISTANCE_FLOOR = 1e-6


class ConvergenceError(RuntimeError):
    """Power iteration failed to settle; damp the chain and retry."""


@dataclass(frozen=True)
class StateSpace:
    """Power set of n cells indexed by membership bitmask."""

    n: int

    @property
    def size(self) -> int:
        return 1 << self.n

    def members(self, state: int) -> Tuple[int, ...]:
        return tuple(j for j in range(self.n) if state >> j & 1)

    def cardinality(self, state: int) -> int:
        return int(state).bit_count()

    def index_of(self, cells: Sequence[int]) -> int:
        state = 0
        for j in cells:
            state |= 1 << j
        return state


class TransitionMatrix:
    """Row-stochastic transition structure, optionally damped.

    The undamped rows are sparse (at most n non-zeros each, plus the wrap
    row); damping is kept implicit as `alpha`, so products and sampling
    never materialize the dense uniform component.
    """

    def __init__(self, n: int, base: sparse.csr_matrix, alpha: float = 1.0):
        self.n = n
        self.base = base
        self.alpha = alpha
        sums = np.asarray(base.sum(axis=1)).ravel()
        if np.abs(sums - 1.0).max() > ROW_SUM_TOL:
            raise ValueError("rows must sum to 1")

    @property
    def states(self) -> int:
        return self.base.shape[0]

    @property
    def damped(self) -> bool:
        return self.alpha < 1.0

    def propagate(self, dist: np.ndarray) -> np.ndarray:
        """One step of the chain: dist @ Q."""
        out = np.asarray(dist @ self.base).ravel()
        if self.damped:
            out = self.alpha * out + (1.0 - self.alpha) * dist.sum() / self.states
        return out

    def entry(self, i: int, j: int) -> float:
        value = self.alpha * self.base[i, j]
        if self.damped:
            value += (1.0 - self.alpha) / self.states
        return float(value)

    def to_dense(self) -> np.ndarray:
        dense = self.alpha * self.base.toarray()
        if self.damped:
            dense += (1.0 - self.alpha) / self.states
        return dense

    def row_sums(self) -> np.ndarray:
        full = np.asarray(self.base.sum(axis=1)).ravel()
        return self.alpha * full + (1.0 - self.alpha) if self.damped else full

    def base_row(self, i: int) -> Tuple[np.ndarray, np.ndarray]:
        """Column indices and probabilities of the undamped row i."""
        start, end = self.base.indptr[i], self.base.indptr[i + 1]
        return self.base.indices[start:end], self.base.data[start:end]


@dataclass(frozen=True)
class StationaryDistribution:
    probs: np.ndarray
    method: str                   # "power-iteration" | "monte-carlo"
    samples: Optional[int] = None

    def __post_init__(self):
        if self.probs.min() < 0:
            raise ValueError("negative state probability")


def _check_cap(n: int, cap: int) -> None:
    if n > cap:
        raise ValueError(f"exact model capped at {cap} cells, got {n}"
                         " (use the lazily expanded chains beyond that)")


def _assemble(n: int, rows: List[List[Tuple[int, float]]]) -> TransitionMatrix:
    indptr = [0]
    indices: List[int] = []
    data: List[float] = []
    for row in rows:
        for j, w in sorted(row):
            indices.append(j)
            data.append(w)
        indptr.append(len(indices))
    size = 1 << n
    base = sparse.csr_matrix(
        (np.array(data), np.array(indices), np.array(indptr)),
        shape=(size, size))
    return TransitionMatrix(n, base)


def build_q_independent(grid: Grid, cap: int = EXACT_CELL_CAP) -> TransitionMatrix:
    """Spatially independent chain: a flip of cell v has weight p(v).

    Raw weights of a row need not sum to one for n >= 3, so each row is
    normalized by its sum; with two cells of complementary probability the
    normalization is a no-op and the textbook 4x4 matrix falls out.
    """
    n = grid.n
    _check_cap(n, cap)
    probs = grid.probabilities()
    total = sum(probs)
    if total <= 0.0:
        raise ValueError("at least one cell probability must be positive")
    size = 1 << n
    rows: List[List[Tuple[int, float]]] = []
    for state in range(size - 1):
        row = [(state ^ (1 << j), probs[j] / total) for j in range(n)]
        rows.append([(j, w) for j, w in row if w > 0.0])
    rows.append([(0, 1.0)])
    return _assemble(n, rows)


def build_q_independent_recursive(grid: Grid) -> TransitionMatrix:
    """Block-recursive construction of the same chain, for cross-checking:
    doubling the cell set places the previous weight block on the diagonal
    and p(new cell) times the identity off it."""
    n = grid.n
    _check_cap(n, 12)
    probs = grid.probabilities()
    w = np.array([[0.0, probs[0]], [probs[0], 0.0]])
    for m in range(1, n):
        eye = probs[m] * np.eye(w.shape[0])
        w = np.block([[w, eye], [eye, w]])
    w[-1, :] = 0.0
    w[-1, 0] = 1.0
    sums = w.sum(axis=1)
    w = w / sums[:, None]
    return TransitionMatrix(n, sparse.csr_matrix(w))


def build_q_spatial(grid: Grid, cap: int = EXACT_CELL_CAP,
                    distance_floor: float = DISTANCE_FLOOR) -> TransitionMatrix:
    """Spatially dependent chain: a flip of cell v from state S has weight
    p(v) / d(v, centroid(S)), distances floored to avoid blowups.

    A single-cell zone keeps its removal weight at plain p(v); the empty
    zone has no centroid, so additions from it use plain p(v) as well.
    """
    n = grid.n
    _check_cap(n, cap)
    probs = grid.probabilities()
    centers = grid.centers()
    size = 1 << n
    rows: List[List[Tuple[int, float]]] = []
    for state in range(size - 1):
        members = [j for j in range(n) if state >> j & 1]
        weights: List[Tuple[int, float]] = []
        if not members:
            for j in range(n):
                weights.append((state ^ (1 << j), probs[j]))
        else:
            cx = sum(centers[j][0] for j in members) / len(members)
            cy = sum(centers[j][1] for j in members) / len(members)
            for j in range(n):
                if len(members) == 1 and members[0] == j:
                    w = probs[j]  # removal of a lone cell: distance is degenerate
                else:
                    d = math.hypot(centers[j][0] - cx, centers[j][1] - cy)
                    w = probs[j] / max(d, distance_floor)
                weights.append((state ^ (1 << j), w))
        total = sum(w for _, w in weights)
        if total <= 0.0:
            raise ValueError(f"state {state} has no outgoing weight")
        rows.append([(j, w / total) for j, w in weights if w > 0.0])
    rows.append([(0, 1.0)])
    return _assemble(n, rows)


def damp(q: TransitionMatrix, alpha: float) -> TransitionMatrix:
    """PageRank-style mix: alpha * Q + (1 - alpha) * J / 2^n."""
    if not 0.0 < alpha < 1.0:
        raise ValueError("alpha must lie strictly between 0 and 1")
    if q.damped:
        raise ValueError("chain is already damped")
    return TransitionMatrix(q.n, q.base, alpha=alpha)


def stationary_exact(q: TransitionMatrix,
                     tol: float = 1e-13,
                     max_iter: int = 200_000) -> StationaryDistribution:
    """Left eigenvector for eigenvalue 1 by power iteration from uniform.

    Raises ConvergenceError when the iteration cap is hit with a residual
    above tolerance, which signals a periodic undamped chain.
    """
    s = np.full(q.states, 1.0 / q.states)
    for _ in range(max_iter):
        nxt = q.propagate(s)
        delta = np.abs(nxt - s).max()
        s = nxt
        if delta < tol:
            break
    s = s / s.sum()
    residual = np.abs(q.propagate(s) - s).max()
    if residual > RESIDUAL_TOL:
        raise ConvergenceError(
            f"power iteration residual {residual:.2e}; damp the chain first")
    return StationaryDistribution(probs=s, method="power-iteration")


def evolve(q: TransitionMatrix, start: np.ndarray, steps: int) -> np.ndarray:
    """Marginal distribution after `steps` transitions: start @ Q^steps."""
    dist = np.asarray(start, dtype=float)
    for _ in range(steps):
        dist = q.propagate(dist)
    return dist


def stationary_monte_carlo(q: TransitionMatrix,
                           walks: int,
                           continue_prob: float,
                           rng_seed: int) -> StationaryDistribution:
    """Estimate the stationary vector from end states of chained walks.

    The first walk starts at the empty state; each subsequent walk starts
    where the previous one ended.  Every step first draws the termination
    coin (probability 1 - continue_prob), so a walk may end where it
    began; the estimate is the fraction of walks ending in each state.
    """
    if walks < 1:
        raise ValueError("walk count must be >= 1")
    if not 0.0 < continue_prob < 1.0:
        raise ValueError("continue probability must lie in (0, 1)")
    rng = random.Random(rng_seed)
    size = q.states
    cumulative: List[Tuple[List[float], List[int]]] = []
    for i in range(size):
        cols, probs = q.base_row(i)
        acc: List[float] = []
        running = 0.0
        for p in probs:
            running += p
            acc.append(running)
        cumulative.append((acc, [int(c) for c in cols]))
    counts = np.zeros(size)
    state = 0
    jump = 1.0 - q.alpha
    for _ in range(walks):
        while rng.random() < continue_prob:
            if jump > 0.0 and rng.random() < jump:
                state = rng.randrange(size)
                continue
            acc, cols = cumulative[state]
            idx = bisect.bisect_left(acc, rng.random())
            state = cols[min(idx, len(cols) - 1)]
        counts[state] += 1
    return StationaryDistribution(probs=counts / walks, method="monte-carlo",
                                  samples=walks)


def cell_marginals(s: StationaryDistribution, space: StateSpace) -> np.ndarray:
    """Per-cell alert probability: total stationary mass of the states
    containing the cell."""
    if len(s.probs) != space.size:
        raise ValueError("distribution length does not match state space")
    states = np.arange(space.size)
    return np.array([
        s.probs[(states >> j) & 1 == 1].sum() for j in range(space.n)
    ])


class UniformChain:
    """Lazily expanded chain with uniform outgoing rows, usable far beyond
    the exact-model cap: every state (bar the full one) flips a uniformly
    random cell; the full state wraps to empty."""

    def __init__(self, n: int):
        self.n = n
        self.full = (1 << n) - 1

    def step(self, state: int, rng: random.Random) -> int:
        if state == self.full:
            return 0
        return state ^ (1 << rng.randrange(self.n))

    def walk_end(self, start: int, continue_prob: float, rng: random.Random,
                 alpha: float = 1.0) -> int:
        """End state of one geometric walk; with probability 1 - alpha a
        step jumps to a uniformly random state instead of flipping."""
        state = start
        while rng.random() < continue_prob:
            if alpha < 1.0 and rng.random() >= alpha:
                state = rng.getrandbits(self.n)
            else:
                state = self.step(state, rng)
        return state


def dump_distribution(fp: IO[str], s: StationaryDistribution) -> None:
    """Text lines: state bitmask, TAB, probability."""
    for state, prob in enumerate(s.probs):
        fp.write(f"{state}\t{prob:.12g}\n")


def dump_marginals(fp: IO[str], marginals: Sequence[float]) -> None:
    """Text lines: cell id, TAB, probability."""
    for cell, prob in enumerate(marginals):
        fp.write(f"{cell}\t{prob:.12g}\n")
