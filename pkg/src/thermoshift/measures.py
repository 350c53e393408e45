"""Stationary Markov measures on a shift and their information theory.

All measures here are order-1 Markov: a stationary vector pi together with a
transition kernel p supported on admissible edges.  Entropies, KL divergences
and information functions are then finite exact sums.  Natural logarithms
throughout, with the convention 0 log 0 = 0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components
from scipy.special import rel_entr

from .potential import LocallyConstantFunction
from .shift import TransitionMatrix, enumerate_words

STATIONARY_TOL = 1e-12


def _shannon(weights) -> float:
    w = np.asarray(weights, dtype=float)
    mask = w > 0.0
    return float(-np.sum(w[mask] * np.log(w[mask])))


@dataclass(frozen=True, eq=False)
class MarkovMeasure:
    """A shift-invariant Markov probability: stationary pi plus kernel p."""

    base: TransitionMatrix
    kernel: np.ndarray
    initial: np.ndarray

    def __post_init__(self):
        n = self.base.n
        p = np.array(self.kernel, dtype=float)
        pi = np.array(self.initial, dtype=float)
        if p.shape != (n, n) or pi.shape != (n,):
            raise ValueError("kernel or stationary vector has the wrong shape")
        if np.any(p < 0.0) or np.any(pi < 0.0):
            raise ValueError("negative probabilities")
        if np.any((p > 0.0) & (self.base.matrix == 0)):
            raise ValueError("kernel puts mass on a forbidden transition")
        rows = p.sum(axis=1)
        live = pi > 0.0
        if np.any(np.abs(rows[live] - 1.0) > STATIONARY_TOL):
            raise ValueError("kernel rows on the support do not sum to 1")
        # rows at states of measure zero may be stochastic or identically zero
        dead = ~live
        bad = dead & (np.abs(rows - 1.0) > STATIONARY_TOL) & (rows != 0.0)
        if np.any(bad):
            raise ValueError("off-support kernel rows must be stochastic or zero")
        if abs(pi.sum() - 1.0) > 1e-10:
            raise ValueError("stationary vector does not sum to 1")
        if np.max(np.abs(pi @ p - pi)) > 1e-10:
            raise ValueError("vector is not stationary for the kernel")
        p.setflags(write=False)
        pi.setflags(write=False)
        object.__setattr__(self, "kernel", p)
        object.__setattr__(self, "initial", pi)

    @property
    def support(self):
        return tuple(np.flatnonzero(self.initial > 0.0).tolist())

    def word_probability(self, word) -> float:
        word = tuple(word)
        if not self.base.is_word(word):
            raise ValueError("inadmissible word")
        p = self.initial[word[0]]
        for i, j in zip(word, word[1:]):
            if p == 0.0:
                return 0.0
            p *= self.kernel[i, j]
        return float(p)


def _recurrent_classes(adjacency: np.ndarray):
    """Strongly connected components with no outgoing edge, as index lists."""
    ncomp, comp = connected_components(csr_matrix(adjacency), connection="strong")
    closed = []
    for c in range(ncomp):
        members = np.flatnonzero(comp == c)
        outside = adjacency[np.ix_(members, np.flatnonzero(comp != c))]
        if outside.size == 0 or not np.any(outside):
            closed.append(members.tolist())
    return closed


def make_markov_measure(shift: TransitionMatrix, kernel) -> MarkovMeasure:
    """Stationary Markov measure of a stochastic kernel on the shift.

    The kernel must have a single recurrent class; transient states get
    stationary mass zero.  Two or more recurrent classes leave the stationary
    vector ambiguous and raise an error naming them.
    """
    p = np.asarray(kernel, dtype=float)
    if p.shape != (shift.n, shift.n):
        raise ValueError(f"kernel must be {shift.n}x{shift.n}")
    if np.any(p < 0.0):
        raise ValueError("kernel has negative entries")
    if np.any((p > 0.0) & (shift.matrix == 0)):
        raise ValueError("kernel puts mass on a forbidden transition")
    rows = p.sum(axis=1)
    if np.any(np.abs(rows - 1.0) > 1e-9):
        raise ValueError("kernel rows must sum to 1")
    p = p / rows[:, None]

    classes = _recurrent_classes(p > 0.0)
    if len(classes) != 1:
        names = [", ".join(shift.states[i] for i in cls) for cls in classes]
        raise ValueError(
            "kernel has %d recurrent classes ({%s}); stationary vector is ambiguous"
            % (len(classes), "}, {".join(names))
        )
    members = classes[0]
    sub = p[np.ix_(members, members)]
    # pi restricted to the class: solve pi (P - I) = 0 with sum(pi) = 1
    k = len(members)
    lhs = (sub - np.eye(k)).T
    lhs[-1, :] = 1.0
    rhs = np.zeros(k)
    rhs[-1] = 1.0
    sol = np.linalg.solve(lhs, rhs)
    sol = np.maximum(sol, 0.0)
    sol /= sol.sum()
    pi = np.zeros(shift.n)
    pi[members] = sol
    return MarkovMeasure(base=shift, kernel=p, initial=pi)


def point_mass(shift: TransitionMatrix, state) -> MarkovMeasure:
    """The invariant measure sitting on the fixed point of a self-looping state.

    Other states are routed deterministically toward that state along shortest
    admissible paths, so the kernel is stochastic everywhere but only the loop
    carries mass.
    """
    a = shift.index(state) if not isinstance(state, (int, np.integer)) else int(state)
    if not shift.matrix[a, a]:
        raise ValueError(f"state {shift.states[a]!r} has no self-loop")
    # next_step[i] = first move of a shortest path i -> a
    next_step = {a: a}
    frontier = [a]
    while frontier:
        new = []
        for v in frontier:
            for u in range(shift.n):
                if shift.matrix[u, v] and u not in next_step:
                    next_step[u] = v
                    new.append(u)
        frontier = new
    if len(next_step) < shift.n:
        stranded = [shift.states[i] for i in range(shift.n) if i not in next_step]
        raise ValueError(f"states {stranded} cannot reach {shift.states[a]!r}")
    p = np.zeros((shift.n, shift.n))
    for i, j in next_step.items():
        p[i, j] = 1.0
    pi = np.zeros(shift.n)
    pi[a] = 1.0
    return MarkovMeasure(base=shift, kernel=p, initial=pi)


def random_markov_measure(shift: TransitionMatrix, rng, alpha: float = 1.0) -> MarkovMeasure:
    """Kernel with Dirichlet(alpha,...,alpha) rows over each state's successors."""
    p = np.zeros((shift.n, shift.n))
    for i in range(shift.n):
        succ = shift.successors(i)
        p[i, succ] = rng.dirichlet([alpha] * len(succ))
    return make_markov_measure(shift, p)


def entropy_rate(mu: MarkovMeasure) -> float:
    """Entropy per symbol, -sum_i pi_i sum_j p_ij log p_ij."""
    p = mu.kernel
    mask = p > 0.0
    plogp = np.zeros_like(p)
    plogp[mask] = p[mask] * np.log(p[mask])
    return float(-mu.initial @ plogp.sum(axis=1))


def integrate(mu: MarkovMeasure, f: LocallyConstantFunction) -> float:
    """Expectation of a finite-range function, as an exact cylinder sum."""
    if not f.base.same_shift(mu.base):
        raise ValueError("function and measure live on different shifts")
    if f.depth == 1:
        return float(sum(mu.initial[i] * f.table[(i,)] for i in range(mu.base.n)))
    total = 0.0
    for w in enumerate_words(mu.base, f.depth):
        pw = mu.word_probability(w)
        if pw > 0.0:
            total += pw * f.table[w]
    return float(total)


def metric_pressure(mu: MarkovMeasure, phi: LocallyConstantFunction) -> float:
    return entropy_rate(mu) + integrate(mu, phi)


def block_entropy(mu: MarkovMeasure, n: int) -> float:
    """Entropy of the partition into length-n cylinders.

    Runs a dynamic program over (mass, mass*log mass) totals per final state,
    then cross-checks against the closed form H(pi) + (n-1)h before returning.
    """
    if n < 1:
        raise ValueError("block length must be at least 1")
    pi, p = mu.initial, mu.kernel
    logp = np.where(p > 0.0, np.log(np.where(p > 0.0, p, 1.0)), 0.0)
    mass = pi.copy()
    slog = np.where(pi > 0.0, pi * np.log(np.where(pi > 0.0, pi, 1.0)), 0.0)
    for _ in range(n - 1):
        slog = slog @ p + mass @ (p * logp)
        mass = mass @ p
    value = float(-slog.sum())
    closed = _shannon(pi) + (n - 1) * entropy_rate(mu)
    if abs(value - closed) > 1e-10:
        raise RuntimeError(
            f"block entropy DP ({value}) disagrees with chain rule ({closed})"
        )
    return value


def reverse_kernel(mu: MarkovMeasure) -> np.ndarray:
    """Time-reversed kernel q, with q[j, i] = P(previous = i | current = j).

    Rows at states of stationary mass zero are left identically zero.
    """
    pi, p = mu.initial, mu.kernel
    q = np.zeros_like(p)
    for j in np.flatnonzero(pi > 0.0):
        q[j, :] = pi * p[:, j] / pi[j]
    return q


def conditional_entropy(mu: MarkovMeasure, n: int) -> float:
    """Entropy of the present symbol given the next n-1 symbols.

    For n = 1 the conditioning is trivial and this is the entropy of pi; for
    an order-1 Markov measure and any n >= 2 it equals the entropy rate, and
    is computed here from the reversed kernel.
    """
    if n < 1:
        raise ValueError("n must be at least 1")
    if n == 1:
        return _shannon(mu.initial)
    q = reverse_kernel(mu)
    mask = q > 0.0
    qlogq = np.zeros_like(q)
    qlogq[mask] = q[mask] * np.log(q[mask])
    return float(-mu.initial @ qlogq.sum(axis=1))


def information_function(mu: MarkovMeasure) -> LocallyConstantFunction:
    """Minus log of the reversed transition probability, as a range-2 table.

    Admissible pairs the measure never visits get value +inf; integrating
    against the measure itself ignores them and recovers the entropy rate.
    """
    q = reverse_kernel(mu)
    table = {}
    for i in range(mu.base.n):
        for j in mu.base.successors(i):
            table[(i, j)] = -math.log(q[j, i]) if q[j, i] > 0.0 else math.inf
    return LocallyConstantFunction(base=mu.base, depth=2, table=table)


def kl_divergence(p, q) -> float:
    """Divergence of q from the reference p: sum_i q_i log(q_i / p_i).

    Returns +inf when q charges a point p does not; this is deliberately a
    value rather than an error, so harnesses can report a vacuous bound.
    """
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    if p.shape != q.shape:
        raise ValueError("length mismatch")
    if np.any(p < 0.0) or np.any(q < 0.0):
        raise ValueError("negative entries")
    if abs(p.sum() - 1.0) > 1e-9 or abs(q.sum() - 1.0) > 1e-9:
        raise ValueError("arguments must be probability vectors")
    total = float(rel_entr(q, p).sum())
    if -1e-12 < total < 0.0:
        total = 0.0
    return total


def pinsker_gap(p, q):
    """The pair (l1 distance, sqrt(2 KL)); the first never exceeds the second."""
    l1 = float(np.abs(np.asarray(q, dtype=float) - np.asarray(p, dtype=float)).sum())
    return l1, math.sqrt(2.0 * kl_divergence(p, q))


def conditional_kl_integral(gibbs_measure: MarkovMeasure, mu: MarkovMeasure) -> float:
    """Average KL divergence between the two reversed kernels, row by row.

    Integrates D(q_mu(.|j) || q_gibbs(.|j)) over j with respect to mu's
    stationary vector.  For an order-1 Markov mu this equals the pressure of
    the Gibbs measure minus the metric pressure of mu, exactly.
    """
    if not gibbs_measure.base.same_shift(mu.base):
        raise ValueError("measures live on different shifts")
    qg = reverse_kernel(gibbs_measure)
    qm = reverse_kernel(mu)
    total = 0.0
    for j in np.flatnonzero(mu.initial > 0.0):
        if gibbs_measure.initial[j] == 0.0:
            return math.inf
        term = kl_divergence(qg[j], qm[j])
        if math.isinf(term):
            return math.inf
        total += mu.initial[j] * term
    return float(total)
