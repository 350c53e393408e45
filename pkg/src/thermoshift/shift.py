"""Subshifts of finite type over a finite alphabet.

A shift space is described by a 0/1 transition matrix over named states.
Everything downstream (potentials, transfer operators, measures) works with
words, i.e. tuples of state indices whose consecutive pairs are admissible.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components

WORD_CAP = 10_000_000


class EmptyShiftError(ValueError):
    """Raised when pruning stranded states leaves no state behind."""


class EnumerationLimitError(RuntimeError):
    """Raised before an enumeration whose estimated size exceeds the cap."""


class NotMixingError(ValueError):
    """Raised when an operation requires an irreducible aperiodic matrix."""


@dataclass(frozen=True, eq=False)
class TransitionMatrix:
    """Finite state set plus a 0/1 adjacency matrix.

    ``matrix[i, j] == 1`` means the two-letter word (i, j) is admissible.
    ``removed`` records the labels pruned away during construction because
    they had no outgoing or no incoming edge.
    """

    states: tuple
    matrix: np.ndarray
    removed: tuple = ()
    _index: dict = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=np.int8)
        if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] != len(self.states):
            raise ValueError("matrix shape does not match the state count")
        if not np.isin(m, (0, 1)).all():
            raise ValueError("transition matrix entries must be 0 or 1")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)
        object.__setattr__(self, "_index", {s: i for i, s in enumerate(self.states)})

    @property
    def n(self) -> int:
        return len(self.states)

    def index(self, label) -> int:
        try:
            return self._index[label]
        except KeyError:
            raise ValueError(f"unknown state {label!r}") from None

    def successors(self, i: int) -> list:
        return np.flatnonzero(self.matrix[i]).tolist()

    def labels(self, word) -> tuple:
        return tuple(self.states[i] for i in word)

    def is_word(self, word) -> bool:
        """True when ``word`` is a nonempty admissible index tuple."""
        if len(word) == 0:
            return False
        if any(not (0 <= i < self.n) for i in word):
            return False
        return all(self.matrix[word[k], word[k + 1]] for k in range(len(word) - 1))

    def is_cycle(self, word) -> bool:
        """True when ``word`` reads admissibly with wrap-around."""
        return self.is_word(word) and bool(self.matrix[word[-1], word[0]])

    def same_shift(self, other: "TransitionMatrix") -> bool:
        return self.states == other.states and np.array_equal(self.matrix, other.matrix)


def build_sft(states, edges, require_mixing: bool = False) -> TransitionMatrix:
    """Build a shift from state labels and admissible label pairs.

    States that cannot occur in any bi-infinite sequence (no outgoing or no
    incoming edge, iterated to a fixed point) are dropped and recorded in
    ``removed``.  An empty result raises EmptyShiftError.
    """
    states = tuple(states)
    if len(set(states)) != len(states):
        raise ValueError("duplicate state labels")
    idx = {s: i for i, s in enumerate(states)}
    m = np.zeros((len(states), len(states)), dtype=np.int8)
    for e in edges:
        a, b = e
        if a not in idx or b not in idx:
            raise ValueError(f"edge {e!r} mentions an unknown state")
        m[idx[a], idx[b]] = 1

    alive = list(range(len(states)))
    removed = []
    while alive:
        sub = m[np.ix_(alive, alive)]
        out_ok = sub.sum(axis=1) > 0
        in_ok = sub.sum(axis=0) > 0
        keep = out_ok & in_ok
        if keep.all():
            break
        removed.extend(states[alive[k]] for k in range(len(alive)) if not keep[k])
        alive = [alive[k] for k in range(len(alive)) if keep[k]]
    if not alive:
        raise EmptyShiftError(
            f"no state survives pruning; removed {tuple(states)!r}"
        )

    shift = TransitionMatrix(
        states=tuple(states[i] for i in alive),
        matrix=m[np.ix_(alive, alive)],
        removed=tuple(removed),
    )
    if require_mixing and not is_topologically_mixing(shift):
        raise NotMixingError("transition matrix is not irreducible and aperiodic")
    return shift


def is_topologically_mixing(shift: TransitionMatrix) -> bool:
    """Irreducible plus aperiodic; equivalently some power is entrywise positive."""
    m = shift.matrix
    ncomp, _ = connected_components(csr_matrix(m), directed=True, connection="strong")
    if ncomp != 1:
        return False
    # gcd of cycle lengths via BFS levels: for every edge (u, v) the value
    # d[u] + 1 - d[v] is a multiple of the period.
    dist = np.full(shift.n, -1, dtype=np.int64)
    dist[0] = 0
    queue = [0]
    g = 0
    while queue:
        u = queue.pop()
        for v in shift.successors(u):
            if dist[v] < 0:
                dist[v] = dist[u] + 1
                queue.append(v)
    for u in range(shift.n):
        for v in shift.successors(u):
            g = math.gcd(g, int(dist[u] + 1 - dist[v]))
    return g == 1


def _count_words(shift: TransitionMatrix, n: int) -> float:
    if n == 1:
        return float(shift.n)
    p = np.linalg.matrix_power(shift.matrix.astype(np.float64), n - 1)
    return float(p.sum())


def enumerate_words(shift: TransitionMatrix, n: int, cap: int = WORD_CAP) -> list:
    """All admissible words of length n, in lexicographic index order."""
    if n < 1:
        raise ValueError("word length must be at least 1")
    est = _count_words(shift, n)
    if est > cap:
        raise EnumerationLimitError(
            f"about {est:.3g} words of length {n}, cap is {cap}"
        )
    succ = [shift.successors(i) for i in range(shift.n)]
    words = [(i,) for i in range(shift.n)]
    for _ in range(n - 1):
        words = [w + (j,) for w in words for j in succ[w[-1]]]
    return words


def enumerate_periodic(shift: TransitionMatrix, k: int, cap: int = WORD_CAP) -> list:
    """All length-k words admissible with wrap-around (period-k points)."""
    if k < 1:
        raise ValueError("period must be at least 1")
    words = enumerate_words(shift, k, cap=cap)
    return [w for w in words if shift.matrix[w[-1], w[0]]]


@dataclass(frozen=True, eq=False)
class Recoding:
    """Conjugacy between a shift and its higher-block presentation.

    States of ``new`` are the admissible ``block_length``-words of ``base``;
    two blocks are adjacent when they overlap in all but one symbol and the
    combined word is admissible.
    """

    base: TransitionMatrix
    new: TransitionMatrix
    block_length: int
    blocks: tuple

    def block_index(self, block) -> int:
        return self.new.index(self._label(block))

    def _label(self, block):
        return _block_label(self.base, block)

    def encode(self, word) -> tuple:
        """Image of an admissible base word of length >= block_length."""
        b = self.block_length
        if len(word) < b:
            raise ValueError(f"need at least {b} symbols to encode")
        if not self.base.is_word(word):
            raise ValueError("inadmissible word")
        return tuple(
            self.block_index(tuple(word[i : i + b])) for i in range(len(word) - b + 1)
        )

    def decode(self, word) -> tuple:
        first = self.blocks[word[0]]
        return tuple(first) + tuple(self.blocks[s][-1] for s in word[1:])

    def encode_cycle(self, word) -> tuple:
        """Image of a cyclically admissible word, read with wrap-around."""
        if not self.base.is_cycle(word):
            raise ValueError("not a cyclically admissible word")
        k = len(word)
        b = self.block_length
        return tuple(
            self.block_index(tuple(word[(i + j) % k] for j in range(b)))
            for i in range(k)
        )

    def decode_cycle(self, word) -> tuple:
        return tuple(self.blocks[s][0] for s in word)


def _block_label(shift: TransitionMatrix, block) -> str:
    labels = shift.labels(block)
    if all(isinstance(s, str) and len(s) == 1 for s in labels):
        return "".join(labels)
    return "|".join(str(s) for s in labels)


def higher_block_recode(shift: TransitionMatrix, ell: int, cap: int = WORD_CAP) -> Recoding:
    """Recode to the shift whose states are admissible (ell - 1)-words.

    ell = 2 reproduces the original shift up to state relabelling.
    """
    if ell < 2:
        raise ValueError("block length must be at least 2")
    blocks = enumerate_words(shift, ell - 1, cap=cap)
    nb = len(blocks)
    m = np.zeros((nb, nb), dtype=np.int8)
    for u, bu in enumerate(blocks):
        for v, bv in enumerate(blocks):
            if bu[1:] == bv[:-1] and shift.matrix[bu[-1], bv[-1]]:
                m[u, v] = 1
    new = TransitionMatrix(
        states=tuple(_block_label(shift, b) for b in blocks),
        matrix=m,
    )
    return Recoding(base=shift, new=new, block_length=ell - 1, blocks=tuple(blocks))
