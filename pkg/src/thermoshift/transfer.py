"""Transfer operator for Markovian potentials: eigendata, pressure, Gibbs data.

The operator acts on one-coordinate functions v through the weighted matrix
B_ij = t_ij exp(phi(i, j)) as (Lv)_j = sum_i B_ij v_i, so h below is a left
eigenvector and nu a right one.  Everything downstream (Gibbs kernel, spectral
gap, the effective constants) is packaged in PerronData.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .measures import MarkovMeasure, reverse_kernel
from .potential import LocallyConstantFunction, recode_to_markovian
from .shift import (
    NotMixingError,
    Recoding,
    TransitionMatrix,
    enumerate_periodic,
    enumerate_words,
    is_topologically_mixing,
)

EIGEN_TOL = 1e-14
MAX_POWER_ITER = 10**6
GAP_PROBE_DEPTH = 50
# iterate norms at float-noise level say nothing about the true decay rate
NOISE_FLOOR = 1e-13


class EigensolverError(RuntimeError):
    pass


def transfer_matrix(shift: TransitionMatrix, phi: LocallyConstantFunction) -> np.ndarray:
    """Weighted adjacency B_ij = t_ij exp(phi on the edge word)."""
    if not phi.base.same_shift(shift):
        raise ValueError("potential lives on a different shift")
    if phi.depth > 2:
        raise ValueError("transfer matrix needs a potential of range at most 2")
    b = np.zeros((shift.n, shift.n))
    for i in range(shift.n):
        for j in shift.successors(i):
            w = (i,) if phi.depth == 1 else (i, j)
            b[i, j] = math.exp(phi.table[w])
    return b


def _power_pair(b: np.ndarray):
    """Dominant eigenvalue with left and right positive eigenvectors."""
    n = b.shape[0]
    v = np.full(n, 1.0 / n)
    u = np.full(n, 1.0 / n)
    for _ in range(MAX_POWER_ITER):
        bv = b @ v
        ub = u @ b
        sv, su = bv.sum(), ub.sum()
        if sv <= 0.0 or su <= 0.0:
            raise EigensolverError("iteration left the positive cone")
        v = bv / sv
        u = ub / su
        lam = float(u @ b @ v) / float(u @ v)
        rv = np.max(np.abs(b @ v - lam * v))
        ru = np.max(np.abs(u @ b - lam * u))
        if rv <= EIGEN_TOL * lam * np.max(v) and ru <= EIGEN_TOL * lam * np.max(u):
            return lam, u, v
    raise EigensolverError(
        f"power iteration did not reach tolerance {EIGEN_TOL} in {MAX_POWER_ITER} steps"
    )


def _second_modulus(b: np.ndarray, lam: float, u: np.ndarray, v: np.ndarray) -> float:
    n = b.shape[0]
    if n == 1:
        return 0.0
    if n <= 64:
        mods = np.sort(np.abs(np.linalg.eigvals(b)))
        return float(mods[-2])
    # larger systems: orthogonal iteration on the operator with the dominant
    # pair deflated out; tolerance 1e-8 is documented and plenty for a rate
    w = b - lam * np.outer(v, u) / float(u @ v)
    rng = np.random.default_rng(7)
    q = np.linalg.qr(rng.standard_normal((n, 2)))[0]
    prev = None
    for _ in range(10**5):
        q, _r = np.linalg.qr(w @ q)
        est = float(np.max(np.abs(np.linalg.eigvals(q.T @ w @ q))))
        if prev is not None and abs(est - prev) <= 1e-8 * max(1.0, est):
            return est
        prev = est
    raise EigensolverError("deflated iteration for the second eigenvalue stalled")


@dataclass(frozen=True, eq=False)
class PerronData:
    """Eigendata of a Markovian potential together with its Gibbs measure.

    kappa is the spectral contraction rate |lambda_2|/lambda, c a certified
    prefactor for the iterate norms, and a, b the constants entering the
    pressure-gap and block-entropy inequalities.  When the potential had to be
    recoded to range 2 first, `recoding` maps block states back to words.
    """

    shift: TransitionMatrix
    phi: LocallyConstantFunction
    matrix: np.ndarray
    lam: float
    pressure: float
    h: np.ndarray
    nu: np.ndarray
    pi: np.ndarray
    p: np.ndarray
    measure: MarkovMeasure
    lambda2_mod: float
    kappa: float
    c: float
    a: float
    b: float
    recoding: Recoding | None = None


def _gap_prefactor(p: np.ndarray, q: np.ndarray, pi: np.ndarray, kappa: float) -> float:
    """Smallest c >= 1 with iterate norms of both kernels below c*kappa^n.

    Norms are sup-operator norms of p^n - 1 pi (max absolute row sum), probed
    for n up to GAP_PROBE_DEPTH; values at float-noise level are skipped.
    """
    limit = np.outer(np.ones_like(pi), pi)
    c = 1.0
    for kernel in (p, q):
        power = np.eye(len(pi))
        for n in range(1, GAP_PROBE_DEPTH + 1):
            power = power @ kernel
            norm = float(np.max(np.abs(power - limit).sum(axis=1)))
            if norm <= NOISE_FLOOR:
                continue
            ratio = norm / kappa**n if kappa > 0.0 else norm
            c = max(c, ratio)
    return c


def perron_data(
    shift: TransitionMatrix,
    phi: LocallyConstantFunction,
    recoding: Recoding | None = None,
) -> PerronData:
    """Full eigendata of the transfer matrix of a range <= 2 potential.

    Normalization: h is scaled so max(h)*min(h) = 1 and nu so that the
    stationary vector pi = h*nu is a probability vector.
    """
    if not is_topologically_mixing(shift):
        raise NotMixingError("transfer operator theory here needs a mixing shift")
    b = transfer_matrix(shift, phi)
    lam, u, v = _power_pair(b)
    # scale so the geometric mean of h is 1, then sum(h * nu) = 1; every
    # published quantity is invariant under the joint rescaling anyway
    h = u / math.exp(float(np.mean(np.log(u))))
    nu = v / float(h @ v)
    pi = h * nu
    p = b * nu[None, :] / (lam * nu[:, None])
    p /= p.sum(axis=1, keepdims=True)
    measure = MarkovMeasure(base=shift, kernel=p, initial=pi)

    lambda2 = _second_modulus(b, lam, u, v)
    kappa = lambda2 / lam
    if kappa < 1e-13:
        kappa = 0.0
    c = _gap_prefactor(p, reverse_kernel(measure), pi, kappa)
    a = math.sqrt(2.0) * c / (1.0 - kappa) * float(np.max(h) * np.max(1.0 / h))
    return PerronData(
        shift=shift,
        phi=phi,
        matrix=b,
        lam=lam,
        pressure=math.log(lam),
        h=h,
        nu=nu,
        pi=pi,
        p=p,
        measure=measure,
        lambda2_mod=lambda2,
        kappa=kappa,
        c=c,
        a=a,
        b=(1.0 / math.sqrt(2.0) + math.sqrt(2.0)) * a,
        recoding=recoding,
    )


def equilibrium(phi: LocallyConstantFunction) -> PerronData:
    """PerronData of any finite-range potential, recoding to range 2 if needed."""
    if phi.depth <= 2:
        return perron_data(phi.base, phi)
    g, rec = recode_to_markovian(phi)
    return perron_data(g.base, g, recoding=rec)


def pressure(phi: LocallyConstantFunction) -> float:
    return equilibrium(phi).pressure


def normalize_zero_pressure(phi: LocallyConstantFunction) -> LocallyConstantFunction:
    """Subtract the pressure so the result has pressure zero."""
    return phi.plus_constant(-pressure(phi))


class PartitionSum(NamedTuple):
    enumeration: float
    matrix: float


def partition_sum(
    shift: TransitionMatrix,
    phi: LocallyConstantFunction,
    state,
    n: int,
    cap: int | None = None,
) -> PartitionSum:
    """Weighted count of period-n points through a state, computed two ways.

    The enumeration route sums exp(cyclic Birkhoff sum) over cyclically
    admissible n-words starting at the state; the matrix route reads the
    diagonal entry of B^n.  They must agree to 1e-10 relative.
    """
    if phi.depth > 2:
        raise ValueError("partition sums need a potential of range at most 2")
    a = shift.index(state) if not isinstance(state, (int, np.integer)) else int(state)
    kwargs = {} if cap is None else {"cap": cap}
    total = 0.0
    for w in enumerate_periodic(shift, n, **kwargs):
        if w[0] == a:
            total += math.exp(phi.birkhoff_sum(w, n, cyclic=True))
    b = transfer_matrix(shift, phi)
    mat = float(np.linalg.matrix_power(b, n)[a, a])
    if abs(total - mat) > 1e-10 * max(1.0, abs(mat)):
        raise RuntimeError(
            f"partition sum routes disagree at n={n}: {total} vs {mat}"
        )
    return PartitionSum(enumeration=total, matrix=mat)


def gurevich_estimate(
    shift: TransitionMatrix,
    phi: LocallyConstantFunction,
    state,
    n_max: int = 40,
):
    """Pressure estimates (1/n) log (B^n)_aa with their residuals from log lam.

    Rows where the diagonal entry vanishes (short return times) are skipped.
    """
    if phi.depth > 2:
        raise ValueError("needs a potential of range at most 2")
    a = shift.index(state) if not isinstance(state, (int, np.integer)) else int(state)
    b = transfer_matrix(shift, phi)
    logp = math.log(_power_pair(b)[0])
    rows = []
    power = np.eye(shift.n)
    for n in range(1, n_max + 1):
        power = power @ b
        z = float(power[a, a])
        if z <= 0.0:
            continue
        value = math.log(z) / n
        rows.append((n, value, abs(value - logp)))
    return rows


class GibbsCertificate(NamedTuple):
    empirical: float
    apriori: float
    worst_ratio: float
    worst_word: tuple


def gibbs_certificate(
    data: PerronData, n_max: int, slack_factor: float = 1.0
) -> GibbsCertificate:
    """Cylinder-mass comparison against the weight the word itself determines.

    For each word w of length n <= n_max the ratio m([w]) exp(kP - S) is
    formed, where S is the part of the Birkhoff sum determined by w alone
    (k = n summands for a range-1 potential, k = n-1 for range 2).  For
    range 2 the ratio is exactly h[first] * nu[last], so the empirical
    constant must sit inside the eigenvector window; slack_factor widens the
    window when the caller certifies a recoded potential in its original
    coordinates.
    """
    r = data.phi.depth
    shift, measure, phi, pres = data.shift, data.measure, data.phi, data.pressure
    worst = 1.0
    worst_word: tuple = ()
    lo, hi = math.inf, 0.0
    for n in range(1, n_max + 1):
        for w in enumerate_words(shift, n):
            mw = measure.word_probability(w)
            k = n if r == 1 else n - 1
            s = phi.birkhoff_sum(w, k) if k >= 1 else 0.0
            ratio = mw * math.exp(k * pres - s)
            lo, hi = min(lo, ratio), max(hi, ratio)
            if max(ratio, 1.0 / ratio) > max(worst, 1.0 / worst):
                worst, worst_word = ratio, w
    empirical = max(hi, 1.0 / lo)
    big = float(np.max(data.h) * np.max(data.nu))
    small = float(np.min(data.h) * np.min(data.nu))
    # the eigenvector window must be read symmetrically: a constant-scale
    # shift of all ratios is still Gibbs, so cover big, 1/small and big/small.
    # The worst ratio can attain the window exactly (range 2), so the
    # certified constant carries a rounding allowance for the two float
    # routes that produce the two sides.
    apriori = max(big / small, 1.0 / small, big, 1.0) * slack_factor * (1.0 + 1e-9)
    if empirical > apriori:
        raise RuntimeError(
            f"cylinder ratio {empirical} escapes the eigenvector window {apriori}"
        )
    return GibbsCertificate(
        empirical=empirical,
        apriori=apriori,
        worst_ratio=worst,
        worst_word=worst_word,
    )
