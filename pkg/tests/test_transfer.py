import math

import numpy as np
import pytest

from thermoshift.measures import integrate, metric_pressure
from thermoshift.potential import LocallyConstantFunction, random_function
from thermoshift.shift import NotMixingError, build_sft
from thermoshift.systems import builtin_shift, builtin_system
from thermoshift.transfer import (
    equilibrium,
    gibbs_certificate,
    gurevich_estimate,
    normalize_zero_pressure,
    partition_sum,
    perron_data,
    pressure,
    transfer_matrix,
)

GOLDEN_RATIO = (1.0 + math.sqrt(5.0)) / 2.0


def zero_data(name):
    shift = builtin_shift(name)
    return perron_data(shift, LocallyConstantFunction.zero(shift))


ALL_SYSTEMS = [
    "full2-zero",
    "full2-bernoulli",
    "golden-zero",
    "golden-range2",
    "tribonacci-zero",
]


def test_golden_pressure_closed_form():
    data = zero_data("golden-mean")
    assert data.pressure == pytest.approx(math.log(GOLDEN_RATIO), abs=1e-10)
    assert data.pi == pytest.approx(
        [GOLDEN_RATIO / math.sqrt(5.0), 1.0 - GOLDEN_RATIO / math.sqrt(5.0)], abs=1e-12
    )


def test_full2_pressure_exact():
    data = zero_data("full-2")
    assert data.pressure == pytest.approx(math.log(2.0), abs=1e-12)
    assert data.kappa == 0.0
    assert data.c == 1.0
    assert data.a == pytest.approx(math.sqrt(2.0), abs=1e-14)


def test_bernoulli_gibbs_measure():
    shift, phi = builtin_system("full2-bernoulli")
    data = perron_data(shift, phi)
    assert data.pressure == pytest.approx(0.0, abs=1e-12)
    assert data.pi == pytest.approx([0.3, 0.7], abs=1e-12)
    assert data.measure.kernel[0] == pytest.approx([0.3, 0.7], abs=1e-12)


def test_tribonacci_leading_eigenvalue():
    data = zero_data("tribonacci")
    # root of x^3 = x^2 + x + 1
    lam = data.lam
    assert lam**3 == pytest.approx(lam**2 + lam + 1.0, abs=1e-10)
    assert data.kappa == pytest.approx(0.40089056, abs=1e-6)


@pytest.mark.parametrize("name", ALL_SYSTEMS)
def test_eigen_residuals(name):
    data = perron_data(*builtin_system(name))
    b = data.matrix
    left = np.max(np.abs(data.h @ b - data.lam * data.h))
    right = np.max(np.abs(b @ data.nu - data.lam * data.nu))
    assert left <= 1e-12 * data.lam * np.max(data.h)
    assert right <= 1e-12 * data.lam * np.max(data.nu)


@pytest.mark.parametrize("name", ALL_SYSTEMS)
def test_normalization_convention(name):
    data = perron_data(*builtin_system(name))
    assert math.exp(float(np.mean(np.log(data.h)))) == pytest.approx(1.0, abs=1e-12)
    assert float(data.h @ data.nu) == pytest.approx(1.0, abs=1e-12)
    assert data.pi == pytest.approx(data.h * data.nu)


@pytest.mark.parametrize("name", ALL_SYSTEMS)
def test_gibbs_kernel_is_stationary_chain(name):
    data = perron_data(*builtin_system(name))
    p = data.p
    assert p.sum(axis=1) == pytest.approx(np.ones(data.shift.n), abs=1e-12)
    assert data.pi @ p == pytest.approx(data.pi, abs=1e-12)


@pytest.mark.parametrize("name", ALL_SYSTEMS)
def test_spectral_gap_prefactor_certifies_decay(name):
    data = perron_data(*builtin_system(name))
    pi, p, c, kappa = data.pi, data.p, data.c, data.kappa
    rng = np.random.default_rng(13)
    vectors = rng.uniform(-1.0, 1.0, size=(100, data.shift.n))
    vectors /= np.max(np.abs(vectors), axis=1, keepdims=True)
    power = np.eye(data.shift.n)
    for n in range(1, 51):
        power = power @ p
        limit = np.outer(np.ones(data.shift.n), pi)
        for v in vectors:
            dev = np.max(np.abs((power - limit) @ v))
            assert dev <= c * kappa**n + 1e-12


@pytest.mark.parametrize("name", ALL_SYSTEMS)
def test_constant_relations(name):
    data = perron_data(*builtin_system(name))
    assert data.a >= math.sqrt(2.0) - 1e-15
    assert data.b == (1.0 / math.sqrt(2.0) + math.sqrt(2.0)) * data.a


def test_pressure_additivity():
    shift = builtin_shift("golden-mean")
    phi = random_function(shift, 2, np.random.default_rng(19))
    base = pressure(phi)
    for const in (-3.0, 0.125, 7.5):
        assert pressure(phi.plus_constant(const)) == pytest.approx(
            base + const, abs=1e-12
        )


def test_normalize_zero_pressure_idempotent():
    shift = builtin_shift("tribonacci")
    phi = random_function(shift, 2, np.random.default_rng(23))
    norm = normalize_zero_pressure(phi)
    assert pressure(norm) == pytest.approx(0.0, abs=1e-10)
    assert pressure(normalize_zero_pressure(norm)) == pytest.approx(0.0, abs=1e-10)


def test_transfer_matrix_entries():
    shift, phi = builtin_system("golden-range2")
    b = transfer_matrix(shift, phi)
    assert b[0, 0] == pytest.approx(math.exp(0.25))
    assert b[0, 1] == pytest.approx(math.exp(-0.4))
    assert b[1, 0] == pytest.approx(math.exp(0.1))
    assert b[1, 1] == 0.0


def test_requires_mixing():
    cycle = build_sft(["a", "b"], [("a", "b"), ("b", "a")])
    with pytest.raises(NotMixingError):
        perron_data(cycle, LocallyConstantFunction.zero(cycle))


def test_variational_principle_attained():
    for name in ALL_SYSTEMS:
        data = perron_data(*builtin_system(name))
        assert metric_pressure(data.measure, data.phi) == pytest.approx(
            data.pressure, abs=1e-10
        )


def fib(n):
    a, b = 1, 1
    for _ in range(n - 1):
        a, b = b, a + b
    return a


def test_partition_sums_fibonacci():
    shift = builtin_shift("golden-mean")
    phi = LocallyConstantFunction.zero(shift)
    for n in range(1, 13):
        ps = partition_sum(shift, phi, "a", n)
        assert ps.enumeration == pytest.approx(fib(n + 1))
        assert ps.matrix == pytest.approx(fib(n + 1), abs=1e-9)


def test_partition_routes_agree_weighted():
    shift, phi = builtin_system("golden-range2")
    for n in range(1, 13):
        ps = partition_sum(shift, phi, "a", n)
        assert abs(ps.enumeration - ps.matrix) <= 1e-10 * max(1.0, abs(ps.matrix))


def test_gurevich_estimate_converges():
    shift = builtin_shift("golden-mean")
    phi = LocallyConstantFunction.zero(shift)
    rows = gurevich_estimate(shift, phi, "a", 12)
    residuals = {n: res for n, _, res in rows}
    assert residuals[12] <= 0.06
    for n in range(5, 13):
        assert residuals[n] <= residuals[n - 1] + 1e-12


def test_equilibrium_recodes_long_range():
    shift = builtin_shift("golden-mean")
    phi = random_function(shift, 3, np.random.default_rng(31))
    data = equilibrium(phi)
    assert data.recoding is not None
    assert data.phi.depth == 2
    # pressure is intrinsic: adding a constant survives the recode roundtrip
    assert pressure(phi.plus_constant(1.0)) == pytest.approx(
        data.pressure + 1.0, abs=1e-12
    )


def test_gibbs_certificate_bernoulli_ratio_one():
    shift, phi = builtin_system("full2-bernoulli")
    cert = gibbs_certificate(perron_data(shift, phi), 8)
    assert abs(cert.worst_ratio - 1.0) <= 1e-12
    assert cert.empirical <= 1.0 + 1e-12


def test_gibbs_certificate_range2_hits_eigenvector_products():
    shift, phi = builtin_system("golden-range2")
    data = perron_data(shift, phi)
    cert = gibbs_certificate(data, 8)
    assert cert.empirical <= cert.apriori
    # the worst cylinder ratio is an exact eigenvector product
    w = cert.worst_word
    expected = data.h[w[0]] * data.nu[w[-1]]
    assert cert.worst_ratio == pytest.approx(expected, abs=1e-12)


def test_gibbs_certificate_all_ratios_in_window():
    for name in ("golden-zero", "golden-range2", "full2-bernoulli"):
        data = perron_data(*builtin_system(name))
        cert = gibbs_certificate(data, 8)
        assert 1.0 / cert.apriori <= cert.worst_ratio <= cert.apriori
        assert cert.empirical <= cert.apriori
