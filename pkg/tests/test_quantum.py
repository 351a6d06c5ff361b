import math

import numpy as np
import pytest

from svetlichny.coeffs import evaluate, svetlichny_coeffs, theory_bounds
from svetlichny.core import validate_table
from svetlichny.nosignal import check_nosignalling
from svetlichny.quantum import (
    AngleSet,
    apply_local,
    correlator,
    correlators,
    ghz,
    measurement_table,
    observable,
    optimize_angles,
    quantum_target,
    quantum_value,
    random_angle_values,
)


def dense_operator(ops):
    """Kronecker product with party 1 as the least significant factor."""
    out = np.eye(1)
    for op in ops:
        out = np.kron(op, out)
    return out


def test_ghz_vectors():
    np.testing.assert_allclose(ghz(2), np.array([1, 0, 0, 1]) / math.sqrt(2))
    assert ghz(3)[0] == ghz(3)[7] == pytest.approx(1 / math.sqrt(2))
    assert np.count_nonzero(ghz(3)) == 2
    with pytest.raises(ValueError):
        ghz(11)


def test_apply_local_matches_kron():
    rng = np.random.default_rng(0)
    for m in (2, 3, 4):
        psi = rng.normal(size=1 << m) + 1j * rng.normal(size=1 << m)
        ops = [rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2)) for _ in range(m)]
        np.testing.assert_allclose(apply_local(psi, ops), dense_operator(ops) @ psi, atol=1e-12)


def test_correlator_examples():
    assert correlator(AngleSet(np.zeros((2, 2))), 0) == pytest.approx(1)
    a = AngleSet(np.array([[0, math.pi / 2], [0, math.pi / 2], [0, 0]]))
    assert correlator(a, 0b011) == pytest.approx(-1)
    assert correlator(a, 0b011, method="contraction") == pytest.approx(-1)


@pytest.mark.parametrize("m", range(2, 9))
def test_closed_form_matches_contraction(m):
    rng = np.random.default_rng(m)
    count = 60 if m < 7 else 8
    for _ in range(count):
        a = AngleSet(rng.uniform(0, 2 * math.pi, (m, 2)))
        x = int(rng.integers(1 << m))
        assert abs(correlator(a, x, "closed") - correlator(a, x, "contraction")) <= 1e-12


def test_closed_form_rejects_polar_angles():
    a = AngleSet(np.zeros((2, 2)), np.full((2, 2), 0.3))
    with pytest.raises(ValueError):
        correlator(a, 0, "closed")


def test_general_correlator_matches_dense():
    rng = np.random.default_rng(3)
    m = 3
    a = AngleSet(rng.uniform(0, 2 * math.pi, (m, 2)), rng.uniform(0, math.pi, (m, 2)))
    n = a.bloch()
    psi = ghz(m)
    for x in range(8):
        op = dense_operator([observable(n[i, (x >> i) & 1]) for i in range(m)])
        assert correlator(a, x) == pytest.approx(np.vdot(psi, op @ psi).real, abs=1e-12)


def test_quantum_value_phi_zero():
    # every correlator is 1, so the value is the coefficient sum
    assert quantum_value(AngleSet(np.zeros((4, 2))), svetlichny_coeffs(4)) == pytest.approx(1)


@pytest.mark.parametrize("m,tol", [(2, 1e-6), (3, 1e-6), (4, 1e-6)])
def test_optimize_reaches_bound(m, tol):
    res = optimize_angles(m)
    assert res.converged
    assert abs(res.value - theory_bounds(m).quantum) <= tol
    assert quantum_value(res.angles, svetlichny_coeffs(m)) == pytest.approx(res.value, abs=1e-12)


def test_optimize_m5_reaches_formula_bound():
    res = optimize_angles(5)
    assert abs(res.value - 2**1.5) <= 1e-5
    assert res.value <= 2**1.5 + 1e-9


def test_optimize_is_deterministic():
    a, b = optimize_angles(3, restarts=4, seed=7), optimize_angles(3, restarts=4, seed=7)
    assert a.value == b.value and np.array_equal(a.angles.phi, b.angles.phi)


def test_targets():
    assert quantum_target(3) == pytest.approx(math.sqrt(2))
    assert quantum_target(4) == pytest.approx(2**1.5)
    assert quantum_target(5) == pytest.approx(2**1.5)


@pytest.mark.parametrize("m", [3, 4])
def test_random_probes_below_bound(m):
    vals = random_angle_values(m, 20000, seed=m)
    assert vals.max() <= quantum_target(m) + 1e-9


def test_general_mode_does_not_beat_bound():
    res = optimize_angles(3, restarts=4, general=True)
    assert res.value <= theory_bounds(3).quantum + 1e-9
    assert res.converged


def test_measurement_table_m2_phi_zero():
    t = measurement_table(2, AngleSet(np.zeros((2, 2))))
    np.testing.assert_allclose(t.values[0], [0.5, 0, 0, 0.5], atol=1e-12)


@pytest.mark.parametrize("m", [2, 3, 4, 5])
def test_measurement_table_properties(m):
    rng = np.random.default_rng(10 + m)
    for general in (False, True):
        theta = rng.uniform(0, math.pi, (m, 2)) if general else None
        a = AngleSet(rng.uniform(0, 2 * math.pi, (m, 2)), theta)
        t = measurement_table(m, a)
        assert validate_table(t, 1e-12) is None
        assert check_nosignalling(t, tol=1e-10) is None
        mu = svetlichny_coeffs(m)
        assert abs(float(evaluate(t, mu)) - quantum_value(a, mu)) <= 1e-9


def test_correlators_vector():
    a = AngleSet(np.array([[0.1, 0.2], [0.3, 0.4]]))
    np.testing.assert_allclose(correlators(a), [math.cos(v) for v in (0.4, 0.5, 0.5, 0.6)])


def test_angle_validation():
    with pytest.raises(ValueError):
        AngleSet(np.zeros((3, 3)))
    with pytest.raises(ValueError):
        AngleSet(np.zeros((2, 2)), np.full((2, 2), 4.0))
