"""GHZ-state correlations under two-setting qubit measurements.

Each party ``i`` and setting ``s`` measures ``n . sigma`` with Bloch vector
``n = (sin t cos p, sin t sin p, cos t)``. In the default equatorial mode
``t = pi/2`` and the GHZ correlator has the closed form ``cos(sum_i p_i)``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .coeffs import CoefficientTable, q_of, theory_bounds
from .core import CorrelationTable, TableShapeError, check_party_count, word_bits

PAULI = np.array(
    [[[0, 1], [1, 0]], [[0, -1j], [1j, 0]], [[1, 0], [0, -1]]],
    dtype=complex,
)
GENERAL_MAX_PARTIES = 4


def ghz(m: int) -> np.ndarray:
    m = check_party_count(m, 2, 10)
    psi = np.zeros(1 << m, dtype=complex)
    psi[0] = psi[-1] = 1 / math.sqrt(2)
    return psi


@dataclass(frozen=True)
class AngleSet:
    """Azimuths ``phi[i, s]`` and optional polar angles ``theta[i, s]`` (party i+1, setting s)."""

    phi: np.ndarray
    theta: np.ndarray | None = None

    def __post_init__(self):
        phi = np.mod(np.asarray(self.phi, dtype=float), 2 * math.pi)
        if phi.ndim != 2 or phi.shape[1] != 2:
            raise ValueError("phi must have shape (m, 2)")
        object.__setattr__(self, "phi", phi)
        if self.theta is not None:
            theta = np.asarray(self.theta, dtype=float)
            if theta.shape != phi.shape:
                raise ValueError("theta must match phi's shape")
            if np.any((theta < 0) | (theta > math.pi)):
                raise ValueError("polar angles must lie in [0, pi]")
            object.__setattr__(self, "theta", theta)

    @property
    def m(self) -> int:
        return self.phi.shape[0]

    @property
    def equatorial(self) -> bool:
        return self.theta is None

    def bloch(self) -> np.ndarray:
        """Unit vectors, shape (m, 2, 3)."""
        t = np.full_like(self.phi, math.pi / 2) if self.theta is None else self.theta
        return np.stack(
            [np.sin(t) * np.cos(self.phi), np.sin(t) * np.sin(self.phi), np.cos(t)], axis=-1
        )


def observable(n) -> np.ndarray:
    return np.tensordot(np.asarray(n, dtype=float), PAULI, axes=1)


def apply_local(psi: np.ndarray, ops) -> np.ndarray:
    """Apply ``ops[i]`` to party ``i+1``; party 1 is the least significant index bit."""
    m = len(ops)
    t = psi.reshape((2,) * m)
    for i, op in enumerate(ops):
        ax = m - 1 - i
        t = np.moveaxis(np.tensordot(op, t, axes=([1], [ax])), 0, ax)
    return t.reshape(-1)


def _x_bits(m: int, x) -> tuple[int, ...]:
    x = int(getattr(x, "bits", x))
    if not 0 <= x < 1 << m:
        raise ValueError(f"input word {x} out of range for m={m}")
    return tuple((x >> i) & 1 for i in range(m))


def correlator(angles: AngleSet, x, method: str = "auto") -> float:
    """<GHZ| (x)_i n_i^{x_i}.sigma |GHZ> for input word (or InputVector) ``x``.

    ``method`` is ``"closed"`` (equatorial only), ``"contraction"`` or ``"auto"``.
    """
    bits = _x_bits(angles.m, x)
    if method == "auto":
        method = "closed" if angles.equatorial else "contraction"
    if method == "closed":
        if not angles.equatorial:
            raise ValueError("closed form only holds for equatorial measurements")
        return math.cos(sum(angles.phi[i, b] for i, b in enumerate(bits)))
    if method != "contraction":
        raise ValueError(f"unknown correlator method {method!r}")
    n = angles.bloch()
    psi = ghz(angles.m)
    out = apply_local(psi, [observable(n[i, b]) for i, b in enumerate(bits)])
    return float(np.vdot(psi, out).real)


def _correlators_closed(phi: np.ndarray) -> np.ndarray:
    m = phi.shape[0]
    bits = word_bits(m)
    return np.cos(phi[np.arange(m), bits].sum(axis=1))


def _correlators_contraction(bloch: np.ndarray) -> np.ndarray:
    m = bloch.shape[0]
    psi = ghz(m)
    ops = [[observable(bloch[i, s]) for s in (0, 1)] for i in range(m)]
    out = np.empty(1 << m)
    for x in range(1 << m):
        phi = apply_local(psi, [ops[i][(x >> i) & 1] for i in range(m)])
        out[x] = np.vdot(psi, phi).real
    return out


def correlators(angles: AngleSet) -> np.ndarray:
    if angles.equatorial:
        return _correlators_closed(angles.phi)
    return _correlators_contraction(angles.bloch())


def quantum_value(angles: AngleSet, coeffs: CoefficientTable) -> float:
    """sum_x coeff(x) E(x)."""
    if angles.m != coeffs.m:
        raise TableShapeError(f"angles have m={angles.m}, coefficients have m={coeffs.m}")
    return float(np.dot([float(v) for v in coeffs.values], correlators(angles)))


def _eigenbasis(n) -> np.ndarray:
    """Rows are <e_a| with n.sigma e_a = (-1)^a e_a."""
    vals, vecs = np.linalg.eigh(observable(n))
    # eigh sorts ascending: column 1 is +1, column 0 is -1
    return np.array([vecs[:, 1], vecs[:, 0]]).conj()


def measurement_table(m: int, angles: AngleSet) -> CorrelationTable:
    """Full outcome distribution of the projective measurements on GHZ."""
    m = check_party_count(m, 2, 8)
    if angles.m != m:
        raise TableShapeError(f"angles have m={angles.m}, expected {m}")
    n = angles.bloch()
    psi = ghz(m)
    rows = [[_eigenbasis(n[i, s]) for s in (0, 1)] for i in range(m)]
    probs = np.empty((1 << m, 1 << m))
    for x in range(1 << m):
        amp = apply_local(psi, [rows[i][(x >> i) & 1] for i in range(m)])
        probs[x] = np.abs(amp) ** 2
    return CorrelationTable.floating(m, probs)


@dataclass(frozen=True)
class OptimizationResult:
    angles: AngleSet
    value: float
    target: float
    converged: bool
    seed: int
    restarts: int
    best_restart: int

    def to_json(self) -> dict:
        doc = {
            "value": self.value,
            "target": self.target,
            "angles": self.angles.phi.tolist(),
            "converged": self.converged,
            "seed": self.seed,
            "restarts": self.restarts,
        }
        if not self.angles.equatorial:
            doc["theta"] = self.angles.theta.tolist()
        return doc


def _ascend_equatorial(phi, mu, bits, max_sweeps, stop):
    """Block coordinate ascent; each angle enters as c + u cos p + v sin p."""
    m = phi.shape[0]
    rows = np.arange(m)
    value = float(mu @ np.cos(phi[rows, bits].sum(axis=1)))
    for _ in range(max_sweeps):
        before = value
        for i in range(m):
            for s in (0, 1):
                rest = phi[rows, bits].sum(axis=1) - phi[i, s]
                w = np.where(bits[:, i] == s, mu, 0.0)
                u = w @ np.cos(rest)
                v = -(w @ np.sin(rest))
                if u or v:
                    phi[i, s] = math.atan2(v, u)
        value = float(mu @ np.cos(phi[rows, bits].sum(axis=1)))
        if value - before < stop:
            break
    return phi, value


def _ascend_general(n, mu, max_sweeps, stop):
    """Block coordinate ascent over Bloch vectors; the value is linear in each one."""
    m = n.shape[0]

    def value_of(vecs):
        return float(mu @ _correlators_contraction(vecs))

    value = value_of(n)
    basis = np.eye(3)
    for _ in range(max_sweeps):
        before = value
        for i in range(m):
            for s in (0, 1):
                probe = n.copy()
                probe[i, s] = 0.0
                c = value_of(probe)
                grad = []
                for e in basis:
                    probe[i, s] = e
                    grad.append(value_of(probe) - c)
                grad = np.array(grad)
                norm = np.linalg.norm(grad)
                if norm > 0:
                    n[i, s] = grad / norm
        value = value_of(n)
        if value - before < stop:
            break
    return n, value


def optimize_angles(
    m: int,
    restarts: int = 32,
    tol: float = 1e-6,
    seed: int = 0,
    general: bool = False,
    max_sweeps: int = 2000,
) -> OptimizationResult:
    """Multi-start coordinate ascent for the largest GHZ value of the functional.

    Restart 0 is the analytic seed ``phi_i^1 - phi_i^0 = pi/2``; the others are
    uniform random. ``converged`` reports whether the best value is within
    ``tol`` of the known quantum maximum.
    """
    from .coeffs import svetlichny_coeffs

    m = check_party_count(m, 2, GENERAL_MAX_PARTIES if general else 8)
    coeffs = svetlichny_coeffs(m)
    mu = np.array([float(v) for v in coeffs.values])
    target = theory_bounds(m).quantum
    rng = np.random.default_rng(seed)
    bits = word_bits(m)
    best = None
    for r in range(restarts + 1):
        if r == 0:
            phi = np.tile([0.0, math.pi / 2], (m, 1))
            theta = np.full((m, 2), math.pi / 2)
        else:
            phi = rng.uniform(0, 2 * math.pi, size=(m, 2))
            theta = np.arccos(rng.uniform(-1, 1, size=(m, 2)))
        if general:
            start = AngleSet(phi, theta).bloch()
            n, value = _ascend_general(start, mu, max_sweeps, 1e-15)
            ang = AngleSet(np.arctan2(n[..., 1], n[..., 0]), np.arccos(np.clip(n[..., 2], -1, 1)))
        else:
            phi, value = _ascend_equatorial(phi, mu, bits, max_sweeps, 1e-15)
            ang = AngleSet(phi)
        if best is None or value > best[0]:
            best = (value, ang, r)
    value, ang, r = best
    return OptimizationResult(ang, value, target, value >= target - tol, seed, restarts, r)


def random_angle_values(m: int, count: int, seed: int = 0) -> np.ndarray:
    """Functional value at ``count`` uniformly random equatorial angle sets."""
    from .coeffs import svetlichny_coeffs

    rng = np.random.default_rng(seed)
    mu = np.array([float(v) for v in svetlichny_coeffs(m).values])
    bits = word_bits(m)
    phi = rng.uniform(0, 2 * math.pi, size=(count, m, 2))
    sums = phi[:, np.arange(m), bits].sum(axis=-1)
    return np.cos(sums) @ mu


def quantum_target(m: int) -> float:
    return 2.0 ** (m - q_of(m) - 0.5)
