"""
The T*SU(2) E-model as a spherical pendulum, first and second order principal
chiral actions on T*K, and the finite-difference split of the PCM Lax equation
into the Bianchi identity and the equation of motion.
"""
from typing import List, Sequence, Tuple

import numpy as np
from loguru import logger
from scipy.integrate import odeint

from core.algebra import (
    TStarElement,
    bracket,
    cartan_element,
    dagger,
    killing_form,
    project_complement,
    random_special_unitary,
    random_su,
    solve_ad,
)
from core.doubles import EOperator, TStarDouble, TStarPoint
from core.dynamics import ModelSpec, current_of, hamiltonian, integrate
from core.errors import DomainError
from models.results import Scheme, SuiteReport


PAULI = (
    np.array([[0, 1], [1, 0]], dtype=complex),
    np.array([[0, -1j], [1j, 0]], dtype=complex),
    np.array([[1, 0], [0, -1]], dtype=complex),
)

# Model time t and the time s of S = 1/2 int (|x'|^2 + 4 x3) ds are related by s = sqrt(2) t
PENDULUM_TIME_SCALE = np.sqrt(2.0)


def pendulum_zeta() -> np.ndarray:
    """zeta = diag(i, -i)"""
    return 1j * PAULI[2]


def sphere_matrix(x: Sequence[float]) -> np.ndarray:
    """i x . sigma"""
    return 1j * sum(float(c) * s for c, s in zip(x, PAULI))


def sphere_point(X: np.ndarray) -> np.ndarray:
    """Coefficients x of X = i x . sigma"""
    if X.shape != (2, 2):
        raise DomainError(f"Expected a 2x2 matrix, got shape {X.shape}")
    return np.array([np.real(np.trace(X @ s) / 2j) for s in PAULI])


def su2_from_sphere(x: Sequence[float]) -> np.ndarray:
    """k = [[u, -conj(v)], [v, conj(u)]] with k sigma3 k^dagger = x . sigma"""
    x = np.asarray(x, dtype=float)
    theta = np.arccos(np.clip(x[2] / np.linalg.norm(x), -1.0, 1.0))
    phi = np.arctan2(x[1], x[0])
    u = np.cos(theta / 2)
    v = np.sin(theta / 2) * np.exp(1j * phi)
    return np.array([[u, -np.conj(v)], [v, np.conj(u)]], dtype=complex)


def pendulum_spec() -> ModelSpec:
    return ModelSpec(TStarDouble(2), EOperator.tstar(2), TStarElement(pendulum_zeta(), np.zeros((2, 2), dtype=complex)),
                     label="pendulum")


def point_from_sphere(x: Sequence[float], xdot: Sequence[float], spec: ModelSpec) -> TStarPoint:
    """
    Group point whose position is x and whose velocity under the flow is xdot.

    The angular part A = i a . sigma with a = -x cross xdot / 2 is the K-velocity
    dk/dt k^-1, and kappa = Ad_k rho solves [zeta, rho] = -Ad_{k^-1} A.
    """
    x = np.asarray(x, dtype=float)
    xdot = np.asarray(xdot, dtype=float)
    if abs(np.linalg.norm(x) - 1) > 1e-10:
        raise DomainError(f"x must lie on the unit sphere, |x| = {np.linalg.norm(x)}")
    if abs(x @ xdot) > 1e-10:
        raise DomainError("xdot must be tangent to the sphere")
    k = su2_from_sphere(x)
    A = sphere_matrix(-0.5 * np.cross(x, xdot))
    rho = solve_ad(spec.xi_matrix, -dagger(k) @ A @ k)
    return TStarPoint(k, k @ rho @ dagger(k))


def sphere_state(point: TStarPoint, spec: ModelSpec) -> Tuple[np.ndarray, np.ndarray]:
    """(x, dx/dt) of a group point"""
    X = point.k @ spec.xi_matrix @ dagger(point.k)
    A = spec.e_op(current_of(point, spec)).first
    return sphere_point(X), sphere_point(bracket(A, X))


def model_energy(x: np.ndarray, xdot: np.ndarray) -> float:
    """E-model Hamiltonian 1/4 |x'|^2 + 2 - 2 x3"""
    return 0.25 * float(xdot @ xdot) + 2.0 - 2.0 * float(x[2])


def pendulum_energy(y: np.ndarray, ydot: np.ndarray) -> float:
    """1/2 |y'|^2 - 2 y3 in the time of the action 1/2 int (|y'|^2 + 4 y3)"""
    return 0.5 * float(ydot @ ydot) - 2.0 * float(y[2])


def _pendulum_rhs(state: np.ndarray, t: float) -> np.ndarray:
    # y'' = 2 e3 - (|y'|^2 + 2 y3) y on |y| = 1
    y, v = state[:3], state[3:]
    acc = np.array([0.0, 0.0, 2.0]) - (v @ v + 2.0 * y[2]) * y
    return np.concatenate([v, acc])


def pendulum_oracle(x0: Sequence[float], xdot0: Sequence[float], times: Sequence[float]) -> Tuple[np.ndarray, np.ndarray]:
    """
    Integrate the constrained pendulum independently of the E-model.

    Args:
        x0, xdot0: Position and velocity in model time
        times: Model times

    Returns:
        (positions, velocities) in model time, each of shape (len(times), 3)
    """
    scale = PENDULUM_TIME_SCALE
    state0 = np.concatenate([np.asarray(x0, float), np.asarray(xdot0, float) / scale])
    s = np.asarray(times, dtype=float) * scale
    sol = odeint(_pendulum_rhs, state0, s, rtol=1e-12, atol=1e-12, mxstep=100000)
    return sol[:, :3], sol[:, 3:] * scale


def pendulum_suite(x0: Sequence[float] = (np.sin(1.0), 0.0, np.cos(1.0)),
                   xdot0: Sequence[float] = (0.0, 0.8, 0.0),
                   t_end: float = 10.0,
                   oracle_t_end: float = 5.0,
                   dt: float = 1e-3,
                   seed: int = 0,
                   energy_tol: float = 1e-8,
                   oracle_tol: float = 1e-6) -> SuiteReport:
    """
    Integrate the T*SU(2) model, map it to S^2 and compare with the direct
    pendulum integrator.

    Returns:
        SuiteReport with energy, oracle and fixed-point checks
    """
    spec = pendulum_spec()
    report = SuiteReport(suite="pendulum", seed=seed)

    l0 = point_from_sphere(x0, xdot0, spec)
    x_chk, v_chk = sphere_state(l0, spec)
    report.add("initial-state", max(np.max(np.abs(x_chk - x0)), np.max(np.abs(v_chk - xdot0))), 1e-10)
    report.add("hamiltonian-closed-form",
               abs(hamiltonian(current_of(l0, spec), spec) - model_energy(x_chk, v_chk)), 1e-10)

    traj = integrate(spec, l0, t_end, dt, scheme=Scheme.RK4, track_current=False)
    states = [sphere_state(p, spec) for p in traj.points]
    energies = np.array([pendulum_energy(x, v / PENDULUM_TIME_SCALE) for x, v in states])
    report.add("energy-drift", float(np.max(np.abs(energies - energies[0])) / max(abs(energies[0]), 1.0)), energy_tol)
    report.add("hamiltonian-drift", traj.energy_drift, energy_tol)

    mask = traj.times <= oracle_t_end + 1e-12
    xs, _ = pendulum_oracle(x0, xdot0, traj.times[mask])
    model_xs = np.array([x for x, _ in states])[mask]
    deviation = float(np.max(np.linalg.norm(model_xs - xs, axis=1)))
    report.add("oracle-agreement", deviation, oracle_tol)
    logger.info(f"Pendulum oracle deviation over t<={oracle_t_end}: {deviation:.3e}")

    for pole in ((0.0, 0.0, 1.0), (0.0, 0.0, -1.0)):
        fixed = integrate(spec, point_from_sphere(pole, (0.0, 0.0, 0.0), spec), 1.0, 0.01, track_current=False)
        xf, vf = sphere_state(fixed.points[-1], spec)
        report.add("fixed-points", float(np.linalg.norm(xf - pole) + np.linalg.norm(vf)), 1e-12)
    return report


# ---------------------------------------------------------------------------
# Principal chiral actions on T*K
# ---------------------------------------------------------------------------

def kinv_kprime(k: np.ndarray, zeta: np.ndarray) -> np.ndarray:
    """k^-1 k' = Ad_{k^-1} zeta - zeta"""
    return dagger(k) @ zeta @ k - zeta


def pcm_first_order_integrand(k: np.ndarray, kdot: np.ndarray, rho_p: np.ndarray, zeta: np.ndarray) -> float:
    """(rho', k^-1 k.) + 1/2 (k'k^-1, k'k^-1) + 1/2 (rho', rho')"""
    u = dagger(k) @ kdot
    w = kinv_kprime(k, zeta)
    return killing_form(rho_p, u) + 0.5 * killing_form(w, w) + 0.5 * killing_form(rho_p, rho_p)


def pcm_momentum(k: np.ndarray, kdot: np.ndarray, zeta: np.ndarray) -> np.ndarray:
    """rho' = -P-perp(k^-1 k.), the stationary point of the first order action"""
    return -project_complement(zeta, dagger(k) @ kdot)


def pcm_second_order_integrand(k: np.ndarray, kdot: np.ndarray, zeta: np.ndarray) -> float:
    """1/2 (-(P-perp k^-1 k., P-perp k^-1 k.) + (k^-1 k', k^-1 k'))"""
    u = project_complement(zeta, dagger(k) @ kdot)
    w = kinv_kprime(k, zeta)
    return 0.5 * (-killing_form(u, u) + killing_form(w, w))


def _stencil(values: List[np.ndarray], h: float) -> List[np.ndarray]:
    """Five-point central derivative on the interior samples"""
    return [(-values[i + 2] + 8 * values[i + 1] - 8 * values[i - 1] + values[i - 2]) / (12 * h)
            for i in range(2, len(values) - 2)]


def pcm_currents(ks: Sequence[np.ndarray], h: float, zeta: np.ndarray) -> Tuple[List[np.ndarray], List[np.ndarray]]:
    """
    W = zeta - k zeta k^-1 and J = k P-perp(k^-1 k.) k^-1 on the interior samples
    (two samples are lost at each end).
    """
    kdots = _stencil(list(ks), h)
    inner = ks[2:-2]
    W = [zeta - k @ zeta @ dagger(k) for k in inner]
    J = [k @ project_complement(zeta, dagger(k) @ kd) @ dagger(k) for k, kd in zip(inner, kdots)]
    return W, J


def pcm_second_order_residual(ks: Sequence[np.ndarray], h: float, zeta: np.ndarray) -> Tuple[float, float]:
    """
    Residuals of the two spectral-parameter coefficients of the PCM Lax equation.

    Args:
        ks: Unitary samples k(t_i) at uniform spacing h
        h: Sample spacing
        zeta: Stabilized element

    Returns:
        (bianchi, eom): max |-dW/dt + [zeta - W, J]| and max |dJ/dt - [zeta, W]|
    """
    if len(ks) < 9:
        raise DomainError(f"Need at least 9 samples, got {len(ks)}")
    W, J = pcm_currents(ks, h, zeta)
    dW = _stencil(W, h)
    dJ = _stencil(J, h)
    bianchi = max(float(np.linalg.norm(-dw + bracket(zeta - w, j)))
                  for dw, w, j in zip(dW, W[2:-2], J[2:-2]))
    eom = max(float(np.linalg.norm(dj - bracket(zeta, w))) for dj, w in zip(dJ, W[2:-2]))
    return bianchi, eom


def pcm_spec(N: int) -> ModelSpec:
    """T*SU(N) with the regular element zeta = i diag(N-1, N-3, ..., 1-N)"""
    zeta = cartan_element([N - 1 - 2 * a for a in range(N)])
    return ModelSpec(TStarDouble(N), EOperator.tstar(N), TStarElement(zeta, np.zeros_like(zeta)), label=f"pcm-su{N}")


def pcm_suite(N: int = 3, samples: int = 50, seed: int = 0, t_end: float = 1.0, dt: float = 1e-3) -> SuiteReport:
    """
    Elimination of the momentum at random (k, k.), then the Bianchi and
    equation-of-motion split along an integrated trajectory.
    """
    if N < 2:
        raise DomainError(f"N must be at least 2, got {N}")
    spec = pcm_spec(N)
    zeta = spec.xi_matrix
    rng = np.random.default_rng(seed)
    report = SuiteReport(suite=f"pcm-su{N}", seed=seed)

    for _ in range(samples):
        k = random_special_unitary(N, rng)
        kdot = k @ random_su(N, rng)
        rho_p = pcm_momentum(k, kdot, zeta)
        report.add("momentum-elimination",
                   abs(pcm_first_order_integrand(k, kdot, rho_p, zeta) - pcm_second_order_integrand(k, kdot, zeta)),
                   1e-11)
        angles = rng.standard_normal(N)
        h = np.diag(np.exp(1j * (angles - angles.mean())))
        report.add("gauge-invariance",
                   abs(pcm_second_order_integrand(k @ h, kdot @ h, zeta) - pcm_second_order_integrand(k, kdot, zeta)),
                   1e-11)

    k0 = random_special_unitary(N, rng)
    rho = project_complement(zeta, random_su(N, rng, 0.5))
    traj = integrate(spec, TStarPoint(k0, k0 @ rho @ dagger(k0)), t_end, dt, track_current=False)
    bianchi, eom = pcm_second_order_residual([p.k for p in traj.points], traj.sample_step, zeta)
    report.add("bianchi-identity", bianchi, 1e-6)
    report.add("second-order-eom", eom, 1e-6)
    report.add("hamiltonian-drift", traj.energy_drift, 1e-8)
    logger.info(f"PCM suite N={N}: max residual {report.max_residual:.3e}")
    return report
