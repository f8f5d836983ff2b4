"""
Symplectic reduction of the homogeneous-coordinate CP^N model: the unreduced
flow of (Z, Y), its two first class constraints and gauge flows, the invariant
pair (W, J) and its reduced first order equations, and the way back to the chart.
"""
from dataclasses import dataclass
from typing import List, Optional, Tuple

import numpy as np
from loguru import logger

from core.algebra import TStarElement, bracket, dagger
from core.cpn import (
    CHART_MARGIN,
    conjugate_derivative,
    cpn_chart_embed,
    cpn_zeta,
    first_order_flow,
    hamiltonian_w,
    p_from_w,
    rho_from_w,
    xi_from_w,
)
from core.doubles import EOperator, TStarDouble
from core.dynamics import ModelSpec
from core.errors import ChartDomainError, DimensionMismatchError, DomainError
from core.integrability import lax_pair, spectral_pcm
from models.config import step_count
from models.results import SuiteReport


@dataclass(frozen=True)
class HomogeneousState:
    """Homogeneous coordinates Z and their conjugate Y"""
    Z: np.ndarray
    Y: np.ndarray

    def __post_init__(self):
        if self.Z.shape != self.Y.shape or self.Z.ndim != 1:
            raise DimensionMismatchError(self.Z.shape, self.Y.shape)

    @property
    def N(self) -> int:
        return len(self.Z) - 1

    @classmethod
    def origin(cls, N: int) -> "HomogeneousState":
        Z = np.zeros(N + 1, dtype=complex)
        Z[-1] = 1.0
        return cls(Z, np.zeros(N + 1, dtype=complex))

    def constraints(self) -> Tuple[complex, float]:
        """(Y^dagger Z - Z^dagger Y, Z^dagger Z - 1)"""
        yz = np.vdot(self.Y, self.Z)
        return yz - np.conj(yz), float(np.vdot(self.Z, self.Z).real - 1)

    def constraint_violation(self) -> float:
        first, second = self.constraints()
        return max(abs(first), abs(second))

    @property
    def K(self) -> np.ndarray:
        """K = Y - (Z^dagger Y) Z"""
        return self.Y - np.vdot(self.Z, self.Y) * self.Z

    def phase_rotated(self, beta: float) -> "HomogeneousState":
        phase = np.exp(1j * beta)
        return HomogeneousState(phase * self.Z, phase * self.Y)

    def shifted(self, beta: float) -> "HomogeneousState":
        return HomogeneousState(self.Z, self.Y + beta * self.Z)


@dataclass(frozen=True)
class ReducedState:
    """The gauge invariant pair (W, J)"""
    W: np.ndarray
    J: np.ndarray

    def structural_residual(self) -> float:
        """Distance of W and J from traceless anti-Hermitian"""
        out = 0.0
        for X in (self.W, self.J):
            out = max(out, float(np.max(np.abs(X + dagger(X)))), abs(np.trace(X)))
        return out

    def as_current(self) -> TStarElement:
        """The T*K current (W, -J) of the PCM E-model"""
        return TStarElement(self.W, -self.J)


def _unit_last(N: int) -> np.ndarray:
    e = np.zeros(N + 1, dtype=complex)
    e[-1] = 1.0
    return e


def tilde_hamiltonian(state: HomogeneousState) -> float:
    """1/4 |Z|^2 |Y|^2 - 1/4 |Z^dagger Y|^2 + (N+1)^2 (1 - |Z_{N+1}|^2)"""
    Z, Y = state.Z, state.Y
    n1 = state.N + 1
    kinetic = 0.25 * np.vdot(Z, Z).real * np.vdot(Y, Y).real - 0.25 * abs(np.vdot(Z, Y)) ** 2
    return float(kinetic + n1 ** 2 * (1 - abs(Z[-1]) ** 2))


def unreduced_flow(state: HomogeneousState) -> Tuple[np.ndarray, np.ndarray]:
    """
    (Z., Y.) = (2 dH/d(conj Y), -2 dH/d(conj Z)):

        Z. = 1/2 |Z|^2 Y - 1/2 (Z^dagger Y) Z
        Y. = -1/2 |Y|^2 Z + 1/2 (Y^dagger Z) Y + 2 (N+1)^2 Z_{N+1} e_{N+1}
    """
    Z, Y = state.Z, state.Y
    n1 = state.N + 1
    Zdot = 0.5 * np.vdot(Z, Z).real * Y - 0.5 * np.vdot(Z, Y) * Z
    Ydot = -0.5 * np.vdot(Y, Y).real * Z + 0.5 * np.vdot(Y, Z) * Y + 2 * n1 ** 2 * Z[-1] * _unit_last(state.N)
    return Zdot, Ydot


def gradient_flow(state: HomogeneousState, h: float = 1e-6) -> Tuple[np.ndarray, np.ndarray]:
    """unreduced_flow from finite differences of tilde_hamiltonian"""
    dH_dYbar = conjugate_derivative(lambda Y: tilde_hamiltonian(HomogeneousState(state.Z, Y)), state.Y, h)
    dH_dZbar = conjugate_derivative(lambda Z: tilde_hamiltonian(HomogeneousState(Z, state.Y)), state.Z, h)
    return 2 * dH_dYbar, -2 * dH_dZbar


def constraint_rates(state: HomogeneousState) -> Tuple[complex, float]:
    """Time derivatives of both constraints along the unreduced flow"""
    Zdot, Ydot = unreduced_flow(state)
    Z, Y = state.Z, state.Y
    first = np.vdot(Ydot, Z) + np.vdot(Y, Zdot) - np.vdot(Zdot, Y) - np.vdot(Z, Ydot)
    second = 2 * np.vdot(Z, Zdot).real
    return first, float(second)


def reduced_pair(state: HomogeneousState) -> ReducedState:
    """W = i(N+1)(Z Z^dagger - e e^dagger), J = 1/2 (K Z^dagger - Z K^dagger)"""
    Z, K = state.Z, state.K
    e = _unit_last(state.N)
    W = 1j * (state.N + 1) * (np.outer(Z, Z.conj()) - np.outer(e, e.conj()))
    J = 0.5 * (np.outer(K, Z.conj()) - np.outer(Z, K.conj()))
    return ReducedState(W, J)


def reduced_rhs(reduced: ReducedState, zeta: np.ndarray) -> ReducedState:
    """W. = [J, W - zeta], J. = [zeta, W]"""
    return ReducedState(bracket(reduced.J, reduced.W - zeta), bracket(zeta, reduced.W))


def projected_rhs(state: HomogeneousState) -> ReducedState:
    """d/dt (W, J) along the unreduced flow, by the chain rule"""
    Z, Y = state.Z, state.Y
    Zdot, Ydot = unreduced_flow(state)
    K = state.K
    Kdot = Ydot - (np.vdot(Zdot, Y) + np.vdot(Z, Ydot)) * Z - np.vdot(Z, Y) * Zdot
    Wdot = 1j * (state.N + 1) * (np.outer(Zdot, Z.conj()) + np.outer(Z, Zdot.conj()))
    Jdot = 0.5 * (np.outer(Kdot, Z.conj()) + np.outer(K, Zdot.conj())
                  - np.outer(Zdot, K.conj()) - np.outer(Z, Kdot.conj()))
    return ReducedState(Wdot, Jdot)


# ---------------------------------------------------------------------------
# Chart maps
# ---------------------------------------------------------------------------

def homogeneous_from_chart(chi: np.ndarray, w: np.ndarray) -> HomogeneousState:
    """Z = (chi, s), Y = -2i (xi, -chi^dagger xi / s) with xi the vector built from w"""
    chi = np.asarray(chi, dtype=complex)
    w = np.asarray(w, dtype=complex)
    k = cpn_chart_embed(chi)
    s = k[-1, -1].real
    xi = xi_from_w(chi, w)
    Z = k[:, -1].copy()
    Y = -2j * np.concatenate([xi, [-np.vdot(chi, xi) / s]])
    return HomogeneousState(Z, Y)


def chart_recovery(state: HomogeneousState) -> Tuple[np.ndarray, np.ndarray]:
    """
    (chi, p) of a constrained state where Z_{N+1} does not vanish.

    The phase of Z_{N+1} is rotated away and Y is replaced by the gauge
    equivalent K, for which Z^dagger K = 0.
    """
    last = state.Z[-1]
    if abs(last) < CHART_MARGIN:
        raise ChartDomainError(1.0)
    norm = float(np.linalg.norm(state.Z))
    phase = np.exp(-1j * np.angle(last))
    Z = state.Z * phase / norm
    K = state.K * phase
    chi = Z[:-1]
    s2 = 1 - np.vdot(chi, chi).real
    xi = 0.5j * K[:-1]
    p = xi + 1j * np.vdot(chi, xi).imag * chi / s2
    return chi, p


def chart_currents(chi: np.ndarray, w: np.ndarray) -> ReducedState:
    """(k' k^-1, -k rho' k^-1) of the gauge fixed T*K point"""
    k = cpn_chart_embed(chi)
    zeta = cpn_zeta(len(chi))
    return ReducedState(zeta - k @ zeta @ dagger(k), -k @ rho_from_w(w) @ dagger(k))


# ---------------------------------------------------------------------------
# Reduced Lax pair and trajectories
# ---------------------------------------------------------------------------

def reduced_spec(N: int) -> ModelSpec:
    """T*SU(N+1) PCM model whose reduced phase space is CP^N"""
    zeta = cpn_zeta(N)
    return ModelSpec(TStarDouble(N + 1), EOperator.tstar(N + 1),
                     TStarElement(zeta, np.zeros_like(zeta)), label=f"cpn-{N}")


def reduced_lax_residual(reduced: ReducedState, lam: complex, zeta: np.ndarray) -> float:
    """|dL/dt - [L, M]| with dL/dt computed from the reduced equations"""
    N = zeta.shape[0] - 1
    spec = reduced_spec(N)
    pair = lax_pair(reduced.as_current(), lam, spec, spectral_pcm(N + 1))
    rates = reduced_rhs(reduced, zeta)
    Ldot = -(lam * rates.J + rates.W) / (1 - lam ** 2)
    return float(np.linalg.norm(Ldot - bracket(pair.L, pair.M)))


def integrate_unreduced(state: HomogeneousState, t_end: float, dt: float) -> List[HomogeneousState]:
    """Fixed step RK4 on (Z, Y)"""
    n_steps = step_count(t_end, dt)
    states = [state]
    Z, Y = state.Z.astype(complex), state.Y.astype(complex)

    def rhs(Z_, Y_):
        return unreduced_flow(HomogeneousState(Z_, Y_))

    for _ in range(n_steps):
        k1 = rhs(Z, Y)
        k2 = rhs(Z + 0.5 * dt * k1[0], Y + 0.5 * dt * k1[1])
        k3 = rhs(Z + 0.5 * dt * k2[0], Y + 0.5 * dt * k2[1])
        k4 = rhs(Z + dt * k3[0], Y + dt * k3[1])
        Z = Z + dt / 6 * (k1[0] + 2 * k2[0] + 2 * k3[0] + k4[0])
        Y = Y + dt / 6 * (k1[1] + 2 * k2[1] + 2 * k3[1] + k4[1])
        states.append(HomogeneousState(Z, Y))
    return states


def trajectory_lax_residual(states: List[HomogeneousState], dt: float, lam: complex) -> float:
    """Max |dL/dt - [L, M]| along a sampled trajectory, dL/dt by a five-point stencil"""
    if len(states) < 5:
        raise DomainError(f"Need at least 5 samples, got {len(states)}")
    N = states[0].N
    spec = reduced_spec(N)
    sd = spectral_pcm(N + 1)
    pairs = [lax_pair(reduced_pair(s).as_current(), lam, spec, sd) for s in states]
    worst = 0.0
    for i in range(2, len(pairs) - 2):
        Ldot = (-pairs[i + 2].L + 8 * pairs[i + 1].L - 8 * pairs[i - 1].L + pairs[i - 2].L) / (12 * dt)
        worst = max(worst, float(np.linalg.norm(Ldot - bracket(pairs[i].L, pairs[i].M))))
    return worst


def random_constrained_state(N: int, rng: np.random.Generator, radius: float = 0.7) -> HomogeneousState:
    """A chart point, a momentum and a random element of its gauge orbit"""
    chi = rng.standard_normal(N) + 1j * rng.standard_normal(N)
    chi *= radius * rng.uniform(0.1, 1.0) / np.linalg.norm(chi)
    w = rng.standard_normal(N) + 1j * rng.standard_normal(N)
    state = homogeneous_from_chart(chi, w)
    return state.phase_rotated(rng.uniform(-np.pi, np.pi)).shifted(rng.standard_normal())


def _max_abs(*arrays) -> float:
    return max(float(np.max(np.abs(a))) for a in arrays)


def reduction_suite(N: int = 2, samples: int = 20, seed: int = 0,
                    fd_step: float = 1e-5, lambdas: Optional[List[complex]] = None,
                    t_end: float = 1.0, dt: float = 1e-3) -> SuiteReport:
    """
    Check the reduction of the homogeneous-coordinate model at random points of
    the constraint surface, then along one integrated trajectory.

    Returns:
        SuiteReport with constraint, gauge, reduced equation and chart checks
    """
    if N < 1:
        raise DomainError(f"N must be at least 1, got {N}")
    lambdas = lambdas or [0.3, 0.7j, -0.5 + 0.2j]
    rng = np.random.default_rng(seed)
    zeta = cpn_zeta(N)
    report = SuiteReport(suite=f"reduction-cp{N}", seed=seed)

    origin = HomogeneousState.origin(N)
    at_origin = reduced_pair(origin)
    at_rest = projected_rhs(origin)
    report.add("origin", _max_abs(at_origin.W, at_origin.J, at_rest.W, at_rest.J), 1e-12)

    for _ in range(samples):
        state = random_constrained_state(N, rng)
        report.add("constraints", state.constraint_violation(), 1e-12)
        rates = constraint_rates(state)
        report.add("constraint-preservation", max(abs(rates[0]), abs(rates[1])), 1e-10)

        exact = unreduced_flow(state)
        numeric = gradient_flow(state)
        report.add("hamiltonian-gradient", _max_abs(exact[0] - numeric[0], exact[1] - numeric[1]), 1e-6)

        reduced = reduced_pair(state)
        report.add("traceless-antihermitian", reduced.structural_residual(), 1e-12)
        for moved in (state.phase_rotated(rng.uniform(-np.pi, np.pi)), state.shifted(rng.standard_normal())):
            other = reduced_pair(moved)
            report.add("gauge-invariance", _max_abs(other.W - reduced.W, other.J - reduced.J), 1e-12)

        projected = projected_rhs(state)
        expected = reduced_rhs(reduced, zeta)
        report.add("reduced-eom", _max_abs(projected.W - expected.W, projected.J - expected.J), 1e-6)
        for lam in lambdas:
            report.add("reduced-lax", reduced_lax_residual(reduced, lam, zeta), 1e-10)

        # back to the chart and forward along the chart equations
        chi, p = chart_recovery(state)
        Zdot, Ydot = exact
        plus = chart_recovery(HomogeneousState(state.Z + fd_step * Zdot, state.Y + fd_step * Ydot))
        minus = chart_recovery(HomogeneousState(state.Z - fd_step * Zdot, state.Y - fd_step * Ydot))
        chidot, pdot = first_order_flow(chi, p)
        report.add("chart-recovery",
                   _max_abs((plus[0] - minus[0]) / (2 * fd_step) - chidot,
                            (plus[1] - minus[1]) / (2 * fd_step) - pdot), 1e-6)

        w = rng.standard_normal(N) + 1j * rng.standard_normal(N)
        gauge_fixed = homogeneous_from_chart(chi, w)
        from_chart = chart_currents(chi, w)
        from_state = reduced_pair(gauge_fixed)
        report.add("chart-currents", _max_abs(from_chart.W - from_state.W, from_chart.J - from_state.J), 1e-10)
        report.add("hamiltonian-match", abs(tilde_hamiltonian(gauge_fixed) - hamiltonian_w(chi, w)), 1e-10)
        report.add("momentum-recovery", _max_abs(chart_recovery(gauge_fixed)[1] - p_from_w(chi, w)), 1e-10)

    states = integrate_unreduced(random_constrained_state(N, rng), t_end, dt)
    energies = np.array([tilde_hamiltonian(s) for s in states])
    report.add("energy-drift", float(np.max(np.abs(energies - energies[0])) / max(abs(energies[0]), 1.0)), 1e-8)
    report.add("constraint-drift", max(s.constraint_violation() for s in states), 1e-8)
    for lam in lambdas:
        report.add("trajectory-lax", trajectory_lax_residual(states, dt, lam), 1e-6)
    logger.info(f"Reduction suite CP^{N}: max residual {report.max_residual:.3e}")
    return report
