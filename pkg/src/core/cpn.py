"""
The point particle principal chiral model on CP^N: the chart chi with |chi| < 1,
normalized homogeneous coordinates Z, the momenta w and p, the actions and
Hamiltonians in both sets of variables, and the first order flow.
"""
from dataclasses import dataclass
from typing import Callable, Tuple

import numpy as np
from loguru import logger

from core.algebra import dagger, killing_form, solve_ad
from core.doubles import TStarPoint
from core.errors import ChartDomainError, DimensionMismatchError, DomainError
from models.config import step_count
from models.results import SuiteReport


CHART_MARGIN = 1e-10


def cpn_zeta(N: int) -> np.ndarray:
    """zeta = i diag(1_N, -N) in su(N+1)"""
    if N < 1:
        raise DomainError(f"N must be at least 1, got {N}")
    return 1j * np.diag(np.concatenate([np.ones(N), [-float(N)]])).astype(complex)


def check_chart(chi: np.ndarray) -> float:
    """Return |chi|, failing at the chart boundary"""
    norm = float(np.linalg.norm(chi))
    if norm >= 1 - CHART_MARGIN:
        raise ChartDomainError(norm)
    return norm


def chart_alpha(chi: np.ndarray) -> float:
    """alpha = (1 - sqrt(1 - |chi|^2)) / |chi|^2, equal to 1/2 at the origin"""
    r2 = float(np.vdot(chi, chi).real)
    s = np.sqrt(1 - r2)
    return 1.0 / (1.0 + s)


def _check_pair(chi: np.ndarray, other: np.ndarray) -> None:
    if chi.shape != other.shape:
        raise DimensionMismatchError(chi.shape, other.shape)


def cpn_chart_embed(chi: np.ndarray) -> np.ndarray:
    """The gauge-fixed unitary k(chi) with last column Z(chi)"""
    chi = np.asarray(chi, dtype=complex)
    check_chart(chi)
    N = chi.shape[0]
    s = np.sqrt(1 - np.vdot(chi, chi).real)
    k = np.zeros((N + 1, N + 1), dtype=complex)
    k[:N, :N] = np.eye(N) - chart_alpha(chi) * np.outer(chi, chi.conj())
    k[:N, N] = chi
    k[N, :N] = -chi.conj()
    k[N, N] = s
    return k


def homogeneous(chi: np.ndarray) -> np.ndarray:
    """Z = (chi, sqrt(1 - |chi|^2))"""
    chi = np.asarray(chi, dtype=complex)
    check_chart(chi)
    return np.concatenate([chi, [np.sqrt(1 - np.vdot(chi, chi).real)]])


def homogeneous_velocity(chi: np.ndarray, chidot: np.ndarray) -> np.ndarray:
    s = np.sqrt(1 - np.vdot(chi, chi).real)
    sdot = -np.vdot(chi, chidot).real / s
    return np.concatenate([chidot, [sdot]])


def chart_from_homogeneous(Z: np.ndarray) -> np.ndarray:
    """Normalize and rotate the phase of Z_{N+1} away"""
    Z = np.asarray(Z, dtype=complex)
    last = Z[-1]
    if abs(last) < CHART_MARGIN:
        raise ChartDomainError(1.0)
    return Z[:-1] * np.exp(-1j * np.angle(last)) / np.linalg.norm(Z)


def chart_velocity(chi: np.ndarray, chidot: np.ndarray, sign: float = 1.0) -> np.ndarray:
    """
    v = chi. - (d/dt sqrt(1 - |chi|^2)) chi - alpha (chi^dagger chi.) chi

    `sign = -1` flips the sign of the middle term.
    """
    chi = np.asarray(chi, dtype=complex)
    chidot = np.asarray(chidot, dtype=complex)
    _check_pair(chi, chidot)
    check_chart(chi)
    s = np.sqrt(1 - np.vdot(chi, chi).real)
    c = np.vdot(chi, chidot)
    sdot = -c.real / s
    return chidot - sign * sdot * chi - chart_alpha(chi) * c * chi


def second_order_integrand(chi: np.ndarray, chidot: np.ndarray, sign: float = 1.0) -> float:
    """|v|^2 - (N+1)^2 |chi|^2"""
    N = len(chi)
    v = chart_velocity(chi, chidot, sign)
    return float(np.vdot(v, v).real - (N + 1) ** 2 * np.vdot(chi, chi).real)


def fubini_study(Z: np.ndarray, dZ: np.ndarray) -> float:
    """|dZ|^2 - |Z^dagger dZ|^2 on normalized Z"""
    _check_pair(Z, dZ)
    return float(np.vdot(dZ, dZ).real - abs(np.vdot(Z, dZ)) ** 2)


def global_integrand(Z: np.ndarray, Zdot: np.ndarray) -> float:
    """|Z.|^2 - |Z^dagger Z.|^2 + (N+1)^2 (|Z_{N+1}|^2 - 1), multiplier eliminated on |Z| = 1"""
    N = len(Z) - 1
    return fubini_study(Z, Zdot) + (N + 1) ** 2 * (abs(Z[-1]) ** 2 - 1)


# ---------------------------------------------------------------------------
# First order data
# ---------------------------------------------------------------------------

def rho_from_w(w: np.ndarray) -> np.ndarray:
    """rho' = i [[0, w], [w^dagger, 0]]"""
    N = len(w)
    rho = np.zeros((N + 1, N + 1), dtype=complex)
    rho[:N, N] = 1j * w
    rho[N, :N] = 1j * np.conj(w)
    return rho


def p_from_w(chi: np.ndarray, w: np.ndarray) -> np.ndarray:
    chi = np.asarray(chi, dtype=complex)
    w = np.asarray(w, dtype=complex)
    _check_pair(chi, w)
    check_chart(chi)
    s = np.sqrt(1 - np.vdot(chi, chi).real)
    cw = np.vdot(chi, w)
    return w - (np.conj(cw) - cw) / (2 * s) * chi - chart_alpha(chi) * cw * chi


def w_from_p(chi: np.ndarray, p: np.ndarray) -> np.ndarray:
    chi = np.asarray(chi, dtype=complex)
    p = np.asarray(p, dtype=complex)
    _check_pair(chi, p)
    check_chart(chi)
    s = np.sqrt(1 - np.vdot(chi, chi).real)
    cp = np.vdot(chi, p)
    return p + (np.conj(cp) - cp) / (2 * s) * chi + chart_alpha(chi) / s * cp * chi


def xi_from_w(chi: np.ndarray, w: np.ndarray) -> np.ndarray:
    return w - chart_alpha(chi) * np.vdot(chi, w) * chi


def first_order_integrand_w(chi: np.ndarray, chidot: np.ndarray, w: np.ndarray, sign: float = 1.0) -> float:
    """-(2 Im(w^dagger v) + w^dagger w + (N+1)^2 |chi|^2)"""
    N = len(chi)
    v = chart_velocity(chi, chidot, sign)
    return float(-(2 * np.vdot(w, v).imag + np.vdot(w, w).real + (N + 1) ** 2 * np.vdot(chi, chi).real))


def hamiltonian_w(chi: np.ndarray, w: np.ndarray) -> float:
    N = len(chi)
    check_chart(chi)
    return float(np.vdot(w, w).real + (N + 1) ** 2 * np.vdot(chi, chi).real)


def _invariants(chi: np.ndarray, p: np.ndarray) -> Tuple[float, complex, float]:
    """(1 - |chi|^2, chi^dagger p - p^dagger chi, chi^dagger p + p^dagger chi)"""
    check_chart(chi)
    cp = np.vdot(chi, p)
    return 1 - np.vdot(chi, chi).real, cp - np.conj(cp), 2 * cp.real


def hamiltonian_p(chi: np.ndarray, p: np.ndarray) -> float:
    N = len(chi)
    one_minus, minus, plus = _invariants(chi, p)
    value = (np.vdot(p, p).real + plus ** 2 / (4 * one_minus) + 0.25 * minus ** 2
             + (N + 1) ** 2 * (1 - one_minus))
    return float(np.real(value))


def first_order_integrand_p(chi: np.ndarray, chidot: np.ndarray, p: np.ndarray) -> float:
    """i p^dagger chi. - i chi.^dagger p - H(chi, p)"""
    kinetic = 1j * np.vdot(p, chidot) - 1j * np.vdot(chidot, p)
    return float(kinetic.real - hamiltonian_p(chi, p))


def first_order_flow(chi: np.ndarray, p: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """(chi., p.) from i chi. = dH/d(conj p) and i p. = dH/d(conj chi)"""
    chi = np.asarray(chi, dtype=complex)
    p = np.asarray(p, dtype=complex)
    _check_pair(chi, p)
    N = len(chi)
    one_minus, minus, plus = _invariants(chi, p)
    i_chidot = p + plus / (2 * one_minus) * chi - 0.5 * minus * chi
    i_pdot = (plus / (2 * one_minus) * p + (N + 1) ** 2 * chi
              + plus ** 2 / (4 * one_minus ** 2) * chi + 0.5 * minus * p)
    return -1j * i_chidot, -1j * i_pdot


def conjugate_derivative(f: Callable[[np.ndarray], float], z: np.ndarray, h: float = 1e-6) -> np.ndarray:
    """df/d(conj z) = (d/dRe z + i d/dIm z) / 2 from central differences"""
    z = np.asarray(z, dtype=complex)
    out = np.zeros_like(z)
    for a in range(len(z)):
        e = np.zeros_like(z)
        e[a] = h
        d_re = (f(z + e) - f(z - e)) / (2 * h)
        d_im = (f(z + 1j * e) - f(z - 1j * e)) / (2 * h)
        out[a] = 0.5 * (d_re + 1j * d_im)
    return out


def wirtinger_flow(chi: np.ndarray, p: np.ndarray, h: float = 1e-6) -> Tuple[np.ndarray, np.ndarray]:
    """The symplectic gradient of hamiltonian_p from central differences"""
    chi = np.asarray(chi, dtype=complex)
    p = np.asarray(p, dtype=complex)
    dH_dpbar = conjugate_derivative(lambda q: hamiltonian_p(chi, q), p, h)
    dH_dchibar = conjugate_derivative(lambda c: hamiltonian_p(c, p), chi, h)
    return -1j * dH_dpbar, -1j * dH_dchibar


@dataclass
class ChartTrajectory:
    times: np.ndarray
    chi: np.ndarray
    p: np.ndarray
    energy: np.ndarray

    @property
    def energy_drift(self) -> float:
        scale = max(abs(self.energy[0]), 1.0)
        return float(np.max(np.abs(self.energy - self.energy[0])) / scale)


def integrate_chart_flow(chi0: np.ndarray, p0: np.ndarray, t_end: float, dt: float) -> ChartTrajectory:
    """RK4 on the chart equations; leaving the chart raises ChartDomainError"""
    n_steps = step_count(t_end, dt)
    chi = np.asarray(chi0, dtype=complex)
    p = np.asarray(p0, dtype=complex)
    times = [0.0]
    chis, ps, energy = [chi], [p], [hamiltonian_p(chi, p)]
    for step in range(1, n_steps + 1):
        k1 = first_order_flow(chi, p)
        k2 = first_order_flow(chi + 0.5 * dt * k1[0], p + 0.5 * dt * k1[1])
        k3 = first_order_flow(chi + 0.5 * dt * k2[0], p + 0.5 * dt * k2[1])
        k4 = first_order_flow(chi + dt * k3[0], p + dt * k3[1])
        chi = chi + dt / 6 * (k1[0] + 2 * k2[0] + 2 * k3[0] + k4[0])
        p = p + dt / 6 * (k1[1] + 2 * k2[1] + 2 * k3[1] + k4[1])
        times.append(step * dt)
        chis.append(chi)
        ps.append(p)
        energy.append(hamiltonian_p(chi, p))
    return ChartTrajectory(np.array(times), np.array(chis), np.array(ps), np.array(energy))


def chart_point_velocity(chi: np.ndarray, w: np.ndarray) -> np.ndarray:
    """
    chi. of the E-model at (chi, w): the gauge-fixed chart point moved along
    k. = -k rho'.

    Z = k e_{N+1} keeps unit norm and Z_{N+1} = sqrt(1 - |chi|^2) > 0, so only
    the phase rotation of chart_from_homogeneous contributes beyond the upper block.
    """
    k = cpn_chart_embed(chi)
    Zdot = -k @ rho_from_w(w)[:, -1]
    return Zdot[:-1] - 1j * (Zdot[-1] / k[-1, -1]).imag * np.asarray(chi, dtype=complex)


def point_from_chart(chi: np.ndarray, w: np.ndarray, zeta: np.ndarray) -> TStarPoint:
    """T*K point (k(chi), Ad_k rho) with [zeta, rho] = rho'(w)"""
    k = cpn_chart_embed(chi)
    rho = solve_ad(zeta, rho_from_w(w))
    return TStarPoint(k, k @ rho @ dagger(k))


def _random_chart_point(N: int, rng: np.random.Generator, low: float = 0.05, high: float = 0.8) -> np.ndarray:
    chi = rng.standard_normal(N) + 1j * rng.standard_normal(N)
    return chi * rng.uniform(low, high) / np.linalg.norm(chi)


def cpn_suite(N: int, samples: int = 50, seed: int = 0, t_end: float = 1.0, dt: float = 1e-3) -> SuiteReport:
    """
    Chart, homogeneous and first order descriptions of the CP^N model compared
    at random chart points, plus the energy drift of the chart flow.
    """
    zeta = cpn_zeta(N)
    rng = np.random.default_rng(seed)
    report = SuiteReport(suite=f"cp{N}", seed=seed)

    for _ in range(samples):
        chi = _random_chart_point(N, rng)
        chidot = rng.standard_normal(N) + 1j * rng.standard_normal(N)
        w = rng.standard_normal(N) + 1j * rng.standard_normal(N)
        r2 = float(np.vdot(chi, chi).real)

        k = cpn_chart_embed(chi)
        report.add("unitary-embedding", float(np.max(np.abs(dagger(k) @ k - np.eye(N + 1)))), 1e-12)
        kk = dagger(k) @ zeta @ k - zeta
        report.add("potential", abs(killing_form(kk, kk) + 2 * (N + 1) ** 2 * r2), 1e-12)

        Z, Zdot = homogeneous(chi), homogeneous_velocity(chi, chidot)
        chart = second_order_integrand(chi, chidot)
        report.add("chart-vs-global", abs(chart - global_integrand(Z, Zdot)), 1e-10)
        phase = np.exp(1j * rng.uniform(-np.pi, np.pi))
        report.add("fubini-study-gauge", abs(fubini_study(phase * Z, phase * Zdot) - fubini_study(Z, Zdot)), 1e-12)

        v = chart_velocity(chi, chidot)
        report.add("momentum-elimination", abs(first_order_integrand_w(chi, chidot, 1j * v) - chart), 1e-10)

        p = p_from_w(chi, w)
        report.add("momentum-maps", float(np.max(np.abs(w_from_p(chi, p) - w))), 1e-12)
        report.add("hamiltonian-match", abs(hamiltonian_w(chi, w) - hamiltonian_p(chi, p)), 1e-10)
        report.add("point-velocity", float(np.max(np.abs(chart_velocity(chi, chart_point_velocity(chi, w)) + 1j * w))),
                   1e-10)

        exact = first_order_flow(chi, p)
        numeric = wirtinger_flow(chi, p)
        report.add("hamiltonian-flow", max(float(np.max(np.abs(exact[0] - numeric[0]))),
                                           float(np.max(np.abs(exact[1] - numeric[1])))), 1e-6)

    chi0 = _random_chart_point(N, rng, 0.1, 0.4)
    p0 = 0.2 * (rng.standard_normal(N) + 1j * rng.standard_normal(N))
    traj = integrate_chart_flow(chi0, p0, t_end, dt)
    report.add("energy-drift", traj.energy_drift, 1e-8)
    logger.info(f"CP^{N} suite: max residual {report.max_residual:.3e}")
    return report
