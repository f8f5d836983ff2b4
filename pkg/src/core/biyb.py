"""
Second order form of the bi-Yang-Baxter point particle model on SU(N)/T:
the operator block 1 - P-perp (eta R + mu R_k)^2 P-perp, the velocity V(k),
the momentum, the multiplier, the first and second order integrands, the
SL(N,C) point of a given momentum and the closed forms for SU(2) and the
Yang-Baxter deformed CP^N.
"""
from typing import Callable, Optional, Sequence, Tuple

import numpy as np
from loguru import logger
from scipy.linalg import expm

from core.algebra import (
    LinearMap,
    bracket,
    cartan_element,
    complement_basis,
    dagger,
    killing_form,
    project_centralizer,
    project_complement,
    r_twisted,
    random_special_unitary,
    random_su,
    require_unitary,
    su_basis,
    yang_baxter_R,
)
from core.cpn import (
    chart_velocity,
    cpn_chart_embed,
    cpn_zeta,
    fubini_study,
    homogeneous,
    homogeneous_velocity,
    second_order_integrand as cpn_second_order_integrand,
)
from core.doubles import EOperator, LuWeinsteinDouble, SLPoint, iwasawa_decompose
from core.dynamics import ModelSpec, current_of, hamiltonian
from core.errors import DomainError, SingularOperatorError
from core.pendulum import kinv_kprime, pcm_second_order_integrand, sphere_point, su2_from_sphere
from models.results import SuiteReport


BLOCK_CONDITION_LIMIT = 1e12


class OperatorBlock:
    """
    Deformation W = eta R + mu R_k at a fixed k and the block
    B = 1 - P-perp W^2 P-perp on im(P-perp), in an orthonormal root basis.
    """

    def __init__(self, k: np.ndarray, xi: np.ndarray, eta: float, mu: float):
        require_unitary(k)
        if eta < 0 or mu < 0:
            raise DomainError(f"eta and mu must be non-negative, got ({eta}, {mu})")
        self.k = k
        self.xi = xi
        self.eta = eta
        self.mu = mu
        self.basis = complement_basis(xi)
        square = np.array([[self.coordinate(a, self.deform(self.deform(b))) for b in self.basis]
                           for a in self.basis])
        self.matrix = np.eye(len(self.basis)) - square
        cond = float(np.linalg.cond(self.matrix))
        if not np.isfinite(cond) or cond > BLOCK_CONDITION_LIMIT:
            raise SingularOperatorError("operator block", cond)
        logger.debug(f"Operator block of size {len(self.basis)}, condition number {cond:.3e}")

    def deform(self, X: np.ndarray) -> np.ndarray:
        """eta R X + mu k^-1 R(k X k^-1) k"""
        out = self.eta * yang_baxter_R(X)
        if self.mu:
            out = out + self.mu * r_twisted(dagger(self.k), X)
        return out

    @staticmethod
    def coordinate(e: np.ndarray, X: np.ndarray) -> float:
        """-1/2 Re tr(e X)"""
        return -0.5 * float(np.real(np.trace(e @ X)))

    def coordinates(self, X: np.ndarray) -> np.ndarray:
        return np.array([self.coordinate(e, X) for e in self.basis])

    def element(self, y: Sequence[float]) -> np.ndarray:
        out = np.zeros_like(self.xi)
        for c, e in zip(y, self.basis):
            out = out + c * e
        return out

    def solve(self, c: np.ndarray) -> np.ndarray:
        return np.linalg.solve(self.matrix, c)


def velocity(block: OperatorBlock, kdot: np.ndarray) -> np.ndarray:
    """V(k) = k^-1 k. - W(k^-1 xi k - xi)"""
    return dagger(block.k) @ kdot - block.deform(kinv_kprime(block.k, block.xi))


def second_order_integrand(k: np.ndarray, kdot: np.ndarray, xi: np.ndarray, eta: float, mu: float) -> float:
    """(P-perp V, B^-1 P-perp V) + 1/2 (k^-1 k', k^-1 k')"""
    block = OperatorBlock(k, xi, eta, mu)
    c = block.coordinates(velocity(block, kdot))
    w = kinv_kprime(k, xi)
    return float(c @ block.solve(c) + 0.5 * killing_form(w, w))


def momentum(k: np.ndarray, kdot: np.ndarray, xi: np.ndarray, eta: float, mu: float) -> np.ndarray:
    """rho' = -B^-1 P-perp V, the stationary point of the first order integrand"""
    block = OperatorBlock(k, xi, eta, mu)
    return -block.element(block.solve(block.coordinates(velocity(block, kdot))))


def first_order_integrand(k: np.ndarray, kdot: np.ndarray, rho_p: np.ndarray,
                          xi: np.ndarray, eta: float, mu: float) -> float:
    """tr(rho' u + 1/2 rho'^2 + 1/2 (k^-1 k' + W rho')^2)"""
    block = OperatorBlock(k, xi, eta, mu)
    u = dagger(k) @ kdot
    shifted = kinv_kprime(k, xi) + block.deform(rho_p)
    return float(np.real(np.trace(rho_p @ u + 0.5 * rho_p @ rho_p + 0.5 * shifted @ shifted)))


def closed_hamiltonian(k: np.ndarray, rho_p: np.ndarray, xi: np.ndarray, eta: float, mu: float) -> float:
    """-1/2 tr(rho'^2 + (k^-1 k' + W rho')^2)"""
    block = OperatorBlock(k, xi, eta, mu)
    shifted = kinv_kprime(k, xi) + block.deform(rho_p)
    return float(-0.5 * np.real(np.trace(rho_p @ rho_p + shifted @ shifted)))


def multiplier(k: np.ndarray, kdot: np.ndarray, xi: np.ndarray, eta: float, mu: float) -> np.ndarray:
    """A(k) = P V + P W^2 P-perp B^-1 P-perp V"""
    block = OperatorBlock(k, xi, eta, mu)
    V = velocity(block, kdot)
    q = block.element(block.solve(block.coordinates(V)))
    return project_centralizer(xi, V) + project_centralizer(xi, block.deform(block.deform(q)))


def multiplier_stationarity(k: np.ndarray, kdot: np.ndarray, xi: np.ndarray, eta: float, mu: float) -> float:
    """|P (1 - W^2)^-1 (V - A)|, zero at the multiplier"""
    block = OperatorBlock(k, xi, eta, mu)
    basis = su_basis(k.shape[0])
    square = LinearMap.from_function(lambda X: block.deform(block.deform(X)), basis)
    rhs = velocity(block, kdot) - multiplier(k, kdot, xi, eta, mu)
    z = np.linalg.solve(np.eye(basis.dim) - square.matrix, np.real(basis.coordinates(rhs)))
    return float(np.linalg.norm(project_centralizer(xi, basis.element(z))))


# ---------------------------------------------------------------------------
# SL(N, C) points and the flow
# ---------------------------------------------------------------------------

def biyb_spec(N: int, eta: float, mu: float, xi: Optional[np.ndarray] = None, label: str = "") -> ModelSpec:
    """E_{eta,mu} model on SL(N,C) with a Cartan xi (regular by default)"""
    if xi is None:
        xi = cartan_element([N - 1 - 2 * a for a in range(N)])
    return ModelSpec(LuWeinsteinDouble(N, eta), EOperator.biyb(N, eta, mu), xi, label=label or f"biyb-su{N}")


def unipotent_conjugator(xi: np.ndarray, T: np.ndarray, tol: float = 1e-10) -> np.ndarray:
    """
    Unit upper triangular n with n xi n^-1 - xi = T for diagonal xi and strictly
    upper T, solved superdiagonal by superdiagonal.
    """
    N = xi.shape[0]
    d = np.diag(xi)
    n = np.eye(N, dtype=complex)
    for offset in range(1, N):
        for a in range(N - offset):
            b = a + offset
            gap = d[b] - d[a]
            if abs(gap) < 1e-12:
                continue
            n[a, b] = (T[a, b] + T[a, a + 1:b] @ n[a + 1:b, b]) / gap
    residual = float(np.max(np.abs(n @ xi @ np.linalg.inv(n) - xi - T)))
    if residual > tol:
        raise DomainError(f"T is not reachable by a unipotent conjugation (residual {residual:.3e})")
    return n


def point_from_momentum(k: np.ndarray, rho_p: np.ndarray, xi: np.ndarray, eta: float) -> SLPoint:
    """l = k n with n xi n^-1 - xi = 2 i eta upper(rho')"""
    require_unitary(k)
    T = 2j * eta * np.triu(rho_p, 1)
    return SLPoint(k @ unipotent_conjugator(xi, T))


def flow_velocity(l: SLPoint, spec: ModelSpec) -> Tuple[np.ndarray, np.ndarray]:
    """
    (k, k.) of the unitary Iwasawa factor along dl/dt = (E j) l.

    X = k^-1 (E j) k splits as S + (an part), S anti-Hermitian with the lower
    triangle of X.
    """
    k = iwasawa_decompose(l).g
    X = dagger(k) @ spec.e_op(current_of(l, spec)) @ k
    lower = np.tril(X, -1)
    S = lower - dagger(lower) + 1j * np.diag(np.diag(X).imag)
    return k, k @ S


def random_stabilizer(xi: np.ndarray, rng: np.random.Generator) -> Tuple[np.ndarray, np.ndarray]:
    """(h, h.) with h = exp(P Z) and h. h^-1 in the centralizer of xi"""
    N = xi.shape[0]
    h = expm(project_centralizer(xi, random_su(N, rng)))
    Y = project_centralizer(xi, random_su(N, rng))
    return h, Y @ h


def even_part(integrand: Callable[[np.ndarray, np.ndarray], float], k: np.ndarray, kdot: np.ndarray) -> float:
    return 0.5 * (integrand(k, kdot) + integrand(k, -kdot))


# ---------------------------------------------------------------------------
# Closed forms
# ---------------------------------------------------------------------------

def su2_closed_form(x: Sequence[float], xdot: Sequence[float], eta: float, mu: float) -> float:
    """Even part of the SU(2) integrand on the sphere x = coefficients of k xi k^-1"""
    x1, x2, x3 = x
    D = 1 + eta ** 2 + mu ** 2 + 2 * mu * eta * x3
    twist = x1 * xdot[1] - x2 * xdot[0]
    kinetic = float(np.dot(xdot, xdot)) + mu ** 2 * twist ** 2 / (1 + (eta + mu * x3) ** 2)
    return 0.25 * kinetic / D + (x3 - 1) * (2 - (eta - mu) ** 2 * (x3 - 1)) / D


def su2_closed_form_spherical(theta: float, phi: float, thetadot: float, phidot: float,
                              eta: float, mu: float) -> float:
    c = np.cos(theta)
    D = 1 + eta ** 2 + mu ** 2 + 2 * mu * eta * c
    E = 1 + eta ** 2 + mu ** 2 * c ** 2 + 2 * mu * eta * c
    kinetic = 0.25 * (thetadot ** 2 / D + np.sin(theta) ** 2 * phidot ** 2 / E)
    return kinetic + (c - 1) * (2 - (eta - mu) ** 2 * (c - 1)) / D


def spherical_coordinates(x: np.ndarray, xdot: np.ndarray) -> Tuple[float, float, float, float]:
    theta = float(np.arccos(np.clip(x[2], -1.0, 1.0)))
    phi = float(np.arctan2(x[1], x[0]))
    thetadot = float(-xdot[2] / np.sin(theta))
    phidot = float((x[0] * xdot[1] - x[1] * xdot[0]) / (x[0] ** 2 + x[1] ** 2))
    return theta, phi, thetadot, phidot


def yb_cpn_chart_integrand(chi: np.ndarray, chidot: np.ndarray, eta: float) -> float:
    """|v - eta (N+1) s chi|^2 / (1 + eta^2) - (N+1)^2 |chi|^2"""
    N = len(chi)
    s = np.sqrt(1 - np.vdot(chi, chi).real)
    shifted = chart_velocity(chi, chidot) - eta * (N + 1) * s * np.asarray(chi, dtype=complex)
    return float(np.vdot(shifted, shifted).real / (1 + eta ** 2) - (N + 1) ** 2 * np.vdot(chi, chi).real)


def yb_cpn_global_integrand(Z: np.ndarray, Zdot: np.ndarray, eta: float) -> float:
    """Fubini-Study kinetic term over 1 + eta^2 plus the deformed potential"""
    N = len(Z) - 1
    last = abs(Z[-1]) ** 2
    potential = (N + 1) ** 2 * ((2 * eta ** 2 + 1) * last - eta ** 2 * last ** 2)
    return float((fubini_study(Z, Zdot) + potential) / (1 + eta ** 2))


def chart_group_velocity(chi: np.ndarray, chidot: np.ndarray, h: float = 1e-3) -> Tuple[np.ndarray, np.ndarray]:
    """(k, k.) along chi + t chi. by a five-point stencil"""
    chi = np.asarray(chi, dtype=complex)
    chidot = np.asarray(chidot, dtype=complex)
    f = [cpn_chart_embed(chi + t * h * chidot) for t in (-2, -1, 1, 2)]
    return cpn_chart_embed(chi), (f[0] - 8 * f[1] + 8 * f[2] - f[3]) / (12 * h)


# ---------------------------------------------------------------------------
# Suites
# ---------------------------------------------------------------------------

def _random_tangent(N: int, rng: np.random.Generator) -> Tuple[np.ndarray, np.ndarray]:
    k = random_special_unitary(N, rng)
    return k, k @ random_su(N, rng)


def biyb_suite(N: int, eta: float, mu: float, xi: Optional[np.ndarray] = None,
               samples: int = 20, seed: int = 0, threshold: float = 1e-9) -> SuiteReport:
    """
    Momentum, multiplier, Hamiltonian, flow, gauge and undeformed-limit checks of
    the second order form at random (k, k.).
    """
    spec = biyb_spec(N, eta, mu, xi)
    xi = spec.xi_matrix
    rng = np.random.default_rng(seed)
    report = SuiteReport(suite=f"biyb-su{N}", seed=seed)

    for _ in range(samples):
        k, kdot = _random_tangent(N, rng)
        value = second_order_integrand(k, kdot, xi, eta, mu)
        rho_p = momentum(k, kdot, xi, eta, mu)
        report.add("momentum-elimination",
                   abs(first_order_integrand(k, kdot, rho_p, xi, eta, mu) - value), 1e-10)
        report.add("multiplier-stationarity", multiplier_stationarity(k, kdot, xi, eta, mu), 1e-10)

        h, hdot = random_stabilizer(xi, rng)
        moved = second_order_integrand(k @ h, kdot @ h + k @ hdot, xi, eta, mu)
        report.add("gauge-invariance", abs(moved - value), threshold)

        report.add("pcm-limit", abs(second_order_integrand(k, kdot, xi, 0.0, 0.0)
                                    - pcm_second_order_integrand(k, kdot, xi)), 1e-12)
        pcm = pcm_second_order_integrand(k, kdot, xi)
        step = 1e-4
        far = abs(second_order_integrand(k, kdot, xi, eta * step, mu * step) - pcm)
        near = abs(second_order_integrand(k, kdot, xi, eta * step / 10, mu * step / 10) - pcm)
        report.add("pcm-limit-rate", abs(far / near - 10.0) / 10.0, 1e-2)

        target = project_complement(xi, random_su(N, rng))
        l = point_from_momentum(k, target, xi, eta)
        report.add("hamiltonian-closed-form",
                   abs(hamiltonian(current_of(l, spec), spec) - closed_hamiltonian(k, target, xi, eta, mu)),
                   threshold)
        k_l, kdot_l = flow_velocity(l, spec)
        report.add("momentum-from-flow",
                   float(np.max(np.abs(momentum(k_l, kdot_l, xi, eta, mu) - target))), threshold)

    logger.info(f"bi-YB suite N={N} eta={eta} mu={mu}: max residual {report.max_residual:.3e}")
    return report


def biyb_su2_suite(eta: float, mu: float, samples: int = 100, seed: int = 0,
                   threshold: float = 1e-10) -> SuiteReport:
    """The general integrand against the sphere and spherical-coordinate closed forms"""
    xi = 1j * np.diag([1.0, -1.0]).astype(complex)
    rng = np.random.default_rng(seed)
    report = SuiteReport(suite="biyb-su2-closed-form", seed=seed)

    def integrand(a: float, b: float) -> Callable[[np.ndarray, np.ndarray], float]:
        return lambda k, kdot: second_order_integrand(k, kdot, xi, a, b)

    for _ in range(samples):
        x = rng.standard_normal(3)
        x /= np.linalg.norm(x)
        k = su2_from_sphere(x)
        u = random_su(2, rng)
        kdot = k @ u
        xdot = sphere_point(k @ bracket(u, xi) @ dagger(k))
        general = even_part(integrand(eta, mu), k, kdot)
        report.add("sphere-form", abs(general - su2_closed_form(x, xdot, eta, mu)), threshold)
        report.add("spherical-form",
                   abs(general - su2_closed_form_spherical(*spherical_coordinates(x, xdot), eta, mu)), threshold)
        undeformed = even_part(integrand(0.0, 0.0), k, kdot)
        report.add("undeformed-form", abs(undeformed - (0.25 * float(xdot @ xdot) + 2 * (x[2] - 1))), threshold)
    return report


def yb_cpn_suite(N: int, eta: float, samples: int = 50, seed: int = 0,
                 threshold: float = 1e-9) -> SuiteReport:
    """Chart and global Yang-Baxter CP^N forms against the general integrand at mu = 0"""
    xi = cpn_zeta(N)
    rng = np.random.default_rng(seed)
    report = SuiteReport(suite=f"yb-cp{N}", seed=seed)
    for _ in range(samples):
        chi = rng.standard_normal(N) + 1j * rng.standard_normal(N)
        chi *= rng.uniform(0.05, 0.6) / np.linalg.norm(chi)
        chidot = rng.standard_normal(N) + 1j * rng.standard_normal(N)
        k, kdot = chart_group_velocity(chi, chidot)

        chart = yb_cpn_chart_integrand(chi, chidot, eta)
        report.add("chart-form", abs(second_order_integrand(k, kdot, xi, eta, 0.0) - chart), threshold)
        even_chart = 0.5 * (chart + yb_cpn_chart_integrand(chi, -chidot, eta))
        glob = yb_cpn_global_integrand(homogeneous(chi), homogeneous_velocity(chi, chidot), eta)
        report.add("global-form", abs(glob - even_chart - (N + 1) ** 2), 1e-10)
        report.add("undeformed-limit",
                   abs(yb_cpn_chart_integrand(chi, chidot, 0.0) - cpn_second_order_integrand(chi, chidot)), 1e-12)
    return report
