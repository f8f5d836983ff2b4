"""
Closed-form bi-Yang-Baxter CP^2 model: SU(3) elements k = k1(a, b) k2(theta),
the 8x8 tables of R, P-perp, Ad_k and R_k in the x-basis, the 4x4 operator
block with its inverse, the velocity columns and the resulting action, all
checked entry by entry against the general machinery.
"""
from dataclasses import dataclass
from typing import Dict

import numpy as np
from loguru import logger

from core.algebra import (
    LinearMap,
    dagger,
    r_twisted,
    stabilizer_projectors,
    su3_encode,
    x_basis,
    yang_baxter_R,
)
from core.biyb import OperatorBlock, second_order_integrand, velocity
from core.errors import DomainError
from models.results import SuiteReport


APPENDIX_XI = 1j * np.diag([1.0, 1.0, -2.0]).astype(complex)

# x-basis indices of the complement of the stabilizer (x4, x5, x6, x7)
COMPLEMENT = slice(3, 7)


@dataclass(frozen=True)
class AppendixPoint:
    """(a, b, theta) with |a|^2 + |b|^2 = 1 and a tangent velocity"""
    a: complex
    b: complex
    theta: float
    adot: complex = 0.0
    bdot: complex = 0.0
    thetadot: float = 0.0

    def __post_init__(self):
        norm = abs(self.a) ** 2 + abs(self.b) ** 2
        if abs(norm - 1) > 1e-12:
            raise DomainError(f"|a|^2 + |b|^2 must be 1, got {norm:.17g}")
        radial = (np.conj(self.a) * self.adot + np.conj(self.b) * self.bdot).real
        if abs(radial) > 1e-12:
            raise DomainError(f"(adot, bdot) must be tangent, Re(conj(a) adot + conj(b) bdot) = {radial:.3e}")

    @classmethod
    def random(cls, rng: np.random.Generator) -> "AppendixPoint":
        v = rng.standard_normal(2) + 1j * rng.standard_normal(2)
        v /= np.linalg.norm(v)
        vdot = rng.standard_normal(2) + 1j * rng.standard_normal(2)
        vdot -= np.vdot(v, vdot).real * v
        theta = rng.uniform(0.15, np.pi / 2 - 0.15)
        return cls(complex(v[0]), complex(v[1]), float(theta), complex(vdot[0]), complex(vdot[1]),
                   float(rng.standard_normal()))

    def k1(self) -> np.ndarray:
        a, b = self.a, self.b
        return np.array([[a, -np.conj(b), 0], [b, np.conj(a), 0], [0, 0, 1]], dtype=complex)

    def k2(self) -> np.ndarray:
        c, s = np.cos(self.theta), np.sin(self.theta)
        return np.array([[c, 0, s], [0, 1, 0], [-s, 0, c]], dtype=complex)

    def k(self) -> np.ndarray:
        return self.k1() @ self.k2()

    def kdot(self) -> np.ndarray:
        ad, bd = self.adot, self.bdot
        k1dot = np.array([[ad, -np.conj(bd), 0], [bd, np.conj(ad), 0], [0, 0, 0]], dtype=complex)
        c, s = np.cos(self.theta), np.sin(self.theta)
        k2dot = self.thetadot * np.array([[-s, 0, c], [0, 0, 0], [-c, 0, -s]], dtype=complex)
        return k1dot @ self.k2() + self.k1() @ k2dot


@dataclass(frozen=True)
class AppendixScalars:
    """Scalars of the operator block at (a, b, theta; eta, mu)"""
    A: float
    ab2: float
    sigma: float
    tau: float
    c: float
    s: float
    eps1: float
    eps2: float
    p: float
    q: float
    beta: float
    delta: float

    @classmethod
    def at(cls, point: AppendixPoint, eta: float, mu: float) -> "AppendixScalars":
        a, b = point.a, point.b
        A = abs(a) ** 2
        ab2 = A * abs(b) ** 2
        c, s = np.cos(point.theta), np.sin(point.theta)
        gamma, xs = np.cos(2 * point.theta), np.sin(2 * point.theta)
        return cls(
            A=A, ab2=ab2, sigma=float((a * b).imag), tau=float(-(a * b).real), c=c, s=s,
            eps1=1 + (eta + mu * gamma) ** 2 + mu ** 2 * xs ** 2 * ab2,
            eps2=1 + eta ** 2 + mu ** 2 + 2 * eta * mu * gamma,
            p=mu * xs * s * (eta - mu * (A - abs(b) ** 2)),
            q=eta * mu * xs * s,
            beta=1 + (eta + mu) ** 2 - 4 * eta * mu * s ** 2 * A,
            delta=-4 * mu ** 2 * s ** 2,
        )

    @property
    def beta_reduced(self) -> float:
        return self.beta / self.ab2

    @property
    def delta1(self) -> float:
        return self.ab2 / (self.eps1 * self.beta + (self.eps1 * self.delta - self.p ** 2) * self.ab2)

    @property
    def delta2(self) -> float:
        return self.ab2 / (self.eps2 * self.beta - self.q ** 2 * self.ab2)


# ---------------------------------------------------------------------------
# 8x8 tables, column j = coordinates of the image of the j-th basis vector
# ---------------------------------------------------------------------------

def r_table() -> np.ndarray:
    R = np.zeros((8, 8))
    for upper, lower in ((0, 1), (3, 4), (5, 6)):
        R[lower, upper] = 1.0
        R[upper, lower] = -1.0
    return R


def pperp_table() -> np.ndarray:
    return np.diag([0.0, 0.0, 0.0, 1.0, 1.0, 1.0, 1.0, 0.0])


def ad_k1_table(a: complex, b: complex) -> np.ndarray:
    a1, a2, b1, b2 = a.real, a.imag, b.real, b.imag
    M = np.zeros((8, 8))
    M[:3, :3] = [
        [2 * a1 ** 2 + 2 * b2 ** 2 - 1, 2 * (a1 * a2 - b1 * b2), 2 * (a1 * b1 + a2 * b2)],
        [-2 * (a1 * a2 + b1 * b2), 2 * a1 ** 2 + 2 * b1 ** 2 - 1, 2 * (a1 * b2 - a2 * b1)],
        [2 * (a2 * b2 - a1 * b1), -2 * (a1 * b2 + a2 * b1), 2 * a1 ** 2 + 2 * a2 ** 2 - 1],
    ]
    M[3:7, 3:7] = [
        [a1, a2, -b1, b2],
        [-a2, a1, -b2, -b1],
        [b1, b2, a1, -a2],
        [-b2, b1, a2, a1],
    ]
    M[7, 7] = 1.0
    return M


def ad_k2_table(theta: float) -> np.ndarray:
    c, s = np.cos(theta), np.sin(theta)
    return np.array([
        [c, 0, 0, 0, 0, s, 0, 0],
        [0, c, 0, 0, 0, 0, -s, 0],
        [0, 0, 1 - s ** 2 / 2, s * c, 0, 0, 0, -1.5 * s ** 2],
        [0, 0, -s * c, 1 - 2 * s ** 2, 0, 0, 0, -3 * s * c],
        [0, 0, 0, 0, 1, 0, 0, 0],
        [-s, 0, 0, 0, 0, c, 0, 0],
        [0, s, 0, 0, 0, 0, c, 0],
        [0, 0, -s ** 2 / 2, s * c, 0, 0, 0, 1 - 1.5 * s ** 2],
    ])


def rk_table(point: AppendixPoint) -> np.ndarray:
    """R_k X = k^-1 R(k X k^-1) k"""
    sc = AppendixScalars.at(point, 0.0, 0.0)
    A, sig, tau, c, s = sc.A, sc.sigma, sc.tau, sc.c, sc.s
    cc = c * (c ** 2 + 1)
    ss = s * (c ** 2 + 1)
    return np.array([
        [0, 1 - 2 * c ** 2 * A, -cc * sig, -2 * c ** 2 * s * sig, 0, 0, 2 * c * s * A, 3 * c * s ** 2 * sig],
        [2 * c ** 2 * A - 1, 0, -cc * tau, -2 * c ** 2 * s * tau, 0, 2 * c * s * A, 0, 3 * c * s ** 2 * tau],
        [cc * sig, cc * tau, 0, 0, c * s, ss * sig, -ss * tau, 0],
        [2 * c ** 2 * s * sig, 2 * c ** 2 * s * tau, 0, 0, s ** 2 - c ** 2, 2 * c * s ** 2 * sig, -2 * c * s ** 2 * tau, 0],
        [0, 0, -c * s, c ** 2 - s ** 2, 0, 0, 0, -3 * c * s],
        [0, -2 * c * s * A, -ss * sig, -2 * c * s ** 2 * sig, 0, 0, -1 + 2 * s ** 2 * A, 3 * s ** 3 * sig],
        [-2 * c * s * A, 0, ss * tau, 2 * c * s ** 2 * tau, 0, 1 - 2 * s ** 2 * A, 0, -3 * s ** 3 * tau],
        [-c * s ** 2 * sig, -c * s ** 2 * tau, 0, 0, c * s, -s ** 3 * sig, s ** 3 * tau, 0],
    ])


# ---------------------------------------------------------------------------
# 4x4 block and velocity columns
# ---------------------------------------------------------------------------

def rotation_factor(sc: AppendixScalars) -> np.ndarray:
    """L = diag(1, 1, [[sigma, tau], [-tau, sigma]])"""
    L = np.eye(4)
    L[2:, 2:] = [[sc.sigma, sc.tau], [-sc.tau, sc.sigma]]
    return L


def block_table(sc: AppendixScalars) -> np.ndarray:
    p, q, t, g = sc.p, sc.q, sc.tau, sc.sigma
    return np.array([
        [sc.eps1, 0, p * t, p * g],
        [0, sc.eps2, -q * g, q * t],
        [p * t, -q * g, sc.beta + sc.delta * t ** 2, sc.delta * t * g],
        [p * g, q * t, sc.delta * t * g, sc.beta + sc.delta * g ** 2],
    ])


def inner_inverse(sc: AppendixScalars, flipped_sign: bool = False) -> np.ndarray:
    """
    Inverse of L^-1 B L^-T. `flipped_sign` flips the sign of the
    Delta1 p entries.
    """
    d1, d2, br = sc.delta1, sc.delta2, sc.beta_reduced
    off = d1 * sc.p if flipped_sign else -d1 * sc.p
    return np.array([
        [d1 * (br + sc.delta), 0, 0, off],
        [0, d2 * br, d2 * sc.q, 0],
        [0, d2 * sc.q, d2 * sc.eps2, 0],
        [off, 0, 0, d1 * sc.eps1],
    ])


def block_inverse_table(sc: AppendixScalars, flipped_sign: bool = False) -> np.ndarray:
    """B^-1 = L^-T (inner inverse) L^-1"""
    Linv = np.linalg.inv(rotation_factor(sc))
    return Linv.T @ inner_inverse(sc, flipped_sign) @ Linv


def velocity_column(point: AppendixPoint, eta: float, mu: float, flipped_signs: bool = False) -> np.ndarray:
    """(V4, V5, V6, V7); `flipped_signs` flips the mu terms of V6 and V7"""
    sc = AppendixScalars.at(point, eta, mu)
    a, b = point.a, point.b
    c, s = sc.c, sc.s
    radial = np.conj(a) * point.adot + np.conj(b) * point.bdot
    cross = a * point.bdot - point.adot * b
    sign = -1.0 if flipped_signs else 1.0
    return np.array([
        s * c * radial.imag,
        point.thetadot + s * c * radial.real - 3 * (eta + mu) * s * c,
        s * cross.imag + sign * 3 * mu * sc.sigma * s ** 3,
        s * cross.real - sign * 3 * mu * sc.tau * s ** 3,
    ])


def w_column(point: AppendixPoint, eta: float, mu: float) -> np.ndarray:
    """(W4, ..., W7) = L^-1 V in closed form"""
    s, c = np.sin(point.theta), np.cos(point.theta)
    log_rate = point.bdot / point.b - point.adot / point.a
    radial = np.conj(point.a) * point.adot + np.conj(point.b) * point.bdot
    return np.array([
        s * c * radial.imag,
        point.thetadot - 3 * s * c * (eta + mu),
        s * log_rate.real + 3 * mu * s ** 3,
        -s * log_rate.imag,
    ])


def closed_action(point: AppendixPoint, eta: float, mu: float, flipped_sign: bool = False) -> float:
    """Quadratic form in W plus the potential -9 sin^2 theta"""
    sc = AppendixScalars.at(point, eta, mu)
    W4, W5, W6, W7 = w_column(point, eta, mu)
    cross = 2 * sc.p * W4 * W7
    if not flipped_sign:
        cross = -cross
    br = sc.beta_reduced
    kinetic = (sc.delta2 * (br * W5 ** 2 + sc.eps2 * W6 ** 2 + 2 * sc.q * W5 * W6)
               + sc.delta1 * ((br + sc.delta) * W4 ** 2 + sc.eps1 * W7 ** 2 + cross))
    return float(kinetic - 9 * sc.s ** 2)


def undeformed_action(point: AppendixPoint) -> float:
    """W4^2 + W5^2 + |a|^2 |b|^2 (W6^2 + W7^2) - 9 sin^2 theta"""
    W4, W5, W6, W7 = w_column(point, 0.0, 0.0)
    ab2 = abs(point.a) ** 2 * abs(point.b) ** 2
    return float(W4 ** 2 + W5 ** 2 + ab2 * (W6 ** 2 + W7 ** 2) - 9 * np.sin(point.theta) ** 2)


# ---------------------------------------------------------------------------
# General machinery in the x-basis
# ---------------------------------------------------------------------------

def general_tables(point: AppendixPoint, eta: float, mu: float) -> Dict[str, np.ndarray]:
    """R, P-perp, Ad_k, R_k and the operator block from the matrix-level operators"""
    basis = x_basis()
    k = point.k()
    block = OperatorBlock(k, APPENDIX_XI, eta, mu)
    square = LinearMap.from_function(lambda X: block.deform(block.deform(X)), basis).matrix
    _, pperp = stabilizer_projectors(APPENDIX_XI, basis)
    P = np.real(pperp.matrix)
    return {
        "r": np.real(LinearMap.from_function(yang_baxter_R, basis).matrix),
        "pperp": P,
        "adjoint": np.real(LinearMap.from_function(lambda X: k @ X @ dagger(k), basis).matrix),
        "rk": np.real(LinearMap.from_function(lambda X: r_twisted(dagger(k), X), basis).matrix),
        "block": np.eye(4) - np.real(P @ square @ P)[COMPLEMENT, COMPLEMENT],
    }


def general_velocity(point: AppendixPoint, eta: float, mu: float) -> np.ndarray:
    block = OperatorBlock(point.k(), APPENDIX_XI, eta, mu)
    return su3_encode(velocity(block, point.kdot()))[COMPLEMENT]


def general_action(point: AppendixPoint, eta: float, mu: float) -> float:
    return second_order_integrand(point.k(), point.kdot(), APPENDIX_XI, eta, mu)


def sign_variant_deviation(point: AppendixPoint, eta: float, mu: float) -> Dict[str, float]:
    """How far the flipped-sign variants land from the general machinery"""
    V = general_velocity(point, eta, mu)
    return {
        "velocity": float(np.max(np.abs(velocity_column(point, eta, mu, flipped_signs=True) - V))),
        "action": abs(closed_action(point, eta, mu, flipped_sign=True) - general_action(point, eta, mu)),
    }


def biyb_su3_appendix(eta: float, mu: float, samples: int = 50, seed: int = 0,
                      table_tol: float = 1e-10, action_tol: float = 1e-9) -> SuiteReport:
    """
    Compare every closed-form object of the CP^2 model with the general
    machinery at seeded random (a, b, theta) and velocities.
    """
    if eta < 0 or mu < 0:
        raise DomainError(f"eta and mu must be non-negative, got ({eta}, {mu})")
    rng = np.random.default_rng(seed)
    report = SuiteReport(suite="biyb-su3-appendix", seed=seed)
    for _ in range(samples):
        point = AppendixPoint.random(rng)
        sc = AppendixScalars.at(point, eta, mu)
        tables = general_tables(point, eta, mu)

        report.add("r-table", np.max(np.abs(tables["r"] - r_table())), table_tol)
        report.add("pperp-table", np.max(np.abs(tables["pperp"] - pperp_table())), table_tol)
        closed_ad = ad_k1_table(point.a, point.b) @ ad_k2_table(point.theta)
        report.add("adjoint-table", np.max(np.abs(tables["adjoint"] - closed_ad)), table_tol)
        report.add("rk-table", np.max(np.abs(tables["rk"] - rk_table(point))), table_tol)

        B = block_table(sc)
        report.add("block", np.max(np.abs(tables["block"] - B)), table_tol)
        L = rotation_factor(sc)
        inner = np.linalg.inv(L) @ B @ np.linalg.inv(L).T
        report.add("rotation-factorization", np.max(np.abs(inner @ inner_inverse(sc) - np.eye(4))), table_tol)
        report.add("block-inverse", np.max(np.abs(B @ block_inverse_table(sc) - np.eye(4))), table_tol)

        V = general_velocity(point, eta, mu)
        report.add("velocity-column", np.max(np.abs(velocity_column(point, eta, mu) - V)), table_tol)
        report.add("w-column", np.max(np.abs(w_column(point, eta, mu) - np.linalg.solve(L, V))), table_tol)

        general = general_action(point, eta, mu)
        quadratic = float(V @ block_inverse_table(sc) @ V) - 9 * sc.s ** 2
        report.add("quadratic-form", abs(quadratic - general), action_tol)
        report.add("action", abs(closed_action(point, eta, mu) - general), action_tol)
        report.add("undeformed-action", abs(undeformed_action(point) - general_action(point, 0.0, 0.0)), action_tol)

    logger.info(f"CP^2 closed forms at eta={eta} mu={mu}: max residual {report.max_residual:.3e}")
    return report
