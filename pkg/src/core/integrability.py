"""
Spectral data O(lambda), O^dagger(lambda), r(lambda, rho) for the principal
chiral and bi-Yang-Baxter models, Lax pairs, and numerical verification of
the sufficient integrability conditions and of the r-matrix identity.
"""
from dataclasses import dataclass, replace
from enum import Enum
from typing import Dict, List, Tuple

import numpy as np
from loguru import logger

from core.algebra import (
    ComplexifiedElement,
    Element,
    RealBasis,
    TStarElement,
    bracket,
    dagger,
    element_norm,
    random_su,
    trace_pairing,
    yang_baxter_R,
)
from core.dynamics import ModelSpec, Trajectory
from core.errors import DomainError, PoleError
from models.results import ConditionReport


POLE_TOL = 1e-12


class SpectralModel(str, Enum):
    """Which closed-form spectral data"""
    PCM = "pcm"
    BIYB = "biyb"


def _pole(name: str, value: complex) -> None:
    if abs(value) < POLE_TOL:
        raise PoleError(name, value)


def f0(lam: complex, eta: float, mu: float) -> complex:
    """(1 + eta^2 - mu^2)/2 + (S/2) cosh(lambda), S = sqrt((1 + eta^2 - mu^2)^2 + 4 mu^2)"""
    A = 1 + eta ** 2 - mu ** 2
    S = np.sqrt(A ** 2 + 4 * mu ** 2)
    return 0.5 * A + 0.5 * S * np.cosh(lam)


def f1(lam: complex, eta: float, mu: float) -> complex:
    A = 1 + eta ** 2 - mu ** 2
    S = np.sqrt(A ** 2 + 4 * mu ** 2)
    return 0.5 * S * np.sinh(lam)


@dataclass(frozen=True)
class SpectralData:
    """
    The maps O(lambda): D -> G^C, its adjoint O^dagger(lambda): G -> D and the
    kernel r(lambda, rho): G -> G.

    `r_sign = -1` replaces R by its transpose in the kernel (a negative control).
    """
    model: SpectralModel
    N: int
    eta: float = 0.0
    mu: float = 0.0
    r_sign: float = 1.0

    def __post_init__(self):
        if self.model == SpectralModel.BIYB and self.eta <= 0:
            raise DomainError(f"eta must be positive, got {self.eta}")

    def with_transposed_r(self) -> "SpectralData":
        return replace(self, r_sign=-self.r_sign)

    def check_lambda(self, lam: complex) -> None:
        if self.model == SpectralModel.PCM:
            _pole("1-lambda^2", 1 - lam ** 2)

    def O(self, lam: complex, x: Element) -> np.ndarray:
        self.check_lambda(lam)
        if self.model == SpectralModel.PCM:
            return (x.first - lam * x.second) / (1 - lam ** 2)
        a, a1 = f0(lam, self.eta, self.mu), f1(lam, self.eta, self.mu)
        anti = 0.5 * (x - dagger(x))
        herm = (x + dagger(x)) / (2j * self.eta)
        return a * anti + a1 * herm + self.mu * (1 - a) * yang_baxter_R(herm)

    def O_dagger(self, lam: complex, W: np.ndarray) -> Element:
        self.check_lambda(lam)
        if self.model == SpectralModel.PCM:
            c = 1 / (1 - lam ** 2)
            return TStarElement(-lam * c * W, c * W)
        a, a1 = complex(f0(lam, self.eta, self.mu)), complex(f1(lam, self.eta, self.mu))
        # W = A + iB with A, B in su(N); the i is that of the complexification
        A = 0.5 * (W - dagger(W))
        B = (W + dagger(W)) / 2j
        return self._o_dagger_su(a, a1, A) + self._o_dagger_su(a, a1, B) * 1j

    def _o_dagger_su(self, a: complex, a1: complex, W: np.ndarray) -> ComplexifiedElement:
        """(-i eta a - a1) W + mu (1 - a) R W on su(N), i eta W taken in sl(N, C)"""
        U, RW = 1j * self.eta * W, yang_baxter_R(W)
        real = -a.real * U - a1.real * W + self.mu * (1 - a.real) * RW
        imag = -a.imag * U - a1.imag * W - self.mu * a.imag * RW
        return ComplexifiedElement(real, imag)

    def rhat(self, lam: complex, rho: complex, y: np.ndarray) -> np.ndarray:
        if self.model == SpectralModel.PCM:
            _pole("1-rho^2", 1 - rho ** 2)
            _pole("rho-lambda", rho - lam)
            return rho ** 2 / ((1 - rho ** 2) * (rho - lam)) * y
        a, b = f0(lam, self.eta, self.mu), f0(rho, self.eta, self.mu)
        _pole("f0(lambda)-f0(rho)", a - b)
        a1, b1 = f1(lam, self.eta, self.mu), f1(rho, self.eta, self.mu)
        K = (a * b1 + a1 * b) / (a - b)
        return (1 - b) * (K * y - self.r_sign * self.mu * yang_baxter_R(y))

    def lax_matrix(self, j: Element, lam: complex, spec: ModelSpec) -> np.ndarray:
        return spec.xi_matrix - self.O(lam, j)


def spectral_pcm(N: int) -> SpectralData:
    """O(l)(mu, nu) = (mu - l nu)/(1 - l^2), r(l, r) = r^2/((1 - r^2)(r - l)) Id"""
    return SpectralData(SpectralModel.PCM, N)


def spectral_biyb(N: int, eta: float, mu: float) -> SpectralData:
    return SpectralData(SpectralModel.BIYB, N, eta, mu)


@dataclass(frozen=True)
class LaxPair:
    L: np.ndarray
    M: np.ndarray
    lam: complex


def lax_pair(j: Element, lam: complex, spec: ModelSpec, sd: SpectralData) -> LaxPair:
    """L = xi - O(lambda) j, M = -O(lambda) E j"""
    return LaxPair(L=spec.xi_matrix - sd.O(lam, j), M=-sd.O(lam, spec.e_op(j)), lam=complex(lam))


# ---------------------------------------------------------------------------
# Sufficient conditions
# ---------------------------------------------------------------------------

CONDITIONS = ("sucb", "sufcb", "suc2b", "1db", "2db", "adjointness")


def _sample_parameters(sd: SpectralData, rng: np.random.Generator) -> Tuple[complex, complex]:
    """
    PCM: complex lambda, rho in the annulus 0.1 <= |.| <= 0.8, |rho - lambda| > 0.1.
    bi-YB: complex lambda, rho with 0.1 <= |.| <= 1.6 and |cosh lambda - cosh rho| >= 0.2,
    which keeps f0(lambda) - f0(rho) away from zero.
    """
    if sd.model == SpectralModel.PCM:
        high, separated = 0.8, lambda l, r: abs(r - l) > 0.1
    else:
        high, separated = 1.6, lambda l, r: abs(np.cosh(l) - np.cosh(r)) >= 0.2
    while True:
        lam, rho = (complex(rng.uniform(0.1, high) * np.exp(1j * rng.uniform(0, 2 * np.pi))) for _ in range(2))
        if separated(lam, rho):
            return lam, rho


def condition_residuals(spec: ModelSpec, sd: SpectralData, lam: complex, rho: complex,
                        X: Element, x: np.ndarray, y: np.ndarray) -> Dict[str, float]:
    """Residual of each sufficient condition at one draw"""
    D = spec.double
    xi = spec.xi
    zeta = spec.xi_matrix
    E = spec.e_op
    Od = sd.O_dagger

    ox = sd.O(lam, X)
    sucb = element_norm(bracket(zeta, ox) - sd.O(lam, D.bracket(xi, X)))
    sufcb = element_norm(bracket(ox, sd.O(lam, E(X))) - sd.O(lam, D.bracket(X, E(X))))
    suc2b = element_norm(bracket(zeta, sd.rhat(lam, rho, y)) - sd.rhat(lam, rho, bracket(zeta, y)))
    one = (D.bracket(Od(lam, x), Od(rho, y))
           + Od(lam, bracket(x, sd.rhat(lam, rho, y)))
           + Od(rho, bracket(sd.rhat(rho, lam, x), y)))
    two = (D.pairing(Od(lam, x), Od(rho, y))
           + trace_pairing(x, sd.rhat(lam, rho, y))
           + trace_pairing(sd.rhat(rho, lam, x), y))
    adjoint = trace_pairing(ox, y) - D.pairing(X, Od(lam, y))
    return {
        "sucb": sucb,
        "sufcb": sufcb,
        "suc2b": suc2b,
        "1db": element_norm(one),
        "2db": abs(two),
        "adjointness": abs(adjoint),
    }


def verify_conditions(spec: ModelSpec,
                      sd: SpectralData,
                      samples: int = 200,
                      seed: int = 0,
                      threshold: float = 1e-10) -> List[ConditionReport]:
    """
    Evaluate every sufficient condition at `samples` seeded random draws.

    Returns:
        One ConditionReport per condition (failures are reports, not errors)
    """
    if samples < 1:
        raise DomainError(f"samples must be positive, got {samples}")
    rng = np.random.default_rng(seed)
    residuals: Dict[str, List[float]] = {name: [] for name in CONDITIONS}
    for _ in range(samples):
        lam, rho = _sample_parameters(sd, rng)
        X = spec.double.random_element(rng)
        x = random_su(spec.N, rng)
        y = random_su(spec.N, rng)
        for name, value in condition_residuals(spec, sd, lam, rho, X, x, y).items():
            residuals[name].append(value)
    reports = [ConditionReport.evaluate(name, residuals[name], seed, threshold) for name in CONDITIONS]
    for report in reports:
        logger.debug(f"{spec.label} {report.condition}: max residual {report.max_residual:.3e}")
    return reports


# ---------------------------------------------------------------------------
# r-matrix identity
# ---------------------------------------------------------------------------

def rmatrix_identity(j: Element, x: np.ndarray, y: np.ndarray, lam: complex, rho: complex,
                     sd: SpectralData, spec: ModelSpec) -> Tuple[complex, complex]:
    """
    Both sides of {(j, O^dagger(lambda) x), (j, O^dagger(rho) y)} expressed through
    the current algebra (lhs) and through the kernel r (rhs).
    """
    D = spec.double
    zeta = spec.xi_matrix
    ox, oy = sd.O_dagger(lam, x), sd.O_dagger(rho, y)
    lhs = D.pairing(j, D.bracket(ox, oy)) + D.pairing(ox, D.bracket(spec.xi, oy))
    r_ly = sd.rhat(lam, rho, y)
    r_rx = sd.rhat(rho, lam, x)
    rhs = (-trace_pairing(sd.O(lam, j), bracket(x, r_ly))
           - trace_pairing(sd.O(rho, j), bracket(r_rx, y))
           + trace_pairing(bracket(zeta, x), r_ly)
           - trace_pairing(bracket(zeta, y), r_rx))
    return lhs, rhs


def rmatrix_identity_report(spec: ModelSpec, sd: SpectralData, samples: int = 200,
                            seed: int = 0, threshold: float = 1e-10) -> ConditionReport:
    rng = np.random.default_rng(seed)
    residuals = []
    for _ in range(samples):
        lam, rho = _sample_parameters(sd, rng)
        j = spec.double.random_element(rng)
        x = random_su(spec.N, rng)
        y = random_su(spec.N, rng)
        lhs, rhs = rmatrix_identity(j, x, y, lam, rho, sd, spec)
        residuals.append(abs(lhs - rhs))
    return ConditionReport.evaluate("rmatrix-identity", residuals, seed, threshold)


def rmatrix_tensor(lam: complex, rho: complex, sd: SpectralData, basis: RealBasis) -> np.ndarray:
    """Coefficients r_{CB} of r = C_{AB} (r T^A) x T^B = r_{CB} T^C x T^B"""
    Cinv = np.linalg.inv(basis.gram)
    rmat = np.array([basis.coordinates(sd.rhat(lam, rho, g)) for g in basis.generators]).T
    return rmat @ Cinv


def contract_tensor(coeffs: np.ndarray, basis: RealBasis, x: np.ndarray, y: np.ndarray) -> complex:
    """sum r_{CB} (x, T^C)(y, T^B)"""
    px = np.array([trace_pairing(x, g) for g in basis.generators])
    py = np.array([trace_pairing(y, g) for g in basis.generators])
    return complex(px @ coeffs @ py)


# ---------------------------------------------------------------------------
# Lax equation along trajectories
# ---------------------------------------------------------------------------

def _five_point_derivative(values: List[np.ndarray], i: int, h: float) -> np.ndarray:
    return (-values[i + 2] + 8 * values[i + 1] - 8 * values[i - 1] + values[i - 2]) / (12 * h)


@dataclass(frozen=True)
class LaxResidual:
    residual: float
    isospectral_drift: float


def lax_residual(traj: Trajectory, lam: complex, sd: SpectralData, spec: ModelSpec) -> LaxResidual:
    """
    max |dL/dt - [L, M]| with a five-point stencil over the recorded samples,
    and the relative drift of the characteristic polynomial of L(lambda).
    """
    sd.check_lambda(lam)
    pairs = [lax_pair(j, lam, spec, sd) for j in traj.currents]
    Ls = [p.L for p in pairs]
    base = np.poly(Ls[0])
    scale = max(float(np.linalg.norm(base)), 1.0)
    drift = max(float(np.linalg.norm(np.poly(L) - base)) for L in Ls) / scale
    if len(Ls) < 5:
        return LaxResidual(0.0, drift)
    h = traj.sample_step
    worst = 0.0
    for i in range(2, len(Ls) - 2):
        dL = _five_point_derivative(Ls, i, h)
        worst = max(worst, float(np.linalg.norm(dL - bracket(Ls[i], pairs[i].M))))
    return LaxResidual(worst, drift)
