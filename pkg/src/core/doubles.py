"""
Drinfeld doubles: the cotangent double T*K = SU(N) x su(N) and the
Lu-Weinstein double SL(N, C), their E-operators and the Iwasawa
decomposition SL(N, C) = SU(N) A N.
"""
from abc import ABC, abstractmethod
from dataclasses import dataclass
from enum import Enum
from functools import cached_property
from typing import List, Tuple, Union

import numpy as np
from loguru import logger
from scipy.linalg import expm, logm

from core.algebra import (
    ComplexifiedElement,
    Element,
    LinearMap,
    RealBasis,
    TStarElement,
    bracket,
    dagger,
    form_sl,
    form_tstar,
    pairing_tstar,
    polar_unitary,
    project_su,
    random_sl,
    random_special_unitary,
    random_su,
    sl_basis,
    su_basis,
    unitary_drift,
    yang_baxter_R,
)
from core.errors import DimensionMismatchError, DomainError, SingularOperatorError


class DoubleKind(str, Enum):
    """Which Drinfeld double a model lives on"""
    TSTAR = "tstar"
    LU_WEINSTEIN = "lu-weinstein"


class EKind(str, Enum):
    """E-operator family"""
    TSTAR_FLIP = "tstar-flip"
    BIYB = "biyb"


# ---------------------------------------------------------------------------
# T*K group
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class TStarPoint:
    """Group element (k, kappa) of T*K"""
    k: np.ndarray
    kappa: np.ndarray

    @property
    def N(self) -> int:
        return self.k.shape[0]

    @classmethod
    def identity(cls, N: int) -> "TStarPoint":
        return cls(np.eye(N, dtype=complex), np.zeros((N, N), dtype=complex))


def _check_tstar(p: TStarPoint, q) -> None:
    if p.N != q.N:
        raise DimensionMismatchError(p.N, q.N)


def tstar_multiply(p: TStarPoint, q: TStarPoint) -> TStarPoint:
    """(k1 k2, kappa1 + Ad_k1 kappa2)"""
    _check_tstar(p, q)
    return TStarPoint(p.k @ q.k, p.kappa + p.k @ q.kappa @ dagger(p.k))


def tstar_inverse(p: TStarPoint) -> TStarPoint:
    kinv = dagger(p.k)
    return TStarPoint(kinv, -kinv @ p.kappa @ p.k)


def tstar_adjoint(p: TStarPoint, x: TStarElement) -> TStarElement:
    """(Ad_k mu, Ad_k nu + [kappa, Ad_k mu])"""
    _check_tstar(p, x)
    kinv = dagger(p.k)
    mu = p.k @ x.first @ kinv
    nu = p.k @ x.second @ kinv
    return TStarElement(mu, nu + bracket(p.kappa, mu))


def tstar_bracket(a: TStarElement, b: TStarElement) -> TStarElement:
    """[(X, Y), (mu, nu)] = ([X, mu], [X, nu] + [Y, mu])"""
    _check_tstar(a, b)
    return TStarElement(bracket(a.first, b.first),
                        bracket(a.first, b.second) + bracket(a.second, b.first))


def e_tstar(x: TStarElement) -> TStarElement:
    """(mu, nu) -> (-nu, -mu)"""
    return TStarElement(-x.second, -x.first)


def tstar_matrix(p: TStarPoint) -> np.ndarray:
    """Faithful block embedding [[k, 0], [kappa k, k]]"""
    N = p.N
    M = np.zeros((2 * N, 2 * N), dtype=complex)
    M[:N, :N] = p.k
    M[N:, N:] = p.k
    M[N:, :N] = p.kappa @ p.k
    return M


# ---------------------------------------------------------------------------
# Lu-Weinstein group
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SLPoint:
    """Element of SL(N, C)"""
    l: np.ndarray

    @property
    def N(self) -> int:
        return self.l.shape[0]

    @classmethod
    def identity(cls, N: int) -> "SLPoint":
        return cls(np.eye(N, dtype=complex))


@dataclass(frozen=True)
class IwasawaFactors:
    """l = g a n with g in SU(N), a positive diagonal, n unit upper triangular"""
    g: np.ndarray
    a: np.ndarray
    n: np.ndarray

    def compose(self) -> np.ndarray:
        return self.g @ self.a @ self.n


def iwasawa_decompose(l: Union[SLPoint, np.ndarray]) -> IwasawaFactors:
    """
    Column orthonormalization with the phases moved into the unitary factor so
    that the triangular factor has a real positive diagonal.

    Raises:
        SingularOperatorError: when a pivot vanishes numerically
    """
    m = l.l if isinstance(l, SLPoint) else l
    q, r = np.linalg.qr(m)
    d = np.diag(r)
    scale = max(1.0, float(np.linalg.norm(m)))
    if np.min(np.abs(d)) <= 1e-12 * scale:
        cond = float(np.linalg.cond(m)) if np.all(np.isfinite(m)) else float("inf")
        raise SingularOperatorError("Iwasawa pivot", cond)
    phase = d / np.abs(d)
    g = q * phase[None, :]
    r = r / phase[:, None]
    a_diag = np.diag(r).real
    n = r / a_diag[:, None]
    np.fill_diagonal(n, 1.0)
    # det l = 1 forces det g det a = 1 with det a > 0, so det g = 1 up to rounding
    return IwasawaFactors(g=g, a=np.diag(a_diag).astype(complex), n=n)


# ---------------------------------------------------------------------------
# E-operators
# ---------------------------------------------------------------------------

def e_biyb(X: np.ndarray, eta: float, mu: float) -> np.ndarray:
    """
    E_{eta,mu} X = (i/2)((eta^2 + mu^2 R^2 - 1)/eta) X
                   - (i/2)((eta^2 - mu^2 R^2 + 1)/eta) X^dagger - mu R X^dagger
    """
    if eta <= 0:
        raise DomainError(f"eta must be positive, got {eta}")
    Xd = dagger(X)
    R = yang_baxter_R
    first = (eta ** 2 - 1) * X + mu ** 2 * R(R(X))
    second = (eta ** 2 + 1) * Xd - mu ** 2 * R(R(Xd))
    return 0.5j / eta * (first - second) - mu * R(Xd)


@dataclass(frozen=True)
class EOperator:
    """Involutive symmetric operator on the double algebra"""
    kind: EKind
    N: int
    eta: float = 0.0
    mu: float = 0.0

    def __post_init__(self):
        if self.kind == EKind.BIYB:
            if self.eta <= 0:
                raise DomainError(f"eta must be positive, got {self.eta}")
            if self.mu < 0:
                raise DomainError(f"mu must be non-negative, got {self.mu}")

    @classmethod
    def tstar(cls, N: int) -> "EOperator":
        return cls(EKind.TSTAR_FLIP, N)

    @classmethod
    def biyb(cls, N: int, eta: float, mu: float) -> "EOperator":
        return cls(EKind.BIYB, N, eta, mu)

    def apply(self, x: Element) -> Element:
        if self.kind == EKind.TSTAR_FLIP:
            return e_tstar(x)
        return e_biyb(x, self.eta, self.mu)

    __call__ = apply

    @cached_property
    def basis(self) -> RealBasis:
        if self.kind == EKind.TSTAR_FLIP:
            return tstar_basis(self.N)
        return sl_basis(self.N, self.eta)

    @cached_property
    def as_map(self) -> LinearMap:
        return LinearMap.from_function(self.apply, self.basis)


def tstar_basis(N: int) -> RealBasis:
    su = su_basis(N).generators
    zero = np.zeros((N, N), dtype=complex)
    gens = [TStarElement(g, zero) for g in su] + [TStarElement(zero, g) for g in su]
    return RealBasis.build(gens, pairing_tstar, name=f"T*su({N})")


# ---------------------------------------------------------------------------
# Uniform interface used by the dynamics
# ---------------------------------------------------------------------------

class DrinfeldDouble(ABC):
    """Group and algebra operations of a double, plus flat packing for integrators"""

    kind: DoubleKind

    def __init__(self, N: int):
        if N < 2:
            raise DomainError(f"N must be at least 2, got {N}")
        self.N = N

    @abstractmethod
    def identity(self): ...

    @abstractmethod
    def multiply(self, p, q): ...

    @abstractmethod
    def inverse(self, p): ...

    @abstractmethod
    def adjoint(self, p, x: Element) -> Element: ...

    @abstractmethod
    def bracket(self, x: Element, y: Element) -> Element: ...

    @abstractmethod
    def form(self, x: Element, y: Element) -> float: ...

    @abstractmethod
    def pairing(self, x: Element, y: Element) -> complex:
        """Complex-bilinear extension of `form`"""

    @abstractmethod
    def basis(self) -> RealBasis: ...

    @abstractmethod
    def exp(self, x: Element): ...

    @abstractmethod
    def log(self, p) -> Element: ...

    @abstractmethod
    def pack_element(self, x: Element) -> np.ndarray: ...

    @abstractmethod
    def unpack_element(self, v: np.ndarray) -> Element: ...

    @abstractmethod
    def pack(self, p) -> np.ndarray: ...

    @abstractmethod
    def unpack(self, y: np.ndarray): ...

    @abstractmethod
    def flow_tangent(self, p, x: Element):
        """Derivative of p under dp/dt = x p, in the point's own coordinates"""

    @abstractmethod
    def drift(self, p) -> float: ...

    @abstractmethod
    def renormalize(self, p): ...

    @abstractmethod
    def random_point(self, rng: np.random.Generator, scale: float = 1.0): ...

    @abstractmethod
    def random_element(self, rng: np.random.Generator, scale: float = 1.0) -> Element: ...


class TStarDouble(DrinfeldDouble):
    """T*SU(N) with the split form (mu1, nu2) + (mu2, nu1)"""

    kind = DoubleKind.TSTAR

    def identity(self) -> TStarPoint:
        return TStarPoint.identity(self.N)

    def multiply(self, p, q):
        return tstar_multiply(p, q)

    def inverse(self, p):
        return tstar_inverse(p)

    def adjoint(self, p, x):
        return tstar_adjoint(p, x)

    def bracket(self, x, y):
        return tstar_bracket(x, y)

    def form(self, x, y):
        return form_tstar(x, y)

    def pairing(self, x, y):
        return pairing_tstar(x, y)

    def basis(self) -> RealBasis:
        return tstar_basis(self.N)

    def exp(self, x: TStarElement) -> TStarPoint:
        """exp of (mu, nu) read off the block embedding"""
        N = self.N
        M = np.zeros((2 * N, 2 * N), dtype=complex)
        M[:N, :N] = x.first
        M[N:, N:] = x.first
        M[N:, :N] = x.second
        E = expm(M)
        k = E[:N, :N]
        return TStarPoint(k, E[N:, :N] @ dagger(k))

    def log(self, p: TStarPoint) -> TStarElement:
        N = self.N
        M = logm(tstar_matrix(p))
        return TStarElement(M[:N, :N], M[N:, :N])

    def pack_element(self, x: TStarElement) -> np.ndarray:
        return np.concatenate([x.first.ravel(), x.second.ravel()])

    def unpack_element(self, v: np.ndarray) -> TStarElement:
        n2 = self.N * self.N
        return TStarElement(v[:n2].reshape(self.N, self.N), v[n2:].reshape(self.N, self.N))

    def pack(self, p: TStarPoint) -> np.ndarray:
        return np.concatenate([p.k.ravel(), p.kappa.ravel()])

    def unpack(self, y: np.ndarray) -> TStarPoint:
        n2 = self.N * self.N
        return TStarPoint(y[:n2].reshape(self.N, self.N), y[n2:].reshape(self.N, self.N))

    def flow_tangent(self, p: TStarPoint, x: TStarElement) -> TStarPoint:
        # k' = A k, kappa' = B + [A, kappa]
        return TStarPoint(x.first @ p.k, x.second + bracket(x.first, p.kappa))

    def drift(self, p: TStarPoint) -> float:
        kappa_drift = float(np.max(np.abs(p.kappa + dagger(p.kappa))) + abs(np.trace(p.kappa)))
        return unitary_drift(p.k) + kappa_drift

    def renormalize(self, p: TStarPoint) -> TStarPoint:
        return TStarPoint(polar_unitary(p.k), project_su(p.kappa))

    def random_point(self, rng, scale: float = 1.0) -> TStarPoint:
        return TStarPoint(random_special_unitary(self.N, rng), random_su(self.N, rng, scale))

    def random_element(self, rng, scale: float = 1.0) -> TStarElement:
        return TStarElement(random_su(self.N, rng, scale), random_su(self.N, rng, scale))


class LuWeinsteinDouble(DrinfeldDouble):
    """SL(N, C) with the form -(1/eta) Im tr"""

    kind = DoubleKind.LU_WEINSTEIN

    def __init__(self, N: int, eta: float):
        super().__init__(N)
        if eta <= 0:
            raise DomainError(f"eta must be positive, got {eta}")
        self.eta = eta

    def identity(self) -> SLPoint:
        return SLPoint.identity(self.N)

    def multiply(self, p, q):
        return SLPoint(p.l @ q.l)

    def inverse(self, p):
        return SLPoint(np.linalg.inv(p.l))

    def adjoint(self, p, x):
        return p.l @ x @ np.linalg.inv(p.l)

    def bracket(self, x, y):
        if isinstance(x, ComplexifiedElement) or isinstance(y, ComplexifiedElement):
            x, y = ComplexifiedElement.lift(x), ComplexifiedElement.lift(y)
            return ComplexifiedElement(bracket(x.real, y.real) - bracket(x.imag, y.imag),
                                       bracket(x.real, y.imag) + bracket(x.imag, y.real))
        return bracket(x, y)

    def form(self, x, y):
        return form_sl(x, y, self.eta)

    def pairing(self, x, y):
        x, y = ComplexifiedElement.lift(x), ComplexifiedElement.lift(y)
        real = form_sl(x.real, y.real, self.eta) - form_sl(x.imag, y.imag, self.eta)
        imag = form_sl(x.real, y.imag, self.eta) + form_sl(x.imag, y.real, self.eta)
        return complex(real, imag)

    def basis(self) -> RealBasis:
        return sl_basis(self.N, self.eta)

    def exp(self, x: np.ndarray) -> SLPoint:
        return SLPoint(expm(x))

    def log(self, p: SLPoint) -> np.ndarray:
        return logm(p.l)

    def pack_element(self, x: np.ndarray) -> np.ndarray:
        return np.asarray(x, dtype=complex).ravel().copy()

    def unpack_element(self, v: np.ndarray) -> np.ndarray:
        return v.reshape(self.N, self.N)

    def pack(self, p: SLPoint) -> np.ndarray:
        return p.l.ravel().copy()

    def unpack(self, y: np.ndarray) -> SLPoint:
        return SLPoint(y.reshape(self.N, self.N))

    def flow_tangent(self, p: SLPoint, x: np.ndarray) -> SLPoint:
        return SLPoint(x @ p.l)

    def drift(self, p: SLPoint) -> float:
        return float(abs(np.linalg.det(p.l) - 1))

    def renormalize(self, p: SLPoint) -> SLPoint:
        det = np.linalg.det(p.l)
        logger.debug(f"Rescaling SL point, det drift {abs(det - 1):.3e}")
        return SLPoint(p.l / det ** (1.0 / self.N))

    def random_point(self, rng, scale: float = 1.0) -> SLPoint:
        return SLPoint(expm(random_sl(self.N, rng, scale)))

    def random_element(self, rng, scale: float = 1.0) -> np.ndarray:
        return random_sl(self.N, rng, scale)


def split_signature(basis: RealBasis) -> Tuple[int, int]:
    """(#positive, #negative) Gram eigenvalues"""
    w = np.linalg.eigvalsh(0.5 * (basis.gram + basis.gram.T))
    return int(np.sum(w > 0)), int(np.sum(w < 0))


def e_gram(e_op: EOperator, double: DrinfeldDouble) -> np.ndarray:
    """Gram matrix of (x, E y) on the double's basis"""
    gens: List[Element] = list(double.basis().generators)
    return np.array([[double.form(a, e_op.apply(b)) for b in gens] for a in gens])
