"""
Lie-algebra kernel: brackets, bilinear forms, real bases, projectors and the
Yang-Baxter operator for su(N) and sl(N, C) viewed as a real Lie algebra.

Algebra elements are plain complex ``numpy`` arrays of shape (N, N). The same
carrier holds su(N), sl(N, C) and the complexification of su(N); membership is
checked with the ``is_*`` predicates rather than encoded in types.
"""
from dataclasses import dataclass
from typing import Callable, List, Optional, Sequence, Tuple, Union

import numpy as np
from scipy.linalg import polar

from core.errors import DimensionMismatchError, DomainError, SingularOperatorError


STRUCTURAL_TOL = 1e-12
IDENTITY_TOL = 1e-10
UNITARITY_TOL = 1e-10


def _check_pair(X: np.ndarray, Y: np.ndarray) -> None:
    if X.shape != Y.shape:
        raise DimensionMismatchError(X.shape, Y.shape)


def dagger(X: np.ndarray) -> np.ndarray:
    """Conjugate transpose"""
    return X.conj().T


# ---------------------------------------------------------------------------
# Predicates and projections
# ---------------------------------------------------------------------------

def is_traceless(X: np.ndarray, tol: float = STRUCTURAL_TOL) -> bool:
    return abs(np.trace(X)) <= tol


def is_su(X: np.ndarray, tol: float = STRUCTURAL_TOL) -> bool:
    """X anti-Hermitian and traceless"""
    return bool(np.max(np.abs(X + dagger(X)), initial=0.0) <= tol and is_traceless(X, tol))


def is_an(X: np.ndarray, tol: float = STRUCTURAL_TOL) -> bool:
    """X upper triangular with real diagonal and zero trace (Lie algebra of AN)"""
    lower = np.tril(X, -1)
    return bool(
        np.max(np.abs(lower), initial=0.0) <= tol
        and np.max(np.abs(np.diag(X).imag), initial=0.0) <= tol
        and is_traceless(X, tol)
    )


def is_unitary(k: np.ndarray, tol: float = UNITARITY_TOL) -> bool:
    n = k.shape[0]
    return bool(np.max(np.abs(dagger(k) @ k - np.eye(n))) <= tol and abs(np.linalg.det(k) - 1) <= tol)


def require_unitary(k: np.ndarray, tol: float = UNITARITY_TOL) -> None:
    if not is_unitary(k, tol):
        drift = float(np.max(np.abs(dagger(k) @ k - np.eye(k.shape[0]))))
        raise DomainError(f"Matrix is not special unitary (drift {drift:.3e})")


def project_su(X: np.ndarray) -> np.ndarray:
    """Orthogonal projection of a complex matrix onto su(N)"""
    A = 0.5 * (X - dagger(X))
    n = X.shape[0]
    return A - (np.trace(A) / n) * np.eye(n)


def project_traceless(X: np.ndarray) -> np.ndarray:
    n = X.shape[0]
    return X - (np.trace(X) / n) * np.eye(n)


def unitary_drift(k: np.ndarray) -> float:
    """max |k^dagger k - 1| plus |det k - 1|"""
    n = k.shape[0]
    return float(np.max(np.abs(dagger(k) @ k - np.eye(n))) + abs(np.linalg.det(k) - 1))


def polar_unitary(k: np.ndarray) -> np.ndarray:
    """Closest special unitary matrix (polar factor with the determinant phase removed)"""
    u, _ = polar(k)
    n = k.shape[0]
    return u / np.linalg.det(u) ** (1.0 / n)


# ---------------------------------------------------------------------------
# Brackets and bilinear forms
# ---------------------------------------------------------------------------

def bracket(X: np.ndarray, Y: np.ndarray) -> np.ndarray:
    """Matrix commutator [X, Y]"""
    _check_pair(X, Y)
    return X @ Y - Y @ X


def trace_pairing(X: np.ndarray, Y: np.ndarray) -> complex:
    """tr(XY): the complex-bilinear extension of the Killing-Cartan form"""
    _check_pair(X, Y)
    return complex(np.einsum("ij,ji->", X, Y))


def killing_form(X: np.ndarray, Y: np.ndarray) -> float:
    """Re tr(XY) with the defining-representation normalization"""
    return trace_pairing(X, Y).real


def form_sl(X: np.ndarray, Y: np.ndarray, eta: float) -> float:
    """Split form on sl(N, C) as a real algebra: -(1/eta) Im tr(XY)"""
    if eta <= 0:
        raise DomainError(f"eta must be positive, got {eta}")
    return -trace_pairing(X, Y).imag / eta


def ad(xi: np.ndarray) -> Callable[[np.ndarray], np.ndarray]:
    return lambda X: bracket(xi, X)


# ---------------------------------------------------------------------------
# The T*K algebra: pairs (mu, nu) of su(N) elements
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class TStarElement:
    """Element (mu, nu) of the cotangent double algebra"""
    first: np.ndarray
    second: np.ndarray

    def __post_init__(self):
        _check_pair(self.first, self.second)

    @property
    def N(self) -> int:
        return self.first.shape[0]

    @classmethod
    def zeros(cls, N: int) -> "TStarElement":
        z = np.zeros((N, N), dtype=complex)
        return cls(z, z.copy())

    def __add__(self, other: "TStarElement") -> "TStarElement":
        return TStarElement(self.first + other.first, self.second + other.second)

    def __sub__(self, other: "TStarElement") -> "TStarElement":
        return TStarElement(self.first - other.first, self.second - other.second)

    def __neg__(self) -> "TStarElement":
        return TStarElement(-self.first, -self.second)

    def __mul__(self, c: complex) -> "TStarElement":
        return TStarElement(c * self.first, c * self.second)

    __rmul__ = __mul__

    def __truediv__(self, c: complex) -> "TStarElement":
        return TStarElement(self.first / c, self.second / c)

    def norm(self) -> float:
        return float(np.sqrt(np.linalg.norm(self.first) ** 2 + np.linalg.norm(self.second) ** 2))

    def is_su(self, tol: float = STRUCTURAL_TOL) -> bool:
        return is_su(self.first, tol) and is_su(self.second, tol)


def pairing_tstar(a: TStarElement, b: TStarElement) -> complex:
    """Complex-bilinear (mu1, nu2) + (mu2, nu1)"""
    return trace_pairing(a.first, b.second) + trace_pairing(b.first, a.second)


def form_tstar(a: TStarElement, b: TStarElement) -> float:
    """((mu1, nu1), (mu2, nu2)) = (mu1, nu2) + (mu2, nu1)"""
    return pairing_tstar(a, b).real


# ---------------------------------------------------------------------------
# Complexification of sl(N, C) regarded as a real algebra
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ComplexifiedElement:
    """
    real + i imag with real, imag in sl(N, C) as a real algebra. The scalar i
    acts on the pair, never through the matrix unit of sl(N, C).
    """
    real: np.ndarray
    imag: np.ndarray

    def __post_init__(self):
        _check_pair(self.real, self.imag)

    @classmethod
    def lift(cls, x: Union[np.ndarray, "ComplexifiedElement"]) -> "ComplexifiedElement":
        if isinstance(x, ComplexifiedElement):
            return x
        return cls(np.asarray(x, dtype=complex), np.zeros_like(x, dtype=complex))

    def __add__(self, other: "ComplexifiedElement") -> "ComplexifiedElement":
        other = ComplexifiedElement.lift(other)
        return ComplexifiedElement(self.real + other.real, self.imag + other.imag)

    __radd__ = __add__

    def __sub__(self, other: "ComplexifiedElement") -> "ComplexifiedElement":
        other = ComplexifiedElement.lift(other)
        return ComplexifiedElement(self.real - other.real, self.imag - other.imag)

    def __neg__(self) -> "ComplexifiedElement":
        return ComplexifiedElement(-self.real, -self.imag)

    def __mul__(self, c: complex) -> "ComplexifiedElement":
        c = complex(c)
        return ComplexifiedElement(c.real * self.real - c.imag * self.imag,
                                   c.real * self.imag + c.imag * self.real)

    __rmul__ = __mul__

    def norm(self) -> float:
        return float(np.sqrt(np.linalg.norm(self.real) ** 2 + np.linalg.norm(self.imag) ** 2))


Element = Union[np.ndarray, TStarElement, ComplexifiedElement]


def element_norm(x: Element) -> float:
    """Frobenius norm for every carrier"""
    if isinstance(x, (TStarElement, ComplexifiedElement)):
        return x.norm()
    return float(np.linalg.norm(x))


# ---------------------------------------------------------------------------
# Real bases and linear maps
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class RealBasis:
    """Ordered real basis with the Gram matrix of a complex-bilinear pairing"""
    generators: Tuple[Element, ...]
    gram: np.ndarray
    pairing: Callable[[Element, Element], complex]
    name: str = ""

    @classmethod
    def build(cls,
              generators: Sequence[Element],
              pairing: Callable[[Element, Element], complex] = trace_pairing,
              name: str = "") -> "RealBasis":
        gens = tuple(generators)
        gram = np.array([[pairing(a, b).real for b in gens] for a in gens])
        cond = np.linalg.cond(gram)
        if not np.isfinite(cond) or cond > 1e12:
            raise SingularOperatorError(f"Gram matrix of basis '{name}'", float(cond))
        return cls(generators=gens, gram=gram, pairing=pairing, name=name)

    @property
    def dim(self) -> int:
        return len(self.generators)

    @property
    def condition_number(self) -> float:
        return float(np.linalg.cond(self.gram))

    def coordinates(self, x: Element) -> np.ndarray:
        """Coefficients c with x = sum c_i T_i (complex for complexified input)"""
        rhs = np.array([self.pairing(g, x) for g in self.generators])
        return np.linalg.solve(self.gram, rhs)

    def element(self, coeffs: Sequence[complex]) -> Element:
        total = self.generators[0] * 0.0
        for c, g in zip(coeffs, self.generators):
            total = total + g * complex(c)
        return total


@dataclass(frozen=True)
class LinearMap:
    """Matrix of a linear operator; rows are output coordinates"""
    matrix: np.ndarray
    domain: RealBasis
    codomain: RealBasis

    @classmethod
    def from_function(cls,
                      f: Callable[[Element], Element],
                      domain: RealBasis,
                      codomain: Optional[RealBasis] = None) -> "LinearMap":
        codomain = codomain or domain
        columns = [codomain.coordinates(f(g)) for g in domain.generators]
        matrix = np.real_if_close(np.array(columns).T, tol=1000)
        return cls(matrix=matrix, domain=domain, codomain=codomain)

    def apply(self, x: Element) -> Element:
        return self.codomain.element(self.matrix @ self.domain.coordinates(x))

    def __matmul__(self, other: "LinearMap") -> "LinearMap":
        return LinearMap(self.matrix @ other.matrix, other.domain, self.codomain)


def _unit(N: int, a: int, b: int) -> np.ndarray:
    E = np.zeros((N, N), dtype=complex)
    E[a, b] = 1.0
    return E


def cartan_generators(N: int) -> List[np.ndarray]:
    """i times the generalized Gell-Mann diagonal matrices, tr(H^2) = -2"""
    gens = []
    for m in range(1, N):
        d = np.zeros(N)
        d[:m] = 1.0
        d[m] = -m
        gens.append(1j * np.sqrt(2.0 / (m * (m + 1))) * np.diag(d))
    return gens


def root_generators(N: int) -> List[np.ndarray]:
    """E_ab - E_ba and i(E_ab + E_ba) for a < b"""
    gens = []
    for a in range(N):
        for b in range(a + 1, N):
            gens.append(_unit(N, a, b) - _unit(N, b, a))
            gens.append(1j * (_unit(N, a, b) + _unit(N, b, a)))
    return gens


def su_basis(N: int) -> RealBasis:
    """Orthogonal root-vector basis of su(N), Killing Gram = -2 Id"""
    if N == 3:
        return x_basis()
    return RealBasis.build(root_generators(N) + cartan_generators(N), trace_pairing, name=f"su({N})")


def x_basis() -> RealBasis:
    """su(3) basis ordered as the column (x1, ..., x7, y)"""
    return RealBasis.build([su3_decode(v) for v in np.eye(8)], trace_pairing, name="su(3) x-basis")


def sl_basis(N: int, eta: float) -> RealBasis:
    """Real basis of sl(N, C): su(N) generators followed by i times them"""
    su = list(su_basis(N).generators)
    return RealBasis.build(su + [1j * g for g in su],
                           lambda X, Y: complex(form_sl(X, Y, eta)),
                           name=f"sl({N},C)")


# ---------------------------------------------------------------------------
# su(3) column encoding
# ---------------------------------------------------------------------------

def su3_encode(X: np.ndarray) -> np.ndarray:
    """(x1, ..., x7, y) read off X = i [[x3+y, x1-ix2, x4-ix5], [., -x3+y, x6-ix7], [., ., -2y]]"""
    if X.shape != (3, 3):
        raise DimensionMismatchError((3, 3), X.shape)
    H = -1j * X
    y = -0.5 * H[2, 2].real
    return np.array([
        H[0, 1].real, -H[0, 1].imag,
        H[0, 0].real - y,
        H[0, 2].real, -H[0, 2].imag,
        H[1, 2].real, -H[1, 2].imag,
        y,
    ])


def su3_decode(v: Sequence[float]) -> np.ndarray:
    if len(v) != 8:
        raise DimensionMismatchError(8, len(v))
    x1, x2, x3, x4, x5, x6, x7, y = v
    H = np.array([
        [x3 + y, x1 - 1j * x2, x4 - 1j * x5],
        [x1 + 1j * x2, -x3 + y, x6 - 1j * x7],
        [x4 + 1j * x5, x6 + 1j * x7, -2 * y],
    ])
    return 1j * H


# ---------------------------------------------------------------------------
# Yang-Baxter operator
# ---------------------------------------------------------------------------

def yang_baxter_R(X: np.ndarray) -> np.ndarray:
    """-i on the strictly upper part, +i on the strictly lower part, 0 on the diagonal"""
    return -1j * np.triu(X, 1) + 1j * np.tril(X, -1)


def r_twisted(k: np.ndarray, X: np.ndarray) -> np.ndarray:
    """Ad_k R Ad_{k^-1} X"""
    _check_pair(k, X)
    require_unitary(k)
    kinv = dagger(k)
    return k @ yang_baxter_R(kinv @ X @ k) @ kinv


# ---------------------------------------------------------------------------
# Centralizer projectors
# ---------------------------------------------------------------------------

def _eigenframe(xi: np.ndarray) -> Tuple[np.ndarray, Optional[np.ndarray]]:
    """Eigenvalues of -i xi and the diagonalizing unitary (None when xi is diagonal)"""
    if np.max(np.abs(xi - np.diag(np.diag(xi)))) == 0.0:
        return np.diag(xi).imag.copy(), None
    w, U = np.linalg.eigh(-1j * xi)
    return w, U


def _centralizer_mask(w: np.ndarray) -> np.ndarray:
    scale = max(1.0, float(np.max(np.abs(w))))
    return np.abs(w[:, None] - w[None, :]) <= 1e-9 * scale


def project_centralizer(xi: np.ndarray, X: np.ndarray) -> np.ndarray:
    """P: orthogonal projection onto ker ad_xi"""
    _check_pair(xi, X)
    w, U = _eigenframe(xi)
    mask = _centralizer_mask(w)
    if U is None:
        return np.where(mask, X, 0)
    return U @ np.where(mask, dagger(U) @ X @ U, 0) @ dagger(U)


def project_complement(xi: np.ndarray, X: np.ndarray) -> np.ndarray:
    """P-perp = Id - P"""
    return X - project_centralizer(xi, X)


def solve_ad(xi: np.ndarray, Y: np.ndarray) -> np.ndarray:
    """rho in im(P-perp) with [xi, rho] = P-perp(Y)"""
    _check_pair(xi, Y)
    w, U = _eigenframe(xi)
    mask = _centralizer_mask(w)
    diff = 1j * (w[:, None] - w[None, :])
    safe = np.where(mask, 1.0, diff)
    if U is None:
        return np.where(mask, 0, Y / safe)
    Yt = dagger(U) @ Y @ U
    return U @ np.where(mask, 0, Yt / safe) @ dagger(U)


def stabilizer_projectors(xi: np.ndarray, basis: Optional[RealBasis] = None) -> Tuple[LinearMap, LinearMap]:
    """(P, P-perp) as matrices in `basis` (the x-basis for N = 3)"""
    if not is_su(xi, 1e-10):
        raise DomainError("xi must lie in su(N)")
    basis = basis or su_basis(xi.shape[0])
    P = LinearMap.from_function(lambda X: project_centralizer(xi, X), basis)
    Pperp = LinearMap.from_function(lambda X: project_complement(xi, X), basis)
    return P, Pperp


def complement_basis(xi: np.ndarray) -> List[np.ndarray]:
    """Root vectors spanning im(P-perp) for diagonal xi, orthonormal for -1/2 tr"""
    w, U = _eigenframe(xi)
    if U is not None:
        raise DomainError("complement_basis needs a diagonal xi")
    mask = _centralizer_mask(w)
    N = xi.shape[0]
    gens = []
    for a in range(N):
        for b in range(a + 1, N):
            if not mask[a, b]:
                gens.append(_unit(N, a, b) - _unit(N, b, a))
                gens.append(1j * (_unit(N, a, b) + _unit(N, b, a)))
    return gens


# ---------------------------------------------------------------------------
# Random sampling
# ---------------------------------------------------------------------------

def random_complex(N: int, rng: np.random.Generator, scale: float = 1.0) -> np.ndarray:
    return scale * (rng.standard_normal((N, N)) + 1j * rng.standard_normal((N, N))) / np.sqrt(2 * N)


def random_su(N: int, rng: np.random.Generator, scale: float = 1.0) -> np.ndarray:
    return project_su(random_complex(N, rng, scale))


def random_sl(N: int, rng: np.random.Generator, scale: float = 1.0) -> np.ndarray:
    return project_traceless(random_complex(N, rng, scale))


def random_special_unitary(N: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-distributed SU(N) via phase-corrected QR"""
    q, r = np.linalg.qr(random_complex(N, rng))
    d = np.diag(r)
    q = q * (d / np.abs(d))[None, :]
    return q / np.linalg.det(q) ** (1.0 / N)


def cartan_element(entries: Sequence[float]) -> np.ndarray:
    """i diag(entries), shifted to zero trace"""
    d = np.asarray(entries, dtype=float)
    return 1j * np.diag(d - d.mean())
