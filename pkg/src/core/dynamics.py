"""
The point particle E-model: current, Hamiltonian, presymplectic data, first
order equations of motion, the group-level flow and trajectory integration
with invariant monitoring.
"""
from dataclasses import dataclass, field
from typing import TYPE_CHECKING, Dict, List, Optional, Sequence, Tuple

import numpy as np
from loguru import logger
from scipy.integrate import solve_ivp

from core.algebra import Element, TStarElement, element_norm, is_su
from core.doubles import DoubleKind, DrinfeldDouble, EKind, EOperator, SLPoint, TStarPoint
from core.errors import DomainError, NumericalAbortError
from models.config import format_complex, step_count
from models.results import Scheme

if TYPE_CHECKING:
    from core.integrability import SpectralData


@dataclass(frozen=True)
class ModelSpec:
    """Double, E-operator and the stabilized element xi in the isotropic half"""
    double: DrinfeldDouble
    e_op: EOperator
    xi: Element
    label: str = ""

    def __post_init__(self):
        if self.e_op.N != self.double.N:
            raise DomainError(f"E-operator acts on N={self.e_op.N}, double has N={self.double.N}")
        if self.double.kind == DoubleKind.TSTAR:
            if not isinstance(self.xi, TStarElement):
                raise DomainError("T*K models need xi = (zeta, 0)")
            if np.max(np.abs(self.xi.second)) > 0 or not is_su(self.xi.first, 1e-10):
                raise DomainError("xi must be (zeta, 0) with zeta in su(N)")
            if self.e_op.kind != EKind.TSTAR_FLIP:
                raise DomainError("T*K models use the flip E-operator")
        else:
            if isinstance(self.xi, TStarElement):
                raise DomainError("SL(N,C) models need a matrix xi")
            off = self.xi - np.diag(np.diag(self.xi))
            if np.max(np.abs(off)) > 0 or not is_su(self.xi, 1e-10):
                raise DomainError("xi must be a Cartan element of su(N)")
            if self.e_op.kind != EKind.BIYB or abs(self.e_op.eta - self.double.eta) > 0:
                raise DomainError("SL(N,C) models use E_{eta,mu} with the double's eta")

    @property
    def N(self) -> int:
        return self.double.N

    @property
    def double_kind(self) -> DoubleKind:
        return self.double.kind

    @property
    def xi_matrix(self) -> np.ndarray:
        """xi as an element of su(N)"""
        return self.xi.first if isinstance(self.xi, TStarElement) else self.xi


def _check_point(l, spec: ModelSpec) -> None:
    expected = TStarPoint if spec.double_kind == DoubleKind.TSTAR else SLPoint
    if not isinstance(l, expected):
        raise DomainError(f"{spec.label or 'model'} expects a {expected.__name__}, got {type(l).__name__}")
    if l.N != spec.N:
        raise DomainError(f"Point has N={l.N}, model has N={spec.N}")


def current_of(l, spec: ModelSpec) -> Element:
    """j = xi - Ad_l xi"""
    _check_point(l, spec)
    return spec.xi - spec.double.adjoint(l, spec.xi)


def hamiltonian(j: Element, spec: ModelSpec) -> float:
    """H = 1/2 (j, E j)"""
    return 0.5 * spec.double.form(j, spec.e_op(j))


def eom_rhs(j: Element, spec: ModelSpec) -> Element:
    """dj/dt = [xi, E j] + [E j, j]"""
    D = spec.double
    Ej = spec.e_op(j)
    return D.bracket(spec.xi, Ej) + D.bracket(Ej, j)


def group_flow_rhs(l, spec: ModelSpec):
    """dl/dt = (E j(l)) l, in the point's own coordinates"""
    return spec.double.flow_tangent(l, spec.e_op(current_of(l, spec)))


def presymplectic_form(l, X: Element, Y: Element, spec: ModelSpec) -> float:
    """-d(xi, l^-1 dl) evaluated on the left-translated tangents lX, lY"""
    _check_point(l, spec)
    D = spec.double
    return D.form(spec.xi, D.bracket(X, Y))


def symplectic_potential(l, dl_left: Element, spec: ModelSpec) -> float:
    """-(xi, l^-1 dl) on a left-trivialized tangent"""
    return -spec.double.form(spec.xi, dl_left)


def presymplectic_oracle(l, X: Element, Y: Element, spec: ModelSpec, h: float = 1e-5) -> float:
    """
    Exterior derivative of the symplectic potential on the coordinate square
    (s, t) -> l exp(sX) exp(tY), by central differences in t.
    """
    _check_point(l, spec)
    D = spec.double

    def potential_along_s(t: float) -> float:
        # left-trivialized d/ds at s = 0
        return symplectic_potential(l, D.adjoint(D.exp(Y * -t), X), spec)

    # the potential on d/dt is the constant -(xi, Y)
    return -(potential_along_s(h) - potential_along_s(-h)) / (2 * h)


def poisson_bracket_current(T1: Element, T2: Element, j: Element, spec: ModelSpec) -> float:
    """{(j, T1), (j, T2)} = (j, [T1, T2]) + (T1, [xi, T2])"""
    D = spec.double
    return D.form(j, D.bracket(T1, T2)) + D.form(T1, D.bracket(spec.xi, T2))


def orbit_matrix(x: Element) -> np.ndarray:
    """Matrix whose spectrum labels the coadjoint orbit of xi - j"""
    return x.first if isinstance(x, TStarElement) else x


# ---------------------------------------------------------------------------
# Trajectories
# ---------------------------------------------------------------------------

def lambda_label(lam: complex) -> str:
    """'a+bi' rendering used in column names"""
    return format_complex(lam)


@dataclass
class Trajectory:
    """Time series of group points, currents, energies and Lax invariants"""
    times: np.ndarray
    points: List
    currents: List[Element]
    hamiltonian: np.ndarray
    invariants: Dict[Tuple[complex, int], np.ndarray] = field(default_factory=dict)
    tracked_currents: List[Element] = field(default_factory=list)
    max_drift: float = 0.0
    renormalizations: int = 0
    scheme: Scheme = Scheme.RK4
    dt: float = 0.0

    def __post_init__(self):
        n = len(self.times)
        if not (len(self.points) == len(self.currents) == len(self.hamiltonian) == n):
            raise ValueError("Trajectory columns have different lengths")
        if n > 1 and np.any(np.diff(self.times) <= 0):
            raise ValueError("Trajectory times must be strictly increasing")

    def __len__(self) -> int:
        return len(self.times)

    @property
    def sample_step(self) -> float:
        return float(self.times[1] - self.times[0]) if len(self.times) > 1 else self.dt

    @property
    def energy_drift(self) -> float:
        """max |H - H0| / |H0| (absolute when H0 vanishes)"""
        H0 = self.hamiltonian[0]
        scale = abs(H0) if abs(H0) > 1e-300 else 1.0
        return float(np.max(np.abs(self.hamiltonian - H0)) / scale)

    def invariant_drift(self, lam: complex, power: int) -> float:
        series = self.invariants[(complex(lam), power)]
        I0 = series[0]
        scale = abs(I0) if abs(I0) > 1e-12 else 1.0
        return float(np.max(np.abs(series - I0)) / scale)

    def moment_map_residual(self) -> float:
        """max |j_tracked - (xi - Ad_l xi)| when the current was integrated alongside"""
        if not self.tracked_currents:
            return 0.0
        return max(element_norm(a - b) for a, b in zip(self.tracked_currents, self.currents))

    def orbit_spectrum_drift(self, spec: ModelSpec) -> float:
        """Drift of the characteristic polynomial of xi - j"""
        coeffs = [np.poly(orbit_matrix(spec.xi - j)) for j in self.currents]
        base = coeffs[0]
        scale = max(float(np.linalg.norm(base)), 1.0)
        return max(float(np.linalg.norm(c - base)) for c in coeffs) / scale


class _Monitor:
    """Collects samples and Lax invariants during integration"""

    def __init__(self, spec: ModelSpec, lambdas: Sequence[complex], spectral: Optional["SpectralData"]):
        self.spec = spec
        self.lambdas = [complex(lam) for lam in lambdas] if spectral is not None else []
        self.spectral = spectral
        self.times: List[float] = []
        self.points: List = []
        self.currents: List[Element] = []
        self.tracked: List[Element] = []
        self.energy: List[float] = []
        self.invariants: Dict[Tuple[complex, int], List[complex]] = {
            (lam, p): [] for lam in self.lambdas for p in (2, 3)
        }

    def record(self, t: float, point, tracked: Optional[Element]) -> None:
        j = current_of(point, self.spec)
        self.times.append(t)
        self.points.append(point)
        self.currents.append(j)
        self.energy.append(hamiltonian(j, self.spec))
        if tracked is not None:
            self.tracked.append(tracked)
        for lam in self.lambdas:
            L = self.spectral.lax_matrix(j, lam, self.spec)
            L2 = L @ L
            self.invariants[(lam, 2)].append(np.trace(L2))
            self.invariants[(lam, 3)].append(np.trace(L2 @ L))

    def build(self, **kwargs) -> Trajectory:
        return Trajectory(
            times=np.array(self.times),
            points=self.points,
            currents=self.currents,
            hamiltonian=np.array(self.energy),
            invariants={key: np.array(v) for key, v in self.invariants.items()},
            tracked_currents=self.tracked,
            **kwargs,
        )


def integrate(spec: ModelSpec,
              l0,
              t_end: float,
              dt: float,
              scheme: Scheme = Scheme.RK4,
              lambdas: Sequence[complex] = (),
              spectral: Optional["SpectralData"] = None,
              rtol: float = 1e-10,
              atol: float = 1e-12,
              renormalize_threshold: float = 1e-8,
              record_every: int = 1,
              track_current: bool = True) -> Trajectory:
    """
    Integrate the group-level flow dl/dt = (E j) l.

    Args:
        spec: Model specification
        l0: Initial group point
        t_end: Final time
        dt: Step (RK4) or output spacing (adaptive)
        scheme: RK4 or adaptive Dormand-Prince
        lambdas: Spectral parameters at which tr L^2, tr L^3 are monitored
        spectral: Spectral data providing the Lax matrix
        rtol, atol: Adaptive tolerances
        renormalize_threshold: Group drift above which the point is re-projected (RK4 only)
        record_every: Keep every n-th step
        track_current: Integrate the current equation alongside for the moment-map check

    Returns:
        Trajectory

    Raises:
        DomainError: if t_end is not a whole number of steps dt
        NumericalAbortError: on a non-finite state
    """
    _check_point(l0, spec)
    n_steps = step_count(t_end, dt)
    D = spec.double
    n_point = len(D.pack(l0))

    def rhs(y: np.ndarray) -> np.ndarray:
        point = D.unpack(y[:n_point])
        j = current_of(point, spec)
        Ej = spec.e_op(j)
        parts = [D.pack(D.flow_tangent(point, Ej))]
        if track_current:
            jt = D.unpack_element(y[n_point:])
            parts.append(D.pack_element(eom_rhs(jt, spec)))
        return np.concatenate(parts)

    def split(y: np.ndarray):
        point = D.unpack(y[:n_point].copy())
        tracked = D.unpack_element(y[n_point:].copy()) if track_current else None
        return point, tracked

    y = D.pack(l0)
    if track_current:
        y = np.concatenate([y, D.pack_element(current_of(l0, spec))])

    monitor = _Monitor(spec, lambdas, spectral)
    max_drift = D.drift(l0)
    renormalizations = 0
    logger.debug(f"Integrating {spec.label or spec.double_kind.value}: {n_steps} steps, scheme {scheme.value}")

    if scheme == Scheme.RK4:
        monitor.record(0.0, *split(y))
        for step in range(1, n_steps + 1):
            k1 = rhs(y)
            k2 = rhs(y + 0.5 * dt * k1)
            k3 = rhs(y + 0.5 * dt * k2)
            k4 = rhs(y + dt * k3)
            y = y + (dt / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
            if not np.all(np.isfinite(y)):
                raise NumericalAbortError(
                    f"Non-finite state at step {step}",
                    {"step": step, "time": step * dt, "reason": "non-finite state"},
                )
            point, tracked = split(y)
            drift = D.drift(point)
            max_drift = max(max_drift, drift)
            if drift > renormalize_threshold:
                point = D.renormalize(point)
                renormalizations += 1
                y = np.concatenate([D.pack(point), y[n_point:]])
                logger.debug(f"Renormalized group point at t={step * dt:.6g} (drift {drift:.3e})")
            if step % record_every == 0:
                monitor.record(step * dt, point, tracked)
    else:
        t_eval = np.arange(0, n_steps + 1, record_every) * dt
        sol = solve_ivp(lambda t, v: rhs(v), (0.0, t_eval[-1]), y, method="DOP853",
                        t_eval=t_eval, rtol=rtol, atol=atol)
        if not sol.success or not np.all(np.isfinite(sol.y)):
            raise NumericalAbortError(
                f"Adaptive integration failed: {sol.message}",
                {"time": float(sol.t[-1]) if len(sol.t) else 0.0, "reason": str(sol.message)},
            )
        for t, column in zip(sol.t, sol.y.T):
            point, tracked = split(column)
            max_drift = max(max_drift, D.drift(point))
            monitor.record(float(t), point, tracked)

    if renormalizations:
        logger.warning(f"{renormalizations} renormalizations during integration of {spec.label or 'model'}")
    return monitor.build(max_drift=max_drift, renormalizations=renormalizations, scheme=scheme, dt=dt)

