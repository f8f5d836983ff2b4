"""
Model catalogue: for every ModelKind the E-model, its spectral data and a
seeded initial point.
"""
from dataclasses import dataclass
from typing import Optional

import numpy as np

from core.algebra import TStarElement, cartan_element, dagger, project_complement, random_special_unitary, random_su
from core.biyb import biyb_spec, point_from_momentum
from core.cpn import cpn_zeta, point_from_chart
from core.doubles import EOperator, TStarDouble, TStarPoint
from core.dynamics import ModelSpec
from core.errors import ConfigError
from core.integrability import SpectralData, spectral_biyb, spectral_pcm
from core.pendulum import pendulum_spec, point_from_sphere
from models.results import ModelKind, XiPreset


def xi_from_preset(preset: XiPreset, n: int) -> np.ndarray:
    """Stabilized element in su(n): i diag(n-1, n-3, ..., 1-n) or i diag(1, ..., 1, -(n-1))"""
    if preset == XiPreset.CARTAN_REGULAR:
        return cartan_element([n - 1 - 2 * a for a in range(n)])
    return cpn_zeta(n - 1)


def group_size(model: ModelKind, N: int) -> int:
    """Matrix size of the compact group; N is the CP^N dimension for the CP^N models"""
    if model == ModelKind.PENDULUM or model == ModelKind.BIYB_SU2:
        return 2
    if model == ModelKind.BIYB_SU3:
        return 3
    if model in (ModelKind.CPN, ModelKind.YB_CPN):
        return N + 1
    return N


@dataclass(frozen=True)
class ModelPreset:
    model: ModelKind
    spec: ModelSpec
    spectral: SpectralData
    l0: object


def _default_preset(model: ModelKind) -> XiPreset:
    if model in (ModelKind.CPN, ModelKind.YB_CPN):
        return XiPreset.CPN_BLOCK
    return XiPreset.CARTAN_REGULAR


def build_model(model: ModelKind,
                N: int = 2,
                eta: float = 0.5,
                mu: float = 0.3,
                xi_preset: Optional[XiPreset] = None,
                seed: int = 0,
                scale: float = 0.5) -> ModelPreset:
    """
    Args:
        model: Catalogue entry
        N: Matrix size of SU(N), or the CP^N dimension for cpn and yb-cpn
        eta, mu: Deformation parameters (bi-YB models only; yb-cpn ignores mu)
        xi_preset: Choice of xi; the CP^N models always use the cpn block
        seed: Seed of the initial point
        scale: Size of the random momentum

    Raises:
        ConfigError: for incompatible parameters
    """
    n = group_size(model, N)
    if n < 2:
        raise ConfigError("N", f"model {model.value} needs a group of size at least 2, got {n}")
    preset = xi_preset or _default_preset(model)
    if model in (ModelKind.CPN, ModelKind.YB_CPN) and preset != XiPreset.CPN_BLOCK:
        raise ConfigError("xi_preset", f"model {model.value} requires {XiPreset.CPN_BLOCK.value}")
    rng = np.random.default_rng(seed)

    if model == ModelKind.PENDULUM:
        spec = pendulum_spec()
        l0 = point_from_sphere((np.sin(1.0), 0.0, np.cos(1.0)), (0.0, 0.8, 0.0), spec)
        return ModelPreset(model, spec, spectral_pcm(2), l0)

    if model == ModelKind.PCM:
        zeta = xi_from_preset(preset, n)
        spec = ModelSpec(TStarDouble(n), EOperator.tstar(n), TStarElement(zeta, np.zeros_like(zeta)),
                         label=f"pcm-su{n}")
        k = random_special_unitary(n, rng)
        rho = project_complement(zeta, random_su(n, rng, scale))
        return ModelPreset(model, spec, spectral_pcm(n), TStarPoint(k, k @ rho @ dagger(k)))

    if model == ModelKind.CPN:
        zeta = cpn_zeta(N)
        spec = ModelSpec(TStarDouble(n), EOperator.tstar(n), TStarElement(zeta, np.zeros_like(zeta)),
                         label=f"cp{N}")
        chi = rng.standard_normal(N) + 1j * rng.standard_normal(N)
        chi *= 0.5 / np.linalg.norm(chi)
        w = scale * (rng.standard_normal(N) + 1j * rng.standard_normal(N))
        return ModelPreset(model, spec, spectral_pcm(n), point_from_chart(chi, w, zeta))

    if eta <= 0:
        raise ConfigError("eta", f"model {model.value} needs eta > 0, got {eta}")
    if mu < 0:
        raise ConfigError("mu", f"mu must be non-negative, got {mu}")
    if model == ModelKind.YB_CPN:
        mu = 0.0
        xi = cpn_zeta(N)
    else:
        xi = xi_from_preset(preset, n)
    spec = biyb_spec(n, eta, mu, xi, label=f"{model.value}")
    k = random_special_unitary(n, rng)
    rho_p = project_complement(xi, random_su(n, rng, scale))
    return ModelPreset(model, spec, spectral_biyb(n, eta, mu), point_from_momentum(k, rho_p, xi, eta))
