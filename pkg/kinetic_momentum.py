#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
🧲 Kinetik Momentum Modülü

Bir-form (momentum) biçimli kinetik evrim ve yoğunluklara giden eşlemeler:

    Π̇ = −L_{X_H} Π                         (momentum-Vlasov)
    Π̇ = −L_{X_H^c} Π − c·n·Π               (konformal)
    Π̄̇ = −L_{ξ_H̄} Π̄ + (n+1)·R(H̄)·Π̄        (kontakt)
    Σ̄̇ = −L_{Y_H̄} Σ̄                         (katı kontakt)

    f = div Ω♯(Π) = ∂Π_p/∂q − ∂Π_q/∂p,   c* = ∫ ⟨Θ, Ω♯Π⟩ dμ = ∫ p·Π_p dμ

İşaret çapası: Π = Θ = p dq ⇒ Ω♯Π = Z ⇒ f = div Z = −n.
"""

import logging
from dataclasses import dataclass
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd

from geometry_core import FD_STEP, Arity, ScalarFunction
from kinetic_density import (BOUNDARY_THRESHOLD, DensityGrid, GridError, GridSpec, KineticModel, KineticSolver,
                             NonFiniteError, boundary_mass_fraction, derivative, grid_gradient, l2_norm,
                             sample_function)
from particle_dynamics import FieldKind, FieldTag, field_values

logging.basicConfig(level=logging.INFO, format='%(asctime)s - %(levelname)s - %(message)s')
logger = logging.getLogger(__name__)


@dataclass
class OneFormGrid:
    """
    Izgara üzerinde bir-form bileşenleri: Π_q dq + Π_p dp [+ Π_z dz]

    Her bileşen ayrı bitişik bir dizi olarak tutulur.
    """
    spec: GridSpec
    pi_q: np.ndarray
    pi_p: np.ndarray
    pi_z: Optional[np.ndarray] = None

    def __post_init__(self):
        self.pi_q = np.ascontiguousarray(self.pi_q, dtype=float)
        self.pi_p = np.ascontiguousarray(self.pi_p, dtype=float)
        if self.spec.arity == Arity.CONTACT:
            if self.pi_z is None:
                self.pi_z = np.zeros(self.spec.shape)
            self.pi_z = np.ascontiguousarray(self.pi_z, dtype=float)
        elif self.pi_z is not None:
            raise GridError("Simplektik ızgarada Π_z bileşeni olamaz")
        for comp in self.components:
            if comp.shape != self.spec.shape:
                raise GridError(f"Bileşen şekli {comp.shape}, ızgara {self.spec.shape}")
            if not np.all(np.isfinite(comp)):
                raise NonFiniteError("Bir-form sonlu olmayan değer içeriyor")

    @property
    def components(self) -> List[np.ndarray]:
        comps = [self.pi_q, self.pi_p]
        if self.pi_z is not None:
            comps.append(self.pi_z)
        return comps

    @classmethod
    def from_components(cls, spec: GridSpec, components: Sequence[np.ndarray]) -> "OneFormGrid":
        return cls(spec, *components)

    @classmethod
    def zeros(cls, spec: GridSpec) -> "OneFormGrid":
        return cls.from_components(spec, [np.zeros(spec.shape) for _ in range(spec.ndim)])

    @classmethod
    def sample(cls, spec: GridSpec, fn: Callable[[np.ndarray], Sequence[np.ndarray]]) -> "OneFormGrid":
        """Bileşenleri hücre merkezlerinde fn(mesh) ile örnekle"""
        mesh = spec.mesh()
        comps = [np.broadcast_to(np.asarray(c, dtype=float), spec.shape) for c in fn(mesh)]
        return cls.from_components(spec, comps)

    def __add__(self, other: "OneFormGrid") -> "OneFormGrid":
        if other.spec != self.spec:
            raise GridError("Farklı ızgaralardaki bir-formlar toplanamaz")
        return OneFormGrid.from_components(self.spec, [a + b for a, b in zip(self.components, other.components)])

    def scaled(self, k: float) -> "OneFormGrid":
        return OneFormGrid.from_components(self.spec, [k * a for a in self.components])

    def to_frame(self) -> pd.DataFrame:
        """Çok sütunlu anlık görüntü: koordinatlar + bileşenler"""
        mesh = self.spec.mesh()
        data = {axis.name: mesh[k].ravel() for k, axis in enumerate(self.spec.axes)}
        for axis, comp in zip(self.spec.axes, self.components):
            data[f"pi_{axis.name}"] = comp.ravel()
        return pd.DataFrame(data)


def _require_match(X: np.ndarray, Pi: OneFormGrid):
    if X.shape != (Pi.spec.ndim,) + Pi.spec.shape:
        raise GridError(f"Alan şekli {X.shape}, bir-form ızgarası {(Pi.spec.ndim,) + Pi.spec.shape}")


def lie_derivative_oneform(X: np.ndarray, Pi: OneFormGrid,
                           jacobian: Optional[np.ndarray] = None) -> OneFormGrid:
    """
    (L_X Π)_a = X^b ∂_b Π_a + Π_b ∂_a X^b

    Args:
        X: Izgarada örneklenmiş alan, şekil (ndim, *shape)
        Pi: Bir-form
        jacobian: İsteğe bağlı ∂_a X^b dizisi, şekil (ndim_b, ndim_a, *shape);
            verilmezse X'in türevleri de ızgara şablonlarıyla alınır

    Returns:
        L_X Π
    """
    _require_match(X, Pi)
    spec = Pi.spec
    comps = Pi.components
    if jacobian is None:
        jacobian = np.stack([np.stack(grid_gradient(X[b], spec)) for b in range(spec.ndim)])
    out = []
    for a in range(spec.ndim):
        grads = grid_gradient(comps[a], spec)
        transport = sum(X[b] * grads[b] for b in range(spec.ndim))
        stretch = sum(comps[b] * jacobian[b, a] for b in range(spec.ndim))
        out.append(transport + stretch)
    return OneFormGrid.from_components(spec, out)


def field_on_grid(kind: FieldKind, H: ScalarFunction, spec: GridSpec,
                  threads: Optional[int] = None) -> Tuple[np.ndarray, np.ndarray]:
    """
    Parçacık alanını ve Jacobian'ını ızgarada örnekle

    Jacobian noktasal merkezi farklarla alınır (ızgara şablonundan bağımsız).

    Returns:
        (X, J) ; J[b, a] = ∂_a X^b
    """
    if H.arity != spec.arity:
        raise GridError(f"{kind.label} alanı {spec.arity.value} ızgarayla uyumsuz")
    values = sample_function(lambda x: field_values(kind, H, x), spec, threads)

    def jacobian(x: np.ndarray) -> np.ndarray:
        columns = []
        for a in range(x.shape[0]):
            h = FD_STEP * np.maximum(1.0, np.abs(x[a]))
            forward = x.copy()
            backward = x.copy()
            forward[a] = x[a] + h
            backward[a] = x[a] - h
            span = forward[a] - backward[a]
            columns.append((field_values(kind, H, forward) - field_values(kind, H, backward)) / span)
        return np.stack(columns, axis=1)

    return values, sample_function(jacobian, spec, threads)


class MomentumSolver:
    """Sabit Hamiltonyenli bir-form akışı (RK4)"""

    def __init__(self, kind: FieldKind, H: ScalarFunction, spec: GridSpec,
                 threads: Optional[int] = None):
        if kind.arity != spec.arity:
            raise GridError(f"{kind.label} türü {spec.arity.value} ızgarayla uyumsuz")
        self.kind = kind
        self.H = H
        self.spec = spec
        self.X, self.jacobian = field_on_grid(kind, H, spec, threads)
        self.reeb_h = None
        if kind.tag == FieldTag.CONTACT:
            self.reeb_h = sample_function(H.gradient, spec, threads)[2]

    def rate(self, Pi: OneFormGrid) -> OneFormGrid:
        if Pi.spec != self.spec:
            raise GridError("Bir-form ızgarası çözücü ızgarasıyla uyuşmuyor")
        lie = lie_derivative_oneform(self.X, Pi, self.jacobian)
        comps = [-c for c in lie.components]
        if self.kind.tag == FieldTag.CONFORMAL and self.kind.c != 0.0:
            # n = 1 ızgarası
            comps = [r - self.kind.c * pi for r, pi in zip(comps, Pi.components)]
        elif self.kind.tag == FieldTag.CONTACT:
            comps = [r + 2.0 * self.reeb_h * pi for r, pi in zip(comps, Pi.components)]
        return OneFormGrid.from_components(self.spec, comps)

    def step(self, Pi: OneFormGrid, dt: float) -> OneFormGrid:
        k1 = self.rate(Pi)
        k2 = self.rate(Pi + k1.scaled(0.5 * dt))
        k3 = self.rate(Pi + k2.scaled(0.5 * dt))
        k4 = self.rate(Pi + k3.scaled(dt))
        comps = [p + dt / 6.0 * (a + 2.0 * b + 2.0 * c + d)
                 for p, a, b, c, d in zip(Pi.components, k1.components, k2.components,
                                          k3.components, k4.components)]
        if not all(np.all(np.isfinite(c)) for c in comps):
            logger.error(f"Sonlu olmayan bir-form: {self.kind.label}")
            raise NonFiniteError(f"{self.kind.label} momentum adımı sonlu olmayan değer üretti")
        return OneFormGrid.from_components(self.spec, comps)

    def run(self, Pi: OneFormGrid, dt: float, steps: int) -> OneFormGrid:
        for _ in range(steps):
            Pi = self.step(Pi, dt)
        check_oneform_decay(Pi)
        return Pi


def momentum_rhs(kind: FieldKind, Pi: OneFormGrid, H: ScalarFunction,
                 threads: Optional[int] = None) -> OneFormGrid:
    """
    Bir-form kinetik denklemin sağ tarafı

    hamiltonian:    −L_{X_H} Π
    conformal(c):   −L_{X_H^c} Π − c·n·Π
    contact:        −L_{ξ_H̄} Π̄ + (n+1)·R(H̄)·Π̄
    strict_contact: −L_{Y_H̄} Σ̄
    """
    return MomentumSolver(kind, H, Pi.spec, threads).rate(Pi)


def density_from_oneform(Pi: OneFormGrid) -> DensityGrid:
    """f = div Ω♯(Π) = ∂Π_p/∂q − ∂Π_q/∂p"""
    Pi.spec.require(Arity.SYMPLECTIC)
    q_axis, p_axis = Pi.spec.axes
    values = (derivative(Pi.pi_p, 0, q_axis.h, q_axis.boundary)
              - derivative(Pi.pi_q, 1, p_axis.h, p_axis.boundary))
    return DensityGrid(Pi.spec, values)


def cstar_from_oneform(Pi: OneFormGrid) -> float:
    """c* = ∫ ⟨Θ, Ω♯Π⟩ dμ, Θ = p dq ⇒ integrand p·Π_p"""
    Pi.spec.require(Arity.SYMPLECTIC)
    p = Pi.spec.mesh()[1]
    return float(np.sum(p * Pi.pi_p) * Pi.spec.cell_volume)


def conformal_state_from_oneform(Pi: OneFormGrid) -> DensityGrid:
    """(f, c*) ikilisi tek DensityGrid olarak"""
    f = density_from_oneform(Pi)
    f.cstar = cstar_from_oneform(Pi)
    return f


def contact_density_from_oneform(Pi: OneFormGrid, strict: bool = False) -> DensityGrid:
    """
    Kontakt bir-formdan yoğunluk (n = 1)

    strict=False: f̄ = ∂Π̄_p/∂q − ∂Π̄_q/∂p − p(∂Π̄_z/∂p − ∂Π̄_p/∂z) − (n−1)Π̄_z
    strict=True:  f(q,p) = ∫ (aynı ifade + ∂Σ̄_z/∂z) dz, simplektik ızgarada

    GridSpec yalnızca (q, p, z) eksenlerine izin verir; n = 1'de (n−1)Π̄_z terimi sıfırdır.
    """
    spec = Pi.spec
    spec.require(Arity.CONTACT)
    q_axis, p_axis, z_axis = spec.axes
    p = spec.mesh()[1]
    values = (derivative(Pi.pi_p, 0, q_axis.h, q_axis.boundary)
              - derivative(Pi.pi_q, 1, p_axis.h, p_axis.boundary)
              - p * (derivative(Pi.pi_z, 1, p_axis.h, p_axis.boundary)
                     - derivative(Pi.pi_p, 2, z_axis.h, z_axis.boundary)))
    if not strict:
        return DensityGrid(spec, values)
    values = values + derivative(Pi.pi_z, 2, z_axis.h, z_axis.boundary)
    return DensityGrid(spec.symplectic_part(), np.sum(values, axis=2) * z_axis.h)


def strict_density_from_oneform(Sigma: OneFormGrid) -> DensityGrid:
    return contact_density_from_oneform(Sigma, strict=True)


def momentum_density_intertwining(kind: FieldKind, H: ScalarFunction, Pi0: OneFormGrid, dt: float,
                                  steps: int, threads: Optional[int] = None) -> Dict[str, Optional[float]]:
    """
    Bir-form akışı ile yoğunluk akışının sarmalanma farkı

    Π0 bir-form çözücüsüyle, (f, c*) = (div Ω♯Π0, ∫ p·Π0_p dμ) yoğunluk çözücüsüyle
    aynı adımlarla evrilir; sonuç bir-formun yoğunluğu ile karşılaştırılır.

    Args:
        kind: hamiltonian ya da conformal(c)
        H: Simplektik Hamiltonyen
        Pi0: Simplektik ızgarada başlangıç bir-formu
        dt, steps: RK4 adımı ve adım sayısı

    Returns:
        {density_l2, cstar_momentum, cstar_density}; Vlasov için cstar_density None
    """
    spec = Pi0.spec
    spec.require(Arity.SYMPLECTIC)
    conformal = kind.tag == FieldTag.CONFORMAL
    model = KineticModel.conformal(kind.c) if conformal else KineticModel.vlasov()
    Pi = MomentumSolver(kind, H, spec, threads).run(Pi0, dt, steps)
    start = conformal_state_from_oneform(Pi0) if conformal else density_from_oneform(Pi0)
    evolved, _ = KineticSolver(model, H, spec, threads).run(start, dt, steps, record_every=max(steps, 1))
    return {
        "density_l2": l2_norm(density_from_oneform(Pi).values - evolved.values, spec),
        "cstar_momentum": cstar_from_oneform(Pi),
        "cstar_density": evolved.cstar if conformal else None,
    }


def check_oneform_decay(Pi: OneFormGrid, threshold: float = BOUNDARY_THRESHOLD) -> float:
    """Bileşen büyüklüklerinin kesik sınırlara yakın oranı; eşik aşılırsa uyarı"""
    magnitude = np.sqrt(sum(c ** 2 for c in Pi.components))
    fraction = boundary_mass_fraction(magnitude, Pi.spec)
    if fraction > threshold:
        logger.warning(f"Bir-form sınıra yakın ağırlık oranı {fraction:.3e} > {threshold:g}")
    return fraction
