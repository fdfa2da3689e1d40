#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
🚀 Parçacık Dinamiği Modülü

Hamilton, konformal, kontakt ve katı kontakt vektör alanlarının
değerlendirilmesi; RK4 ve konformal Strang ayrıştırma ile yörünge
integrasyonu; diverjans ve akış hacim çarpanı tanıları.

Kullanım:
    from particle_dynamics import FieldKind, integrate
    tr = integrate(FieldKind.conformal(0.2), H, PhaseState([1.0], [0.0]), T=1.0, dt=1e-3)
    tr.diagnostics[['t', 'energy']]
"""

import logging
from dataclasses import dataclass
from enum import Enum
from typing import Callable, List, Optional, Sequence

import numpy as np
import pandas as pd
from scipy.linalg import expm, lu_factor

from geometry_core import (Arity, ArityError, ContactState, PhaseState, ScalarFunction,
                           central_jacobian, coordinates, split_coordinates)

logging.basicConfig(level=logging.INFO, format='%(asctime)s - %(levelname)s - %(message)s')
logger = logging.getLogger(__name__)

BLOWUP_LIMIT = 1e12
Z_INDEPENDENCE_TOL = 1e-10


class IntegrationError(RuntimeError):
    """Sonlu olmayan ya da patlayan durum"""

    def __init__(self, message: str, step: int):
        super().__init__(f"{message} (adım {step})")
        self.step = step


class FieldKindError(ValueError):
    """Alan türü ile Hamiltonyen uyumsuz"""


class FieldTag(str, Enum):
    HAMILTONIAN = "hamiltonian"
    CONFORMAL = "conformal"
    CONTACT = "contact"
    STRICT_CONTACT = "strict_contact"


class Method(str, Enum):
    RK4 = "rk4"
    CONFORMAL_SPLITTING = "conformal_splitting"


@dataclass(frozen=True)
class FieldKind:
    """Vektör alanı türü; konformal parametre c yalnızca CONFORMAL için anlamlı"""
    tag: FieldTag
    c: float = 0.0

    @classmethod
    def hamiltonian(cls) -> "FieldKind":
        return cls(FieldTag.HAMILTONIAN)

    @classmethod
    def conformal(cls, c: float) -> "FieldKind":
        return cls(FieldTag.CONFORMAL, float(c))

    @classmethod
    def contact(cls) -> "FieldKind":
        return cls(FieldTag.CONTACT)

    @classmethod
    def strict_contact(cls) -> "FieldKind":
        return cls(FieldTag.STRICT_CONTACT)

    @classmethod
    def parse(cls, name: str, c: float = 0.0) -> "FieldKind":
        tag = FieldTag(name)
        return cls(tag, float(c) if tag == FieldTag.CONFORMAL else 0.0)

    @property
    def arity(self) -> Arity:
        if self.tag in (FieldTag.CONTACT, FieldTag.STRICT_CONTACT):
            return Arity.CONTACT
        return Arity.SYMPLECTIC

    @property
    def label(self) -> str:
        return f"conformal(c={self.c:g})" if self.tag == FieldTag.CONFORMAL else self.tag.value


def _check(kind: FieldKind, H: ScalarFunction, s) -> np.ndarray:
    if H.arity != kind.arity:
        raise ArityError(f"{kind.label} alanı {H.arity.value} aritede Hamiltonyen kabul etmez")
    x = coordinates(s)
    if x.shape[0] != H.dim:
        raise ArityError(f"{kind.label}: {H.dim} koordinat beklenirken {x.shape[0]} geldi")
    return x


def require_z_independent(H: ScalarFunction, states: Sequence, tol: float = Z_INDEPENDENCE_TOL):
    """∂H̄/∂z'yi örnek noktalarda yokla; katı kontakt ön koşulu"""
    for s in states:
        hz = np.asarray(H.partials(s)[2])
        if np.max(np.abs(hz)) > tol:
            raise FieldKindError(f"strict_contact z'ye bağlı {H.name} kabul etmez: |∂H/∂z| = {np.max(np.abs(hz)):.3e}")


def field_values(kind: FieldKind, H: ScalarFunction, x: np.ndarray) -> np.ndarray:
    """
    Vektör alanını koordinat dizisi üzerinde değerlendir (nokta veya ızgara)

    Args:
        kind: Alan türü
        H: Hamiltonyen (kontakt türlerde H̄)
        x: Koordinatlar, şekil (dim, ...)

    Returns:
        Alan bileşenleri, şekil (dim, ...)
    """
    x = _check(kind, H, x)
    n = H.n
    grad = H.gradient(x)
    hq, hp, hz = split_coordinates(grad, n)
    _, p, _ = split_coordinates(x, n)
    if kind.tag == FieldTag.HAMILTONIAN:
        return np.concatenate([hp, -hq])
    if kind.tag == FieldTag.CONFORMAL:
        pdot = -hq
        if kind.c != 0.0:
            pdot = pdot + kind.c * p
        return np.concatenate([hp, pdot])
    if kind.tag == FieldTag.STRICT_CONTACT:
        if np.max(np.abs(hz)) > Z_INDEPENDENCE_TOL:
            raise FieldKindError(f"strict_contact z'ye bağlı {H.name} kabul etmez")
        hz = np.zeros_like(hz)
    zdot = np.sum(p * hp, axis=0) - np.asarray(H(x))
    return np.concatenate([hp, -hq - p * hz, zdot[np.newaxis]])


def evaluate_field(kind: FieldKind, H: ScalarFunction, s) -> np.ndarray:
    """
    Bir noktada vektör alanı

    hamiltonian:    (∂H/∂p, −∂H/∂q)
    conformal(c):   (∂H/∂p, −∂H/∂q + c·p)
    contact:        (∂H̄/∂p, −∂H̄/∂q − p·∂H̄/∂z, p·∂H̄/∂p − H̄)
    strict_contact: aynısı, ∂H̄/∂z ≡ 0
    """
    x = _check(kind, H, s)
    if x.ndim != 1:
        raise ArityError("evaluate_field tek bir durum bekler; ızgara için field_values kullanın")
    return field_values(kind, H, x)


def divergence(kind: FieldKind, H: ScalarFunction, s) -> float:
    """
    Kapalı form diverjans: 0, n·c, −(n+1)·∂H̄/∂z, 0
    """
    x = _check(kind, H, s)
    n = H.n
    if kind.tag == FieldTag.HAMILTONIAN:
        return 0.0
    if kind.tag == FieldTag.CONFORMAL:
        return n * kind.c
    hz = H.partials(x)[2]
    if kind.tag == FieldTag.STRICT_CONTACT:
        if np.max(np.abs(hz)) > Z_INDEPENDENCE_TOL:
            raise FieldKindError(f"strict_contact z'ye bağlı {H.name} kabul etmez")
        return 0.0
    return float(-(n + 1) * hz)


def fd_divergence(kind: FieldKind, H: ScalarFunction, s) -> float:
    """Alanın sonlu fark Jacobian izinden diverjans"""
    x = _check(kind, H, s)
    return float(np.trace(central_jacobian(lambda y: field_values(kind, H, y), x)))


def lu_determinant(matrix: np.ndarray) -> float:
    """Kısmi pivotlu LU ile determinant"""
    lu, piv = lu_factor(matrix)
    swaps = np.count_nonzero(piv != np.arange(piv.size))
    sign = -1.0 if swaps % 2 else 1.0
    return float(sign * np.prod(np.diag(lu)))


@dataclass
class Trajectory:
    """
    Örneklenmiş akış

    Attributes:
        kind: Alan türü
        times: t_k = k·dt
        states: (adım+1, dim) koordinat dizisi
        diagnostics: step, t, energy, log_volume, dt sütunlu tablo
    """
    kind: FieldKind
    n: int
    times: np.ndarray
    states: np.ndarray
    diagnostics: pd.DataFrame
    volume_factors: Optional[np.ndarray] = None

    def __post_init__(self):
        if self.times.size > 1 and not np.all(np.diff(self.times) > 0):
            raise ValueError("Yörünge zamanları kesin artan olmalı")
        if not np.all(np.isfinite(self.states)):
            raise ValueError("Yörünge sonlu olmayan durum içeriyor")

    @property
    def arity(self) -> Arity:
        return Arity.SYMPLECTIC if self.states.shape[1] == 2 * self.n else Arity.CONTACT

    def state_at(self, k: int):
        x = self.states[k]
        if self.arity == Arity.SYMPLECTIC:
            return PhaseState.from_array(x)
        return ContactState.from_array(x)

    @property
    def q(self) -> np.ndarray:
        return self.states[:, :self.n]

    @property
    def p(self) -> np.ndarray:
        return self.states[:, self.n:2 * self.n]

    @property
    def z(self) -> Optional[np.ndarray]:
        return self.states[:, 2 * self.n] if self.arity == Arity.CONTACT else None

    def to_frame(self) -> pd.DataFrame:
        """Zaman, koordinatlar ve tanılar tek tabloda"""
        names = [f"q{i + 1}" for i in range(self.n)] + [f"p{i + 1}" for i in range(self.n)]
        if self.arity == Arity.CONTACT:
            names.append("z")
        frame = pd.DataFrame(self.states, columns=names)
        frame.insert(0, "t", self.times)
        frame["energy"] = self.diagnostics["energy"].to_numpy()
        frame["log_volume"] = self.diagnostics["log_volume"].to_numpy()
        return frame


def _step_count(T: float, dt: float) -> int:
    if not dt > 0:
        raise ValueError("dt must be positive")
    if not T >= dt:
        raise ValueError(f"T ({T}) en az dt ({dt}) olmalı")
    return int(round(T / dt))


def _guard(x: np.ndarray, step: int):
    if not np.all(np.isfinite(x)) or np.max(np.abs(x)) > BLOWUP_LIMIT:
        logger.error(f"İntegrasyon durduruldu: adım {step}, |x| = {np.max(np.abs(x)):.3e}")
        raise IntegrationError("Durum sonlu değil ya da 1e12 sınırını aştı", step)


def _rk4(rhs: Callable[[np.ndarray], np.ndarray], y: np.ndarray, dt: float) -> np.ndarray:
    k1 = rhs(y)
    k2 = rhs(y + 0.5 * dt * k1)
    k3 = rhs(y + 0.5 * dt * k2)
    k4 = rhs(y + dt * k3)
    return y + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def check_separable(H: ScalarFunction, probes: Sequence, tol: float = 1e-6):
    """H = T(p) + V(q) ayrışabilirliğini karışık türevlerle yokla"""
    n = H.n
    for probe in probes:
        x = coordinates(probe)
        grad = H.gradient(x)
        for k in range(n):
            shifted = x.copy()
            h = 1e-4 * max(1.0, abs(x[n + k]))
            shifted[n + k] += h
            mixed = (H.gradient(shifted)[:n] - grad[:n]) / h
            if np.max(np.abs(mixed)) > tol * max(1.0, float(np.max(np.abs(grad)))):
                raise FieldKindError(f"conformal_splitting ayrışabilir H = T(p)+V(q) gerektirir: {H.name}")


def _probe_states(x0: np.ndarray, count: int = 4) -> List[np.ndarray]:
    rng = np.random.default_rng(0)
    return [x0] + [x0 + rng.uniform(-1.0, 1.0, size=x0.size) for _ in range(count)]


def integrate(kind: FieldKind, H: ScalarFunction, s0, T: float, dt: float,
              method: str = "rk4", variational: bool = False) -> Trajectory:
    """
    Yörünge integrasyonu

    Args:
        kind: Alan türü
        H: Hamiltonyen
        s0: Başlangıç durumu
        T: Toplam süre
        dt: Adım (T ≥ dt > 0)
        method: rk4 | conformal_splitting
        variational: True ise teğet eşleme Φ de integre edilir

    Returns:
        Trajectory; log_volume sütunu ∫div dt birikimini taşır

    Raises:
        IntegrationError: Patlama ya da sonlu olmayan durum
    """
    method = Method(method)
    steps = _step_count(T, dt)
    x0 = _check(kind, H, s0).astype(float)
    n = H.n
    dim = x0.size

    if kind.tag == FieldTag.STRICT_CONTACT:
        require_z_independent(H, _probe_states(x0))

    if method == Method.CONFORMAL_SPLITTING:
        if kind.tag != FieldTag.CONFORMAL:
            raise FieldKindError("conformal_splitting yalnızca conformal alan türü için geçerli")
        check_separable(H, _probe_states(x0))

    logger.info(f"İntegrasyon başladı: {kind.label}, {method.value}, {steps} adım, dt={dt:g}")

    def rhs(y: np.ndarray) -> np.ndarray:
        x = y[:dim]
        out = [field_values(kind, H, x), [divergence(kind, H, x)]]
        if variational:
            phi = y[dim + 1:].reshape(dim, dim)
            jac = central_jacobian(lambda v: field_values(kind, H, v), x)
            out.append((jac @ phi).ravel())
        return np.concatenate(out)

    def split_step(y: np.ndarray) -> np.ndarray:
        x = split_step_state(y[:dim])
        parts = [x, [y[dim] + n * kind.c * dt]]
        if variational:
            phi = y[dim + 1:].reshape(dim, dim)
            step_map = central_jacobian(lambda v: split_step_state(v), y[:dim])
            parts.append((step_map @ phi).ravel())
        return np.concatenate(parts)

    def split_step_state(x: np.ndarray) -> np.ndarray:
        x = x.copy()
        decay = np.exp(0.5 * kind.c * dt)
        x[n:] *= decay
        x[n:] -= 0.5 * dt * H.gradient(x)[:n]
        x[:n] += dt * H.gradient(x)[n:]
        x[n:] -= 0.5 * dt * H.gradient(x)[:n]
        x[n:] *= decay
        return x

    y = np.concatenate([x0, [0.0]])
    if variational:
        y = np.concatenate([y, np.eye(dim).ravel()])

    states = np.empty((steps + 1, dim))
    log_volume = np.empty(steps + 1)
    factors = np.empty(steps + 1) if variational else None
    states[0] = x0
    log_volume[0] = 0.0
    if variational:
        factors[0] = 1.0

    for k in range(1, steps + 1):
        y = _rk4(rhs, y, dt) if method == Method.RK4 else split_step(y)
        _guard(y[:dim], k)
        states[k] = y[:dim]
        log_volume[k] = y[dim]
        if variational:
            factors[k] = lu_determinant(y[dim + 1:].reshape(dim, dim))

    times = dt * np.arange(steps + 1)
    energy = np.asarray(H(states.T))
    diagnostics = pd.DataFrame({
        "step": np.arange(steps + 1),
        "t": times,
        "energy": energy,
        "log_volume": log_volume,
        "dt": np.full(steps + 1, dt),
    })
    logger.info(f"İntegrasyon tamamlandı: {kind.label}, son enerji {energy[-1]:.6g}")
    return Trajectory(kind=kind, n=n, times=times, states=states,
                      diagnostics=diagnostics, volume_factors=factors)


def flow_volume_factor(kind: FieldKind, H: ScalarFunction, s0, T: float, dt: float,
                       method: str = "rk4", mode: str = "variational") -> float:
    """
    Akışın teğet eşlemesinin determinantı

    Args:
        mode: variational (Φ̇ = JΦ, LU determinantı) | divergence (exp ∫div dt)

    Returns:
        det Dφ_T; konformal için e^{ncT}
    """
    if mode == "divergence":
        tr = integrate(kind, H, s0, T, dt, method)
        return float(np.exp(tr.diagnostics["log_volume"].iloc[-1]))
    if mode != "variational":
        raise ValueError(f"Bilinmeyen hacim modu: {mode}")
    tr = integrate(kind, H, s0, T, dt, method, variational=True)
    return float(tr.volume_factors[-1])


def energy_rate(kind: FieldKind, H: ScalarFunction, x: np.ndarray) -> np.ndarray:
    """
    Enerji değişim yasasının sağ tarafı

    conformal: dH/dt = −c·Z(H) = c·p·∂H/∂p
    contact:   dH̄/dt = −R(H̄)·H̄
    diğerleri: 0
    """
    x = _check(kind, H, x)
    hq, hp, hz = split_coordinates(H.gradient(x), H.n)
    _, p, _ = split_coordinates(x, H.n)
    if kind.tag == FieldTag.CONFORMAL:
        return kind.c * np.sum(p * hp, axis=0)
    if kind.tag in (FieldTag.CONTACT, FieldTag.STRICT_CONTACT):
        return -hz * np.asarray(H(x))
    return np.zeros(x.shape[1:]) if x.ndim > 1 else np.float64(0.0)


def energy_law_residual(trajectory: Trajectory, H: ScalarFunction) -> float:
    """
    Enerji tanısının merkezi farkı ile analitik hızın en büyük farkı

    Returns:
        max_k |(E_{k+1} − E_{k−1})/2dt − Ė(x_k)|
    """
    energy = trajectory.diagnostics["energy"].to_numpy()
    if energy.size < 3:
        raise ValueError("Enerji yasası için en az üç örnek gerekli")
    dt = float(trajectory.diagnostics["dt"].iloc[0])
    measured = (energy[2:] - energy[:-2]) / (2.0 * dt)
    exact = energy_rate(trajectory.kind, H, trajectory.states[1:-1].T)
    return float(np.max(np.abs(measured - exact)))


def preserved_contact_quantity(trajectory: Trajectory) -> np.ndarray:
    """V(t)·H̄(t)^{−(n+1)}; H̄ hiçbir yerde sıfırlanmayan akışlarda sabit"""
    energy = trajectory.diagnostics["energy"].to_numpy()
    if np.any(energy == 0):
        raise ValueError("H̄ sıfırdan geçiyor; korunan nicelik tanımsız")
    volume = np.exp(trajectory.diagnostics["log_volume"].to_numpy())
    return volume * np.abs(energy) ** (-(trajectory.n + 1))


def linear_conformal_oracle(c: float, s0: Sequence[float], times: np.ndarray) -> np.ndarray:
    """
    q̇ = p, ṗ = −q + c·p sisteminin matris üstel çözümü

    Returns:
        (len(times), 2) durum dizisi
    """
    A = np.array([[0.0, 1.0], [-1.0, c]])
    s0 = np.asarray(s0, dtype=float)
    return np.stack([expm(A * t) @ s0 for t in np.atleast_1d(times)])
