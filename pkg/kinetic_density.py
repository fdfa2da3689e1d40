#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
🌊 Kinetik Yoğunluk Modülü

Düzgün hücre merkezli ızgaralarda dört yoğunluk denklemi:
Vlasov, konformal (c* momenti ile), kontakt vektör alanı yükseltmesi ve
kontakt parantez yükseltmesi. Uzaysal türevler 4. mertebe merkezi farklar
(periyodik) veya tek yönlü kapanış (kesik sınır); zaman adımı RK4.

Kontakt vektör alanı modeli için korunumlu akı formu seçeneği vardır:
kesik sınırlardan akı geçmez, toplam kütle yuvarlama hatası düzeyinde korunur.

Izgaralar n = 1 içindir: (q, p) simplektik, (q, p, z) kontakt.
"""

import logging
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from enum import Enum
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd

from geometry_core import Arity, ArityError, ScalarFunction

logging.basicConfig(level=logging.INFO, format='%(asctime)s - %(levelname)s - %(message)s')
logger = logging.getLogger(__name__)

MAX_CELLS = 2 ** 27
MIN_CELLS = 8
BOUNDARY_WIDTH = 3
BOUNDARY_THRESHOLD = 1e-6
CFL_SAFETY = 0.5


class GridError(ValueError):
    """Izgara tanımı ya da arite uyuşmazlığı"""


class NonFiniteError(RuntimeError):
    """Adım sonrası sonlu olmayan yoğunluk"""


class Boundary(str, Enum):
    PERIODIC = "periodic"
    TRUNCATED = "truncated"


def default_threads() -> int:
    """KINETIK_THREADS ortam değişkeninden iş parçacığı sayısı"""
    try:
        return max(1, int(os.getenv("KINETIK_THREADS", "1")))
    except ValueError:
        logger.warning("KINETIK_THREADS geçersiz, 1 kullanılıyor")
        return 1


@dataclass(frozen=True)
class Axis:
    """Tek bir ızgara ekseni; hücre merkezleri x_i = lo + (i + ½)h"""
    name: str
    lo: float
    hi: float
    cells: int
    boundary: Boundary = Boundary.TRUNCATED

    def __post_init__(self):
        if not self.hi > self.lo:
            raise GridError(f"{self.name} ekseni: max ({self.hi}) > min ({self.lo}) olmalı")
        if int(self.cells) < MIN_CELLS:
            raise GridError(f"{self.name} ekseni: en az {MIN_CELLS} hücre gerekli, gelen {self.cells}")
        object.__setattr__(self, "cells", int(self.cells))
        object.__setattr__(self, "boundary", Boundary(self.boundary))

    @property
    def h(self) -> float:
        return (self.hi - self.lo) / self.cells

    @property
    def centers(self) -> np.ndarray:
        return self.lo + (np.arange(self.cells) + 0.5) * self.h


@dataclass(frozen=True)
class GridSpec:
    """Dikdörtgen faz uzayı ızgarası: (q, p) veya (q, p, z)"""
    axes: Tuple[Axis, ...]

    def __post_init__(self):
        if len(self.axes) not in (2, 3):
            raise GridError(f"Izgara 2 (q,p) veya 3 (q,p,z) eksenli olmalı: {len(self.axes)}")
        if self.total_cells > MAX_CELLS:
            raise GridError(f"Izgara {self.total_cells} hücre, üst sınır 2^27 = {MAX_CELLS}")

    @classmethod
    def symplectic(cls, q: Tuple[float, float, int], p: Tuple[float, float, int],
                   boundary_q: str = "periodic", boundary_p: str = "truncated") -> "GridSpec":
        return cls((Axis("q", *q, boundary_q), Axis("p", *p, boundary_p)))

    @classmethod
    def contact(cls, q: Tuple[float, float, int], p: Tuple[float, float, int],
                z: Tuple[float, float, int], boundary_q: str = "periodic",
                boundary_p: str = "truncated", boundary_z: str = "truncated") -> "GridSpec":
        return cls((Axis("q", *q, boundary_q), Axis("p", *p, boundary_p), Axis("z", *z, boundary_z)))

    @property
    def ndim(self) -> int:
        return len(self.axes)

    @property
    def arity(self) -> Arity:
        return Arity.SYMPLECTIC if self.ndim == 2 else Arity.CONTACT

    @property
    def shape(self) -> Tuple[int, ...]:
        return tuple(axis.cells for axis in self.axes)

    @property
    def total_cells(self) -> int:
        return int(np.prod([axis.cells for axis in self.axes]))

    @property
    def spacing(self) -> Tuple[float, ...]:
        return tuple(axis.h for axis in self.axes)

    @property
    def cell_volume(self) -> float:
        return float(np.prod(self.spacing))

    def mesh(self) -> np.ndarray:
        """Hücre merkezleri, şekil (ndim, *shape)"""
        return np.stack(np.meshgrid(*[axis.centers for axis in self.axes], indexing="ij"))

    def symplectic_part(self) -> "GridSpec":
        """z ekseni atılmış (q, p) ızgarası"""
        return GridSpec(self.axes[:2])

    def refined(self, factor: int = 2) -> "GridSpec":
        return GridSpec(tuple(Axis(a.name, a.lo, a.hi, a.cells * factor, a.boundary) for a in self.axes))

    def require(self, arity: Arity):
        if self.arity != arity:
            raise GridError(f"{arity.value} ızgara beklenirken {self.arity.value} geldi")


@dataclass
class DensityGrid:
    """Izgara üzerinde örneklenmiş f veya f̄; konformal koşularda c* ile"""
    spec: GridSpec
    values: np.ndarray
    cstar: Optional[float] = None

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if self.values.shape != self.spec.shape:
            raise GridError(f"Değer şekli {self.values.shape}, ızgara {self.spec.shape}")
        if not np.all(np.isfinite(self.values)):
            raise NonFiniteError("Yoğunluk sonlu olmayan değer içeriyor")
        if self.cstar is not None:
            self.cstar = float(self.cstar)

    def mass(self) -> float:
        return float(np.sum(self.values) * self.spec.cell_volume)

    def copy(self) -> "DensityGrid":
        return DensityGrid(self.spec, self.values.copy(), self.cstar)

    def summary(self) -> dict:
        """Adım tanıları: kütle, c*, min, max"""
        return {
            "mass": self.mass(),
            "cstar": self.cstar,
            "min": float(self.values.min()),
            "max": float(self.values.max()),
        }

    def to_frame(self) -> pd.DataFrame:
        """Hücre başına bir satır: koordinatlar ve değer"""
        mesh = self.spec.mesh()
        data = {axis.name: mesh[k].ravel() for k, axis in enumerate(self.spec.axes)}
        data["value"] = self.values.ravel()
        return pd.DataFrame(data)


def sample_function(fn: Callable[[np.ndarray], np.ndarray], spec: GridSpec,
                    threads: Optional[int] = None) -> np.ndarray:
    """
    Bir fonksiyonu ızgara hücre merkezlerinde değerlendir

    İlk eksen satırları iş parçacıklarına bölünür; parçalar sırayla birleştirilir,
    sonuç iş parçacığı sayısından bağımsızdır.

    Args:
        fn: 0. ekseni koordinat olan dizi alan fonksiyon
        spec: Izgara
        threads: İş parçacığı sayısı (None → KINETIK_THREADS)

    Returns:
        Skaler fonksiyon için shape, vektör değerli için (k, *shape)
    """
    mesh = spec.mesh()
    workers = min(threads or default_threads(), spec.shape[0])
    if workers <= 1:
        return np.asarray(fn(mesh), dtype=float)
    bounds = np.linspace(0, spec.shape[0], workers + 1).astype(int)
    slices = [slice(a, b) for a, b in zip(bounds[:-1], bounds[1:]) if b > a]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        parts = list(pool.map(lambda sl: np.asarray(fn(mesh[:, sl]), dtype=float), slices))
    axis = parts[0].ndim - spec.ndim
    return np.concatenate(parts, axis=axis)


def _check_function(fn: ScalarFunction, spec: GridSpec):
    if fn.arity != spec.arity or fn.n != 1:
        raise GridError(f"{fn.name} ({fn.arity.value}, n={fn.n}) {spec.arity.value} n=1 ızgarayla uyumsuz")


def derivative(values: np.ndarray, axis: int, h: float, boundary: Boundary) -> np.ndarray:
    """
    4. mertebe merkezi fark türevi

    Kesik sınırda ilk/son iki hücrede 4. mertebe tek yönlü kapanış kullanılır.
    """
    if Boundary(boundary) == Boundary.PERIODIC:
        return (np.roll(values, 2, axis) - 8.0 * np.roll(values, 1, axis)
                + 8.0 * np.roll(values, -1, axis) - np.roll(values, -2, axis)) / (12.0 * h)
    f = np.moveaxis(values, axis, 0)
    out = np.empty_like(f)
    out[2:-2] = (-f[4:] + 8.0 * f[3:-1] - 8.0 * f[1:-3] + f[:-4]) / (12.0 * h)
    out[0] = (-25.0 * f[0] + 48.0 * f[1] - 36.0 * f[2] + 16.0 * f[3] - 3.0 * f[4]) / (12.0 * h)
    out[1] = (-3.0 * f[0] - 10.0 * f[1] + 18.0 * f[2] - 6.0 * f[3] + f[4]) / (12.0 * h)
    out[-1] = (25.0 * f[-1] - 48.0 * f[-2] + 36.0 * f[-3] - 16.0 * f[-4] + 3.0 * f[-5]) / (12.0 * h)
    out[-2] = (3.0 * f[-1] + 10.0 * f[-2] - 18.0 * f[-3] + 6.0 * f[-4] - f[-5]) / (12.0 * h)
    return np.moveaxis(out, 0, axis)


def grid_gradient(values: np.ndarray, spec: GridSpec) -> List[np.ndarray]:
    """Her eksen boyunca türev listesi"""
    return [derivative(values, k, axis.h, axis.boundary) for k, axis in enumerate(spec.axes)]


def flux_divergence(fluxes: Sequence[np.ndarray], spec: GridSpec) -> np.ndarray:
    """
    Korunumlu akı diverjansı Σ_k ∂_k g_k

    Yüz akıları (−g_{i−1} + 7g_i + 7g_{i+1} − g_{i+2})/12; kesik sınıra komşu
    yüzlerde ikinci mertebe ortalama, sınır yüzlerinde sıfır akı.
    """
    total = np.zeros(spec.shape)
    for k, (g, axis) in enumerate(zip(fluxes, spec.axes)):
        if axis.boundary == Boundary.PERIODIC:
            face = (-np.roll(g, 1, k) + 7.0 * g + 7.0 * np.roll(g, -1, k) - np.roll(g, -2, k)) / 12.0
            total += (face - np.roll(face, 1, k)) / axis.h
            continue
        gg = np.moveaxis(g, k, 0)
        cells = gg.shape[0]
        face = np.zeros((cells + 1,) + gg.shape[1:])
        face[1] = 0.5 * (gg[0] + gg[1])
        face[cells - 1] = 0.5 * (gg[cells - 2] + gg[cells - 1])
        face[2:cells - 1] = (-gg[0:cells - 3] + 7.0 * gg[1:cells - 2]
                             + 7.0 * gg[2:cells - 1] - gg[3:cells]) / 12.0
        total += np.moveaxis((face[1:] - face[:-1]) / axis.h, 0, k)
    return total


@dataclass
class FieldSamples:
    """Hamiltonyenin ızgaradaki değeri ve gradyanı"""
    mesh: np.ndarray
    value: np.ndarray
    gradient: np.ndarray

    @classmethod
    def of(cls, H: ScalarFunction, spec: GridSpec, threads: Optional[int] = None) -> "FieldSamples":
        _check_function(H, spec)
        return cls(mesh=spec.mesh(),
                   value=sample_function(H, spec, threads),
                   gradient=sample_function(H.gradient, spec, threads))

    @property
    def p(self) -> np.ndarray:
        return self.mesh[1]


def _conformal_rate(values: np.ndarray, grads: Sequence[np.ndarray], samples: FieldSamples,
                    c: float) -> np.ndarray:
    """Ortak çekirdek: {H,f} + c·Z(f) − c·(n+1)·f; c = 0 saf Vlasov"""
    fq, fp = grads[0], grads[1]
    hq, hp = samples.gradient[0], samples.gradient[1]
    rate = hq * fp - hp * fq
    if c != 0.0:
        rate = rate - c * (samples.p * fp + 2.0 * values)
    return rate


def _cstar_rate(values: np.ndarray, samples: FieldSamples, spec: GridSpec) -> float:
    """ċ* = ∫ f·(Z(H) + H) dμ"""
    weight = samples.value - samples.p * samples.gradient[1]
    return float(np.sum(values * weight) * spec.cell_volume)


def _contact_rate(values: np.ndarray, grads: Sequence[np.ndarray], samples: FieldSamples,
                  coefficient: float) -> np.ndarray:
    fq, fp, fz = grads
    hq, hp, hz = samples.gradient
    return (-hp * fq + hq * fp + samples.p * (fp * hz - hp * fz)
            + coefficient * values * hz + samples.value * fz)


def contact_velocity(samples: FieldSamples) -> List[np.ndarray]:
    """ξ_H̄ = (H̄_p, −H̄_q − p·H̄_z, p·H̄_p − H̄) ızgarada"""
    hq, hp, hz = samples.gradient
    p = samples.p
    return [hp, -hq - p * hz, p * hp - samples.value]


def vlasov_rhs(f: DensityGrid, H: ScalarFunction, threads: Optional[int] = None) -> np.ndarray:
    """∂f/∂t = {H, f}; konformal çekirdeğin c = 0 yolu"""
    f.spec.require(Arity.SYMPLECTIC)
    samples = FieldSamples.of(H, f.spec, threads)
    return _conformal_rate(f.values, grid_gradient(f.values, f.spec), samples, 0.0)


def conformal_density_rhs(f: DensityGrid, H: ScalarFunction, c: float,
                          threads: Optional[int] = None) -> Tuple[DensityGrid, float]:
    """
    Konformal kinetik denklemler

    ∂f/∂t = {H,f} + c·Z(f) − c·(n+1)·f,  Z(f) = −p·∂f/∂p
    ċ*   = ∫ f·(Z(H) + H) dμ

    Returns:
        (hız ızgarası, c* hızı)
    """
    f.spec.require(Arity.SYMPLECTIC)
    samples = FieldSamples.of(H, f.spec, threads)
    rate = _conformal_rate(f.values, grid_gradient(f.values, f.spec), samples, float(c))
    return DensityGrid(f.spec, rate), _cstar_rate(f.values, samples, f.spec)


class ContactVariant(str, Enum):
    VECTOR_FIELD = "vector_field"
    BRACKET = "bracket"


def contact_density_rhs(f: DensityGrid, H: ScalarFunction, variant: str = "vector_field",
                        flux_form: bool = False, threads: Optional[int] = None) -> DensityGrid:
    """
    Kontakt kinetik denklemler (n = 1)

    vector_field: −H̄_p f̄_q + H̄_q f̄_p + p(f̄_p H̄_z − H̄_p f̄_z) + (n+1) f̄ H̄_z + H̄ f̄_z
    bracket:      aynısı, f̄ H̄_z katsayısı (n+2)

    flux_form yalnızca vector_field için: −div(f̄ ξ_H̄) korunumlu formda.
    """
    f.spec.require(Arity.CONTACT)
    variant = ContactVariant(variant)
    samples = FieldSamples.of(H, f.spec, threads)
    if flux_form:
        if variant != ContactVariant.VECTOR_FIELD:
            raise ValueError("Akı formu yalnızca vector_field varyantı için tanımlı")
        velocity = contact_velocity(samples)
        return DensityGrid(f.spec, -flux_divergence([f.values * v for v in velocity], f.spec))
    coefficient = 2.0 if variant == ContactVariant.VECTOR_FIELD else 3.0
    return DensityGrid(f.spec, _contact_rate(f.values, grid_gradient(f.values, f.spec),
                                             samples, coefficient))


class ModelTag(str, Enum):
    VLASOV = "vlasov"
    CONFORMAL = "conformal"
    CONTACT_VF = "contact_vf"
    CONTACT_BRACKET = "contact_bracket"


@dataclass(frozen=True)
class KineticModel:
    """Yoğunluk modeli; c yalnızca konformal, flux_form yalnızca contact_vf için"""
    tag: ModelTag
    c: float = 0.0
    flux_form: bool = False

    def __post_init__(self):
        object.__setattr__(self, "tag", ModelTag(self.tag))
        if self.flux_form and self.tag != ModelTag.CONTACT_VF:
            raise ValueError("flux_form yalnızca contact_vf modeli için geçerli")

    @classmethod
    def vlasov(cls) -> "KineticModel":
        return cls(ModelTag.VLASOV)

    @classmethod
    def conformal(cls, c: float) -> "KineticModel":
        return cls(ModelTag.CONFORMAL, float(c))

    @classmethod
    def contact_vf(cls, flux_form: bool = False) -> "KineticModel":
        return cls(ModelTag.CONTACT_VF, flux_form=flux_form)

    @classmethod
    def contact_bracket(cls) -> "KineticModel":
        return cls(ModelTag.CONTACT_BRACKET)

    @property
    def arity(self) -> Arity:
        return Arity.SYMPLECTIC if self.tag in (ModelTag.VLASOV, ModelTag.CONFORMAL) else Arity.CONTACT

    @property
    def label(self) -> str:
        if self.tag == ModelTag.CONFORMAL:
            return f"conformal(c={self.c:g})"
        return f"{self.tag.value}{'+flux' if self.flux_form else ''}"


class KineticSolver:
    """
    Sabit Hamiltonyenli yoğunluk çözücü

    H'nin ızgaradaki değer ve gradyanı bir kez örneklenir; her RK4 aşaması
    yalnızca f'nin türevlerini hesaplar.
    """

    def __init__(self, model: KineticModel, H: ScalarFunction, spec: GridSpec,
                 threads: Optional[int] = None):
        spec.require(model.arity)
        self.model = model
        self.H = H
        self.spec = spec
        self.samples = FieldSamples.of(H, spec, threads)
        self._cfl_warned = False

    def velocity(self) -> List[np.ndarray]:
        """Faz uzayı hızı (CFL tahmini için)"""
        if self.model.arity == Arity.CONTACT:
            return contact_velocity(self.samples)
        hq, hp = self.samples.gradient
        pdot = -hq if self.model.c == 0.0 else -hq + self.model.c * self.samples.p
        return [hp, pdot]

    def cfl_bound(self) -> float:
        """dt ≤ 0.5·min(h_k / max|v_k|)"""
        bounds = []
        for v, axis in zip(self.velocity(), self.spec.axes):
            vmax = float(np.max(np.abs(v)))
            if vmax > 0:
                bounds.append(axis.h / vmax)
        return CFL_SAFETY * min(bounds) if bounds else np.inf

    def rate(self, values: np.ndarray) -> Tuple[np.ndarray, Optional[float]]:
        model = self.model
        if model.tag == ModelTag.VLASOV:
            return _conformal_rate(values, grid_gradient(values, self.spec), self.samples, 0.0), None
        if model.tag == ModelTag.CONFORMAL:
            rate = _conformal_rate(values, grid_gradient(values, self.spec), self.samples, model.c)
            return rate, _cstar_rate(values, self.samples, self.spec)
        if model.flux_form:
            velocity = contact_velocity(self.samples)
            return -flux_divergence([values * v for v in velocity], self.spec), None
        coefficient = 2.0 if model.tag == ModelTag.CONTACT_VF else 3.0
        return _contact_rate(values, grid_gradient(values, self.spec), self.samples, coefficient), None

    def check_cfl(self, dt: float) -> bool:
        bound = self.cfl_bound()
        if dt > bound:
            if not self._cfl_warned:
                logger.warning(f"CFL ihlali: dt={dt:g} > sınır {bound:.4g} ({self.model.label})")
                self._cfl_warned = True
            return False
        return True

    def step(self, state: DensityGrid, dt: float) -> DensityGrid:
        """Tek RK4 adımı"""
        if state.spec != self.spec:
            raise GridError("Durum ızgarası çözücü ızgarasıyla uyuşmuyor")
        self.check_cfl(dt)
        f0 = state.values
        k1, c1 = self.rate(f0)
        k2, c2 = self.rate(f0 + 0.5 * dt * k1)
        k3, c3 = self.rate(f0 + 0.5 * dt * k2)
        k4, c4 = self.rate(f0 + dt * k3)
        values = f0 + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        if not np.all(np.isfinite(values)):
            logger.error(f"Sonlu olmayan yoğunluk: {self.model.label}, dt={dt:g}")
            raise NonFiniteError(f"{self.model.label} adımı sonlu olmayan değer üretti")
        cstar = state.cstar
        if c1 is not None:
            cstar = (cstar or 0.0) + dt / 6.0 * (c1 + 2.0 * c2 + 2.0 * c3 + c4)
        return DensityGrid(self.spec, values, cstar)

    def run(self, state: DensityGrid, dt: float, steps: int,
            record_every: int = 1,
            on_record: Optional[Callable[[int, DensityGrid], None]] = None) -> Tuple[DensityGrid, pd.DataFrame]:
        """
        Birden çok adım; her record_every adımda tanı kaydı

        Returns:
            (son durum, step/t/mass/cstar/min/max tablosu)
        """
        if self.model.tag == ModelTag.CONFORMAL and state.cstar is None:
            state = DensityGrid(state.spec, state.values, 0.0)
        records = [{"step": 0, "t": 0.0, **state.summary()}]
        if on_record:
            on_record(0, state)
        for k in range(1, steps + 1):
            state = self.step(state, dt)
            if k % record_every == 0 or k == steps:
                records.append({"step": k, "t": k * dt, **state.summary()})
                logger.debug(f"Adım {k}: kütle={records[-1]['mass']:.12g}")
                if on_record:
                    on_record(k, state)
        check_boundary_mass(state)
        return state, pd.DataFrame(records)


def step_density(model: KineticModel, state: DensityGrid, H: ScalarFunction, dt: float,
                 threads: Optional[int] = None) -> DensityGrid:
    """
    Tek RK4 adımı (kolaylık fonksiyonu)

    Args:
        model: vlasov | conformal(c) | contact_vf | contact_bracket
        state: Başlangıç yoğunluğu
        H: Hamiltonyen (kontakt modellerde H̄)
        dt: Zaman adımı

    Returns:
        Yeni DensityGrid
    """
    return KineticSolver(model, H, state.spec, threads).step(state, dt)


def observable(f: DensityGrid, a: ScalarFunction, threads: Optional[int] = None) -> float:
    """Ā(f) = ∫ a·f dμ (orta nokta kuralı)"""
    if a.arity != f.spec.arity:
        raise ArityError(f"{a.name} ({a.arity.value}) {f.spec.arity.value} ızgarayla uyumsuz")
    _check_function(a, f.spec)
    return float(np.sum(sample_function(a, f.spec, threads) * f.values) * f.spec.cell_volume)


def observable_rate(f: DensityGrid, a: ScalarFunction, H: ScalarFunction,
                    threads: Optional[int] = None) -> float:
    """∫ ξ_H̄(a)·f̄ dμ̄: contact_vf altında Ā'nın türevi"""
    f.spec.require(Arity.CONTACT)
    _check_function(a, f.spec)
    samples = FieldSamples.of(H, f.spec, threads)
    grad_a = sample_function(a.gradient, f.spec, threads)
    xi_a = sum(g * v for g, v in zip(grad_a, contact_velocity(samples)))
    return float(np.sum(xi_a * f.values) * f.spec.cell_volume)


def boundary_mass_fraction(values: np.ndarray, spec: GridSpec, axes: Optional[Sequence[int]] = None,
                           width: int = BOUNDARY_WIDTH) -> float:
    """Kesik eksenlerin dış `width` hücresindeki |değer| kütlesinin oranı"""
    if axes is None:
        axes = [k for k, axis in enumerate(spec.axes) if axis.boundary == Boundary.TRUNCATED]
    magnitude = np.abs(values)
    total = float(np.sum(magnitude))
    if total == 0.0 or not axes:
        return 0.0
    mask = np.zeros(values.shape, dtype=bool)
    for k in axes:
        edge = [slice(None)] * values.ndim
        edge[k] = np.r_[0:width, values.shape[k] - width:values.shape[k]]
        mask[tuple(edge)] = True
    return float(np.sum(magnitude[mask]) / total)


def check_boundary_mass(f: DensityGrid, threshold: float = BOUNDARY_THRESHOLD,
                        axes: Optional[Sequence[int]] = None) -> float:
    """Sınır kütlesi izleyicisi; eşik aşılırsa uyarı"""
    fraction = boundary_mass_fraction(f.values, f.spec, axes)
    if fraction > threshold:
        logger.warning(f"Sınıra yakın kütle oranı {fraction:.3e} > {threshold:g}")
    return fraction


def gaussian_density(spec: GridSpec, center: Sequence[float], width: Sequence[float],
                     cstar: Optional[float] = None) -> DensityGrid:
    """Eksen hizalı Gauss başlangıç verisi, toplam kütle 1'e normalize"""
    mesh = spec.mesh()
    center = np.broadcast_to(np.asarray(center, dtype=float), (spec.ndim,))
    width = np.broadcast_to(np.asarray(width, dtype=float), (spec.ndim,))
    exponent = sum(((mesh[k] - center[k]) / width[k]) ** 2 for k in range(spec.ndim))
    values = np.exp(-0.5 * exponent)
    values /= np.sum(values) * spec.cell_volume
    return DensityGrid(spec, values, cstar)


def l2_norm(values: np.ndarray, spec: GridSpec) -> float:
    return float(np.sqrt(np.sum(values ** 2) * spec.cell_volume))


def convergence_order(errors: Sequence[float], spacings: Sequence[float]) -> float:
    """log(hata) – log(h) en küçük kareler eğimi"""
    errors = np.asarray(errors, dtype=float)
    spacings = np.asarray(spacings, dtype=float)
    if errors.size < 2 or np.any(errors <= 0):
        raise ValueError("Yakınsama mertebesi için en az iki pozitif hata gerekli")
    slope, _ = np.polyfit(np.log(spacings), np.log(errors), 1)
    return float(slope)
