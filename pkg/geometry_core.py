#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
🧭 Geometri Çekirdeği Modülü

Darboux koordinatlarında simplektik ve kontakt yapıların somut gerçeklemesi:
durum tipleri (PhaseState, ContactState), kovektör değerleri, türev erişimli
skaler fonksiyonlar, müzikal eşlemeler, Liouville ve Reeb alanları.

Koordinat sırası her yerde (q¹..qⁿ, p₁..pₙ[, z]) şeklindedir. Dizi girdili
fonksiyonlarda koordinatlar 0. eksen boyuncadır; böylece aynı ScalarFunction
hem tek bir noktada hem de bir ızgaranın tamamında değerlendirilebilir.

Kullanım:
    from geometry_core import PhaseState, symplectic_sharp, CovectorValue
    s = PhaseState(q=[1.0], p=[2.0])
    symplectic_sharp(CovectorValue(a=s.p, b=[0.0]), s)   # -> [0, -2]
"""

import logging
from dataclasses import dataclass
from enum import Enum
from typing import Callable, Optional, Sequence, Tuple, Union

import numpy as np

# Logging konfigürasyonu
logging.basicConfig(level=logging.INFO, format='%(asctime)s - %(levelname)s - %(message)s')
logger = logging.getLogger(__name__)

# Merkezi fark adımı için optimum ölçek: eps^(1/3)
FD_STEP = float(np.finfo(float).eps) ** (1.0 / 3.0)


class ArityError(ValueError):
    """Boyut / arite uyuşmazlığı"""


class Arity(str, Enum):
    """Faz uzayı türü"""
    SYMPLECTIC = "symplectic"
    CONTACT = "contact"


def _as_vector(values, name: str) -> np.ndarray:
    arr = np.atleast_1d(np.asarray(values, dtype=float))
    if arr.ndim != 1:
        raise ArityError(f"{name} tek boyutlu bir vektör olmalı, gelen şekil: {arr.shape}")
    return arr


@dataclass(frozen=True)
class PhaseState:
    """Simplektik faz uzayında bir nokta (qⁱ, pᵢ)"""
    q: np.ndarray
    p: np.ndarray

    def __post_init__(self):
        q = _as_vector(self.q, "q")
        p = _as_vector(self.p, "p")
        if q.size == 0 or q.size != p.size:
            raise ArityError(f"q ve p aynı uzunlukta olmalı (n ≥ 1): {q.size} != {p.size}")
        if not (np.all(np.isfinite(q)) and np.all(np.isfinite(p))):
            raise ValueError("PhaseState sonlu olmayan değer içeriyor")
        object.__setattr__(self, "q", q)
        object.__setattr__(self, "p", p)

    @property
    def n(self) -> int:
        return self.q.size

    @property
    def arity(self) -> Arity:
        return Arity.SYMPLECTIC

    def as_array(self) -> np.ndarray:
        return np.concatenate([self.q, self.p])

    @classmethod
    def from_array(cls, x: Sequence[float]) -> "PhaseState":
        x = _as_vector(x, "x")
        if x.size % 2:
            raise ArityError(f"Simplektik koordinat vektörü çift uzunlukta olmalı: {x.size}")
        n = x.size // 2
        return cls(q=x[:n], p=x[n:])


@dataclass(frozen=True)
class ContactState:
    """Kontakt faz uzayında bir nokta (qⁱ, pᵢ, z)"""
    q: np.ndarray
    p: np.ndarray
    z: float

    def __post_init__(self):
        q = _as_vector(self.q, "q")
        p = _as_vector(self.p, "p")
        if q.size == 0 or q.size != p.size:
            raise ArityError(f"q ve p aynı uzunlukta olmalı (n ≥ 1): {q.size} != {p.size}")
        z = float(self.z)
        if not (np.all(np.isfinite(q)) and np.all(np.isfinite(p)) and np.isfinite(z)):
            raise ValueError("ContactState sonlu olmayan değer içeriyor")
        object.__setattr__(self, "q", q)
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "z", z)

    @property
    def n(self) -> int:
        return self.q.size

    @property
    def arity(self) -> Arity:
        return Arity.CONTACT

    def as_array(self) -> np.ndarray:
        return np.concatenate([self.q, self.p, [self.z]])

    @classmethod
    def from_array(cls, x: Sequence[float]) -> "ContactState":
        x = _as_vector(x, "x")
        if x.size % 2 == 0:
            raise ArityError(f"Kontakt koordinat vektörü tek uzunlukta olmalı: {x.size}")
        n = (x.size - 1) // 2
        return cls(q=x[:n], p=x[n:2 * n], z=x[2 * n])


State = Union[PhaseState, ContactState]


@dataclass(frozen=True)
class CovectorValue:
    """
    Bir noktadaki bir-form değeri: α = aᵢ dqⁱ + bⁱ dpᵢ [+ u dz]

    u None ise kovektör simplektik, aksi halde kontakt aritelidir.
    """
    a: np.ndarray
    b: np.ndarray
    u: Optional[float] = None

    def __post_init__(self):
        a = _as_vector(self.a, "a")
        b = _as_vector(self.b, "b")
        if a.size != b.size:
            raise ArityError(f"Kovektör bileşen uzunlukları farklı: {a.size} != {b.size}")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)
        if self.u is not None:
            object.__setattr__(self, "u", float(self.u))

    @property
    def n(self) -> int:
        return self.a.size

    @property
    def arity(self) -> Arity:
        return Arity.SYMPLECTIC if self.u is None else Arity.CONTACT

    def as_array(self) -> np.ndarray:
        parts = [self.a, self.b] if self.u is None else [self.a, self.b, [self.u]]
        return np.concatenate(parts)

    def pair(self, vector: Sequence[float]) -> float:
        """Kovektörü bir teğet vektörle eşle: α(X)"""
        vector = _as_vector(vector, "vector")
        coeffs = self.as_array()
        if vector.size != coeffs.size:
            raise ArityError(f"Eşleme boyutu uyuşmuyor: {coeffs.size} != {vector.size}")
        return float(np.dot(coeffs, vector))


def coordinates(state: Union[State, Sequence[float], np.ndarray]) -> np.ndarray:
    """Durum nesnesini ya da ham diziyi koordinat dizisine çevir"""
    if isinstance(state, (PhaseState, ContactState)):
        return state.as_array()
    return np.asarray(state, dtype=float)


def dimension(arity: Arity, n: int) -> int:
    """Faz uzayı boyutu: 2n (simplektik) veya 2n+1 (kontakt)"""
    return 2 * n if arity == Arity.SYMPLECTIC else 2 * n + 1


def split_coordinates(x: np.ndarray, n: int):
    """(q, p[, z]) parçalarını 0. eksen boyunca ayır"""
    q = x[:n]
    p = x[n:2 * n]
    z = x[2 * n] if x.shape[0] > 2 * n else None
    return q, p, z


def central_gradient(value: Callable[[np.ndarray], np.ndarray], x: np.ndarray,
                     step: float = FD_STEP) -> np.ndarray:
    """
    Merkezi farklarla gradyan

    Adım her koordinat için h = step·max(1, |x_k|) olarak seçilir.

    Args:
        value: 0. ekseni koordinat olan dizileri kabul eden fonksiyon
        x: Koordinatlar, şekil (dim, ...)
        step: Göreli adım ölçeği

    Returns:
        Gradyan, şekil (dim, ...)
    """
    x = np.asarray(x, dtype=float)
    grad = np.empty_like(x)
    for k in range(x.shape[0]):
        h = step * np.maximum(1.0, np.abs(x[k]))
        forward = x.copy()
        backward = x.copy()
        forward[k] = x[k] + h
        backward[k] = x[k] - h
        # gerçek adım, yuvarlama sonrası temsil edilen fark
        span = forward[k] - backward[k]
        grad[k] = (np.asarray(value(forward)) - np.asarray(value(backward))) / span
    return grad


def central_jacobian(vector_field: Callable[[np.ndarray], np.ndarray], x: np.ndarray,
                     step: float = FD_STEP) -> np.ndarray:
    """
    Bir vektör alanının merkezi farklarla Jacobian matrisi

    Returns:
        J[i, j] = ∂Xⁱ/∂xʲ, şekil (dim_out, dim_in)
    """
    x = np.asarray(x, dtype=float)
    columns = []
    for k in range(x.size):
        h = step * max(1.0, abs(x[k]))
        forward = x.copy()
        backward = x.copy()
        forward[k] += h
        backward[k] -= h
        span = forward[k] - backward[k]
        columns.append((np.asarray(vector_field(forward)) - np.asarray(vector_field(backward))) / span)
    return np.stack(columns, axis=-1)


class ScalarFunction:
    """
    Faz uzayında türev erişimli düzgün skaler fonksiyon (H, H̄, F, K, φ ...)

    value ve gradient çağrılabilirleri koordinatları 0. eksende taşıyan
    dizilerle çalışır. Gradyan verilmemişse merkezi farklar kullanılır.
    """

    def __init__(self, value: Callable[[np.ndarray], np.ndarray], arity: Arity, n: int,
                 gradient: Optional[Callable[[np.ndarray], np.ndarray]] = None,
                 name: str = "f"):
        if n < 1:
            raise ArityError(f"n en az 1 olmalı: {n}")
        self._value = value
        self._gradient = gradient
        self.arity = Arity(arity)
        self.n = int(n)
        self.name = name

    def __repr__(self) -> str:
        return f"ScalarFunction({self.name!r}, {self.arity.value}, n={self.n})"

    @property
    def dim(self) -> int:
        return dimension(self.arity, self.n)

    @property
    def has_gradient(self) -> bool:
        return self._gradient is not None

    def _coordinates(self, state) -> np.ndarray:
        x = coordinates(state)
        if x.shape[0] != self.dim:
            raise ArityError(f"{self.name}: {self.dim} koordinat beklenirken {x.shape[0]} geldi")
        return x

    def __call__(self, state) -> Union[float, np.ndarray]:
        x = self._coordinates(state)
        out = self._value(x)
        return float(out) if x.ndim == 1 else np.asarray(out, dtype=float)

    def gradient(self, state) -> np.ndarray:
        """Analitik gradyan; yoksa merkezi fark yedeği"""
        x = self._coordinates(state)
        if self._gradient is not None:
            return np.asarray(self._gradient(x), dtype=float)
        return central_gradient(self._value, x)

    def fd_gradient(self, state) -> np.ndarray:
        return central_gradient(self._value, self._coordinates(state))

    def gradient_mismatch(self, probes: Sequence) -> float:
        """
        Analitik ve sayısal gradyan arasındaki en büyük göreli fark

        Args:
            probes: Örnek noktalar

        Returns:
            max |∇f − ∇_h f| / max(1, |∇f|)
        """
        worst = 0.0
        for probe in probes:
            exact = self.gradient(probe)
            approx = self.fd_gradient(probe)
            scale = max(1.0, float(np.max(np.abs(exact))))
            worst = max(worst, float(np.max(np.abs(exact - approx))) / scale)
        return worst

    def partials(self, state):
        """(∂/∂q, ∂/∂p, ∂/∂z) parçaları; simplektik fonksiyonda ∂/∂z None"""
        return split_coordinates(self.gradient(state), self.n)

    def _check_compatible(self, other: "ScalarFunction"):
        if self.arity != other.arity or self.n != other.n:
            raise ArityError(f"Uyumsuz fonksiyonlar: {self!r} ve {other!r}")

    def __add__(self, other: "ScalarFunction") -> "ScalarFunction":
        self._check_compatible(other)
        gradient = None
        if self.has_gradient and other.has_gradient:
            gradient = lambda x: self._gradient(x) + other._gradient(x)
        return ScalarFunction(lambda x: self._value(x) + other._value(x), self.arity, self.n,
                              gradient, f"({self.name}+{other.name})")

    def __mul__(self, other: Union["ScalarFunction", float]) -> "ScalarFunction":
        if not isinstance(other, ScalarFunction):
            k = float(other)
            gradient = (lambda x: k * self._gradient(x)) if self.has_gradient else None
            return ScalarFunction(lambda x: k * self._value(x), self.arity, self.n,
                                  gradient, f"{k:g}*{self.name}")
        self._check_compatible(other)
        gradient = None
        if self.has_gradient and other.has_gradient:
            gradient = lambda x: (self._value(x) * other._gradient(x)
                                  + other._value(x) * self._gradient(x))
        return ScalarFunction(lambda x: self._value(x) * other._value(x), self.arity, self.n,
                              gradient, f"{self.name}*{other.name}")

    __rmul__ = __mul__


def require_arity(state, arity: Arity, n: Optional[int] = None) -> np.ndarray:
    """Durumun aritesini doğrula ve koordinatlarını döndür"""
    if isinstance(state, (PhaseState, ContactState)):
        if state.arity != arity:
            raise ArityError(f"{arity.value} durum beklenirken {state.arity.value} geldi")
        if n is not None and state.n != n:
            raise ArityError(f"n={n} beklenirken n={state.n} geldi")
        return state.as_array()
    x = coordinates(state)
    if n is not None and x.shape[0] != dimension(arity, n):
        raise ArityError(f"{dimension(arity, n)} koordinat beklenirken {x.shape[0]} geldi")
    return x


def liouville_field(s: PhaseState) -> np.ndarray:
    """
    Liouville vektör alanı Z = −pᵢ ∂/∂pᵢ

    Diverjansı tanım gereği −n'dir.

    Returns:
        (q̇, ṗ) = (0, −p)
    """
    require_arity(s, Arity.SYMPLECTIC)
    return np.concatenate([np.zeros(s.n), -s.p])


def symplectic_sharp(alpha: CovectorValue, s: PhaseState) -> np.ndarray:
    """
    Simplektik ♯ eşlemesi: a dq + b dp ↦ (b, −a)

    ι_X Ω = α kuralı ile Ω = dqⁱ∧dpᵢ; böylece sharp(dH) = X_H.
    """
    require_arity(s, Arity.SYMPLECTIC)
    if alpha.arity != Arity.SYMPLECTIC or alpha.n != s.n:
        raise ArityError(f"Kovektör aritesi ({alpha.arity.value}, n={alpha.n}) durumla uyuşmuyor")
    return np.concatenate([alpha.b, -alpha.a])


def symplectic_flat(vector: Sequence[float], s: PhaseState) -> CovectorValue:
    """Simplektik ♭ eşlemesi (♯'ın tersi): (v, w) ↦ −w dq + v dp"""
    require_arity(s, Arity.SYMPLECTIC)
    vector = _as_vector(vector, "vector")
    if vector.size != 2 * s.n:
        raise ArityError(f"Teğet vektör boyutu {vector.size}, beklenen {2 * s.n}")
    v, w = vector[:s.n], vector[s.n:]
    return CovectorValue(a=-w, b=v)


def contact_form_and_reeb(s: ContactState) -> Tuple[CovectorValue, np.ndarray]:
    """
    Kontakt bir-formu η = dz − pᵢ dqⁱ ve Reeb alanı R = ∂/∂z

    Returns:
        (η değeri, R vektörü)
    """
    require_arity(s, Arity.CONTACT)
    eta = CovectorValue(a=-s.p, b=np.zeros(s.n), u=1.0)
    reeb = np.concatenate([np.zeros(2 * s.n), [1.0]])
    return eta, reeb


def sharp_lambda(alpha: CovectorValue, s: ContactState) -> np.ndarray:
    """
    Kontakt bivektör eşlemesi ♯_Λ: (αᵢ, αⁱ, u) ↦ (αⁱ, −(αᵢ + pᵢu), αⁱpᵢ)

    Çekirdeği η tarafından gerilir.
    """
    require_arity(s, Arity.CONTACT)
    if alpha.arity != Arity.CONTACT or alpha.n != s.n:
        raise ArityError(f"Kovektör aritesi ({alpha.arity.value}, n={alpha.n}) durumla uyuşmuyor")
    return np.concatenate([alpha.b, -(alpha.a + s.p * alpha.u), [float(np.dot(alpha.b, s.p))]])


def exterior_derivative(oneform: Callable[[np.ndarray], np.ndarray], x: np.ndarray) -> np.ndarray:
    """
    Bir-formun dış türevi, merkezi farklarla

    Args:
        oneform: x ↦ bileşen vektörü (α₀, α₁, ...)
        x: Nokta

    Returns:
        (dα)[i, j] = ∂ᵢαⱼ − ∂ⱼαᵢ
    """
    jac = central_jacobian(oneform, np.asarray(x, dtype=float))
    # jac[j, i] = ∂ᵢ αⱼ
    return jac.T - jac


def contact_form_components(x: np.ndarray) -> np.ndarray:
    """η'nın bileşenleri koordinatların fonksiyonu olarak"""
    n = (len(x) - 1) // 2
    return np.concatenate([-x[n:2 * n], np.zeros(n), [1.0]])
