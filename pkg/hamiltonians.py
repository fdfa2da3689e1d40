#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
🧮 Hamiltonyen Fonksiyonlar Modülü

Polinom ScalarFunction'lar (yoğun katsayı dizileri, analitik gradyan),
tohumlu rastgele polinom üretici ve hazır Hamiltonyenler:
harmonik salınıcı ve dış potansiyelli plazma Hamiltonyeni p²/2m + eφ(q).
"""

import logging
from typing import Dict, Optional, Tuple

import numpy as np
from numpy.polynomial import polynomial as P

from geometry_core import Arity, ArityError, ScalarFunction, dimension, split_coordinates

logging.basicConfig(level=logging.INFO, format='%(asctime)s - %(levelname)s - %(message)s')
logger = logging.getLogger(__name__)


def _polyval_nd(coeffs: np.ndarray, x: np.ndarray) -> np.ndarray:
    """Çok değişkenli polinomu 0. ekseni koordinat olan x üzerinde değerlendir"""
    values = P.polyval(x[0], coeffs)
    for k in range(1, coeffs.ndim):
        values = P.polyval(x[k], values, tensor=False)
    return values


class Polynomial(ScalarFunction):
    """
    Katsayı dizisiyle tanımlı çok değişkenli polinom

    coeffs[i₀, i₁, ...] terimi x₀^i₀ · x₁^i₁ · ... katsayısıdır.
    Gradyan polyder ile analitik olarak hesaplanır.
    """

    def __init__(self, coeffs: np.ndarray, arity: Arity, n: int, name: str = "poly"):
        coeffs = np.asarray(coeffs, dtype=float)
        if coeffs.ndim != dimension(arity, n):
            raise ArityError(f"Katsayı dizisi {coeffs.ndim} boyutlu, beklenen {dimension(arity, n)}")
        self.coeffs = coeffs
        self._derivatives = [P.polyder(coeffs, axis=k) for k in range(coeffs.ndim)]
        super().__init__(self._evaluate, arity, n, self._evaluate_gradient, name)

    def _evaluate(self, x: np.ndarray) -> np.ndarray:
        return _polyval_nd(self.coeffs, x)

    def _evaluate_gradient(self, x: np.ndarray) -> np.ndarray:
        return np.stack([_polyval_nd(d, x) for d in self._derivatives])

    def derivative(self, axis: int) -> "Polynomial":
        """Bir koordinata göre kısmi türev polinomu"""
        return Polynomial(self._derivatives[axis], self.arity, self.n, f"d{axis}({self.name})")

    @property
    def degree(self) -> int:
        idx = np.argwhere(self.coeffs != 0)
        return int(idx.sum(axis=1).max()) if idx.size else 0


def polynomial_from_terms(terms: Dict[Tuple[int, ...], float], arity: Arity, n: int,
                          name: str = "poly") -> Polynomial:
    """
    Üs demetlerinden polinom oluştur

    Args:
        terms: {(i₀, i₁, ...): katsayı}
        arity: Faz uzayı türü
        n: Serbestlik derecesi

    Returns:
        Polynomial
    """
    dim = dimension(arity, n)
    if not terms:
        return Polynomial(np.zeros((1,) * dim), arity, n, name)
    for powers in terms:
        if len(powers) != dim:
            raise ArityError(f"Terim {powers} için {dim} üs bekleniyordu")
    shape = tuple(max(p[k] for p in terms) + 1 for k in range(dim))
    coeffs = np.zeros(shape)
    for powers, value in terms.items():
        coeffs[powers] += value
    return Polynomial(coeffs, arity, n, name)


def coordinate_function(index: int, arity: Arity, n: int, name: Optional[str] = None) -> Polynomial:
    """x_index koordinat fonksiyonu (q, p veya z)"""
    powers = [0] * dimension(arity, n)
    powers[index] = 1
    return polynomial_from_terms({tuple(powers): 1.0}, arity, n, name or f"x{index}")


def constant_function(value: float, arity: Arity, n: int) -> Polynomial:
    return polynomial_from_terms({(0,) * dimension(arity, n): value}, arity, n, f"{value:g}")


def random_polynomial(rng: np.random.Generator, arity: Arity, n: int = 1,
                      degree: int = 4, name: str = "rand") -> Polynomial:
    """
    Toplam derecesi ≤ degree, katsayıları [−1, 1] aralığında rastgele polinom

    Args:
        rng: Tohumlanmış numpy üreteci
        degree: En yüksek toplam derece
    """
    dim = dimension(arity, n)
    shape = (degree + 1,) * dim
    coeffs = rng.uniform(-1.0, 1.0, size=shape)
    total = np.indices(shape).sum(axis=0)
    coeffs[total > degree] = 0.0
    return Polynomial(coeffs, arity, n, name)


def harmonic_oscillator(n: int = 1, arity: Arity = Arity.SYMPLECTIC) -> Polynomial:
    """H = (|q|² + |p|²)/2"""
    dim = dimension(arity, n)
    terms = {}
    for k in range(2 * n):
        powers = [0] * dim
        powers[k] = 2
        terms[tuple(powers)] = 0.5
    return polynomial_from_terms(terms, arity, n, "harmonic")


class PlasmaHamiltonian(ScalarFunction):
    """
    Sabit dış potansiyelde yüklü parçacık: H = |p|²/2m + e·φ(q)

    Potansiyel türleri:
        none:     φ = 0
        harmonic: φ = κ|q|²/2 (κ = amplitude)
        cosine:   φ = A·Σ cos(k qⁱ)
    """

    POTENTIALS = ("none", "harmonic", "cosine")

    def __init__(self, mass: float = 1.0, charge: float = 1.0, potential: str = "none",
                 amplitude: float = 1.0, wavenumber: float = 1.0, n: int = 1):
        if mass <= 0:
            raise ValueError(f"Kütle pozitif olmalı: {mass}")
        if potential not in self.POTENTIALS:
            raise ValueError(f"Bilinmeyen potansiyel: {potential}")
        self.mass = float(mass)
        self.charge = float(charge)
        self.potential = potential
        self.amplitude = float(amplitude)
        self.wavenumber = float(wavenumber)
        super().__init__(self._evaluate, Arity.SYMPLECTIC, n, self._evaluate_gradient,
                         f"plasma[{potential}]")

    def phi(self, q: np.ndarray) -> np.ndarray:
        if self.potential == "harmonic":
            return 0.5 * self.amplitude * np.sum(q ** 2, axis=0)
        if self.potential == "cosine":
            return self.amplitude * np.sum(np.cos(self.wavenumber * q), axis=0)
        return np.zeros_like(q[0])

    def phi_gradient(self, q: np.ndarray) -> np.ndarray:
        if self.potential == "harmonic":
            return self.amplitude * q
        if self.potential == "cosine":
            return -self.amplitude * self.wavenumber * np.sin(self.wavenumber * q)
        return np.zeros_like(q)

    def _evaluate(self, x: np.ndarray) -> np.ndarray:
        q, p, _ = split_coordinates(x, self.n)
        return np.sum(p ** 2, axis=0) / (2.0 * self.mass) + self.charge * self.phi(q)

    def _evaluate_gradient(self, x: np.ndarray) -> np.ndarray:
        q, p, _ = split_coordinates(x, self.n)
        return np.concatenate([self.charge * self.phi_gradient(q), p / self.mass])


def parse_terms(spec: str, arity: Arity, n: int = 1) -> Dict[Tuple[int, ...], float]:
    """
    "i,j[,k]:katsayı; ..." biçimli terim listesini çöz

    Örnek: "2,0:0.5; 0,2:0.5" → (q²+p²)/2
    """
    dim = dimension(arity, n)
    terms: Dict[Tuple[int, ...], float] = {}
    for chunk in filter(None, (part.strip() for part in spec.split(";"))):
        powers_text, _, coeff_text = chunk.partition(":")
        if not coeff_text:
            raise ValueError(f"Terim katsayısı eksik: {chunk!r}")
        powers = tuple(int(v) for v in powers_text.split(","))
        if len(powers) != dim or min(powers) < 0:
            raise ValueError(f"Terim {chunk!r} için {dim} negatif olmayan üs gerekli")
        terms[powers] = terms.get(powers, 0.0) + float(coeff_text)
    return terms


def build_hamiltonian(name: str, arity: Arity = Arity.SYMPLECTIC, n: int = 1,
                      terms: Optional[str] = None, **plasma_kwargs) -> ScalarFunction:
    """
    Ada göre hazır Hamiltonyen oluştur

    Args:
        name: harmonic | plasma | polynomial
        terms: polynomial için terim listesi
        plasma_kwargs: mass, charge, potential, amplitude, wavenumber

    Returns:
        ScalarFunction
    """
    if name == "harmonic":
        return harmonic_oscillator(n, arity)
    if name == "plasma":
        if arity != Arity.SYMPLECTIC:
            raise ArityError("Plazma Hamiltonyeni simplektik tanımlıdır; kontakt için genişletin")
        return PlasmaHamiltonian(n=n, **plasma_kwargs)
    if name == "polynomial":
        if not terms:
            raise ValueError("polynomial Hamiltonyen için terimler gerekli")
        return polynomial_from_terms(parse_terms(terms, arity, n), arity, n, "polynomial")
    raise ValueError(f"Bilinmeyen Hamiltonyen: {name}")
