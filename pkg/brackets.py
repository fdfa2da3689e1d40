#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
🔗 Parantezler Modülü

Noktasal kanonik Poisson parantezi {F,H} = F_q·H_p − F_p·H_q ve Darboux
kontakt (Jacobi) parantezi; Jacobi artığı ve Leibniz kusuru kontrolleri.

İç içe parantezler için parantez değeri yeni bir ScalarFunction olarak
sarılır; bu fonksiyonun gradyanı merkezi farklarla (h = eps^(1/3)) alınır.
"""

import logging
from enum import Enum
from typing import Iterable

import numpy as np

from geometry_core import Arity, ArityError, ScalarFunction, coordinates, split_coordinates

logging.basicConfig(level=logging.INFO, format='%(asctime)s - %(levelname)s - %(message)s')
logger = logging.getLogger(__name__)


class BracketKind(str, Enum):
    """Parantez türü"""
    SYMPLECTIC = "symplectic"
    CONTACT = "contact"

    @property
    def arity(self) -> Arity:
        return Arity.SYMPLECTIC if self == BracketKind.SYMPLECTIC else Arity.CONTACT


def _check_pair(kind: BracketKind, F: ScalarFunction, H: ScalarFunction, state) -> np.ndarray:
    for fn in (F, H):
        if fn.arity != kind.arity:
            raise ArityError(f"{kind.value} parantez {fn.name} için {fn.arity.value} arite kabul etmez")
    if F.n != H.n:
        raise ArityError(f"Serbestlik dereceleri farklı: {F.n} != {H.n}")
    x = coordinates(state)
    if x.shape[0] != F.dim:
        raise ArityError(f"{F.dim} koordinat beklenirken {x.shape[0]} geldi")
    return x


def poisson_values(grad_f: np.ndarray, grad_h: np.ndarray, n: int) -> np.ndarray:
    """Gradyanlardan {F,H} = ∂F/∂q·∂H/∂p − ∂F/∂p·∂H/∂q"""
    fq, fp, _ = split_coordinates(grad_f, n)
    hq, hp, _ = split_coordinates(grad_h, n)
    return np.sum(fq * hp - fp * hq, axis=0)


def contact_values(f: np.ndarray, grad_f: np.ndarray, h: np.ndarray, grad_h: np.ndarray,
                   p: np.ndarray, n: int) -> np.ndarray:
    """
    Darboux kontakt parantezi:
    {F,H} = F_q·H_p − F_p·H_q + (F − p·F_p)·H_z − (H − p·H_p)·F_z
    """
    fq, fp, fz = split_coordinates(grad_f, n)
    hq, hp, hz = split_coordinates(grad_h, n)
    canonical = np.sum(fq * hp - fp * hq, axis=0)
    return (canonical + (f - np.sum(p * fp, axis=0)) * hz
            - (h - np.sum(p * hp, axis=0)) * fz)


def poisson_bracket(F: ScalarFunction, H: ScalarFunction, s) -> float:
    """
    Kanonik Poisson parantezi {F,H}(s)

    Args:
        F, H: Simplektik aritede fonksiyonlar
        s: PhaseState ya da koordinat dizisi

    Returns:
        Parantez değeri
    """
    x = _check_pair(BracketKind.SYMPLECTIC, F, H, s)
    value = poisson_values(F.gradient(x), H.gradient(x), F.n)
    return float(value) if x.ndim == 1 else value


def contact_bracket(F: ScalarFunction, H: ScalarFunction, s) -> float:
    """
    Kontakt (Jacobi) parantezi {F,H}^(C)(s)

    z'den bağımsız F, H için kanonik Poisson parantezine indirgenir.
    """
    x = _check_pair(BracketKind.CONTACT, F, H, s)
    _, p, _ = split_coordinates(x, F.n)
    value = contact_values(F(x), F.gradient(x), H(x), H.gradient(x), p, F.n)
    return float(value) if x.ndim == 1 else value


def bracket(kind: BracketKind, F: ScalarFunction, H: ScalarFunction, s) -> float:
    if BracketKind(kind) == BracketKind.SYMPLECTIC:
        return poisson_bracket(F, H, s)
    return contact_bracket(F, H, s)


def bracket_function(kind: BracketKind, F: ScalarFunction, H: ScalarFunction) -> ScalarFunction:
    """
    {F,H}'yi yeni bir ScalarFunction olarak sar

    Gradyan verilmez; iç içe parantezlerde merkezi fark yedeği kullanılır.
    """
    kind = BracketKind(kind)
    if F.arity != kind.arity or H.arity != kind.arity:
        raise ArityError(f"{kind.value} parantez için uyumsuz fonksiyonlar")
    return ScalarFunction(lambda x: bracket(kind, F, H, x), kind.arity, F.n,
                          name=f"{{{F.name},{H.name}}}")


def jacobi_residual(kind: BracketKind, F: ScalarFunction, G: ScalarFunction,
                    H: ScalarFunction, states: Iterable) -> float:
    """
    Jacobi özdeşliği artığı

    max |{{F,G},H} + {{G,H},F} + {{H,F},G}| (verilen durumlar üzerinde)

    Returns:
        Negatif olmayan artık
    """
    kind = BracketKind(kind)
    FG = bracket_function(kind, F, G)
    GH = bracket_function(kind, G, H)
    HF = bracket_function(kind, H, F)
    worst = 0.0
    count = 0
    for s in states:
        total = bracket(kind, FG, H, s) + bracket(kind, GH, F, s) + bracket(kind, HF, G, s)
        worst = max(worst, abs(total))
        count += 1
    if count == 0:
        raise ValueError("Jacobi artığı için en az bir durum gerekli")
    logger.debug(f"Jacobi artığı ({kind.value}, {count} durum): {worst:.3e}")
    return worst


def antisymmetry_residual(kind: BracketKind, F: ScalarFunction, H: ScalarFunction,
                          states: Iterable) -> float:
    """max |{F,H} + {H,F}|"""
    return max(abs(bracket(kind, F, H, s) + bracket(kind, H, F, s)) for s in states)


def leibniz_defect(F: ScalarFunction, G: ScalarFunction, H: ScalarFunction, s) -> float:
    """
    Kontakt parantezinin Leibniz kusuru

    {FG,H} − F{G,H} − G{F,H} + FG·R(H); Darboux parantezinde özdeş olarak sıfır.
    """
    x = coordinates(s)
    FG = F * G
    r_h = H.partials(x)[2]
    return float(contact_bracket(FG, H, x) - F(x) * contact_bracket(G, H, x)
                 - G(x) * contact_bracket(F, H, x) + F(x) * G(x) * float(r_h))


def restrict_to_symplectic(H: ScalarFunction) -> ScalarFunction:
    """z'den bağımsız kontakt fonksiyonun (q, p) kısıtı (z = 0 kesiti)"""
    if H.arity != Arity.CONTACT:
        raise ArityError("Kısıt yalnızca kontakt fonksiyonlar için tanımlı")

    def lift(x):
        return np.concatenate([x, np.zeros((1,) + x.shape[1:])], axis=0)

    gradient = None
    if H.has_gradient:
        gradient = lambda x: H.gradient(lift(x))[:-1]
    return ScalarFunction(lambda x: H(lift(x)), Arity.SYMPLECTIC, H.n, gradient, f"{H.name}|z=0")
