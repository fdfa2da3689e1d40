#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
🪢 Yükseltmeler ve Lie Cebiri Modülü

Taban vektör alanlarının kotanjant demete yükseltmeleri (tam kotanjant
yükseltme X̂, diverjans yükseltmesi κ(X), holonomik kısım, dikey temsilci)
ve Lie cebiri homomorfizmalarının sayısal doğrulaması.

Vektör alanı parantezi [V, W] = DW·V − DV·W, iki adımlı Richardson
ekstrapolasyonlu merkezi yönlü türevlerle hesaplanır.
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from enum import Enum
from typing import Callable, Dict, List, Optional, Sequence

import numpy as np

from brackets import bracket_function, poisson_bracket
from geometry_core import Arity, ArityError, PhaseState, ScalarFunction, central_jacobian, liouville_field
from hamiltonians import random_polynomial
from kinetic_density import FieldSamples, _conformal_rate, _cstar_rate, GridSpec, sample_function
from particle_dynamics import FieldKind, field_values

logging.basicConfig(level=logging.INFO, format='%(asctime)s - %(levelname)s - %(message)s')
logger = logging.getLogger(__name__)

DIVERGENCE_TOL = 1e-8
RICHARDSON_STEP = 1e-3


class DivergenceError(ValueError):
    """κ-yükseltmesi sabit olmayan diverjanslı alan için istendi"""


@dataclass
class BaseField:
    """
    Taban manifold ℝ^m üzerinde vektör alanı

    jacobian_fn verilmezse Jacobian merkezi farklarla alınır.
    J[b, a] = ∂X^b/∂x^a
    """
    dim: int
    components: Callable[[np.ndarray], np.ndarray]
    jacobian_fn: Optional[Callable[[np.ndarray], np.ndarray]] = None
    name: str = "X"

    def _point(self, x) -> np.ndarray:
        x = np.atleast_1d(np.asarray(x, dtype=float))
        if x.shape != (self.dim,):
            raise ArityError(f"{self.name}: {self.dim} boyutlu nokta beklenirken {x.shape} geldi")
        return x

    def __call__(self, x) -> np.ndarray:
        values = np.asarray(self.components(self._point(x)), dtype=float)
        if not np.all(np.isfinite(values)):
            raise ValueError(f"{self.name} sonlu olmayan değer üretti")
        return values

    def jacobian(self, x) -> np.ndarray:
        x = self._point(x)
        if self.jacobian_fn is not None:
            return np.asarray(self.jacobian_fn(x), dtype=float)
        return central_jacobian(self.components, x)

    def divergence(self, x) -> float:
        return float(np.trace(self.jacobian(x)))

    def divergence_spread(self, probes: Sequence) -> float:
        values = [self.divergence(x) for x in probes]
        return float(max(values) - min(values))


class LiftKind(str, Enum):
    COMPLETE_LIFT = "complete_lift"
    KAPPA = "kappa"
    HOLONOMIC_PART = "holonomic_part"
    VERTICAL_REP = "vertical_rep"


def _split(X: BaseField, point) -> tuple:
    point = np.asarray(point, dtype=float)
    if point.shape != (2 * X.dim,):
        raise ArityError(f"(x, y) noktası {2 * X.dim} boyutlu olmalı, gelen {point.shape}")
    return point[:X.dim], point[X.dim:]


def _probe_box(x: np.ndarray, count: int = 8, seed: int = 0) -> List[np.ndarray]:
    rng = np.random.default_rng(seed)
    return [x] + [x + rng.uniform(-1.0, 1.0, size=x.size) for _ in range(count)]


def require_constant_divergence(X: BaseField, probes: Sequence, tol: float = DIVERGENCE_TOL):
    spread = X.divergence_spread(probes)
    if spread > tol:
        logger.error(f"{X.name} diverjansı sabit değil: yayılım {spread:.3e}")
        raise DivergenceError(f"κ-yükseltmesi sabit diverjans gerektirir ({X.name}, yayılım {spread:.3e})")


def complete_cotangent_lift(X: BaseField, x, y) -> np.ndarray:
    """X̂ = (X^a, −∂X^b/∂x^a · y_b)"""
    x = X._point(x)
    y = np.asarray(y, dtype=float)
    if y.shape != (X.dim,):
        raise ArityError(f"Lif koordinatı {X.dim} boyutlu olmalı")
    return np.concatenate([X(x), -X.jacobian(x).T @ y])


def kappa_lift(X: BaseField, x, y, check: bool = True) -> np.ndarray:
    """
    κ(X) = (X^a, −(div X · y_a + ∂X^b/∂x^a · y_b))

    Args:
        check: True ise x çevresindeki örnek noktalarda sabit diverjans doğrulanır
    """
    x = X._point(x)
    if check:
        require_constant_divergence(X, _probe_box(x))
    y = np.asarray(y, dtype=float)
    return np.concatenate([X(x), -(X.divergence(x) * y + X.jacobian(x).T @ y)])


def holonomic_part(X: BaseField, x, y, y_x) -> np.ndarray:
    """Hκ(X) = (X^a, X^a ∂_a y_b); y_x[b, a] = ∂y_b/∂x^a"""
    x = X._point(x)
    return np.concatenate([X(x), np.asarray(y_x, dtype=float) @ X(x)])


def vertical_representative(X: BaseField, section: BaseField, x) -> np.ndarray:
    """
    Vκ(X): ẏ_a = −(div X · y_a + ∂X^b/∂x^a · y_b + X^b ∂y_a/∂x^b)

    Π = y_a dx^a için −L_X Π − div(X) Π ile aynıdır.
    """
    if section.dim != X.dim:
        raise ArityError(f"Kesit boyutu {section.dim}, alan boyutu {X.dim}")
    x = X._point(x)
    y = section(x)
    return -(X.divergence(x) * y + X.jacobian(x).T @ y + section.jacobian(x) @ X(x))


def lifted_field(X: BaseField, kind: LiftKind) -> Callable[[np.ndarray], np.ndarray]:
    """(x, y) ↦ yükseltilmiş alan; kotanjant demette vektör alanı olarak"""
    kind = LiftKind(kind)
    if kind == LiftKind.COMPLETE_LIFT:
        return lambda point: complete_cotangent_lift(X, *_split(X, point))
    if kind == LiftKind.KAPPA:
        return lambda point: kappa_lift(X, *_split(X, point), check=False)
    raise ValueError(f"{kind.value} yükseltmesi jet verisi gerektirir, alan olarak kullanılamaz")


def divergence_lift(X: BaseField) -> Callable[[np.ndarray], np.ndarray]:
    """D(X) = −div X · y_a ∂/∂y_a"""
    def field(point):
        x, y = _split(X, point)
        return np.concatenate([np.zeros(X.dim), -X.divergence(x) * y])
    return field


def lie_bracket_field(X: BaseField, Y: BaseField) -> BaseField:
    """[X, Y] taban alanı (Jacobian'lar üzerinden, türevi sayısal)"""
    if X.dim != Y.dim:
        raise ArityError("Farklı boyutlu alanların parantezi alınamaz")
    return BaseField(X.dim, lambda x: Y.jacobian(x) @ X(x) - X.jacobian(x) @ Y(x),
                     name=f"[{X.name},{Y.name}]")


def _directional(W: Callable[[np.ndarray], np.ndarray], point: np.ndarray,
                 direction: np.ndarray) -> np.ndarray:
    """DW(point)·direction, Richardson ekstrapolasyonlu merkezi fark"""
    h = RICHARDSON_STEP * max(1.0, float(np.max(np.abs(point)))) / max(1.0, float(np.max(np.abs(direction))))

    def central(step):
        return (np.asarray(W(point + step * direction)) - np.asarray(W(point - step * direction))) / (2.0 * step)

    return (4.0 * central(0.5 * h) - central(h)) / 3.0


def vector_field_bracket(V: Callable[[np.ndarray], np.ndarray], W: Callable[[np.ndarray], np.ndarray],
                         point) -> np.ndarray:
    """Jacobi–Lie parantezi [V, W] = DW·V − DV·W"""
    point = np.asarray(point, dtype=float)
    return _directional(W, point, np.asarray(V(point))) - _directional(V, point, np.asarray(W(point)))


class HomomorphismKind(str, Enum):
    HAM = "ham"
    CONFORMAL = "conformal"
    CONTACT = "contact"
    KAPPA = "kappa"
    EXTENSION = "extension"


def _hamiltonian_field(kind: FieldKind, H: ScalarFunction) -> Callable[[np.ndarray], np.ndarray]:
    return lambda x: field_values(kind, H, x)


def conformal_bracket_function(F: ScalarFunction, c_f: float, H: ScalarFunction, c_h: float) -> ScalarFunction:
    """
    (F, c_F) ve (H, c_H) konformal alanlarının parantezini üreten Hamiltonyen

    K = {H,F} + c_H·(Z(F) + F) − c_F·(Z(H) + H); parantezin konformal çarpanı 0.
    """
    n = F.n

    def value(x):
        p = x[n:2 * n]
        zf = -np.sum(p * F.gradient(x)[n:], axis=0)
        zh = -np.sum(p * H.gradient(x)[n:], axis=0)
        return poisson_bracket(H, F, x) + c_h * (zf + F(x)) - c_f * (zh + H(x))

    return ScalarFunction(value, Arity.SYMPLECTIC, n, name=f"K({F.name},{H.name})")


def _max_over(probes: Sequence, fn: Callable[[np.ndarray], float], threads: Optional[int]) -> float:
    probes = [np.asarray(p, dtype=float) for p in probes]
    if not probes:
        raise ValueError("En az bir yoklama noktası gerekli")
    if threads and threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            values = list(pool.map(fn, probes))
    else:
        values = [fn(p) for p in probes]
    return float(max(values))


def _envelope(n: int = 1) -> ScalarFunction:
    """exp(−|x|²) sönüm çarpanı; kutu sınırında kısmi integrasyon terimlerini yok eder"""
    value = lambda x: np.exp(-np.sum(x * x, axis=0))
    return ScalarFunction(value, Arity.SYMPLECTIC, n, lambda x: -2.0 * x * value(x), name="exp(-|x|²)")


def _extension_residual(f: ScalarFunction, F: ScalarFunction, c_f: float, H: ScalarFunction, c_h: float,
                        cells: int = 128, rate: Callable = _conformal_rate) -> float:
    """
    Yoğunluk dinamiğinin konformal cebirle dualitesi

    (g, b*) durumunun (F, c_F) ile eşleşmesi ⟨g, F⟩ + c_F·b* olsun; g = f·exp(−|x|²).
    (H, c_H) akışı altında d/dt ⟨g, F⟩ + c_F·ḃ* = −∫ g·K dμ,
    K = {H,F} + c_H·(Z(F) + F) − c_F·(Z(H) + H).

    Returns:
        |sol − sağ| / max(1, |sağ|)
    """
    spec = GridSpec.symplectic((-8.0, 8.0, cells), (-8.0, 8.0, cells), "truncated", "truncated")
    g = f * _envelope(f.n)
    values = sample_function(g, spec)
    grads = sample_function(g.gradient, spec)
    samples = FieldSamples(mesh=spec.mesh(), value=sample_function(H, spec),
                           gradient=sample_function(H.gradient, spec))
    density_rate = rate(values, [grads[0], grads[1]], samples, c_h)
    lhs = (float(np.sum(density_rate * sample_function(F, spec)) * spec.cell_volume)
           + c_f * _cstar_rate(values, samples, spec))
    K = conformal_bracket_function(F, c_f, H, c_h)
    rhs = -float(np.sum(values * sample_function(K, spec)) * spec.cell_volume)
    return abs(lhs - rhs) / max(1.0, abs(rhs))


def homomorphism_residual(kind: str, inputs: Sequence, probes: Sequence,
                          threads: Optional[int] = None) -> float:
    """
    Lie cebiri homomorfizması artığı

    Args:
        kind: ham | conformal | contact | kappa | extension
        inputs:
            ham:       (F, H)
            conformal: ((F, c_F), (H, c_H))
            contact:   (F̄, H̄)
            kappa:     (X, Y) sabit diverjanslı BaseField'lar
            extension: (f, (F, c_F), (H, c_H)); f yoğunluk polinomu
        probes: Yoklama noktaları (extension ızgara üzerinde çalışır, kullanmaz)

    Returns:
        Yoklamalar üzerinden en büyük artık
    """
    kind = HomomorphismKind(kind)
    if kind == HomomorphismKind.HAM:
        F, H = inputs
        ham = FieldKind.hamiltonian()
        XF, XH = _hamiltonian_field(ham, F), _hamiltonian_field(ham, H)
        XB = _hamiltonian_field(ham, bracket_function("symplectic", F, H))
        residual = lambda x: float(np.max(np.abs(vector_field_bracket(XF, XH, x) + XB(x))))
    elif kind == HomomorphismKind.CONFORMAL:
        (F, c_f), (H, c_h) = inputs
        VF = _hamiltonian_field(FieldKind.conformal(c_f), F)
        VH = _hamiltonian_field(FieldKind.conformal(c_h), H)
        XK = _hamiltonian_field(FieldKind.hamiltonian(), conformal_bracket_function(F, c_f, H, c_h))
        residual = lambda x: float(np.max(np.abs(vector_field_bracket(VF, VH, x) - XK(x))))
    elif kind == HomomorphismKind.CONTACT:
        F, H = inputs
        con = FieldKind.contact()
        XF, XH = _hamiltonian_field(con, F), _hamiltonian_field(con, H)
        XB = _hamiltonian_field(con, bracket_function("contact", F, H))
        residual = lambda x: float(np.max(np.abs(vector_field_bracket(XF, XH, x) + XB(x))))
    elif kind == HomomorphismKind.KAPPA:
        X, Y = inputs
        base_probes = [np.asarray(p, dtype=float)[:X.dim] for p in probes]
        require_constant_divergence(X, base_probes)
        require_constant_divergence(Y, base_probes)
        KX, KY = lifted_field(X, LiftKind.KAPPA), lifted_field(Y, LiftKind.KAPPA)
        KXY = lifted_field(lie_bracket_field(X, Y), LiftKind.KAPPA)
        residual = lambda x: float(np.max(np.abs(vector_field_bracket(KX, KY, x) - KXY(x))))
    else:
        f, (F, c_f), (H, c_h) = inputs
        return _extension_residual(f, F, float(c_f), H, float(c_h))
    return _max_over(probes, residual, threads)


def z_action_residual(H: ScalarFunction, probes: Sequence) -> float:
    """[Z, X_H] = X_{Z(H)+H} özdeşliğinin artığı"""
    n = H.n
    Z = lambda x: liouville_field(PhaseState.from_array(x))
    XH = _hamiltonian_field(FieldKind.hamiltonian(), H)

    def zh_value(x):
        return -np.sum(x[n:2 * n] * H.gradient(x)[n:], axis=0) + H(x)

    XZ = _hamiltonian_field(FieldKind.hamiltonian(),
                            ScalarFunction(zh_value, Arity.SYMPLECTIC, n, name=f"Z({H.name})+{H.name}"))
    return _max_over(probes, lambda x: float(np.max(np.abs(vector_field_bracket(Z, XH, x) - XZ(x)))), None)


def divergence_lift_bracket_residual(X: BaseField, probes: Sequence) -> float:
    """Sabit diverjanslı X için [X̂, D(X)] = 0 artığı"""
    return _max_over(probes, lambda p: float(np.max(np.abs(
        vector_field_bracket(lifted_field(X, LiftKind.COMPLETE_LIFT), divergence_lift(X), p)))), None)


def random_constant_divergence_field(rng: np.random.Generator, name: str = "X") -> BaseField:
    """
    ℝ² üzerinde sabit diverjanslı rastgele alan

    Afin kısım A·x + b ile kübik akım fonksiyonu ψ'nin (∂₂ψ, −∂₁ψ) alanı toplamı.
    """
    A = rng.uniform(-1.0, 1.0, size=(2, 2))
    b = rng.uniform(-1.0, 1.0, size=2)
    psi = random_polynomial(rng, Arity.SYMPLECTIC, 1, degree=3, name="psi")
    d1, d2 = psi.derivative(0), psi.derivative(1)

    def components(x):
        return A @ x + b + np.array([d2(x), -d1(x)])

    def jacobian(x):
        return A + np.stack([d2.gradient(x), -d1.gradient(x)])

    return BaseField(2, components, jacobian, name)


def run_algebra_suite(seed: int, instances: int = 100, tolerance: float = 1e-6,
                      probes_per_instance: int = 3, threads: Optional[int] = None) -> List[Dict]:
    """
    Beş homomorfizma türünün tohumlu polinom örnekleri üzerinde doğrulaması

    Returns:
        {kind, seed, residual, tolerance, pass} kayıtları
    """
    rng = np.random.default_rng(seed)
    worst = {kind: 0.0 for kind in HomomorphismKind}
    for _ in range(instances):
        sym_probes = list(rng.uniform(-1.0, 1.0, size=(probes_per_instance, 2)))
        con_probes = list(rng.uniform(-1.0, 1.0, size=(probes_per_instance, 3)))
        lift_probes = list(rng.uniform(-1.0, 1.0, size=(probes_per_instance, 4)))

        F = random_polynomial(rng, Arity.SYMPLECTIC, 1, 3, "F")
        H = random_polynomial(rng, Arity.SYMPLECTIC, 1, 3, "H")
        worst[HomomorphismKind.HAM] = max(worst[HomomorphismKind.HAM],
                                          homomorphism_residual("ham", (F, H), sym_probes, threads))
        c_f, c_h = rng.choice([0.3, -0.7], size=2)
        worst[HomomorphismKind.CONFORMAL] = max(
            worst[HomomorphismKind.CONFORMAL],
            homomorphism_residual("conformal", ((F, c_f), (H, c_h)), sym_probes, threads))

        Fc = random_polynomial(rng, Arity.CONTACT, 1, 3, "F̄")
        Hc = random_polynomial(rng, Arity.CONTACT, 1, 3, "H̄")
        worst[HomomorphismKind.CONTACT] = max(worst[HomomorphismKind.CONTACT],
                                              homomorphism_residual("contact", (Fc, Hc), con_probes, threads))

        X = random_constant_divergence_field(rng, "X")
        Y = random_constant_divergence_field(rng, "Y")
        worst[HomomorphismKind.KAPPA] = max(worst[HomomorphismKind.KAPPA],
                                            homomorphism_residual("kappa", (X, Y), lift_probes, threads))

        f = random_polynomial(rng, Arity.SYMPLECTIC, 1, 3, "f")
        worst[HomomorphismKind.EXTENSION] = max(
            worst[HomomorphismKind.EXTENSION],
            homomorphism_residual("extension", (f, (F, c_f), (H, c_h)), sym_probes))

    records = []
    for kind, residual in worst.items():
        passed = bool(residual <= tolerance)
        records.append({"kind": kind.value, "seed": int(seed), "residual": float(residual),
                        "tolerance": float(tolerance), "pass": passed})
        level = logging.INFO if passed else logging.WARNING
        logger.log(level, f"Homomorfizma {kind.value}: artık {residual:.3e} (tolerans {tolerance:g})")
    return records
