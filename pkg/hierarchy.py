#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
🏛️ Hiyerarşi Modülü

Kontakt, konformal ve Hamilton seviyeleri arasındaki eşlemeler:

    H̄(q, p, z) = H(q, p) − c·z            (genişletme Ξ)
    kontakt yörünge → z atılır            (konformal yörünge)
    f = ∫ f̄ dz,  c* = ∫ z f̄ dμ̄           (yoğunluk izdüşümü)
    Π_i = ∫ Π̄_i dz,  Πⁱ = ∫ Π̄ⁱ dz        (bir-form izdüşümü, Π̄_z atılır)

ve bu eşlemelerin değişmeli diyagram testleri.

Not: c* = ∫ z f̄ dμ̄ tanımıyla, H̄ = H − cz altındaki parantez-varyantı
kontakt akışı d c*/dt = −∫ f·(Z(H) + H) dμ verir; konformal c* hızının
negatifi. kinetic_intertwining_residual bu ilişkiyi ölçer.
"""

import logging
from dataclasses import dataclass
from typing import Dict, Optional, Sequence, Tuple

import numpy as np
import pandas as pd

from brackets import contact_bracket
from geometry_core import Arity, ArityError, ScalarFunction, split_coordinates
from kinetic_density import (BOUNDARY_THRESHOLD, DensityGrid, GridSpec, KineticModel, KineticSolver,
                             boundary_mass_fraction, convergence_order, l2_norm)
from kinetic_momentum import (MomentumSolver, OneFormGrid, contact_density_from_oneform,
                              density_from_oneform)
from lifts_algebra import conformal_bracket_function
from particle_dynamics import FieldKind, Trajectory

logging.basicConfig(level=logging.INFO, format='%(asctime)s - %(levelname)s - %(message)s')
logger = logging.getLogger(__name__)


class DecayError(ValueError):
    """z sınırına yakın kütle eşiği aştı"""


@dataclass
class ExtendedHamiltonian:
    """
    Konformal Hamiltonyenin kontakt genişletmesi H̄ = H − c·z

    ∂H̄/∂z ≡ −c analitik olarak tutulur.
    """
    base: ScalarFunction
    c: float

    def __post_init__(self):
        if self.base.arity != Arity.SYMPLECTIC:
            raise ArityError(f"Genişletme simplektik Hamiltonyen ister: {self.base.name}")
        self.c = float(self.c)
        base, c, n = self.base, self.c, self.base.n

        def value(x):
            return base(x[:2 * n]) - c * x[2 * n]

        def gradient(x):
            grad = base.gradient(x[:2 * n])
            return np.concatenate([grad, np.full((1,) + grad.shape[1:], -c)])

        self.function = ScalarFunction(value, Arity.CONTACT, n, gradient,
                                       f"{base.name}-{c:g}z")

    @property
    def n(self) -> int:
        return self.base.n

    def __call__(self, state):
        return self.function(state)


def extend_hamiltonian(H: ScalarFunction, c: float) -> ExtendedHamiltonian:
    """Ξ(H, c): H̄(q,p,z) = H(q,p) − c·z"""
    return ExtendedHamiltonian(H, c)


def extension_bracket_residual(H: ScalarFunction, c_h: float, F: ScalarFunction, c_f: float,
                               states: Sequence) -> float:
    """
    Genişletmenin parantez homomorfizması artığı

    {Ξ(H,c_H), Ξ(F,c_F)}^(C) ile Ξ(K, 0) arasındaki en büyük fark,
    K = {H,F} + c_H·(Z(F)+F) − c_F·(Z(H)+H).
    """
    Hb = extend_hamiltonian(H, c_h).function
    Fb = extend_hamiltonian(F, c_f).function
    K = conformal_bracket_function(F, c_f, H, c_h)
    worst = 0.0
    for s in states:
        x = np.asarray(s, dtype=float)
        worst = max(worst, abs(contact_bracket(Hb, Fb, x) - K(x[:2 * H.n])))
    return worst


def project_trajectory(trajectory: Trajectory, extended: ExtendedHamiltonian) -> Trajectory:
    """
    Kontakt yörüngeyi kotanjant demete izdüşür: z atılır

    Tanılar taban H ile yeniden hesaplanır; hacim logaritması n·c·t.
    """
    if trajectory.arity != Arity.CONTACT:
        raise ArityError("project_trajectory kontakt yörünge bekler")
    n = trajectory.n
    states = trajectory.states[:, :2 * n].copy()
    times = trajectory.times.copy()
    diagnostics = pd.DataFrame({
        "step": trajectory.diagnostics["step"].to_numpy(),
        "t": times,
        "energy": np.asarray(extended.base(states.T)),
        "log_volume": n * extended.c * times,
        "dt": trajectory.diagnostics["dt"].to_numpy(),
    })
    return Trajectory(kind=FieldKind.conformal(extended.c), n=n, times=times,
                      states=states, diagnostics=diagnostics)


def z_history_residual(trajectory: Trajectory, extended: ExtendedHamiltonian) -> float:
    """ż = p·∂H/∂p − H + c·z özdeşliğinin merkezi fark artığı"""
    if trajectory.arity != Arity.CONTACT:
        raise ArityError("z geçmişi yalnızca kontakt yörüngede tanımlı")
    n = trajectory.n
    dt = float(trajectory.diagnostics["dt"].iloc[0])
    z = trajectory.z
    measured = (z[2:] - z[:-2]) / (2.0 * dt)
    x = trajectory.states[1:-1].T
    _, hp, _ = split_coordinates(extended.base.gradient(x[:2 * n]), n)
    p = x[n:2 * n]
    exact = np.sum(p * hp, axis=0) - np.asarray(extended.base(x[:2 * n])) + extended.c * x[2 * n]
    return float(np.max(np.abs(measured - exact)))


def _z_decay(values: np.ndarray, spec: GridSpec, threshold: float, what: str):
    fraction = boundary_mass_fraction(values, spec, axes=[2])
    if fraction > threshold:
        logger.error(f"{what}: z sınırına yakın oran {fraction:.3e} > {threshold:g}")
        raise DecayError(f"{what} z yönünde sönmüyor: sınır oranı {fraction:.3e} > {threshold:g}")
    return fraction


def project_kinetic(f: DensityGrid, threshold: float = BOUNDARY_THRESHOLD) -> Tuple[DensityGrid, float]:
    """
    Kontakt yoğunluğu konformal seviyeye izdüşür

    Returns:
        (f = ∫ f̄ dz simplektik ızgarada, c* = ∫ z f̄ dμ̄)

    Raises:
        DecayError: z sınırına yakın kütle eşiği aşarsa
    """
    f.spec.require(Arity.CONTACT)
    _z_decay(f.values, f.spec, threshold, "Yoğunluk")
    z_axis = f.spec.axes[2]
    projected = np.sum(f.values, axis=2) * z_axis.h
    z = f.spec.mesh()[2]
    cstar = float(np.sum(z * f.values) * f.spec.cell_volume)
    return DensityGrid(f.spec.symplectic_part(), projected, cstar), cstar


def project_oneform(Pi: OneFormGrid, threshold: float = BOUNDARY_THRESHOLD) -> OneFormGrid:
    """Π_i = ∫ Π̄_i dz, Πⁱ = ∫ Π̄ⁱ dz; Π̄_z atılır"""
    Pi.spec.require(Arity.CONTACT)
    magnitude = np.sqrt(sum(c ** 2 for c in Pi.components))
    _z_decay(magnitude, Pi.spec, threshold, "Bir-form")
    hz = Pi.spec.axes[2].h
    return OneFormGrid(Pi.spec.symplectic_part(), np.sum(Pi.pi_q, axis=2) * hz,
                       np.sum(Pi.pi_p, axis=2) * hz)


def commuting_square_residual(Pi: OneFormGrid, extended: ExtendedHamiltonian, dt: float,
                              steps: int, threads: Optional[int] = None) -> float:
    """
    Tam değişmeli kare

    (kontakt momentum akışı → project_oneform → density_from_oneform) ile
    (kontakt momentum akışı → contact_density_from_oneform → project_kinetic)
    arasındaki L² farkı.
    """
    solver = MomentumSolver(FieldKind.contact(), extended.function, Pi.spec, threads)
    evolved = Pi
    for _ in range(steps):
        evolved = solver.step(evolved, dt)
    upper = density_from_oneform(project_oneform(evolved))
    lower, _ = project_kinetic(contact_density_from_oneform(evolved))
    return l2_norm(upper.values - lower.values, upper.spec)


def kinetic_intertwining_residual(f: DensityGrid, extended: ExtendedHamiltonian, dt: float,
                                  steps: int, threads: Optional[int] = None) -> Dict[str, float]:
    """
    f̄'yi parantez varyantıyla evrilt ve izdüşür; izdüşmüş başlangıcı konformal
    çözücüyle evrilt; iki f'nin L² farkı ve c* işaret ilişkisi

    Returns:
        {density_l2, density_scale, cstar_contact, cstar_conformal}; density_scale
        izdüşmüş başlangıç yoğunluğunun L² normu (göreli artık için)
    """
    contact_solver = KineticSolver(KineticModel.contact_bracket(), extended.function, f.spec, threads)
    projected0, cstar0 = project_kinetic(f)
    conformal_solver = KineticSolver(KineticModel.conformal(extended.c), extended.base,
                                     projected0.spec, threads)
    fc = f
    gc = DensityGrid(projected0.spec, projected0.values, 0.0)
    for _ in range(steps):
        fc = contact_solver.step(fc, dt)
        gc = conformal_solver.step(gc, dt)
    projected, cstar = project_kinetic(fc)
    return {
        "density_l2": l2_norm(projected.values - gc.values, gc.spec),
        "density_scale": l2_norm(projected0.values, projected0.spec),
        "cstar_contact": cstar - cstar0,
        "cstar_conformal": float(gc.cstar),
    }


def residual_table(levels: Sequence[int], build, label: str) -> pd.DataFrame:
    """
    Izgara dizisi üzerinde artık tablosu ve yakınsama mertebesi

    Args:
        levels: Eksen başına hücre sayıları
        build: cells ↦ (artık, h) döndüren fonksiyon
        label: Tablo etiketi

    Returns:
        cells, h, residual, order sütunlu tablo
    """
    rows = []
    for cells in levels:
        residual, h = build(cells)
        rows.append({"check": label, "cells": int(cells), "h": float(h), "residual": float(residual)})
        logger.info(f"{label}: {cells} hücre, artık {residual:.3e}")
    table = pd.DataFrame(rows)
    positive = table["residual"] > 0
    if positive.sum() >= 2:
        order = convergence_order(table.loc[positive, "residual"], table.loc[positive, "h"])
    else:
        order = float("nan")
    table["order"] = order
    return table
