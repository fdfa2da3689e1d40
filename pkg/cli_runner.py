#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
🚀 Senaryo Koşturucu

Düz `anahtar = değer` senaryo dosyalarını okuyup çözücülere dağıtır, sonuçları
CSV / JSON-lines / PGM / SVG olarak yazar ve değişmez kontrollerine göre çıkış
kodu döndürür.

Çıkış kodları:
    0  tüm kontroller geçti
    2  sayısal kontrol başarısız
    3  senaryo şema hatası
    4  çalışma zamanı iptali (patlama, sonlu olmayan değer, ızgara hatası ...)

Kullanım:
    python cli_runner.py simulate-particle --scenario scenarios/conformal_particle.txt --out runs/p1
"""

import argparse
import io
import json
import logging
import math
import os
import sys
import time
from contextlib import contextmanager
from pathlib import Path
from typing import Annotated, Any, Dict, Iterable, List, Literal, Optional, Tuple

import numpy as np
import pandas as pd
from dotenv import load_dotenv
from dotenv.parser import parse_stream
from pydantic import (BaseModel, BeforeValidator, ConfigDict, Field, ValidationError,
                      field_validator, model_validator)

from artifacts import emit_plot, sha256_file, write_csv
from brackets import jacobi_residual, leibniz_defect
from geometry_core import Arity, ArityError, ContactState, PhaseState, ScalarFunction
from hamiltonians import build_hamiltonian, parse_terms, polynomial_from_terms, random_polynomial
from hierarchy import (DecayError, extend_hamiltonian, extension_bracket_residual,
                       commuting_square_residual, kinetic_intertwining_residual, project_trajectory,
                       residual_table, z_history_residual)
from kinetic_density import (MAX_CELLS, MIN_CELLS, Boundary, DensityGrid, GridError, GridSpec,
                             KineticModel, KineticSolver, ModelTag, NonFiniteError, boundary_mass_fraction,
                             gaussian_density, l2_norm)
from kinetic_momentum import (MomentumSolver, OneFormGrid, check_oneform_decay,
                              conformal_state_from_oneform, contact_density_from_oneform,
                              momentum_density_intertwining)
from lifts_algebra import (DivergenceError, random_constant_divergence_field, run_algebra_suite,
                           divergence_lift_bracket_residual, z_action_residual)
from metrics import get_simulation_metrics, log_check, log_steps, track_run
from particle_dynamics import (FieldKind, FieldKindError, FieldTag, IntegrationError, energy_law_residual,
                               energy_rate, flow_volume_factor, integrate, preserved_contact_quantity)

logging.basicConfig(level=logging.INFO, format='%(asctime)s - %(levelname)s - %(message)s')
logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_CHECK_FAILED = 2
EXIT_SCHEMA = 3
EXIT_ABORT = 4

MANIFEST_NAME = "manifest.jsonl"
ENERGY_LAW_RTOL = 1e-4
PRESERVED_RTOL = 1e-4
MASS_CONSERVATION_RTOL = 1e-10
ROTATION_RTOL = 1e-3
LEIBNIZ_TOL = 1e-8
CSTAR_RTOL = 1e-3
COMMUTING_ROUNDOFF = 1e-10
INTERTWINING_RTOL = 1e-8
MIN_CONVERGENCE_ORDER = 1.8
HIERARCHY_KINETIC_STEPS = 20
TINY = 1e-300

# Koşu iptali sayılan çözücü hataları
ABORT_ERRORS = (IntegrationError, NonFiniteError, DecayError, DivergenceError, GridError,
                FieldKindError, ArityError)

SUBCOMMANDS = {
    "simulate-particle": "particle",
    "simulate-kinetic": "kinetic_density",
    "simulate-momentum": "kinetic_momentum",
    "verify-algebra": "verify",
    "hierarchy-check": "hierarchy",
}


# ---------------------------------------------------------------------------
# Senaryo şeması
# ---------------------------------------------------------------------------

def _split_list(value: Any) -> Any:
    if isinstance(value, str):
        return [part.strip() for part in value.split(",") if part.strip()]
    return value


FloatList = Annotated[List[float], BeforeValidator(_split_list)]
IntList = Annotated[List[int], BeforeValidator(_split_list)]
AxisRange = Annotated[Tuple[float, float, int], BeforeValidator(_split_list)]


class ScenarioError(ValueError):
    """Şema hataları: (satır, anahtar, mesaj) listesi"""

    def __init__(self, errors: List[Tuple[int, str, str]]):
        self.errors = sorted(errors)
        super().__init__("; ".join(f"line {line}: {key}: {msg}" for line, key, msg in self.errors))


class _Section(BaseModel):
    model_config = ConfigDict(extra="forbid")


class HamiltonianSection(_Section):
    name: Literal["harmonic", "plasma", "polynomial"] = "harmonic"
    mass: float = Field(1.0, gt=0)
    charge: float = 1.0
    potential: Literal["none", "harmonic", "cosine"] = "none"
    amplitude: float = 1.0
    wavenumber: float = 1.0
    terms: Optional[str] = None
    z_coupling: float = 0.0


class ConformalSection(_Section):
    c: float = 0.0


class FieldSection(_Section):
    kind: Optional[Literal["hamiltonian", "conformal", "contact", "strict_contact"]] = None


class IntegratorSection(_Section):
    method: Literal["rk4", "conformal_splitting"] = "rk4"
    dt: float = 1e-3
    T: float = 1.0

    @field_validator("dt")
    @classmethod
    def _dt_positive(cls, value: float) -> float:
        if not value > 0:
            raise ValueError("dt must be positive")
        return value

    @field_validator("T")
    @classmethod
    def _t_positive(cls, value: float) -> float:
        if not value > 0:
            raise ValueError("T must be positive")
        return value

    @model_validator(mode="after")
    def _t_covers_dt(self):
        if self.T < self.dt:
            raise ValueError(f"T ({self.T:g}) must be at least dt ({self.dt:g})")
        return self

    @property
    def steps(self) -> int:
        return int(round(self.T / self.dt))


class InitialSection(_Section):
    q: FloatList = [1.0]
    p: FloatList = [0.0]
    z: FloatList = [0.0]
    center: FloatList = [0.0]
    width: FloatList = [1.0]
    pi_q: float = 0.0
    pi_p: float = 1.0
    pi_z: float = 0.0

    @field_validator("width")
    @classmethod
    def _width_positive(cls, value: List[float]) -> List[float]:
        if not value or min(value) <= 0:
            raise ValueError("width entries must be positive")
        return value


class GridSection(_Section):
    q: Optional[AxisRange] = None
    p: Optional[AxisRange] = None
    z: Optional[AxisRange] = None
    boundary_q: Literal["periodic", "truncated"] = "periodic"
    boundary_p: Literal["periodic", "truncated"] = "truncated"
    boundary_z: Literal["periodic", "truncated"] = "truncated"

    @field_validator("q", "p", "z")
    @classmethod
    def _axis_bounds(cls, value):
        if value is None:
            return value
        lo, hi, cells = value
        if not hi > lo:
            raise ValueError(f"max ({hi:g}) must exceed min ({lo:g})")
        if cells < MIN_CELLS:
            raise ValueError(f"cells must be at least {MIN_CELLS}, got {cells}")
        return value

    @model_validator(mode="after")
    def _memory_cap(self):
        given = [axis for axis in (self.q, self.p, self.z) if axis is not None]
        total = math.prod(axis[2] for axis in given) if given else 0
        if total > MAX_CELLS:
            raise ValueError(f"grid has {total} cells, exceeding the 2^27 cap ({MAX_CELLS})")
        return self


class KineticSection(_Section):
    model: Optional[Literal["vlasov", "conformal", "contact_vf", "contact_bracket"]] = None
    flux_form: bool = False
    steps: Optional[int] = Field(None, gt=0)
    snapshot_every: int = Field(0, ge=0)


class VerifySection(_Section):
    instances: int = Field(100, gt=0)
    tolerance: float = Field(1e-6, gt=0)
    identities: bool = False


class HierarchySection(_Section):
    levels: IntList = [16, 32, 64]

    @field_validator("levels")
    @classmethod
    def _levels_valid(cls, value: List[int]) -> List[int]:
        if len(value) < 2:
            raise ValueError("at least two grid levels are required")
        if min(value) < MIN_CELLS:
            raise ValueError(f"grid levels must be at least {MIN_CELLS}")
        return value


class OutputSection(_Section):
    dir: Optional[str] = None
    every: int = Field(100, gt=0)


class Scenario(_Section):
    """Doğrulanmış koşu tanımı"""
    run: Literal["particle", "kinetic_density", "kinetic_momentum", "verify", "hierarchy"]
    hamiltonian: HamiltonianSection = HamiltonianSection()
    conformal: ConformalSection = ConformalSection()
    field: FieldSection = FieldSection()
    integrator: IntegratorSection = IntegratorSection()
    initial: InitialSection = InitialSection()
    grid: GridSection = GridSection()
    kinetic: KineticSection = KineticSection()
    verify: VerifySection = VerifySection()
    hierarchy: HierarchySection = HierarchySection()
    output: OutputSection = OutputSection()
    seed: int = Field(0, ge=0, lt=2 ** 64)
    threads: Optional[int] = Field(None, gt=0)

    @property
    def field_kind(self) -> FieldKind:
        name = self.field.kind or ("conformal" if self.conformal.c != 0.0 else "hamiltonian")
        return FieldKind.parse(name, self.conformal.c)

    @property
    def kinetic_model(self) -> KineticModel:
        name = self.kinetic.model or ("conformal" if self.conformal.c != 0.0 else "vlasov")
        if name == "vlasov":
            return KineticModel.vlasov()
        if name == "conformal":
            return KineticModel.conformal(self.conformal.c)
        if name == "contact_vf":
            return KineticModel.contact_vf(self.kinetic.flux_form)
        return KineticModel.contact_bracket()

    def echo(self) -> Dict[str, Any]:
        """Manifestoya yazılan, koşu ortamından bağımsız senaryo kopyası"""
        return self.model_dump(mode="json", exclude={"threads": True, "output": {"dir"}})


def _error_key(loc: Iterable) -> str:
    parts = []
    for item in loc:
        if not isinstance(item, str):
            break
        parts.append(item)
    return ".".join(parts)


def _line_of(key: str, lines: Dict[str, int]) -> int:
    if key in lines:
        return lines[key]
    prefixed = [line for name, line in lines.items() if name.startswith(key + ".")] if key else []
    return min(prefixed) if prefixed else 0


def _validation_errors(error: ValidationError, lines: Dict[str, int]) -> List[Tuple[int, str, str]]:
    found = []
    for item in error.errors():
        key = _error_key(item["loc"])
        if item["type"] == "extra_forbidden":
            message = "unknown key"
        elif item["type"] == "missing":
            message = "missing required key"
        elif item["type"] == "value_error" and "error" in item.get("ctx", {}):
            message = str(item["ctx"]["error"])
        else:
            message = item["msg"]
        found.append((_line_of(key, lines), key, message))
    return found


def _cross_checks(scenario: Scenario, lines: Dict[str, int]) -> List[Tuple[int, str, str]]:
    """Bölümler arası kurallar"""
    problems: List[Tuple[int, str, str]] = []

    def problem(key: str, message: str):
        problems.append((_line_of(key, lines), key, message))

    h = scenario.hamiltonian
    if h.name == "polynomial" and not h.terms:
        problem("hamiltonian.terms", "polynomial Hamiltonian requires hamiltonian.terms")

    kind = scenario.run
    initial = scenario.initial
    if kind == "particle":
        if len(initial.q) != len(initial.p):
            problem("initial.p", f"expected {len(initial.q)} momenta to match initial.q")
        if len(initial.z) != 1:
            problem("initial.z", "a single z value is required")
        if scenario.integrator.method == "conformal_splitting" and scenario.field_kind.tag != FieldTag.CONFORMAL:
            problem("integrator.method", "conformal_splitting requires a conformal field")

    if kind in ("kinetic_density", "kinetic_momentum", "hierarchy"):
        if kind == "kinetic_density":
            contact = scenario.kinetic_model.arity == Arity.CONTACT
        elif kind == "kinetic_momentum":
            contact = scenario.field_kind.arity == Arity.CONTACT
        else:
            contact = True
        required = ["q", "p", "z"] if contact else ["q", "p"]
        for axis in required:
            if getattr(scenario.grid, axis) is None:
                problem(f"grid.{axis}", "missing required key")
        ndim = len(required)
        for name in ("center", "width"):
            if len(getattr(initial, name)) not in (1, ndim):
                problem(f"initial.{name}", f"expected 1 or {ndim} values")
        if kind == "hierarchy" and scenario.grid.q is not None and scenario.grid.z is not None:
            total = max(scenario.hierarchy.levels) ** 2 * scenario.grid.z[2]
            if total > MAX_CELLS:
                problem("hierarchy.levels", f"finest level has {total} cells, exceeding the 2^27 cap ({MAX_CELLS})")
    return problems


def parse_scenario(text: str, run: Optional[str] = None) -> Scenario:
    """
    Senaryo metnini çöz ve doğrula

    Args:
        text: UTF-8 `anahtar = değer` satırları; noktalı bölüm adları, `#` yorumları
        run: Alt komuttan gelen koşu türü (metindeki `run` ile çelişmemeli)

    Returns:
        Scenario

    Raises:
        ScenarioError: Satır numaralı şema hataları
    """
    errors: List[Tuple[int, str, str]] = []
    lines: Dict[str, int] = {}
    nested: Dict[str, Any] = {}

    for binding in parse_stream(io.StringIO(text)):
        line = binding.original.line
        if binding.error:
            errors.append((line, "", f"malformed line: {binding.original.string.strip()!r}"))
            continue
        if binding.key is None:
            continue
        key = binding.key
        if key in lines:
            errors.append((line, key, f"duplicate key (first set on line {lines[key]})"))
            continue
        lines[key] = line
        value = binding.value if binding.value is not None else ""
        section, dot, leaf = key.partition(".")
        if dot:
            target = nested.setdefault(section, {})
            if not isinstance(target, dict):
                errors.append((line, key, f"{section} is not a section"))
                continue
            target[leaf] = value
        elif isinstance(nested.get(key), dict):
            errors.append((line, key, f"{key} is a section"))
        else:
            nested[key] = value

    if run is not None:
        given = nested.get("run")
        if isinstance(given, str) and given != run:
            errors.append((lines["run"], "run", f"scenario declares run = {given}, command expects {run}"))
        nested["run"] = run

    if errors:
        raise ScenarioError(errors)

    try:
        scenario = Scenario.model_validate(nested)
    except ValidationError as e:
        raise ScenarioError(_validation_errors(e, lines)) from None

    problems = _cross_checks(scenario, lines)
    if problems:
        raise ScenarioError(problems)
    logger.info(f"Senaryo doğrulandı: {scenario.run}, {len(lines)} anahtar")
    return scenario


def load_scenario(path, run: Optional[str] = None) -> Scenario:
    """Senaryo dosyasını oku ve çöz"""
    text = Path(path).read_text(encoding="utf-8")
    return parse_scenario(text, run)


# ---------------------------------------------------------------------------
# Manifesto
# ---------------------------------------------------------------------------

def _json_default(value):
    if isinstance(value, np.generic):
        return value.item()
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, Path):
        return value.as_posix()
    raise TypeError(f"JSON'a çevrilemeyen tür: {type(value).__name__}")


class RunManifest:
    """
    Koşu başına tek JSON-lines manifestosu

    Kayıtlar yazıldıkları anda dosyanın sonuna eklenir; kayıt türleri:
    scenario, host, step, check, artifact, diagnostic, table, timing, error, summary.
    """

    NON_COMPARABLE = ("timing", "host")

    def __init__(self, out_dir):
        self.out_dir = Path(out_dir)
        self.out_dir.mkdir(parents=True, exist_ok=True)
        self.path = self.out_dir / MANIFEST_NAME
        self.path.write_text("", encoding="utf-8")
        self.records: List[Dict[str, Any]] = []
        self.closed = False

    def append(self, record_type: str, **fields) -> Dict[str, Any]:
        if self.closed:
            raise RuntimeError("Kapatılmış manifestoya kayıt eklenemez")
        line = json.dumps({"type": record_type, **fields}, ensure_ascii=False, sort_keys=True,
                          default=_json_default)
        with open(self.path, "a", encoding="utf-8", newline="\n") as f:
            f.write(line + "\n")
        record = json.loads(line)
        self.records.append(record)
        return record

    def add_check(self, name: str, residual: float, tolerance: float,
                  passed: Optional[bool] = None) -> bool:
        residual = float(residual)
        if passed is None:
            passed = bool(residual <= tolerance)
        self.append("check", name=name, residual=residual, tolerance=float(tolerance), **{"pass": bool(passed)})
        log_check(name, passed)
        level = logging.INFO if passed else logging.WARNING
        logger.log(level, f"Kontrol {name}: artık {residual:.3e} (tolerans {tolerance:g}) "
                          f"{'geçti' if passed else 'BAŞARISIZ'}")
        return bool(passed)

    def add_artifact(self, path, kind: str) -> Dict[str, Any]:
        path = Path(path)
        return self.append("artifact", path=path.relative_to(self.out_dir).as_posix(), kind=kind,
                           sha256=sha256_file(path))

    @contextmanager
    def timed(self, phase: str):
        start = time.perf_counter()
        try:
            yield
        finally:
            self.append("timing", phase=phase, seconds=time.perf_counter() - start)

    def checks(self) -> List[Dict[str, Any]]:
        return [r for r in self.records if r["type"] == "check"]

    def artifacts(self) -> List[Dict[str, Any]]:
        return [r for r in self.records if r["type"] == "artifact"]

    @property
    def aborted(self) -> bool:
        return any(r["type"] == "error" for r in self.records)

    @property
    def exit_code(self) -> int:
        if self.aborted:
            return EXIT_ABORT
        if any(not r["pass"] for r in self.checks()):
            return EXIT_CHECK_FAILED
        return EXIT_OK

    def close(self) -> Dict[str, Any]:
        """Özet kaydını yaz; sonrasında ekleme yapılamaz"""
        checks = self.checks()
        failed = [r["name"] for r in checks if not r["pass"]]
        summary = self.append("summary", checks=len(checks), failed=failed,
                              status="aborted" if self.aborted else ("failed" if failed else "passed"),
                              exit_code=self.exit_code)
        self.closed = True
        return summary

    def comparable_records(self) -> List[Dict[str, Any]]:
        """Zamanlama ve ortam kayıtları çıkarılmış kayıt listesi"""
        return [r for r in self.records if r["type"] not in self.NON_COMPARABLE]

    @staticmethod
    def load(path) -> List[Dict[str, Any]]:
        with open(path, "r", encoding="utf-8") as f:
            return [json.loads(line) for line in f if line.strip()]


# ---------------------------------------------------------------------------
# Koşu türleri
# ---------------------------------------------------------------------------

def _hamiltonian(s: Scenario, arity: Arity, n: int = 1) -> ScalarFunction:
    """Senaryodaki Hamiltonyeni kur; kontakt türlerde H̄ = H − z_coupling·z"""
    h = s.hamiltonian
    plasma = dict(mass=h.mass, charge=h.charge, potential=h.potential,
                  amplitude=h.amplitude, wavenumber=h.wavenumber)
    if arity == Arity.SYMPLECTIC:
        return build_hamiltonian(h.name, Arity.SYMPLECTIC, n, h.terms, **plasma)
    if h.name == "polynomial":
        terms = parse_terms(h.terms, Arity.CONTACT, n)
        z_power = (0,) * (2 * n) + (1,)
        terms[z_power] = terms.get(z_power, 0.0) - h.z_coupling
        return polynomial_from_terms(terms, Arity.CONTACT, n, "polynomial")
    base = build_hamiltonian(h.name, Arity.SYMPLECTIC, n, None, **plasma)
    return extend_hamiltonian(base, h.z_coupling).function


def _grid(s: Scenario, contact: bool, cells: Optional[int] = None) -> GridSpec:
    g = s.grid
    q, p = g.q, g.p
    if cells is not None:
        q, p = (q[0], q[1], cells), (p[0], p[1], cells)
    if contact:
        return GridSpec.contact(q, p, g.z, g.boundary_q, g.boundary_p, g.boundary_z)
    return GridSpec.symplectic(q, p, g.boundary_q, g.boundary_p)


def _record_indices(count: int, every: int) -> List[int]:
    return sorted(set(range(0, count, every)) | {count - 1})


def _snapshot_due(k: int, steps: int, every: int) -> bool:
    return k == 0 or k == steps or (every > 0 and k % every == 0)


def _heatmap_values(values: np.ndarray) -> np.ndarray:
    return values if values.ndim == 2 else np.sum(values, axis=2)


def _run_particle(s: Scenario, manifest: RunManifest):
    kind = s.field_kind
    initial = s.initial
    n = len(initial.q)
    H = _hamiltonian(s, kind.arity, n)
    if kind.arity == Arity.CONTACT:
        s0 = ContactState(initial.q, initial.p, initial.z[0])
    else:
        s0 = PhaseState(initial.q, initial.p)
    dt, T, method = s.integrator.dt, s.integrator.T, s.integrator.method

    with manifest.timed("integrate"):
        trajectory = integrate(kind, H, s0, T, dt, method)
    log_steps("particle", len(trajectory.times) - 1)

    diagnostics = trajectory.diagnostics
    for row in diagnostics.iloc[_record_indices(len(diagnostics), s.output.every)].to_dict("records"):
        manifest.append("step", **row)

    manifest.add_artifact(write_csv(trajectory.to_frame(), manifest.out_dir / "trajectory.csv"), "csv")
    plot = emit_plot(diagnostics[["t", "energy"]], "line", manifest.out_dir / "energy.svg",
                     title=f"Enerji: {kind.label}", xlabel="t", ylabel="H")
    manifest.add_artifact(plot, "svg")
    if n == 1:
        phase = emit_plot({"yörünge": (trajectory.q[:, 0], trajectory.p[:, 0])}, "line",
                          manifest.out_dir / "phase.svg", title="Faz portresi", xlabel="q", ylabel="p")
        manifest.add_artifact(phase, "svg")

    tolerance = s.verify.tolerance
    energy = diagnostics["energy"].to_numpy()
    e0 = energy[0]
    if kind.tag in (FieldTag.HAMILTONIAN, FieldTag.STRICT_CONTACT):
        drift = float(np.max(np.abs(energy - e0))) / max(abs(e0), TINY)
        manifest.add_check("energy_conservation", drift, tolerance)
    elif len(energy) >= 3:
        scale = float(np.max(np.abs(energy_rate(kind, H, trajectory.states.T))))
        residual = energy_law_residual(trajectory, H)
        manifest.add_check("energy_law", residual / max(scale, TINY), ENERGY_LAW_RTOL)

    if kind.tag == FieldTag.CONFORMAL:
        with manifest.timed("volume"):
            volume = flow_volume_factor(kind, H, s0, T, dt, method)
        expected = math.exp(n * kind.c * trajectory.times[-1])
        manifest.add_check("volume_law", abs(volume - expected) / expected, tolerance)

    if kind.tag == FieldTag.CONTACT:
        if s.hamiltonian.name != "polynomial":
            # ∂H̄/∂z = −a sabit ⇒ H̄(t) = H̄(0)·e^{a t}
            exact = e0 * np.exp(s.hamiltonian.z_coupling * trajectory.times)
            manifest.add_check("energy_exponential",
                               float(np.max(np.abs(energy - exact))) / max(abs(e0), TINY), tolerance)
        if np.all(energy != 0):
            preserved = preserved_contact_quantity(trajectory)
            spread = float(np.max(preserved) - np.min(preserved)) / preserved[0]
            manifest.add_check("preserved_quantity", spread, PRESERVED_RTOL)


def _full_harmonic_turn(s: Scenario, model: KineticModel, spec: GridSpec, T: float) -> bool:
    """Harmonik Vlasov akışı periyodik ızgarada tam bir tur mu (T = 2π)"""
    periodic = all(axis.boundary == Boundary.PERIODIC for axis in spec.axes)
    return (model.tag == ModelTag.VLASOV and s.hamiltonian.name == "harmonic" and periodic
            and math.isclose(T, 2.0 * math.pi, rel_tol=1e-9))


def _run_kinetic_density(s: Scenario, manifest: RunManifest):
    model = s.kinetic_model
    contact = model.arity == Arity.CONTACT
    spec = _grid(s, contact)
    H = _hamiltonian(s, model.arity)
    dt = s.integrator.dt
    steps = s.kinetic.steps or s.integrator.steps
    state = gaussian_density(spec, s.initial.center, s.initial.width,
                             0.0 if model.tag == ModelTag.CONFORMAL else None)
    mass0 = state.mass()
    initial = state

    with manifest.timed("setup"):
        solver = KineticSolver(model, H, spec, s.threads)
    bound = solver.cfl_bound()
    manifest.add_check("cfl", dt, bound, passed=dt <= bound)

    snapshots = manifest.out_dir / "snapshots"

    def on_record(k: int, current: DensityGrid):
        if not _snapshot_due(k, steps, s.kinetic.snapshot_every):
            return
        stem = f"density_{k:06d}"
        manifest.add_artifact(write_csv(current.to_frame(), snapshots / f"{stem}.csv"), "snapshot")
        manifest.add_artifact(emit_plot(_heatmap_values(current.values), "heatmap",
                                        snapshots / f"{stem}.pgm"), "snapshot")

    with manifest.timed("solve"):
        state, history = solver.run(state, dt, steps, s.output.every, on_record)
    log_steps("kinetic_density", steps)

    for row in history.to_dict("records"):
        manifest.append("step", **row)
    manifest.add_artifact(write_csv(history, manifest.out_dir / "diagnostics.csv"), "csv")
    manifest.add_artifact(emit_plot(history[["t", "mass"]], "line", manifest.out_dir / "mass.svg",
                                    title=f"Kütle: {model.label}", ylabel="kütle"), "svg")
    manifest.append("diagnostic", name="boundary_mass_fraction",
                    value=boundary_mass_fraction(state.values, spec))

    if model.tag == ModelTag.CONTACT_VF and model.flux_form:
        drift = float(np.max(np.abs(history["mass"].to_numpy() - mass0))) / abs(mass0)
        manifest.add_check("mass_conservation", drift, MASS_CONSERVATION_RTOL)

    if _full_harmonic_turn(s, model, spec, dt * steps):
        error = l2_norm(state.values - initial.values, spec) / l2_norm(initial.values, spec)
        manifest.add_check("rotation_return", error, ROTATION_RTOL)


def _initial_oneform(s: Scenario, spec: GridSpec) -> OneFormGrid:
    shape = gaussian_density(spec, s.initial.center, s.initial.width).values
    weights = [s.initial.pi_q, s.initial.pi_p, s.initial.pi_z][:spec.ndim]
    return OneFormGrid.from_components(spec, [w * shape for w in weights])


def _run_kinetic_momentum(s: Scenario, manifest: RunManifest):
    kind = s.field_kind
    contact = kind.arity == Arity.CONTACT
    spec = _grid(s, contact)
    H = _hamiltonian(s, kind.arity)
    dt = s.integrator.dt
    steps = s.kinetic.steps or s.integrator.steps
    Pi = _initial_oneform(s, spec)

    def density_of(form: OneFormGrid) -> DensityGrid:
        if contact:
            return contact_density_from_oneform(form, strict=kind.tag == FieldTag.STRICT_CONTACT)
        return conformal_state_from_oneform(form)

    snapshots = manifest.out_dir / "snapshots"

    def record(k: int, form: OneFormGrid):
        density = density_of(form)
        norm = math.sqrt(sum(l2_norm(c, spec) ** 2 for c in form.components))
        manifest.append("step", step=k, t=k * dt, norm=norm, mass=density.mass(), cstar=density.cstar)
        if _snapshot_due(k, steps, s.kinetic.snapshot_every):
            stem = f"oneform_{k:06d}"
            manifest.add_artifact(write_csv(form.to_frame(), snapshots / f"{stem}.csv"), "snapshot")
            manifest.add_artifact(emit_plot(_heatmap_values(density.values), "heatmap",
                                            snapshots / f"density_{k:06d}.pgm"), "snapshot")

    with manifest.timed("setup"):
        solver = MomentumSolver(kind, H, spec, s.threads)
    record(0, Pi)
    with manifest.timed("solve"):
        for k in range(1, steps + 1):
            Pi = solver.step(Pi, dt)
            if k % s.output.every == 0 or k == steps:
                record(k, Pi)
    log_steps("kinetic_momentum", steps)
    manifest.append("diagnostic", name="boundary_weight_fraction", value=check_oneform_decay(Pi))

    if not contact:
        # Aynı başlangıçtan yoğunluk çözücüsüyle karşılaştırma; dt ∝ h, aynı son zaman
        levels = s.hierarchy.levels
        finest: Dict[str, Any] = {}

        def build(cells: int):
            level_spec = _grid(s, False, cells)
            level_steps = max(1, int(round(steps * cells / levels[0])))
            finest.update(momentum_density_intertwining(kind, H, _initial_oneform(s, level_spec),
                                                        dt * steps / level_steps, level_steps, s.threads))
            log_steps("kinetic_momentum", level_steps)
            log_steps("kinetic_density", level_steps)
            return finest["density_l2"], level_spec.axes[0].h

        with manifest.timed("intertwining"):
            table = residual_table(levels, build, "momentum_density_intertwining")
        for row in table.to_dict("records"):
            manifest.append("table", **row)
        manifest.add_artifact(write_csv(table, manifest.out_dir / "intertwining_table.csv"), "csv")
        gap = float(finest["density_l2"])
        order = float(table["order"].iloc[0])
        manifest.add_check("momentum_density_intertwining", gap, COMMUTING_ROUNDOFF,
                           passed=gap <= COMMUTING_ROUNDOFF or order >= MIN_CONVERGENCE_ORDER)
        if finest["cstar_density"] is not None:
            relation = abs(finest["cstar_momentum"] - finest["cstar_density"])
            scale = max(abs(finest["cstar_density"]), TINY)
            manifest.add_check("momentum_cstar", relation / scale, CSTAR_RTOL,
                               passed=relation <= s.verify.tolerance or relation <= CSTAR_RTOL * scale)


def _identity_checks(s: Scenario, manifest: RunManifest):
    """Parantez ve Liouville özdeşlikleri"""
    rng = np.random.default_rng(s.seed)
    tolerance = s.verify.tolerance
    sym = list(rng.uniform(-0.5, 0.5, size=(4, 2)))
    con = list(rng.uniform(-0.5, 0.5, size=(4, 3)))
    lift = list(rng.uniform(-1.0, 1.0, size=(4, 4)))
    F, G, H = (random_polynomial(rng, Arity.SYMPLECTIC, 1, 3, name) for name in ("F", "G", "H"))
    manifest.add_check("jacobi_symplectic", jacobi_residual("symplectic", F, G, H, sym), tolerance)
    Fc, Gc, Hc = (random_polynomial(rng, Arity.CONTACT, 1, 3, name) for name in ("F̄", "Ḡ", "H̄"))
    manifest.add_check("jacobi_contact", jacobi_residual("contact", Fc, Gc, Hc, con), tolerance)
    defect = max(abs(leibniz_defect(Fc, Gc, Hc, x)) for x in con)
    manifest.add_check("leibniz_defect", defect, LEIBNIZ_TOL)
    manifest.add_check("z_action", z_action_residual(H, sym), tolerance)
    X = random_constant_divergence_field(rng, "X")
    manifest.add_check("divergence_lift_bracket", divergence_lift_bracket_residual(X, lift), tolerance)


def _run_verify(s: Scenario, manifest: RunManifest):
    with manifest.timed("algebra_suite"):
        records = run_algebra_suite(s.seed, s.verify.instances, s.verify.tolerance, threads=s.threads)
    for r in records:
        manifest.add_check(f"homomorphism_{r['kind']}", r["residual"], r["tolerance"], r["pass"])
    manifest.add_artifact(write_csv(pd.DataFrame(records), manifest.out_dir / "algebra.csv"), "csv")
    if s.verify.identities:
        with manifest.timed("identities"):
            _identity_checks(s, manifest)


def _run_hierarchy(s: Scenario, manifest: RunManifest):
    c = s.conformal.c
    tolerance = s.verify.tolerance
    initial = s.initial
    n = len(initial.q)
    H = _hamiltonian(s, Arity.SYMPLECTIC, n)
    extended = extend_hamiltonian(H, c)
    dt, T = s.integrator.dt, s.integrator.T

    with manifest.timed("particle"):
        contact_tr = integrate(FieldKind.contact(), extended.function,
                               ContactState(initial.q, initial.p, initial.z[0]), T, dt)
        conformal_tr = integrate(FieldKind.conformal(c), H, PhaseState(initial.q, initial.p), T, dt)
    log_steps("particle", 2 * (len(conformal_tr.times) - 1))
    projected = project_trajectory(contact_tr, extended)
    manifest.add_check("particle_projection",
                       float(np.max(np.abs(projected.states - conformal_tr.states))), tolerance)
    manifest.append("diagnostic", name="z_history_residual", value=z_history_residual(contact_tr, extended))

    rng = np.random.default_rng(s.seed)
    F = random_polynomial(rng, Arity.SYMPLECTIC, n, 3, "F")
    c_f = float(rng.uniform(-1.0, 1.0))
    probes = list(rng.uniform(-1.0, 1.0, size=(8, 2 * n + 1)))
    manifest.add_check("extension_bracket", extension_bracket_residual(H, c, F, c_f, probes), tolerance)

    levels = s.hierarchy.levels
    steps0 = s.kinetic.steps or HIERARCHY_KINETIC_STEPS
    H1 = H if n == 1 else _hamiltonian(s, Arity.SYMPLECTIC, 1)
    extended1 = extend_hamiltonian(H1, c)

    def build(cells: int):
        spec = _grid(s, True, cells)
        # dt ∝ h, aynı son zaman
        steps = max(1, int(round(steps0 * cells / levels[0])))
        residual = commuting_square_residual(_initial_oneform(s, spec), extended1, dt * steps0 / steps,
                                             steps, s.threads)
        log_steps("kinetic_momentum", steps)
        return residual, spec.axes[0].h

    with manifest.timed("commuting_square"):
        table = residual_table(levels, build, "commuting_square")
    for row in table.to_dict("records"):
        manifest.append("table", **row)
    manifest.add_artifact(write_csv(table, manifest.out_dir / "hierarchy_table.csv"), "csv")
    worst = float(table["residual"].max())
    order = float(table["order"].iloc[0])
    manifest.add_check("commuting_square", worst, COMMUTING_ROUNDOFF,
                       passed=worst <= COMMUTING_ROUNDOFF or order >= MIN_CONVERGENCE_ORDER)

    with manifest.timed("kinetic_intertwining"):
        spec = _grid(s, True, levels[0])
        f = gaussian_density(spec, initial.center, initial.width)
        result = kinetic_intertwining_residual(f, extended1, dt, steps0, s.threads)
    log_steps("kinetic_density", 2 * steps0)
    # iki çözücü aynı ayrıklaştırmayı izler; fark yuvarlama birikimi, ölçek ‖f‖
    manifest.add_check("kinetic_intertwining", result["density_l2"] / max(result["density_scale"], TINY),
                       INTERTWINING_RTOL)
    relation = abs(result["cstar_contact"] + result["cstar_conformal"])
    manifest.add_check("cstar_sign_relation", relation / max(abs(result["cstar_conformal"]), TINY), CSTAR_RTOL,
                       passed=relation <= tolerance or relation <= CSTAR_RTOL * abs(result["cstar_conformal"]))


RUNNERS = {
    "particle": _run_particle,
    "kinetic_density": _run_kinetic_density,
    "kinetic_momentum": _run_kinetic_momentum,
    "verify": _run_verify,
    "hierarchy": _run_hierarchy,
}


def default_output_dir(s: Scenario) -> Path:
    if s.output.dir:
        return Path(s.output.dir)
    return Path(os.getenv("KINETIK_OUTPUT_DIR", "runs")) / s.run


def run_scenario(s: Scenario, out_dir=None) -> RunManifest:
    """
    Senaryoyu koştur

    Args:
        s: Doğrulanmış senaryo
        out_dir: Çıktı dizini (None → output.dir, KINETIK_OUTPUT_DIR, runs/<tür>)

    Returns:
        Kapatılmış RunManifest; exit_code kontrol ve iptal durumunu yansıtır
    """
    out = Path(out_dir) if out_dir is not None else default_output_dir(s)
    manifest = RunManifest(out)
    manifest.append("scenario", scenario=s.echo())
    manifest.append("host", threads=s.threads or int(os.getenv("KINETIK_THREADS", "1")),
                    out_dir=out.as_posix(), started=time.strftime("%Y-%m-%dT%H:%M:%S"))
    logger.info(f"Koşu başladı: {s.run} → {out}")

    try:
        with manifest.timed("total"):
            RUNNERS[s.run](s, manifest)
    except ABORT_ERRORS as e:
        step = getattr(e, "step", None)
        logger.error(f"Koşu iptal edildi ({type(e).__name__}): {e}")
        manifest.append("error", error=type(e).__name__, message=str(e), step=step)
    except (ValueError, OSError) as e:
        logger.error(f"Koşu iptal edildi: {e}")
        manifest.append("error", error=type(e).__name__, message=str(e), step=None)

    summary = manifest.close()
    logger.info(f"Koşu bitti: {summary['status']}, {summary['checks']} kontrol, çıkış kodu {summary['exit_code']}")
    return manifest


def _configure_logging():
    level = os.getenv("KINETIK_LOG_LEVEL", "INFO").upper()
    logging.getLogger().setLevel(getattr(logging, level, logging.INFO))


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(description="Kinetik: konformal ve kontakt Hamilton kinetik teori koşuları")
    subparsers = parser.add_subparsers(dest="command", required=True)
    helps = {
        "simulate-particle": "Tek parçacık yörüngesi",
        "simulate-kinetic": "Yoğunluk biçimli kinetik denklem",
        "simulate-momentum": "Bir-form (momentum) kinetik denklem",
        "verify-algebra": "Lie cebiri homomorfizma doğrulamaları",
        "hierarchy-check": "Kontakt → konformal hiyerarşi testleri",
    }
    for command, help_text in helps.items():
        sub = subparsers.add_parser(command, help=help_text)
        sub.add_argument("--scenario", required=True, help="Senaryo dosyası (anahtar = değer)")
        sub.add_argument("--out", help="Çıktı dizini")
        sub.add_argument("--threads", type=int, help="İş parçacığı sayısı")
        sub.add_argument("--seed", type=int, help="Rastgele tohum (u64)")
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    """Ana CLI fonksiyonu"""
    load_dotenv('.env')
    _configure_logging()
    args = build_parser().parse_args(argv)
    run = SUBCOMMANDS[args.command]

    try:
        scenario = load_scenario(args.scenario, run)
        overrides = {}
        if args.seed is not None:
            overrides["seed"] = args.seed
        if args.threads is not None:
            overrides["threads"] = args.threads
        if overrides:
            scenario = Scenario.model_validate({**scenario.model_dump(), **overrides})
    except ScenarioError as e:
        for line, key, message in e.errors:
            print(f"❌ {args.scenario}:{line}: {key or '-'}: {message}", file=sys.stderr)
        return EXIT_SCHEMA
    except ValidationError as e:
        print(f"❌ Geçersiz komut satırı değeri: {e}", file=sys.stderr)
        return EXIT_SCHEMA
    except OSError as e:
        logger.error(f"Senaryo okunamadı: {e}")
        return EXIT_ABORT

    with track_run(run):
        manifest = run_scenario(scenario, args.out)

    metrics_file = os.getenv("KINETIK_METRICS_FILE")
    if metrics_file:
        get_simulation_metrics().write_textfile(metrics_file)

    checks = manifest.checks()
    failed = [r["name"] for r in checks if not r["pass"]]
    print(f"📄 Manifesto: {manifest.path}")
    print(f"✅ {len(checks) - len(failed)}/{len(checks)} kontrol geçti")
    if failed:
        print(f"❌ Başarısız: {', '.join(failed)}")
    if manifest.aborted:
        print("💥 Koşu iptal edildi, ayrıntılar manifestoda")
    return manifest.exit_code


if __name__ == "__main__":
    exit(main())
