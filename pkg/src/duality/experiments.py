"""Config-driven experiments: two-particle beam splitter, double-well Bose-Hubbard, random sweep.

Each runner returns a list of row dicts in deterministic order and raises
:class:`~duality.errors.InvariantViolation` when a bound fails beyond tolerance.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
import math
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import Callable, Iterable, Sequence

import jsonschema
import numpy as np

from .combinatorics import ModeOccupation, Permutation
from .errors import ConfigError, InvariantViolation
from .io import load_state
from .linalg import Propagator
from .measures import (
    distinguishability_measures,
    ideal_fidelity_lambda,
    measure_report,
    visibilities,
    wave_coherence,
    wave_purity,
)
from .dynamics import (
    BoseHubbardParams,
    bose_hubbard_hamiltonian,
    lift_single_particle,
    measure,
    povm_kpoint,
    povm_occupation,
)
from .states import (
    ExternalState,
    InternalState,
    ParticleKind,
    PreparedState,
    external_from_overlaps,
    external_state,
    random_prepared_state,
)

VERSION = "0.1.0"
SLACK = 1e-9
RESIDUAL_TOL = 1e-10

BEAM_SPLITTER = np.array([[1.0, 1.0], [1.0, -1.0]]) / math.sqrt(2)

# -- configuration ---------------------------------------------------------------

_GRID = {
    "oneOf": [
        {"type": "array", "items": {"type": "number"}, "minItems": 1},
        {
            "type": "object",
            "required": ["start", "stop", "step"],
            "additionalProperties": False,
            "properties": {
                "start": {"type": "number"},
                "stop": {"type": "number"},
                "step": {"type": "number", "exclusiveMinimum": 0},
                "unit": {"enum": ["pi"]},
            },
        },
    ]
}

_KIND = {"enum": ["boson", "fermion"]}

PARAMETER_SCHEMAS = {
    "hom": {
        "type": "object",
        "additionalProperties": False,
        "properties": {"r": _GRID, "theta": _GRID, "kind": _KIND},
    },
    "bose_hubbard": {
        "type": "object",
        "additionalProperties": False,
        "properties": {
            "gamma": _GRID,
            "t": _GRID,
            "u_over_j": _GRID,
            "tilt": _GRID,
            "hopping": {"type": "number", "exclusiveMinimum": 0},
            "povms": {
                "type": "array",
                "items": {"enum": ["O", "1P", "2P", "3P", "4P"]},
                "minItems": 1,
                "uniqueItems": True,
            },
        },
    },
    "random_sweep": {
        "type": "object",
        "additionalProperties": False,
        "properties": {
            "states": {"type": "integer", "minimum": 1},
            "mixtures": {"type": "array", "items": {"type": "integer", "minimum": 1}, "minItems": 1},
            "n_particles": {"type": "integer", "minimum": 2},
            "n_modes": {"type": "integer", "minimum": 2},
            "m": {"type": "integer", "minimum": 1},
            "kind": _KIND,
        },
    },
    "measures": {
        "type": "object",
        "required": ["state_file"],
        "additionalProperties": False,
        "properties": {"state_file": {"type": "string"}},
    },
}

CONFIG_SCHEMA = {
    "type": "object",
    "required": ["experiment"],
    "additionalProperties": False,
    "properties": {
        "experiment": {"enum": sorted(PARAMETER_SCHEMAS)},
        "seed": {"type": "integer", "minimum": 0, "maximum": 2**64 - 1},
        "threads": {"type": "integer", "minimum": 1},
        "parameters": {"type": "object"},
        "output": {
            "type": "object",
            "additionalProperties": False,
            "properties": {"path": {"type": "string"}, "format": {"enum": ["csv", "json"]}},
        },
    },
}

DEFAULTS = {
    "hom": {
        "r": {"start": 0.0, "stop": 1.0, "step": 0.05},
        "theta": {"start": 0.0, "stop": 2.0, "step": 1 / 12, "unit": "pi"},
        "kind": "boson",
    },
    "bose_hubbard": {
        "gamma": {"start": 0.0, "stop": 1.0, "step": 0.05},
        "t": {"start": 0.0, "stop": 8.0, "step": 0.1},
        "u_over_j": {"start": 0.0, "stop": 10.0, "step": 0.25},
        "tilt": [0.0],
        "hopping": 1.0,
        "povms": ["O", "1P", "2P", "3P", "4P"],
    },
    "random_sweep": {"states": 300, "mixtures": [1, 3, 10, 30], "n_particles": 3, "n_modes": 4, "m": 4,
                     "kind": "boson"},
    "measures": {},
}


def validate_config(config: dict) -> dict:
    """Schema-check ``config`` and return it with parameter defaults filled in."""
    try:
        jsonschema.validate(config, CONFIG_SCHEMA)
        params = {**DEFAULTS[config["experiment"]], **config.get("parameters", {})}
        jsonschema.validate(params, PARAMETER_SCHEMAS[config["experiment"]])
    except jsonschema.ValidationError as exc:
        where = "/".join(str(p) for p in exc.absolute_path) or "<root>"
        raise ConfigError(f"config {where}: {exc.message}") from None
    return {**config, "parameters": params, "seed": config.get("seed", 0)}


def load_config(path) -> dict:
    """Read a JSON or YAML config file (chosen by extension)."""
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    try:
        if path.suffix.lower() in (".yaml", ".yml"):
            import yaml

            config = yaml.safe_load(text)
        else:
            config = json.loads(text)
    except Exception as exc:  # parser-specific error types
        raise ConfigError(f"cannot parse config {path}: {exc}") from None
    if not isinstance(config, dict):
        raise ConfigError(f"config {path} must be a mapping")
    return config


def config_hash(config: dict) -> str:
    return hashlib.sha256(json.dumps(config, sort_keys=True).encode()).hexdigest()[:16]


def expand_grid(grid) -> np.ndarray:
    """Explicit list, or inclusive ``start:step:stop`` range optionally in units of pi."""
    if isinstance(grid, dict):
        start, stop, step = grid["start"], grid["stop"], grid["step"]
        count = int(math.floor((stop - start) / step + 1e-9)) + 1
        values = start + step * np.arange(max(count, 0))
        scale = math.pi if grid.get("unit") == "pi" else 1.0
        return values * scale
    return np.asarray(grid, dtype=float)


def _map(fn: Callable, items: Sequence, threads: int) -> list:
    if threads <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items))


def _flatten(chunks: Iterable[list]) -> list:
    return [row for chunk in chunks for row in chunk]


# -- beam splitter -------------------------------------------------------------------

HOM_REALIZATION = (
    "Target: 2 x external coherence = r exp(i theta), fermion sign included. "
    "The external state is built from the labeling overlap matrix [[1, z], [conj(z), 1]]. "
    "Two-particle internal overlaps are always real, so only theta in {0, pi} is physical; "
    "those rows are also built from the internal state cos(phi)|ab> + sin(phi)|ba> "
    "with sin(2 phi) equal to the target overlap."
)

_HOM_OCC = ModeOccupation((1, 1))


def hom_external(r: float, theta: float, kind) -> ExternalState:
    """Two-particle external state whose doubled coherence equals ``r exp(i theta)``."""
    kind = ParticleKind.parse(kind)
    sign = kind.sign(Permutation((1, 0)))
    z = sign * r * np.exp(1j * theta)
    return external_from_overlaps(_HOM_OCC, kind, [[1.0, z], [np.conj(z), 1.0]])


def hom_internal_state(overlap: float) -> InternalState:
    """``cos(phi)|ab> + sin(phi)|ba>`` whose exchange overlap equals ``overlap`` in [-1, 1]."""
    if not -1.0 <= overlap <= 1.0:
        raise ValueError(f"overlap {overlap} outside [-1, 1]")
    phi = math.asin(overlap) / 2
    return InternalState.pure({(0, 1): math.cos(phi), (1, 0): math.sin(phi)}, m=2)


def hom_physical_state(r: float, theta: float, kind) -> PreparedState | None:
    """Physical two-particle state for real targets, ``None`` otherwise."""
    if abs(math.sin(theta)) > 1e-12:
        return None
    kind = ParticleKind.parse(kind)
    sign = kind.sign(Permutation((1, 0)))
    overlap = float(np.clip(sign * r * math.cos(theta), -1.0, 1.0))
    return PreparedState(_HOM_OCC, kind, hom_internal_state(overlap))


def _hom_row(args) -> dict:
    r, theta, kind = args
    ext = hom_external(r, theta, kind)
    u = lift_single_particle(BEAM_SPLITTER, 2)
    povm = povm_occupation(2, 2)
    p = measure(ext.full(), u, povm)
    p_dist = measure(ExternalState.distinguishable(_HOM_OCC, kind).full(), u, povm)
    v_t, v_f = visibilities(p_dist, p, 2)
    d_t, d_f = distinguishability_measures(ext)
    rc = r * math.cos(theta)
    closed = {
        "p11": (1 - rc) / 2,
        "p20": (1 + rc) / 4,
        "p02": (1 + rc) / 4,
        "v_t": abs(rc),
        "v_f": 1 - math.sqrt(max(1 - rc * rc, 0.0)),
        "d_t": 1 - r,
        "d_f": math.sqrt(max(1 - r * r, 0.0)),
    }
    row = {
        "r": float(r),
        "theta": float(theta),
        "kind": ParticleKind.parse(kind).value,
        "p11": p[(1, 1)],
        "p20": p[(2, 0)],
        "p02": p[(0, 2)],
        "v_t": v_t,
        "v_f": v_f,
        "d_t": d_t,
        "d_f": d_f,
        "w_c": wave_coherence(ext),
        "w_p": wave_purity(ext),
    }
    residual = max(abs(row[k] - closed[k]) for k in closed)
    row["residual"] = residual
    physical = hom_physical_state(r, theta, kind)
    row["physical"] = physical is not None
    row["physical_residual"] = (
        float(np.max(np.abs(external_state(physical).block - ext.block))) if physical is not None else None
    )
    if residual > RESIDUAL_TOL:
        raise InvariantViolation(f"HOM closed forms off by {residual:.3e} at r={r}, theta={theta}")
    if row["physical_residual"] is not None and row["physical_residual"] > RESIDUAL_TOL:
        raise InvariantViolation(f"physical realization mismatch at r={r}, theta={theta}")
    if v_t > 1 - d_t + SLACK or v_f > 1 - d_f + SLACK:
        raise InvariantViolation(f"visibility exceeds distinguishability bound at r={r}, theta={theta}")
    return row


def run_hom(r_grid, theta_grid, kind="boson", threads: int = 1) -> list[dict]:
    """Beam-splitter statistics and measures over an (r, theta) grid with closed-form residuals."""
    for r in r_grid:
        if not 0.0 <= r <= 1.0:
            raise ConfigError(f"r = {r} outside [0, 1]")
    items = [(float(r), float(th), kind) for r in r_grid for th in theta_grid]
    return _map(_hom_row, items, threads)


# -- double well -----------------------------------------------------------------------

BH_OCCUPATION = ModeOccupation((2, 2))


def bose_hubbard_internal(gamma: float) -> InternalState:
    """Site-1 pair in ``a``; site-2 pair in ``gamma a + sqrt(1 - gamma^2) b``."""
    if not 0.0 <= gamma <= 1.0:
        raise ValueError(f"gamma = {gamma} outside [0, 1]")
    s = math.sqrt(1 - gamma * gamma)
    amps = {
        (0, 0, 0, 0): gamma * gamma,
        (0, 0, 1, 0): gamma * s,
        (0, 0, 0, 1): gamma * s,
        (0, 0, 1, 1): s * s,
    }
    return InternalState.pure(amps, m=2)


def bose_hubbard_povms(names: Sequence[str], n_particles: int = 4) -> dict:
    out = {}
    for name in names:
        out[name] = povm_occupation(2, n_particles) if name == "O" else povm_kpoint(n_particles, int(name[0]))
    return out


def _bh_chunk(args) -> list[dict]:
    tilt, u_over_j, hopping, t_grid, states, povms = args
    params = BoseHubbardParams.double_well(BH_OCCUPATION.n_particles, hopping, u_over_j * hopping, tilt)
    prop = Propagator(bose_hubbard_hamiltonian(params))
    rho_dist = ExternalState.distinguishable(BH_OCCUPATION).full()
    rows = []
    for t in t_grid:
        u = prop(t)
        dist_stats = {name: measure(rho_dist, u, m) for name, m in povms.items()}
        for gamma, rho, bound_t, bound_f in states:
            for name, povm in povms.items():
                v_t, v_f = visibilities(dist_stats[name], measure(rho, u, povm), BH_OCCUPATION.r_count)
                if v_t > bound_t + SLACK or v_f > bound_f + SLACK:
                    raise InvariantViolation(
                        f"visibility bound violated: gamma={gamma}, t={t}, U/J={u_over_j}, povm={name}"
                    )
                rows.append({
                    "tilt": float(tilt),
                    "u_over_j": float(u_over_j),
                    "t": float(t),
                    "gamma": float(gamma),
                    "povm": name,
                    "v_t": v_t,
                    "v_f": v_f,
                    "bound": bound_t,
                    "bound_f": bound_f,
                })
    return rows


def run_bose_hubbard(gamma_grid, t_grid, u_over_j_grid, tilts=(0.0,), povms=("O", "1P", "2P", "3P", "4P"),
                     hopping: float = 1.0, threads: int = 1) -> list[dict]:
    """Visibilities of the double-well evolution against the distinguishability bounds."""
    states = []
    for gamma in gamma_grid:
        p = PreparedState(BH_OCCUPATION, ParticleKind.BOSON, bose_hubbard_internal(float(gamma)))
        ext = external_state(p)
        d_t, d_f = distinguishability_measures(ext)
        states.append((float(gamma), ext.full(), 1 - d_t, 1 - d_f))
    povm_map = bose_hubbard_povms(povms, BH_OCCUPATION.n_particles)
    items = [(float(f), float(uj), hopping, list(t_grid), states, povm_map) for f in tilts for uj in u_over_j_grid]
    return _flatten(_map(_bh_chunk, items, threads))


# -- random sweep ------------------------------------------------------------------------


def _sweep_row(args) -> dict:
    k, total, l, n_modes, m, n_particles, seed, kind = args
    p = random_prepared_state(k, total, l, n_modes, m, n_particles, seed, kind)
    rep = measure_report(p)
    row = {"k": k, "l": l, "w_c2": rep.w_c**2, "w_p2": rep.w_p**2, "p_t2": rep.p_t**2, "p_f2": rep.p_f**2}
    for pk in ("p_t2", "p_f2"):
        for wk in ("w_c2", "w_p2"):
            if row[pk] + row[wk] > 1 + SLACK:
                raise InvariantViolation(f"{pk} + {wk} = {row[pk] + row[wk]:.12g} > 1 at k={k}, l={l}")
    if rep.w_c > rep.w_p + SLACK or rep.p_t > rep.p_f + SLACK:
        raise InvariantViolation(f"measure hierarchy violated at k={k}, l={l}")
    if l == 1 and abs(row["p_f2"] + row["w_p2"] - 1) > SLACK:
        raise InvariantViolation(f"pure-state saturation fails at k={k}")
    return row


def run_random_sweep(states: int = 300, mixtures=(1, 3, 10, 30), n_particles: int = 3, n_modes: int = 4,
                     m: int = 4, seed: int = 0, kind="boson", threads: int = 1) -> list[dict]:
    """Squared wave and particle measures of seeded random mixed states."""
    items = [(k, states, l, n_modes, m, n_particles, seed, kind) for l in mixtures for k in range(states)]
    return _map(_sweep_row, items, threads)


# -- single state ----------------------------------------------------------------------------


def run_measures(state_file) -> dict:
    """Every measure of one state file; raises on parse or validation failure."""
    try:
        p = load_state(state_file)
    except OSError as exc:
        raise ConfigError(f"cannot read state file {state_file}: {exc}") from None
    rep = measure_report(p)
    d_t, d_f = distinguishability_measures(p)
    ideal_ok = p.kind is ParticleKind.BOSON or p.occupation.is_singly_occupied()
    return {
        "state_file": str(state_file),
        "kind": p.kind.value,
        "occupation": list(p.occupation.counts),
        "preparation": str(p.preparation),
        "r_count": rep.r_count,
        "w_c": rep.w_c,
        "w_p": rep.w_p,
        "p_t": rep.p_t,
        "p_f": rep.p_f,
        "pairwise_f": rep.pairwise_f,
        "d_t": d_t,
        "d_f": d_f,
        "lambda": ideal_fidelity_lambda(p) if ideal_ok else None,
        "validation": "ok",
    }


# -- dispatch and output ------------------------------------------------------------------------


def run_experiment(config: dict, threads: int = 1) -> tuple[list[dict], dict]:
    """Run a validated config; returns rows and output metadata."""
    name = config["experiment"]
    params = config["parameters"]
    meta = {"version": VERSION, "config_hash": config_hash(config), "seed": config["seed"], "experiment": name}
    if name == "hom":
        rows = run_hom(expand_grid(params["r"]), expand_grid(params["theta"]), params["kind"], threads)
        meta["realization"] = HOM_REALIZATION
    elif name == "bose_hubbard":
        rows = run_bose_hubbard(
            expand_grid(params["gamma"]), expand_grid(params["t"]), expand_grid(params["u_over_j"]),
            expand_grid(params["tilt"]), params["povms"], params["hopping"], threads,
        )
    elif name == "random_sweep":
        rows = run_random_sweep(
            params["states"], params["mixtures"], params["n_particles"], params["n_modes"], params["m"],
            config["seed"], params["kind"], threads,
        )
    else:
        rows = [run_measures(params["state_file"])]
    return rows, meta


def _csv_value(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, (list, tuple)):
        return " ".join(str(v) for v in value)
    return str(value)


def format_rows(rows: list[dict], meta: dict, fmt: str) -> str:
    if fmt == "json":
        return json.dumps({"meta": meta, "rows": rows}, indent=1, ensure_ascii=False) + "\n"
    if fmt != "csv":
        raise ConfigError(f"unknown output format {fmt!r}")
    buf = io.StringIO()
    if rows:
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(list(rows[0]))
        for row in rows:
            writer.writerow([_csv_value(v) for v in row.values()])
    return buf.getvalue()
