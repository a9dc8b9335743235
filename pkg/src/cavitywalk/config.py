"""Simulation configuration: JSON ingestion and field-level validation.

All frequencies and rates are dimensionless ratios over the cavity coupling
``kappa``; times are reported as ``t * kappa``.
"""

from __future__ import annotations

import cmath
import json
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

from .errors import ConfigError

__all__ = ["SimulationConfig", "load_config", "bundled_configs", "OUTPUT_KINDS"]

OUTPUT_KINDS = ("quantum_timeline", "random_walk_timeline", "entanglement_timeline", "snapshot")
GEOMETRIES = ("torus", "moebius", "custom")


@dataclass(frozen=True)
class SimulationConfig:
    name: str
    geometry: str
    n1: int
    n2: int
    omega_c_over_kappa: float
    omega_a_over_kappa: float
    g_over_kappa: float
    g_phase: float = 0.0
    gamma_c_over_kappa: float = 0.0
    gamma_a_over_kappa: float = 0.0
    dt_kappa: float = 1.0
    steps: int = 100
    initial_node: tuple[int, int] = (1, 1)
    initial_kind: str = "cavity"
    outputs: tuple = ("quantum_timeline",)
    snapshot_steps: tuple[int, ...] = ()
    rw_mode: str = "discrete"
    rw_rate: float = 1.0
    backend: str = "closed_form"
    seed: int = 0
    graph_file: Path | None = None
    source: Path | None = field(default=None, compare=False)

    @property
    def g(self) -> complex:
        return cmath.rect(self.g_over_kappa, self.g_phase)

    def wants(self, output: str) -> bool:
        return output in self.outputs

    @classmethod
    def from_dict(cls, data: dict, source: Path | None = None) -> "SimulationConfig":
        errors: list[str] = []
        if not isinstance(data, dict):
            raise ConfigError("config root must be a JSON object")

        def get(d, key, kind, default=None, required=False, prefix=""):
            if key not in d:
                if required:
                    errors.append(f"{prefix}{key}: required")
                return default
            value = d[key]
            if kind is float and isinstance(value, int) and not isinstance(value, bool):
                value = float(value)
            if kind is float and not isinstance(value, float):
                errors.append(f"{prefix}{key}: expected a number, got {value!r}")
                return default
            if kind is int and (not isinstance(value, int) or isinstance(value, bool)):
                errors.append(f"{prefix}{key}: expected an integer, got {value!r}")
                return default
            if kind is str and not isinstance(value, str):
                errors.append(f"{prefix}{key}: expected a string, got {value!r}")
                return default
            return value

        known = {"name", "geometry", "graph_file", "n1", "n2", "params", "dt_kappa", "steps",
                 "initial", "outputs", "rw_mode", "rw_rate", "backend", "seed"}
        for key in sorted(set(data) - known):
            errors.append(f"{key}: unknown field")

        default_name = source.stem if source is not None else "simulation"
        name = get(data, "name", str, default_name)
        geometry = get(data, "geometry", str, "torus")
        if geometry not in GEOMETRIES:
            errors.append(f"geometry: must be one of {GEOMETRIES}, got {geometry!r}")

        graph_file = None
        if geometry == "custom":
            gf = get(data, "graph_file", str, required=True)
            if gf is not None:
                graph_file = Path(gf)
                if not graph_file.is_absolute() and source is not None:
                    graph_file = source.parent / graph_file
        n1 = get(data, "n1", int, 5, required=geometry != "custom")
        n2 = get(data, "n2", int, 5, required=geometry != "custom")

        params = data.get("params", {})
        if not isinstance(params, dict):
            errors.append("params: expected an object")
            params = {}
        pfx = "params."
        known_params = {"omega_c_over_kappa", "omega_a_over_kappa", "g_over_kappa", "g_phase",
                        "gamma_c_over_kappa", "gamma_a_over_kappa"}
        for key in sorted(set(params) - known_params):
            errors.append(f"{pfx}{key}: unknown field")
        omega_c = get(params, "omega_c_over_kappa", float, 0.0, required=True, prefix=pfx)
        omega_a = get(params, "omega_a_over_kappa", float, 0.0, required=True, prefix=pfx)
        g_mag = get(params, "g_over_kappa", float, 0.0, required=True, prefix=pfx)
        g_phase = get(params, "g_phase", float, 0.0, prefix=pfx)
        gamma_c = get(params, "gamma_c_over_kappa", float, 0.0, prefix=pfx)
        gamma_a = get(params, "gamma_a_over_kappa", float, 0.0, prefix=pfx)
        for label, value in (("gamma_c_over_kappa", gamma_c), ("gamma_a_over_kappa", gamma_a),
                             ("g_over_kappa", g_mag)):
            if value is not None and value < 0:
                errors.append(f"{pfx}{label}: must be >= 0, got {value}")

        dt_kappa = get(data, "dt_kappa", float, 1.0)
        if dt_kappa is not None and not dt_kappa > 0:
            errors.append(f"dt_kappa: must be > 0, got {dt_kappa}")
        steps = get(data, "steps", int, 100)
        if steps is not None and steps < 1:
            errors.append(f"steps: must be >= 1, got {steps}")

        initial = data.get("initial", {})
        node, kind = (1, 1), "cavity"
        if not isinstance(initial, dict):
            errors.append("initial: expected an object")
        else:
            raw_node = initial.get("node", [1, 1])
            if (not isinstance(raw_node, (list, tuple)) or len(raw_node) != 2
                    or not all(isinstance(v, int) and not isinstance(v, bool) for v in raw_node)):
                errors.append(f"initial.node: expected [i1, i2] integers, got {raw_node!r}")
            else:
                node = (raw_node[0], raw_node[1])
                if geometry != "custom" and isinstance(n1, int) and isinstance(n2, int):
                    if not (1 <= node[0] <= n1 and 1 <= node[1] <= n2):
                        errors.append(f"initial.node: {list(node)} outside the {n1}x{n2} grid")
            kind = get(initial, "kind", str, "cavity", prefix="initial.")
            if kind not in ("cavity", "atom"):
                errors.append(f"initial.kind: must be 'cavity' or 'atom', got {kind!r}")

        outputs: list[str] = []
        snapshots: list[int] = []
        raw_outputs = data.get("outputs", ["quantum_timeline"])
        if not isinstance(raw_outputs, list):
            errors.append("outputs: expected a list")
            raw_outputs = []
        for i, item in enumerate(raw_outputs):
            if isinstance(item, str) and item in OUTPUT_KINDS and item != "snapshot":
                outputs.append(item)
            elif isinstance(item, dict) and set(item) == {"snapshot"}:
                s = item["snapshot"]
                if not isinstance(s, int) or isinstance(s, bool) or s < 0:
                    errors.append(f"outputs[{i}].snapshot: expected a step >= 0, got {s!r}")
                elif steps is not None and s > steps:
                    errors.append(f"outputs[{i}].snapshot: step {s} beyond steps={steps}")
                else:
                    snapshots.append(s)
            else:
                errors.append(f"outputs[{i}]: unrecognised output {item!r}")

        rw_mode = get(data, "rw_mode", str, "discrete")
        if rw_mode not in ("discrete", "continuous"):
            errors.append(f"rw_mode: must be 'discrete' or 'continuous', got {rw_mode!r}")
        rw_rate = get(data, "rw_rate", float, 1.0)
        if rw_rate is not None and not rw_rate > 0:
            errors.append(f"rw_rate: must be > 0, got {rw_rate}")
        backend = get(data, "backend", str, "closed_form")
        if backend not in ("closed_form", "generic"):
            errors.append(f"backend: must be 'closed_form' or 'generic', got {backend!r}")
        seed = get(data, "seed", int, 0)

        if errors:
            raise ConfigError(errors)
        return cls(
            name=name, geometry=geometry, n1=n1, n2=n2,
            omega_c_over_kappa=omega_c, omega_a_over_kappa=omega_a,
            g_over_kappa=g_mag, g_phase=g_phase,
            gamma_c_over_kappa=gamma_c, gamma_a_over_kappa=gamma_a,
            dt_kappa=dt_kappa, steps=steps,
            initial_node=node, initial_kind=kind,
            outputs=tuple(dict.fromkeys(outputs)), snapshot_steps=tuple(sorted(set(snapshots))),
            rw_mode=rw_mode, rw_rate=rw_rate, backend=backend, seed=seed,
            graph_file=graph_file, source=source,
        )


def bundled_configs() -> list[str]:
    root = resources.files("cavitywalk") / "configs"
    return sorted(p.name[:-5] for p in root.iterdir() if p.name.endswith(".json"))


def load_config(ref) -> SimulationConfig:
    """Load a config from a JSON file path or the name of a bundled config."""
    path = Path(ref)
    if path.is_file():
        text, source = path.read_text(encoding="utf-8"), path
    else:
        name = path.name[:-5] if path.name.endswith(".json") else path.name
        res = resources.files("cavitywalk") / "configs" / f"{name}.json"
        if path.parent != Path(".") or not res.is_file():
            raise ConfigError(
                f"config {str(ref)!r} is neither a file nor a bundled config "
                f"({', '.join(bundled_configs())})"
            )
        text, source = res.read_text(encoding="utf-8"), Path(str(res))
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{source}: invalid JSON: {exc}") from exc
    return SimulationConfig.from_dict(data, source=source)
