"""Simulation runs: build the network, propagate, and emit CSV timelines.

Floats are written with ``repr`` (shortest round-trip, locale independent) so
identical configs produce byte-identical files.
"""

from __future__ import annotations

import logging
import os
import tempfile
import warnings
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import classical, dynamics, graphs
from .config import SimulationConfig
from .errors import ConfigError, GraphError, NumericalInvariantError
from .witnesses import WitnessKind, report

__all__ = [
    "SimulationResult",
    "build_graph",
    "system_params",
    "simulate",
    "run",
    "snapshot",
    "compare_walks",
    "total_variation",
]

log = logging.getLogger(__name__)

_KIND_ORDER = (WitnessKind.FULL, WitnessKind.CAVITIES, WitnessKind.ATOMS, WitnessKind.BIPARTITE)


def fmt(x) -> str:
    x = float(x)
    if x == 0.0:
        return "0.0"  # no "-0.0"
    return repr(x)


def build_graph(config: SimulationConfig) -> graphs.NetworkGraph:
    try:
        if config.geometry == "torus":
            return graphs.build_torus(config.n1, config.n2, 1.0)
        if config.geometry == "moebius":
            return graphs.build_moebius(config.n1, config.n2, 1.0)
        return graphs.load_custom(config.graph_file, 1.0)
    except GraphError as exc:
        raise ConfigError(f"geometry: {exc}") from exc
    except OSError as exc:
        raise ConfigError(f"graph_file: {exc}") from exc


def system_params(config: SimulationConfig) -> dynamics.SystemParams:
    # kappa = 1 sets the frequency unit
    return dynamics.SystemParams(
        omega_c=config.omega_c_over_kappa,
        omega_a=config.omega_a_over_kappa,
        g=config.g,
        gamma_c=config.gamma_c_over_kappa,
        gamma_a=config.gamma_a_over_kappa,
    )


@dataclass
class SimulationResult:
    config: SimulationConfig
    graph: graphs.NetworkGraph
    states: list  # AmplitudeState per step, index = step
    rw: np.ndarray | None = None  # (steps + 1, n) classical probabilities

    @property
    def t_kappa(self) -> np.ndarray:
        return np.arange(len(self.states)) * self.config.dt_kappa

    def cavity_probs(self) -> np.ndarray:
        return np.array([np.abs(s.alpha) ** 2 for s in self.states])

    def atom_probs(self) -> np.ndarray:
        return np.array([np.abs(s.beta) ** 2 for s in self.states])

    def norm2(self) -> np.ndarray:
        return np.array([s.norm2 for s in self.states])

    def node_distribution(self, step: int) -> np.ndarray:
        s = self.states[step]
        q = np.abs(s.alpha) ** 2 + np.abs(s.beta) ** 2
        return q / q.sum()


def _initial_node(config: SimulationConfig, graph: graphs.NetworkGraph):
    node = config.initial_node
    if not (1 <= node[0] <= graph.n1 and 1 <= node[1] <= graph.n2):
        raise ConfigError(f"initial.node: {list(node)} outside the {graph.n1}x{graph.n2} grid")
    return node


def simulate(config: SimulationConfig, *, random_walk: bool | None = None) -> SimulationResult:
    """Propagate the quantum walk for ``config.steps`` steps (and the classical walk if asked)."""
    graph = build_graph(config)
    params = system_params(config)
    node = _initial_node(config, graph)
    prop = dynamics.step_propagator(params, graphs.coupling_matrix(graph), config.dt_kappa,
                                    backend=config.backend)
    state = dynamics.initial_excitation(graph, node, config.initial_kind)
    states = dynamics.propagate(state, prop, config.steps)
    prev = states[0].norm2
    for m, s in enumerate(states[1:], start=1):
        norm2 = s.norm2
        if norm2 > prev + 1e-12 or norm2 > 1.0 + dynamics.NORM_TOL:
            raise NumericalInvariantError(
                f"squared norm grew from {prev!r} to {norm2!r} at step {m}"
            )
        prev = norm2

    if random_walk is None:
        random_walk = config.wants("random_walk_timeline")
    rw = _random_walk(config, graph, node) if random_walk else None
    return SimulationResult(config, graph, states, rw)


def _random_walk(config, graph, node) -> np.ndarray:
    T = classical.rw_transition_matrix(graph, config.rw_mode, config.rw_rate, config.dt_kappa)
    dist = classical.delta_distribution(graph, node)
    out = [dist.p]
    for _ in range(config.steps):
        dist = classical.rw_step(dist, T)
        out.append(dist.p)
    return np.array(out)


def total_variation(p: np.ndarray, q: np.ndarray) -> float:
    return 0.5 * float(np.abs(np.asarray(p) - np.asarray(q)).sum())


# --- writers -----------------------------------------------------------------


def _atomic_write(path: Path, text: str) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    return path


def _rows(header, rows) -> str:
    lines = [",".join(header)]
    lines.extend(",".join(row) for row in rows)
    return "\n".join(lines) + "\n"


def quantum_timeline_csv(result: SimulationResult) -> str:
    n = result.graph.n
    header = (["step", "t_kappa"] + [f"alpha2_{k}" for k in range(n)]
              + [f"beta2_{k}" for k in range(n)] + ["norm2", "vacuum"])
    rows = []
    for m, (s, t) in enumerate(zip(result.states, result.t_kappa)):
        rho = dynamics.density_state(s)
        rows.append([str(m), fmt(t)]
                    + [fmt(v) for v in np.abs(s.alpha) ** 2]
                    + [fmt(v) for v in np.abs(s.beta) ** 2]
                    + [fmt(s.norm2), fmt(rho.vacuum_weight)])
    return _rows(header, rows)


def random_walk_timeline_csv(result: SimulationResult) -> str:
    n = result.graph.n
    header = ["step", "t_kappa"] + [f"p_{k}" for k in range(n)]
    rows = [[str(m), fmt(t)] + [fmt(v) for v in p]
            for m, (p, t) in enumerate(zip(result.rw, result.t_kappa))]
    return _rows(header, rows)


ENTANGLEMENT_HEADER = [
    "step", "t_kappa",
    "E_full", "E_cavities", "E_atoms", "E_bipartite",
    "L_full", "L_cav", "L_atoms", "L_bip",
    "gmax_full", "gmax_cav", "gmax_atoms", "gmax_bip",
]


def entanglement_rows(result: SimulationResult) -> list[dict]:
    """Per-step reports for every witness kind; a kind that is undefined is ``None``."""
    out = []
    for s in result.states:
        reports = {}
        for kind in _KIND_ORDER:
            try:
                reports[kind] = report(s, kind)
            except ValueError:
                reports[kind] = None
        out.append(reports)
    return out


def entanglement_timeline_csv(result: SimulationResult) -> str:
    rows = []
    for m, (reports, t) in enumerate(zip(entanglement_rows(result), result.t_kappa)):
        def col(attr):
            return [fmt(getattr(reports[k], attr)) if reports[k] is not None else "nan"
                    for k in _KIND_ORDER]
        rows.append([str(m), fmt(t)] + col("E") + col("expectation") + col("g_max"))
    return _rows(ENTANGLEMENT_HEADER, rows)


def undetected_intervals(result: SimulationResult) -> dict:
    """Maximal runs of steps with ``E == 0`` for each witness kind, as inclusive ``(first, last)``.

    Entering such a run after detection is a sudden death; leaving it is a sudden birth.
    Kinds that are undefined for the graph are omitted.
    """
    out = {}
    rows = entanglement_rows(result)
    for kind in _KIND_ORDER:
        if any(r[kind] is None for r in rows):
            continue
        runs, start = [], None
        for m, r in enumerate(rows):
            if r[kind].E == 0.0 and start is None:
                start = m
            elif r[kind].E != 0.0 and start is not None:
                runs.append((start, m - 1))
                start = None
        if start is not None:
            runs.append((start, len(rows) - 1))
        out[kind] = runs
    return out


def intervals_csv(result: SimulationResult) -> str:
    t = result.t_kappa
    rows = [[kind.value, str(a), str(b), fmt(t[a]), fmt(t[b])]
            for kind, runs in undetected_intervals(result).items() for a, b in runs]
    return _rows(["kind", "first_step", "last_step", "t_first", "t_last"], rows)


def snapshot_csv(result: SimulationResult, step: int) -> str:
    s = result.states[step]
    n1, n2 = result.graph.n1, result.graph.n2
    a = (np.abs(s.alpha) ** 2).reshape(n1, n2)
    b = (np.abs(s.beta) ** 2).reshape(n1, n2)
    grid = lambda g: "\n".join(",".join(fmt(v) for v in row) for row in g)
    return grid(a) + "\n\n" + grid(b) + "\n"


def comparison_csv(result: SimulationResult) -> str:
    rows = [[str(m), fmt(t), fmt(total_variation(result.node_distribution(m), p))]
            for m, (p, t) in enumerate(zip(result.rw, result.t_kappa))]
    return _rows(["step", "t_kappa", "tv_distance"], rows)


# --- entry points --------------------------------------------------------------


def run(config: SimulationConfig, out_dir) -> list[Path]:
    """Simulate and write every file requested in ``config.outputs``."""
    out_dir = Path(out_dir)
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        result = simulate(config)
    for w in caught:
        log.warning("%s", w.message)
    written = []
    if config.wants("quantum_timeline"):
        written.append(_atomic_write(out_dir / "quantum_timeline.csv", quantum_timeline_csv(result)))
    if config.wants("random_walk_timeline"):
        written.append(_atomic_write(out_dir / "random_walk_timeline.csv",
                                     random_walk_timeline_csv(result)))
    if config.wants("entanglement_timeline"):
        written.append(_atomic_write(out_dir / "entanglement_timeline.csv",
                                     entanglement_timeline_csv(result)))
        written.append(_atomic_write(out_dir / "entanglement_intervals.csv", intervals_csv(result)))
    for step in config.snapshot_steps:
        written.append(_atomic_write(out_dir / f"snapshot_{step:04d}.csv", snapshot_csv(result, step)))
    for path in written:
        log.info("wrote %s", path)
    return written


def snapshot(config: SimulationConfig, step: int, out_dir) -> Path:
    if not 0 <= step <= config.steps:
        raise ConfigError(f"step: must be in [0, {config.steps}], got {step}")
    result = simulate(config, random_walk=False)
    return _atomic_write(Path(out_dir) / f"snapshot_{step:04d}.csv", snapshot_csv(result, step))


def compare_walks(config: SimulationConfig, out_dir) -> Path:
    """Per-step total-variation distance between quantum and classical node distributions."""
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        result = simulate(config, random_walk=True)
    for w in caught:
        log.warning("%s", w.message)
    return _atomic_write(Path(out_dir) / "walk_comparison.csv", comparison_csv(result))
