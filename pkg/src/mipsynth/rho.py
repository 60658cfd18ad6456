"""Rolling-horizon optimization of long circuits through small resynthesis windows.

A long circuit is consumed front to back.  Each step grows a block from the
first remaining gate by closing over shared qubits inside an ever longer
prefix, stops before the block exceeds the window's gate or qubit budget,
re-synthesizes the block on its own qubits, accepts a fixed number of the
optimized gates, and pushes the remainder back onto the unprocessed tail.
Gates skipped over by a block share no qubit with it, so commuting the block
to the front never changes the circuit's unitary.
"""

from __future__ import annotations

import time
import warnings
from dataclasses import dataclass, field

import numpy as np

from .cuts import CutSelection
from .encoding import fidelity
from .errors import BackendError, ConfigError, OracleInconclusiveError
from .formulation import SynthesisProblem, synthesize
from .gates import GateSet, builtin_gate, extend_gate, gate_spec


@dataclass(frozen=True)
class NamedGate:
    """One gate of a register-level circuit: a library name on named qubits."""

    name: str
    qubits: tuple[int, ...]
    angle: float | None = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "qubits", tuple(int(q) for q in self.qubits))
        if len(set(self.qubits)) != len(self.qubits):
            raise ConfigError(f"{self.name}: repeated qubit in {self.qubits}")
        if any(q < 1 for q in self.qubits):
            raise ConfigError(f"{self.name}: qubit labels start at 1")

    @property
    def support(self) -> frozenset[int]:
        return frozenset(self.qubits)

    def matrix(self) -> np.ndarray:
        return builtin_gate(self.name, self.angle)

    def __str__(self) -> str:
        arg = f"({self.angle:g})" if self.angle is not None else ""
        return f"{self.name}{arg}[{','.join(str(q) for q in self.qubits)}]"


def circuit_qubits(circuit: list[NamedGate]) -> int:
    return max((q for g in circuit for q in g.qubits), default=0)


def circuit_unitary(circuit: list[NamedGate], num_qubits: int | None = None) -> np.ndarray:
    """Full-register unitary, gate 1 applied first."""
    nq = circuit_qubits(circuit) if num_qubits is None else num_qubits
    u = np.eye(2 ** nq, dtype=complex)
    for g in circuit:
        eg = extend_gate(gate_spec(g.name, g.qubits, angle=g.angle), nq)
        u = u @ eg.full
    return u


def gates_on_qubits_up_to(circuit: list[NamedGate], qubits: set[int],
                          prefix_len: int) -> list[int]:
    """Indices within the first prefix_len gates that touch any given qubit."""
    end = min(prefix_len, len(circuit))
    return [p for p in range(end) if circuit[p].support & qubits]


def recursive_gates_on_qubits_up_to(circuit: list[NamedGate], qubits: set[int],
                                    prefix_len: int) -> tuple[list[int], set[int]]:
    """Close the qubit set under shared-qubit contact inside a prefix.

    Gates touching the set pull their own qubits in, which may pull further
    gates, until nothing changes.  Returns the touched gate indices in
    circuit order together with the final qubit set.
    """
    q = set(qubits)
    idx = gates_on_qubits_up_to(circuit, q, prefix_len)
    while True:
        q_next: set[int] = set()
        for p in idx:
            q_next |= circuit[p].support
        if q_next == q:
            return idx, q
        q = q_next
        idx = gates_on_qubits_up_to(circuit, q, prefix_len)


def find_first_block(circuit: list[NamedGate], window_length: int,
                     max_qubits: int) -> list[int]:
    """Largest closed block from the front within the gate and qubit budgets.

    The prefix bound grows one gate at a time; the block is the last closed
    set seen before either budget broke or the input ran out.  A first gate
    that alone breaks the qubit budget (or touches no qubit) still makes a
    single-gate block, so the caller always progresses.
    """
    if not circuit:
        return []
    q = set(circuit[0].support)
    best: list[int] = []
    i = 1
    while True:
        idx, q = recursive_gates_on_qubits_up_to(circuit, q, i)
        if i > len(circuit) or len(idx) > window_length or len(q) > max_qubits:
            break
        if len(idx) == window_length:
            return idx
        best = idx
        i += 1
    if not best:
        return [0]
    return best


def retarget(circuit: list[NamedGate], block: list[int]) -> list[NamedGate]:
    """Remaining circuit after removing the block's gate instances."""
    drop = set(block)
    return [g for p, g in enumerate(circuit) if p not in drop]


def retarget_unitary(target: np.ndarray, accepted: list[NamedGate],
                     num_qubits: int) -> np.ndarray:
    """Residual unitary once an accepted prefix is peeled off the target.

    With the prefix A applied first, the remainder must realize A^dagger T.
    Available for matrix-level peeling; the gate-list pipeline removes block
    instances instead and never changes the target.
    """
    a = circuit_unitary(accepted, num_qubits)
    return a.conj().T @ np.asarray(target, dtype=complex)


def window_gate_set(prototypes, num_qubits: int) -> GateSet:
    """Instantiate library prototypes on every qubit assignment of a window.

    Prototypes are builtin names, or (name, angle) pairs for angled gates.
    One-qubit prototypes land on each wire, two-qubit ones on each ordered
    pair; exact duplicate matrices (symmetric gates) are emitted once.
    """
    import itertools

    specs = []
    for proto in prototypes:
        name, angle = proto if isinstance(proto, tuple) else (proto, None)
        base = builtin_gate(name, angle)
        arity = int(round(np.log2(base.shape[0])))
        if arity > num_qubits:
            continue
        for qs in itertools.permutations(range(1, num_qubits + 1), arity):
            specs.append(gate_spec(name, qs, angle=angle))

    def key(sp):
        return (len(sp.qubits), sp.name, sp.qubits)

    # stable, readable ordering: 1-qubit gates first, then by name and wires
    ordered = sorted(specs, key=key)
    # dedupe is on full extended matrices too: symmetric 2-qubit gates
    eg = [extend_gate(sp, num_qubits) for sp in ordered]
    kept, full_seen = [], []
    for g in eg:
        if any(np.abs(f - g.full).max() <= 1e-12 for f in full_seen):
            continue
        full_seen.append(g.full)
        kept.append(g.spec)
    return GateSet.from_specs(num_qubits, kept, add_identity=True)


@dataclass
class RhoConfig:
    """Window budgets and the resynthesis engine for rolling-horizon runs."""

    window_length: int = 10
    accept_window: int = 5
    max_qubits: int = 3
    window_gates: tuple = ("CNOT", "H", "S")
    backend: str = "oracle"
    time_limit_per_window: float | None = None
    passes: int = 4
    cuts: CutSelection = field(default_factory=CutSelection)
    verify: bool = True
    verify_max_qubits: int = 9

    def __post_init__(self) -> None:
        if self.window_length < 1:
            raise ConfigError("window_length must be >= 1")
        if self.accept_window < 1:
            raise ConfigError("accept_window must be >= 1")
        if self.max_qubits < 1:
            raise ConfigError("max_qubits must be >= 1")
        if self.passes < 1:
            raise ConfigError("passes must be >= 1")


@dataclass
class RhoResult:
    circuit: list[NamedGate]
    input_length: int
    pass_lengths: list[int]
    fidelity_to_input: float | None
    num_qubits: int
    seconds: float
    windows_optimized: int = 0
    windows_passed_through: int = 0
    window_log: list = field(default_factory=list)


def _optimize_window(block: list[NamedGate], cfg: RhoConfig) -> list[NamedGate] | None:
    """Resynthesize one block on its own qubits; None means keep it as is."""
    wires = sorted({q for g in block for q in g.qubits})
    local = {q: x + 1 for x, q in enumerate(wires)}
    k = len(wires)
    target = np.eye(2 ** k, dtype=complex)
    for g in block:
        eg = extend_gate(gate_spec(g.name, tuple(local[q] for q in g.qubits),
                                   angle=g.angle), k)
        target = target @ eg.full
    gs = window_gate_set(cfg.window_gates, k)

    m = len(block)
    problem = SynthesisProblem(target=target, gate_set=gs, P=m,
                               objective="weighted_gate_count",
                               phase_mode="exact", cuts=cfg.cuts)
    try:
        with warnings.catch_warnings():
            warnings.filterwarnings("ignore", message=".*normalized to unit determinant.*")
            result = synthesize(problem, backend=cfg.backend,
                                time_limit=cfg.time_limit_per_window)
    except (OracleInconclusiveError, BackendError) as exc:
        warnings.warn(f"window resynthesis gave up ({exc}); keeping the original "
                      f"{m}-gate block", stacklevel=2)
        return None
    if not result.feasible:
        if result.status == "time_limit":
            warnings.warn(f"window resynthesis timed out; keeping the original "
                          f"{m}-gate block", stacklevel=2)
        return None
    out = []
    for spec in result.sequence:
        out.append(NamedGate(name=spec.name,
                             qubits=tuple(wires[q - 1] for q in spec.qubits),
                             angle=spec.angle))
    return out


def rolling_horizon_pass(circuit: list[NamedGate], cfg: RhoConfig,
                         stats: dict | None = None,
                         pass_index: int = 0) -> list[NamedGate]:
    """One front-to-back sweep of block extraction and resynthesis."""
    t = list(circuit)
    out: list[NamedGate] = []

    def log(entry: dict) -> None:
        if stats is not None:
            entry["pass"] = pass_index
            stats.setdefault("windows", []).append(entry)

    while t:
        idx = find_first_block(t, cfg.window_length, cfg.max_qubits)
        block = [t[p] for p in idx]
        t = retarget(t, idx)
        block_qubits = {q for g in block for q in g.qubits}
        entry = {"positions": list(idx), "qubits": sorted(block_qubits),
                 "gates_in": len(block)}
        if len(block_qubits) <= 1 or len(block) == 1:
            log({**entry, "action": "skipped", "gates_out": len(block)})
            out.extend(block)
            continue
        optimized = _optimize_window(block, cfg)
        if optimized is None:
            if stats is not None:
                stats["passed_through"] = stats.get("passed_through", 0) + 1
            log({**entry, "action": "kept", "gates_out": len(block)})
            out.extend(block)
            continue
        if stats is not None:
            stats["optimized"] = stats.get("optimized", 0) + 1
        log({**entry, "action": "optimized", "gates_out": len(optimized),
             "saved": len(block) - len(optimized)})
        if not t:
            out.extend(optimized)
        elif len(optimized) >= cfg.accept_window:
            out.extend(optimized[:cfg.accept_window])
            t = optimized[cfg.accept_window:] + t
        else:
            out.extend(optimized)
    return out


def rolling_horizon(circuit: list[NamedGate], cfg: RhoConfig | None = None) -> RhoResult:
    """Multi-pass rolling-horizon compression of a circuit.

    Passes repeat on the previous output until one fails to shorten it or
    the pass budget runs out.  When the register is small enough the final
    circuit is checked against the input up to a global phase.
    """
    cfg = cfg or RhoConfig()
    t0 = time.perf_counter()
    current = list(circuit)
    lengths = [len(current)]
    stats: dict = {}
    for k in range(cfg.passes):
        new = rolling_horizon_pass(current, cfg, stats, pass_index=k + 1)
        lengths.append(len(new))
        improved = len(new) < len(current)
        current = new
        if not improved:
            break
    nq = max(circuit_qubits(circuit), circuit_qubits(current))
    fid = None
    if cfg.verify and nq <= cfg.verify_max_qubits and circuit:
        u_in = circuit_unitary(circuit, nq)
        u_out = circuit_unitary(current, nq)
        fid = fidelity(u_out, u_in)
        if fid < 1 - 1e-9:
            raise BackendError(
                f"rolling horizon changed the circuit's unitary: fidelity {fid!r}")
    return RhoResult(circuit=current, input_length=len(circuit),
                     pass_lengths=lengths, fidelity_to_input=fid, num_qubits=nq,
                     seconds=time.perf_counter() - t0,
                     windows_optimized=stats.get("optimized", 0),
                     windows_passed_through=stats.get("passed_through", 0),
                     window_log=stats.get("windows", []))


def parity_ladder_zzz(theta: float, qubits: tuple[int, int, int]) -> list[NamedGate]:
    """Three-body parity phase: CNOTs fold the parity onto the last wire,
    a Z rotation applies the phase, and the CNOTs unfold."""
    a, b, c = qubits
    return [
        NamedGate("CNOT", (a, c)),
        NamedGate("CNOT", (b, c)),
        NamedGate("RZ", (c,), angle=theta),
        NamedGate("CNOT", (b, c)),
        NamedGate("CNOT", (a, c)),
    ]


__all__ = [
    "NamedGate", "RhoConfig", "RhoResult",
    "circuit_qubits", "circuit_unitary",
    "gates_on_qubits_up_to", "recursive_gates_on_qubits_up_to",
    "find_first_block", "retarget", "retarget_unitary", "window_gate_set",
    "rolling_horizon_pass", "rolling_horizon", "parity_ladder_zzz",
]
