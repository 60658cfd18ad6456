"""Synthesis model: gate selection, cumulative products, targets, objectives.

A circuit of at most P gates is encoded by one-hot binaries z[g,p]; the
cumulative product lives in the real block encoding where it is linear up to
binary-times-continuous products, which McCormick rows make exact.  Five
objectives share that base: weighted gate count, depth, and three
approximate-compilation objectives that drop the target equality.

Extraction never trusts the solver: the gate sequence is re-multiplied in
complex arithmetic and the claimed fidelity is checked against the recomputed
one before a result is returned.
"""

from __future__ import annotations

import time
import warnings
from dataclasses import dataclass, field, replace

import numpy as np

from . import oracle as oracle_mod
from .cuts import CutSelection, apply_cuts
from .encoding import (alpha_beta, encode_real, fidelity, require_unitary,
                       su_normalize)
from .errors import ConfigError, DimensionError, ModelIntegrityError
from .gates import GateSet, GateSpec
from .mip import MipModel
from .solvers import Solution, get_backend, is_oracle_backend

OBJECTIVES = ("weighted_gate_count", "depth", "linearized_fidelity",
              "frobenius_oa", "exact_fidelity")
PHASE_MODES = ("exact", "global_phase")
#: Objectives that constrain the final product to the target.
TARGET_OBJECTIVES = ("weighted_gate_count", "depth")
#: Allowed |recomputed - claimed| fidelity discrepancy before hard failure.
CLAIM_TOL = 1e-6


@dataclass
class SynthesisProblem:
    """One synthesis instance: target, library, budgets, objective, options."""

    target: np.ndarray
    gate_set: GateSet
    P: int
    D: int | None = None
    objective: str = "weighted_gate_count"
    weights: np.ndarray | None = None
    phase_mode: str = "exact"
    cuts: CutSelection = field(default_factory=CutSelection)
    epsilon: float = 0.125
    K: int = 5

    def __post_init__(self) -> None:
        self.target = np.asarray(self.target, dtype=complex)
        require_unitary(self.target)
        if self.target.shape != (self.gate_set.dim, self.gate_set.dim):
            raise DimensionError(
                f"target is {self.target.shape[0]}x{self.target.shape[1]} but the "
                f"gate set acts on dimension {self.gate_set.dim}")
        if self.P < 1:
            raise ConfigError("P must be >= 1")
        if self.D is None:
            self.D = self.P
        if not 1 <= self.D <= self.P:
            raise ConfigError(f"D must be in [1, P], got D={self.D}, P={self.P}")
        if self.objective not in OBJECTIVES:
            raise ConfigError(f"objective must be one of {OBJECTIVES}, "
                              f"got {self.objective!r}")
        if self.phase_mode not in PHASE_MODES:
            raise ConfigError(f"phase_mode must be one of {PHASE_MODES}, "
                              f"got {self.phase_mode!r}")
        w = np.ones(len(self.gate_set)) if self.weights is None else np.asarray(
            self.weights, dtype=float).copy()
        if w.shape != (len(self.gate_set),):
            raise ConfigError(f"weights needs one entry per gate "
                              f"({len(self.gate_set)}), got shape {w.shape}")
        if np.any(w < 0):
            raise ConfigError("gate weights must be non-negative")
        w[self.gate_set.identity_index] = 0.0
        self.weights = w
        if not 0.0 < self.epsilon <= 1.0:
            raise ConfigError(f"epsilon must lie in (0, 1], got {self.epsilon}")
        if self.K < 2:
            raise ConfigError(f"K must be >= 2, got {self.K}")
        # order-sensitive cuts cannot survive a depth objective
        if self.objective == "depth" and (self.cuts.commuting_pairs
                                          or self.cuts.equivalent_patterns):
            warnings.warn("commuting/equivalent-pattern cuts are invalid under the "
                          "depth objective and were disabled", stacklevel=2)
            self.cuts = replace(self.cuts, commuting_pairs=False,
                                equivalent_patterns=False)

    @property
    def num_qubits(self) -> int:
        return self.gate_set.num_qubits

    def targets_equality(self) -> bool:
        return self.objective in TARGET_OBJECTIVES


@dataclass
class ModelHandles:
    """Variable ids of one built model, by meaning."""

    z: np.ndarray  # (|G|, P) binaries
    ghat: np.ndarray  # (P, 2n, 2n) cumulative-product entries
    v: np.ndarray | None  # (P+1, |G|, 2n, 2n) McCormick blocks, rows p >= 2
    real_gates: np.ndarray  # (|G|, 2n, 2n) constant R(g) blocks (effective gates)
    eff_target: np.ndarray  # complex target the model constrains against
    eff_gate_mats: np.ndarray  # (|G|, n, n) complex effective gate matrices
    su_applied: bool
    b: np.ndarray | None = None  # (P, D) depth binaries
    r: int | None = None
    s: int | None = None
    alpha: int | None = None
    beta: int | None = None
    e: np.ndarray | None = None  # (2n, 2n) deviation entries
    ehat: np.ndarray | None = None  # (2n, 2n) squared-deviation estimators


@dataclass
class SynthesisResult:
    """Verified outcome of one synthesis run."""

    status: str  # optimal | feasible | infeasible | time_limit
    sequence: list[GateSpec]
    gate_indices: list[int]
    objective_value: float | None
    realized_unitary: np.ndarray | None
    fidelity_to_target: float | None
    alpha: float | None = None
    beta: float | None = None
    error_fro_sq: float | None = None
    depth_schedule: dict[int, int] | None = None
    depth: int | None = None
    certificate: dict = field(default_factory=dict)
    solve_seconds: float = 0.0
    phase_factor: complex | None = None  # realized global phase in GP mode

    @property
    def feasible(self) -> bool:
        return self.status in ("optimal", "feasible")


def effective_instance(problem: SynthesisProblem) -> tuple[np.ndarray, np.ndarray, bool]:
    """Target and gate matrices the model actually constrains.

    Exact-phase target matching is only meaningful inside the special unitary
    group, so both sides are determinant-normalized there; every other mode
    uses the inputs as given.
    """
    mats = problem.gate_set.matrices()
    if problem.phase_mode == "exact" and problem.targets_equality():
        eff_t = su_normalize(problem.target)
        eff_g = np.stack([su_normalize(m) for m in mats])
        changed = (np.abs(eff_t - problem.target).max() > 1e-12
                   or np.abs(eff_g - mats).max() > 1e-12)
        if changed:
            warnings.warn("exact phase mode: target and gates were normalized to "
                          "unit determinant", stacklevel=3)
        return eff_t, eff_g, True
    return problem.target.copy(), mats, False


def build_base(problem: SynthesisProblem) -> tuple[MipModel, ModelHandles]:
    """One-hot selection plus the linearized cumulative-product chain."""
    gs = problem.gate_set
    P, G = problem.P, len(gs)
    eff_t, eff_g, su_applied = effective_instance(problem)
    rg = np.stack([encode_real(m) for m in eff_g])
    m2 = rg.shape[1]  # real dimension 2*2^Q
    model = MipModel(name=f"synth_{problem.objective}_Q{gs.num_qubits}_P{P}")

    z = np.empty((G, P), dtype=np.int64)
    for p in range(P):
        for g in range(G):
            z[g, p] = model.add_binary(f"z({gs.label(g)},{p + 1})")
    for p in range(P):
        model.add_constr({int(z[g, p]): 1.0 for g in range(G)}, "==", 1.0,
                         family="one_hot")

    ghat = np.empty((P, m2, m2), dtype=np.int64)
    for p in range(P):
        for i in range(m2):
            for j in range(m2):
                ghat[p, i, j] = model.add_var(f"Ghat({p + 1},{i},{j})", -1.0, 1.0)

    # position 1: the cumulative product is the selected gate itself
    for i in range(m2):
        for j in range(m2):
            coefs = {int(ghat[0, i, j]): -1.0}
            for g in range(G):
                c = rg[g, i, j]
                if abs(c) > 1e-14:
                    coefs[int(z[g, 0])] = coefs.get(int(z[g, 0]), 0.0) + c
            model.add_constr(coefs, "==", 0.0, family="cumulative")

    v = None
    if P > 1:
        v = np.empty((P + 1, G, m2, m2), dtype=np.int64)
        for p in range(2, P + 1):
            for g in range(G):
                for i in range(m2):
                    for k in range(m2):
                        vid = model.add_var(f"V({p},{gs.label(g)},{i},{k})", -1.0, 1.0)
                        v[p, g, i, k] = vid
                        model.add_mccormick(int(vid), int(ghat[p - 2, i, k]),
                                            int(z[g, p - 1]), family="mccormick")
            for i in range(m2):
                for j in range(m2):
                    coefs = {int(ghat[p - 1, i, j]): -1.0}
                    for g in range(G):
                        col = rg[g, :, j]
                        for k in range(m2):
                            c = col[k]
                            if abs(c) > 1e-14:
                                key = int(v[p, g, i, k])
                                coefs[key] = coefs.get(key, 0.0) + c
                    model.add_constr(coefs, "==", 0.0, family="cumulative")

    handles = ModelHandles(z=z, ghat=ghat, v=v, real_gates=rg, eff_target=eff_t,
                           eff_gate_mats=eff_g, su_applied=su_applied)
    return model, handles


def add_target(problem: SynthesisProblem, model: MipModel,
               handles: ModelHandles) -> None:
    """Pin the final cumulative product to the target, exactly or up to phase."""
    rt = encode_real(handles.eff_target)
    rti = encode_real(1j * handles.eff_target)
    m2 = rt.shape[0]
    gP = handles.ghat[problem.P - 1]
    if problem.phase_mode == "exact":
        for i in range(m2):
            for j in range(m2):
                model.add_constr({int(gP[i, j]): 1.0}, "==", float(rt[i, j]),
                                 family="target")
        return
    handles.r = model.add_var("r", -1.0, 1.0)
    handles.s = model.add_var("s", -1.0, 1.0)
    for i in range(m2):
        for j in range(m2):
            coefs = {int(gP[i, j]): 1.0}
            if abs(rt[i, j]) > 1e-14:
                coefs[handles.r] = -float(rt[i, j])
            if abs(rti[i, j]) > 1e-14:
                coefs[handles.s] = -float(rti[i, j])
            model.add_constr(coefs, "==", 0.0, family="target")


def add_objective_gate_count(problem: SynthesisProblem, model: MipModel,
                             handles: ModelHandles) -> None:
    coefs: dict[int, float] = {}
    for g in problem.gate_set.non_identity_indices():
        w = float(problem.weights[g])
        if w == 0.0:
            continue
        for p in range(problem.P):
            coefs[int(handles.z[g, p])] = w
    model.set_objective(coefs, "min")


def add_depth_scheduling(problem: SynthesisProblem, model: MipModel,
                         handles: ModelHandles) -> None:
    """Depth binaries, monotone layering, per-qubit disjointness, min final depth."""
    gs = problem.gate_set
    P, D = problem.P, int(problem.D)
    b = np.empty((P, D), dtype=np.int64)
    for p in range(P):
        for d in range(D):
            b[p, d] = model.add_binary(f"b({p + 1},{d + 1})")
    handles.b = b
    for p in range(P):
        model.add_constr({int(b[p, d]): 1.0 for d in range(D)}, "==", 1.0,
                         family="depth")
    model.fix_var(int(b[0, 0]), 1.0)
    for p in range(1, P):
        coefs: dict[int, float] = {}
        for d in range(D):
            coefs[int(b[p, d])] = float(d + 1)
            coefs[int(b[p - 1, d])] = coefs.get(int(b[p - 1, d]), 0.0) - float(d + 1)
        model.add_constr(coefs, ">=", 0.0, family="depth")
        model.add_constr(coefs, "<=", 1.0, family="depth")

    # w[g,p,d] = z[g,p] * b[p,d] for gates that occupy qubits
    prod: dict[tuple[int, int, int], int] = {}
    for g in gs.non_identity_indices():
        if not gs[g].support:
            continue
        for p in range(P):
            for d in range(D):
                w = model.add_binary(f"zb({gs.label(g)},{p + 1},{d + 1})")
                model.add_product_binary(w, int(handles.z[g, p]), int(b[p, d]),
                                         family="depth")
                prod[(g, p, d)] = w
    for q in range(1, gs.num_qubits + 1):
        touching = [g for g in gs.non_identity_indices() if q in gs[g].support]
        if not touching:
            continue
        for d in range(D):
            coefs = {prod[(g, p, d)]: 1.0 for g in touching for p in range(P)}
            model.add_constr(coefs, "<=", 1.0, family="depth")
    model.set_objective({int(b[P - 1, d]): float(d + 1) for d in range(D)}, "min")


def _alpha_coefs(handles: ModelHandles, P: int) -> dict[int, float]:
    rt = encode_real(handles.eff_target)
    m2 = rt.shape[0]
    scale = 1.0 / m2  # 1 / 2^(Q+1)
    gP = handles.ghat[P - 1]
    return {int(gP[i, j]): float(rt[i, j]) * scale
            for i in range(m2) for j in range(m2) if abs(rt[i, j]) > 1e-14}


def _beta_coefs(handles: ModelHandles, P: int) -> dict[int, float]:
    rt = encode_real(handles.eff_target)
    m2 = rt.shape[0]
    jn = np.kron(np.eye(m2 // 2), np.array([[0.0, -1.0], [1.0, 0.0]]))
    coef = rt @ jn  # beta = (1/2^(Q+1)) * sum (R(T) J)_ij * Ghat_ij
    scale = 1.0 / m2
    gP = handles.ghat[P - 1]
    return {int(gP[i, j]): float(coef[i, j]) * scale
            for i in range(m2) for j in range(m2) if abs(coef[i, j]) > 1e-14}


def add_objective_linearized_fidelity(problem: SynthesisProblem, model: MipModel,
                                      handles: ModelHandles) -> None:
    a = model.add_var("alpha", -1.0, 1.0)
    handles.alpha = a
    coefs = _alpha_coefs(handles, problem.P)
    coefs[a] = coefs.get(a, 0.0) - 1.0
    model.add_constr(coefs, "==", 0.0, family="objective")
    model.set_objective({a: 1.0}, "max")


def add_objective_exact_fidelity(problem: SynthesisProblem, model: MipModel,
                                 handles: ModelHandles) -> None:
    a = model.add_var("alpha", -1.0, 1.0)
    bv = model.add_var("beta", -1.0, 1.0)
    handles.alpha, handles.beta = a, bv
    ca = _alpha_coefs(handles, problem.P)
    ca[a] = ca.get(a, 0.0) - 1.0
    model.add_constr(ca, "==", 0.0, family="objective")
    cb = _beta_coefs(handles, problem.P)
    cb[bv] = cb.get(bv, 0.0) - 1.0
    model.add_constr(cb, "==", 0.0, family="objective")
    model.set_objective({}, "max", quad=[(a, a, 1.0), (bv, bv, 1.0)])


def add_objective_frobenius_oa(problem: SynthesisProblem, model: MipModel,
                               handles: ModelHandles) -> None:
    """Entrywise deviation box plus tangent under-estimators of its square."""
    eps, K = float(problem.epsilon), int(problem.K)
    rt = encode_real(handles.eff_target)
    m2 = rt.shape[0]
    gP = handles.ghat[problem.P - 1]
    e = np.empty((m2, m2), dtype=np.int64)
    ehat = np.empty((m2, m2), dtype=np.int64)
    grid = np.linspace(-eps, eps, K)
    for i in range(m2):
        for j in range(m2):
            e[i, j] = model.add_var(f"E({i},{j})", -eps, eps)
            ehat[i, j] = model.add_var(f"Ehat({i},{j})", -eps * eps, eps * eps)
            model.add_constr({int(gP[i, j]): 1.0, int(e[i, j]): -1.0}, "==",
                             float(rt[i, j]), family="objective")
            for a_k in grid:
                model.add_constr({int(ehat[i, j]): 1.0, int(e[i, j]): -2.0 * a_k},
                                 ">=", -(a_k * a_k), family="objective")
    handles.e, handles.ehat = e, ehat
    model.set_objective({int(ehat[i, j]): 1.0 for i in range(m2) for j in range(m2)},
                        "min")


def build_model(problem: SynthesisProblem) -> tuple[MipModel, ModelHandles]:
    """Base, target (when the objective has one), objective, and cuts."""
    model, handles = build_base(problem)
    if problem.targets_equality():
        add_target(problem, model, handles)
    if problem.objective == "weighted_gate_count":
        add_objective_gate_count(problem, model, handles)
    elif problem.objective == "depth":
        add_depth_scheduling(problem, model, handles)
    elif problem.objective == "linearized_fidelity":
        add_objective_linearized_fidelity(problem, model, handles)
    elif problem.objective == "exact_fidelity":
        add_objective_exact_fidelity(problem, model, handles)
    else:
        add_objective_frobenius_oa(problem, model, handles)
    apply_cuts(model, handles, problem)
    return model, handles


def schedule_depth(sequence, num_qubits: int) -> tuple[int, dict[int, int]]:
    """Earliest-possible monotone layering of a fixed gate order.

    Each gate lands either in the current layer or opens the next one; a gate
    joins the current layer only when its qubits are disjoint from everything
    already there.  For the fixed order this greedy choice is optimal.
    Gates may be ExtendedGate objects or bare qubit collections.
    """
    depth = 0
    layer: frozenset[int] = frozenset()
    assignment: dict[int, int] = {}
    for idx, gate in enumerate(sequence, start=1):
        qubits = gate.support if hasattr(gate, "support") else frozenset(gate)
        if not qubits:
            assignment[idx] = max(depth, 1)
            continue
        if depth == 0 or (qubits & layer):
            depth += 1
            layer = qubits
        else:
            layer = layer | qubits
        assignment[idx] = depth
    return depth, assignment


def extract_and_verify(problem: SynthesisProblem, model: MipModel,
                       handles: ModelHandles, solution: Solution) -> SynthesisResult:
    """Turn a solver point into a verified circuit; distrust the solver."""
    if solution.x is None:
        raise ModelIntegrityError("solution carries no point to extract")
    x = solution.x
    viol = model.check_point(x, tol=1e-5)
    if viol > 1e-5:
        raise ModelIntegrityError(
            f"solver point violates the model by {viol:.3e}; refusing to extract")

    gs = problem.gate_set
    chosen: list[int] = []
    for p in range(problem.P):
        sel = [g for g in range(len(gs)) if x[handles.z[g, p]] > 0.5]
        if len(sel) != 1:
            raise ModelIntegrityError(
                f"position {p + 1} selects {len(sel)} gates after rounding")
        chosen.append(sel[0])
    seq_idx = [g for g in chosen if g != gs.identity_index]

    mats = gs.matrices()
    realized = np.eye(gs.dim, dtype=complex)
    for g in seq_idx:
        realized = realized @ mats[g]
    fid = fidelity(realized, problem.target)

    eff_prod = np.eye(gs.dim, dtype=complex)
    for g in seq_idx:
        eff_prod = eff_prod @ handles.eff_gate_mats[g]
    a_re, b_re = alpha_beta(encode_real(eff_prod), handles.eff_target)
    e_fro = float(np.sum(np.abs(eff_prod - handles.eff_target) ** 2) * 2.0)

    claimed: float | None = None
    if problem.targets_equality():
        claimed = 1.0
    elif problem.objective == "linearized_fidelity":
        if abs(x[handles.alpha] - a_re) > CLAIM_TOL:
            raise ModelIntegrityError(
                f"model alpha {x[handles.alpha]:.8f} but recomputed {a_re:.8f}")
    elif problem.objective == "exact_fidelity":
        claimed = float(x[handles.alpha] ** 2 + x[handles.beta] ** 2)
    elif problem.objective == "frobenius_oa":
        obj = model.objective_value(x)
        if obj > e_fro + 1e-9:
            raise ModelIntegrityError(
                f"outer approximation {obj:.3e} exceeds the recomputed "
                f"squared error {e_fro:.3e}")
    eff_fid = fidelity(eff_prod, handles.eff_target)
    if claimed is not None and abs(eff_fid - claimed) > CLAIM_TOL:
        raise ModelIntegrityError(
            f"recomputed fidelity {eff_fid:.8f} contradicts the model's "
            f"claim {claimed:.8f}")

    phase = None
    if handles.r is not None:
        phase = complex(x[handles.r], x[handles.s])

    depth_val: int | None = None
    schedule: dict[int, int] | None = None
    if problem.objective == "depth":
        depth_val, schedule = schedule_depth([gs[g] for g in seq_idx], gs.num_qubits)
        _check_model_schedule(problem, handles, x, chosen)

    objective_value = float(model.objective_value(x))
    if problem.objective == "depth":
        objective_value = float(depth_val)

    return SynthesisResult(
        status=solution.status,
        sequence=[gs[g].spec for g in seq_idx],
        gate_indices=seq_idx,
        objective_value=objective_value,
        realized_unitary=realized,
        fidelity_to_target=fid,
        alpha=a_re,
        beta=b_re,
        error_fro_sq=e_fro,
        depth_schedule=schedule,
        depth=depth_val,
        certificate={"status": solution.status, "bound": solution.bound,
                     "gap": solution.gap},
        solve_seconds=solution.solve_seconds,
        phase_factor=phase,
    )


def _check_model_schedule(problem: SynthesisProblem, handles: ModelHandles,
                          x: np.ndarray, chosen: list[int]) -> None:
    """The b-assignment must be a monotone layering with per-qubit disjointness."""
    gs = problem.gate_set
    d_of: list[int] = []
    for p in range(problem.P):
        sel = [d for d in range(int(problem.D)) if x[handles.b[p, d]] > 0.5]
        if len(sel) != 1:
            raise ModelIntegrityError(f"position {p + 1} sits in {len(sel)} layers")
        d_of.append(sel[0] + 1)
    for p in range(1, problem.P):
        if d_of[p] - d_of[p - 1] not in (0, 1):
            raise ModelIntegrityError("layer assignment is not monotone")
    used: dict[int, set[int]] = {}
    for p, g in enumerate(chosen):
        if g == gs.identity_index:
            continue
        occ = used.setdefault(d_of[p], set())
        if occ & gs[g].support:
            raise ModelIntegrityError(
                f"two gates share a qubit in layer {d_of[p]}")
        occ |= gs[g].support


def _oracle_route(problem: SynthesisProblem, time_limit: float | None) -> SynthesisResult:
    eff_t, eff_g, su_applied = effective_instance(problem)
    eff_gs = _effective_gate_set(problem.gate_set, eff_g, su_applied)
    obj_map = {"weighted_gate_count": "gate_count", "depth": "depth",
               "linearized_fidelity": "alpha", "exact_fidelity": "fidelity",
               "frobenius_oa": "alpha"}
    mode = problem.phase_mode if problem.targets_equality() else "exact"
    res = oracle_mod.exhaustive_synthesize(
        eff_t, eff_gs, problem.P, objective=obj_map[problem.objective],
        phase_mode=mode, weights=problem.weights, time_limit=time_limit)
    if res.status == "infeasible":
        return SynthesisResult(status="infeasible", sequence=[], gate_indices=[],
                               objective_value=None, realized_unitary=None,
                               fidelity_to_target=None,
                               certificate={"status": "infeasible", "bound": None,
                                            "gap": None},
                               solve_seconds=res.seconds)
    gs = problem.gate_set
    seq_idx = list(res.sequence)
    mats = gs.matrices()
    realized = np.eye(gs.dim, dtype=complex)
    for g in seq_idx:
        realized = realized @ mats[g]
    fid = fidelity(realized, problem.target)
    eff_prod = np.eye(gs.dim, dtype=complex)
    for g in seq_idx:
        eff_prod = eff_prod @ eff_g[g]
    a_re, b_re = alpha_beta(encode_real(eff_prod), eff_t)
    e_fro = float(np.sum(np.abs(eff_prod - eff_t) ** 2) * 2.0)

    if problem.objective == "depth":
        obj_val: float | None = float(res.objective)
        depth_val, schedule = schedule_depth([gs[g] for g in seq_idx], gs.num_qubits)
    elif problem.objective == "weighted_gate_count":
        obj_val = float(res.objective)
        depth_val, schedule = None, None
    elif problem.objective == "linearized_fidelity":
        obj_val = a_re
        depth_val, schedule = None, None
    elif problem.objective == "exact_fidelity":
        obj_val = fidelity(eff_prod, eff_t)
        depth_val, schedule = None, None
    else:  # frobenius_oa: the enumeration minimizes the true squared error
        obj_val = e_fro
        depth_val, schedule = None, None

    if problem.targets_equality() and fid < 1 - 1e-9:
        raise ModelIntegrityError(
            f"exhaustive search returned a sequence with fidelity {fid:.12f}")

    phase = None
    if problem.phase_mode == "global_phase" and problem.targets_equality():
        tr = np.trace(eff_t.conj().T @ eff_prod) / gs.dim
        phase = complex(tr)

    return SynthesisResult(
        status="optimal",
        sequence=[gs[g].spec for g in seq_idx],
        gate_indices=seq_idx,
        objective_value=obj_val,
        realized_unitary=realized,
        fidelity_to_target=fid,
        alpha=a_re,
        beta=b_re,
        error_fro_sq=e_fro,
        depth_schedule=schedule,
        depth=depth_val,
        certificate={"status": "optimal", "bound": obj_val, "gap": 0.0},
        solve_seconds=res.seconds,
        phase_factor=phase,
    )


_EFF_GS_CACHE: dict[tuple, GateSet] = {}


def _effective_gate_set(gs: GateSet, eff_mats: np.ndarray, su_applied: bool) -> GateSet:
    if not su_applied or np.abs(eff_mats - gs.matrices()).max() <= 1e-14:
        return gs
    # id(gs) is unsafe as a key: a collected gate set's address can be reused.
    key = (gs.num_qubits, tuple(g.spec.name for g in gs), eff_mats.tobytes())
    cached = _EFF_GS_CACHE.get(key)
    if cached is not None:
        return cached
    from .gates import ExtendedGate
    new_gates = []
    for i, g in enumerate(gs):
        spec = GateSpec(name=g.spec.name, qubits=g.spec.qubits,
                        matrix=su_normalize(g.spec.matrix), angle=g.spec.angle)
        new_gates.append(ExtendedGate(spec=spec, num_qubits=gs.num_qubits,
                                      full=eff_mats[i], support=g.support))
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")  # duplicate-matrix warnings are expected here
        eff = GateSet(gs.num_qubits, new_gates)
    _EFF_GS_CACHE[key] = eff
    return eff


def synthesize(problem: SynthesisProblem, backend: str = "scipy",
               time_limit: float | None = None,
               verbose: bool = False) -> SynthesisResult:
    """Solve one synthesis instance end to end and verify the outcome."""
    t0 = time.perf_counter()
    if problem.objective == "depth":
        eff_t, _, _ = effective_instance(problem)
        ident = np.eye(problem.gate_set.dim, dtype=complex)
        if problem.phase_mode == "exact":
            trivial = bool(np.abs(eff_t - ident).max() <= 1e-12)
        else:
            trivial = fidelity(problem.target, ident) >= 1 - 1e-12
        if trivial:
            return SynthesisResult(
                status="optimal", sequence=[], gate_indices=[], objective_value=0.0,
                realized_unitary=ident, fidelity_to_target=fidelity(ident, problem.target),
                alpha=None, beta=None, error_fro_sq=None, depth_schedule={}, depth=0,
                certificate={"status": "optimal", "bound": 0.0, "gap": 0.0},
                solve_seconds=time.perf_counter() - t0)

    if is_oracle_backend(backend):
        return _oracle_route(problem, time_limit)

    be = get_backend(backend)
    model, handles = build_model(problem)
    sol = be.solve(model, time_limit=time_limit, verbose=verbose)
    if sol.status == "unsupported":
        if problem.objective == "exact_fidelity":
            warnings.warn("backend cannot handle the quadratic fidelity objective; "
                          "falling back to exhaustive search", stacklevel=2)
            return _oracle_route(problem, time_limit)
        raise ConfigError(f"backend {backend!r} does not support this model: "
                          f"{sol.message}")
    if sol.status in ("optimal", "feasible"):
        result = extract_and_verify(problem, model, handles, sol)
        result.solve_seconds = time.perf_counter() - t0
        result.certificate["cut_rows"] = dict(model.family_rows)
        return result
    return SynthesisResult(
        status=sol.status, sequence=[], gate_indices=[], objective_value=None,
        realized_unitary=None, fidelity_to_target=None,
        certificate={"status": sol.status, "bound": sol.bound, "gap": sol.gap,
                     "cut_rows": dict(model.family_rows)},
        solve_seconds=time.perf_counter() - t0)


__all__ = [
    "SynthesisProblem", "ModelHandles", "SynthesisResult",
    "build_base", "build_model", "add_target", "add_objective_gate_count",
    "add_depth_scheduling", "add_objective_linearized_fidelity",
    "add_objective_exact_fidelity", "add_objective_frobenius_oa",
    "extract_and_verify", "schedule_depth", "synthesize",
    "OBJECTIVES", "PHASE_MODES",
]
