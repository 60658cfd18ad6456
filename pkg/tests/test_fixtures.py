"""Built-in instances: registry rows, corpora sizing, seed circuits."""

import numpy as np
import pytest

from mipsynth.encoding import require_unitary
from mipsynth.errors import GateSetError
from mipsynth.fixtures import (GOLDEN_WEAVES, benchmark_registry,
                               brickwork_circuit, controlled,
                               criterion_phase_instance, depth_corpus,
                               golden_weave_circuit, hypergraph_parity_seed,
                               k4_parity_seed, k5_parity_seed, oracle_corpus,
                               standard_target, standard_target_names)
from mipsynth.gates import builtin_gate
from mipsynth.rho import circuit_qubits, circuit_unitary

# name -> (qubits, non-identity gates, budget)
REGISTRY_ROWS = {
    "toffoli2q": (3, 9, 5),
    "cnot13": (3, 14, 8),
    "fredkin": (3, 11, 7),
    "cnot41": (4, 6, 10),
    "csx": (2, 9, 7),
    "ch": (2, 32, 5),
    "iswap": (2, 9, 10),
    "single_excitation_hadamard": (2, 14, 5),
}


def test_registry_rows():
    reg = benchmark_registry()
    assert set(reg) == set(REGISTRY_ROWS)
    for name, (q, g, p) in REGISTRY_ROWS.items():
        f = reg[name]
        assert f.num_qubits == q, name
        assert len(f.gate_set.non_identity_indices()) == g, name
        assert f.P == p, name
        require_unitary(f.target)
        assert f.target.shape == (2 ** q, 2 ** q)


def test_standard_targets():
    names = standard_target_names()
    assert set(names) >= {"toffoli", "fredkin", "cnot13", "cnot41", "csx",
                          "ch", "iswap", "magic", "single_excitation_hadamard"}
    for n in names:
        require_unitary(standard_target(n))
    # the two classical reversible targets are permutation matrices
    tof = standard_target("toffoli")
    fred = standard_target("fredkin")
    assert np.array_equal(tof, np.eye(8)[:, [0, 1, 2, 3, 4, 5, 7, 6]])
    perm = np.abs(fred) > 0.5
    assert perm.sum() == 8 and np.array_equal(fred[perm], np.ones(8))
    assert np.array_equal(fred[:4], np.eye(8)[:4])
    with pytest.raises(GateSetError):
        standard_target("grover")


def test_controlled_embedding():
    x = builtin_gate("X")
    assert np.array_equal(controlled(x), builtin_gate("CNOT"))
    h = builtin_gate("H")
    ch = controlled(h)
    assert np.array_equal(ch[:2, :2], np.eye(2)) and np.allclose(ch[2:, 2:], h)


def test_oracle_corpus_is_small():
    corpus = oracle_corpus()
    assert len(corpus) == 22
    for f in corpus:
        assert f.num_qubits <= 2, f.name
        assert len(f.gate_set.non_identity_indices()) <= 8, f.name
        assert f.P <= 5, f.name
        require_unitary(f.target)
    assert len({f.name for f in corpus}) == 22


def test_depth_corpus_is_small():
    corpus = depth_corpus()
    assert len(corpus) == 7
    for f in corpus:
        assert f.num_qubits <= 2 and f.P <= 5
        require_unitary(f.target)


def test_phase_instance_target():
    f = criterion_phase_instance()
    assert f.num_qubits == 2 and f.P == 3
    want = 1j * np.diag([1.0, 1.0, 1.0, -1.0])
    assert np.abs(f.target - want).max() <= 1e-14
    names = {f.gate_set.label(i) for i in f.gate_set.non_identity_indices()}
    assert names == {"H[2]", "CNOT[1,2]"}


def test_parity_seed_sizes():
    k5 = k5_parity_seed()
    k4 = k4_parity_seed()
    assert len(k5) == 50 and circuit_qubits(k5) == 5
    assert len(k4) == 20 and circuit_qubits(k4) == 4
    assert all(g.name in ("CNOT", "S") for g in k5 + k4)
    assert len(hypergraph_parity_seed(6)) == 100


def test_parity_seed_structure():
    # every triple folds parity, phases, and unfolds: an involution without S
    k4 = k4_parity_seed()
    u = circuit_unitary(k4, 4)
    assert np.abs(np.abs(np.diag(u)) - 1.0).max() <= 1e-12  # diagonal unitary
    stripped = [g for g in k4 if g.name == "CNOT"]
    v = circuit_unitary(stripped, 4)
    assert np.abs(v - np.eye(16)).max() <= 1e-12


def test_brickwork_shape():
    bw = brickwork_circuit()
    assert len(bw) == 27 and circuit_qubits(bw) == 7
    require_unitary(circuit_unitary(bw, 7))


def test_golden_weave_letters():
    assert {k: len(v) for k, v in GOLDEN_WEAVES.items()} == \
        {"H": 15, "X": 10, "T": 15}
    for name, letters in GOLDEN_WEAVES.items():
        assert all(l in ("WEAVE1", "WEAVE1DG", "WEAVE2", "WEAVE2DG")
                   for l in letters)
        circ = golden_weave_circuit(name)
        assert [g.name for g in circ] == letters
        assert circuit_qubits(circ) == 1
    with pytest.raises(GateSetError):
        golden_weave_circuit("Y")
