"""Relation discovery on small gate sets, pinned against hand algebra."""

import numpy as np
import pytest

from mipsynth.gates import GateSet, gate_spec
from mipsynth.relations import RelationCatalog, detect_relations, equal_matrices


def _set1(*names: str) -> GateSet:
    return GateSet.from_specs(1, [gate_spec(n, (1,)) for n in names])


def _labels(gs, pairs):
    return sorted((gs.label(i), gs.label(j)) for i, j in pairs)


def test_equal_matrices_phase_handling():
    x = np.array([[0, 1], [1, 0]], dtype=complex)
    assert equal_matrices(x, x, up_to_phase=False)
    assert not equal_matrices(x, 1j * x, up_to_phase=False)
    assert equal_matrices(x, 1j * x, up_to_phase=True)
    assert not equal_matrices(x, np.eye(2), up_to_phase=True)


def test_pauli_set_exact_phase():
    gs = _set1("X", "Y", "Z")
    cat = detect_relations(gs, k_max=2)
    # XY = -YX exactly, so nothing commutes at exact phase
    assert cat.commuting_pairs == []
    # all three squares hit the identity
    reds = {(tuple(gs.label(a) for a in seq), gs.label(g))
            for seq, g in cat.redundancies}
    assert reds == {(("X[1]", "X[1]"), "I"), (("Y[1]", "Y[1]"), "I"),
                    (("Z[1]", "Z[1]"), "I")}
    # the three squares are pairwise equivalent patterns
    assert len(cat.equivalent_pairs) == 3


def test_pauli_set_up_to_phase():
    gs = _set1("X", "Y", "Z")
    cat = detect_relations(gs, k_max=2, up_to_phase=True)
    # XY = iZ ~ -iZ = YX, so every Pauli pair commutes up to phase
    assert _labels(gs, cat.commuting_pairs) == [
        ("X[1]", "Y[1]"), ("X[1]", "Z[1]"), ("Y[1]", "Z[1]")]
    reds = {(tuple(gs.label(a) for a in seq), gs.label(g))
            for seq, g in cat.redundancies}
    assert (("X[1]", "Y[1]"), "Z[1]") in reds
    assert (("Y[1]", "Z[1]"), "X[1]") in reds
    assert len(cat.redundancies) == 9


def test_clifford_t_relations():
    gs = _set1("H", "T", "S")
    cat = detect_relations(gs, k_max=3)
    # diagonal gates commute; T^2 = S; HH cancels
    assert _labels(gs, cat.commuting_pairs) == [("T[1]", "S[1]")] or \
        _labels(gs, cat.commuting_pairs) == [("S[1]", "T[1]")]
    reds = {(tuple(gs.label(a) for a in seq), gs.label(g))
            for seq, g in cat.redundancies}
    assert (("T[1]", "T[1]"), "S[1]") in reds
    assert (("H[1]", "H[1]"), "I") in reds
    # length-3 collapses through the HH cancellation are found too
    assert (("H[1]", "H[1]", "T[1]"), "T[1]") in reds
    assert len(cat.redundancies) == 7


def test_identity_never_participates():
    gs = _set1("H", "T", "S")
    cat = detect_relations(gs, k_max=3)
    ident = gs.identity_index
    assert all(ident not in pair for pair in cat.commuting_pairs)
    for seq, g in cat.redundancies:
        assert ident not in seq
    for forb, kept in cat.equivalent_pairs:
        assert ident not in forb and ident not in kept


def test_two_qubit_commuting_and_kept_side():
    gs = GateSet.from_specs(2, [gate_spec("CNOT", (1, 2)), gate_spec("H", (1,)),
                                gate_spec("H", (2,)), gate_spec("CZ", (1, 2))])
    cat = detect_relations(gs, k_max=2)
    assert _labels(gs, cat.commuting_pairs) == [("H[1]", "H[2]")]
    # kept pattern is always the lexicographically smaller index tuple
    for forb, kept in cat.equivalent_pairs:
        assert kept < forb
    assert len(cat.equivalent_pairs) == 8
    reds = {tuple(gs.label(a) for a in seq) for seq, _ in cat.redundancies}
    assert ("CNOT[1,2]", "CNOT[1,2]") in reds and ("CZ[1,2]", "CZ[1,2]") in reds


def test_k_max_shrinks_under_enumeration_limit():
    gs = _set1("X", "Y", "Z")
    with pytest.warns(UserWarning, match="k_max"):
        cat = detect_relations(gs, k_max=9, enumeration_limit=50)
    assert cat.k_max < 9


def test_catalog_to_dict_round_trips_labels():
    gs = _set1("H", "T", "S")
    cat = detect_relations(gs, k_max=2)
    doc = cat.to_dict(gs)
    assert doc["k_max"] == 2 and doc["up_to_phase"] is False
    assert {"sequence": ["T[1]", "T[1]"], "collapses_to": "S[1]"} in doc["redundancies"]
    assert isinstance(cat, RelationCatalog)
