"""Builder structure: schedules, ancilla accounting, round validation."""

from __future__ import annotations

import pytest

from flagft import (CircuitStructureError, FlagCircuit, Op, OpKind,
                    SchemeParams, build_bare_circuit, build_circuit,
                    build_conjecture_circuit, build_modified_circuit,
                    build_optimized_circuit, flags_per_data_cnot,
                    peak_live_ancillas, validate_round_structure)


def test_params_validation():
    with pytest.raises(ValueError):
        SchemeParams(4, 4, "conjecture")  # even d
    with pytest.raises(ValueError):
        SchemeParams(4, 1, "conjecture")
    with pytest.raises(ValueError):
        SchemeParams(0, 3, "conjecture")
    with pytest.raises(ValueError):
        SchemeParams(4, 3, "nonsense")
    with pytest.raises(ValueError):
        SchemeParams(7, 5, "optimized")  # needs w >= 2(d-1) = 8
    assert SchemeParams(8, 5, "optimized").t == 2


def test_dummy_round_counts():
    assert SchemeParams(4, 3, "modified").dummy_rounds == 4
    assert SchemeParams(4, 5, "modified").dummy_rounds == 9
    assert SchemeParams(4, 3, "conjecture").dummy_rounds == 0


def test_conjecture_structure():
    c = build_conjecture_circuit(4, 3)
    assert c.n_rounds == 4
    assert c.n_flags == 8
    assert c.round_data == (1, 2, 3, 4)
    assert flags_per_data_cnot(c) == (2, 2, 2, 2)
    # one data CNOT per data qubit, in order
    data_targets = [op.qubits[1] for op in c.ops
                    if op.kind is OpKind.CNOT and op.qubits[1] < c.w]
    assert data_targets == [0, 1, 2, 3]


def test_modified_prepends_dummy_rounds():
    c = build_modified_circuit(4, 3)
    assert c.n_rounds == 8
    assert c.round_data == (None, None, None, None, 1, 2, 3, 4)
    assert c.n_flags == 16
    assert flags_per_data_cnot(c) == (2, 2, 2, 2)


def test_optimized_ramp():
    c = build_optimized_circuit(10, 5)
    assert flags_per_data_cnot(c) == (0, 1, 2, 3, 4, 4, 3, 2, 1, 0)
    assert c.n_flags == 20
    c = build_optimized_circuit(8, 5)  # minimal width: no plateau
    assert flags_per_data_cnot(c) == (0, 1, 2, 3, 3, 2, 1, 0)


def test_bare_has_no_flags():
    c = build_bare_circuit(4, 3)
    assert c.n_flags == 0
    assert c.n_flag_slots == 0
    kinds = [op.kind for op in c.ops]
    assert kinds == [OpKind.PREP_PLUS] + [OpKind.CNOT] * 4 + [OpKind.MEASURE_X]


def test_circuit_shape_invariants():
    for w, d, kind in [(1, 3, "conjecture"), (4, 3, "modified"),
                       (10, 5, "optimized"), (3, 5, "modified"),
                       (2, 3, "bare")]:
        c = build_circuit(w, d, kind)
        assert c.ops[0] == Op(OpKind.PREP_PLUS, (c.syndrome_qubit,))
        assert c.ops[-1].kind is OpKind.MEASURE_X
        assert len(c.flag_labels) == len(c.flag_rounds) == c.n_flags
        # every flag slot cycles P0 -> CX -> CX -> MZ
        mz = [op for op in c.ops if op.kind is OpKind.MEASURE_Z]
        assert len(mz) == c.n_flags
        assert [op.label for op in mz] == list(c.flag_labels)


def test_peak_live_ancillas():
    for w, d in [(2, 3), (4, 3), (6, 3), (2, 5), (4, 5)]:
        c = build_modified_circuit(w, d)
        assert peak_live_ancillas(c) == (d, d + 1)
        assert c.n_flag_slots == d  # slot reuse caps allocation at the peak
    assert peak_live_ancillas(build_conjecture_circuit(4, 3)) == (3, 4)
    assert peak_live_ancillas(build_optimized_circuit(10, 5)) == (5, 6)
    assert peak_live_ancillas(build_bare_circuit(4, 3)) == (0, 1)


def test_peak_never_exceeds_budget():
    # w=1 has no round transition, so its peak sits below d
    pk, pt = peak_live_ancillas(build_conjecture_circuit(1, 3))
    assert (pk, pt) == (2, 3)
    for w in range(1, 8):
        for d in (3, 5):
            for kind in ("conjecture", "modified"):
                pk, pt = peak_live_ancillas(build_circuit(w, d, kind))
                assert pk <= d and pt <= d + 1


def test_validate_round_structure_passes():
    for d in (3, 5):
        for w in (1, 3, 6):
            rep = validate_round_structure(build_modified_circuit(w, d))
            assert rep.ok, rep.violations
            assert rep.sites_checked > 0


def test_validate_rejects_tapered_schemes():
    with pytest.raises(ValueError):
        validate_round_structure(build_optimized_circuit(10, 5))
    with pytest.raises(ValueError):
        validate_round_structure(build_bare_circuit(4, 3))


def _drop_closing_cnot(circuit: FlagCircuit, rnd: int, pos: int) -> FlagCircuit:
    """Remove the disarming CNOT of flag (rnd, pos); breaks the flip law.

    Slots are reused, so the close is the last CNOT into the flag's slot
    before its measurement.
    """
    label = circuit.flag_labels[circuit.flag_rounds.index((rnd, pos))]
    mz_at = next(i for i, op in enumerate(circuit.ops)
                 if op.kind is OpKind.MEASURE_Z and op.label == label)
    slot_q = circuit.ops[mz_at].qubits[0]
    close_at = max(i for i, op in enumerate(circuit.ops[:mz_at])
                   if op.kind is OpKind.CNOT and op.qubits[1] == slot_q)
    assert circuit.ops[close_at - 1].kind is not OpKind.PREP_ZERO
    ops = circuit.ops[:close_at] + circuit.ops[close_at + 1:]
    return FlagCircuit(params=circuit.params, ops=ops, roles=circuit.roles,
                       flag_labels=circuit.flag_labels,
                       flag_rounds=circuit.flag_rounds,
                       round_data=circuit.round_data)


def test_validate_flags_a_broken_schedule():
    broken = _drop_closing_cnot(build_modified_circuit(2, 3), 5, 1)
    rep = validate_round_structure(broken)
    assert not rep.ok
    assert rep.violations


def test_flag_positions_follow_closing_order():
    c = build_modified_circuit(4, 3)
    # measurement order must equal (round, pos) lexicographic order
    assert list(c.flag_rounds) == sorted(c.flag_rounds)
    for rnd in range(1, c.n_rounds + 1):
        poss = [p for r, p in c.flag_rounds if r == rnd]
        assert poss == [1, 2]
