"""Exhaustive fault-tolerance checks, dictionary search, cross-validation."""

from __future__ import annotations

import pytest

from flagft import (build_bare_circuit, build_conjecture_circuit,
                    build_modified_circuit, build_optimized_circuit,
                    check_decoder_ft, collect_flag_dictionary, cross_validate,
                    residual_weight, search_correction_rules)


def test_residual_weight_counts_on_known_qubits():
    assert residual_weight(0b1010, 0, 0b1010, 4) == 0
    assert residual_weight(0b1010, 0, 0, 4) == 2
    assert residual_weight(0b1010, 0b0010, 0, 4) == 1  # unknown bit masked


def test_residual_weight_folds_the_stabilizer():
    # the measured operator acts as all-ones: correcting e or e^1111 is equal
    assert residual_weight(0b1111, 0, 0, 4) == 0
    assert residual_weight(0b1110, 0, 0, 4) == 1
    assert residual_weight(0b0111, 0, 0b1000, 4) == 0
    assert residual_weight(0b0110, 0b0001, 0b1001, 4) == 0


def test_check_decoder_ft_modified_4_3():
    rep = check_decoder_ft(build_modified_circuit(4, 3))
    assert rep.ok
    assert rep.mode == "decoder"
    assert rep.max_faults == 1
    assert rep.n_sites == 56
    assert rep.combos_checked == 57
    assert rep.max_residual <= 1
    assert rep.lower_bound_violations == 0
    assert rep.counterexample is None


def test_check_decoder_ft_rejects_other_schemes():
    with pytest.raises(ValueError):
        check_decoder_ft(build_conjecture_circuit(4, 3))


def test_check_decoder_ft_zero_faults():
    rep = check_decoder_ft(build_modified_circuit(4, 3), max_faults=0)
    assert rep.ok and rep.combos_checked == 1 and rep.max_residual == 0


def test_flag_dictionary_keys():
    d = collect_flag_dictionary(build_modified_circuit(4, 3))
    assert len(d) == 46
    assert sum(len(v) for v in d.values()) == 57
    # the quiet key holds the empty combination plus invisible faults
    assert any(rec.sites == () for rec in d[0])
    d2 = collect_flag_dictionary(build_conjecture_circuit(4, 3))
    assert len(d2) == 22


def test_dictionary_records_reference_site_indexes():
    c = build_modified_circuit(4, 3)
    from flagft import FaultCombo, enumerate_fault_sites, propagate_combo
    sites = enumerate_fault_sites(c)
    d = collect_flag_dictionary(c)
    for key, recs in d.items():
        for rec in recs:
            res = propagate_combo(c, FaultCombo(tuple(sites[i]
                                                      for i in rec.sites)))
            assert res.flags == key
            assert res.data_x == rec.error
            assert res.unknown == rec.unknown


def test_search_rules_conjecture():
    r = search_correction_rules(build_conjecture_circuit(4, 3))
    assert r.ok and r.exhaustive
    assert r.n_keys == 22
    assert r.combos_checked == 33
    assert r.rules[0] == 0
    assert r.rules[0b11] == 0  # round-1 pair: error is a full stabilizer
    assert r.failed_key is None and r.failed_records == ()


def test_search_rules_optimized():
    r = search_correction_rules(build_optimized_circuit(10, 5))
    assert r.ok and r.exhaustive
    assert r.n_keys == 1348
    assert r.combos_checked == 3322


def test_search_rules_bare_fails():
    r = search_correction_rules(build_bare_circuit(4, 3))
    assert not r.ok
    assert r.failed_key == 0  # no flags: every combo lands on one key
    assert r.rules is None
    assert len(r.failed_records) == 10
    assert any(rec.error == 0b1100 and rec.budget == 1
               for rec in r.failed_records)
    assert any(rec.budget == 0 for rec in r.failed_records)  # the XP faults


def test_cross_validate_modified():
    cv = cross_validate(build_modified_circuit(4, 3))
    assert cv.ok and cv.search_ok
    assert cv.n_keys == 46
    assert cv.combos_checked == 57
    assert cv.mismatch is None


def test_cross_validate_rejects_other_schemes():
    with pytest.raises(ValueError):
        cross_validate(build_optimized_circuit(10, 5))


def test_parallel_results_are_identical():
    c = build_modified_circuit(3, 3)
    assert check_decoder_ft(c, jobs=1) == check_decoder_ft(c, jobs=2)
    assert collect_flag_dictionary(c, jobs=1) == collect_flag_dictionary(c, jobs=3)
    r1 = search_correction_rules(c, jobs=1)
    r2 = search_correction_rules(c, jobs=2)
    assert r1 == r2


def test_decoder_sweep_d3():
    expected = {1: 33, 2: 41, 3: 49, 4: 57, 5: 65, 6: 73}
    for w, combos in expected.items():
        rep = check_decoder_ft(build_modified_circuit(w, 3))
        assert rep.ok and rep.combos_checked == combos
        assert rep.lower_bound_violations == 0
