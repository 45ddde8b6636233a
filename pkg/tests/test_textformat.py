"""Circuit listing and report formats: round trips and error reporting."""

from __future__ import annotations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from flagft import (Counterexample, FormatError, FTReport, bits_to_str,
                    build_bare_circuit, build_circuit,
                    build_conjecture_circuit, build_modified_circuit,
                    check_decoder_ft, cross_validate, emit_circuit,
                    emit_report, parse_circuit, parse_report,
                    search_correction_rules, str_to_bits)


def test_bit_strings():
    assert bits_to_str(0b1101, 4) == "1011"  # leftmost char is bit 0
    assert bits_to_str(0, 0) == "-"
    assert str_to_bits("1011") == 0b1101
    assert str_to_bits("-") == 0
    with pytest.raises(FormatError):
        str_to_bits("10x1")


@pytest.mark.parametrize("w,d,kind", [
    (1, 3, "conjecture"), (4, 3, "conjecture"), (2, 3, "modified"),
    (4, 3, "modified"), (2, 5, "modified"), (8, 5, "optimized"),
    (10, 5, "optimized"), (3, 3, "bare"),
])
def test_circuit_round_trip(w, d, kind):
    c = build_circuit(w, d, kind)
    text = emit_circuit(c)
    assert parse_circuit(text) == c
    assert emit_circuit(parse_circuit(text)) == text  # emit is a fixed point
    assert emit_circuit(c) == text  # and deterministic


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 6), st.sampled_from([3, 5]),
       st.sampled_from(["conjecture", "modified", "bare"]))
def test_circuit_round_trip_random(w, d, kind):
    c = build_circuit(w, d, kind)
    assert parse_circuit(emit_circuit(c)) == c


def test_emitted_listing_shape():
    text = emit_circuit(build_modified_circuit(2, 3))
    lines = text.splitlines()
    assert lines[0] == "flagcircuit w=2 d=3 scheme=modified"
    assert lines[1] == "P+ s"
    assert "CX s d1" in lines and "CX s d2" in lines
    assert "CX s g0" in lines
    assert "round 5 data 1" in lines
    assert text.endswith("\n")


@pytest.mark.parametrize("mangle,message", [
    (lambda t: "bogus\n" + t.split("\n", 1)[1], "line 1"),
    (lambda t: t.replace("P+ s", "P+ q9", 1), "bad qubit name"),
    (lambda t: t.replace("CX s d1", "CX s d7", 1), "outside"),
    (lambda t: t.replace("P+ s", "P+ s extra", 1), "malformed P+"),
    (lambda t: t + "wilt 3\n", "unknown directive"),
    (lambda t: t + "P+ s\n", "op after round metadata"),
    (lambda t: t.replace("round 1 flag", "round 1 wobble"), "malformed round"),
    (lambda t: "", "empty"),
])
def test_parse_circuit_errors(mangle, message):
    text = emit_circuit(build_modified_circuit(2, 3))
    with pytest.raises(FormatError, match=message):
        parse_circuit(mangle(text))


def test_parse_circuit_duplicate_label():
    lines = emit_circuit(build_modified_circuit(2, 3)).splitlines()
    mz = [i for i, ln in enumerate(lines) if ln.startswith("MZ ")]
    parts = lines[mz[1]].split()
    parts[2] = lines[mz[0]].split()[2]
    lines[mz[1]] = " ".join(parts)
    with pytest.raises(FormatError, match="duplicate flag measurement"):
        parse_circuit("\n".join(lines) + "\n")


def test_parse_circuit_missing_metadata():
    text = emit_circuit(build_modified_circuit(2, 3))
    kept = [ln for ln in text.splitlines() if "flag f0 " not in ln]
    assert len(kept) == len(text.splitlines()) - 1
    with pytest.raises(FormatError, match="missing round metadata"):
        parse_circuit("\n".join(kept) + "\n")


def test_decoder_report_round_trip():
    c = build_modified_circuit(2, 3)
    rep = check_decoder_ft(c)
    text = emit_report(rep, c)
    parsed = parse_report(text)
    assert parsed.mode == "decoder" and parsed.ok == rep.ok
    assert parsed.stats["max_faults"] == rep.max_faults
    assert parsed.stats["sites"] == rep.n_sites
    assert parsed.stats["combos_checked"] == rep.combos_checked
    assert parsed.stats["max_residual"] == rep.max_residual
    assert parsed.stats["lower_bound_violations"] == rep.lower_bound_violations
    assert parsed.circuit == c
    assert parsed.counterexample is None


def test_search_report_round_trips():
    c = build_conjecture_circuit(2, 3)
    res = search_correction_rules(c)
    parsed = parse_report(emit_report(res, c))
    assert parsed.mode == "search" and parsed.ok
    assert parsed.rules == res.rules
    assert parsed.stats["keys"] == res.n_keys

    # w=2 bare circuits still pass (the stabilizer fold absorbs every
    # suffix error); w=4 is the genuine negative control
    bare = build_bare_circuit(4, 3)
    res = search_correction_rules(bare)
    parsed = parse_report(emit_report(res, bare))
    assert parsed.mode == "search" and not parsed.ok
    assert parsed.failed_key == res.failed_key
    assert parsed.rules is None
    assert parsed.records == tuple(res.failed_records)


def test_cross_report_round_trip():
    c = build_modified_circuit(2, 3)
    cv = cross_validate(c)
    parsed = parse_report(emit_report(cv, c))
    assert parsed.mode == "cross" and parsed.ok
    assert parsed.stats["search_ok"] == 1
    assert parsed.stats["keys"] == cv.n_keys


def test_counterexample_block_round_trips():
    c = build_modified_circuit(2, 3)
    cex = Counterexample(sites=(0, 3), flags=0b101, error=0b10, unknown=0b01,
                         budget=1, correction=0b11, residual=2,
                         reason="residual_exceeds_budget")
    rep = FTReport(ok=False, mode="decoder", max_faults=1, n_sites=44,
                   combos_checked=45, max_residual=2,
                   lower_bound_violations=0, counterexample=cex)
    parsed = parse_report(emit_report(rep, c))
    assert not parsed.ok
    assert parsed.counterexample["reason"] == "residual_exceeds_budget"
    assert parsed.counterexample["flags"] == 0b101
    assert parsed.counterexample["error"] == 0b10
    assert parsed.counterexample["unknown"] == 0b01
    assert parsed.counterexample["budget"] == 1
    assert parsed.counterexample["correction"] == 0b11
    assert parsed.counterexample["residual"] == 2
    assert len(parsed.counterexample_sites) == 2


@pytest.mark.parametrize("mangle,message", [
    (lambda t: t.replace("ftreport", "report", 1), "line 1"),
    (lambda t: t.replace("mode=decoder", "mode=magic", 1), "unknown mode"),
    (lambda t: t.replace("verdict=pass", "verdict=meh", 1), "unknown verdict"),
    (lambda t: t.replace("end circuit\n", ""), "unterminated circuit"),
    (lambda t: t.replace("stat sites", "blob sites", 1), "unknown report"),
    (lambda t: "", "empty"),
])
def test_parse_report_errors(mangle, message):
    c = build_modified_circuit(2, 3)
    text = emit_report(check_decoder_ft(c), c)
    with pytest.raises(FormatError, match=message):
        parse_report(mangle(text))


def test_parse_report_requires_circuit():
    c = build_modified_circuit(2, 3)
    text = emit_report(check_decoder_ft(c), c)
    head, _, _ = text.partition("begin circuit")
    with pytest.raises(FormatError, match="no embedded circuit"):
        parse_report(head + "end report\n")
