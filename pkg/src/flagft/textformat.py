"""Line-oriented text formats for circuits and verification reports.

Circuit listing: a header ``flagcircuit w=<w> d=<d> scheme=<kind>``, one op
per line (``P+ q``, ``P0 q``, ``CX c t``, ``MZ q label``, ``MX q label``),
then round metadata (``round <n> flag <label> pos <p>``, ``round <n> data
<k>``).  Qubit names are role-prefixed: ``d<k>`` (1-based), ``s``,
``g<slot>``.  Emission is canonical, and parse(emit(c)) == c.

Bit strings print LSB first: the leftmost character is flag 0 (measurement
order) for flag keys and data qubit 1 for error/correction masks.  An empty
bit string prints as ``-``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .circuits import FlagCircuit, Op, OpKind, QubitRole, SchemeParams
from .pauli import FaultSite, SiteKind
from .verifier import (ComboOutcome, Counterexample, CrossValidation,
                       FTReport, RuleSearchResult)


class FormatError(ValueError):
    """Malformed listing; the message carries the offending line number."""


def bits_to_str(mask: int, n: int) -> str:
    if n == 0:
        return "-"
    return "".join("1" if mask >> i & 1 else "0" for i in range(n))


def str_to_bits(text: str) -> int:
    if text == "-":
        return 0
    mask = 0
    for i, ch in enumerate(text):
        if ch not in "01":
            raise FormatError(f"bad bit character {ch!r}")
        if ch == "1":
            mask |= 1 << i
    return mask


# --------------------------------------------------------------------------
# circuits

def _qubit_name(circuit: FlagCircuit, q: int) -> str:
    role = circuit.roles[q]
    if role.kind == "data":
        return f"d{role.index}"
    if role.kind == "syndrome":
        return "s"
    return f"g{role.index}"


def emit_circuit(circuit: FlagCircuit) -> str:
    p = circuit.params
    lines = [f"flagcircuit w={p.w} d={p.d} scheme={p.kind}"]
    for op in circuit.ops:
        names = " ".join(_qubit_name(circuit, q) for q in op.qubits)
        if op.label is not None:
            lines.append(f"{op.kind.value} {names} {op.label}")
        else:
            lines.append(f"{op.kind.value} {names}")
    for rnd in range(1, circuit.n_rounds + 1):
        for i, (r, pos) in enumerate(circuit.flag_rounds):
            if r == rnd:
                lines.append(f"round {rnd} flag {circuit.flag_labels[i]} "
                             f"pos {pos}")
        k = circuit.round_data[rnd - 1]
        if k is not None:
            lines.append(f"round {rnd} data {k}")
    return "\n".join(lines) + "\n"


_HEADER_RE = re.compile(r"^flagcircuit w=(\d+) d=(\d+) scheme=(\w+)$")
_NAME_RE = re.compile(r"^(d(\d+)|s|g(\d+))$")

_OP_ARITY = {"P+": 1, "P0": 1, "CX": 2, "MZ": 1, "MX": 1}
_OP_LABELLED = {"MZ", "MX"}
_KIND_BY_TOKEN = {k.value: k for k in OpKind}


def parse_circuit(text: str) -> FlagCircuit:
    lines = text.splitlines()
    if not lines:
        raise FormatError("empty listing")
    header = _HEADER_RE.match(lines[0].strip())
    if not header:
        raise FormatError("line 1: expected "
                          "'flagcircuit w=<w> d=<d> scheme=<kind>'")
    w, d = int(header.group(1)), int(header.group(2))
    try:
        params = SchemeParams(w, d, header.group(3))
    except ValueError as exc:
        raise FormatError(f"line 1: {exc}") from exc

    max_slot = -1
    ops: list[Op] = []
    meta: list[tuple[int, str, tuple]] = []  # (lineno, kind, payload)

    def qubit_index(name: str, lineno: int) -> int:
        nonlocal max_slot
        m = _NAME_RE.match(name)
        if not m:
            raise FormatError(f"line {lineno}: bad qubit name {name!r}")
        if name == "s":
            return w
        if name.startswith("d"):
            k = int(m.group(2))
            if not 1 <= k <= w:
                raise FormatError(f"line {lineno}: data qubit {name!r} "
                                  f"outside 1..{w}")
            return k - 1
        slot = int(m.group(3))
        max_slot = max(max_slot, slot)
        return w + 1 + slot

    for lineno, raw in enumerate(lines[1:], start=2):
        line = raw.strip()
        if not line:
            continue
        tok = line.split()
        if tok[0] in _OP_ARITY:
            if meta:
                raise FormatError(f"line {lineno}: op after round metadata")
            arity = _OP_ARITY[tok[0]]
            labelled = tok[0] in _OP_LABELLED
            if len(tok) != 1 + arity + (1 if labelled else 0):
                raise FormatError(f"line {lineno}: malformed {tok[0]} op")
            qubits = tuple(qubit_index(name, lineno)
                           for name in tok[1:1 + arity])
            label = tok[-1] if labelled else None
            ops.append(Op(_KIND_BY_TOKEN[tok[0]], qubits, label))
        elif tok[0] == "round":
            if len(tok) == 6 and tok[2] == "flag" and tok[4] == "pos":
                meta.append((lineno, "flag",
                             (int(tok[1]), tok[3], int(tok[5]))))
            elif len(tok) == 4 and tok[2] == "data":
                meta.append((lineno, "data", (int(tok[1]), int(tok[3]))))
            else:
                raise FormatError(f"line {lineno}: malformed round line")
        else:
            raise FormatError(f"line {lineno}: unknown directive {tok[0]!r}")

    flag_labels = tuple(op.label for op in ops
                        if op.kind is OpKind.MEASURE_Z)
    if len(set(flag_labels)) != len(flag_labels):
        raise FormatError("duplicate flag measurement labels")
    by_label: dict[str, tuple[int, int]] = {}
    data_rounds: dict[int, int] = {}
    n_rounds = 0
    for lineno, kind, payload in meta:
        n_rounds = max(n_rounds, payload[0])
        if kind == "flag":
            rnd, label, pos = payload
            if label not in flag_labels:
                raise FormatError(f"line {lineno}: unknown flag label "
                                  f"{label!r}")
            if label in by_label:
                raise FormatError(f"line {lineno}: duplicate metadata for "
                                  f"{label!r}")
            by_label[label] = (rnd, pos)
        else:
            rnd, k = payload
            if not 1 <= k <= w:
                raise FormatError(f"line {lineno}: data qubit {k} "
                                  f"outside 1..{w}")
            if rnd in data_rounds:
                raise FormatError(f"line {lineno}: duplicate data round {rnd}")
            data_rounds[rnd] = k
    missing = [lab for lab in flag_labels if lab not in by_label]
    if missing:
        raise FormatError(f"missing round metadata for flags {missing}")

    roles = tuple([QubitRole("data", k) for k in range(1, w + 1)]
                  + [QubitRole("syndrome", 0)]
                  + [QubitRole("flag", j) for j in range(max_slot + 1)])
    return FlagCircuit(
        params=params, ops=tuple(ops), roles=roles, flag_labels=flag_labels,
        flag_rounds=tuple(by_label[lab] for lab in flag_labels),
        round_data=tuple(data_rounds.get(r) for r in range(1, n_rounds + 1)))


# --------------------------------------------------------------------------
# reports

_SITE_KIND_BY_TOKEN = {k.value: k for k in SiteKind}


@dataclass(frozen=True)
class ParsedReport:
    mode: str
    ok: bool
    stats: dict[str, int]
    rules: dict[int, int] | None
    failed_key: int | None
    records: tuple[ComboOutcome, ...]
    counterexample_sites: tuple[tuple[SiteKind, int, bool], ...]
    counterexample: dict[str, object] | None
    circuit: FlagCircuit


def _emit_counterexample(lines: list[str], cex: Counterexample,
                         circuit: FlagCircuit,
                         sites: tuple[FaultSite, ...]) -> None:
    nf = circuit.n_flags
    w = circuit.w
    lines.append(f"counterexample reason {cex.reason}")
    lines.append(f"counterexample flags {bits_to_str(cex.flags, nf)}")
    lines.append(f"counterexample error {bits_to_str(cex.error, w)}")
    lines.append(f"counterexample unknown {bits_to_str(cex.unknown, w)}")
    lines.append(f"counterexample budget {cex.budget}")
    if cex.correction is not None:
        lines.append(f"counterexample correction "
                     f"{bits_to_str(cex.correction, w)}")
    if cex.residual is not None:
        lines.append(f"counterexample residual {cex.residual}")
    for i in cex.sites:
        site = sites[i]
        when = "before" if site.before else "after"
        lines.append(f"site {site.kind.value} {site.time} {when}")


def emit_report(result: FTReport | RuleSearchResult | CrossValidation,
                circuit: FlagCircuit) -> str:
    from .pauli import enumerate_fault_sites

    lines: list[str] = []
    verdict = "pass" if result.ok else "fail"
    if isinstance(result, FTReport):
        lines.append(f"ftreport mode=decoder verdict={verdict}")
        lines.append(f"stat max_faults {result.max_faults}")
        lines.append(f"stat sites {result.n_sites}")
        lines.append(f"stat combos_checked {result.combos_checked}")
        lines.append(f"stat max_residual {result.max_residual}")
        lines.append(f"stat lower_bound_violations "
                     f"{result.lower_bound_violations}")
        if result.counterexample is not None:
            _emit_counterexample(lines, result.counterexample, circuit,
                                 enumerate_fault_sites(circuit))
    elif isinstance(result, RuleSearchResult):
        lines.append(f"ftreport mode=search verdict={verdict}")
        lines.append(f"stat max_faults {result.max_faults}")
        lines.append(f"stat sites {result.n_sites}")
        lines.append(f"stat combos_checked {result.combos_checked}")
        lines.append(f"stat keys {result.n_keys}")
        lines.append(f"stat exhaustive {int(result.exhaustive)}")
        nf = circuit.n_flags
        w = circuit.w
        if result.ok:
            for key in sorted(result.rules):
                lines.append(f"rule {bits_to_str(key, nf)} "
                             f"{bits_to_str(result.rules[key], w)}")
        else:
            lines.append(f"failedkey {bits_to_str(result.failed_key, nf)}")
            for rec in result.failed_records:
                idx = ",".join(map(str, rec.sites)) or "-"
                lines.append(f"record error {bits_to_str(rec.error, w)} "
                             f"unknown {bits_to_str(rec.unknown, w)} "
                             f"budget {rec.budget} sites {idx}")
    elif isinstance(result, CrossValidation):
        lines.append(f"ftreport mode=cross verdict={verdict}")
        lines.append(f"stat max_faults {result.max_faults}")
        lines.append(f"stat keys {result.n_keys}")
        lines.append(f"stat combos_checked {result.combos_checked}")
        lines.append(f"stat search_ok {int(result.search_ok)}")
        if result.mismatch is not None:
            key, rec, corr, res = result.mismatch
            nf = circuit.n_flags
            w = circuit.w
            idx = ",".join(map(str, rec.sites)) or "-"
            lines.append(f"mismatch key {bits_to_str(key, nf)} "
                         f"error {bits_to_str(rec.error, w)} "
                         f"unknown {bits_to_str(rec.unknown, w)} "
                         f"budget {rec.budget} "
                         f"correction {bits_to_str(corr, w)} "
                         f"residual {res} sites {idx}")
    else:
        raise TypeError(f"cannot emit a report for {type(result).__name__}")
    lines.append("begin circuit")
    lines.append(emit_circuit(circuit).rstrip("\n"))
    lines.append("end circuit")
    lines.append("end report")
    return "\n".join(lines) + "\n"


def parse_report(text: str) -> ParsedReport:
    lines = text.splitlines()
    if not lines:
        raise FormatError("empty report")
    head = lines[0].split()
    if (len(head) != 3 or head[0] != "ftreport"
            or not head[1].startswith("mode=")
            or not head[2].startswith("verdict=")):
        raise FormatError("line 1: expected "
                          "'ftreport mode=<mode> verdict=<verdict>'")
    mode = head[1][5:]
    verdict = head[2][8:]
    if mode not in ("decoder", "search", "cross"):
        raise FormatError(f"line 1: unknown mode {mode!r}")
    if verdict not in ("pass", "fail"):
        raise FormatError(f"line 1: unknown verdict {verdict!r}")

    stats: dict[str, int] = {}
    rules: dict[int, int] = {}
    records: list[ComboOutcome] = []
    sites: list[tuple[SiteKind, int, bool]] = []
    cex: dict[str, object] = {}
    failed_key: int | None = None
    circuit_lines: list[str] | None = None
    saw_rules = False

    i = 1
    while i < len(lines):
        line = lines[i].strip()
        tok = line.split()
        i += 1
        if not line:
            continue
        if line == "end report":
            break
        if line == "begin circuit":
            j = i
            while j < len(lines) and lines[j].strip() != "end circuit":
                j += 1
            if j == len(lines):
                raise FormatError("unterminated circuit block")
            circuit_lines = lines[i:j]
            i = j + 1
            continue
        if tok[0] == "stat" and len(tok) == 3:
            stats[tok[1]] = int(tok[2])
        elif tok[0] == "rule" and len(tok) == 3:
            saw_rules = True
            rules[str_to_bits(tok[1])] = str_to_bits(tok[2])
        elif tok[0] == "failedkey" and len(tok) == 2:
            failed_key = str_to_bits(tok[1])
        elif tok[0] == "record" and len(tok) == 9:
            combo = (tuple() if tok[8] == "-" else
                     tuple(int(s) for s in tok[8].split(",")))
            records.append(ComboOutcome(combo, str_to_bits(tok[2]),
                                        str_to_bits(tok[4]), int(tok[6])))
        elif tok[0] == "site" and len(tok) == 4:
            if tok[1] not in _SITE_KIND_BY_TOKEN or tok[3] not in ("before",
                                                                   "after"):
                raise FormatError(f"line {i}: malformed site line")
            sites.append((_SITE_KIND_BY_TOKEN[tok[1]], int(tok[2]),
                          tok[3] == "before"))
        elif tok[0] == "counterexample" and len(tok) >= 3:
            if tok[1] == "reason":
                cex["reason"] = tok[2]
            elif tok[1] in ("flags", "error", "unknown", "correction"):
                cex[tok[1]] = str_to_bits(tok[2])
            else:
                cex[tok[1]] = int(tok[2])
        elif tok[0] == "mismatch":
            cex["mismatch"] = 1
        else:
            raise FormatError(f"line {i}: unknown report line {tok[0]!r}")
    if circuit_lines is None:
        raise FormatError("report has no embedded circuit")
    return ParsedReport(mode=mode, ok=verdict == "pass", stats=stats,
                        rules=rules if saw_rules else None,
                        failed_key=failed_key, records=tuple(records),
                        counterexample_sites=tuple(sites),
                        counterexample=cex or None,
                        circuit=parse_circuit("\n".join(circuit_lines) + "\n"))
