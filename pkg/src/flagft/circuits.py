"""Flag circuit construction for weight-w X-stabilizer syndrome extraction.

A circuit measures X on data qubits 1..w through a single syndrome ancilla
prepared in |+> and measured in the X basis.  Flag ancillas are |0>-prepared,
armed by a CNOT from the syndrome ancilla, closed by a second CNOT, and
measured in the Z basis.  An X fault on the syndrome ancilla flips exactly
the flags whose open/close CNOT pair straddles it and spreads X to the data
targets of all later data CNOTs; Z faults only flip the syndrome bit.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from enum import Enum


class OpKind(Enum):
    PREP_PLUS = "P+"
    PREP_ZERO = "P0"
    CNOT = "CX"
    MEASURE_Z = "MZ"
    MEASURE_X = "MX"


@dataclass(frozen=True)
class Op:
    """One circuit operation; time = position in the ops tuple."""

    kind: OpKind
    qubits: tuple[int, ...]
    label: str | None = None


@dataclass(frozen=True)
class QubitRole:
    kind: str  # "data" | "syndrome" | "flag"
    index: int  # data qubit number (1-based), flag slot id, 0 for syndrome


SCHEME_KINDS = ("conjecture", "modified", "optimized", "bare")


@dataclass(frozen=True)
class SchemeParams:
    """Parameters of a scheme instance: stabilizer weight w, odd distance d."""

    w: int
    d: int
    kind: str

    def __post_init__(self) -> None:
        if self.kind not in SCHEME_KINDS:
            raise ValueError(f"unknown scheme kind {self.kind!r}")
        if self.d < 3 or self.d % 2 == 0:
            raise ValueError(f"d must be odd and >= 3, got {self.d}")
        if self.w < 1:
            raise ValueError(f"w must be >= 1, got {self.w}")
        if self.kind == "optimized" and self.w < 2 * (self.d - 1):
            raise ValueError(
                f"optimized scheme needs w >= 2(d-1) = {2 * (self.d - 1)}, "
                f"got w = {self.w}")

    @property
    def t(self) -> int:
        return (self.d - 1) // 2

    @property
    def dummy_rounds(self) -> int:
        # the modified scheme prepends (t+1)^2 flag-only rounds
        return (self.t + 1) ** 2 if self.kind == "modified" else 0


class CircuitStructureError(ValueError):
    """A circuit violates the structural assumptions of its scheme."""


@dataclass(frozen=True)
class FlagCircuit:
    """An assembled circuit plus the round metadata needed for decoding.

    Qubit index layout: data qubit k -> k-1, syndrome ancilla -> w, flag
    slot j -> w+1+j.  ``flag_labels``/``flag_rounds`` are aligned and follow
    measurement time order; ``round_data[i]`` is the data qubit of round i+1
    or None for a dummy round.
    """

    params: SchemeParams
    ops: tuple[Op, ...]
    roles: tuple[QubitRole, ...]
    flag_labels: tuple[str, ...]
    flag_rounds: tuple[tuple[int, int], ...]
    round_data: tuple[int | None, ...]

    @property
    def w(self) -> int:
        return self.params.w

    @property
    def n_qubits(self) -> int:
        return len(self.roles)

    @property
    def syndrome_qubit(self) -> int:
        return self.params.w

    @property
    def n_flag_slots(self) -> int:
        return self.n_qubits - self.params.w - 1

    @property
    def n_flags(self) -> int:
        return len(self.flag_labels)

    @property
    def n_rounds(self) -> int:
        return len(self.round_data)

    @property
    def data_mask(self) -> int:
        return (1 << self.params.w) - 1


def _ramp_counts(w: int, d: int) -> list[int]:
    # taper up to d-1 flags, hold, taper down; needs w >= 2(d-1)
    up = list(range(d - 1))
    return up + [d - 1] * (w - 2 * (d - 1)) + up[::-1]


def _scheme_layout(params: SchemeParams) -> tuple[list[int], list[int | None]]:
    w, d = params.w, params.d
    if params.kind == "conjecture":
        return [d - 1] * w, list(range(1, w + 1))
    if params.kind == "modified":
        r = params.dummy_rounds
        return [d - 1] * (r + w), [None] * r + list(range(1, w + 1))
    if params.kind == "optimized":
        return _ramp_counts(w, d), list(range(1, w + 1))
    return [0] * w, list(range(1, w + 1))  # bare


def _assemble(params: SchemeParams) -> FlagCircuit:
    counts, round_data = _scheme_layout(params)
    w = params.w
    syn = w
    ops: list[Op] = []
    flag_labels: list[str] = []
    flag_rounds: list[tuple[int, int]] = []
    slot_of: dict[tuple[int, int], int] = {}
    free: deque[int] = deque()
    n_slots = 0

    def open_flag(rnd: int, pos: int) -> None:
        nonlocal n_slots
        if free:
            slot = free.popleft()
        else:
            slot = n_slots
            n_slots += 1
        slot_of[(rnd, pos)] = slot
        q = w + 1 + slot
        ops.append(Op(OpKind.PREP_ZERO, (q,)))
        ops.append(Op(OpKind.CNOT, (syn, q)))

    def close_flag(rnd: int, pos: int) -> None:
        slot = slot_of.pop((rnd, pos))
        q = w + 1 + slot
        label = f"f{len(flag_labels)}"
        ops.append(Op(OpKind.CNOT, (syn, q)))
        ops.append(Op(OpKind.MEASURE_Z, (q,), label))
        flag_labels.append(label)
        flag_rounds.append((rnd, pos))
        free.append(slot)

    def data_cnot(rnd: int) -> None:
        k = round_data[rnd - 1]
        if k is not None:
            ops.append(Op(OpKind.CNOT, (syn, k - 1)))

    n_rounds = len(counts)
    ops.append(Op(OpKind.PREP_PLUS, (syn,)))
    for pos in range(1, counts[0] + 1):
        open_flag(1, pos)
    data_cnot(1)
    for rnd in range(1, n_rounds):
        # transition rnd -> rnd+1: interleave opens and closes, opens first,
        # so the armed flag count alternates between d-1 and d
        a, b = counts[rnd - 1], counts[rnd]
        for pos in range(1, max(a, b) + 1):
            if pos <= b:
                open_flag(rnd + 1, pos)
            if pos <= a:
                close_flag(rnd, pos)
        data_cnot(rnd + 1)
    for pos in range(1, counts[-1] + 1):
        close_flag(n_rounds, pos)
    ops.append(Op(OpKind.MEASURE_X, (syn,), "syn"))

    roles = tuple([QubitRole("data", k) for k in range(1, w + 1)]
                  + [QubitRole("syndrome", 0)]
                  + [QubitRole("flag", j) for j in range(n_slots)])
    return FlagCircuit(params=params, ops=tuple(ops), roles=roles,
                       flag_labels=tuple(flag_labels),
                       flag_rounds=tuple(flag_rounds),
                       round_data=tuple(round_data))


def build_conjecture_circuit(w: int, d: int) -> FlagCircuit:
    """Uniform scheme: every data CNOT sits inside a full round of d-1 flags."""
    return _assemble(SchemeParams(w, d, "conjecture"))


def build_modified_circuit(w: int, d: int) -> FlagCircuit:
    """Conjecture scheme preceded by (t+1)^2 dummy (flag-only) rounds.

    The dummy prefix guarantees the decoder an observed-quiet start window
    under any combination of at most t faults.
    """
    return _assemble(SchemeParams(w, d, "modified"))


def build_optimized_circuit(w: int, d: int) -> FlagCircuit:
    """Tapered scheme: flag counts ramp 0,1,..,d-1, hold, then ramp down."""
    return _assemble(SchemeParams(w, d, "optimized"))


def build_bare_circuit(w: int, d: int) -> FlagCircuit:
    """Unflagged syndrome extraction; the negative control for rule search."""
    return _assemble(SchemeParams(w, d, "bare"))


def build_circuit(w: int, d: int, kind: str) -> FlagCircuit:
    return _assemble(SchemeParams(w, d, kind))


def flags_per_data_cnot(circuit: FlagCircuit) -> tuple[int, ...]:
    """Number of armed flags protecting each data CNOT, in round order."""
    armed: set[int] = set()
    fresh: set[int] = set()
    out: list[int] = []
    for op in circuit.ops:
        if op.kind is OpKind.PREP_ZERO:
            fresh.add(op.qubits[0])
        elif op.kind is OpKind.CNOT:
            c, tgt = op.qubits
            if tgt < circuit.w:
                out.append(len(armed))
            elif tgt in fresh:
                fresh.discard(tgt)
                armed.add(tgt)
            elif tgt in armed:
                armed.discard(tgt)
    return tuple(out)


def peak_live_ancillas(circuit: FlagCircuit) -> tuple[int, int]:
    """(peak live flag slots, peak live ancillas incl. the syndrome qubit).

    A qubit is live from its preparation through its measurement.
    """
    live = 0
    syn_live = 0
    peak_flags = 0
    peak_total = 0
    for op in circuit.ops:
        if op.kind is OpKind.PREP_ZERO:
            live += 1
        elif op.kind is OpKind.PREP_PLUS:
            syn_live = 1
        peak_flags = max(peak_flags, live)
        peak_total = max(peak_total, live + syn_live)
        if op.kind is OpKind.MEASURE_Z:
            live -= 1
        elif op.kind is OpKind.MEASURE_X:
            syn_live = 0
    return peak_flags, peak_total


@dataclass(frozen=True)
class RoundStructureReport:
    ok: bool
    sites_checked: int
    violations: tuple[str, ...]


def validate_round_structure(circuit: FlagCircuit) -> RoundStructureReport:
    """Check the two-round flip law on every interior syndrome-fault site.

    Interior sites (between the completion of round 1's opening and the
    first closing of the last round) must flip exactly d-1 or d flags; after
    dropping the latest-closing flag from a d-flip site, the remaining flips
    must cover one round fully or split across two consecutive rounds with
    position words XORing to all-ones.  Only uniform-count schemes
    (conjecture, modified) have this structure.
    """
    from . import pauli  # local import; pauli depends on this module

    params = circuit.params
    if params.kind not in ("conjecture", "modified"):
        raise ValueError("round-structure validation applies to uniform-count "
                         f"schemes, not {params.kind!r}")
    d = params.d
    width = d - 1
    full = (1 << width) - 1
    syn = circuit.syndrome_qubit

    # locate the window structurally: open CNOTs follow their slot's P0
    n_open1 = sum(1 for r, _ in circuit.flag_rounds if r == 1)
    opens_seen = 0
    win_lo = None
    win_hi = None
    last_round_first = circuit.flag_labels[
        circuit.flag_rounds.index((circuit.n_rounds, 1))]
    prev_prepped: int | None = None
    for tau, op in enumerate(circuit.ops):
        if op.kind is OpKind.PREP_ZERO:
            prev_prepped = op.qubits[0]
            continue
        if op.kind is OpKind.CNOT and op.qubits[1] == prev_prepped:
            opens_seen += 1
            if opens_seen == n_open1:
                win_lo = tau
        if op.kind is OpKind.MEASURE_Z and op.label == last_round_first:
            win_hi = tau - 1  # the closing CNOT right before this measurement
        prev_prepped = None
    assert win_lo is not None and win_hi is not None

    violations: list[str] = []
    checked = 0
    for tau in range(win_lo, win_hi):
        op = circuit.ops[tau]
        if op.kind not in (OpKind.CNOT, OpKind.PREP_PLUS):
            continue  # a site after P0/MZ is frame-equivalent to this one
        site = pauli.FaultSite(kind=pauli.SiteKind.SYNDROME_X, time=tau,
                               before=False, x_mask=1 << syn, z_mask=0)
        res = pauli.propagate_faults(circuit, [site])
        checked += 1
        n = res.flags.bit_count()
        if n not in (d - 1, d):
            violations.append(f"site after op {tau}: flips {n} flags, "
                              f"expected {d - 1} or {d}")
            continue
        hit = sorted(circuit.flag_rounds[i] for i in range(circuit.n_flags)
                     if res.flags >> i & 1)
        if n == d:
            hit = hit[:-1]  # drop the latest-closing flag
        rounds = sorted({r for r, _ in hit})
        word = 0
        for _, pos in hit:
            word ^= 1 << (pos - 1)
        if len(rounds) > 2 or (len(rounds) == 2 and rounds[1] - rounds[0] != 1):
            violations.append(f"site after op {tau}: flips span rounds "
                              f"{rounds}, expected one or two consecutive")
        elif word != full:
            violations.append(f"site after op {tau}: position words XOR to "
                              f"{word:0{width}b}, expected all-ones")
    return RoundStructureReport(ok=not violations, sites_checked=checked,
                                violations=tuple(violations))
