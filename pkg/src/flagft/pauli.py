"""Pauli-frame propagation and fault-site enumeration.

Errors are tracked as X/Z bitmasks over the circuit's qubits.  CNOT
conjugation: X on the control copies to the target, Z on the target copies
to the control.  Preparations reset a qubit's frame bits (a stale error on
a reused flag slot must not leak into its next incarnation); measurements
read their outcome flip from the frame, then reset it.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from enum import Enum
from typing import Iterable

from .circuits import CircuitStructureError, FlagCircuit, Op, OpKind


@dataclass(frozen=True)
class PauliMask:
    """An n-qubit Pauli (phases ignored) as X and Z bitmasks."""

    n: int
    x: int = 0
    z: int = 0

    def __post_init__(self) -> None:
        full = (1 << self.n) - 1
        if self.x & ~full or self.z & ~full:
            raise ValueError("mask bits outside the qubit range")

    def compose(self, other: PauliMask) -> PauliMask:
        if other.n != self.n:
            raise ValueError("width mismatch")
        return PauliMask(self.n, self.x ^ other.x, self.z ^ other.z)

    @property
    def weight(self) -> int:
        return (self.x | self.z).bit_count()

    def is_identity(self) -> bool:
        return not (self.x | self.z)


def conjugate_through(op: Op, frame: PauliMask) -> PauliMask:
    """Push a Pauli frame through one operation.

    For measurements only the frame update is modeled (the qubit resets);
    outcome flips are the propagator's concern.
    """
    if max(op.qubits) >= frame.n:
        raise ValueError(f"op acts on qubit {max(op.qubits)} outside the "
                         f"{frame.n}-qubit frame")
    x, z = _apply_op(op, frame.x, frame.z)
    return PauliMask(frame.n, x, z)


def _apply_op(op: Op, x: int, z: int) -> tuple[int, int]:
    kind = op.kind
    if kind is OpKind.CNOT:
        c, t = op.qubits
        if x >> c & 1:
            x ^= 1 << t
        if z >> t & 1:
            z ^= 1 << c
        return x, z
    q = op.qubits[0]
    keep = ~(1 << q)
    return x & keep, z & keep  # prep or measurement resets the qubit


class SiteKind(Enum):
    SYNDROME_X = "syndrome_x"
    FLAG_FLIP = "flag_flip"
    DATA_CNOT_XP = "data_cnot_xp"


class FaultClass(Enum):
    FLAG = "flag"
    SYNDROME_WIDE = "syndrome_wide"      # flips d flags
    SYNDROME_NARROW = "syndrome_narrow"  # flips d-1 flags, or tail/taper
    IGNORABLE = "ignorable"


@dataclass(frozen=True)
class FaultSite:
    """A single ideal fault: Pauli masks injected before/after ops[time].

    ``unknown_mask`` marks data qubits whose error is an arbitrary unknown
    Pauli (the target of a faulty data CNOT); corrections there are free.
    """

    kind: SiteKind
    time: int
    before: bool
    x_mask: int
    z_mask: int = 0
    unknown_mask: int = 0
    cls: FaultClass | None = None


@dataclass(frozen=True)
class PropagationResult:
    """Net effect of a fault set on the measured circuit.

    ``flags``: bit i set iff flag measurement i flips (measurement-time
    order).  ``data_x``: X-error mask over data qubits (bit k-1 = qubit k).
    ``unknown``: union of unknown-Pauli data qubits.
    """

    flags: int
    syndrome_flip: bool
    data_x: int
    unknown: int


def propagate_faults(circuit: FlagCircuit,
                     faults: Iterable[FaultSite]) -> PropagationResult:
    """Walk the circuit once, injecting faults at their sites."""
    before: dict[int, tuple[int, int]] = {}
    after: dict[int, tuple[int, int]] = {}
    unknown = 0
    n_ops = len(circuit.ops)
    for site in faults:
        if not 0 <= site.time < n_ops:
            raise ValueError(f"fault site time {site.time} out of range")
        slot = before if site.before else after
        bx, bz = slot.get(site.time, (0, 0))
        slot[site.time] = (bx ^ site.x_mask, bz ^ site.z_mask)
        unknown |= site.unknown_mask

    x = z = 0
    flags = 0
    flag_i = 0
    syndrome_flip = 0
    for tau, op in enumerate(circuit.ops):
        if tau in before:
            bx, bz = before[tau]
            x ^= bx
            z ^= bz
        if op.kind is OpKind.MEASURE_Z:
            if x >> op.qubits[0] & 1:
                flags |= 1 << flag_i
            flag_i += 1
        elif op.kind is OpKind.MEASURE_X:
            syndrome_flip ^= z >> op.qubits[0] & 1
        x, z = _apply_op(op, x, z)
        if tau in after:
            ax, az = after[tau]
            x ^= ax
            z ^= az
    return PropagationResult(flags=flags, syndrome_flip=bool(syndrome_flip),
                             data_x=x & circuit.data_mask, unknown=unknown)


def classify_fault(circuit: FlagCircuit, site: FaultSite) -> FaultClass:
    """Assign a fault class from the site's standalone propagation.

    Uniform-count schemes admit only full-width interior flips; a partial
    flip that spreads a nontrivial data error there is a builder bug.
    Tapered schemes (optimized) legitimately produce partial flips.
    """
    if site.kind is SiteKind.FLAG_FLIP:
        return FaultClass.FLAG
    d = circuit.params.d
    res = propagate_faults(circuit, [site])
    n = res.flags.bit_count()
    if site.kind is SiteKind.DATA_CNOT_XP:
        return FaultClass.SYNDROME_WIDE if n == d else FaultClass.SYNDROME_NARROW
    trivial = res.data_x in (0, circuit.data_mask)
    if n == 0 and trivial:
        return FaultClass.IGNORABLE
    if n == d:
        return FaultClass.SYNDROME_WIDE
    if n == d - 1:
        return FaultClass.SYNDROME_NARROW
    if not trivial and circuit.params.kind in ("conjecture", "modified"):
        raise CircuitStructureError(
            f"syndrome fault at op {site.time} flips {n} flags but spreads "
            f"data error {res.data_x:#x}")
    return FaultClass.SYNDROME_NARROW


def enumerate_fault_sites(circuit: FlagCircuit) -> tuple[FaultSite, ...]:
    """All ideal single-fault sites, one representative per propagation class.

    Candidates: X on the syndrome ancilla after its preparation and after
    every CNOT; an outcome flip before every flag measurement; X-on-control
    with unknown-target Pauli after every data CNOT.  Sites with identical
    propagation signatures are merged, first in time order wins.
    """
    syn = circuit.syndrome_qubit
    candidates: list[FaultSite] = []
    for tau, op in enumerate(circuit.ops):
        if op.kind is OpKind.PREP_PLUS:
            candidates.append(FaultSite(SiteKind.SYNDROME_X, tau, False,
                                        1 << syn))
        elif op.kind is OpKind.CNOT:
            candidates.append(FaultSite(SiteKind.SYNDROME_X, tau, False,
                                        1 << syn))
            target = op.qubits[1]
            if target < circuit.w:
                candidates.append(FaultSite(SiteKind.DATA_CNOT_XP, tau, False,
                                            1 << syn,
                                            unknown_mask=1 << target))
        elif op.kind is OpKind.MEASURE_Z:
            candidates.append(FaultSite(SiteKind.FLAG_FLIP, tau, True,
                                        1 << op.qubits[0]))
    seen: set[tuple[int, bool, int, int]] = set()
    sites: list[FaultSite] = []
    for site in candidates:
        res = propagate_faults(circuit, [site])
        key = (res.flags, res.syndrome_flip, res.data_x, res.unknown)
        if key in seen:
            continue
        seen.add(key)
        sites.append(replace(site, cls=classify_fault(circuit, site)))
    return tuple(sites)


@dataclass(frozen=True)
class FaultCombo:
    """A set of distinct fault sites treated as occurring together."""

    sites: tuple[FaultSite, ...]

    def __len__(self) -> int:
        return len(self.sites)

    def count(self, cls: FaultClass) -> int:
        return sum(1 for s in self.sites if s.cls is cls)

    @property
    def two_qubit_count(self) -> int:
        return sum(1 for s in self.sites if s.kind is SiteKind.DATA_CNOT_XP)

    @property
    def error_budget(self) -> int:
        """Allowed residual weight: faults outside the two-qubit subset."""
        return len(self.sites) - self.two_qubit_count


def propagate_combo(circuit: FlagCircuit, combo: FaultCombo) -> PropagationResult:
    return propagate_faults(circuit, combo.sites)
