"""Adaptive decoding of flag outcomes for the modified (dummy-round) scheme.

The decoder groups flag outcomes into per-round words of width d-1, finds a
quiet start window inside the dummy prefix, then scans rounds left to right
with an accumulator; whenever the accumulated weight exceeds t it applies an
X correction on every data qubit from the current round's target onward and
folds the all-ones word back into the accumulator.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .circuits import FlagCircuit, SchemeParams


class InfeasiblePatternError(ValueError):
    """No quiet start window: the pattern cannot come from <= t faults."""


@dataclass(frozen=True)
class FlagPattern:
    """Flag outcomes grouped by round.

    ``rounds[i]`` is the word of round i+1; bit p-1 is the flag at position
    p (positions ordered by closing time).  ``dummy_count`` leading rounds
    have no data CNOT.
    """

    rounds: tuple[int, ...]
    width: int
    dummy_count: int
    w: int


def group_rounds(circuit: FlagCircuit,
                 outcomes: int | str | Sequence[int]) -> FlagPattern:
    """Fold time-ordered flag outcomes into per-round words.

    ``outcomes`` may be a bitmask (bit i = flag measurement i), a 0/1
    string in measurement order, or a sequence of ints.
    """
    mask = _outcome_mask(circuit, outcomes)
    words = [0] * circuit.n_rounds
    m = mask
    while m:
        i = (m & -m).bit_length() - 1
        rnd, pos = circuit.flag_rounds[i]
        words[rnd - 1] |= 1 << (pos - 1)
        m &= m - 1
    return FlagPattern(rounds=tuple(words), width=circuit.params.d - 1,
                       dummy_count=sum(1 for k in circuit.round_data
                                       if k is None),
                       w=circuit.w)


def _outcome_mask(circuit: FlagCircuit,
                  outcomes: int | str | Sequence[int]) -> int:
    if isinstance(outcomes, int):
        if outcomes >> circuit.n_flags:
            raise ValueError("outcome mask wider than the flag count")
        return outcomes
    if len(outcomes) != circuit.n_flags:
        raise ValueError(f"expected {circuit.n_flags} outcomes, "
                         f"got {len(outcomes)}")
    mask = 0
    for i, bit in enumerate(outcomes):
        if isinstance(bit, str) and bit not in "01":
            raise ValueError(f"bad outcome character {bit!r}")
        if int(bit):
            mask |= 1 << i
    return mask


def identify_start_rounds(pattern: FlagPattern, params: SchemeParams) -> int:
    """First scanned round: just after the rightmost all-zero run of
    length >= t inside the dummy prefix."""
    t = params.t
    start = None
    run = 0
    for i in range(1, pattern.dummy_count + 1):
        run = run + 1 if pattern.rounds[i - 1] == 0 else 0
        if run >= t:
            start = i + 1
    if start is None:
        raise InfeasiblePatternError(
            f"no quiet window of {t} rounds in the {pattern.dummy_count} "
            f"dummy rounds")
    return start


@dataclass(frozen=True)
class DecoderTrace:
    start_round: int
    last_active_round: int | None  # rightmost nontrivial scanned round
    corner_bit: int                # its latest-closing set flag, as a word
    corner_fix_applied: bool
    accumulators: tuple[int, ...]  # accumulator after each scanned round
    triggered_rounds: tuple[int, ...]
    correction: int
    final_weight: int


def decode(pattern: FlagPattern,
           params: SchemeParams) -> tuple[int, DecoderTrace]:
    """Return (data correction mask, trace) for a modified-scheme pattern."""
    t = params.t
    width = 2 * t
    if pattern.width != width:
        raise ValueError(f"pattern width {pattern.width} != {width}")
    full_round = (1 << width) - 1
    all_data = (1 << pattern.w) - 1
    n = len(pattern.rounds)
    start = identify_start_rounds(pattern, params)

    last_active = None
    for i in range(start, n + 1):
        if pattern.rounds[i - 1]:
            last_active = i
    corner_bit = 0
    if last_active is not None:
        corner_bit = 1 << (pattern.rounds[last_active - 1].bit_length() - 1)

    m = 0
    correction = 0
    fixed = False
    accs: list[int] = []
    triggered: list[int] = []
    for i in range(start, n + 1):
        v = m ^ pattern.rounds[i - 1]
        if i == last_active and v.bit_count() == t:
            v ^= corner_bit
            fixed = True
        m = v
        if m.bit_count() > t:
            triggered.append(i)
            k = i - pattern.dummy_count
            if k < 1:
                correction ^= all_data  # dummy round: every data CNOT is later
            else:
                correction ^= all_data & ~((1 << (k - 1)) - 1)
            m ^= full_round
        accs.append(m)
    return correction, DecoderTrace(
        start_round=start, last_active_round=last_active,
        corner_bit=corner_bit, corner_fix_applied=fixed,
        accumulators=tuple(accs), triggered_rounds=tuple(triggered),
        correction=correction, final_weight=m.bit_count())


def fault_count_lower_bound(trace: DecoderTrace) -> int:
    """The final accumulator weight lower-bounds the number of faults."""
    return trace.final_weight
