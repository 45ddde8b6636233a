"""Exhaustive bounded-fault verification and correction-rule search.

Every combination of at most t ideal faults is propagated (by XOR-composing
per-site propagation results); a scheme passes when, for each combination,
the residual data error after the applied correction has weight at most the
number of faults outside the two-qubit CNOT subset.  Residual weight is
counted on the known-error qubits only and modulo the measured stabilizer
(an all-ones data error is the measured operator itself, hence trivial).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Iterator

from .circuits import FlagCircuit
from .decoder import FlagPattern, InfeasiblePatternError, decode
from .pauli import FaultSite, SiteKind, enumerate_fault_sites

_CHUNK = 4096
_EXHAUSTIVE_W_LIMIT = 16


def residual_weight(error: int, unknown: int, correction: int, w: int) -> int:
    """Weight of the uncorrected error on known qubits, mod the stabilizer."""
    ones = (1 << w) - 1
    q = ones & ~unknown
    direct = ((error ^ correction) & q).bit_count()
    folded = ((error ^ correction ^ ones) & q).bit_count()
    return min(direct, folded)


@dataclass(frozen=True)
class ComboOutcome:
    """Propagated effect of one fault combination (site list indexes)."""

    sites: tuple[int, ...]
    error: int
    unknown: int
    budget: int


@dataclass(frozen=True)
class Counterexample:
    sites: tuple[int, ...]
    flags: int
    error: int
    unknown: int
    budget: int
    correction: int | None
    residual: int | None
    reason: str


@dataclass(frozen=True)
class FTReport:
    ok: bool
    mode: str
    max_faults: int
    n_sites: int
    combos_checked: int
    max_residual: int
    lower_bound_violations: int
    counterexample: Counterexample | None


@dataclass(frozen=True)
class RuleSearchResult:
    ok: bool
    max_faults: int
    n_sites: int
    combos_checked: int
    n_keys: int
    exhaustive: bool
    rules: dict[int, int] | None
    failed_key: int | None
    failed_records: tuple[ComboOutcome, ...]


@dataclass(frozen=True)
class CrossValidation:
    ok: bool
    search_ok: bool
    max_faults: int
    n_keys: int
    combos_checked: int
    mismatch: tuple[int, ComboOutcome, int, int] | None  # key, rec, corr, res


def _site_vectors(circuit: FlagCircuit,
                  sites: tuple[FaultSite, ...]) -> list[tuple[int, int, int, bool]]:
    from .pauli import propagate_faults

    vecs = []
    for site in sites:
        res = propagate_faults(circuit, [site])
        vecs.append((res.flags, res.data_x, res.unknown,
                     site.kind is SiteKind.DATA_CNOT_XP))
    return vecs


def _combo_stream(n_sites: int, max_faults: int) -> Iterator[tuple[int, ...]]:
    for size in range(max_faults + 1):
        yield from itertools.combinations(range(n_sites), size)


def _chunked(stream: Iterator, size: int) -> Iterator[list]:
    while True:
        block = list(itertools.islice(stream, size))
        if not block:
            return
        yield block


def _fold(vecs, combo) -> tuple[int, int, int, int]:
    flags = error = unknown = budget = 0
    for i in combo:
        f, e, u, star = vecs[i]
        flags ^= f
        error ^= e
        unknown |= u
        if not star:
            budget += 1
    return flags, error, unknown, budget


# ---------------------------------------------------------------------------
# worker plumbing: chunks are processed in submission order, so results are
# deterministic and independent of the worker count

_WORK: dict = {}


def _init_worker(payload) -> None:
    _WORK.update(payload)


def _map_chunks(payload: dict, worker, chunks: Iterable[list], jobs: int):
    if jobs <= 1:
        _init_worker(payload)
        try:
            for block in chunks:
                yield worker(block)
        finally:
            _WORK.clear()
        return
    import multiprocessing as mp

    ctx = mp.get_context()
    with ctx.Pool(jobs, initializer=_init_worker, initargs=(payload,)) as pool:
        yield from pool.imap(worker, chunks)
    _WORK.clear()


def _decoder_chunk(block: list[tuple[int, ...]]):
    vecs = _WORK["vecs"]
    flag_rounds = _WORK["flag_rounds"]
    n_rounds = _WORK["n_rounds"]
    width = _WORK["width"]
    dummy = _WORK["dummy"]
    w = _WORK["w"]
    params = _WORK["params"]
    checked = 0
    max_res = 0
    lb_bad = 0
    first = None
    for combo in block:
        checked += 1
        flags, error, unknown, budget = _fold(vecs, combo)
        words = [0] * n_rounds
        m = flags
        while m:
            i = (m & -m).bit_length() - 1
            rnd, pos = flag_rounds[i]
            words[rnd - 1] |= 1 << (pos - 1)
            m &= m - 1
        pattern = FlagPattern(rounds=tuple(words), width=width,
                              dummy_count=dummy, w=w)
        try:
            correction, trace = decode(pattern, params)
        except InfeasiblePatternError:
            if first is None:
                first = Counterexample(combo, flags, error, unknown, budget,
                                       None, None, "no_start_window")
            continue
        res = residual_weight(error, unknown, correction, w)
        max_res = max(max_res, res)
        if res > budget and first is None:
            first = Counterexample(combo, flags, error, unknown, budget,
                                   correction, res, "residual_exceeds_budget")
        if trace.final_weight > len(combo):
            lb_bad += 1
            if first is None:
                first = Counterexample(combo, flags, error, unknown, budget,
                                       correction, res,
                                       "lower_bound_exceeds_faults")
    return checked, max_res, lb_bad, first


def check_decoder_ft(circuit: FlagCircuit, max_faults: int | None = None,
                     jobs: int = 1) -> FTReport:
    """Verify the decoder against every combination of <= max_faults faults."""
    params = circuit.params
    if params.kind != "modified":
        raise ValueError("the decoder applies to modified-scheme circuits, "
                         f"not {params.kind!r}")
    k = params.t if max_faults is None else max_faults
    sites = enumerate_fault_sites(circuit)
    payload = {
        "vecs": _site_vectors(circuit, sites),
        "flag_rounds": circuit.flag_rounds,
        "n_rounds": circuit.n_rounds,
        "width": params.d - 1,
        "dummy": params.dummy_rounds,
        "w": circuit.w,
        "params": params,
    }
    chunks = _chunked(_combo_stream(len(sites), k), _CHUNK)
    combos = 0
    max_res = 0
    lb_bad = 0
    first = None
    for checked, res, bad, cex in _map_chunks(payload, _decoder_chunk,
                                              chunks, jobs):
        combos += checked
        max_res = max(max_res, res)
        lb_bad += bad
        if first is None:
            first = cex
    return FTReport(ok=first is None, mode="decoder", max_faults=k,
                    n_sites=len(sites), combos_checked=combos,
                    max_residual=max_res, lower_bound_violations=lb_bad,
                    counterexample=first)


def _dictionary_chunk(block: list[tuple[int, ...]]):
    vecs = _WORK["vecs"]
    out: dict[int, list[ComboOutcome]] = {}
    for combo in block:
        flags, error, unknown, budget = _fold(vecs, combo)
        out.setdefault(flags, []).append(
            ComboOutcome(combo, error, unknown, budget))
    return len(block), out


def collect_flag_dictionary(circuit: FlagCircuit, max_faults: int | None = None,
                            jobs: int = 1) -> dict[int, list[ComboOutcome]]:
    """Map each reachable flag pattern to the fault combinations causing it."""
    k = circuit.params.t if max_faults is None else max_faults
    sites = enumerate_fault_sites(circuit)
    payload = {"vecs": _site_vectors(circuit, sites)}
    chunks = _chunked(_combo_stream(len(sites), k), _CHUNK)
    merged: dict[int, list[ComboOutcome]] = {}
    for _, part in _map_chunks(payload, _dictionary_chunk, chunks, jobs):
        for key, recs in part.items():
            merged.setdefault(key, []).extend(recs)
    return merged


def _candidates(w: int, dictionary) -> tuple[list[int], bool]:
    ones = (1 << w) - 1
    if w <= _EXHAUSTIVE_W_LIMIT:
        pool: Iterable[int] = range(1 << w)
        exhaustive = True
    else:
        # restricted pool keeps SUCCESS sound (validity is still checked per
        # combo) but FAILURE is only advisory at such widths
        found = {0, ones}
        for recs in dictionary.values():
            for rec in recs:
                found.add(rec.error)
                found.add(rec.error ^ ones)
        pool = found
        exhaustive = False
    return sorted(pool, key=lambda v: (v.bit_count(), v)), exhaustive


def search_correction_rules(circuit: FlagCircuit,
                            max_faults: int | None = None,
                            jobs: int = 1) -> RuleSearchResult:
    """Find a minimum-weight correction per flag key valid for all its combos.

    Candidates are scanned in (weight, value) order, so rule tables are
    deterministic; the first key with an empty intersection aborts the
    search and is reported with its records.
    """
    w = circuit.w
    k = circuit.params.t if max_faults is None else max_faults
    dictionary = collect_flag_dictionary(circuit, k, jobs)
    combos = sum(len(v) for v in dictionary.values())
    n_sites = len(enumerate_fault_sites(circuit))
    cands, exhaustive = _candidates(w, dictionary)
    rules: dict[int, int] = {}
    for key in sorted(dictionary):
        recs = dictionary[key]
        hit = None
        for cand in cands:
            if all(residual_weight(r.error, r.unknown, cand, w) <= r.budget
                   for r in recs):
                hit = cand
                break
        if hit is None:
            return RuleSearchResult(ok=False, max_faults=k, n_sites=n_sites,
                                    combos_checked=combos,
                                    n_keys=len(dictionary),
                                    exhaustive=exhaustive, rules=None,
                                    failed_key=key,
                                    failed_records=tuple(recs))
        rules[key] = hit
    return RuleSearchResult(ok=True, max_faults=k, n_sites=n_sites,
                            combos_checked=combos, n_keys=len(dictionary),
                            exhaustive=exhaustive, rules=rules,
                            failed_key=None, failed_records=())


def cross_validate(circuit: FlagCircuit, max_faults: int | None = None,
                   jobs: int = 1) -> CrossValidation:
    """Check the decoder's corrections against the searched rule sets.

    For every reachable flag pattern the decoder's correction must satisfy
    each combination's residual constraint, i.e. lie in the same valid set
    the rule search draws from.
    """
    params = circuit.params
    if params.kind != "modified":
        raise ValueError("cross-validation runs on modified-scheme circuits")
    k = params.t if max_faults is None else max_faults
    dictionary = collect_flag_dictionary(circuit, k, jobs)
    combos = sum(len(v) for v in dictionary.values())
    search = search_correction_rules(circuit, k, jobs)
    w = circuit.w
    from .decoder import group_rounds

    for key in sorted(dictionary):
        correction, _ = decode(group_rounds(circuit, key), params)
        for rec in dictionary[key]:
            res = residual_weight(rec.error, rec.unknown, correction, w)
            if res > rec.budget:
                return CrossValidation(ok=False, search_ok=search.ok,
                                       max_faults=k, n_keys=len(dictionary),
                                       combos_checked=combos,
                                       mismatch=(key, rec, correction, res))
    return CrossValidation(ok=search.ok, search_ok=search.ok, max_faults=k,
                           n_keys=len(dictionary), combos_checked=combos,
                           mismatch=None)
