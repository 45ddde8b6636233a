"""Command-line front end: build, verify, decode, replay.

Exit codes: 0 = success / verdict pass / replay reproduced, 1 = verdict fail
or replay not reproduced, 2 = usage or input errors.  The default worker
count comes from the FLAGFT_JOBS environment variable (1 if unset); reports
are byte-identical for any worker count.
"""

from __future__ import annotations

import argparse
import os
import sys

from .circuits import SCHEME_KINDS, build_circuit
from .decoder import InfeasiblePatternError, decode, group_rounds
from .pauli import enumerate_fault_sites, propagate_faults
from .textformat import (FormatError, bits_to_str, emit_circuit, emit_report,
                         parse_circuit, parse_report)
from .verifier import (check_decoder_ft, cross_validate, residual_weight,
                       search_correction_rules)

USAGE_EXIT = 2


def _default_jobs() -> int:
    try:
        return max(1, int(os.environ.get("FLAGFT_JOBS", "1")))
    except ValueError:
        return 1


def _read_circuit(path: str) -> "FlagCircuit":  # noqa: F821
    try:
        with open(path, encoding="utf-8") as fh:
            return parse_circuit(fh.read())
    except OSError as exc:
        raise SystemExit(f"flagft: cannot read {path}: {exc.strerror}")
    except FormatError as exc:
        raise SystemExit(f"flagft: {path}: {exc}")


def _write(path: str | None, text: str) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)


def cmd_build(args: argparse.Namespace) -> int:
    try:
        circuit = build_circuit(args.w, args.d, args.scheme)
    except ValueError as exc:
        print(f"flagft: {exc}", file=sys.stderr)
        return USAGE_EXIT
    _write(args.output, emit_circuit(circuit))
    return 0


def cmd_verify(args: argparse.Namespace) -> int:
    circuit = _read_circuit(args.circuit)
    try:
        if args.mode == "decoder":
            result = check_decoder_ft(circuit, max_faults=args.max_faults,
                                      jobs=args.jobs)
        elif args.mode == "search":
            result = search_correction_rules(circuit,
                                             max_faults=args.max_faults,
                                             jobs=args.jobs)
        else:
            result = cross_validate(circuit, max_faults=args.max_faults,
                                    jobs=args.jobs)
    except ValueError as exc:
        print(f"flagft: {exc}", file=sys.stderr)
        return USAGE_EXIT
    _write(args.output, emit_report(result, circuit))
    return 0 if result.ok else 1


def cmd_decode(args: argparse.Namespace) -> int:
    circuit = _read_circuit(args.circuit)
    outcomes = "" if args.flags == "-" else args.flags
    try:
        pattern = group_rounds(circuit, outcomes)
        correction, trace = decode(pattern, circuit.params)
    except (ValueError, InfeasiblePatternError) as exc:
        print(f"flagft: {exc}", file=sys.stderr)
        return USAGE_EXIT
    out = [f"correction {bits_to_str(correction, circuit.w)}"]
    if args.trace:
        width = circuit.params.d - 1
        out.append(f"trace start_round {trace.start_round}")
        out.append(f"trace last_active_round "
                   f"{trace.last_active_round or 0}")
        out.append(f"trace corner_bit {bits_to_str(trace.corner_bit, width)}")
        out.append(f"trace corner_fix {int(trace.corner_fix_applied)}")
        trig = ",".join(map(str, trace.triggered_rounds)) or "-"
        out.append(f"trace triggered {trig}")
        for off, acc in enumerate(trace.accumulators):
            out.append(f"trace acc {trace.start_round + off} "
                       f"{bits_to_str(acc, width)}")
        out.append(f"trace final_weight {trace.final_weight}")
    print("\n".join(out))
    return 0


def _replay_counterexample(rep, jobs: int) -> bool:
    """Re-derive the recorded violation from the embedded circuit."""
    circuit = rep.circuit
    sites = enumerate_fault_sites(circuit)
    by_key = {(s.kind, s.time, s.before): s for s in sites}
    try:
        combo = [by_key[key] for key in rep.counterexample_sites]
    except KeyError:
        return False
    res = propagate_faults(circuit, combo)
    cex = rep.counterexample
    if res.flags != cex.get("flags") or res.data_x != cex.get("error"):
        return False
    budget = sum(1 for s in combo if not s.unknown_mask)
    if budget != cex.get("budget"):
        return False
    reason = cex.get("reason")
    try:
        correction, trace = decode(group_rounds(circuit, res.flags),
                                   circuit.params)
    except InfeasiblePatternError:
        return reason == "no_start_window"
    if reason == "residual_exceeds_budget":
        residual = residual_weight(res.data_x, res.unknown, correction,
                                   circuit.w)
        return residual > budget and residual == cex.get("residual")
    if reason == "lower_bound_exceeds_faults":
        return trace.final_weight > len(combo)
    return False


def cmd_replay(args: argparse.Namespace) -> int:
    try:
        with open(args.report, encoding="utf-8") as fh:
            rep = parse_report(fh.read())
    except OSError as exc:
        print(f"flagft: cannot read {args.report}: {exc.strerror}",
              file=sys.stderr)
        return USAGE_EXIT
    except FormatError as exc:
        print(f"flagft: {args.report}: {exc}", file=sys.stderr)
        return USAGE_EXIT

    circuit = rep.circuit
    k = rep.stats.get("max_faults")
    reproduced = False
    if rep.mode == "decoder":
        fresh = check_decoder_ft(circuit, max_faults=k, jobs=args.jobs)
        reproduced = fresh.ok == rep.ok
        if reproduced and not rep.ok:
            reproduced = _replay_counterexample(rep, args.jobs)
    elif rep.mode == "search":
        fresh = search_correction_rules(circuit, max_faults=k, jobs=args.jobs)
        reproduced = fresh.ok == rep.ok
        if reproduced:
            if rep.ok:
                reproduced = fresh.rules == rep.rules
            else:
                reproduced = fresh.failed_key == rep.failed_key
    else:
        fresh = cross_validate(circuit, max_faults=k, jobs=args.jobs)
        reproduced = fresh.ok == rep.ok
    verdict = "pass" if rep.ok else "fail"
    yn = "yes" if reproduced else "no"
    print(f"replay mode={rep.mode} verdict={verdict} reproduced={yn}")
    return 0 if reproduced else 1


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="flagft",
        description="Flag fault-tolerant syndrome-extraction toolkit")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("build", help="build a circuit and emit its listing")
    p.add_argument("--w", type=int, required=True, help="stabilizer weight")
    p.add_argument("--d", type=int, required=True, help="odd distance")
    p.add_argument("--scheme", choices=SCHEME_KINDS, required=True)
    p.add_argument("-o", "--output", default=None,
                   help="output path (default stdout)")
    p.set_defaults(func=cmd_build)

    p = sub.add_parser("verify", help="run FT verification on a circuit file")
    p.add_argument("circuit", help="circuit listing path")
    p.add_argument("--mode", choices=("decoder", "search", "cross"),
                   required=True)
    p.add_argument("--max-faults", type=int, default=None,
                   help="fault-count bound (default t)")
    p.add_argument("--jobs", type=int, default=_default_jobs(),
                   help="worker processes (default FLAGFT_JOBS or 1)")
    p.add_argument("-o", "--output", default=None,
                   help="report path (default stdout)")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("decode", help="decode a flag-outcome string")
    p.add_argument("circuit", help="circuit listing path")
    p.add_argument("--flags", required=True,
                   help="outcome bits in measurement order ('-' for none)")
    p.add_argument("--trace", action="store_true",
                   help="dump the scan trace")
    p.set_defaults(func=cmd_decode)

    p = sub.add_parser("replay", help="re-execute a report's verdict")
    p.add_argument("report", help="report path")
    p.add_argument("--jobs", type=int, default=_default_jobs())
    p.set_defaults(func=cmd_replay)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = make_parser().parse_args(argv)
    try:
        return args.func(args)
    except SystemExit as exc:
        if isinstance(exc.code, str):
            print(exc.code, file=sys.stderr)
            return USAGE_EXIT
        raise


if __name__ == "__main__":
    sys.exit(main())
