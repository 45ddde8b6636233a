"""Flag fault-tolerant syndrome extraction for weight-w X stabilizers.

Builders produce flag circuits (uniform, dummy-round-prefixed, or tapered),
the decoder turns flag outcomes into data corrections by a left-to-right
round scan, and the verifier exhaustively checks bounded-fault combinations
or searches for correction rule tables.
"""

from .circuits import (CircuitStructureError, FlagCircuit, Op, OpKind,
                       QubitRole, RoundStructureReport, SCHEME_KINDS,
                       SchemeParams, build_bare_circuit, build_circuit,
                       build_conjecture_circuit, build_modified_circuit,
                       build_optimized_circuit, flags_per_data_cnot,
                       peak_live_ancillas, validate_round_structure)
from .decoder import (DecoderTrace, FlagPattern, InfeasiblePatternError,
                      decode, fault_count_lower_bound, group_rounds,
                      identify_start_rounds)
from .pauli import (FaultClass, FaultCombo, FaultSite, PauliMask,
                    PropagationResult, SiteKind, classify_fault,
                    conjugate_through, enumerate_fault_sites,
                    propagate_combo, propagate_faults)
from .textformat import (FormatError, ParsedReport, bits_to_str,
                         emit_circuit, emit_report, parse_circuit,
                         parse_report, str_to_bits)
from .verifier import (ComboOutcome, Counterexample, CrossValidation,
                       FTReport, RuleSearchResult, check_decoder_ft,
                       collect_flag_dictionary, cross_validate,
                       residual_weight, search_correction_rules)

__version__ = "0.1.0"

__all__ = [
    "CircuitStructureError", "FlagCircuit", "Op", "OpKind", "QubitRole",
    "RoundStructureReport", "SCHEME_KINDS", "SchemeParams",
    "build_bare_circuit", "build_circuit", "build_conjecture_circuit",
    "build_modified_circuit", "build_optimized_circuit",
    "flags_per_data_cnot", "peak_live_ancillas", "validate_round_structure",
    "DecoderTrace", "FlagPattern", "InfeasiblePatternError", "decode",
    "fault_count_lower_bound", "group_rounds", "identify_start_rounds",
    "FaultClass", "FaultCombo", "FaultSite", "PauliMask",
    "PropagationResult", "SiteKind", "classify_fault", "conjugate_through",
    "enumerate_fault_sites", "propagate_combo", "propagate_faults",
    "FormatError", "ParsedReport", "bits_to_str", "emit_circuit",
    "emit_report", "parse_circuit", "parse_report", "str_to_bits",
    "ComboOutcome", "Counterexample", "CrossValidation", "FTReport",
    "RuleSearchResult", "check_decoder_ft", "collect_flag_dictionary",
    "cross_validate", "residual_weight", "search_correction_rules",
    "__version__",
]
