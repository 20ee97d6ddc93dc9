"""Numerical experiments built on the norm kernel."""

from .blocks import AverageSpec, build_average, build_averages, runs_ell_norm, runs_norm, successive_specs
from .claim import ClaimReport, FuzzSummary, claim_check, claim_fuzz, random_claim_case
from .l1const import L1Bracket, l1_lower_bracket, l1_lower_constant, unit_blocks
from .reports import REPORT_SCHEMA, csv_report, json_report
from .sweeps import INTEGER_F_POINTS, TrendRow, TrendTable, lemma4_checkpoints, lemma4_sweep, lemma6_trend
from .witness import WitnessReport, build_witness_z1, build_witness_z2, distortion_report

__all__ = [
    "AverageSpec", "build_average", "build_averages", "runs_norm", "runs_ell_norm", "successive_specs",
    "ClaimReport", "FuzzSummary", "claim_check", "claim_fuzz", "random_claim_case",
    "L1Bracket", "l1_lower_bracket", "l1_lower_constant", "unit_blocks",
    "REPORT_SCHEMA", "csv_report", "json_report",
    "INTEGER_F_POINTS", "TrendRow", "TrendTable", "lemma4_checkpoints", "lemma4_sweep", "lemma6_trend",
    "WitnessReport", "build_witness_z1", "build_witness_z2", "distortion_report",
]
