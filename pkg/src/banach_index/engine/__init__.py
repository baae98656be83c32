"""Interval-valued propagation of thickness, thinness and the Yost indices."""
from .analyze import (MAX_PASSES, analyze, apply_rules, base_facts, explain, summary,
                      trace)
from .catalog import CATALOG, Rule, catalog_entries
from .core import (QUANTITIES, ContradictionError, Derivation, IndexInterval,
                   IndexReport, StructFlags)
from .rules import DEFAULT_ORDER, KNOWN_VALUES, predual

__all__ = [
    "MAX_PASSES", "analyze", "apply_rules", "base_facts", "explain", "summary", "trace",
    "CATALOG", "Rule", "catalog_entries", "QUANTITIES", "ContradictionError",
    "Derivation", "IndexInterval", "IndexReport", "StructFlags", "DEFAULT_ORDER",
    "KNOWN_VALUES", "predual",
]
