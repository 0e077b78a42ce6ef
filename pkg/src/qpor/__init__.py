"""Stateless model checking of mutex programs with unfolding-based partial-order reduction."""

from qpor.alternatives import INFINITE, AltConfig, alt, is_alternative, is_clue
from qpor.benchmarks import Formula3Sat, generate_3sat, generate_writers, load_bundled
from qpor.dsl import SourceProgram, format_program, parse, parse_file
from qpor.events import Configuration, EventStore
from qpor.explorer import ExplorationStats, Explorer, explore
from qpor.program import Action, Effect, Program, State, independent

__all__ = [
    "INFINITE", "AltConfig", "alt", "is_alternative", "is_clue",
    "Formula3Sat", "generate_3sat", "generate_writers", "load_bundled",
    "SourceProgram", "format_program", "parse", "parse_file",
    "Configuration", "EventStore", "ExplorationStats", "Explorer", "explore",
    "Action", "Effect", "Program", "State", "independent",
]
