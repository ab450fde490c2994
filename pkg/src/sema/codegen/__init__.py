"""Structural code skeletons and characterization tests."""

from .chartests import TestSpec, conforms, generate_characterization_tests, replay
from .skeleton import CodeUnit, generate_structural_code, guard_call_sequences, guard_sources

__all__ = [
    "TestSpec", "conforms", "generate_characterization_tests", "replay", "CodeUnit",
    "generate_structural_code", "guard_call_sequences", "guard_sources",
]
