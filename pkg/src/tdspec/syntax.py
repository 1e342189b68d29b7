"""Parsers, printers and fragment classification for every input language."""

from .prop import PropFormula, parse_prop, print_prop
from .qddc import FragmentTag, Formula, classify_fragment, parse_qddc, print_qddc
from .secenl import Nominated, SeCeNL, parse_secenl, print_secenl
from .specfile import SpecFile, parse_spec_file

__all__ = [
    "Formula",
    "FragmentTag",
    "Nominated",
    "PropFormula",
    "SeCeNL",
    "SpecFile",
    "classify_fragment",
    "parse_prop",
    "parse_qddc",
    "parse_secenl",
    "parse_spec_file",
    "print_prop",
    "print_qddc",
    "print_secenl",
]
