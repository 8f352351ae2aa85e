"""Text syntax for schemas (``.tgs``) and instances (``.tgi``)."""

from .lexer import Diagnostic
from .parser import parse_instance, parse_schema
from .printer import format_value, print_instance, print_schema, print_violations

__all__ = [
    "Diagnostic",
    "format_value",
    "parse_instance",
    "parse_schema",
    "print_instance",
    "print_schema",
    "print_violations",
]
