"""Security analysis, simulation and code generation for app storyboards."""

from .dsl import parse_source, pretty_print
from .flow import analyze
from .model import resolve

__version__ = "0.1.0"


def load_storyboard(source, file: str = "<input>"):
    """Parse and resolve storyboard source text (``str`` or UTF-8 ``bytes``)."""
    return resolve(parse_source(source, file))


__all__ = ["analyze", "load_storyboard", "parse_source", "pretty_print", "resolve", "__version__"]
