"""Rule-based linting of natural-language requirements documents."""

__version__ = "0.1.0"
