"""Core DCC: terms, parsing, type checking, normalization and game semantics."""
