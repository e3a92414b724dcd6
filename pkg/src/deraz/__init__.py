"""Exact verification of derived Azumaya algebras and compact generators."""
__version__ = "0.1.0"
