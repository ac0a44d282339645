"""Minimalist Grammar parsing and constraint-based lexicon inference."""
