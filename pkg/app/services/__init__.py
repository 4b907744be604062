"""Enumeration, arithmetic and statistics services."""
