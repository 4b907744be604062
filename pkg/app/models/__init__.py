"""Data models for geometry, arithmetic, experiment configs and reports."""
