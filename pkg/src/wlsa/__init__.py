"""Weisfeiler-Leman refinement, Sherali-Adams relaxations and related exact decision procedures
for finite relational and valued structures."""

__version__ = "0.1.0"
