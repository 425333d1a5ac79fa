"""Randomness-efficient rumor spreading: protocols, generators and their analysis."""

__version__ = "0.1.0"
