"""Hanabi engine, information-set search agents, learned evaluation
functions, opponent modelling, and a reproducible experiment harness."""

__version__ = "0.1.0"
