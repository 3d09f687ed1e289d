"""Seed-reproducible Monte Carlo simulator for NoSQL schema-migration
strategies: eager, lazy, incremental, and predictive."""

__version__ = "0.1.0"
