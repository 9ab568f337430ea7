"""SAT-based planner and benchmark toolkit for grid puzzle games."""

__version__ = "0.1.0"
