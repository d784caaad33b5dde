"""Cooperative customer-supplier planning workbench.

Simulates rolling-horizon demand exchange between a customer and a
supplier, plans supplier production with an in-house MILP solver, and
evaluates competing demand-management strategies with decision-theoretic
criteria (Hurwicz envelopes, regret tables) for a two-sided dashboard.
"""

__version__ = "0.1.0"
