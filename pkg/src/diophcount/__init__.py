"""Count, bound and classify natural-number solutions of Diophantine
equations over the boxes {1..N}^k."""

__version__ = "0.1.0"
