"""Social-choice procedures, majority stable sets and zero-sum matrix games
over exact rationals."""

__version__ = "0.1.0"
