"""Palindromic and generalized Smarandache palindromic permutations of S_n."""

__version__ = "0.1.0"

__all__ = ["config", "pipeline", "main"]
