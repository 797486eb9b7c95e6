"""Finite groupoid extensions, their cocycles and obstructions."""
