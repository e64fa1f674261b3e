"""Pauli-basis channel representations, magic measures and Rademacher bounds."""
