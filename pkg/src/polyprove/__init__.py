"""An interactive prover for a fixed-point logic with type-schematic definitions."""

__version__ = "0.1.0"
