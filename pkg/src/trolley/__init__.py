"""Model checker, dilemma explorer and proof kernel for the coalition dilemma logic."""
__version__ = "0.1.0"
