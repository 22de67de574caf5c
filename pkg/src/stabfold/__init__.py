"""stabfold: exact cohomology of a one-parameter family of deformed exterior
DGAs over finite fields, with monodromy and spectral-sequence tooling."""

__version__ = "0.1.0"
