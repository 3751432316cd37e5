"""Weight-test certificates for equations over torsion-free groups."""

__version__ = "0.1.0"
