"""Index iteration, equivariant symplectic homology ranks and Reeb orbit feasibility."""

__version__ = "0.1.0"
