"""Double Grothendieck polynomials for symplectic and odd orthogonal Grassmannians."""

__version__ = "0.1.0"
