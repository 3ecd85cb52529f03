"""SI constants used at the configuration boundary.

Internal computation never touches these; they enter only when converting a
dipole moment in C*m to the dimensionless coupling g and when de-normalizing
forces to newtons.
"""

HBAR = 1.054571817e-34  # J s
EPS0 = 8.8541878128e-12  # F/m
C_LIGHT = 299792458.0  # m/s
