"""Physical constants (SI).

All internal rates and frequencies in this package are angular (rad/s).
These constants enter only at the boundaries: occupation/temperature
conversions and dimensional force noise.
"""

HBAR = 1.0545718e-34   # J s
KB = 1.380649e-23      # J/K
