"""Second-order superintegrable systems on the complex Euclidean plane and 2-sphere.

Submodules: exact (Gaussian rationals), phase (observables and brackets),
orbits (classification of quadratic elements), catalog (the systems),
verify (checks and tables), dynamics (flows), cli.
"""

__version__ = "0.1.0"
