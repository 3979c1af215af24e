"""Beltrami flows on the 3-torus, contact annuli, and template knots.

Subpackages by theme:

- :mod:`knotflow.beltrami` — the curl-eigenfield family on T^3, its contact
  form and Reeb conditions, singularity certification, and the round tight
  form on S^3.
- :mod:`knotflow.flow` — trajectory integration, return maps, Newton
  shooting for periodic orbits, Floquet multipliers, separatrix splitting.
- :mod:`knotflow.annulus` — characteristic foliations of annuli in the
  model structure dz + r^2 dtheta and the monodromy-prescription builder.
- :mod:`knotflow.templates` — Lorenz-like template combinatorics: orbit
  words, universality, braids, embedded curves, pairwise linking.
- :mod:`knotflow.invariants` — Gauss linking, writhe/self-linking,
  Alexander polynomials through the reduced Burau representation, and a
  conservative identification table.
- :mod:`knotflow.cli` — the ``knotflow`` command-line front end.
"""

__version__ = "0.1.0"

from knotflow.beltrami import AbcParams, Point3, Vec3, abc_velocity

__all__ = ["AbcParams", "Point3", "Vec3", "abc_velocity", "__version__"]
