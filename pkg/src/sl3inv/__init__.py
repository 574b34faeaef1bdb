"""sl3inv: invariant differential operators on SL3(R)/A.

Exact operator algebra (PBW normal forms, the quotient algebra and its
relations, basis expansion, center) plus double-precision verification
of every closed-form coordinate operator and the self-adjointness
ingredients.
"""

from .scalars import GaussianRational, IMAG, ONE, ZERO, rational

__all__ = ["GaussianRational", "IMAG", "ONE", "ZERO", "rational"]

__version__ = "0.1.0"
