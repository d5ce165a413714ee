"""Heuristic detection of small integer relations among real numbers.

Rational linear independence of subdivision integrals cannot be decided in
floating point; a PSLQ search for relations with bounded coefficients is the
honest substitute: a found relation is a genuine failure witness, absence of
one is a heuristic pass.
"""

from __future__ import annotations

import mpmath

DEFAULT_MAX_COEFF = 10**6
DEFAULT_TOL = 1e-12


def find_integer_relation(
    values,
    max_coeff: int = DEFAULT_MAX_COEFF,
    tol: float = DEFAULT_TOL,
):
    """Integer coefficients a with sum a_i * values_i ~ 0 (|a_i| <= max_coeff),
    or None when no relation is detected at the working precision."""
    vals = [float(v) for v in values]
    if len(vals) < 2:
        return None
    scale = max(abs(v) for v in vals)
    if scale == 0.0:
        return [1] + [0] * (len(vals) - 1)
    with mpmath.workdps(15):
        rel = mpmath.pslq(
            [mpmath.mpf(v) for v in vals],
            tol=mpmath.mpf(tol) * scale,
            maxcoeff=max_coeff,
            maxsteps=10000,
        )
    if rel is None:
        return None
    return [int(a) for a in rel]
