"""Centralized numerical tolerances.

Every iterative routine and every cross-check takes its threshold from one
Tolerances record so that a run can be tightened or relaxed in a single place
(the CLI exposes the knobs as --tol-* flags).
"""

from __future__ import annotations

from dataclasses import dataclass, replace


@dataclass(frozen=True)
class Tolerances:
    # iterative solvers
    eigen: float = 1e-12        # Jacobi off-diagonal target, relative to ||A||_F
    roots: float = 1e-10        # Aberth-Ehrlich residual target, scaled
    newton: float = 1e-10       # Newton residual target (inf norm)
    # cross-checks
    match: float = 1e-8         # spectrum multiset comparison, relative
    bae: float = 1e-6           # scaled Bethe-equation residual certificate
    qes: float = 1e-10          # invariant-subspace overflow, relative
    algebra: float = 1e-10      # commutator identities, relative
    conjugation: float = 1e-9   # monomial <-> orthonormal basis similarity
    energy_cross: float = 1e-9  # closed-form energy vs leading-coefficient ratio
    published: float = 1e-10    # regression against printed polynomials
    symmetry: float = 1e-12     # Hamiltonian asymmetry assertion
    # root clustering
    cluster: float = 1e-6       # roots closer than this (x scale) are a cluster
    bae_guard: float = 1e-4     # min root spacing for the residual certificate


DEFAULT_TOLS = Tolerances()


def with_overrides(tols: Tolerances, **kwargs: float) -> Tolerances:
    """Return a copy of `tols` with the given fields replaced (None skipped)."""
    updates = {k: v for k, v in kwargs.items() if v is not None}
    return replace(tols, **updates) if updates else tols
