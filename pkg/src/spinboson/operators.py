"""Normal-ordered calculus of differential operators with polynomial coefficients.

An operator is kept in the normal form  sum_d P_d(z) (d/dz)^d  with every
derivative moved to the right.  Products are expanded with the Leibniz-rule
identity

    z^a D^d  o  z^b D^e  =  sum_{t=0}^{min(d,b)} C(d,t) b!/(b-t)!
                            z^{a+b-t} D^{d+e-t}

On each invariant sector the model Hamiltonian becomes such an operator of
order max(r + sum_i k_i, s); this module assembles it and exposes its action
on the monomial basis {1, z, z^2, ...}.
"""

from __future__ import annotations

from fractions import Fraction
from math import comb, factorial

import numpy as np

from .model import ModelSpec, SectorLabels, boson_occupations

Poly = np.ndarray  # ascending coefficients, index = power of z


def poly_trim(coeffs) -> Poly:
    """Drop trailing zeros; the zero polynomial is the empty array."""
    arr = np.atleast_1d(np.asarray(coeffs, dtype=float))
    nz = np.nonzero(arr)[0]
    if nz.size == 0:
        return np.zeros(0)
    return arr[: nz[-1] + 1].copy()


def poly_eval(coeffs, z):
    """Horner evaluation; works for scalar or array z, real or complex."""
    arr = np.asarray(coeffs)
    if arr.size == 0:
        return np.zeros_like(np.asarray(z))
    result = np.full_like(np.asarray(z, dtype=np.result_type(arr, z)), arr[-1])
    for c in arr[-2::-1]:
        result = result * z + c
    return result


class EulerOperator:
    """A normally ordered operator  sum_d P_d(z) D^d,  D = d/dz."""

    __slots__ = ("terms",)

    def __init__(self, terms: dict[int, Poly] | None = None):
        clean: dict[int, Poly] = {}
        for d, coeffs in (terms or {}).items():
            p = poly_trim(coeffs)
            if p.size:
                clean[int(d)] = p
        self.terms = clean

    # -- constructors -------------------------------------------------------

    @staticmethod
    def zero() -> "EulerOperator":
        return EulerOperator({})

    @staticmethod
    def identity() -> "EulerOperator":
        return EulerOperator({0: [1.0]})

    @staticmethod
    def z_poly(coeffs) -> "EulerOperator":
        """Multiplication operator by the polynomial with the given coefficients."""
        return EulerOperator({0: coeffs})

    @staticmethod
    def derivative(order: int = 1) -> "EulerOperator":
        return EulerOperator({order: [1.0]})

    @staticmethod
    def euler_affine(const: float, slope: float) -> "EulerOperator":
        """const + slope * z D."""
        return EulerOperator({0: [const], 1: [0.0, slope]})

    # -- algebra -------------------------------------------------------------

    def __add__(self, other: "EulerOperator") -> "EulerOperator":
        out: dict[int, np.ndarray] = {}
        for d in set(self.terms) | set(other.terms):
            a = self.terms.get(d, np.zeros(0))
            b = other.terms.get(d, np.zeros(0))
            n = max(a.size, b.size)
            c = np.zeros(n)
            c[: a.size] += a
            c[: b.size] += b
            out[d] = c
        return EulerOperator(out)

    def __sub__(self, other: "EulerOperator") -> "EulerOperator":
        return self + (-1.0) * other

    def __rmul__(self, scalar: float) -> "EulerOperator":
        return EulerOperator({d: scalar * p for d, p in self.terms.items()})

    def __matmul__(self, other: "EulerOperator") -> "EulerOperator":
        """Normally ordered composition self o other."""
        out: dict[int, np.ndarray] = {}
        for d, pd in self.terms.items():
            for e, qe in other.terms.items():
                for b, qb in enumerate(qe):
                    if qb == 0.0:
                        continue
                    for t in range(min(d, b) + 1):
                        w = qb * comb(d, t) * factorial(b) / factorial(b - t)
                        order = d + e - t
                        shift = b - t
                        tgt = out.setdefault(order, np.zeros(pd.size + shift))
                        if tgt.size < pd.size + shift:
                            grown = np.zeros(pd.size + shift)
                            grown[: tgt.size] = tgt
                            out[order] = tgt = grown
                        tgt[shift : shift + pd.size] += w * pd
        return EulerOperator(out)

    # -- queries -------------------------------------------------------------

    @property
    def order(self) -> int:
        """Highest derivative order present (zero operator has order 0)."""
        return max(self.terms, default=0)

    def coefficient(self, d: int) -> Poly:
        return self.terms.get(d, np.zeros(0)).copy()

    def max_abs_coeff(self) -> float:
        return max((np.max(np.abs(p)) for p in self.terms.values()), default=0.0)

    def apply_to_coeffs(self, coeffs) -> np.ndarray:
        """Coefficients of (self psi) given the coefficients of psi."""
        c = np.asarray(coeffs)
        n_in = c.size
        out_len = n_in + max((p.size - 1 - d for d, p in self.terms.items()),
                             default=0)
        out = np.zeros(max(out_len, 1), dtype=np.result_type(c, float))
        for d, pd in self.terms.items():
            for n in range(d, n_in):
                if c[n] == 0:
                    continue
                fall = factorial(n) // factorial(n - d)
                base = n - d
                out[base : base + pd.size] += c[n] * fall * pd
        return out

    def divide_by_z(self, rtol: float = 1e-12) -> "EulerOperator":
        """Left-divide by z, i.e. strip one power of z off every coefficient.

        Each P_d must have (numerically) vanishing constant term; a nonzero
        remainder means the operator does not actually annihilate z^{-1}
        content, which for the assembled Hamiltonian signals a label bug.
        """
        scale = max(self.max_abs_coeff(), 1.0)
        out: dict[int, np.ndarray] = {}
        for d, pd in self.terms.items():
            if abs(pd[0]) > rtol * scale:
                raise ValueError(
                    f"nonzero z^-1 remainder {pd[0]:.3e} in derivative order {d}"
                )
            out[d] = pd[1:]
        return EulerOperator(out)

    def allclose(self, other: "EulerOperator", rtol: float = 1e-10) -> bool:
        scale = max(self.max_abs_coeff(), other.max_abs_coeff(), 1.0)
        for d in set(self.terms) | set(other.terms):
            a = self.terms.get(d, np.zeros(0))
            b = other.terms.get(d, np.zeros(0))
            n = max(a.size, b.size)
            pa = np.zeros(n)
            pb = np.zeros(n)
            pa[: a.size] = a
            pb[: b.size] = b
            if np.max(np.abs(pa - pb), initial=0.0) > rtol * scale:
                return False
        return True

    def to_dict(self) -> dict[str, list[float]]:
        """JSON form: derivative order (as string) -> coefficient list."""
        return {str(d): [float(c) for c in p] for d, p in sorted(self.terms.items())}

    @staticmethod
    def from_dict(data: dict[str, list[float]]) -> "EulerOperator":
        return EulerOperator({int(d): np.asarray(p, dtype=float) for d, p in data.items()})

    def __repr__(self) -> str:
        parts = [f"D^{d}: {list(p)}" for d, p in sorted(self.terms.items())]
        return f"EulerOperator({'; '.join(parts) or '0'})"


# module-level aliases for the three primitive operations
def compose(a: EulerOperator, b: EulerOperator) -> EulerOperator:
    return a @ b


def add(a: EulerOperator, b: EulerOperator) -> EulerOperator:
    return a + b


def scale(c: float, a: EulerOperator) -> EulerOperator:
    return c * a


# ---------------------------------------------------------------------------
# sector Hamiltonian assembly
# ---------------------------------------------------------------------------

def hamiltonian_order(model: ModelSpec) -> int:
    """Order of the sector differential operator: max(r + sum k_i, s)."""
    return max(model.r + sum(model.k), model.s)


def _product(factors: list[EulerOperator]) -> EulerOperator:
    out = EulerOperator.identity()
    for f in factors:
        out = out @ f
    return out


def build_hamiltonian_operator(model: ModelSpec, sector: SectorLabels) -> EulerOperator:
    """Assemble the sector Hamiltonian as a normally ordered operator in z, D.

    With E = zD and exact sector charges, the four pieces are

      boson energies   sum_i w_i (n_i(0) - k_i E)
      spin energy      g' ((p - j) + r E)^s
      lowering         g z^{-1} prod_{i=1..r} (r E + p - i + 1)
      raising          g z prod_{i=1..r} (2j - p - i + 1 - r E)
                           prod_i prod_{v=1..k_i} (n_i(0) - v + 1 - k_i E)

    where n_i(0) = k_i A_i + rho_i is the boson occupation at ladder level 0.
    The z^{-1} factor is resolved by expanding the product first and checking
    that its constant part vanishes (it does for every allowed p), then
    shifting; constant_shift is added to P_0 at the end.
    """
    j = sector.j
    p = sector.p
    r = model.r

    h = EulerOperator.zero()

    if model.M > 0:
        n0 = boson_occupations(model, sector, 0)
        for wi, ki, n0i in zip(model.w, model.k, n0):
            h = h + wi * EulerOperator.euler_affine(float(n0i), -float(ki))

    spin_base = EulerOperator.euler_affine(float(Fraction(p) - j), float(r))
    h = h + model.g_prime * _product([spin_base] * model.s)

    lowering = _product(
        [EulerOperator.euler_affine(float(p - i + 1), float(r)) for i in range(1, r + 1)]
    )
    h = h + model.g * lowering.divide_by_z()

    raise_factors = [
        EulerOperator.euler_affine(float(2 * j - p - i + 1), -float(r))
        for i in range(1, r + 1)
    ]
    if model.M > 0:
        for ki, n0i in zip(model.k, n0):
            for v in range(1, ki + 1):
                raise_factors.append(
                    EulerOperator.euler_affine(float(n0i - v + 1), -float(ki))
                )
    h = h + model.g * (EulerOperator.z_poly([0.0, 1.0]) @ _product(raise_factors))

    if model.constant_shift:
        h = h + model.constant_shift * EulerOperator.identity()
    return h


def extract_polynomials(h: EulerOperator) -> list[Poly]:
    """The coefficient polynomials [P_0, ..., P_order] of the normal form."""
    return [h.coefficient(d) for d in range(h.order + 1)]


def apply_to_monomials(h: EulerOperator, n_top: int) -> np.ndarray:
    """Matrix of h on {1, z, ..., z^n_top} with one overflow row.

    Column n holds the coefficients of h z^n in the basis {z^0 .. z^{n_top+1}};
    the last row carries the z^{n_top+1} coefficient, which vanishes at
    n = n_top exactly when the subspace is invariant.
    """
    if n_top < 0:
        raise ValueError("n_top must be >= 0")
    mat = np.zeros((n_top + 2, n_top + 1))
    for n in range(n_top + 1):
        col = h.apply_to_coeffs(np.eye(n_top + 1)[n])
        if col.size > n_top + 2 and np.max(np.abs(col[n_top + 2 :])) > 0.0:
            raise ValueError(
                f"action on z^{n} exceeds degree {n_top + 1}; operator violates "
                "the degree bound deg P_d <= d + 1"
            )
        take = min(col.size, n_top + 2)
        mat[:take, n] = col[:take]
    return mat
