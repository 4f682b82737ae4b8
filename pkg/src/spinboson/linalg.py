"""Dense numerics: cyclic Jacobi eigensolver, Aberth-Ehrlich root finder,
damped Newton with a forward-difference Jacobian.

All three are deliberately simple, unconditionally stable variants adequate
for block dimensions up to a few hundred; tolerances default to the values
in config.DEFAULT_TOLS.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .config import DEFAULT_TOLS
from .operators import poly_eval


class ConvergenceError(RuntimeError):
    """An iterative routine failed to reach its tolerance."""


@dataclass(frozen=True)
class EigenDecomposition:
    values: np.ndarray   # ascending
    vectors: np.ndarray  # orthonormal columns, vectors[:, k] pairs with values[k]


def jacobi_eigen(
    a: np.ndarray,
    tol: float = DEFAULT_TOLS.eigen,
    max_sweeps: int = 50,
) -> EigenDecomposition:
    """Cyclic Jacobi rotations until the off-diagonal Frobenius norm is small.

    Raises ValueError for non-symmetric input and ConvergenceError if the
    sweep budget is exhausted.
    """
    a = np.array(a, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {a.shape}")
    n = a.shape[0]
    scale = max(np.max(np.abs(a)), 1.0) if n else 1.0
    if np.max(np.abs(a - a.T), initial=0.0) > 1e-12 * scale:
        raise ValueError("matrix is not symmetric")
    a = (a + a.T) / 2.0

    v = np.eye(n)
    norm_a = np.linalg.norm(a)
    if n <= 1 or norm_a == 0.0:
        order = np.argsort(np.diag(a))
        return EigenDecomposition(np.diag(a)[order], v[:, order])

    target = tol * norm_a
    for _ in range(max_sweeps):
        off = np.linalg.norm(a - np.diag(np.diag(a)))
        if off <= target:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if abs(apq) <= 1e-300:
                    continue
                theta = (a[q, q] - a[p, p]) / (2.0 * apq)
                t = np.sign(theta) / (abs(theta) + np.hypot(theta, 1.0))
                if theta == 0.0:
                    t = 1.0
                c = 1.0 / np.sqrt(t * t + 1.0)
                s = t * c
                rot_p = c * a[:, p] - s * a[:, q]
                rot_q = s * a[:, p] + c * a[:, q]
                a[:, p], a[:, q] = rot_p, rot_q
                rot_p = c * a[p, :] - s * a[q, :]
                rot_q = s * a[p, :] + c * a[q, :]
                a[p, :], a[q, :] = rot_p, rot_q
                rot_p = c * v[:, p] - s * v[:, q]
                rot_q = s * v[:, p] + c * v[:, q]
                v[:, p], v[:, q] = rot_p, rot_q
    else:
        raise ConvergenceError(
            f"Jacobi sweeps exhausted (off-norm {off:.3e} > {target:.3e})"
        )

    values = np.diag(a).copy()
    order = np.argsort(values, kind="stable")
    values = values[order]
    vectors = v[:, order]
    # deterministic sign: largest-magnitude component of each vector positive
    for k in range(n):
        i = int(np.argmax(np.abs(vectors[:, k])))
        if vectors[i, k] < 0.0:
            vectors[:, k] = -vectors[:, k]
    return EigenDecomposition(values, vectors)


@dataclass(frozen=True)
class RootSet:
    roots: np.ndarray        # complex, all deg(poly) of them
    residual_bound: float    # max over roots of |p(z)| / sum_i |c_i z^i|
    clustered: bool          # some pair closer than cluster_rtol * scale


def polynomial_roots(
    coeffs,
    tol: float = DEFAULT_TOLS.roots,
    max_iter: int = 200,
    cluster_rtol: float = DEFAULT_TOLS.cluster,
) -> RootSet:
    """All complex roots by Aberth-Ehrlich simultaneous iteration.

    Starts from a scaled circle around the root centroid; a root is frozen
    once its correction stalls.  Residuals are measured in the backward-error
    sense |p(z)| / sum |c_i||z|^i.
    """
    c = np.atleast_1d(np.asarray(coeffs, dtype=complex))
    nz = np.nonzero(c)[0]
    if nz.size == 0:
        raise ValueError("zero polynomial has no well-defined roots")
    c = c[: nz[-1] + 1]
    deg = c.size - 1
    if deg == 0:
        return RootSet(np.zeros(0, dtype=complex), 0.0, False)
    if deg == 1:
        root = np.array([-c[0] / c[1]])
        return RootSet(root, _scaled_residual(c, root), False)

    dc = c[1:] * np.arange(1, deg + 1)

    center = -c[-2] / (deg * c[-1])
    radius = 1.0 + np.max(np.abs(c[:-1] / c[-1]))
    angles = 2.0 * np.pi * np.arange(deg) / deg + 0.4
    z = center + radius * np.exp(1j * angles)

    for _ in range(max_iter):
        pz = poly_eval(c, z)
        dpz = poly_eval(dc, z)
        dpz = np.where(dpz == 0.0, 1e-300, dpz)
        w = pz / dpz
        diff = z[:, None] - z[None, :]
        np.fill_diagonal(diff, np.inf)
        s = np.sum(1.0 / diff, axis=1)
        denom = 1.0 - w * s
        denom = np.where(np.abs(denom) < 1e-300, 1e-300, denom)
        step = w / denom
        z = z - step
        if np.max(np.abs(step)) <= tol * (1.0 + np.max(np.abs(z))):
            break
    else:
        if _scaled_residual(c, z) > np.sqrt(tol):
            raise ConvergenceError("Aberth-Ehrlich iteration did not converge")

    residual = _scaled_residual(c, z)
    scale = max(1.0, float(np.max(np.abs(z))))
    diff = np.abs(z[:, None] - z[None, :])
    np.fill_diagonal(diff, np.inf)
    clustered = bool(np.min(diff) < cluster_rtol * scale)

    order = np.lexsort((z.imag, z.real))
    return RootSet(z[order], residual, clustered)


def _scaled_residual(c: np.ndarray, roots: np.ndarray) -> float:
    if roots.size == 0:
        return 0.0
    num = np.abs(poly_eval(c, roots))
    den = poly_eval(np.abs(c), np.abs(roots)).real
    den = np.where(den == 0.0, 1.0, den)
    return float(np.max(num / den))


def newton_solve(
    f,
    x0,
    tol: float = DEFAULT_TOLS.newton,
    max_iter: int = 50,
    fd_step: float = 1e-7,
) -> np.ndarray:
    """Damped Newton for f: R^n -> R^n with a forward-difference Jacobian.

    The step is halved until ||f|| decreases; never returns a point with
    ||f||_inf > tol (raises ConvergenceError instead).
    """
    x = np.array(x0, dtype=float)
    fx = np.asarray(f(x), dtype=float)
    if fx.shape != x.shape:
        raise ValueError("f must map R^n to R^n")

    for _ in range(max_iter):
        norm = np.max(np.abs(fx), initial=0.0)
        if norm <= tol:
            return x
        n = x.size
        jac = np.empty((n, n))
        for jcol in range(n):
            h = fd_step * (1.0 + abs(x[jcol]))
            xh = x.copy()
            xh[jcol] += h
            jac[:, jcol] = (np.asarray(f(xh), dtype=float) - fx) / h
        try:
            delta = np.linalg.solve(jac, -fx)
        except np.linalg.LinAlgError as exc:
            raise ConvergenceError(f"singular Jacobian: {exc}") from exc
        if not np.all(np.isfinite(delta)):
            raise ConvergenceError("non-finite Newton step")

        lam = 1.0
        while lam > 1e-8:
            x_new = x + lam * delta
            f_new = np.asarray(f(x_new), dtype=float)
            if np.max(np.abs(f_new), initial=0.0) < norm:
                x, fx = x_new, f_new
                break
            lam /= 2.0
        else:
            raise ConvergenceError("line search found no decrease")

    if np.max(np.abs(fx), initial=0.0) <= tol:
        return x
    raise ConvergenceError(f"Newton did not reach tol={tol:g} in {max_iter} iterations")
