"""Dense complex linear algebra and quadrature primitives.

Everything here is self-contained on top of numpy array arithmetic: the
eigensolver is a Hessenberg reduction followed by shifted QR iteration with
deflation, and the matrix exponential uses scaling-and-squaring with a
diagonal Pade approximant.  The matrices this package cares about are small
(<= 200 x 200), so the implementations favour robustness and testability
over peak throughput.

All functions are pure; there is no shared mutable state.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "ConvergenceError",
    "OverflowBoundError",
    "QuadratureError",
    "QuadratureRule",
    "complex_matrix",
    "hessenberg",
    "eigenvalues",
    "eigen_abscissa",
    "expm",
    "integrate",
]

# Max QR sweeps per matrix is _SWEEP_BUDGET_FACTOR * dim; a generous safe
# multiple for dense shifted QR with deflation.
_SWEEP_BUDGET_FACTOR = 50

# expm refuses inputs with entries larger than this: the squaring phase
# would amplify rounding error past the advertised 1e-10 accuracy.
EXPM_ENTRY_BOUND = 1.0e8


class ConvergenceError(RuntimeError):
    """QR iteration failed to deflate within its sweep budget."""


class OverflowBoundError(ValueError):
    """Input magnitude exceeds the documented safe bound."""


class QuadratureError(RuntimeError):
    """Adaptive quadrature did not reach the requested tolerance.

    Carries the best available estimate in ``best`` and the estimated
    error in ``error``.
    """

    def __init__(self, message, best, error):
        super().__init__(message)
        self.best = best
        self.error = error


def complex_matrix(entries):
    """Validate and return a square complex128 matrix.

    Raises ValueError for non-square shapes or non-finite entries.
    """
    m = np.array(entries, dtype=np.complex128, order="C")
    if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] < 1:
        raise ValueError(f"expected a square matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ValueError("matrix entries must be finite")
    return m


# ---------------------------------------------------------------------------
# Eigenvalues
# ---------------------------------------------------------------------------


def hessenberg(a):
    """Reduce a square complex matrix to upper Hessenberg form.

    Uses complex Householder reflectors; returns a new matrix similar to
    the input (eigenvalues preserved).
    """
    h = complex_matrix(a)
    n = h.shape[0]
    for k in range(n - 2):
        x = h[k + 1:, k]
        xnorm = np.linalg.norm(x)
        if xnorm == 0.0:
            continue
        # alpha carries the phase of x[0] so that v is well conditioned
        phase = x[0] / abs(x[0]) if x[0] != 0 else 1.0
        alpha = -phase * xnorm
        v = x.copy()
        v[0] -= alpha
        vnorm = np.linalg.norm(v)
        if vnorm == 0.0:
            continue
        v /= vnorm
        # H <- P H P with P = I - 2 v v^H acting on rows/cols k+1:
        h[k + 1:, k:] -= 2.0 * np.outer(v, v.conj() @ h[k + 1:, k:])
        h[:, k + 1:] -= 2.0 * np.outer(h[:, k + 1:] @ v, v.conj())
        h[k + 1, k] = alpha
        h[k + 2:, k] = 0.0
    return h


def _is_hessenberg(m):
    n = m.shape[0]
    if n <= 2:
        return True
    ii, jj = np.tril_indices(n, k=-2)
    return not np.any(m[ii, jj])


def _eig_2x2(a, b, c, d):
    """Both eigenvalues of [[a, b], [c, d]]."""
    t = 0.5 * (a + d)
    disc = np.lib.scimath.sqrt(0.25 * (a - d) ** 2 + b * c)
    return t + disc, t - disc


def _wilkinson_shift(a, b, c, d):
    """Eigenvalue of the trailing 2x2 block closest to its last entry."""
    l1, l2 = _eig_2x2(a, b, c, d)
    return l1 if abs(l1 - d) <= abs(l2 - d) else l2


def _givens(a, b):
    """Unitary 2x2 G with G @ (a, b) = (r, 0), r >= 0."""
    if b == 0:
        return None
    denom = np.hypot(abs(a), abs(b))
    return np.array(
        [[np.conj(a), np.conj(b)], [-b, a]], dtype=np.complex128
    ) / denom


def _qr_sweep(h, lo, hi, mu):
    """One explicit shifted QR step, H <- RQ + mu I, on the block [lo, hi)."""
    b = h[lo:hi, lo:hi]
    m = hi - lo
    idx = np.arange(m)
    b[idx, idx] -= mu
    rots = [None] * (m - 1)
    for k in range(m - 1):
        g = _givens(b[k, k], b[k + 1, k])
        rots[k] = g
        if g is not None:
            b[k:k + 2, k:] = g @ b[k:k + 2, k:]
            b[k + 1, k] = 0.0
    for k in range(m - 1):
        g = rots[k]
        if g is not None:
            b[:k + 2, k:k + 2] = b[:k + 2, k:k + 2] @ g.conj().T
    b[idx, idx] += mu


def eigenvalues(a):
    """All eigenvalues of a square complex matrix.

    Hessenberg reduction followed by shifted QR iteration with deflation
    (Wilkinson shifts, occasional exceptional shifts).  Raises
    ConvergenceError after 50*dim sweeps without full deflation; never
    returns a silently unconverged spectrum.
    """
    h = complex_matrix(a)
    n = h.shape[0]
    if n == 1:
        return h[0, 0].reshape(1)
    if not _is_hessenberg(h):
        h = hessenberg(h)
    eps = np.finfo(np.float64).eps
    eigs = np.empty(n, dtype=np.complex128)
    found = 0
    hi = n
    sweeps = 0
    stagnation = 0
    budget = _SWEEP_BUDGET_FACTOR * n
    while hi > 0:
        if hi == 1:
            eigs[found] = h[0, 0]
            found += 1
            hi = 0
            break
        # deflation scan: walk up from the bottom of the active block
        lo = hi - 1
        while lo > 0:
            scale = abs(h[lo - 1, lo - 1]) + abs(h[lo, lo])
            if scale == 0.0:
                scale = 1.0
            if abs(h[lo, lo - 1]) <= eps * scale:
                h[lo, lo - 1] = 0.0
                break
            lo -= 1
        if lo == hi - 1:
            eigs[found] = h[hi - 1, hi - 1]
            found += 1
            hi -= 1
            stagnation = 0
            continue
        if lo == hi - 2:
            l1, l2 = _eig_2x2(
                h[hi - 2, hi - 2], h[hi - 2, hi - 1],
                h[hi - 1, hi - 2], h[hi - 1, hi - 1],
            )
            eigs[found] = l1
            eigs[found + 1] = l2
            found += 2
            hi -= 2
            stagnation = 0
            continue
        sweeps += 1
        stagnation += 1
        if sweeps > budget:
            raise ConvergenceError(
                f"QR iteration did not converge within {budget} sweeps "
                f"(dim={n}, {n - found} eigenvalues outstanding)"
            )
        if stagnation % 16 == 0:
            # exceptional shift to break symmetric stalls
            mu = h[hi - 1, hi - 1] + 1.5 * abs(h[hi - 1, hi - 2])
        else:
            mu = _wilkinson_shift(
                h[hi - 2, hi - 2], h[hi - 2, hi - 1],
                h[hi - 1, hi - 2], h[hi - 1, hi - 1],
            )
        _qr_sweep(h, lo, hi, mu)
    return eigs


def eigen_abscissa(a):
    """Largest real part over the spectrum of a complex square matrix."""
    return float(np.max(eigenvalues(a).real))


# ---------------------------------------------------------------------------
# Matrix exponential
# ---------------------------------------------------------------------------

# Diagonal Pade [7/7] coefficients; at ||A||_1 <= 0.5 the truncation error
# is far below double rounding.
_PADE7 = (17297280.0, 8648640.0, 1995840.0, 277200.0, 25200.0, 1512.0, 56.0, 1.0)


def expm(a):
    """Matrix exponential by scaling-and-squaring with a Pade approximant.

    The input is scaled so ||A / 2^s||_1 <= 0.5, fed through the diagonal
    [7/7] rational approximant, and squared s times.  Inputs with entries
    above EXPM_ENTRY_BOUND are rejected (OverflowBoundError) rather than
    silently losing accuracy in the squaring phase.
    """
    m = complex_matrix(a)
    if np.max(np.abs(m)) > EXPM_ENTRY_BOUND:
        raise OverflowBoundError(
            f"expm input entries exceed the safe bound {EXPM_ENTRY_BOUND:g}"
        )
    n = m.shape[0]
    norm1 = float(np.max(np.abs(m).sum(axis=0))) if n else 0.0
    s = max(0, int(np.ceil(np.log2(norm1 / 0.5)))) if norm1 > 0.5 else 0
    ms = m / (2.0 ** s)

    b = _PADE7
    ident = np.eye(n, dtype=np.complex128)
    m2 = ms @ ms
    m4 = m2 @ m2
    m6 = m4 @ m2
    u = ms @ (b[7] * m6 + b[5] * m4 + b[3] * m2 + b[1] * ident)
    v = b[6] * m6 + b[4] * m4 + b[2] * m2 + b[0] * ident
    e = np.linalg.solve(v - u, v + u)
    for _ in range(s):
        e = e @ e
    return e


# ---------------------------------------------------------------------------
# Quadrature
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class QuadratureRule:
    """Nodes and weights of a fixed quadrature rule on [a, b].

    ``order`` is the highest polynomial degree integrated exactly.
    """

    nodes: np.ndarray
    weights: np.ndarray
    order: int

    def __post_init__(self):
        if len(self.nodes) != len(self.weights):
            raise ValueError("nodes and weights must have equal length")
        if np.any(np.asarray(self.weights) <= 0):
            raise ValueError("quadrature weights must be positive")

    @classmethod
    def gauss_legendre(cls, npoints, a=-1.0, b=1.0):
        """n-point Gauss-Legendre rule mapped to [a, b]; exact to degree 2n-1."""
        x, w = np.polynomial.legendre.leggauss(npoints)
        mid = 0.5 * (a + b)
        half = 0.5 * (b - a)
        return cls(nodes=mid + half * x, weights=half * w, order=2 * npoints - 1)

    def apply(self, f):
        return np.sum(np.asarray(f(self.nodes)) * self.weights)


_GL_LOW = np.polynomial.legendre.leggauss(7)
_GL_HIGH = np.polynomial.legendre.leggauss(15)


def _panel(f, a, b):
    """(high-order estimate, error estimate, is_complex) for one panel."""
    mid = 0.5 * (a + b)
    half = 0.5 * (b - a)
    flo = np.asarray(f(mid + half * _GL_LOW[0]))
    fhi = np.asarray(f(mid + half * _GL_HIGH[0]))
    ilo = half * np.sum(flo * _GL_LOW[1])
    ihi = half * np.sum(fhi * _GL_HIGH[1])
    return ihi, abs(ihi - ilo), np.iscomplexobj(fhi)


def integrate(f, a, b, tol=1.0e-10, max_depth=24):
    """Adaptive composite Gauss-Legendre integral of f over [a, b].

    ``f`` must accept a numpy array of abscissae and may return real or
    complex values.  Panels are bisected until the local 7-vs-15-point
    discrepancy meets the proportional share of ``tol`` (absolute).
    Raises QuadratureError carrying the best estimate if the maximum
    refinement depth is exceeded.
    """
    if not (a < b):
        raise ValueError(f"need a < b, got [{a}, {b}]")
    if not np.isfinite(a) or not np.isfinite(b):
        raise ValueError("bounds must be finite")

    total_len = b - a
    # iterative stack of panels: (lo, hi, depth)
    stack = [(float(a), float(b), 0)]
    acc = 0.0 + 0.0j
    err_acc = 0.0
    failed = False
    is_complex = False
    while stack:
        lo, hi, depth = stack.pop()
        val, err, panel_complex = _panel(f, lo, hi)
        is_complex = is_complex or panel_complex
        if err <= tol * max((hi - lo) / total_len, np.finfo(float).eps):
            acc += val
            err_acc += err
        elif depth >= max_depth:
            acc += val
            err_acc += err
            failed = True
        else:
            mid = 0.5 * (lo + hi)
            stack.append((lo, mid, depth + 1))
            stack.append((mid, hi, depth + 1))
    result = acc if is_complex else acc.real
    if failed or err_acc > 10.0 * tol:
        raise QuadratureError(
            f"quadrature did not converge to tol={tol:g} "
            f"(estimated error {err_acc:.3g})",
            best=result,
            error=err_acc,
        )
    return result
