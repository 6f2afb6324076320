"""Dense eigenvalue analysis for small real matrices (n <= 6).

The primary path reduces the matrix to Hessenberg form with Householder
reflections and runs a Wilkinson-shifted QR iteration in complex arithmetic.
For n <= 4 a characteristic-polynomial fallback (Faddeev-LeVerrier
coefficients, companion-matrix roots) backs up a non-converging iteration.
Eigenvalues of real input are paired into exact conjugates before reporting.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .exceptions import ConvergenceError
from .validation import as_matrix, check_square, require

__all__ = ["PoleSet", "eigenvalues", "closed_loop_poles", "MAX_DIM"]

MAX_DIM = 6


@dataclass(frozen=True)
class PoleSet:
    """Eigenvalue multiset with polar forms and a stability verdict."""

    eigenvalues: tuple

    @classmethod
    def from_values(cls, values) -> "PoleSet":
        ordered = sorted(values, key=lambda v: (abs(v), abs(np.angle(v)), np.angle(v)))
        return cls(eigenvalues=tuple(complex(v) for v in ordered))

    @property
    def magnitudes(self) -> np.ndarray:
        return np.abs(np.array(self.eigenvalues))

    @property
    def angles(self) -> np.ndarray:
        """Polar angles in radians, one per eigenvalue (conjugates as +/-)."""
        return np.angle(np.array(self.eigenvalues))

    @property
    def spectral_radius(self) -> float:
        return float(self.magnitudes.max())

    @property
    def is_stable(self) -> bool:
        return self.spectral_radius < 1.0

    def polar(self):
        """(magnitude, |angle|) pairs sorted like the eigenvalues."""
        return [(abs(v), abs(np.angle(v))) for v in self.eigenvalues]

    def to_records(self):
        return [
            {"re": v.real, "im": v.imag, "mag": abs(v), "angle": float(np.angle(v))}
            for v in self.eigenvalues
        ]


def _householder_hessenberg(a: np.ndarray) -> np.ndarray:
    h = a.astype(complex).copy()
    n = h.shape[0]
    for k in range(n - 2):
        x = h[k + 1:, k]
        norm_x = np.linalg.norm(x)
        if norm_x <= 1e-300 or np.linalg.norm(x[1:]) == 0.0:
            continue
        v = x.copy()
        phase = x[0] / abs(x[0]) if abs(x[0]) > 0 else 1.0
        v[0] += phase * norm_x
        v /= np.linalg.norm(v)
        h[k + 1:, k:] -= 2.0 * np.outer(v, v.conj() @ h[k + 1:, k:])
        h[:, k + 1:] -= 2.0 * np.outer(h[:, k + 1:] @ v, v.conj())
    return h


def _eig_2x2(a, b, c, d):
    # roots of x^2 - (a+d) x + (ad - bc), numerically balanced form
    tr = a + d
    det = a * d - b * c
    disc = np.sqrt(tr * tr - 4.0 * det + 0j)
    if abs(tr + disc) >= abs(tr - disc):
        r1 = 0.5 * (tr + disc)
    else:
        r1 = 0.5 * (tr - disc)
    r2 = det / r1 if r1 != 0 else 0.5 * (tr - disc)
    return r1, r2


def _wilkinson_shift(h, hi):
    a, b = h[hi - 1, hi - 1], h[hi - 1, hi]
    c, d = h[hi, hi - 1], h[hi, hi]
    r1, r2 = _eig_2x2(a, b, c, d)
    return r1 if abs(r1 - d) <= abs(r2 - d) else r2


def _qr_eigenvalues(matrix: np.ndarray, tol: float = 1e-14, sweep_cap: int = 80):
    h = _householder_hessenberg(matrix)
    n = h.shape[0]
    values = []
    hi = n - 1
    sweeps = 0
    while hi >= 0:
        # deflate negligible subdiagonals of the active matrix
        for i in range(1, hi + 1):
            if abs(h[i, i - 1]) <= tol * (abs(h[i - 1, i - 1]) + abs(h[i, i])):
                h[i, i - 1] = 0.0
        if hi == 0 or h[hi, hi - 1] == 0.0:
            values.append(h[hi, hi])
            hi -= 1
            sweeps = 0
            continue
        if hi == 1 or h[hi - 1, hi - 2] == 0.0:
            r1, r2 = _eig_2x2(h[hi - 1, hi - 1], h[hi - 1, hi], h[hi, hi - 1], h[hi, hi])
            values.extend([r1, r2])
            hi -= 2
            sweeps = 0
            continue
        lo = hi
        while lo > 0 and h[lo, lo - 1] != 0.0:
            lo -= 1
        sweeps += 1
        if sweeps > sweep_cap:
            raise ConvergenceError(
                f"QR iteration stalled on a block of size {hi - lo + 1}",
                iterations=sweeps,
            )
        # occasional exceptional shift breaks symmetric stalls
        if sweeps % 12 == 0:
            sigma = h[hi, hi] + abs(h[hi, hi - 1])
        else:
            sigma = _wilkinson_shift(h, hi)
        block = h[lo:hi + 1, lo:hi + 1]
        q, r = np.linalg.qr(block - sigma * np.eye(block.shape[0]))
        h[lo:hi + 1, lo:hi + 1] = r @ q + sigma * np.eye(block.shape[0])
    return values


def _charpoly_eigenvalues(matrix: np.ndarray):
    # Faddeev-LeVerrier coefficients, then companion-matrix roots
    n = matrix.shape[0]
    coeffs = np.empty(n + 1)
    coeffs[0] = 1.0
    m = np.zeros_like(matrix)
    for k in range(1, n + 1):
        m = matrix @ m + coeffs[k - 1] * np.eye(n)
        coeffs[k] = -np.trace(matrix @ m) / k
    return list(np.roots(coeffs))


def _pair_conjugates(values, scale: float):
    """Snap the spectrum of a real matrix onto exact conjugate pairs."""
    tol = 1e-8 * (1.0 + scale)
    remaining = list(values)
    paired = []
    while remaining:
        v = remaining.pop(0)
        if abs(v.imag) <= tol:
            paired.append(complex(v.real, 0.0))
            continue
        best, dist = None, None
        for idx, w in enumerate(remaining):
            d = abs(np.conj(v) - w)
            if dist is None or d < dist:
                best, dist = idx, d
        if best is not None and dist is not None and dist <= 1e-6 * (1.0 + scale):
            w = remaining.pop(best)
            re = 0.5 * (v.real + w.real)
            im = 0.5 * (abs(v.imag) + abs(w.imag))
            paired.extend([complex(re, im), complex(re, -im)])
        else:
            # no partner within tolerance: keep the raw value
            paired.append(v)
    return paired


def eigenvalues(matrix) -> PoleSet:
    """All eigenvalues (with multiplicity) of a real matrix up to 6x6."""
    matrix = check_square(as_matrix(matrix, "matrix"), "matrix")
    n = matrix.shape[0]
    require(n <= MAX_DIM, f"matrix dimension {n} exceeds the supported maximum {MAX_DIM}")
    scale = float(np.abs(matrix).max())
    try:
        values = _qr_eigenvalues(matrix)
    except ConvergenceError:
        if n > 4:
            raise
        values = _charpoly_eigenvalues(matrix)
    return PoleSet.from_values(_pair_conjugates(values, scale))


def closed_loop_poles(model, gain=None, actor_weights=None) -> PoleSet:
    """Poles of the loop closed by ``u = -K z`` or by ``u = W_a' z``.

    Exactly one of ``gain`` (m x n, negative-feedback convention) or
    ``actor_weights`` (n x m, direct-feedback convention) must be given.
    """
    require((gain is None) != (actor_weights is None),
            "provide exactly one of gain or actor_weights")
    if gain is not None:
        k = as_matrix(gain, "gain")
        if k.shape == (model.n, model.m) and model.n != model.m:
            k = k.T
        require(k.shape == (model.m, model.n),
                f"gain shape {k.shape} incompatible with plant ({model.m}, {model.n})")
        return eigenvalues(model.a - model.b @ k)
    w = as_matrix(actor_weights, "actor_weights")
    if w.shape == (model.m, model.n) and model.n != model.m:
        w = w.T
    require(w.shape == (model.n, model.m),
            f"actor_weights shape {w.shape} incompatible with plant ({model.n}, {model.m})")
    return eigenvalues(model.a + model.b @ w.T)
