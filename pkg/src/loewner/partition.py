"""Right/left tangential interpolation data.

A frequency-response dataset is split into right triples
``(lam_i, r_i, w_i = H(lam_i) r_i)`` and left triples
``(mu_j, l_j, v_j = l_j H(mu_j))``. Directions are columns (rows) of the
identity, cycled per group. Packed forms follow the shapes

    Lam (rho,)  R (m, rho)  W (p, rho)      Mu (nu,)  L (nu, p)  V (nu, m)

where ``Lam`` and ``Mu`` hold the diagonals of the diagonal matrices.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .data import FrequencyResponseDataset
from .errors import (
    CoincidentPoints,
    DuplicateFrequency,
    NotImaginaryAxis,
    PairingError,
    TooFewSamples,
    ValidationError,
)

__all__ = [
    "TangentialDataset",
    "RealTransform",
    "partition",
    "conjugate_close",
    "realify",
    "SCHEMES",
]

SCHEMES = ("interleave", "half-split")


def _ro(a, dtype=complex):
    a = np.array(a, dtype=dtype, copy=True)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class TangentialDataset:
    """Packed right and left tangential data.

    Attributes
    ----------
    lam, mu : ndarray
        Right and left interpolation points, shapes ``(rho,)`` and ``(nu,)``.
    R, W : ndarray
        Right directions ``(m, rho)`` and right values ``(p, rho)``.
    L, V : ndarray
        Left directions ``(nu, p)`` and left values ``(nu, m)``.
    conjugate_closed : bool
        Whether every non-real point is followed by its conjugate.
    """

    lam: np.ndarray
    R: np.ndarray
    W: np.ndarray
    mu: np.ndarray
    L: np.ndarray
    V: np.ndarray
    conjugate_closed: bool = False

    def __post_init__(self):
        lam, mu = _ro(np.ravel(self.lam)), _ro(np.ravel(self.mu))
        R, W, L, V = (_ro(x) for x in (self.R, self.W, self.L, self.V))
        rho, nu = lam.size, mu.size
        if R.ndim != 2 or R.shape[1] != rho or W.ndim != 2 or W.shape[1] != rho:
            raise ValidationError(f"R, W must have {rho} columns, got {R.shape}, {W.shape}")
        if L.ndim != 2 or L.shape[0] != nu or V.ndim != 2 or V.shape[0] != nu:
            raise ValidationError(f"L, V must have {nu} rows, got {L.shape}, {V.shape}")
        if L.shape[1] != W.shape[0] or V.shape[1] != R.shape[0]:
            raise ValidationError(
                f"inconsistent (p, m): W gives p={W.shape[0]}, L gives p={L.shape[1]}, "
                f"R gives m={R.shape[0]}, V gives m={V.shape[1]}"
            )
        if np.unique(lam).size != rho or np.unique(mu).size != nu:
            raise DuplicateFrequency("interpolation points within a group must be distinct")
        if np.intersect1d(lam, mu).size:
            raise CoincidentPoints(
                f"points shared by right and left data: {np.intersect1d(lam, mu)[:5]}"
            )
        for name, val in zip(("lam", "R", "W", "mu", "L", "V"), (lam, R, W, mu, L, V)):
            object.__setattr__(self, name, val)

    @property
    def rho(self) -> int:
        return self.lam.size

    @property
    def nu(self) -> int:
        return self.mu.size

    @property
    def m(self) -> int:
        return self.R.shape[0]

    @property
    def p(self) -> int:
        return self.W.shape[0]

    @property
    def Lam(self) -> np.ndarray:
        return np.diag(self.lam)

    @property
    def M(self) -> np.ndarray:
        return np.diag(self.mu)

    @property
    def right(self):
        """Right triples ``(lam_i, r_i, w_i)``."""
        return [(self.lam[i], self.R[:, i], self.W[:, i]) for i in range(self.rho)]

    @property
    def left(self):
        """Left triples ``(mu_j, l_j, v_j)``."""
        return [(self.mu[j], self.L[j], self.V[j]) for j in range(self.nu)]

    def __repr__(self):
        return (
            f"TangentialDataset(rho={self.rho}, nu={self.nu}, p={self.p}, m={self.m}, "
            f"conjugate_closed={self.conjugate_closed})"
        )


def partition(ds: FrequencyResponseDataset, scheme: str = "interleave") -> TangentialDataset:
    """Split `ds` into right and left tangential data.

    ``interleave`` sends even positions (0-based) right and odd positions
    left; ``half-split`` sends the first ``ceil(N/2)`` samples right. The
    ``t``-th sample of a group gets direction ``e_{t mod m}`` (right) or
    ``e_{t mod p}^T`` (left).
    """
    N = len(ds)
    if N < 2:
        raise TooFewSamples(f"need at least 2 samples to partition, got {N}")
    s = ds.s
    if np.unique(s).size != N:
        raise DuplicateFrequency("dataset frequencies must be pairwise distinct")
    if scheme == "interleave":
        right_idx, left_idx = np.arange(0, N, 2), np.arange(1, N, 2)
    elif scheme in ("half-split", "half"):
        h = (N + 1) // 2
        right_idx, left_idx = np.arange(h), np.arange(h, N)
    else:
        raise ValidationError(f"unknown partition scheme {scheme!r}; expected one of {SCHEMES}")

    H = ds.H
    m, p = ds.m, ds.p
    Im, Ip = np.eye(m), np.eye(p)
    R = Im[:, np.arange(right_idx.size) % m]
    L = Ip[np.arange(left_idx.size) % p, :]
    # w_i = H(lam_i) r_i, v_j = l_j H(mu_j)
    W = np.einsum("kpm,mk->pk", H[right_idx], R)
    V = np.einsum("kp,kpm->km", L, H[left_idx])
    return TangentialDataset(s[right_idx], R, W, s[left_idx], L, V)


def _closed_group(points, dirs, vals, axis):
    # dirs/vals: one column (axis=1) or row (axis=0) per point
    new_pts, new_dirs, new_vals = [], [], []
    take = (lambda a, k: a[:, k]) if axis == 1 else (lambda a, k: a[k])
    for k, z in enumerate(points):
        d, v = take(dirs, k), take(vals, k)
        new_pts.append(z)
        new_dirs.append(d)
        new_vals.append(v)
        if z.imag != 0.0:
            new_pts.append(np.conj(z))
            new_dirs.append(np.conj(d))
            new_vals.append(np.conj(v))
    stack = (lambda xs: np.stack(xs, axis=1)) if axis == 1 else (lambda xs: np.stack(xs))
    return np.array(new_pts), stack(new_dirs), stack(new_vals)


def conjugate_close(td: TangentialDataset) -> TangentialDataset:
    """Insert the conjugate of every non-real point right after it.

    Requires all points on the imaginary axis. Points with zero imaginary
    part (the DC sample) are self-conjugate and kept once. Applying this to
    already closed data is a no-op.
    """
    if td.conjugate_closed:
        return td
    pts = np.concatenate([td.lam, td.mu])
    if np.any(pts.real != 0.0):
        bad = pts[pts.real != 0.0][0]
        raise NotImaginaryAxis(f"conjugate closure needs s = i*omega, got s={bad!r}")
    lam, R, W = _closed_group(td.lam, td.R, td.W, axis=1)
    mu, L, V = _closed_group(td.mu, td.L, td.V, axis=0)
    # disjointness is re-validated by the constructor
    return TangentialDataset(lam, R, W, mu, L, V, conjugate_closed=True)


_PAIR_BLOCK = np.array([[1.0, 1.0], [1.0j, -1.0j]]) / np.sqrt(2.0)


def _pair_transform(points, dirs, what):
    n = points.size
    J = np.zeros((n, n), dtype=complex)
    k = 0
    while k < n:
        z = points[k]
        if z.imag == 0.0:
            J[k, k] = 1.0
            k += 1
            continue
        if (
            k + 1 >= n
            or points[k + 1] != np.conj(z)
            or not np.array_equal(dirs[k + 1], np.conj(dirs[k]))
        ):
            raise PairingError(f"{what} point {z!r} at position {k} is not followed by its conjugate")
        J[k : k + 2, k : k + 2] = _PAIR_BLOCK
        k += 2
    return J


@dataclass(frozen=True, eq=False)
class RealTransform:
    """Block-unitary bases turning conjugate-closed Loewner data real.

    For a pencil matrix ``X`` (nu x rho) the real form is
    ``left @ X @ right.conj().T``; left values map as ``left @ V`` and right
    values as ``W @ right.conj().T``. Each conjugate pair contributes the
    block ``[[1, 1], [i, -i]] / sqrt(2)``; real points contribute ``1``.
    """

    left: np.ndarray
    right: np.ndarray

    def apply(self, X):
        return self.left @ X @ self.right.conj().T

    def undo(self, X):
        return self.left.conj().T @ X @ self.right


def realify(td: TangentialDataset) -> RealTransform:
    """Change of basis that makes the Loewner pencil of `td` real."""
    if not td.conjugate_closed:
        raise PairingError("realification needs conjugate-closed data")
    right = _pair_transform(td.lam, td.R.T, "right")
    left = _pair_transform(td.mu, td.L, "left")
    return RealTransform(_ro(left), _ro(right))
