"""Loewner pencil assembly, pencil SVD, order selection and reduction.

With right data ``(lam_i, r_i, w_i)`` and left data ``(mu_j, l_j, v_j)`` the
Loewner and shifted Loewner matrices are

    LL[j, i]  = (v_j r_i - l_j w_i) / (mu_j - lam_i)
    LLs[j, i] = (mu_j v_j r_i - lam_i l_j w_i) / (mu_j - lam_i)

Truncating the SVD ``LLs - x LL = Y S X^*`` to ``r`` terms gives the
descriptor model ``E = -Y_r^* LL X_r``, ``A = -Y_r^* LLs X_r``,
``B = Y_r^* V``, ``C = W X_r``, ``D = 0``.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from .errors import (
    CoincidentPoints,
    PairingError,
    ROutOfRange,
    RealifyResidueTooLarge,
    SingularEt,
    ValidationError,
)
from .lti import DescriptorSystem
from .partition import RealTransform, TangentialDataset, realify

__all__ = [
    "LoewnerPencil",
    "PencilSVD",
    "ReducedModel",
    "build_pencil",
    "sylvester_residual",
    "svd_pencil",
    "select_order",
    "reduce",
    "reduce_bumping",
    "RANK_TOL",
    "SYLVESTER_TOL",
    "REALIFY_TOL",
]

logger = logging.getLogger(__name__)

RANK_TOL = 1e-12
SYLVESTER_TOL = 1e-10
REALIFY_TOL = 1e-10


def _ro(a):
    a = np.array(a, copy=True)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class LoewnerPencil:
    """Loewner matrix ``Lw``, shifted Loewner matrix ``Ls`` and value data.

    When `is_real` is set the matrices are the real forms obtained through
    `transform`; `source` always keeps the complex tangential data.
    `residuals` holds the two Sylvester residuals measured at construction.
    """

    Lw: np.ndarray
    Ls: np.ndarray
    Vmat: np.ndarray
    Wmat: np.ndarray
    is_real: bool
    source: TangentialDataset
    transform: RealTransform | None = None
    residuals: tuple = (np.nan, np.nan)

    @property
    def shape(self):
        return self.Lw.shape

    @property
    def m(self) -> int:
        return self.Vmat.shape[1]

    @property
    def p(self) -> int:
        return self.Wmat.shape[0]

    def __repr__(self):
        nu, rho = self.shape
        return f"LoewnerPencil(nu={nu}, rho={rho}, is_real={self.is_real})"


@dataclass(frozen=True, eq=False)
class PencilSVD:
    """Full SVD ``Ls - shift_x * Lw = Y @ diag(sigma) @ X^*``."""

    Y: np.ndarray
    sigma: np.ndarray
    X: np.ndarray
    shift_x: complex


class ReducedModel(DescriptorSystem):
    """Descriptor model of order ``r`` produced by :func:`reduce`.

    Carries the singular values that justified the order. The feedthrough
    is always zero.
    """

    def __init__(self, Et, At, Bt, Ct, sigma=None):
        object.__setattr__(self, "sigma", None if sigma is None else _ro(sigma))
        super().__init__(Et, At, Bt, Ct)

    @property
    def r(self) -> int:
        return self.n

    Et = property(lambda self: self.E)
    At = property(lambda self: self.A)
    Bt = property(lambda self: self.B)
    Ct = property(lambda self: self.C)
    Dt = property(lambda self: self.D)

    def __repr__(self):
        kind = "real" if self.is_real else "complex"
        return f"ReducedModel(r={self.r}, m={self.m}, p={self.p}, {kind})"


def _loewner_pair(td: TangentialDataset):
    denom = td.mu[:, None] - td.lam[None, :]
    if np.any(denom == 0):
        j, i = np.argwhere(denom == 0)[0]
        raise CoincidentPoints(f"mu[{j}] == lam[{i}] == {td.mu[j]!r}")
    VR = td.V @ td.R
    LW = td.L @ td.W
    Lw = (VR - LW) / denom
    Ls = (td.mu[:, None] * VR - LW * td.lam[None, :]) / denom
    return Lw, Ls


def _sylvester(td: TangentialDataset, Lw, Ls):
    VR = td.V @ td.R
    LW = td.L @ td.W
    mu, lam = td.mu[:, None], td.lam[None, :]
    rhs1 = VR - LW
    rhs2 = mu * VR - LW * lam
    res1 = np.linalg.norm(mu * Lw - Lw * lam - rhs1) / max(1.0, np.linalg.norm(rhs1))
    res2 = np.linalg.norm(mu * Ls - Ls * lam - rhs2) / max(1.0, np.linalg.norm(rhs2))
    return float(res1), float(res2)


def build_pencil(td: TangentialDataset, make_real: bool = False) -> LoewnerPencil:
    """Assemble the Loewner pencil of `td`.

    With ``make_real`` the data must be conjugate-closed; the pencil is then
    mapped to real form and any imaginary residue above ``REALIFY_TOL``
    relative to the largest entry raises :class:`RealifyResidueTooLarge`.
    """
    Lw, Ls = _loewner_pair(td)
    res = _sylvester(td, Lw, Ls)
    if max(res) > SYLVESTER_TOL:
        logger.warning("Sylvester residuals %.3e, %.3e exceed %.0e", *res, SYLVESTER_TOL)
    V, W = td.V, td.W
    transform = None
    if make_real:
        if not td.conjugate_closed:
            raise PairingError("make_real needs conjugate-closed tangential data")
        transform = realify(td)
        mats = {
            "Lw": transform.apply(Lw),
            "Ls": transform.apply(Ls),
            "Vmat": transform.left @ V,
            "Wmat": W @ transform.right.conj().T,
        }
        for name, X in mats.items():
            scale = np.max(np.abs(X)) if X.size else 0.0
            resid = np.max(np.abs(X.imag)) if X.size else 0.0
            if resid > REALIFY_TOL * scale:
                raise RealifyResidueTooLarge(
                    f"{name} keeps imaginary residue {resid:.3e} (scale {scale:.3e})"
                )
        Lw, Ls, V, W = (mats[k].real for k in ("Lw", "Ls", "Vmat", "Wmat"))
    return LoewnerPencil(
        _ro(Lw), _ro(Ls), _ro(V), _ro(W), bool(make_real), td, transform, res
    )


def sylvester_residual(pencil: LoewnerPencil):
    """Relative residuals of the two Sylvester identities of the pencil.

    ``M LL - LL Lam = V R - L W`` and ``M LLs - LLs Lam = M V R - L W Lam``,
    each normalised by ``max(1, ||rhs||_F)``. Real pencils are mapped back
    to the complex basis of their source data first.
    """
    Lw, Ls = pencil.Lw, pencil.Ls
    if pencil.is_real:
        Lw = pencil.transform.undo(Lw.astype(complex))
        Ls = pencil.transform.undo(Ls.astype(complex))
    return _sylvester(pencil.source, Lw, Ls)


def _auto_shift(pencil: LoewnerPencil) -> complex:
    lam0 = complex(pencil.source.lam[0])
    if pencil.is_real:
        # a real shift keeps the factors real; |lam0| is the first sample frequency
        return complex(abs(lam0))
    return lam0


def svd_pencil(pencil: LoewnerPencil, x="auto") -> PencilSVD:
    """Full SVD of ``Ls - x * Lw``.

    ``x="auto"`` uses the first right interpolation point, or its modulus
    for real pencils so that the factors stay real.
    """
    if isinstance(x, str):
        if x != "auto":
            raise ValidationError(f"shift must be a number or 'auto', got {x!r}")
        x = _auto_shift(pencil)
    x = complex(x)
    if pencil.is_real and x.imag == 0.0:
        P = pencil.Ls - x.real * pencil.Lw
    else:
        P = pencil.Ls - x * pencil.Lw
    Y, sigma, Xh = np.linalg.svd(P, full_matrices=True)
    return PencilSVD(_ro(Y), _ro(sigma), _ro(Xh.conj().T), x)


def select_order(svd: PencilSVD, r=None, tol=None) -> int:
    """Reduced order from an explicit `r` or a relative tolerance `tol`.

    With `tol`, counts singular values ``>= tol * sigma_1``. Returns 0 when
    ``sigma_1 == 0``.
    """
    if (r is None) == (tol is None):
        raise ValidationError("give exactly one of r or tol")
    sigma = np.asarray(svd.sigma)
    if r is not None:
        if int(r) != r or not (1 <= r <= sigma.size):
            raise ROutOfRange(f"r must lie in [1, {sigma.size}], got {r!r}")
        return int(r)
    if not (0.0 < tol < 1.0):
        raise ValidationError(f"tol must lie in (0, 1), got {tol!r}")
    if sigma.size == 0 or sigma[0] == 0.0:
        logger.warning("NoSignal: all pencil singular values are zero")
        return 0
    return int(np.count_nonzero(sigma >= tol * sigma[0]))


def reduce(pencil: LoewnerPencil, svd: PencilSVD, r: int) -> ReducedModel:
    """Order-`r` descriptor model from the leading singular vectors.

    Raises
    ------
    SingularEt
        If the reduced ``E`` is singular, typically because `r` splits a
        conjugate pair or lands on a pencil irregularity.
    """
    nu, rho = pencil.shape
    if int(r) != r or not (1 <= r <= min(nu, rho)):
        raise ROutOfRange(f"r must lie in [1, {min(nu, rho)}], got {r!r}")
    r = int(r)
    Yr_h = svd.Y[:, :r].conj().T
    Xr = svd.X[:, :r]
    Et = -Yr_h @ pencil.Lw @ Xr
    At = -Yr_h @ pencil.Ls @ Xr
    Bt = Yr_h @ pencil.Vmat
    Ct = pencil.Wmat @ Xr
    try:
        return ReducedModel(Et, At, Bt, Ct, sigma=svd.sigma)
    except ValidationError as exc:
        raise SingularEt(f"reduced E is singular at r={r}: {exc}") from None


def reduce_bumping(pencil: LoewnerPencil, svd: PencilSVD, r: int) -> ReducedModel:
    """:func:`reduce`, retrying at ``r + 1`` for closed complex pencils.

    Splitting a conjugate pair of a conjugate-closed but complex pencil can
    leave the reduced ``E`` singular; one extra order reunites the pair.
    """
    try:
        return reduce(pencil, svd, r)
    except SingularEt:
        nu, rho = pencil.shape
        if pencil.is_real or not pencil.source.conjugate_closed or r + 1 > min(nu, rho):
            raise
        logger.info("r=%d splits a conjugate pair, retrying with r=%d", r, r + 1)
        return reduce(pencil, svd, r + 1)
