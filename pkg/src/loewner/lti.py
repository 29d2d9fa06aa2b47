"""Descriptor LTI systems and their transfer functions.

A descriptor system is the quintuple ``(E, A, B, C, D)`` describing

    E x'(t) = A x(t) + B u(t),    y(t) = C x(t) + D u(t)

with ``E`` invertible. Only the frequency-domain map
``H(s) = C (sE - A)^{-1} B + D`` is modelled here.
"""

from __future__ import annotations

import json
import warnings
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg as spla

from .errors import (
    DimensionMismatch,
    DimensionTooLarge,
    InvalidRange,
    SingularPencil,
    ValidationError,
)

__all__ = [
    "DescriptorSystem",
    "eval_transfer",
    "freqresp",
    "generate_modal_system",
    "iss_like_system",
    "poles",
    "POLE_GUARD",
]

POLE_GUARD = 2000
_EPS = np.finfo(float).eps


def _frozen(a, name, dtype=None):
    arr = np.array(a, dtype=dtype, copy=True)
    if arr.ndim != 2:
        raise DimensionMismatch(f"{name} must be a 2-D matrix, got ndim={arr.ndim}")
    if not np.all(np.isfinite(arr)):
        raise ValidationError(f"{name} has non-finite entries")
    if np.iscomplexobj(arr) and not np.any(arr.imag):
        arr = arr.real.copy()
    elif not np.iscomplexobj(arr):
        arr = arr.astype(float)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class DescriptorSystem:
    """Immutable descriptor state-space model.

    Matrices are stored as read-only arrays. Real systems are the norm;
    complex entries are accepted so that reduced models built from raw
    (not conjugate-closed) frequency data can be represented too.

    Parameters
    ----------
    E, A : (n, n) array_like
    B : (n, m) array_like
    C : (p, n) array_like
    D : (p, m) array_like, optional
        Feedthrough, zero when omitted.
    """

    E: np.ndarray
    A: np.ndarray
    B: np.ndarray
    C: np.ndarray
    D: np.ndarray = field(default=None)

    def __post_init__(self):
        E = _frozen(self.E, "E")
        A = _frozen(self.A, "A")
        B = _frozen(self.B, "B")
        C = _frozen(self.C, "C")
        n = A.shape[0]
        m = B.shape[1]
        p = C.shape[0]
        if self.D is None:
            D = np.zeros((p, m))
            D.setflags(write=False)
        else:
            D = _frozen(self.D, "D")
        if n < 1 or m < 1 or p < 1:
            raise DimensionMismatch(f"need n, m, p >= 1, got n={n}, m={m}, p={p}")
        expected = {"E": (n, n), "A": (n, n), "B": (n, m), "C": (p, n), "D": (p, m)}
        for name, mat in zip("EABCD", (E, A, B, C, D)):
            if mat.shape != expected[name]:
                raise DimensionMismatch(
                    f"{name} has shape {mat.shape}, expected {expected[name]}"
                )
        cond = np.linalg.cond(E)
        if not np.isfinite(cond) or cond * _EPS >= 1.0:
            raise ValidationError(f"E is singular (condition estimate {cond:.3e})")
        for name, mat in zip("EABCD", (E, A, B, C, D)):
            object.__setattr__(self, name, mat)

    @property
    def n(self) -> int:
        return self.A.shape[0]

    @property
    def m(self) -> int:
        return self.B.shape[1]

    @property
    def p(self) -> int:
        return self.C.shape[0]

    @property
    def is_real(self) -> bool:
        return not any(np.iscomplexobj(M) for M in (self.E, self.A, self.B, self.C, self.D))

    def __repr__(self):
        kind = "real" if self.is_real else "complex"
        return f"DescriptorSystem(n={self.n}, m={self.m}, p={self.p}, {kind})"

    def __eq__(self, other):
        if not isinstance(other, DescriptorSystem):
            return NotImplemented
        return all(
            a.shape == b.shape and a.dtype == b.dtype and np.array_equal(a, b)
            for a, b in zip(self._mats(), other._mats())
        )

    __hash__ = None

    def _mats(self):
        return (self.E, self.A, self.B, self.C, self.D)

    def __call__(self, s):
        return eval_transfer(self, s)

    # -- serialization ----------------------------------------------------

    def to_dict(self) -> dict:
        """JSON-ready dict; complex systems gain ``<name>_im`` keys."""
        doc = {"n": self.n, "m": self.m, "p": self.p}
        for name, mat in zip("EABCD", self._mats()):
            doc[name] = np.real(mat).tolist()
        if not self.is_real:
            for name, mat in zip("EABCD", self._mats()):
                doc[name + "_im"] = np.imag(mat).tolist()
        return doc

    @classmethod
    def from_dict(cls, doc: dict) -> "DescriptorSystem":
        try:
            mats = {}
            for name in "EABCD":
                re = np.array(doc[name], dtype=float)
                if name + "_im" in doc:
                    re = re + 1j * np.array(doc[name + "_im"], dtype=float)
                mats[name] = re
            sys = cls(**mats)
            dims = (doc["n"], doc["m"], doc["p"])
        except KeyError as exc:
            raise ValidationError(f"system document lacks key {exc.args[0]!r}") from None
        except (TypeError, ValueError) as exc:
            if isinstance(exc, ValidationError):
                raise
            raise ValidationError(f"malformed system document: {exc}") from None
        if dims != (sys.n, sys.m, sys.p):
            raise DimensionMismatch(
                f"declared (n, m, p)={dims} but matrices give {(sys.n, sys.m, sys.p)}"
            )
        return sys

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_json(cls, text: str) -> "DescriptorSystem":
        return cls.from_dict(json.loads(text))


def eval_transfer(sys: DescriptorSystem, s) -> np.ndarray:
    """Evaluate ``H(s) = C (sE - A)^{-1} B + D``.

    The resolvent is applied through an LU solve against ``B``.

    Raises
    ------
    SingularPencil
        If ``sE - A`` is singular to working precision, i.e. ``s`` is
        (numerically) a pole of the system.
    """
    s = complex(s)
    K = s * sys.E - sys.A
    with warnings.catch_warnings(), np.errstate(all="ignore"):
        warnings.simplefilter("error", spla.LinAlgWarning)
        try:
            X = spla.solve(K, sys.B, check_finite=False)
        except (np.linalg.LinAlgError, spla.LinAlgWarning) as exc:
            raise SingularPencil(f"sE - A is singular at s={s!r}: {exc}") from None
    # scipy's diagonal shortcut divides instead of raising on a zero pivot
    if not np.all(np.isfinite(X)):
        raise SingularPencil(f"sE - A is singular at s={s!r}")
    return sys.C @ X + sys.D


def freqresp(sys: DescriptorSystem, s_values) -> np.ndarray:
    """Stack of ``eval_transfer`` over an iterable of points, shape (N, p, m)."""
    s_values = np.atleast_1d(np.asarray(s_values, dtype=complex))
    out = np.empty((s_values.size, sys.p, sys.m), dtype=complex)
    for k, s in enumerate(s_values):
        out[k] = eval_transfer(sys, s)
    return out


def generate_modal_system(
    k_modes: int,
    omega_range=(0.1, 100.0),
    damping_range=(0.01, 0.05),
    m: int = 1,
    p: int = 1,
    seed: int = 0,
) -> DescriptorSystem:
    """Lightly damped structural benchmark built from second-order modes.

    Mode ``k`` contributes the block ``[[0, 1], [-w_k**2, -2 z_k w_k]]`` to
    a block-diagonal ``A``; ``E`` is the identity. Natural frequencies are
    log-spaced over `omega_range`, damping ratios drawn uniformly from
    `damping_range`, and ``B``, ``C`` uniformly from ``[-1, 1]``, all from a
    single ``numpy.random.default_rng(seed)`` stream.

    Returns
    -------
    DescriptorSystem
        Stable system of order ``2 * k_modes``.
    """
    if int(k_modes) != k_modes or k_modes < 1:
        raise InvalidRange(f"k_modes must be a positive integer, got {k_modes!r}")
    if int(m) != m or int(p) != p or m < 1 or p < 1:
        raise InvalidRange(f"need m, p >= 1, got m={m!r}, p={p!r}")
    w_lo, w_hi = map(float, omega_range)
    z_lo, z_hi = map(float, damping_range)
    # equal bounds are allowed so that a single mode can be pinned exactly
    if not (0.0 < w_lo <= w_hi and np.isfinite(w_hi)):
        raise InvalidRange(f"need 0 < omega_min <= omega_max, got {omega_range!r}")
    if not (0.0 < z_lo <= z_hi < 1.0):
        raise InvalidRange(f"need 0 < zeta_min <= zeta_max < 1, got {damping_range!r}")

    k_modes, m, p = int(k_modes), int(m), int(p)
    rng = np.random.default_rng(seed)
    omegas = np.logspace(np.log10(w_lo), np.log10(w_hi), k_modes)
    zetas = rng.uniform(z_lo, z_hi, k_modes) if z_hi > z_lo else np.full(k_modes, z_lo)
    n = 2 * k_modes
    A = np.zeros((n, n))
    for k, (w, z) in enumerate(zip(omegas, zetas)):
        i = 2 * k
        A[i, i + 1] = 1.0
        A[i + 1, i] = -w * w
        A[i + 1, i + 1] = -2.0 * z * w
    B = rng.uniform(-1.0, 1.0, (n, m))
    C = rng.uniform(-1.0, 1.0, (p, n))
    return DescriptorSystem(np.eye(n), A, B, C)


# Desk-scale stand-in for the 270-state, 3x3 ISS service-module model. The
# modal band (nine decades) is much wider than the default 0.1..100 rad/s
# sampling band: about a third of the modes resonate inside the band and the
# rest only add smooth background, which puts the numerical Loewner rank of
# a 400-sample node near 105.
ISS_LIKE = dict(
    k_modes=135,
    omega_range=(3.0e-4, 3.0e5),
    damping_range=(0.01, 0.05),
    m=3,
    p=3,
)


def iss_like_system(seed: int = 1) -> DescriptorSystem:
    """The synthetic 270-state, 3-input, 3-output structural benchmark."""
    return generate_modal_system(seed=seed, **ISS_LIKE)


def poles(sys: DescriptorSystem) -> np.ndarray:
    """Generalized eigenvalues of ``(A, E)``, sorted by real then imaginary part."""
    if sys.n > POLE_GUARD:
        raise DimensionTooLarge(
            f"dense eigensolve limited to n <= {POLE_GUARD}, got n={sys.n}"
        )
    ev = spla.eigvals(sys.A, sys.E, check_finite=False)
    return np.sort_complex(ev.astype(complex))
