"""Frequency-response datasets: sampling, channel extraction and file I/O.

Two on-disk formats are supported. SISO data is written as CSV with header
``omega,re,im`` and one row per sample (the sample point is ``s = i*omega``).
MIMO data is JSON::

    {"m": 3, "p": 3, "samples": [{"omega": 0.1, "H_re": [[...]], "H_im": [[...]]}, ...]}

Floats are written with Python's shortest round-trip ``repr`` so a write
followed by a read reproduces every value bit for bit.
"""

from __future__ import annotations

import csv
import io
import json
import math
import os
import tempfile
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import (
    DimensionMismatch,
    DuplicateFrequency,
    IndexOutOfRange,
    ParseError,
    PoleHit,
    SchemaMismatch,
    SingularPencil,
    ValidationError,
)
from .lti import DescriptorSystem, eval_transfer

__all__ = [
    "FrequencySample",
    "FrequencyResponseDataset",
    "sample_frequency_response",
    "extract_node",
    "read_dataset",
    "write_dataset",
    "log_grid",
    "atomic_write_text",
]


@dataclass(frozen=True, eq=False)
class FrequencySample:
    """One complex frequency ``s`` and the ``p x m`` response ``H(s)``."""

    s: complex
    H: np.ndarray

    def __post_init__(self):
        H = np.array(self.H, dtype=complex, copy=True)
        if H.ndim == 0:
            H = H.reshape(1, 1)
        if H.ndim != 2:
            raise DimensionMismatch(f"H must be a p x m matrix, got shape {H.shape}")
        if not np.all(np.isfinite(H)):
            raise ValidationError(f"non-finite transfer value at s={self.s!r}")
        H.setflags(write=False)
        object.__setattr__(self, "s", complex(self.s))
        object.__setattr__(self, "H", H)

    @property
    def omega(self) -> float:
        return self.s.imag


def _order_key(sample):
    return (abs(sample.s.imag), sample.s.imag, sample.s.real)


@dataclass(frozen=True, eq=False)
class FrequencyResponseDataset:
    """Ordered collection of frequency samples sharing one ``(p, m)`` shape.

    Samples are sorted on construction by ascending ``|Im s|`` then ``Im s``
    (ties broken on ``Re s``) and must have pairwise distinct ``s``.
    """

    samples: tuple
    m: int
    p: int
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        samples = tuple(
            x if isinstance(x, FrequencySample) else FrequencySample(*x)
            for x in self.samples
        )
        m, p = int(self.m), int(self.p)
        if m < 1 or p < 1:
            raise DimensionMismatch(f"need m, p >= 1, got m={m}, p={p}")
        for x in samples:
            if x.H.shape != (p, m):
                raise SchemaMismatch(
                    f"sample at s={x.s!r} has shape {x.H.shape}, expected {(p, m)}"
                )
        samples = tuple(sorted(samples, key=_order_key))
        for a, b in zip(samples, samples[1:]):
            if a.s == b.s:
                raise DuplicateFrequency(f"duplicate sample point s={a.s!r}")
        object.__setattr__(self, "samples", samples)
        object.__setattr__(self, "m", m)
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "metadata", dict(self.metadata))

    @classmethod
    def from_arrays(cls, s, H, metadata=None) -> "FrequencyResponseDataset":
        """Build from a point vector ``s`` (N,) and a response stack (N, p, m)."""
        s = np.atleast_1d(np.asarray(s, dtype=complex))
        H = np.asarray(H, dtype=complex)
        if H.ndim == 1:
            H = H.reshape(-1, 1, 1)
        if H.ndim != 3 or H.shape[0] != s.size:
            raise DimensionMismatch(
                f"need H of shape (N, p, m) with N={s.size}, got {H.shape}"
            )
        samples = [FrequencySample(sk, Hk) for sk, Hk in zip(s, H)]
        return cls(tuple(samples), m=H.shape[2], p=H.shape[1], metadata=metadata or {})

    def __len__(self):
        return len(self.samples)

    def __iter__(self):
        return iter(self.samples)

    @property
    def s(self) -> np.ndarray:
        return np.array([x.s for x in self.samples], dtype=complex)

    @property
    def omega(self) -> np.ndarray:
        return self.s.imag

    @property
    def H(self) -> np.ndarray:
        """All responses as one (N, p, m) array."""
        if not self.samples:
            return np.zeros((0, self.p, self.m), dtype=complex)
        return np.stack([x.H for x in self.samples])

    def __eq__(self, other):
        if not isinstance(other, FrequencyResponseDataset):
            return NotImplemented
        return (
            (self.m, self.p) == (other.m, other.p)
            and len(self) == len(other)
            and np.array_equal(self.s, other.s)
            and np.array_equal(self.H, other.H)
        )

    __hash__ = None

    def __repr__(self):
        return f"FrequencyResponseDataset(N={len(self)}, p={self.p}, m={self.m})"


def log_grid(omega_min: float, omega_max: float, count: int) -> np.ndarray:
    """``count`` log-spaced frequencies in ``[omega_min, omega_max]`` rad/s."""
    if count < 0:
        raise ValidationError(f"frequency count must be >= 0, got {count}")
    if not (0.0 < omega_min < omega_max):
        raise ValidationError(
            f"need 0 < omega_min < omega_max, got {omega_min}, {omega_max}"
        )
    return np.logspace(np.log10(omega_min), np.log10(omega_max), count)


def sample_frequency_response(sys: DescriptorSystem, frequencies) -> FrequencyResponseDataset:
    """Sample ``H(i*omega)`` at each real ``omega >= 0``, in ascending order.

    Raises
    ------
    DuplicateFrequency
        If two frequencies coincide.
    PoleHit
        If some ``i*omega`` is a pole of `sys`; the exception names omega.
    """
    omegas = np.asarray(frequencies, dtype=float).ravel()
    if np.any(omegas < 0) or not np.all(np.isfinite(omegas)):
        raise ValidationError("frequencies must be finite and nonnegative")
    omegas = np.sort(omegas)
    if omegas.size and np.any(np.diff(omegas) == 0):
        dup = omegas[1:][np.diff(omegas) == 0][0]
        raise DuplicateFrequency(f"frequency omega={dup!r} appears more than once")
    samples = []
    for w in omegas:
        try:
            samples.append(FrequencySample(1j * w, eval_transfer(sys, 1j * w)))
        except SingularPencil as exc:
            raise PoleHit(
                f"omega={float(w)!r} hits a pole of the system ({exc})", omega=float(w)
            ) from None
    return FrequencyResponseDataset(tuple(samples), m=sys.m, p=sys.p)


def extract_node(ds: FrequencyResponseDataset, out_idx: int, in_idx: int) -> FrequencyResponseDataset:
    """SISO dataset holding the ``(out_idx, in_idx)`` channel of `ds`."""
    if not (0 <= out_idx < ds.p) or not (0 <= in_idx < ds.m):
        raise IndexOutOfRange(
            f"node ({out_idx}, {in_idx}) outside a {ds.p}x{ds.m} response"
        )
    samples = tuple(
        FrequencySample(x.s, x.H[out_idx : out_idx + 1, in_idx : in_idx + 1])
        for x in ds.samples
    )
    meta = dict(ds.metadata)
    meta["node"] = f"{out_idx},{in_idx}"
    return FrequencyResponseDataset(samples, m=1, p=1, metadata=meta)


# -- file formats -------------------------------------------------------------

CSV_HEADER = ("omega", "re", "im")


def atomic_write_text(path, text: str) -> None:
    """Write `text` to `path` through a temporary file and rename."""
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent or ".", prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _check_imaginary_axis(ds):
    for x in ds.samples:
        if x.s.real != 0.0 or x.s.imag < 0:
            raise ValidationError(
                f"only points s = i*omega with omega >= 0 can be stored, got s={x.s!r}"
            )


def dataset_to_csv(ds: FrequencyResponseDataset) -> str:
    if (ds.p, ds.m) != (1, 1):
        raise SchemaMismatch(f"CSV holds SISO data only, dataset is {ds.p}x{ds.m}")
    _check_imaginary_axis(ds)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for x in ds.samples:
        h = complex(x.H[0, 0])
        w.writerow((repr(float(x.s.imag)), repr(h.real), repr(h.imag)))
    return buf.getvalue()


def dataset_to_json(ds: FrequencyResponseDataset) -> str:
    _check_imaginary_axis(ds)
    doc = {
        "m": ds.m,
        "p": ds.p,
        "samples": [
            {"omega": float(x.s.imag), "H_re": x.H.real.tolist(), "H_im": x.H.imag.tolist()}
            for x in ds.samples
        ],
    }
    if ds.metadata:
        doc["metadata"] = {str(k): str(v) for k, v in ds.metadata.items()}
    return json.dumps(doc) + "\n"


def _parse_float(text, line, name):
    try:
        v = float(text)
    except ValueError:
        raise ParseError(f"cannot parse {text!r} as a number", line=line, field=name) from None
    if not math.isfinite(v):
        raise ParseError(f"non-finite value {text!r}", line=line, field=name)
    return v


def dataset_from_csv(text: str, source="<csv>") -> FrequencyResponseDataset:
    rows = list(csv.reader(io.StringIO(text)))
    if not rows:
        raise ParseError("empty file, expected header 'omega,re,im'", line=1)
    header = tuple(c.strip() for c in rows[0])
    if header != CSV_HEADER:
        raise ParseError(f"bad header {','.join(header)!r}, expected 'omega,re,im'", line=1)
    s, H = [], []
    for lineno, row in enumerate(rows[1:], start=2):
        if not row or all(not c.strip() for c in row):
            continue
        if len(row) != 3:
            raise ParseError(f"expected 3 fields, got {len(row)}", line=lineno)
        w, re, im = (_parse_float(c, lineno, n) for c, n in zip(row, CSV_HEADER))
        if w < 0:
            raise ParseError("omega must be nonnegative", line=lineno, field="omega")
        s.append(1j * w)
        H.append(complex(re, im))
    try:
        return FrequencyResponseDataset.from_arrays(
            s, np.array(H, dtype=complex).reshape(-1, 1, 1), metadata={"source": str(source)}
        )
    except DuplicateFrequency as exc:
        raise ParseError(str(exc)) from None


def dataset_from_json(text: str, source="<json>") -> FrequencyResponseDataset:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, line=exc.lineno) from None
    if not isinstance(doc, dict):
        raise ParseError("top level must be an object")
    for key in ("m", "p", "samples"):
        if key not in doc:
            raise ParseError("missing key", field=key)
    m, p = doc["m"], doc["p"]
    if not (isinstance(m, int) and isinstance(p, int) and m >= 1 and p >= 1):
        raise ParseError(f"m and p must be positive integers, got m={m!r}, p={p!r}")
    s, H = [], []
    for k, rec in enumerate(doc["samples"]):
        where = f"samples[{k}]"
        try:
            w = float(rec["omega"])
            re = np.array(rec["H_re"], dtype=float)
            im = np.array(rec["H_im"], dtype=float)
        except KeyError as exc:
            raise ParseError(f"{where} lacks a value", field=exc.args[0]) from None
        except (TypeError, ValueError) as exc:
            raise ParseError(f"{where}: {exc}") from None
        if re.shape != (p, m) or im.shape != (p, m):
            raise SchemaMismatch(
                f"{where} has H shapes {re.shape}/{im.shape}, declared (p, m)={(p, m)}"
            )
        if w < 0 or not math.isfinite(w):
            raise ParseError(f"{where}: omega must be finite and nonnegative", field="omega")
        s.append(1j * w)
        H.append(re + 1j * im)
    meta = {"source": str(source)}
    meta.update({str(k): str(v) for k, v in doc.get("metadata", {}).items()})
    H = np.array(H, dtype=complex).reshape(-1, p, m)
    try:
        return FrequencyResponseDataset.from_arrays(s, H, metadata=meta)
    except DuplicateFrequency as exc:
        raise ParseError(str(exc)) from None


def read_dataset(path) -> FrequencyResponseDataset:
    """Read a ``.csv`` (SISO) or ``.json`` (any shape) dataset."""
    path = Path(path)
    text = path.read_text()
    if path.suffix.lower() == ".csv":
        return dataset_from_csv(text, source=path.name)
    return dataset_from_json(text, source=path.name)


def write_dataset(ds: FrequencyResponseDataset, path) -> None:
    """Write `ds`; the format follows the file suffix (``.csv`` or ``.json``)."""
    path = Path(path)
    if path.suffix.lower() == ".csv":
        text = dataset_to_csv(ds)
    else:
        text = dataset_to_json(ds)
    atomic_write_text(path, text)
