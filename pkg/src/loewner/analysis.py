"""Error metrics, error-vs-order sweeps and response comparison tables."""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import asdict, dataclass, field

import numpy as np

from .core import LoewnerPencil, PencilSVD, reduce
from .data import FrequencyResponseDataset
from .errors import (
    DimensionMismatch,
    DimensionTooLarge,
    NumericalError,
    ROutOfRange,
    SingularPencil,
    PoleHit,
    ValidationError,
)
from .lti import DescriptorSystem, eval_transfer, poles

__all__ = [
    "ErrorReport",
    "SweepEntry",
    "Table",
    "relative_error",
    "error_sweep",
    "response_table",
    "singular_value_table",
    "sweep_table",
]


@dataclass
class ErrorReport:
    """Relative error of a model against a dataset.

    `epsilon` is ``||g - h||_2 / ||h||_2`` over the stacked entries of all
    samples; `per_frequency` holds ``(omega, ||G_i - H_i||_2 / ||H_i||_2)``
    with matrix 2-norms.
    """

    epsilon: float
    per_frequency: list
    r: int
    notes: dict = field(default_factory=dict)

    @property
    def worst(self) -> float:
        return max((e for _, e in self.per_frequency), default=0.0)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["per_frequency"] = [{"omega": w, "error": e} for w, e in self.per_frequency]
        d["worst"] = self.worst
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_dict())


def _model_response(ds, model):
    if (model.p, model.m) != (ds.p, ds.m):
        raise DimensionMismatch(
            f"model is {model.p}x{model.m} but dataset is {ds.p}x{ds.m}"
        )
    G = np.empty((len(ds), ds.p, ds.m), dtype=complex)
    for k, x in enumerate(ds.samples):
        try:
            G[k] = eval_transfer(model, x.s)
        except SingularPencil as exc:
            raise PoleHit(
                f"sample s={x.s!r} is a pole of the model ({exc})", omega=x.s.imag
            ) from None
    return G


def _ratio(num, den):
    # an all-zero reference leaves only the absolute error meaningful
    return num / den if den > 0 else num


def relative_error(ds: FrequencyResponseDataset, model: DescriptorSystem) -> ErrorReport:
    """Compare `model` with the samples of `ds`.

    Raises
    ------
    DimensionMismatch
        If the model's ``(p, m)`` differs from the dataset's.
    PoleHit
        If a sample point is a pole of the model.
    """
    G = _model_response(ds, model)
    H = ds.H
    eps = _ratio(float(np.linalg.norm(G - H)), float(np.linalg.norm(H)))
    per = [
        (float(x.s.imag), _ratio(float(np.linalg.norm(g - h, 2)), float(np.linalg.norm(h, 2))))
        for x, g, h in zip(ds.samples, G, H)
    ]
    notes = {}
    try:
        pl = poles(model)
        notes["unstable_poles"] = int(np.count_nonzero(pl.real > 0))
        notes["max_pole_real"] = float(pl.real.max())
    except DimensionTooLarge:
        notes["unstable_poles"] = None
    return ErrorReport(eps, per, model.n, notes)


@dataclass(frozen=True)
class SweepEntry:
    r: int
    epsilon: float
    status: str = "ok"

    @property
    def ok(self) -> bool:
        return self.status == "ok"


def error_sweep(
    pencil: LoewnerPencil,
    svd: PencilSVD,
    ds: FrequencyResponseDataset,
    orders,
) -> list:
    """Relative error for each reduced order in `orders`.

    Orders are visited in ascending order without duplicates. A numerical
    failure at one order (singular reduced ``E``, a sample landing on a
    reduced pole) is recorded as a skipped entry instead of aborting.
    """
    orders = sorted({int(r) for r in orders})
    if not orders:
        raise ValidationError("orders must be nonempty")
    r_max = min(pencil.shape)
    bad = [r for r in orders if not 1 <= r <= r_max]
    if bad:
        raise ROutOfRange(f"orders {bad} outside [1, {r_max}]")
    H = ds.H
    href = float(np.linalg.norm(H))
    out = []
    for r in orders:
        try:
            model = reduce(pencil, svd, r)
            G = _model_response(ds, model)
        except NumericalError as exc:
            out.append(SweepEntry(r, math.nan, f"skipped: {type(exc).__name__}"))
            continue
        out.append(SweepEntry(r, _ratio(float(np.linalg.norm(G - H)), href)))
    return out


@dataclass
class Table:
    header: tuple
    rows: list

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(self.header)
        for row in self.rows:
            w.writerow([_fmt(v) for v in row])
        return buf.getvalue()


def _fmt(v):
    if isinstance(v, (bool, np.bool_)):
        return str(v).lower()
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        v = float(v)
        return "" if math.isnan(v) else repr(v)
    return str(v)


def _phase(z):
    a = float(np.angle(z))
    return math.pi if a == -math.pi else a


def response_table(ds: FrequencyResponseDataset, model: DescriptorSystem) -> Table:
    """Magnitude and phase of data and model per frequency and channel.

    SISO data gives columns ``omega,|H|,|G|,argH,argG``; MIMO data adds the
    channel indices ``out,in`` after ``omega`` and lists the ``p*m``
    channels of each frequency in row-major order. Phases are radians in
    ``(-pi, pi]``.
    """
    G = _model_response(ds, model)
    H = ds.H
    siso = (ds.p, ds.m) == (1, 1)
    header = ("omega", "|H|", "|G|", "argH", "argG")
    if not siso:
        header = ("omega", "out", "in") + header[1:]
    rows = []
    for x, g, h in zip(ds.samples, G, H):
        w = float(x.s.imag)
        for q in range(ds.p):
            for k in range(ds.m):
                vals = (abs(h[q, k]), abs(g[q, k]), _phase(h[q, k]), _phase(g[q, k]))
                rows.append((w,) + vals if siso else (w, q, k) + vals)
    return Table(header, rows)


def singular_value_table(svd: PencilSVD) -> Table:
    """``k,sigma`` rows, ``k`` counted from 1."""
    return Table(("k", "sigma"), [(k + 1, float(s)) for k, s in enumerate(svd.sigma)])


def sweep_table(entries) -> Table:
    return Table(("r", "epsilon", "status"), [(e.r, e.epsilon, e.status) for e in entries])
