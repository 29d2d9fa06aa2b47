"""Command-line front end: ``loewner {generate,sample,reduce,sweep,report}``.

Exit codes: 0 success, 2 invalid flags or inputs, 3 numerical failure,
4 unreadable or malformed files.
"""

from __future__ import annotations

import argparse
import os
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .analysis import (
    error_sweep,
    relative_error,
    response_table,
    singular_value_table,
    sweep_table,
)
from .core import RANK_TOL, build_pencil, reduce_bumping, select_order, svd_pencil
from .data import (
    atomic_write_text,
    dataset_to_csv,
    dataset_to_json,
    extract_node,
    log_grid,
    read_dataset,
    sample_frequency_response,
)
from .errors import DataError, LoewnerError, NumericalError, ValidationError
from .lti import ISS_LIKE, DescriptorSystem, generate_modal_system
from .partition import conjugate_close, partition

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_NUMERICAL = 3
EXIT_DATA = 4

SEED_ENV = "LOEWNER_SEED"


def parse_range(text, n_parts=(2,), kind=float):
    """Parse ``a:b`` or ``a:b:step`` into a tuple of `kind`."""
    parts = text.split(":")
    if len(parts) not in n_parts:
        shapes = " or ".join(":".join("abs"[:k]) for k in n_parts)
        raise ValidationError(f"range {text!r} must look like {shapes}")
    try:
        return tuple(kind(x) for x in parts)
    except ValueError:
        raise ValidationError(f"cannot parse range {text!r}") from None


def parse_orders(text):
    a, b, *rest = parse_range(text, (2, 3), int)
    step = rest[0] if rest else 1
    if step < 1 or a < 1 or b < a:
        raise ValidationError(f"orders {text!r} need 1 <= a <= b and step >= 1")
    return list(range(a, b + 1, step))


def parse_bool(text):
    t = text.strip().lower()
    if t in ("true", "1", "yes", "on"):
        return True
    if t in ("false", "0", "no", "off"):
        return False
    raise argparse.ArgumentTypeError(f"expected true or false, got {text!r}")


@dataclass
class RunConfig:
    """Validated flag set of one subcommand invocation."""

    subcommand: str
    out: str = "-"
    system: str | None = None
    data: str | None = None
    model: str | None = None
    sv_out: str | None = None
    json_out: str | None = None
    n_modes: int | None = None
    inputs: int = 1
    outputs: int = 1
    seed: int | None = None
    mode_omega: tuple = (0.1, 100.0)
    damping: tuple = (0.01, 0.05)
    omega_min: float = 0.1
    omega_max: float = 100.0
    n_freq: int = 400
    node: tuple | None = None
    partition: str = "interleave"
    real: bool = True
    shift: complex | str = "auto"
    r: int | None = None
    tol: float | None = None
    orders: list = field(default_factory=list)

    def validate(self):
        """Check every precondition at once; raise one aggregated error."""
        errs = []
        need = {
            "sample": ("system",),
            "reduce": ("data",),
            "sweep": ("data",),
            "report": ("data", "model"),
        }.get(self.subcommand, ())
        for name in need:
            path = getattr(self, name)
            if path is None:
                errs.append(f"--{name} is required")
            elif not Path(path).is_file():
                errs.append(f"--{name} {path!r} is not a readable file")
        if self.subcommand == "generate":
            if self.n_modes is None or self.n_modes < 1:
                errs.append(f"--modes must be >= 1, got {self.n_modes}")
            if self.inputs < 1 or self.outputs < 1:
                errs.append("--inputs and --outputs must be >= 1")
            w0, w1 = self.mode_omega
            if not 0 < w0 <= w1:
                errs.append(f"--mode-omega needs 0 < a <= b, got {w0}:{w1}")
            z0, z1 = self.damping
            if not 0 < z0 <= z1 < 1:
                errs.append(f"--damping needs 0 < a <= b < 1, got {z0}:{z1}")
        if self.subcommand == "sample":
            if self.n_freq < 1:
                errs.append(f"--freqs must be >= 1, got {self.n_freq}")
            if not 0 < self.omega_min < self.omega_max:
                errs.append(
                    f"--omega needs 0 < a < b, got {self.omega_min}:{self.omega_max}"
                )
            if self.node is not None and min(self.node) < 0:
                errs.append(f"--node indices must be >= 0, got {self.node}")
        if self.subcommand in ("reduce", "sweep"):
            if self.r is not None and self.r < 1:
                errs.append(f"--r must be >= 1, got {self.r}")
            if self.tol is not None and not 0 < self.tol < 1:
                errs.append(f"--tol must lie in (0, 1), got {self.tol}")
            if self.r is not None and self.tol is not None:
                errs.append("--r and --tol are mutually exclusive")
        if errs:
            raise ValidationError("invalid configuration: " + "; ".join(errs))
        return self


def _emit(path, text):
    if path in (None, "-"):
        sys.stdout.write(text)
    else:
        atomic_write_text(path, text)


def _note(msg):
    print(msg, file=sys.stderr)


def _load_system(path):
    try:
        return DescriptorSystem.from_json(Path(path).read_text())
    except ValueError as exc:
        if isinstance(exc, LoewnerError):
            raise
        raise DataError(f"{path}: {exc}") from None


def _pencil(cfg, ds):
    td = partition(ds, cfg.partition)
    if cfg.real:
        td = conjugate_close(td)
    pencil = build_pencil(td, make_real=cfg.real)
    return pencil, svd_pencil(pencil, cfg.shift)


def cmd_generate(cfg):
    sys_ = generate_modal_system(
        cfg.n_modes, cfg.mode_omega, cfg.damping, cfg.inputs, cfg.outputs, cfg.seed
    )
    _emit(cfg.out, sys_.to_json() + "\n")
    _note(f"generated system n={sys_.n} m={sys_.m} p={sys_.p} seed={cfg.seed}")


def cmd_sample(cfg):
    sys_ = _load_system(cfg.system)
    ds = sample_frequency_response(sys_, log_grid(cfg.omega_min, cfg.omega_max, cfg.n_freq))
    if cfg.node is not None:
        ds = extract_node(ds, *cfg.node)
    as_csv = cfg.out.lower().endswith(".csv") if cfg.out != "-" else (ds.p, ds.m) == (1, 1)
    _emit(cfg.out, dataset_to_csv(ds) if as_csv else dataset_to_json(ds))
    _note(f"sampled {len(ds)} frequencies, response {ds.p}x{ds.m}")


def cmd_reduce(cfg):
    ds = read_dataset(cfg.data)
    pencil, svd = _pencil(cfg, ds)
    if cfg.r is not None:
        r = select_order(svd, r=cfg.r)
    else:
        r = select_order(svd, tol=cfg.tol if cfg.tol is not None else RANK_TOL)
        if r == 0:
            raise NumericalError("no signal: every pencil singular value is zero")
    model = reduce_bumping(pencil, svd, r)
    if cfg.sv_out:
        atomic_write_text(cfg.sv_out, singular_value_table(svd).to_csv())
    _emit(cfg.out, model.to_json() + "\n")
    _note(
        f"reduced to r={model.r} (pencil {pencil.shape[0]}x{pencil.shape[1]}, "
        f"shift x={svd.shift_x}, sylvester residuals {pencil.residuals[0]:.2e}, "
        f"{pencil.residuals[1]:.2e})"
    )


def cmd_sweep(cfg):
    ds = read_dataset(cfg.data)
    pencil, svd = _pencil(cfg, ds)
    r_max = min(pencil.shape)
    orders = [r for r in cfg.orders if r <= r_max]
    dropped = [r for r in cfg.orders if r > r_max]
    if dropped:
        _note(f"dropping orders above the pencil size {r_max}: {dropped}")
    if not orders:
        raise ValidationError(f"no requested order lies within [1, {r_max}]")
    entries = error_sweep(pencil, svd, ds, orders)
    for e in entries:
        if not e.ok:
            _note(f"r={e.r}: {e.status}")
    _emit(cfg.out, sweep_table(entries).to_csv())


def cmd_report(cfg):
    ds = read_dataset(cfg.data)
    model = _load_system(cfg.model)
    rep = relative_error(ds, model)
    table = response_table(ds, model)
    _emit(cfg.out, table.to_csv())
    if cfg.json_out:
        atomic_write_text(cfg.json_out, rep.to_json() + "\n")
    print(f"epsilon={rep.epsilon!r} worst={rep.worst!r} r={rep.r}", file=sys.stderr)


COMMANDS = {
    "generate": cmd_generate,
    "sample": cmd_sample,
    "reduce": cmd_reduce,
    "sweep": cmd_sweep,
    "report": cmd_report,
}


def build_parser():
    ap = argparse.ArgumentParser(
        prog="loewner",
        description="Loewner-framework model reduction from frequency-response data.",
    )
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = ap.add_subparsers(dest="subcommand", required=True)

    def out_flag(p, what):
        p.add_argument("-o", "--out", default="-", help=f"{what} (default: stdout)")

    def pencil_flags(p):
        p.add_argument("--data", required=True, help="dataset file (.csv SISO or .json)")
        p.add_argument("--partition", choices=("interleave", "half"), default="interleave")
        p.add_argument("--real", type=parse_bool, default=True, metavar="true|false",
                       help="conjugate-close the data and build a real model (default true)")
        p.add_argument("--shift", default="auto",
                       help="pencil shift x, a (complex) number or 'auto'")

    g = sub.add_parser("generate", help="synthetic lightly damped modal system")
    g.add_argument("--preset", choices=("iss-like",),
                   help="start from the 270-state 3x3 benchmark settings")
    g.add_argument("--modes", type=int, dest="n_modes")
    g.add_argument("--inputs", type=int)
    g.add_argument("--outputs", type=int)
    g.add_argument("--seed", type=int)
    g.add_argument("--mode-omega", help="modal frequency band a:b in rad/s")
    g.add_argument("--damping", help="damping ratio band a:b")
    out_flag(g, "system JSON path")

    s = sub.add_parser("sample", help="sample H(i*omega) of a system file")
    s.add_argument("--system", required=True)
    s.add_argument("--freqs", type=int, default=400, dest="n_freq")
    s.add_argument("--omega", default="0.1:100", help="frequency band a:b in rad/s, log-spaced")
    s.add_argument("--node", help="keep one channel 'out,in'")
    out_flag(s, "dataset path; .csv for SISO, otherwise JSON")

    r = sub.add_parser("reduce", help="build a reduced model from data")
    pencil_flags(r)
    grp = r.add_mutually_exclusive_group()
    grp.add_argument("--r", type=int)
    grp.add_argument("--tol", type=float)
    r.add_argument("--sv", dest="sv_out", help="write pencil singular values as k,sigma CSV")
    out_flag(r, "model JSON path")

    w = sub.add_parser("sweep", help="error versus reduced order")
    pencil_flags(w)
    w.add_argument("--orders", default="10:200:10", help="a:b or a:b:step, inclusive")
    out_flag(w, "sweep CSV path")

    p = sub.add_parser("report", help="compare a model against data")
    p.add_argument("--data", required=True)
    p.add_argument("--model", required=True)
    p.add_argument("--json", dest="json_out", help="also write the error report as JSON")
    out_flag(p, "response CSV path")
    return ap


def config_from_args(ns) -> RunConfig:
    cfg = RunConfig(subcommand=ns.subcommand, out=getattr(ns, "out", "-"))
    cmd = ns.subcommand
    if cmd == "generate":
        base = dict(ISS_LIKE) if ns.preset else {}
        cfg.n_modes = ns.n_modes if ns.n_modes is not None else base.get("k_modes")
        cfg.inputs = ns.inputs if ns.inputs is not None else base.get("m", 1)
        cfg.outputs = ns.outputs if ns.outputs is not None else base.get("p", 1)
        cfg.mode_omega = (
            parse_range(ns.mode_omega) if ns.mode_omega else base.get("omega_range", (0.1, 100.0))
        )
        cfg.damping = (
            parse_range(ns.damping) if ns.damping else base.get("damping_range", (0.01, 0.05))
        )
        seed = ns.seed
        if seed is None:
            env = os.environ.get(SEED_ENV)
            try:
                seed = int(env) if env else 0
            except ValueError:
                raise ValidationError(f"{SEED_ENV}={env!r} is not an integer") from None
        cfg.seed = seed
    elif cmd == "sample":
        cfg.system = ns.system
        cfg.n_freq = ns.n_freq
        cfg.omega_min, cfg.omega_max = parse_range(ns.omega)
        if ns.node:
            cfg.node = parse_range(ns.node.replace(",", ":"), (2,), int)
    elif cmd in ("reduce", "sweep"):
        cfg.data = ns.data
        cfg.partition = "half-split" if ns.partition == "half" else ns.partition
        cfg.real = ns.real
        if ns.shift != "auto":
            try:
                cfg.shift = complex(ns.shift.replace("i", "j"))
            except ValueError:
                raise ValidationError(f"cannot parse --shift {ns.shift!r}") from None
        if cmd == "reduce":
            cfg.r, cfg.tol, cfg.sv_out = ns.r, ns.tol, ns.sv_out
        else:
            cfg.orders = parse_orders(ns.orders)
    elif cmd == "report":
        cfg.data, cfg.model, cfg.json_out = ns.data, ns.model, ns.json_out
    return cfg.validate()


def main(argv=None) -> int:
    ap = build_parser()
    ns = ap.parse_args(argv)
    try:
        cfg = config_from_args(ns)
        with np.errstate(all="ignore"):
            COMMANDS[cfg.subcommand](cfg)
    except ValidationError as exc:
        _note(f"error: {exc}")
        return EXIT_VALIDATION
    except NumericalError as exc:
        _note(f"numerical error ({type(exc).__name__}): {exc}")
        return EXIT_NUMERICAL
    except (DataError, OSError) as exc:
        _note(f"data error: {exc}")
        return EXIT_DATA
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
