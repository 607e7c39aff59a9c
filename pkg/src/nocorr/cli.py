"""``nocorr`` command line.

Matrices are written as JSON, tables as CSV, all numbers with 12 significant
digits. Without ``--out`` a subcommand writes ``<subcommand>.<ext>`` into
``$NOCORR_OUT`` if that is set, and to stdout otherwise.

Exit status: 0 success, 1 invalid input or flags, 2 solver failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import experiments as ex
from .correlations import CONVENTIONS, PER_PLACEMENT, corr_tensor, sigma
from .gellmann import gellmann_basis
from .gme import gme_witness
from .notmap import anti_state, naive_hw_map, nc_state
from .optim.sdp import SDPError
from .optim.simplex import LPError
from .qla import DensityMatrix, density_from_json, matrix_to_json
from .states import NAMED_STATES, density, ghz, haar_random_pure, named_state

OUT_ENV = "NOCORR_OUT"
EXIT_OK, EXIT_INVALID, EXIT_SOLVER = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):  # argparse would exit with status 2
        self.print_usage(sys.stderr)
        raise UsageError(message)


def num(x: float) -> str:
    return f"{float(x) + 0.0:.12g}"  # + 0.0 turns -0.0 into 0.0


def _num_json(x: float) -> float:
    return float(num(x))


@dataclass(frozen=True)
class RunConfig:
    command: str
    inp: Path | None
    out: Path | None
    d: int | None
    n: int | None
    seed: int
    trials: int | None
    settings: int
    convention: str
    tol: float
    workers: int


def _resolve_out(args) -> Path | None:
    if args.out:
        return Path(args.out).resolve()
    env = os.environ.get(OUT_ENV)
    if env:
        ext = "csv" if args.command in _CSV_COMMANDS else "json"
        return (Path(env) / f"{args.command}.{ext}").resolve()
    return None


def config_from_args(args) -> RunConfig:
    return RunConfig(
        command=args.command,
        inp=Path(args.inp).resolve() if getattr(args, "inp", None) else None,
        out=_resolve_out(args),
        d=args.d, n=args.n, seed=args.seed, trials=args.trials,
        settings=args.settings, convention=args.convention, tol=args.tol,
        workers=args.workers,
    )


def _emit(text: str, cfg: RunConfig) -> None:
    if cfg.out is None:
        sys.stdout.write(text)
        return
    cfg.out.parent.mkdir(parents=True, exist_ok=True)
    cfg.out.write_text(text)


def _json(obj) -> str:
    return json.dumps(obj, separators=(",", ":")) + "\n"


def _csv(header: list[str], rows: list[list]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def _load(cfg: RunConfig, args) -> DensityMatrix:
    if getattr(args, "name", None):
        return density(named_state(args.name))
    if cfg.inp is None:
        raise UsageError("an input state is required (--in FILE or --name)")
    try:
        obj = json.loads(cfg.inp.read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ValueError(f"cannot read {cfg.inp}: {exc}") from exc
    return density_from_json(obj)


def _pair(text: str) -> tuple[int, int]:
    try:
        d, n = (int(x) for x in text.split(","))
    except ValueError as exc:
        raise UsageError(f"expected 'd,n', got {text!r}") from exc
    return d, n


# --- subcommands ------------------------------------------------------------

def cmd_basis(cfg: RunConfig, args) -> str:
    b = gellmann_basis(cfg.d or 3)
    items = [matrix_to_json(m, kind=k, label=list(lab) if isinstance(lab, tuple) else lab)
             for m, k, lab in zip(b.elements, b.kinds, b.labels)]
    return _json({"d": b.d, "elements": items})


def cmd_state(cfg: RunConfig, args) -> str:
    chosen = [x for x in (args.name, args.ghz, args.haar) if x]
    if len(chosen) != 1:
        raise UsageError("give exactly one of --name, --ghz d,n or --haar d,n")
    if args.name:
        rho = density(named_state(args.name))
    elif args.ghz:
        rho = density(ghz(*_pair(args.ghz)))
    else:
        d, n = _pair(args.haar)
        rho = density(haar_random_pure(d, n, cfg.seed))
    return _json(matrix_to_json(rho.matrix, rho.dims))


def cmd_tensor(cfg: RunConfig, args) -> str:
    t = corr_tensor(_load(cfg, args))
    rows = []
    for idx in np.ndindex(*t.values.shape):
        v = t.values[idx]
        if abs(v) > cfg.tol:
            rows.append([*idx, num(v)])
    return _csv([f"mu{k}" for k in range(t.n)] + ["value"], rows)


def cmd_sigma(cfg: RunConfig, args) -> str:
    rho = _load(cfg, args)
    t = corr_tensor(rho)
    rows = [[k, num(sigma(t, k, cfg.convention))] for k in range(1, rho.n + 1)]
    return _csv(["k", "sigma"], rows)


def cmd_anti(cfg: RunConfig, args) -> str:
    rho = anti_state(_load(cfg, args))
    return _json(matrix_to_json(rho.matrix, rho.dims))


def cmd_nc(cfg: RunConfig, args) -> str:
    rho = nc_state(_load(cfg, args))
    return _json(matrix_to_json(rho.matrix, rho.dims))


def cmd_hwdemo(cfg: RunConfig, args) -> str:
    d = cfg.d or 3
    psi = np.zeros(d, dtype=complex)
    psi[:2] = 1 / np.sqrt(2)
    rho = np.outer(psi, psi.conj())
    image, low = naive_hw_map(rho, d)
    return _json({
        "d": d,
        "input": matrix_to_json(rho),
        "image": matrix_to_json(image),
        "eigenvalues": [_num_json(x) for x in np.linalg.eigvalsh(image)],
        "min_eigenvalue": _num_json(low),
        "positive": bool(low >= -1e-12),
    })


def cmd_witness(cfg: RunConfig, args) -> str:
    rho = _load(cfg, args)
    res = gme_witness(rho, tol=cfg.tol)
    return _json({
        "W": _num_json(res.value),
        "raw_min": _num_json(res.raw_min),
        "gme": res.is_gme,
        "gap": _num_json(res.sdp.gap),
        "iterations": res.sdp.iterations,
        "bipartitions": [str(c) for c in res.P],
    })


def cmd_bell(cfg: RunConfig, args) -> str:
    rho = _load(cfg, args)
    bc = ex.BellConfig(settings=cfg.settings, trials=cfg.trials or 20, seed=cfg.seed,
                       workers=cfg.workers)
    rows = []
    for tr in ex.run_bell(rho, bc):
        cert = tr.result.certificate
        rows.append([
            tr.trial, tr.seed, str(tr.result.local).lower(), tr.result.lp.iterations,
            "" if cert is None else num(cert.classical_bound),
            "" if cert is None else num(cert.quantum_value),
            "" if cert is None else " ".join(num(c) for c in cert.coefficients.ravel()),
        ])
    return _csv(["trial", "seed", "local", "pivots", "classical_bound", "quantum_value",
                 "coefficients"], rows)


def cmd_table1(cfg: RunConfig, args) -> str:
    rows = [[r.state, r.kind, r.k, num(r.value), str(Fraction(r.value).limit_denominator(100_000))]
            for r in ex.sigma_table(convention=cfg.convention)]
    return _csv(["state", "kind", "k", "sigma", "rational"], rows)


def cmd_fig1(cfg: RunConfig, args) -> str:
    name = args.name or "b"
    rho = density(named_state(name))
    nc = nc_state(rho)
    return _json({
        "name": name,
        "state": matrix_to_json(rho.matrix, rho.dims),
        "nc": matrix_to_json(nc.matrix, nc.dims),
        "nc_is_real": bool(np.max(np.abs(nc.matrix.imag)) < 1e-12),
    })


def cmd_sample(cfg: RunConfig, args) -> str:
    sc = ex.SampleConfig(count=cfg.trials or 200, seed=cfg.seed, d=cfg.d or 3, n=cfg.n or 3,
                         tol=cfg.tol, workers=cfg.workers)
    rep = ex.run_sample(sc)
    return _json({
        "count": sc.count, "seed": sc.seed, "d": sc.d, "n": sc.n,
        "threshold": sc.threshold,
        "gme": rep.hits,
        "fraction": _num_json(rep.fraction),
        "values": [_num_json(v) for v in rep.values],
    })


COMMANDS = {
    "basis": cmd_basis, "state": cmd_state, "tensor": cmd_tensor, "sigma": cmd_sigma,
    "anti": cmd_anti, "nc": cmd_nc, "hwdemo": cmd_hwdemo, "witness": cmd_witness,
    "bell": cmd_bell, "table1": cmd_table1, "fig1": cmd_fig1, "sample": cmd_sample,
}
_CSV_COMMANDS = {"tensor", "sigma", "bell", "table1"}


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--in", dest="inp", metavar="FILE", help="input state (JSON matrix)")
    common.add_argument("--out", metavar="FILE", help=f"output file (default: ${OUT_ENV}/<cmd>.<ext> or stdout)")
    common.add_argument("--d", type=int, help="local dimension")
    common.add_argument("--n", type=int, help="number of parties")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--trials", "--count", dest="trials", type=int, help="trials or sample size")
    common.add_argument("--settings", type=int, default=3, help="measurement settings per party")
    common.add_argument("--convention", choices=CONVENTIONS, default=PER_PLACEMENT)
    common.add_argument("--tol", type=float, default=1e-8)
    common.add_argument("--workers", type=int, default=1, help="worker processes for sample/bell")
    common.add_argument("--name", choices=NAMED_STATES, help="named three-qutrit state")

    p = _Parser(prog="nocorr", description="Qudit states without full correlations.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for name in COMMANDS:
        sp = sub.add_parser(name, parents=[common])
        if name == "state":
            sp.add_argument("--ghz", metavar="d,n")
            sp.add_argument("--haar", metavar="d,n")
    return p


def _validate(cfg: RunConfig) -> None:
    for label, v in (("--d", cfg.d), ("--n", cfg.n), ("--trials", cfg.trials)):
        if v is not None and v < 1:
            raise UsageError(f"{label} must be positive")
    if cfg.settings < 1 or cfg.workers < 1:
        raise UsageError("--settings and --workers must be positive")
    if not cfg.tol > 0:
        raise UsageError("--tol must be positive")


def main(argv: list[str] | None = None) -> int:
    try:
        args = build_parser().parse_args(argv)
        cfg = config_from_args(args)
        _validate(cfg)
        _emit(COMMANDS[cfg.command](cfg, args), cfg)
    except UsageError as exc:
        print(f"nocorr: error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except (SDPError, LPError, RuntimeError) as exc:
        print(f"nocorr: solver failure: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    except (ValueError, KeyError) as exc:
        print(f"nocorr: invalid input: {exc}", file=sys.stderr)
        return EXIT_INVALID
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
