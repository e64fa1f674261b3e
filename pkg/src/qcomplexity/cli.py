"""Command-line interface: ``qcomplexity <subcommand> ...``.

Exit status is 0 on success, 2 on invalid input (one diagnostic line on
stderr) and 1 on unexpected failures.
"""

from __future__ import annotations

import argparse
import logging
import math
import sys
from pathlib import Path
from typing import Sequence

import numpy as np

from .bounds import VARIANTS, BoundRequest, KFactor, k_factor, rad_bound
from .channels import ASSERT_TOL, modified_ptm, state_vec_from_features
from .errors import ValidationError
from .estimator import (
    DEFAULT_DRAWS,
    CircuitFamily,
    FValueTable,
    default_workers,
    enumerate_family,
    f_value_table,
    family_resource,
    rademacher,
    run_experiment,
)
from .measures import MeasureKind, measure
from .norms import group_norm
from .serialization import (
    SCHEMA_RESULT,
    decode_matrix,
    dumps,
    format_float,
    load_circuit,
    load_json,
    observable_from_spec,
    parse_float,
    ptm_to_dict,
)

log = logging.getLogger("qcomplexity")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ValidationError(message)


def _exponent(text: str) -> float:
    try:
        return parse_float(text)
    except ValidationError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--out", type=Path, help="write the result document here")
    common.add_argument("--format", choices=("json", "csv"), default="json")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--workers", type=int, default=None, help="worker threads (default: $QCOMPLEXITY_WORKERS or 1)")
    common.add_argument("-v", "--verbose", action="count", default=0)

    pq = _Parser(add_help=False)
    pq.add_argument("--p", type=_exponent, default=1.0)
    pq.add_argument("--q", type=_exponent, default=math.inf)

    parser = _Parser(prog="qcomplexity", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    ptm = sub.add_parser("ptm", parents=[common], help="dump the end-to-end Pauli transfer matrix")
    ptm.add_argument("--circuit", type=Path, required=True)

    norm = sub.add_parser("norm", parents=[common, pq], help="(p,q) group norm of the end-to-end channel")
    norm.add_argument("--circuit", type=Path, required=True)
    norm.add_argument("--modified", action="store_true", help="use the modified matrix (unital channels)")

    meas = sub.add_parser("measure", parents=[common, pq], help="circuit measure mu, nu or gamma")
    meas.add_argument("--circuit", type=Path, required=True)
    meas.add_argument("--kind", choices=("mu", "nu", "gamma"), default="mu")
    meas.add_argument("--r", type=_exponent, default=1.0, help="mean exponent for nu")
    meas.add_argument("--modified", action="store_true")

    bound = sub.add_parser("bound", parents=[common, pq], help="evaluate one Rademacher bound")
    bound.add_argument("--variant", choices=VARIANTS, required=True)
    bound.add_argument("--resource", type=float, help="mu, nu or gamma value (default: computed from --circuit)")
    bound.add_argument("--circuit", type=Path, help="circuit supplying widths and, if needed, the resource")
    bound.add_argument("--widths", type=int, nargs="+", help="n_l ... n_0 (overrides --circuit)")
    bound.add_argument("--m", type=int, help="sample count (default: from --config)")
    bound.add_argument("--k", type=float, help="K factor (default: computed from --config)")
    bound.add_argument("--config", type=Path, help="experiment config supplying samples and observable")
    bound.add_argument("--traceless", action="store_true", help="assert the observable is traceless")

    est = sub.add_parser("estimate", parents=[common], help="empirical Rademacher complexity")
    src = est.add_mutually_exclusive_group(required=True)
    src.add_argument("--table", type=Path, help="JSON f-value table (rows = samples)")
    src.add_argument("--config", type=Path, help="experiment config")
    est.add_argument("--method", choices=("auto", "exact", "mc"), default="auto")
    est.add_argument("--draws", type=int, default=None)

    ver = sub.add_parser("verify", parents=[common], help="run a bound-verification experiment")
    ver.add_argument("--config", type=Path, required=True)
    ver.add_argument("--draws", type=int, default=None)
    return parser


def _result(command: str, args, **fields) -> dict:
    return {"schema": SCHEMA_RESULT, "command": command, "seed": args.seed, **fields}


def _config_inputs(path):
    cfg = load_json(path)
    if not isinstance(cfg, dict):
        raise ValidationError(f"{path}: config must be a JSON object")
    samples = cfg.get("samples")
    if not samples:
        raise ValidationError(f"{path}: config lists no samples")
    m = int(cfg.get("m", len(samples)))
    encoding = cfg.get("encoding", "angle-y")
    S = [state_vec_from_features([parse_float(x) for x in s], encoding) for s in samples[:m]]
    if "observable" not in cfg:
        raise ValidationError(f"{path}: config has no observable")
    return cfg, S, observable_from_spec(cfg["observable"])


def _cmd_ptm(args):
    M = load_circuit(args.circuit).end_to_end()
    doc = dict(ptm_to_dict(M), seed=args.seed)
    return doc, None


def _cmd_norm(args):
    M = load_circuit(args.circuit).end_to_end()
    value = group_norm(modified_ptm(M) if args.modified else M, args.p, args.q)
    doc = _result("norm", args, p=format_float(args.p), q=format_float(args.q), modified=args.modified, value=value)
    return doc, repr(value)


def _cmd_measure(args):
    c = load_circuit(args.circuit)
    kind = MeasureKind(args.kind, args.modified, args.r)
    value = measure(c, kind, args.p, args.q)
    doc = _result(
        "measure", args, kind=args.kind, modified=args.modified, p=format_float(args.p), q=format_float(args.q),
        r=format_float(args.r), value=value,
    )
    return doc, repr(value)


def _cmd_bound(args):
    circuit = load_circuit(args.circuit) if args.circuit else None
    widths = args.widths
    if widths is None:
        if circuit is None:
            raise ValidationError("bound needs --widths or --circuit")
        widths = list(circuit.widths)
        if args.variant.startswith("single"):
            widths = [widths[0], widths[-1]]
    resource = args.resource
    if resource is None:
        if circuit is None:
            raise ValidationError("bound needs --resource or --circuit")
        resource = family_resource(CircuitFamily((circuit,)), args.variant, args.p, args.q)
    hat = args.variant.endswith("_unital")
    m, k, traceless = args.m, args.k, args.traceless
    if args.config:
        _, S, alpha = _config_inputs(args.config)
        m = len(S) if m is None else m
        traceless = traceless or abs(alpha.entries[0]) <= ASSERT_TOL
        if k is None:
            k = k_factor(S, alpha, args.p, hat=hat).value
    if m is None or k is None:
        raise ValidationError("bound needs --m and --k, or a --config to derive them")
    req = BoundRequest(args.variant, args.p, args.q, resource, tuple(widths), m, traceless=traceless)
    value = rad_bound(req, KFactor(k, "hat" if hat else "plain"))
    doc = _result(
        "bound", args, variant=args.variant, p=format_float(args.p), q=format_float(args.q),
        resource=format_float(resource), widths=list(req.widths), m=m, k=format_float(k), value=value,
    )
    return doc, repr(value)


def _cmd_estimate(args):
    if args.table:
        data = load_json(args.table)
        values = data.get("values") if isinstance(data, dict) else data
        table = FValueTable(decode_matrix(values).real if values is not None else np.empty((0, 0)))
        draws = args.draws or DEFAULT_DRAWS
    else:
        cfg, S, alpha = _config_inputs(args.config)
        table = f_value_table(enumerate_family(cfg["family"]), S, alpha)
        draws = args.draws or int(cfg.get("draws", DEFAULT_DRAWS))
    est = rademacher(table, draws, args.seed, args.workers, args.method)
    doc = _result("estimate", args, m=table.m, family_size=table.family_size, estimate=est.to_dict())
    line = repr(est.value) if est.stderr is None else f"{est.value!r} +/- {est.stderr!r}"
    return doc, line


def _cmd_verify(args):
    cfg = load_json(args.config)
    if not isinstance(cfg, dict):
        raise ValidationError(f"{args.config}: config must be a JSON object")
    if args.draws is not None:
        cfg = dict(cfg, draws=args.draws)
    report = run_experiment(cfg, workers=args.workers, seed=args.seed)
    n_ok = sum(r.satisfied for r in report.rows)
    line = f"{n_ok}/{len(report.rows)} bound rows satisfied; empirical R = {report.estimate.value!r}" if report.estimate else "no variants requested"
    if args.format == "csv":
        return report.to_csv(), line
    return report.to_dict(), line


_COMMANDS = {
    "ptm": _cmd_ptm,
    "norm": _cmd_norm,
    "measure": _cmd_measure,
    "bound": _cmd_bound,
    "estimate": _cmd_estimate,
    "verify": _cmd_verify,
}


def run(argv: Sequence[str] | None = None) -> int:
    try:
        args = _build_parser().parse_args(argv)
        logging.basicConfig(
            level=logging.WARNING - 10 * min(args.verbose, 2), format="%(levelname)s %(name)s: %(message)s"
        )
        if args.workers is None:
            args.workers = default_workers()
        elif args.workers < 1:
            raise ValidationError("--workers must be >= 1")
        if args.format == "csv" and args.command != "verify":
            raise ValidationError("csv output is only available for verify reports")
        log.info("running %s", args.command)
        doc, line = _COMMANDS[args.command](args)
        text = doc if isinstance(doc, str) else dumps(doc)
        if args.out:
            args.out.write_text(text, encoding="utf-8")
            log.info("wrote %s", args.out)
        if line is None:
            if not args.out:
                sys.stdout.write(text)
        else:
            print(line)
        return 0
    except ValidationError as exc:
        print(f"error: {' '.join(str(exc).split())}", file=sys.stderr)
        return 2
    except (FileNotFoundError, IsADirectoryError, PermissionError) as exc:
        print(f"error: {exc.strerror}: {exc.filename}", file=sys.stderr)
        return 2
    except Exception as exc:  # noqa: BLE001
        print(f"internal error: {type(exc).__name__}: {' '.join(str(exc).split())}", file=sys.stderr)
        return 1


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
