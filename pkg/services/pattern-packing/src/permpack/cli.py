# services/pattern-packing/src/permpack/cli.py
"""permpack command line: densities, bounds, closed forms and exhaustive checks"""
import argparse
import json
import logging
import sys
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

import pandas as pd

from .config import OptimizerConfig, RunConfig, get_settings
from .core.combination import FormalCombination, parse_combination
from .core.layered import block_sequence, enumerate_quasi_blocks, parse_block_sequence, realize
from .core.permutation import (
    count_occurrences,
    density,
    make_identity,
    make_reverse,
    parse_permutation,
)
from .errors import ParseError, PermPackError
from .logging_config import configure_logging
from .models.bounds import (
    BoundMode,
    bound_sequence,
    closed_form_order_and_w,
    closed_form_packing,
    closed_form_point,
    extended_price_bound,
    min_extended_price_bound,
    min_mono_value,
    min_price_bound,
    price_bound,
)
from .models.oracle import (
    brute_force_pN,
    brute_force_pN_layered,
    erdos_szekeres_scan,
    extremal_frame,
    sandwich_report,
)
from .models.price_polynomial import combine
from .utils.metrics import calculate_metrics
from .utils.serialization import DensityModel, convert_numpy

logger = logging.getLogger(__name__)

Outcome = Tuple[Dict[str, Any], Optional[pd.DataFrame]]

MODES = {
    "pack": BoundMode.PACK,
    "pack-ext": BoundMode.PACK_EXTENDED,
    "min": BoundMode.MINIMIZE,
    "min-ext": BoundMode.MINIMIZE_EXTENDED,
}


def parse_w(text: Optional[str]) -> List[int]:
    """"1,3" or "1 3" -> [1, 3]; empty means the empty set"""
    if not text:
        return []
    try:
        return sorted({int(t) for t in text.replace(",", " ").split()})
    except ValueError as e:
        raise ParseError(f"cannot parse W = {text!r}") from e


def optimizer_config(args: argparse.Namespace) -> OptimizerConfig:
    values: Dict[str, Any] = {
        "starts": args.starts,
        "max_iters": args.max_iters,
        "seed": args.seed,
        "debug": args.debug,
    }
    if args.tol is not None:
        values["value_tol"] = args.tol
    if args.workers is not None:
        values["workers"] = min(args.workers, get_settings().threads)
    return OptimizerConfig(**values)


def cmd_density(args: argparse.Namespace, cfg: OptimizerConfig, run: RunConfig) -> Outcome:
    tau = parse_permutation(args.tau)
    sigma = parse_permutation(args.sigma)
    value = density(tau, sigma)
    result = {
        "tau": str(tau),
        "sigma": str(sigma),
        "count": count_occurrences(tau, sigma),
        "p": str(value.exact),
        "density": DensityModel.from_fraction(value.exact).model_dump(),
    }
    return result, None


def cmd_bound(args: argparse.Namespace, cfg: OptimizerConfig, run: RunConfig) -> Outcome:
    f = parse_combination(args.combination)
    mode = MODES[args.mode]
    if args.W is not None and not mode.extended:
        raise ValueError(f"--W only applies to pack-ext and min-ext, not {mode.value}")
    W = parse_w(args.W)
    if mode == BoundMode.PACK:
        bound = price_bound(f, args.n, cfg, args.force)
    elif mode == BoundMode.PACK_EXTENDED:
        bound = extended_price_bound(f, args.n, W, cfg, args.force)
    elif mode == BoundMode.MINIMIZE:
        bound = min_price_bound(f, args.n, cfg, args.force)
    else:
        bound = min_extended_price_bound(f, args.n, W, cfg, args.force)
    result = bound.model_dump(mode="json")
    if args.dump_poly:
        result["polynomial"] = combine(f, "extended" if mode.extended else "plain", args.n).to_json()
    frame = pd.DataFrame(
        [
            {
                "mode": mode.value,
                "n": bound.n,
                "value": bound.value,
                "exact": str(bound.exact) if bound.exact else "",
            }
        ]
    )
    return result, frame


def cmd_bound_seq(args: argparse.Namespace, cfg: OptimizerConfig, run: RunConfig) -> Outcome:
    f = parse_combination(args.combination)
    report = bound_sequence(f, args.n_max, MODES[args.mode], cfg, args.w_policy, args.force)
    run.warnings.extend(report.diagnostics)
    frame = pd.DataFrame(
        [
            {"n": r.n, "value": r.value, "exact": str(r.exact) if r.exact else ""}
            for r in report.results
        ]
    )
    return report.model_dump(mode="json"), frame


def cmd_closed_form(args: argparse.Namespace, cfg: OptimizerConfig, run: RunConfig) -> Outcome:
    blocks = parse_block_sequence(args.blocks)
    value = closed_form_packing(blocks)
    oriented, k, W = closed_form_order_and_w(blocks)
    result: Dict[str, Any] = {
        "blocks": str(blocks),
        "oriented": str(oriented),
        "value": str(value),
        "float": float(value),
        "order": k,
        "W": W,
    }
    if args.check:
        f = FormalCombination.single(realize(oriented))
        bound = extended_price_bound(f, k, W, cfg)
        result["check"] = bound.model_dump(mode="json")
        result["check_error"] = abs(bound.value - float(value))
        point = closed_form_point(blocks)
        result["point"] = [str(x) for x in point]
        result["witness_error"] = calculate_metrics([float(x) for x in point], bound.witness)
    return result, None


def cmd_minmono(args: argparse.Namespace, cfg: OptimizerConfig, run: RunConfig) -> Outcome:
    value = min_mono_value(args.ell, args.k)
    result: Dict[str, Any] = {"ell": args.ell, "k": args.k, "value": str(value), "float": float(value)}
    if args.check:
        f = FormalCombination.from_pairs([(1, make_identity(args.ell)), (1, make_reverse(args.k))])
        bound = min_price_bound(f, args.check, cfg)
        result["check"] = bound.model_dump(mode="json")
        result["check_error"] = abs(bound.value - float(value))
    return result, None


def cmd_extremal(args: argparse.Namespace, cfg: OptimizerConfig, run: RunConfig) -> Outcome:
    f = parse_combination(args.combination)
    if args.layered:
        report = brute_force_pN_layered(f, args.N, args.mode, cross_check=args.debug)
    else:
        report = brute_force_pN(f, args.N, args.mode, force=args.force, workers=cfg.workers)
    return report.model_dump(mode="json"), extremal_frame([report])


def cmd_qblocks(args: argparse.Namespace, cfg: OptimizerConfig, run: RunConfig) -> Outcome:
    sigma = parse_permutation(args.sigma)
    decompositions = enumerate_quasi_blocks(sigma)
    result = {
        "sigma": str(sigma),
        "blocks": str(block_sequence(sigma)),
        "count": len(decompositions),
        "decompositions": [str(d) for d in decompositions],
    }
    frame = pd.DataFrame({"decomposition": result["decompositions"]})
    return result, frame


def cmd_sandwich(args: argparse.Namespace, cfg: OptimizerConfig, run: RunConfig) -> Outcome:
    f = parse_combination(args.combination)
    report = sandwich_report(f, args.n, args.N, cfg, extended=args.extended)
    frame = pd.DataFrame(
        [{"lower": report.lower, "upper": report.upper_float, "width": report.width}]
    )
    return report.model_dump(mode="json"), frame


def cmd_erdos_szekeres(args: argparse.Namespace, cfg: OptimizerConfig, run: RunConfig) -> Outcome:
    report = erdos_szekeres_scan(args.N, args.k)
    return report.model_dump(mode="json"), pd.DataFrame([report.model_dump()])


COMMANDS: Dict[str, Callable[[argparse.Namespace, OptimizerConfig, RunConfig], Outcome]] = {
    "density": cmd_density,
    "bound": cmd_bound,
    "bound-seq": cmd_bound_seq,
    "closed-form": cmd_closed_form,
    "minmono": cmd_minmono,
    "extremal": cmd_extremal,
    "qblocks": cmd_qblocks,
    "sandwich": cmd_sandwich,
    "erdos-szekeres": cmd_erdos_szekeres,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", dest="output_format", choices=["json", "csv", "text"], default="json")
    common.add_argument("--force", action="store_true", help="allow non-conical f and the hard N cap")
    common.add_argument("--log-level", default=None)
    common.add_argument("--workers", type=int, default=None)
    common.add_argument("--starts", type=int, default=64)
    common.add_argument("--max-iters", type=int, default=10000)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--tol", type=float, default=None)
    common.add_argument("--debug", action="store_true", help="ascent checks and layered cross-checks")

    parser = argparse.ArgumentParser(prog="permpack", description="Permutation pattern packing toolkit")
    sub = parser.add_subparsers(dest="subcommand", required=True)

    p = sub.add_parser("density", parents=[common], help="occurrences and density of tau in sigma")
    p.add_argument("tau")
    p.add_argument("sigma")

    p = sub.add_parser("bound", parents=[common], help="price bound of one order")
    p.add_argument("combination")
    p.add_argument("--mode", choices=list(MODES), default="pack")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--W", default=None, help="1-based antilayer slots forced to zero, e.g. 2,3")
    p.add_argument("--dump-poly", action="store_true")

    p = sub.add_parser("bound-seq", parents=[common], help="bounds for n = 1..n_max")
    p.add_argument("combination")
    p.add_argument("--mode", choices=list(MODES), default="pack")
    p.add_argument("--n-max", type=int, required=True)
    p.add_argument("--w-policy", choices=["all", "none", "all-but-first"], default="all-but-first")

    p = sub.add_parser("closed-form", parents=[common], help="packing density of a block sequence")
    p.add_argument("blocks", help='e.g. "^2 2"')
    p.add_argument("--check", action="store_true", help="reproduce with the extended bound")

    p = sub.add_parser("minmono", parents=[common], help="layered minimum density of Id_ell + Rev_k")
    p.add_argument("ell", type=int)
    p.add_argument("k", type=int)
    p.add_argument("--check", type=int, default=0, metavar="N", help="compare with the order-N bound")

    p = sub.add_parser("extremal", parents=[common], help="exhaustive max/min over S_N")
    p.add_argument("combination")
    p.add_argument("--N", type=int, required=True)
    p.add_argument("--mode", choices=["max", "min"], default="max")
    p.add_argument("--layered", action="store_true")

    p = sub.add_parser("qblocks", parents=[common], help="quasi-block decompositions")
    p.add_argument("sigma")

    p = sub.add_parser("sandwich", parents=[common], help="lower bound vs exhaustive upper bound")
    p.add_argument("combination")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--N", type=int, required=True)
    p.add_argument("--extended", action="store_true")

    p = sub.add_parser("erdos-szekeres", parents=[common], help="monotone subsequence scan of S_N")
    p.add_argument("--N", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    return parser


def _text(payload: Dict[str, Any]) -> str:
    flat = pd.json_normalize(payload, sep=".").iloc[0]
    return "\n".join(f"{key}: {value}" for key, value in flat.items())


def render(payload: Dict[str, Any], frame: Optional[pd.DataFrame], output_format: str) -> str:
    if output_format == "json":
        return json.dumps(convert_numpy(payload), indent=2)
    if output_format == "csv":
        if frame is None:
            frame = pd.json_normalize(payload["result"], sep=".")
        return frame.to_csv(index=False).rstrip("\n")
    return _text(payload)


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    configure_logging(level=args.log_level)

    arguments = {
        k: v
        for k, v in vars(args).items()
        if k not in ("subcommand", "output_format", "log_level")
    }
    try:
        cfg = optimizer_config(args)
        run = RunConfig(
            subcommand=args.subcommand,
            arguments=arguments,
            optimizer=cfg,
            output_format=args.output_format,
            seed=args.seed,
            forced=args.force,
        )
        if args.force:
            run.warnings.append("forced: conical checks relaxed, monotonicity not asserted")
        result, frame = COMMANDS[args.subcommand](args, cfg, run)
    except PermPackError as e:
        logger.error(f"{args.subcommand} failed: {e}")
        print(json.dumps({"error": type(e).__name__, "detail": str(e)}), file=sys.stderr)
        return e.exit_code
    except (ValueError, IndexError) as e:
        logger.error(f"{args.subcommand} rejected its input: {e}")
        print(json.dumps({"error": type(e).__name__, "detail": str(e)}), file=sys.stderr)
        return ParseError.exit_code

    payload = {"config": run.model_dump(mode="json"), "result": result}
    print(render(payload, frame, args.output_format))
    return 0


if __name__ == "__main__":
    sys.exit(main())
