"""Command-line front end.

    cyqt verify-channel
    cyqt run [--inputs SPEC] (--outcomes LIST | --seed N) [-o FILE]
    cyqt sweep [--inputs SPEC] [--seed N] [--method tree|sequential]
    cyqt table [--format csv|json] [-o FILE]
    cyqt analyze [--inputs SPEC] [--seed N] [--grid N] [-o FILE] [--csv FILE]

``SPEC`` is ``random`` or three amplitude pairs ``a0,a1;b0,b1;c0,c1`` with
complex numbers written as ``0.6+0.8i``.  Exit status: 0 on success, 1 when
an invariant fails (fidelity below one, derivation failure), 2 on bad usage.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from . import analysis, corrections, protocol
from .channel import MessageState, build_channel, verify_channel
from .errors import CyqtError, DerivationError, NormalizationError


def parse_complex(text: str) -> complex:
    t = text.strip().replace(" ", "")
    if not t:
        raise ValueError("empty amplitude")
    if t.endswith("i"):
        t = t[:-1] + "j"
    try:
        return complex(t)
    except ValueError:
        raise ValueError(f"cannot parse amplitude {text!r}; use re+imi, e.g. 0.6+0.8i") from None


def parse_inputs(spec: str, seed: int) -> tuple[MessageState, MessageState, MessageState]:
    if spec == "random":
        rng = np.random.default_rng(seed)
        return tuple(MessageState.random(rng) for _ in range(3))
    pairs = [p for p in spec.split(";") if p.strip()]
    if len(pairs) != 3:
        raise ValueError(f"expected three amplitude pairs separated by ';', got {len(pairs)}")
    out = []
    for p in pairs:
        parts = p.split(",")
        if len(parts) != 2:
            raise ValueError(f"amplitude pair {p!r} must be 'amp0,amp1'")
        out.append(MessageState(parse_complex(parts[0]), parse_complex(parts[1])))
    return tuple(out)


def _write(text: str, path: str | None) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        Path(path).write_text(text)


def _cmd_verify_channel(args) -> int:
    check = verify_channel(build_channel())
    if check.ok:
        print("channel OK: 64 amplitudes of +1/8 on the labelled support")
        return 0
    print(f"channel MISMATCH: {check.diagnostic}", file=sys.stderr)
    return 1


def _cmd_run(args) -> int:
    inputs = parse_inputs(args.inputs, args.input_seed)
    if args.outcomes is not None:
        tr = protocol.run_forced(inputs, protocol.parse_outcomes(args.outcomes))
    else:
        tr = protocol.run_sampled(inputs, args.seed)
    _write(tr.to_json(indent=2, sort_keys=True) + "\n", args.output)
    if not tr.succeeded():
        print(f"fidelities {tr.fidelities} below 1", file=sys.stderr)
        return 1
    return 0


def _cmd_sweep(args) -> int:
    inputs = parse_inputs(args.inputs, args.seed)
    result = protocol.sweep(inputs, method=args.method)
    print(result.summary())
    if result.n_passed != protocol.N_TUPLES:
        for outcomes in result.failures[:10]:
            print(f"  failed: {protocol.format_outcomes(outcomes)}", file=sys.stderr)
        return 1
    return 0


def _cmd_table(args) -> int:
    records = corrections.derive_all()
    _write(corrections.export_table(records, args.format), args.output)
    return 0


def _cmd_analyze(args) -> int:
    inputs = parse_inputs(args.inputs, args.seed)
    bundle = analysis.report_bundle(inputs, args.grid)
    _write(analysis.report_json(bundle), args.output)
    if args.csv:
        Path(args.csv).write_text(analysis.probability_csv(analysis.enumerate_probabilities(inputs)))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cyqt", description="Cyclic teleportation of three two-qubit states."
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("verify-channel", help="build the twelve-qubit channel and check it")
    p.set_defaults(func=_cmd_verify_channel)

    p = sub.add_parser("run", help="run the protocol once and print its transcript as JSON")
    p.add_argument("--inputs", default="random")
    p.add_argument("--input-seed", type=int, default=0, help="seed for --inputs random")
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--outcomes", help="six comma-separated outcomes, e.g. Phi+,Phi+,Phi+,Phi+,Phi+,Psi-")
    g.add_argument("--seed", type=int, help="sample the outcomes with this seed")
    p.add_argument("-o", "--output")
    p.set_defaults(func=_cmd_run)

    p = sub.add_parser("sweep", help="check all 4096 outcome tuples")
    p.add_argument("--inputs", default="random")
    p.add_argument("--seed", type=int, default=0, help="seed for --inputs random")
    p.add_argument("--method", choices=("tree", "sequential"), default="tree")
    p.set_defaults(func=_cmd_sweep)

    p = sub.add_parser("table", help="derive and export the correction table")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("-o", "--output")
    p.set_defaults(func=_cmd_table)

    p = sub.add_parser("analyze", help="probability, entropy, efficiency and validity report")
    p.add_argument("--inputs", default="random")
    p.add_argument("--seed", type=int, default=0, help="seed for --inputs random")
    p.add_argument("--grid", type=int, default=3, help="validity scan resolution (>= 2)")
    p.add_argument("-o", "--output")
    p.add_argument("--csv", help="also write the per-tuple probability table here")
    p.set_defaults(func=_cmd_analyze)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "grid", 2) < 2:
        parser.error("--grid must be >= 2")
    try:
        return args.func(args)
    except DerivationError as exc:
        tup = "" if exc.outcomes is None else f" at {protocol.format_outcomes(exc.outcomes)}"
        print(f"derivation failed{tup}: {exc}", file=sys.stderr)
        return 1
    except (NormalizationError, ValueError) as exc:
        parser.print_usage(sys.stderr)
        print(f"cyqt: error: {exc}", file=sys.stderr)
        return 2
    except CyqtError as exc:
        print(f"cyqt: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
