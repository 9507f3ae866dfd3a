"""Command-line front end.

Subcommands
    build        construct a program from a descriptor and emit its JSON
    eval         run a program file on one input
    check-equiv  compare a program file against a reference function
    subfn        per-cut subfunction counts as CSV
    bounds       inequality-chain margins over a parameter grid as CSV
    validate     structural and numeric validation of a program file

Conventions, fixed as part of the interface: the primary artifact (JSON
document, CSV table, evaluation result, report) goes to --out when given
and to stdout otherwise; one-line human summaries go to stderr.  Exit
code 0 means success or all checks passed, 1 means a check ran and
failed, 2 means a usage, format, or validation error.  Sampling uses
numpy's PCG64 generator seeded by --seed, so identical invocations
produce byte-identical outputs.
"""

from __future__ import annotations

import argparse
import csv
import sys
from pathlib import Path

import numpy as np

from .analysis import (CHAINS, Constants, check_chain, default_grid,
                       optimal_order, subfunction_profile)
from .constructions import (build_mxpj_id_obdd, build_saf_2k_obdd,
                            compile_to_nondet, compile_to_prob,
                            compile_to_quantum)
from .functions import SAFLayout, parse_function, truth_table_function
from .program import (Assignment, ProgramFormatError, VariableOrder,
                      load_program, serialize, validate, width)
from .semantics import (accept_prob, accept_prob_batch, eval_det,
                        eval_det_batch, eval_nondet, eval_nondet_batch)

_EXHAUSTIVE_GUARD = 24
_CHUNK = 1 << 14


def _say(text: str) -> None:
    print(text, file=sys.stderr)


def _emit(text: str, out: str | None) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        Path(out).write_text(text)


def _parse_constants(text: str | None) -> Constants:
    if not text:
        return Constants()
    values = {}
    for token in text.split(","):
        token = token.strip()
        if not token:
            continue
        key, sep, raw = token.partition("=")
        key = key.strip().lower()
        if not sep or key not in ("c", "c1", "c2", "c3"):
            raise ValueError(f"bad constants token {token!r}; expected "
                             "C=..., C1=..., C2=..., C3=...")
        values[key] = float(raw)
    return Constants(**values)


def _parse_axis(text: str) -> list[int]:
    """Comma list of integers and ranges: 8, 2:64, 8:1024:x2, 4:20:+4."""
    points: list[int] = []
    for token in text.split(","):
        token = token.strip()
        if ":" not in token:
            points.append(int(token))
            continue
        parts = token.split(":")
        if len(parts) == 2:
            lo, hi, step = int(parts[0]), int(parts[1]), "+1"
        elif len(parts) == 3:
            lo, hi, step = int(parts[0]), int(parts[1]), parts[2]
        else:
            raise ValueError(f"bad range {token!r}")
        if step.startswith("x"):
            factor = int(step[1:])
            if factor < 2 or lo < 1:
                raise ValueError(f"bad geometric range {token!r}")
            v = lo
            while v <= hi:
                points.append(v)
                v *= factor
        else:
            stride = int(step.lstrip("+"))
            if stride < 1:
                raise ValueError(f"bad range stride {token!r}")
            points.extend(range(lo, hi + 1, stride))
    if not points:
        raise ValueError("empty axis")
    return points


def _load_bits(arg: str, n: int) -> Assignment:
    if arg and set(arg) <= {"0", "1"}:
        text = arg
    else:
        text = Path(arg).read_text().strip()
    if len(text) != n:
        raise ValueError(f"input has {len(text)} bits, program reads {n}")
    return Assignment.from_string(text)


def _function_from_arg(arg: str):
    if ":" in arg:
        return parse_function(arg)
    text = Path(arg).read_text().strip()
    if not text or set(text) - {"0", "1"}:
        raise ValueError(f"{arg}: expected a 0/1 truth-table string")
    return truth_table_function(Path(arg).stem, [int(c) for c in text])


def _bit_block(lo: int, hi: int, n: int) -> np.ndarray:
    ms = np.arange(lo, hi, dtype=np.uint32)
    return ((ms[:, None] >> np.arange(n, dtype=np.uint32)[None, :]) & 1
            ).astype(np.uint8)


def _predict_batch(p, xs: np.ndarray) -> np.ndarray:
    if p.semantics == "deterministic":
        return eval_det_batch(p, xs)
    if p.semantics == "nondeterministic":
        return eval_nondet_batch(p, xs)
    return (accept_prob_batch(p, xs) > 0.5).astype(np.uint8)


# ---------------------------------------------------------------------------
# subcommands


def _cmd_build(args) -> int:
    descriptor = args.descriptor
    kind, _, rest = descriptor.partition(":")
    parts = [s.strip() for s in rest.split(",")] if rest else []
    if kind == "mxpj":
        if len(parts) not in (2, 3):
            raise ValueError("mxpj descriptor is mxpj:k,d with an optional "
                             ",quantum ,nondet or ,prob suffix")
        k, d = int(parts[0]), int(parts[1])
        program = build_mxpj_id_obdd(k, d)
        if len(parts) == 3:
            compilers = {"quantum": compile_to_quantum,
                         "nondet": compile_to_nondet,
                         "prob": compile_to_prob}
            if parts[2] not in compilers:
                raise ValueError(f"unknown embedding {parts[2]!r}; choose "
                                 "quantum, nondet or prob")
            program = compilers[parts[2]](program)
    elif kind == "saf":
        if len(parts) != 3:
            raise ValueError("saf descriptor is saf:k,w,n")
        k, w, n = (int(s) for s in parts)
        layout = SAFLayout(n=n, k=k, w=w)
        if not layout.regime_ok:
            _say(f"note: address blocks need {layout.blocks * layout.a} of "
                 f"{n} bits; the address-capacity inequality fails and the "
                 "function is degenerate, but the program is well defined")
        program = build_saf_2k_obdd(k, w, n)
    else:
        raise ValueError(f"unknown builder {kind!r}; use mxpj:k,d[,emb] "
                         "or saf:k,w,n")
    report = validate(program)
    if not report.ok:
        raise ValueError("built program failed validation: "
                         + "; ".join(report.violations))
    _say(f"{program.semantics} program: n={program.n} layers={program.k} "
         f"width={width(program)}")
    _emit(serialize(program) + "\n", args.out)
    return 0


def _cmd_eval(args) -> int:
    program = load_program(args.program)
    x = _load_bits(args.input, program.n)
    if program.semantics == "deterministic":
        result = str(eval_det(program, x))
    elif program.semantics == "nondeterministic":
        result = str(eval_nondet(program, x))
    else:
        result = f"{accept_prob(program, x):.9f}"
    _emit(result + "\n", args.out)
    return 0


def _cmd_check_equiv(args) -> int:
    program = load_program(args.program)
    f = _function_from_arg(args.function)
    if f.n != program.n:
        raise ValueError(f"function reads {f.n} variables, program "
                         f"reads {program.n}")
    n = program.n
    checked = 0
    mismatches = 0
    first: str | None = None
    if args.mode == "exhaustive":
        if n > _EXHAUSTIVE_GUARD:
            raise ValueError(f"exhaustive mode needs n <= "
                             f"{_EXHAUSTIVE_GUARD}, got {n}")
        for lo in range(0, 1 << n, _CHUNK):
            hi = min(lo + _CHUNK, 1 << n)
            block = _bit_block(lo, hi, n)
            got = _predict_batch(program, block)
            want = np.fromiter(
                (f(Assignment.from_int(m, n)) for m in range(lo, hi)),
                dtype=np.uint8, count=hi - lo)
            bad = np.nonzero(got != want)[0]
            checked += hi - lo
            mismatches += bad.size
            if bad.size and first is None:
                first = str(Assignment.from_int(lo + int(bad[0]), n))
    else:
        rng = np.random.Generator(np.random.PCG64(args.seed))
        remaining = args.samples
        while remaining > 0:
            take = min(remaining, _CHUNK)
            block = rng.integers(0, 2, size=(take, n), dtype=np.uint8)
            got = _predict_batch(program, block)
            want = np.fromiter(
                (f(Assignment(tuple(int(b) for b in row)))
                 for row in block),
                dtype=np.uint8, count=take)
            bad = np.nonzero(got != want)[0]
            checked += take
            mismatches += bad.size
            if bad.size and first is None:
                first = "".join(str(int(b)) for b in block[bad[0]])
            remaining -= take
    lines = [f"{checked} checked, {mismatches} mismatches"]
    if first is not None:
        lines.append(f"first counterexample: {first}")
    _emit("\n".join(lines) + "\n", args.out)
    return 0 if mismatches == 0 else 1


def _cmd_subfn(args) -> int:
    f = _function_from_arg(args.function)
    if args.order == "min":
        value, order = optimal_order(f)
        summary = f"N = {value}"
    elif args.order == "id":
        order = VariableOrder.identity(f.n)
        summary = None
    else:
        perm = tuple(int(s) for s in args.order.split(","))
        order = VariableOrder(perm)
        summary = None
    profile = subfunction_profile(f, order)
    if summary is None:
        summary = f"N_theta = {profile.max_count}"
    order_text = " ".join(str(v) for v in order.perm)
    rows = []
    if args.cut == "all":
        cuts = list(profile.cuts)
    else:
        u = int(args.cut)
        if not 1 < u < f.n:
            raise ValueError(f"cut must satisfy 1 < u < {f.n}")
        cuts = [u]
    for u in cuts:
        rows.append([f.name, f.n, order_text, u, profile.counts[u - 2]])
    _write_csv(["function", "n", "order", "cut", "count"], rows, args.out)
    _say(summary)
    return 0


def _bounds_rows(chain: str, ks, sizes, constants: Constants):
    size_name = "w" if chain in ("hi-n", "hi-p", "h-kobdd") else "d"
    if ks is None or sizes is None:
        grid = default_grid(chain)
        if ks is None:
            ks = sorted({g["k"] for g in grid})
        if sizes is None:
            sizes = sorted({g[size_name] for g in grid})
    for size in sizes:
        for k in ks:
            params = {"k": k, size_name: size}
            yield check_chain(chain, constants=constants, strict=False,
                              **params)


def _cmd_bounds(args) -> int:
    constants = _parse_constants(args.constants)
    if args.chain == "all":
        if args.k or args.w or args.d:
            raise ValueError("explicit axes need a single chain")
        chains = list(CHAINS)
    elif args.chain in CHAINS:
        chains = [args.chain]
    else:
        raise ValueError(f"unknown chain {args.chain!r}; choose from "
                         f"{', '.join(CHAINS)} or all")
    ks = _parse_axis(args.k) if args.k else None
    rows = []
    worst = None
    for chain in chains:
        size_name = "w" if chain in ("hi-n", "hi-p", "h-kobdd") else "d"
        axis = args.w if size_name == "w" else args.d
        if args.w and size_name != "w":
            raise ValueError(f"chain {chain} is parameterized by d, not w")
        if args.d and size_name != "d":
            raise ValueError(f"chain {chain} is parameterized by w, not d")
        sizes = _parse_axis(axis) if axis else None
        for r in _bounds_rows(chain, ks, sizes, constants):
            rows.append([r.chain, r.k,
                         "" if r.w is None else r.w,
                         "" if r.d is None else r.d,
                         r.constants.describe(),
                         f"{r.reduced_width:.6f}",
                         f"{r.lhs_log2:.6f}", f"{r.rhs_log2:.6f}",
                         f"{r.margin:.6f}",
                         int(r.in_regime), r.note])
            if worst is None or r.margin < worst:
                worst = r.margin
    _write_csv(["chain", "k", "w", "d", "constants", "reduced_width",
                "lhs_log2", "rhs_log2", "margin", "in_regime", "note"],
               rows, args.out)
    ok = worst is not None and worst > 0
    _say(f"{len(rows)} rows, minimum margin {worst:.6f}, "
         + ("all positive" if ok else "not all positive")
         if worst is not None else "0 rows")
    return 0 if ok else 1


def _cmd_validate(args) -> int:
    program = load_program(args.program)
    report = validate(program)
    if report.ok:
        _emit(f"ok: {program.semantics} program, n={program.n}, "
              f"layers={program.k}, width={width(program)}\n", args.out)
        return 0
    _emit("".join(f"invalid: {v}\n" for v in report.violations), args.out)
    return 2


def _write_csv(header: list[str], rows, out: str | None) -> None:
    if out is None:
        writer = csv.writer(sys.stdout, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)
        return
    with open(out, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)


# ---------------------------------------------------------------------------
# parser plumbing


def _build_parser() -> argparse.ArgumentParser:
    shared = argparse.ArgumentParser(add_help=False)
    shared.add_argument("--seed", type=int, default=argparse.SUPPRESS,
                        help="RNG seed for sampling commands (default 0)")
    shared.add_argument("--threads", type=int, default=argparse.SUPPRESS,
                        help="worker budget; sweeps are vectorized, output "
                             "order is canonical regardless")
    shared.add_argument("--out", "-o", default=argparse.SUPPRESS,
                        help="write the primary artifact to this path "
                             "instead of stdout")

    parser = argparse.ArgumentParser(
        prog="kobdd",
        description="build, run and analyze layered oblivious branching "
                    "programs")
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--threads", type=int, default=1)
    parser.add_argument("--out", "-o", default=None)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("build", parents=[shared],
                       help="construct a program from a descriptor")
    p.add_argument("descriptor",
                   help="mxpj:k,d[,quantum|nondet|prob] or saf:k,w,n")
    p.set_defaults(handler=_cmd_build)

    p = sub.add_parser("eval", parents=[shared],
                       help="run a program file on one input")
    p.add_argument("program", help="program JSON file")
    p.add_argument("input", help="bit string (x1 first) or a file holding one")
    p.set_defaults(handler=_cmd_eval)

    p = sub.add_parser("check-equiv", parents=[shared],
                       help="compare a program against a reference function")
    p.add_argument("program", help="program JSON file")
    p.add_argument("function",
                   help="xor:n, and:n, saf:k,w,n, mxpj:k,d, or a "
                        "truth-table file")
    p.add_argument("--mode", choices=("exhaustive", "sample"),
                   default="exhaustive")
    p.add_argument("--samples", type=int, default=100000)
    p.set_defaults(handler=_cmd_check_equiv)

    p = sub.add_parser("subfn", parents=[shared],
                       help="per-cut subfunction counts as CSV")
    p.add_argument("function",
                   help="function descriptor or truth-table file")
    p.add_argument("--order", default="id",
                   help="id, min, or an explicit permutation like 3,1,2")
    p.add_argument("--cut", default="all",
                   help="a single cut position, or all")
    p.set_defaults(handler=_cmd_subfn)

    p = sub.add_parser("bounds", parents=[shared],
                       help="inequality-chain margins over a grid as CSV")
    p.add_argument("chain", help=f"{', '.join(CHAINS)}, or all")
    p.add_argument("--k", help="k axis, e.g. 2:64 or 2,4,8")
    p.add_argument("--w", help="w axis, e.g. 8:1024:x2")
    p.add_argument("--d", help="d axis, e.g. 16:1048576:x2")
    p.add_argument("--constants",
                   help="overrides like C=1,C1=8,C2=1,C3=1")
    p.set_defaults(handler=_cmd_bounds)

    p = sub.add_parser("validate", parents=[shared],
                       help="validate a program file")
    p.add_argument("program", help="program JSON file")
    p.set_defaults(handler=_cmd_validate)

    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as stop:
        return int(stop.code) if stop.code else 0
    if args.threads < 1:
        _say("error: --threads must be at least 1")
        return 2
    try:
        return args.handler(args)
    except ProgramFormatError as bad:
        _say(f"error: malformed program document: {bad}")
        return 2
    except (ValueError, OSError) as bad:
        _say(f"error: {bad}")
        return 2


def entry() -> None:
    sys.exit(main(sys.argv[1:]))
