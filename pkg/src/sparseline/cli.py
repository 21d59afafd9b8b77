"""Command-line interface: key generation, encode, corrupt, decode,
benchmarks, plots, and the self-test suite.

All randomness is controlled by --seed flags and every file path is an
explicit option, so identical invocations produce identical primary
outputs (timings excluded).  Exit codes: 0 success, 1 domain error,
2 usage error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import asdict

import numpy as np

from . import bench, linalg, matgen
from .channel import ChannelModel
from .errors import InvalidParameter, SparselineError
from .lp import build_basis_pursuit, write_lp_text
from .pipeline import decode, default_projector_for, encode
from .rproj import project_lp_data
from .selftest import run_selftest


def _save_vector(path, v) -> None:
    linalg.save_matrix(path, np.asarray(v, dtype=np.float64).reshape(-1, 1))


def _load_vector(path) -> np.ndarray:
    m = linalg.load_matrix(path)
    if m.shape[1] != 1:
        raise InvalidParameter(f"{path} holds a {m.shape[0]}x{m.shape[1]} matrix, not a vector")
    return m.ravel()


def segment_text(text: str, chars_per_block: int) -> list[str]:
    """Split into fixed-size blocks, padding the last one with spaces."""
    if not text:
        return []
    blocks = [text[i : i + chars_per_block] for i in range(0, len(text), chars_per_block)]
    blocks[-1] = blocks[-1].ljust(chars_per_block)
    return blocks


def _read_text(args) -> str:
    if args.text is not None:
        raw = args.text
    else:
        data = open(args.text_file, "rb").read()
        raw = data.decode("utf-8") if args.utf8 else data.decode("latin-1")
    try:
        raw.encode("latin-1")
    except UnicodeEncodeError as exc:
        raise InvalidParameter(
            f"message contains {exc.object[exc.start]!r}, which has no single-byte code"
        ) from exc
    return raw


def _cmd_genkey(args) -> int:
    if args.regime == "orthogonal":
        if args.d is None:
            raise InvalidParameter("--d is required for the orthogonal regime")
        key = matgen.generate_orthogonal_key(args.d, args.redundancy, seed=args.seed)
    else:
        if args.m is None:
            raise InvalidParameter("--m is required for the impossible regime")
        key = matgen.generate_impossible_key(args.m, args.delta_prime, seed=args.seed)
    matgen.save_key(key, args.out)
    print(
        f"wrote {args.regime} key: Q {key.Q.shape[0]}x{key.Q.shape[1]}, "
        f"A {key.A.shape[0]}x{key.A.shape[1]}, max|AQ| = {key.ortho_residual:.2e}"
    )
    return 0


def _cmd_encode(args) -> int:
    key = matgen.load_key(args.key)
    text = _read_text(args)
    blocks = segment_text(text, key.message_bits // 8)
    if not blocks:
        raise InvalidParameter("refusing to encode an empty message")
    columns = np.column_stack([encode(key, block) for block in blocks])
    linalg.save_matrix(args.out, columns)
    print(
        f"encoded {len(text)} characters as {len(blocks)} block(s) of "
        f"{columns.shape[0]} reals -> {args.out}"
    )
    return 0


def _cmd_corrupt(args) -> int:
    z = linalg.load_matrix(getattr(args, "in"))
    channel = ChannelModel(
        args.delta,
        gross_magnitude=args.gross_magnitude,
        seed=args.seed,
        support_rule="floor" if args.floor_support else "round",
    )
    z_bar = np.empty_like(z)
    err = np.empty_like(z)
    for col in range(z.shape[1]):
        z_bar[:, col], err[:, col] = channel.corrupt(z[:, col])
    linalg.save_matrix(args.out, z_bar)
    if args.error_out:
        linalg.save_matrix(args.error_out, err)
    print(f"corrupted {np.count_nonzero(err)} of {z.size} components -> {args.out}")
    return 0


def _cmd_decode(args) -> int:
    key = matgen.load_key(args.key)
    z_bar = linalg.load_matrix(getattr(args, "in"))
    reports = []
    for col in range(z_bar.shape[1]):
        projector = None
        if args.project:
            # a fresh projector per block, reproducible from the base seed
            block_seed = None if args.seed is None else matgen.derive_seed(args.seed, col)
            projector = default_projector_for(
                key,
                epsilon=args.epsilon,
                alpha=args.alpha,
                jll_constant=args.jll_constant,
                seed=block_seed,
            )
        if args.dump_lp and col == 0:
            b = key.A @ z_bar[:, col]
            lhs, rhs = (
                (key.A, b) if projector is None else project_lp_data(projector, key.A, b)
            )
            write_lp_text(build_basis_pursuit(lhs, rhs), args.dump_lp)
        reports.append(decode(key, z_bar[:, col], projector))
    text = "".join(r.decoded_text for r in reports)
    print(text)
    if args.report:
        blocks = []
        for r in reports:
            payload = asdict(r)
            payload["lp_status"] = r.lp_status.value
            blocks.append(payload)
        with open(args.report, "w", encoding="utf-8") as fh:
            json.dump({"decoded_text": text, "blocks": blocks}, fh, indent=2)
    return 0


def _parse_sizes(text: str, table: int):
    if table == 1:
        return tuple(int(part) for part in text.split(",") if part)
    cells = []
    for part in text.split(";"):
        if not part:
            continue
        m_str, dp_str = part.split(",")
        cells.append((int(m_str), float(dp_str)))
    return tuple(cells)


def _cmd_bench(args) -> int:
    if args.sizes:
        sizes = _parse_sizes(args.sizes, args.table)
    else:
        sizes = bench.TABLE1_SIZES if args.table == 1 else bench.TABLE2_SIZES
    regime = matgen.ORTHOGONAL if args.table == 1 else matgen.IMPOSSIBLE
    trials = args.trials if args.trials else (1 if args.table == 1 else 2)
    cfg = bench.ExperimentConfig(
        regime=regime,
        sizes=sizes,
        redundancy=args.redundancy,
        delta=args.delta,
        epsilon=args.epsilon,
        alpha=args.alpha,
        jll_constant=args.jll_constant,
        gross_magnitude=args.gross_magnitude,
        trials_per_cell=trials,
        master_seed=args.seed,
        corpus_path=args.corpus,
        channel_delta=args.channel_delta,
    )
    runner = bench.run_table1 if args.table == 1 else bench.run_table2
    rows = runner(cfg, jobs=args.jobs)
    bench.write_csv(rows, args.csv)
    manifest = args.manifest or (str(args.csv) + ".manifest.jsonl")
    bench.write_manifest(cfg, manifest)
    print(f"wrote {len(rows)} rows -> {args.csv}")
    if args.svg:
        with open(args.svg, "w", encoding="utf-8") as fh:
            fh.write(bench.emit_plot(rows))
        print(f"wrote plot -> {args.svg}")
    return 0


def _cmd_plot(args) -> int:
    rows = bench.read_csv(args.csv)
    with open(args.svg, "w", encoding="utf-8") as fh:
        fh.write(bench.emit_plot(rows))
    print(f"wrote plot -> {args.svg}")
    return 0


def _cmd_selftest(args) -> int:
    failures = run_selftest(seed=args.seed)
    return 1 if failures else 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sparseline",
        description="Send text over a noisy, costly line via sparse recovery.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("genkey", help="generate and save a key pair")
    p.add_argument("--regime", choices=["orthogonal", "impossible"], required=True)
    p.add_argument("--d", type=int, help="message bits (orthogonal regime)")
    p.add_argument("--redundancy", type=float, default=4.0, help="encoded/raw length ratio")
    p.add_argument("--m", type=int, help="decoder rows (impossible regime)")
    p.add_argument("--delta-prime", type=float, default=0.5, help="redundancy surplus")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_genkey)

    p = sub.add_parser("encode", help="encode text into a real vector")
    p.add_argument("--key", required=True)
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--text")
    group.add_argument("--text-file")
    p.add_argument("--utf8", action="store_true", help="read the text file as UTF-8")
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_encode)

    p = sub.add_parser("corrupt", help="simulate the noisy line")
    p.add_argument("--in", required=True)
    p.add_argument("--delta", type=float, required=True, help="error rate in [0, 1)")
    p.add_argument("--gross-magnitude", type=float, default=1000.0)
    p.add_argument("--floor-support", action="store_true",
                   help="use floor(delta*n) corrupted components instead of round")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--out", required=True)
    p.add_argument("--error-out", help="also save the true error vector")
    p.set_defaults(func=_cmd_corrupt)

    p = sub.add_parser("decode", help="decode a corrupted vector")
    p.add_argument("--key", required=True)
    p.add_argument("--in", required=True)
    p.add_argument("--project", action="store_true", help="solve the projected LP")
    p.add_argument("--epsilon", type=float, default=0.2)
    p.add_argument("--alpha", type=float, default=0.02)
    p.add_argument("--jll-constant", type=float, default=1.0)
    p.add_argument("--seed", type=int, default=None, help="projector seed")
    p.add_argument("--report", help="write a JSON decode report here")
    p.add_argument("--dump-lp", help="dump the decoding LP in text LP format")
    p.set_defaults(func=_cmd_decode)

    p = sub.add_parser("bench", help="run a benchmark table")
    p.add_argument("--table", type=int, choices=[1, 2], required=True)
    p.add_argument("--sizes", help="table 1: comma list of d; table 2: 'm,dp;m,dp'")
    p.add_argument("--trials", type=int, default=None, help="runs per cell")
    p.add_argument("--redundancy", type=float, default=4.0)
    p.add_argument("--delta", type=float, default=0.08)
    p.add_argument("--epsilon", type=float, default=0.2)
    p.add_argument("--alpha", type=float, default=0.02)
    p.add_argument("--jll-constant", type=float, default=1.0)
    p.add_argument("--gross-magnitude", type=float, default=1000.0)
    p.add_argument("--channel-delta", type=float, default=None,
                   help="table 2: decouple the channel error rate from delta-prime")
    p.add_argument("--corpus", help="path to an alternative Latin-1 corpus")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--jobs", type=int, default=os.cpu_count() or 1)
    p.add_argument("--csv", required=True)
    p.add_argument("--svg")
    p.add_argument("--manifest")
    p.set_defaults(func=_cmd_bench)

    p = sub.add_parser("plot", help="re-plot a benchmark CSV")
    p.add_argument("--csv", required=True)
    p.add_argument("--svg", required=True)
    p.set_defaults(func=_cmd_plot)

    p = sub.add_parser("selftest", help="run the cross-module invariant suite")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=_cmd_selftest)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except (SparselineError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
