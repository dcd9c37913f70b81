"""Command line: ``markovbits {extract,analyze,verify}``.

Exit codes: 0 success, 1 invalid flags, 2 bad input symbol, 3 enumeration
budget exceeded, 4 verification failed.
"""
from __future__ import annotations

import argparse
import os
import re
import sys
from pathlib import Path
from typing import BinaryIO, Iterable, Iterator

from . import analysis
from .algo_b import StreamState
from .core import Alphabet
from .markov import (ChainModel, ExitSequences, decompose, entropy_rate, is_feasible,
                     load_chain_spec, reconstruct, sample, stationary)

EXIT_FLAGS, EXIT_SYMBOL, EXIT_BUDGET, EXIT_FAILED = 1, 2, 3, 4

_TOKEN = re.compile(rb"[^\s,]+")


class CliError(Exception):
    def __init__(self, message, code=EXIT_FLAGS):
        super().__init__(message)
        self.code = code


# -- symbol input -----------------------------------------------------------

def read_alphabet(path) -> Alphabet:
    names = Path(path).read_text().split()
    return Alphabet(tuple(names))


def _alphabet_from_args(args, required=True) -> Alphabet | None:
    if getattr(args, "alphabet", None) and getattr(args, "states", None):
        raise CliError("give either --alphabet or --states, not both")
    if getattr(args, "alphabet", None):
        return read_alphabet(args.alphabet)
    if getattr(args, "states", None):
        return Alphabet.of_size(args.states)
    if required:
        raise CliError("an alphabet is required: use --alphabet FILE or --states N")
    return None


def iter_symbols(stream: BinaryIO, alphabet: Alphabet, fmt: str) -> Iterator[int]:
    """Yield symbol indices; raises CliError(code 2) on an unknown token."""
    position = 0
    if fmt == "bytes":
        if len(alphabet) > 256:
            raise CliError("byte input needs an alphabet of at most 256 symbols")
        while chunk := stream.read(1 << 16):
            for b in chunk:
                if b >= len(alphabet):
                    raise CliError(f"byte {b} at position {position} outside alphabet", EXIT_SYMBOL)
                position += 1
                yield b
        return
    for line in stream:
        for m in _TOKEN.finditer(line):
            tok = m.group().decode("utf-8", "replace")
            try:
                yield alphabet.index(tok)
            except KeyError:
                raise CliError(f"unknown symbol {tok!r} at position {position}", EXIT_SYMBOL) from None
            position += 1


# -- bit output -------------------------------------------------------------

class BitWriter:
    """ascii01 writes the bits as text; packed writes big-endian bytes, the
    last one zero-padded, followed by one byte holding the number of valid
    bits in that last byte.  No output bits means no bytes at all."""

    def __init__(self, out: BinaryIO, fmt: str):
        self.out = out
        self.fmt = fmt
        self.pending = ""
        self.total = 0

    def write(self, bits: str) -> None:
        if not bits:
            return
        self.total += len(bits)
        if self.fmt == "ascii01":
            self.out.write(bits.encode("ascii"))
            return
        self.pending += bits
        whole = len(self.pending) // 8 * 8
        if whole:
            self.out.write(int(self.pending[:whole], 2).to_bytes(whole // 8, "big"))
            self.pending = self.pending[whole:]
        self.out.flush()

    def close(self) -> None:
        if self.fmt == "ascii01":
            if self.total:
                self.out.write(b"\n")
        elif self.total:
            tail = len(self.pending) or 8
            if self.pending:
                self.out.write(bytes([int(self.pending.ljust(8, "0"), 2)]))
            self.out.write(bytes([tail]))
        self.out.flush()


def unpack_bits(data: bytes) -> str:
    """Inverse of the packed format."""
    if not data:
        return ""
    *body, tail = data
    bits = "".join(format(b, "08b") for b in body)
    return bits[: len(bits) - 8 + tail] if body else ""


# -- subcommands ------------------------------------------------------------

def _open_in(path):
    return sys.stdin.buffer if path in (None, "-") else open(path, "rb")


def _open_out(path):
    return sys.stdout.buffer if path in (None, "-") else open(path, "wb")


def cmd_extract(args) -> int:
    if args.window is not None and args.algorithm != "b":
        raise CliError("--window only applies to --algorithm b")
    if args.seed is not None and not args.chain:
        raise CliError("--seed needs --chain (sampling mode)")
    if args.psi == "peres" and args.algorithm in ("elias", "vn"):
        raise CliError("--psi has no effect on a direct coin extractor")
    inp = None
    if args.chain:
        if args.length is None:
            raise CliError("sampling mode needs --length")
        model = load_chain_spec(args.chain)
        alphabet = _alphabet_from_args(args, required=False) or model.alphabet
        symbols: Iterable[int] = sample(model, args.length, args.seed)
    else:
        alphabet = _alphabet_from_args(args)
    if args.algorithm == "peres" or args.psi == "peres":
        if len(alphabet) > 2:
            raise CliError("the Peres extractor needs a two-symbol alphabet")
    if not args.chain:
        inp = _open_in(args.input)
        symbols = iter_symbols(inp, alphabet, args.input_format)
    out = _open_out(args.output)
    writer = BitWriter(out, args.format)
    try:
        if args.algorithm == "b":
            state = StreamState(len(alphabet), args.window or 4, _psi(args))
            for bits in state.feed(symbols):
                writer.write(bits)
        else:
            seq = list(symbols)
            if seq:
                writer.write(_algorithm(args)(seq))
    finally:
        writer.close()
        if out is not sys.stdout.buffer:
            out.close()
        if inp is not None and inp is not sys.stdin.buffer:
            inp.close()
    return 0


def _algorithm(args):
    return analysis.get_algorithm(args.algorithm, psi=args.psi, window=getattr(args, "window", None) or 4,
                                  k=args.split_k, depth=args.peres_depth, split_rule=args.split_rule)


def _psi(args):
    if args.psi == "peres":
        from .extractors import Extractor
        return Extractor("peres", args.peres_depth)
    return args.psi


def _model_from_args(args) -> ChainModel:
    if getattr(args, "chain", None):
        return load_chain_spec(args.chain)
    if getattr(args, "states", None):
        return ChainModel.uniform(args.states)
    raise CliError("give --chain FILE or --states N (uniform chain)")


def _parse_windows(text: str) -> list[int]:
    out = []
    for part in text.split(","):
        if ":" in part:
            lo, hi = part.split(":")
            out.extend(range(int(lo), int(hi) + 1))
        else:
            out.append(int(part))
    return out


def cmd_analyze(args) -> int:
    out = sys.stdout
    if args.what == "enumerate":
        model = _model_from_args(args)
        start = model.alphabet.index(args.start) if args.start is not None else 0
        algo = _algorithm(args)
        try:
            report = analysis.enumerate_distribution(model, args.length, start, algo,
                                                     budget=args.budget, workers=args.threads)
        except analysis.BudgetExceeded as exc:
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_BUDGET
        print(report.to_table() if args.table else report.to_text(), file=out)
    elif args.what == "efficiency":
        model = _model_from_args(args)
        print("window efficiency", file=out)
        for w, eta in analysis.efficiency_curve(model, _parse_windows(args.windows)):
            print(f"{w} {float(eta):.6f}", file=out)
    elif args.what == "entropy":
        model = _model_from_args(args)
        u = stationary(model)
        print("stationary=" + ",".join(f"{float(x):.9g}" for x in u), file=out)
        print(f"entropy_rate={entropy_rate(model):.9f}", file=out)
    return 0


def read_exit_sequences(path, alphabet: Alphabet | None) -> tuple[ExitSequences, Alphabet]:
    """First line: start state.  Then one lane per line, tokens separated by
    whitespace; an empty line is an empty lane."""
    lines = Path(path).read_text().split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    if not lines:
        raise CliError("exit-sequence file is empty", EXIT_SYMBOL)
    lane_lines = lines[1:]
    if alphabet is None:
        alphabet = Alphabet.of_size(max(1, len(lane_lines)))
    if len(lane_lines) > len(alphabet):
        raise CliError(f"{len(lane_lines)} lanes for an alphabet of {len(alphabet)}", EXIT_SYMBOL)
    try:
        start = alphabet.index(lines[0].strip())
        lanes = [alphabet.encode(line.split()) for line in lane_lines]
    except KeyError as exc:
        raise CliError(str(exc), EXIT_SYMBOL) from None
    lanes += [[]] * (len(alphabet) - len(lanes))
    return ExitSequences(start, tuple(map(tuple, lanes))), alphabet


def cmd_verify(args) -> int:
    out = sys.stdout
    if args.what == "feasibility":
        E, alphabet = read_exit_sequences(args.file, _alphabet_from_args(args, required=False))
        ok, end = is_feasible(E)
        if ok:
            print(f"feasible end={alphabet.names[end]}", file=out)
            print("trajectory=" + " ".join(alphabet.decode(reconstruct(E))), file=out)
            return 0
        print("infeasible", file=out)
        return EXIT_FAILED
    if args.what == "counting":
        algo = _algorithm(args)
        verdict = analysis.verify_counting_condition(args.states, args.length, algo,
                                                     workers=args.threads)
        if verdict:
            print(f"pass groups={verdict.groups}", file=out)
            return 0
        print(f"FAIL counterexample={verdict.counterexample}", file=out)
        return EXIT_FAILED
    if args.what == "roundtrip":
        import itertools
        n, N = args.states, args.length
        checked = 0
        for seq in itertools.product(range(n), repeat=N):
            back = reconstruct(decompose(seq, n))
            if tuple(back) != seq:
                print(f"FAIL trajectory={seq} reconstructed={back}", file=out)
                return EXIT_FAILED
            checked += 1
        print(f"pass trajectories={checked}", file=out)
        return 0
    return EXIT_FLAGS


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="markovbits",
                                description="Unbiased random bits from Markov chain trajectories.")
    sub = p.add_subparsers(dest="command", required=True)

    def alphabet_opts(sp):
        sp.add_argument("--alphabet", help="file of state names; order defines the symbol order")
        sp.add_argument("--states", type=int, help="alphabet of N states named 0..N-1")

    def algo_opts(sp, default):
        sp.add_argument("--algorithm", default=default, choices=analysis.ALGORITHMS)
        sp.add_argument("--psi", default="elias", choices=("vn", "elias", "peres"))
        sp.add_argument("--split-k", type=int, default=16, help="threshold for a-split")
        sp.add_argument("--split-rule", default="position", choices=("position", "returns"),
                        help="a-split cut rule: first return after K symbols, or K-th return")
        sp.add_argument("--peres-depth", type=int, default=32)

    ex = sub.add_parser("extract", help="extract bits from a trajectory")
    algo_opts(ex, "c")
    ex.add_argument("--window", type=int, help="window size (algorithm b only)")
    alphabet_opts(ex)
    ex.add_argument("--input", default="-")
    ex.add_argument("--input-format", default="tokens", choices=("tokens", "bytes"))
    ex.add_argument("--output", default="-")
    ex.add_argument("--format", default="ascii01", choices=("ascii01", "packed"))
    ex.add_argument("--chain", help="chain spec; sample the input instead of reading it")
    ex.add_argument("--length", type=int, help="trajectory length in sampling mode")
    ex.add_argument("--seed", type=int)
    ex.set_defaults(func=cmd_extract)

    an = sub.add_parser("analyze", help="exact distributions and efficiency")
    an_sub = an.add_subparsers(dest="what", required=True)
    en = an_sub.add_parser("enumerate")
    algo_opts(en, "c")
    en.add_argument("--window", type=int, default=4)
    en.add_argument("--chain")
    en.add_argument("--states", type=int)
    en.add_argument("--length", type=int, required=True)
    en.add_argument("--start", help="start state name (default: first state)")
    en.add_argument("--budget", type=int, default=analysis.DEFAULT_BUDGET)
    en.add_argument("--threads", type=int, default=1)
    en.add_argument("--table", action="store_true", help="human-readable table")
    ef = an_sub.add_parser("efficiency")
    ef.add_argument("--chain")
    ef.add_argument("--states", type=int)
    ef.add_argument("--windows", default="2:15", help="e.g. 2:15 or 2,4,8")
    et = an_sub.add_parser("entropy")
    et.add_argument("--chain")
    et.add_argument("--states", type=int)
    an.set_defaults(func=cmd_analyze)

    ve = sub.add_parser("verify", help="check feasibility, unbiasedness, round trips")
    ve_sub = ve.add_subparsers(dest="what", required=True)
    fe = ve_sub.add_parser("feasibility")
    fe.add_argument("file")
    alphabet_opts(fe)
    co = ve_sub.add_parser("counting")
    algo_opts(co, "c")
    co.add_argument("--window", type=int, default=4)
    co.add_argument("--states", type=int, required=True)
    co.add_argument("--length", type=int, required=True)
    co.add_argument("--threads", type=int, default=1)
    rt = ve_sub.add_parser("roundtrip")
    rt.add_argument("--states", type=int, required=True)
    rt.add_argument("--length", type=int, required=True)
    ve.set_defaults(func=cmd_verify)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_FLAGS if exc.code else 0
    try:
        return args.func(args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code
    except BrokenPipeError:
        # reader went away (e.g. piped into head); stop quietly
        devnull = os.open(os.devnull, os.O_WRONLY)
        os.dup2(devnull, sys.stdout.fileno())
        return 0
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FLAGS


if __name__ == "__main__":
    sys.exit(main())
