"""Command-line front end (``srstair``)."""

from __future__ import annotations

import argparse
import csv
import datetime as _dt
import hashlib
import io
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .analysis import SearchBudgetExceeded, ThresholdError, brute_force_smin, s_min_w2, stall_report, threshold_search
from .bch import CodeConstructionError
from .channel import ChannelSpec, StopRule, apply_channel, bsc_to_awgn, default_workers, run_montecarlo
from .designs import DESIGNS
from .framing import ChainFileError, dumps_chain, loads_chain
from .ibdd import MODE_ALIASES, DecoderConfig, decode_stream
from .srsc import (
    SrscConfig,
    block_shape,
    component_dimension,
    component_length,
    encode_chain,
    extract_info,
    make_codes,
    rate,
    shortening,
    total_info_bits,
    validate_config,
)

EXIT_OK, EXIT_IO, EXIT_CONFIG, EXIT_BUDGET = 0, 2, 3, 4
CODE_KEYS = ("nu1", "nu2", "t1", "t2", "m1", "m2", "q1", "q2", "w", "L")

MEASUREMENT_NOTE = "BER over blocks w..L-W+1 (decided by a full window; warm-up and tail excluded)"


class CliError(Exception):
    def __init__(self, code: int, message: str):
        super().__init__(message)
        self.code = code


def load_config(path: str) -> tuple[dict, bytes]:
    try:
        raw = Path(path).read_bytes()
    except OSError as exc:
        raise CliError(EXIT_IO, f"cannot read config: {exc}") from exc
    try:
        data = json.loads(raw)
    except json.JSONDecodeError as exc:
        raise CliError(EXIT_IO, f"malformed JSON in {path}: {exc}") from exc
    if not isinstance(data, dict) or "code" not in data:
        raise CliError(EXIT_IO, f"{path}: expected an object with a 'code' section")
    return data, raw


def code_config(section: dict) -> SrscConfig:
    params = dict(section)
    # symmetric shorthand: nu, t, m, q
    for key in ("nu", "t", "m", "q"):
        if key in params:
            v = params.pop(key)
            params.setdefault(f"{key}1", v)
            params.setdefault(f"{key}2", v)
    params.setdefault("q1", 1)
    params.setdefault("q2", 1)
    params.setdefault("w", 2)
    params.setdefault("L", 1)
    missing = [k for k in CODE_KEYS if k not in params]
    unknown = [k for k in params if k not in CODE_KEYS]
    if missing or unknown:
        raise CliError(EXIT_CONFIG, f"code section: missing {missing}, unknown {unknown}")
    try:
        return SrscConfig(**{k: int(params[k]) for k in CODE_KEYS})
    except (TypeError, ValueError) as exc:
        raise CliError(EXIT_CONFIG, f"code section: {exc}") from exc


def decoder_config(data: dict, mode_override: str | None = None) -> DecoderConfig:
    sec = data.get("decoder", {})
    mode = mode_override or sec.get("mode", "ibdd")
    try:
        return DecoderConfig(
            window=int(sec.get("window", 7)),
            max_iterations=int(sec.get("max_iters", 8)),
            mode=mode,
            schedule=sec.get("schedule", "newest_first"),
        )
    except ValueError as exc:
        raise CliError(EXIT_CONFIG, f"decoder section: {exc}") from exc


def require_valid(cfg: SrscConfig) -> None:
    violations = validate_config(cfg)
    if violations:
        raise CliError(EXIT_CONFIG, "invalid configuration:\n" + "\n".join(f"  {v}" for v in violations))


def parse_points(text: str | None, fallback) -> list[float]:
    if text is None:
        return [float(x) for x in fallback]
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError as exc:
        raise CliError(EXIT_CONFIG, f"bad --points list: {exc}") from exc


def fmt(x) -> str:
    if isinstance(x, float):
        if math.isnan(x) or math.isinf(x):
            return str(x)
        return f"{x:.6e}"
    return str(x)


def render_csv(columns: list[str], rows: list[dict], comments: list[str]) -> str:
    buf = io.StringIO()
    buf.write("# columns: " + ",".join(columns) + "\n")
    for c in comments:
        buf.write(f"# {c}\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([fmt(row[c]) for c in columns])
    return buf.getvalue()


def emit(text: str, out: str | None, manifest: dict) -> None:
    if out is None:
        sys.stdout.write(text)
        return
    try:
        Path(out).write_text(text)
        manifest["finished"] = _now()
        Path(out + ".manifest.json").write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")
    except OSError as exc:
        raise CliError(EXIT_IO, f"cannot write output: {exc}") from exc


def _now() -> str:
    return _dt.datetime.now(_dt.timezone.utc).isoformat()


def make_manifest(args, data: dict | None, raw: bytes | None, seed: int | None = None) -> dict:
    return {
        "tool": "srstair",
        "version": __version__,
        "command": args.command,
        "config": data,
        "seed": seed,
        "input_sha256": hashlib.sha256(raw).hexdigest() if raw is not None else None,
        "started": _now(),
    }


# --- subcommands --------------------------------------------------------------


def cmd_validate(args) -> int:
    data, _ = load_config(args.config)
    cfg = code_config(data["code"])
    violations = validate_config(cfg)
    if violations:
        print("INVALID")
        for v in violations:
            print(f"  {v}")
        return EXIT_CONFIG
    r = rate(cfg)
    print("VALID")
    print(f"rate = {r} ~ {float(r):.4f}")
    for j in (1, 2):
        print(f"C{j}: n={component_length(cfg, j)} k={component_dimension(cfg, j)} e={shortening(cfg, j)} t={cfg.t(j)} nu={cfg.nu(j)}")
    for label, i in (("odd", 1), ("even", 2)):
        rr, cc = block_shape(cfg, i)
        print(f"{label} blocks: {rr}x{cc} = {rr * cc} bits")
    return EXIT_OK


THRESHOLD_COLUMNS = ["label", "nu1", "nu2", "t1", "t2", "m1", "m2", "q1", "q2", "w", "length", "rate", "p_bar", "ebn0_db"]


def _threshold_row(label: str, cfg: SrscConfig, tol: float, length) -> dict:
    res = threshold_search(cfg, tol=tol, length=length)
    r = float(rate(cfg))
    row = {"label": label, **{k: getattr(cfg, k) for k in CODE_KEYS if k != "L"}}
    row.update(length=res.length, rate=r, p_bar=res.p_bar, ebn0_db=bsc_to_awgn(res.p_bar, r))
    return row


def cmd_threshold(args) -> int:
    length = args.length if args.length == "auto" else int(args.length)
    rows, comments, data, raw = [], [], None, None
    columns = THRESHOLD_COLUMNS
    if args.designs:
        columns = THRESHOLD_COLUMNS + DESIGN_COLUMNS
        for d in DESIGNS:
            row = _threshold_row(d.label, d.config(for_de=True), args.tol, length)
            rr, cc = block_shape(d.config(for_de=True), 2)
            computed = rr * cc
            row.update(
                listed_rate=d.rate, listed_p_bar=d.p_bar, p_bar_dev=row["p_bar"] - d.p_bar,
                rate_flag="extended-parity" if d.extended_parity else ("ok" if round(float(d.formula_rate()), 3) == d.rate else "mismatch"),
                listed_block_size=d.block_size, computed_block_size=computed,
                size_flag="ok" if computed == d.block_size else "mismatch",
            )
            rows.append(row)
        comments.append("reference design batch; rate column is the formula rate, listed values shown alongside")
    else:
        if not args.config:
            raise CliError(EXIT_IO, "threshold needs --config or --designs")
        data, raw = load_config(args.config)
        sections = data["code"] if isinstance(data["code"], list) else [data["code"]]
        for k, sec in enumerate(sections):
            rows.append(_threshold_row(sec.get("label", f"row{k}"), code_config({x: v for x, v in sec.items() if x != "label"}), args.tol, length))
    comments.append(f"tol={args.tol} length={args.length}; ebn0_db is the hard-decision BPSK equivalent")
    text = render_csv(columns, rows, comments)
    emit(text, args.out, make_manifest(args, data, raw))
    return EXIT_OK


DESIGN_COLUMNS = ["listed_rate", "rate_flag", "listed_p_bar", "p_bar_dev", "listed_block_size", "computed_block_size", "size_flag"]

SIM_COLUMNS = ["p", "ebn0_db", "mode", "ber", "bler", "ci95", "bit_errors", "bits_measured", "block_errors", "blocks_measured", "trials", "seed"]


def cmd_simulate(args) -> int:
    data, raw = load_config(args.config)
    cfg = code_config(data["code"])
    require_valid(cfg)
    dcfg = decoder_config(data, MODE_ALIASES.get(args.mode) if args.mode else None)
    chan = data.get("channel", {"kind": "bsc", "points": []})
    run = data.get("run", {})
    seed = args.seed if args.seed is not None else int(run.get("seed", 0))
    workers = args.workers if args.workers is not None else int(run.get("workers", default_workers()))
    stop = StopRule(int(run.get("min_bit_errors", 100)), int(run.get("max_blocks", 1000)))
    kind = chan.get("kind", "bsc")
    points = parse_points(args.points, chan.get("points", []))
    if not points:
        raise CliError(EXIT_CONFIG, "no channel points given")
    codes = make_codes(cfg)
    r = float(rate(cfg))
    rows = []
    for pt in points:
        try:
            spec = ChannelSpec(kind, pt, r)
        except ValueError as exc:
            raise CliError(EXIT_CONFIG, str(exc)) from exc
        stats = run_montecarlo(cfg, codes, spec, dcfg, stop, seed=seed, workers=workers)
        p = spec.crossover
        rows.append({
            "p": p,
            "ebn0_db": pt if kind == "awgn_hard" else (bsc_to_awgn(p, r) if 0 < p < 0.5 else float("inf")),
            "mode": dcfg.mode,
            "ber": stats.ber, "bler": stats.bler, "ci95": stats.ci95,
            "bit_errors": stats.bit_errors, "bits_measured": stats.bits_measured,
            "block_errors": stats.block_errors, "blocks_measured": stats.blocks_measured,
            "trials": stats.trials, "seed": seed,
        })
    comments = [MEASUREMENT_NOTE, f"W={dcfg.window} max_iters={dcfg.max_iterations} schedule={dcfg.schedule} L={cfg.L}"]
    emit(render_csv(SIM_COLUMNS, rows, comments), args.out, make_manifest(args, data, raw, seed))
    return EXIT_OK


FLOOR_COLUMNS = ["p", "s_min", "s_min_exact", "lemma1_strict", "A_min", "block_size", "ber_floor"]


def cmd_floor(args) -> int:
    data, raw = load_config(args.config)
    cfg = code_config(data["code"])
    if args.a_min_oracle:
        try:
            res = brute_force_smin(cfg, count=True, budget=args.budget)
        except SearchBudgetExceeded as exc:
            raise CliError(EXIT_BUDGET, str(exc)) from exc
        a_min = res.count
    else:
        a_min = args.a_min
    if a_min is None:
        raise CliError(EXIT_CONFIG, "floor needs --a-min N or --a-min-oracle")
    points = parse_points(args.points, data.get("channel", {}).get("points", []))
    try:
        rep = stall_report(cfg, points, a_min)
    except ValueError as exc:
        raise CliError(EXIT_CONFIG, str(exc)) from exc
    rows = [{
        "p": p, "s_min": rep.s_min, "s_min_exact": rep.exact,
        "lemma1_strict": "" if rep.lemma1_strict is None else rep.lemma1_strict,
        "A_min": a_min, "block_size": rep.block_size, "ber_floor": fl,
    } for p, fl in rep.floors]
    comments = ["s_min is exact for w=2 and a lower bound otherwise (floor is then an upper estimate)"]
    emit(render_csv(FLOOR_COLUMNS, rows, comments), args.out, make_manifest(args, data, raw))
    return EXIT_OK


def cmd_smin_oracle(args) -> int:
    data, _ = load_config(args.config)
    cfg = code_config(data["code"])
    try:
        res = brute_force_smin(cfg, max_size=args.max_size, budget=args.budget, span=args.span)
    except SearchBudgetExceeded as exc:
        print(f"budget exceeded: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except ValueError as exc:
        raise CliError(EXIT_CONFIG, str(exc)) from exc
    closed = s_min_w2(cfg.t1, cfg.t2, cfg.q1, cfg.q2)
    print(f"s_min (exhaustive) = {res.size}  [per starting time: {res.per_time}]")
    print(f"s_min (closed form) = {closed}  -> {'AGREE' if closed == res.size else 'DISAGREE'}")
    print("witness (time,row,col), 0-based rows/cols:")
    for t, r, c in res.witness:
        print(f"  {t},{r},{c}")
    return EXIT_OK


def cmd_encode(args) -> int:
    data, _ = load_config(args.config)
    cfg = code_config(data["code"])
    require_valid(cfg)
    try:
        payload = np.unpackbits(np.frombuffer(Path(args.input).read_bytes(), dtype=np.uint8), bitorder="little")
    except OSError as exc:
        raise CliError(EXIT_IO, f"cannot read input: {exc}") from exc
    codes = make_codes(cfg)
    window = decoder_config(data).window
    L = max(cfg.L, window)
    while total_info_bits(cfg, L) < payload.size:
        L += 1
    bits = np.zeros(total_info_bits(cfg, L), dtype=np.uint8)
    bits[: payload.size] = payload
    blocks = encode_chain(cfg, codes, bits, L)
    if args.flip_p:
        blocks, _ = apply_channel(blocks, ChannelSpec("bsc", args.flip_p), args.seed or 0)
    try:
        Path(args.output).write_bytes(dumps_chain(cfg, blocks, payload.size))
    except OSError as exc:
        raise CliError(EXIT_IO, f"cannot write output: {exc}") from exc
    print(f"encoded {payload.size} bits into {L} blocks")
    return EXIT_OK


def cmd_decode(args) -> int:
    data, _ = load_config(args.config)
    cfg = code_config(data["code"])
    require_valid(cfg)
    try:
        blocks, payload_bits = loads_chain(cfg, Path(args.input).read_bytes())
    except (OSError, ChainFileError) as exc:
        raise CliError(EXIT_IO, f"cannot read chain: {exc}") from exc
    dcfg = decoder_config(data, "true_ibdd")
    codes = make_codes(cfg)
    decoded = decode_stream(cfg, codes, blocks, dcfg)
    bits = extract_info(cfg, decoded)[:payload_bits]
    try:
        Path(args.output).write_bytes(np.packbits(bits, bitorder="little").tobytes())
    except OSError as exc:
        raise CliError(EXIT_IO, f"cannot write output: {exc}") from exc
    print(f"decoded {payload_bits} bits from {len(blocks)} blocks")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="srstair", description="SR-staircase FEC toolkit")
    parser.add_argument("--version", action="version", version=f"srstair {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="check a code configuration")
    p.add_argument("--config", required=True)
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("threshold", help="density-evolution BSC threshold")
    p.add_argument("--config")
    p.add_argument("--designs", action="store_true", help="sweep the built-in reference designs")
    p.add_argument("--tol", type=float, default=1e-7)
    p.add_argument("--length", default="auto", help="chain length for DE, or 'auto'")
    p.add_argument("--out")
    p.set_defaults(func=cmd_threshold)

    p = sub.add_parser("simulate", help="Monte Carlo BER/BLER")
    p.add_argument("--config", required=True)
    p.add_argument("--points", help="comma-separated channel points (p, or Eb/N0 dB for awgn_hard)")
    p.add_argument("--mode", choices=["ibdd", "mf"])
    p.add_argument("--seed", type=int)
    p.add_argument("--workers", type=int)
    p.add_argument("--out")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("floor", help="stall-pattern error-floor estimate")
    p.add_argument("--config", required=True)
    p.add_argument("--points")
    p.add_argument("--a-min", type=float, dest="a_min")
    p.add_argument("--a-min-oracle", action="store_true", help="count A_min by exhaustive search (toy sizes)")
    p.add_argument("--budget", type=int, default=5_000_000)
    p.add_argument("--out")
    p.set_defaults(func=cmd_floor)

    p = sub.add_parser("smin-oracle", help="exhaustive minimum stall search (toy sizes)")
    p.add_argument("--config", required=True)
    p.add_argument("--budget", type=int, default=5_000_000)
    p.add_argument("--max-size", type=int, default=12)
    p.add_argument("--span", type=int, default=2)
    p.set_defaults(func=cmd_smin_oracle)

    for name, func in (("encode", cmd_encode), ("decode", cmd_decode)):
        p = sub.add_parser(name, help=f"{name} a chain file")
        p.add_argument("--config", required=True)
        p.add_argument("--input", required=True)
        p.add_argument("--output", required=True)
        p.add_argument("--seed", type=int)
        if name == "encode":
            p.add_argument("--flip-p", type=float, default=0.0, help="pass the chain through a BSC")
        p.set_defaults(func=func)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code
    except (CodeConstructionError, ThresholdError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
