"""Command-line interface.

Subcommands: gen-codes, kspc, schedule, simulate, analyze, serve.
"""

from __future__ import annotations

import argparse
import sys

from . import codec, config as config_mod
from .codec import CodecError
from .experiment import (
    ExperimentError,
    Schedule,
    SessionStore,
    load_phrase_set,
    make_schedule,
    simulate,
)
from .metrics import MetricsError, kspc_theoretical
from .stats import StatsError


def _load_config(args) -> config_mod.Config:
    return config_mod.load_config(getattr(args, "config", None))


def _load_letter_freqs(args):
    if getattr(args, "freqs", None):
        return codec.load_frequency_table(args.freqs)
    return config_mod.english_letter_frequencies()


def _default_table(args):
    """Load --table if given, else generate from letters + command defaults."""
    if getattr(args, "table", None):
        return codec.load_code_table(args.table)
    cfg = _load_config(args)
    freqs = config_mod.combined_frequency_table(
        config_mod.english_letter_frequencies(), cfg.command_freqs
    )
    return codec.build_code_table(freqs)


def cmd_gen_codes(args) -> int:
    letters = _load_letter_freqs(args)
    if args.letters_only:
        freqs = letters
    else:
        cfg = _load_config(args)
        freqs = config_mod.combined_frequency_table(letters, cfg.command_freqs)
    table = codec.build_code_table(freqs)
    codec.save_code_table(table, args.out)
    print(f"wrote {len(table.entries)} codes to {args.out}")
    return 0


def cmd_kspc(args) -> int:
    table = codec.load_code_table(args.table)
    freqs = _load_letter_freqs(args)
    print(f"{kspc_theoretical(table, freqs, args.mode):.6f}")
    return 0


def cmd_schedule(args) -> int:
    cfg = _load_config(args)
    if args.phrases:
        phrase_set = load_phrase_set(args.phrases)
    else:
        with config_mod.packaged_phrase_file() as p:
            phrase_set = load_phrase_set(p)
    devices = args.devices.split(",") if args.devices else cfg.devices
    sched = make_schedule(
        participants=args.participants,
        devices=devices,
        blocks=args.blocks or cfg.blocks,
        phrases_per_block=args.phrases_per_block or cfg.phrases_per_block,
        phrase_set=phrase_set,
        seed=args.seed if args.seed is not None else cfg.seed,
    )
    with open(args.out, "w", encoding="utf-8") as fh:
        fh.write(sched.to_json() + "\n")
    print(f"wrote schedule with {len(sched.trials)} planned trials to {args.out}")
    return 0


def cmd_simulate(args) -> int:
    with open(args.schedule, encoding="utf-8") as fh:
        sched = Schedule.from_json(fh.read())
    table = _default_table(args)
    store = SessionStore.open(args.store)
    simulate(
        sched,
        table,
        store,
        typist=args.typist,
        count_enter=args.count_enter,
        seed=args.seed,
        error_rate=args.error_rate,
    )
    print(f"simulated {len(sched.trials)} trials into {args.store}")
    return 0


def cmd_analyze(args) -> int:
    from .report import write_report

    store = SessionStore.open(args.store)
    report = write_report(store, args.out)
    print(f"analyzed {report['trials']} trials; report written to {args.out}")
    return 0


def cmd_serve(args) -> int:
    import uvicorn

    from .gateway import create_app

    table = _default_table(args)
    if args.phrases:
        phrase_set = load_phrase_set(args.phrases)
    else:
        with config_mod.packaged_phrase_file() as p:
            phrase_set = load_phrase_set(p)
    cfg = _load_config(args)
    app = create_app(
        table,
        phrase_set,
        store_dir=args.store,
        count_enter=cfg.count_enter,
        static_dir=args.static,
    )
    uvicorn.run(app, host=args.host, port=args.port)
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="h4writer")
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen-codes", help="generate a 4-ary Huffman code table")
    g.add_argument("--freqs", help="letter frequency TSV (default: packaged English)")
    g.add_argument("--out", required=True, help="output code table TSV")
    g.add_argument("--config", help="TOML config (command frequencies)")
    g.add_argument(
        "--letters-only", action="store_true", help="omit space/bksp/enter commands"
    )
    g.set_defaults(func=cmd_gen_codes)

    k = sub.add_parser("kspc", help="theoretical keystrokes per character of a table")
    k.add_argument("--table", required=True)
    k.add_argument("--freqs", help="frequency TSV (default: packaged English)")
    k.add_argument("--mode", choices=["weighted", "unweighted"], default="weighted")
    k.set_defaults(func=cmd_kspc)

    s = sub.add_parser("schedule", help="plan a counterbalanced session schedule")
    s.add_argument("--participants", type=int, required=True)
    s.add_argument("--phrases", help="phrase set file (default: packaged 500-phrase set)")
    s.add_argument("--devices", help="comma-separated device labels")
    s.add_argument("--blocks", type=int)
    s.add_argument("--phrases-per-block", type=int)
    s.add_argument("--seed", type=int)
    s.add_argument("--config")
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_schedule)

    m = sub.add_parser("simulate", help="run a scripted typist over a schedule")
    m.add_argument("--schedule", required=True)
    m.add_argument("--table", help="code table TSV (default: generated)")
    m.add_argument("--store", required=True, help="session store directory")
    m.add_argument("--typist", choices=["perfect", "noisy"], default="perfect")
    m.add_argument("--seed", type=int)
    m.add_argument("--error-rate", type=float, default=0.08)
    m.add_argument("--count-enter", action="store_true")
    m.add_argument("--config")
    m.set_defaults(func=cmd_simulate)

    a = sub.add_parser("analyze", help="summaries, ANOVA, fits and figures")
    a.add_argument("--store", required=True)
    a.add_argument("--out", required=True, help="report output directory")
    a.set_defaults(func=cmd_analyze)

    v = sub.add_parser("serve", help="run the live websocket session service")
    v.add_argument("--table", help="code table TSV (default: generated)")
    v.add_argument("--phrases", help="phrase set file (default: packaged)")
    v.add_argument("--store", help="session store directory")
    v.add_argument("--static", help="directory of UI assets to serve at /")
    v.add_argument("--host", default="127.0.0.1")
    v.add_argument("--port", type=int, default=8400)
    v.add_argument("--config")
    v.set_defaults(func=cmd_serve)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (CodecError, MetricsError, ExperimentError, StatsError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
