"""
Command-line front end.

Subcommands::

    ratekit compute --method m4,multihop --alpha 7 --n 1e4,1e5
    ratekit figure fig9 --out fig9.csv
    ratekit sweep L --method single-stage --alpha 3 --n 1e4
    ratekit verify rmt

Flags may also come from a flat ``key = value`` file given with
``--config``; flags on the command line win. Exit status is 0 on success,
1 when a verification suite fails and 2 for an invalid configuration.
"""

import argparse
import logging
import sys
from dataclasses import dataclass

from . import __version__, report, schemes
from .exceptions import RatekitError

logger = logging.getLogger(__name__)

EXIT_OK, EXIT_VERIFY_FAILED, EXIT_INVALID = 0, 1, 2
COMMANDS = ("compute", "figure", "sweep", "verify")


class ConfigError(RatekitError):
    pass


@dataclass
class RunConfig:
    """Resolved options of one CLI invocation."""

    command: str
    target: str = None
    alpha: float = 7.0
    n: tuple = (10 ** 4,)
    n_range: tuple = None
    methods: tuple = ("m4",)
    qs: tuple = None
    t: int = None
    t_max: int = 8
    L: int = None
    snr: float = None
    relay_scheme: str = "qmf"
    seed: int = 0
    out: str = None
    fmt: str = "csv"
    constants: str = "derivation"


def _number(text):
    v = float(text)
    return int(v) if v.is_integer() else v


def _int_list(text):
    return tuple(int(_number(v)) for v in text.split(",") if v.strip())


def read_config_file(path):
    """Parse ``key = value`` lines into CLI tokens (``#`` starts a comment)."""
    tokens = []
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigError(f"{path}:{lineno}: expected 'key = value'")
            key, val = (s.strip() for s in line.split("=", 1))
            if key == "config":
                raise ConfigError(f"{path}:{lineno}: nested config files are not supported")
            tokens += [f"--{key.replace('_', '-')}", val]
    return tokens


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--alpha", type=float, help="pathloss exponent")
    common.add_argument("--n", help="network size(s), comma separated, e.g. 1e4,1e5")
    common.add_argument("--n-range", help="log grid 'start,stop,num' for n")
    common.add_argument("--method", help=f"comma separated, from {', '.join(schemes.METHODS)}")
    common.add_argument("--q", help="time-expansion factor(s), comma separated")
    common.add_argument("--t", type=int, help="fix the number of stages (default: optimize)")
    common.add_argument("--tmax", type=int, help="largest stage count searched (default 8)")
    common.add_argument("--L", type=int, help="reuse factor override")
    common.add_argument("--snr", type=float, help="linear SNR override")
    common.add_argument("--relay", choices=("qmf", "qf"), help="relay scheme for the coding rate")
    common.add_argument("--seed", type=int, help="seed for Monte-Carlo suites (default 0)")
    common.add_argument("--out", help="output file (default: stdout)")
    common.add_argument("--format", choices=("csv", "pretty-table"), help="output format")
    common.add_argument("--constants", choices=schemes.CONSTANTS,
                        help="penalty constants for methods 3 and 4")
    common.add_argument("--config", help="flat key = value file; command-line flags win")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(
        prog="ratekit",
        description="Sum rates of hierarchical cooperation and multihop routing.",
    )
    parser.add_argument("--version", action="version", version=f"ratekit {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("compute", parents=[common], help="sum rate per (method, n)")
    p = sub.add_parser("figure", parents=[common], help="CSV data of one figure")
    p.add_argument("target", choices=report.FIGURES)
    p = sub.add_parser("sweep", parents=[common], help="vary one parameter")
    p.add_argument("target", choices=report.SWEEP_AXES)
    p = sub.add_parser("verify", parents=[common], help="run a verification suite")
    p.add_argument("target", choices=report.VERIFY_SUITES + ("all",))
    return parser


def _merge_config_file(argv):
    """Insert tokens from ``--config FILE`` right after the subcommand."""
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument("--config")
    known, _ = pre.parse_known_args(argv)
    if not known.config:
        return argv
    tokens = read_config_file(known.config)
    for i, tok in enumerate(argv):
        if tok in COMMANDS:
            # argparse keeps the last occurrence, so file values go first
            return argv[: i + 1] + tokens + argv[i + 1:]
    return argv


def resolve(args):
    """Turn parsed arguments into a validated ``RunConfig``."""
    cfg = RunConfig(command=args.command, target=getattr(args, "target", None))
    try:
        if args.alpha is not None:
            cfg.alpha = args.alpha
        if args.n is not None:
            cfg.n = _int_list(args.n)
        if args.n_range is not None:
            parts = [float(v) for v in args.n_range.split(",")]
            if len(parts) == 2:
                parts.append(31)
            if len(parts) != 3 or not 0 < parts[0] < parts[1]:
                raise ConfigError("--n-range needs 'start,stop[,num]' with 0 < start < stop")
            cfg.n_range = (parts[0], parts[1], int(parts[2]))
        if args.method is not None:
            cfg.methods = tuple(m.strip() for m in args.method.split(",") if m.strip())
        if args.q is not None:
            cfg.qs = _int_list(args.q)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    for name, attr in (("t", "t"), ("tmax", "t_max"), ("L", "L"), ("snr", "snr"),
                       ("relay", "relay_scheme"), ("seed", "seed"), ("out", "out"),
                       ("format", "fmt"), ("constants", "constants")):
        val = getattr(args, name)
        if val is not None:
            setattr(cfg, attr, val)

    bad = [m for m in cfg.methods if m not in schemes.METHODS]
    if bad:
        raise ConfigError(f"unknown method(s) {bad}; choose from {schemes.METHODS}")
    if cfg.qs is not None and any(q < 1 for q in cfg.qs):
        raise ConfigError("q must be >= 1")
    if cfg.t_max < 1:
        raise ConfigError("--tmax must be >= 1")
    if cfg.alpha < 2:
        raise ConfigError("--alpha must be >= 2")
    return cfg


def _scheme_configs(cfg, ns):
    out = []
    qs = cfg.qs or (None,)
    for method in cfg.methods:
        for n in ns:
            for q in qs:
                out.append(schemes.SchemeConfig(
                    n=n, alpha=cfg.alpha, method=method, t=cfg.t, q=q,
                    relay_scheme=cfg.relay_scheme, snr=cfg.snr, L=cfg.L,
                    constants=cfg.constants, t_max=cfg.t_max))
    return out


def _emit(table, cfg, stream):
    text = report.format_table(table) if cfg.fmt == "pretty-table" else report.write_csv(table)
    if cfg.out:
        # newline='' keeps LF line endings on every platform
        with open(cfg.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        stream.write(text)


def cmd_compute(cfg, stream):
    ns = cfg.n
    if cfg.n_range:
        ns = report.sweep_values("n", None, cfg.n_range)
    table = report.compute_table(_scheme_configs(cfg, ns), cfg.constants, cfg.seed)
    _emit(table, cfg, stream)
    if all(r[-1] != "ok" for r in table.rows):
        logger.error("no feasible configuration")
        return EXIT_INVALID
    return EXIT_OK


def cmd_figure(cfg, stream):
    _emit(report.figure_table(cfg.target, cfg.constants, cfg.seed), cfg, stream)
    return EXIT_OK


def cmd_sweep(cfg, stream):
    base = _scheme_configs(cfg, cfg.n[:1])[0]
    _emit(report.sweep_table(cfg.target, base, n_range=cfg.n_range, seed=cfg.seed), cfg, stream)
    return EXIT_OK


def cmd_verify(cfg, stream):
    results = report.run_verify(cfg.target, cfg.seed)
    lines = []
    for res in results:
        lines.append(f"[{'PASS' if res.passed else 'FAIL'}] {res.suite}")
        lines += [f"    {s}" for s in res.lines]
    text = "\n".join(lines) + "\n"
    if cfg.out:
        with open(cfg.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    stream.write(text)
    return EXIT_OK if all(r.passed for r in results) else EXIT_VERIFY_FAILED


_COMMANDS = {"compute": cmd_compute, "figure": cmd_figure, "sweep": cmd_sweep, "verify": cmd_verify}


def main(argv=None, stream=None):
    argv = list(sys.argv[1:] if argv is None else argv)
    stream = sys.stdout if stream is None else stream
    parser = build_parser()
    try:
        argv = _merge_config_file(argv)
    except (OSError, ConfigError) as exc:
        print(f"ratekit: error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = resolve(args)
        return _COMMANDS[cfg.command](cfg, stream)
    except RatekitError as exc:
        print(f"ratekit: error: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
