"""Command-line front end.

Exit codes: 0 success, 1 domain error (invalid config, cap exceeded, failed
check), 2 usage or parse error.
"""

from __future__ import annotations

import argparse
import io
import os
import sys
import tempfile
from fractions import Fraction
from pathlib import Path

from .circle import rotation_number
from .extensions import ExtElement, chain_report, ext_compare, lift_order
from .freegroup import ReducedWord, WordParseError, ball_size
from .harness import (
    ExperimentError,
    find_divergent_basepoints,
    run_basepoint_walk,
    run_singleton_neighborhood,
    run_stability,
    safe_margin,
)
from .orders import compare_on_ball, materialize
from .pingpong import (
    ConfigError,
    ConfigOracle,
    PingPongConfig,
    eval_triple,
    gap_orbit_check,
    klift,
    lift_action,
    linear_part_generator,
    preset,
    realize_moebius,
    realize_pl,
    validate,
    word_lift,
)

TABLE_CAP = 4


class DomainError(Exception):
    pass


class UsageError(Exception):
    pass


def write_atomic(path: str | Path, data: str | bytes) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    mode = "wb" if isinstance(data, bytes) else "w"
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.")
    try:
        with os.fdopen(fd, mode) as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def load_config(ref: str, *, check: bool = True) -> PingPongConfig:
    """A JSON file path, or a preset name such as schottky1, schottky(2),
    three_boundary, schottky1/3."""
    p = Path(ref)
    if p.is_file():
        try:
            cfg = PingPongConfig.loads(p.read_text())
        except ConfigError as exc:
            raise UsageError(f"{ref}: {exc}") from exc
    else:
        try:
            cfg = preset(ref)
        except (ConfigError, ValueError) as exc:
            raise UsageError(f"{ref}: not a config file or preset ({exc})") from exc
    if check:
        rep = validate(cfg)
        if not rep.ok:
            raise DomainError(f"invalid configuration {ref}:\n{rep}")
    return cfg


def _word(text: str, rank: int) -> ReducedWord:
    try:
        return ReducedWord.parse(text, rank)
    except WordParseError as exc:
        raise UsageError(str(exc)) from exc


def _emit(text: str, out: str | None) -> None:
    if out:
        write_atomic(out, text)
    else:
        sys.stdout.write(text)


def _sign(v: int) -> str:
    return {1: "+1", 0: "0", -1: "-1"}[v]


# --- subcommands ---------------------------------------------------------------


def cmd_validate(args) -> int:
    cfg = load_config(args.config, check=False)
    rep = validate(cfg)
    print(str(rep))
    return 0 if rep.ok else 1


def cmd_preset(args) -> int:
    cfg = load_config(args.name)
    _emit(cfg.dumps() + "\n", args.out)
    return 0


def cmd_eval(args) -> int:
    cfg = load_config(args.config)
    w = [_word(t, cfg.rank) for t in args.words]
    print(_sign(eval_triple(cfg, *w)))
    return 0


def cmd_table(args) -> int:
    cfg = load_config(args.config)
    rows = ball_size(cfg.rank, args.radius) ** 3
    if args.radius > args.cap:
        raise DomainError(f"radius {args.radius} exceeds the cap {args.cap} ({rows} rows); raise --cap to force")
    t = materialize(ConfigOracle(cfg), args.radius)
    buf = io.StringIO()
    t.write_csv(buf)
    _emit(buf.getvalue(), args.out)
    return 0


def cmd_compare(args) -> int:
    c1 = load_config(args.config1)
    c2 = load_config(args.config2)
    if c1.rank != c2.rank:
        raise DomainError("configurations have different ranks")
    diff = compare_on_ball(ConfigOracle(c1), ConfigOracle(c2), args.radius, c1.rank)
    if diff is None:
        print(f"agree on ball {args.radius}")
    else:
        u, v, w = diff
        a, b = eval_triple(c1, u, v, w), eval_triple(c2, u, v, w)
        print(f"differ at ({u}, {v}, {w}): {_sign(a)} vs {_sign(b)}")
    return 0


def cmd_lift(args) -> int:
    cfg = load_config(args.config)
    try:
        out = klift(cfg, args.k)
    except ConfigError as exc:
        raise DomainError(str(exc)) from exc
    _emit(out.dumps() + "\n", args.out)
    return 0


def cmd_rot(args) -> int:
    cfg = load_config(args.config)
    w = _word(args.word, cfg.rank)
    try:
        base = cfg.lift[0] if cfg.lift else cfg
        k = args.k if args.k is not None else (cfg.lift[1] if cfg.lift else 1)
        act = lift_action(realize_moebius(base), k)
    except ConfigError as exc:
        raise DomainError(str(exc)) from exc
    rot = rotation_number(word_lift(act, w), args.max_denominator, cover_degree=k)
    print("undetermined" if rot is None else str(rot))
    return 0


def cmd_ext_compare(args) -> int:
    order = lift_order(args.k, args.n)
    rank = 2 * args.n
    try:
        e1 = ExtElement.parse(args.e1, rank)
        e2 = ExtElement.parse(args.e2, rank)
    except WordParseError as exc:
        raise UsageError(str(exc)) from exc
    print(_sign(ext_compare(order.action, e1, e2)))
    return 0


def cmd_chain(args) -> int:
    if args.k < 2:
        raise DomainError("k must be at least 2")
    rep = chain_report(args.k)
    text = rep.dumps() + "\n" if args.json else rep.text() + "\n"
    _emit(text, args.out)
    return 0 if rep.verified else 1


def cmd_render(args) -> int:
    from .plotting import render_config

    cfg = load_config(args.config)
    fmt = Path(args.out).suffix.lstrip(".") or "svg"
    write_atomic(args.out, render_config(cfg, fmt))
    return 0


def _experiment(args):
    name = args.name
    if name == "singleton":
        return run_singleton_neighborhood(args.seed, args.trials, args.radius)
    if name == "stability":
        cfg = load_config(args.config or "schottky1")
        margin = Fraction(args.margin) if args.margin is not None else safe_margin(realize_pl(cfg)) / 2
        return run_stability(cfg, margin, args.seed, args.trials, args.radius)
    if name == "basepoint":
        cfg = load_config(args.config or "three_boundary")
        if args.path:
            path = [Fraction(t) for t in args.path.split(",")]
        else:
            found = find_divergent_basepoints(cfg, args.radius - 1, args.radius)
            if found is None:
                raise DomainError("no divergent basepoint pair found")
            path = [found[0].turn(), found[1].turn()]
        return run_basepoint_walk(cfg, path, args.radius)
    raise UsageError(f"unknown experiment {name!r}")


def cmd_experiment(args) -> int:
    try:
        rep = _experiment(args)
    except ExperimentError as exc:
        raise DomainError(str(exc)) from exc
    if args.out:
        write_atomic(args.out, rep.dumps() + "\n")
    if args.figure:
        from .plotting import render_report

        fmt = Path(args.figure).suffix.lstrip(".") or "svg"
        write_atomic(args.figure, render_report(rep, fmt))
    print(rep.summary())
    return 0 if rep.ok else 1


def cmd_gaps(args) -> int:
    cfg = load_config(args.config)
    act = realize_moebius(cfg) if cfg.connected or cfg.lift else realize_pl(cfg)
    rep = gap_orbit_check(act, args.radius)
    print(rep.render(cfg))
    return 0


def cmd_report(args) -> int:
    """Tables, rotation numbers and figures for the shipped presets."""
    from .plotting import render_config, render_report

    out = Path(args.out)
    names = ["schottky1", "schottky2", "three_boundary", "schottky1/2", "schottky1/3"]
    rows = ["config,slots,ball_radius,elements,triples_plus,triples_minus"]
    for name in names:
        cfg = load_config(name)
        slug = name.replace("/", "_lift")
        write_atomic(out / f"{slug}.svg", render_config(cfg))
        t = materialize(ConfigOracle(cfg), args.radius)
        buf = io.StringIO()
        t.write_csv(buf)
        write_atomic(out / f"{slug}_ball{args.radius}.csv", buf.getvalue())
        plus = int((t.values == 1).sum())
        minus = int((t.values == -1).sum())
        rows.append(f"{name},{len(cfg.slots)},{args.radius},{t.size},{plus},{minus}")
    write_atomic(out / "tables.csv", "\n".join(rows) + "\n")
    rot = ["n,k,word,rotation"]
    for n, ks in ((1, (2, 3, 5)), (2, (4, 5))):
        base = load_config(f"schottky{n}")
        act_base = realize_moebius(base)
        for k in ks:
            g = linear_part_generator(base)
            r = rotation_number(word_lift(lift_action(act_base, k), g), 64, cover_degree=k)
            rot.append(f"{n},{k},{g},{r}")
    write_atomic(out / "rotation.csv", "\n".join(rot) + "\n")
    rep = run_singleton_neighborhood(args.seed, args.trials, 3)
    write_atomic(out / "singleton.json", rep.dumps() + "\n")
    write_atomic(out / "singleton.svg", render_report(rep))
    print(f"report written to {out}")
    return 0


# --- parser ----------------------------------------------------------------------


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="circorder", description="Circular orders from ping-pong dynamics")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("validate", help="check a configuration")
    s.add_argument("config")
    s.set_defaults(func=cmd_validate)

    s = sub.add_parser("preset", help="write a preset configuration as JSON")
    s.add_argument("name")
    s.add_argument("--out")
    s.set_defaults(func=cmd_preset)

    s = sub.add_parser("eval", help="order value of three words")
    s.add_argument("config")
    s.add_argument("words", nargs=3)
    s.set_defaults(func=cmd_eval)

    s = sub.add_parser("table", help="order table on a ball as CSV")
    s.add_argument("config")
    s.add_argument("--radius", type=int, required=True)
    s.add_argument("--out")
    s.add_argument("--cap", type=int, default=TABLE_CAP)
    s.set_defaults(func=cmd_table)

    s = sub.add_parser("compare", help="first triple where two configurations differ")
    s.add_argument("config1")
    s.add_argument("config2")
    s.add_argument("--radius", type=int, default=2)
    s.set_defaults(func=cmd_compare)

    s = sub.add_parser("lift", help="standard k-lift of a connected configuration")
    s.add_argument("config")
    s.add_argument("--k", type=int, required=True)
    s.add_argument("--out")
    s.set_defaults(func=cmd_lift)

    s = sub.add_parser("rot", help="rotation number of a word under the (lifted) Moebius realization")
    s.add_argument("config")
    s.add_argument("word")
    s.add_argument("--k", type=int)
    s.add_argument("--max-denominator", type=int, default=64)
    s.set_defaults(func=cmd_rot)

    s = sub.add_parser("ext-compare", help="compare two elements word:m of F x Z in the k-lift order")
    s.add_argument("e1")
    s.add_argument("e2")
    s.add_argument("--k", type=int, required=True)
    s.add_argument("--n", type=int, default=1)
    s.set_defaults(func=cmd_ext_compare)

    s = sub.add_parser("chain", help="chain report for the k-lift order")
    s.add_argument("--k", type=int, required=True)
    s.add_argument("--json", action="store_true")
    s.add_argument("--out")
    s.set_defaults(func=cmd_chain)

    s = sub.add_parser("render", help="draw a configuration")
    s.add_argument("config")
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_render)

    s = sub.add_parser("gaps", help="finite-radius gap scan of a realization")
    s.add_argument("config")
    s.add_argument("--radius", type=int, default=4)
    s.set_defaults(func=cmd_gaps)

    s = sub.add_parser("experiment", help="run an experiment: singleton, stability, basepoint")
    s.add_argument("name", choices=["singleton", "stability", "basepoint"])
    s.add_argument("--config")
    s.add_argument("--seed", type=int, default=1)
    s.add_argument("--trials", type=int, default=20)
    s.add_argument("--radius", type=int, default=3)
    s.add_argument("--margin")
    s.add_argument("--path", help="comma-separated basepoint turn coordinates")
    s.add_argument("--out")
    s.add_argument("--figure")
    s.set_defaults(func=cmd_experiment)

    s = sub.add_parser("report", help="tables, rotation numbers and figures for the presets")
    s.add_argument("--out", required=True)
    s.add_argument("--radius", type=int, default=2)
    s.add_argument("--seed", type=int, default=7)
    s.add_argument("--trials", type=int, default=20)
    s.set_defaults(func=cmd_report)
    return p


def main(argv: list[str] | None = None) -> int:
    try:
        args = build_parser().parse_args(argv)
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (DomainError, ConfigError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
