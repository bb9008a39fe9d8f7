"""``gshift`` command line: check a subshift, build a g-function, or simulate it.

Exit status is 0 on success, 1 when a verification fails and 2 for usage,
parse or empty-subshift errors.  Every report is a deterministic function of
the command line, so outputs can be compared byte for byte.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass
from fractions import Fraction
from itertools import product

from .core import Point, enumerate_points, format_word
from .exitset import (
    Closed,
    Disjoint,
    Meets,
    NotClosed,
    UndeterminedDepth,
    build_table,
    closure_meets_k,
    exit_set_closed,
    search_alphabet,
    tracker,
)
from .gfun import (
    BaselineG,
    GCertificate,
    Holds,
    NotApplicable,
    Report,
    Weights,
    build_krieger,
    build_weighted,
    certify_property_g,
    sample_points,
    verify_invariance,
    verify_strict,
    verify_strictly_positive,
    verify_sum_one,
)
from .sim import RNG_ALGORITHM, empirical_invariance
from .subshift import (
    DisjointFamilies,
    EmptySubshift,
    EvenShift,
    FiniteForbidden,
    SpecParseError,
    SymbolRule,
    load_spec,
    suffix_language_sizes,
)

OK, FAILED, USAGE = 0, 1, 2


class NoCertificate(RuntimeError):
    pass


@dataclass(frozen=True)
class RunConfig:
    spec_path: str
    command: str
    variant: str = "weighted"
    depth: int = 16
    m_max: int = 8
    eps: Fraction = Fraction(1, 1 << 20)
    horizon: int = 32
    steps: int = 10_000
    runs: int = 10
    seed: int = 0
    start: str | None = None
    out: str | None = None

    def __post_init__(self):
        if self.depth < self.m_max + 1:
            raise ValueError(f"--depth ({self.depth}) must be at least --mmax + 1 ({self.m_max + 1})")
        if self.m_max < 2:
            raise ValueError("--mmax must be at least 2")
        if self.eps <= 0:
            raise ValueError("--eps must be positive")
        if self.horizon < 0 or self.steps < 0 or self.runs < 1:
            raise ValueError("--horizon and --steps must be non-negative, --runs positive")


def parse_eps(text: str) -> Fraction:
    """``p/q`` where either side may be written ``b^e``, e.g. ``1/2^20``."""

    def num(s: str) -> int:
        if "^" in s:
            b, e = s.split("^", 1)
            return int(b) ** int(e)
        return int(s)

    try:
        if "/" in text:
            p, q = text.split("/", 1)
            return Fraction(num(p), num(q))
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"bad fraction {text!r}") from None


def describe_spec(spec) -> str:
    if isinstance(spec, FiniteForbidden):
        words = " ".join(sorted(format_word(w) for w in spec.forbidden)) or "(none)"
        return f"finite alphabet {spec.n}, forbidden {words}"
    if isinstance(spec, EvenShift):
        return "even shift on alphabet 2"
    if isinstance(spec, SymbolRule):
        allowed = " ".join(str(a) for a in sorted(spec.allowed))
        text = f"countable alphabet, allow {allowed}"
        if spec.overlay:
            text += ", forbidden " + " ".join(sorted(format_word(w) for w in spec.overlay))
        return text
    if isinstance(spec, DisjointFamilies):
        return "countable alphabet, families " + " ".join(format_word(g) for g in spec.generators)
    return repr(spec)


def show_point(x: Point) -> str:
    """``…0001`` style: enough period copies to fill three symbols, then the transient."""
    reps = -(-3 // len(x.period))
    return "…" + format_word(x.period * reps) + format_word(x.transient)


def _emit(lines: list[str]) -> None:
    sys.stdout.write("".join(ln + "\n" for ln in lines))


def _write(path: str | None, text: str) -> None:
    if path is not None:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)


# ---------------------------------------------------------------------------
# check
# ---------------------------------------------------------------------------


def _language_line(spec, cfg: RunConfig) -> str:
    if isinstance(spec, DisjointFamilies):
        # enumerated explicitly, so keep the counting window small
        n, h = min(cfg.depth, 6), min(cfg.horizon, 3)
    else:
        n, h = cfg.depth, cfg.horizon
    sizes = suffix_language_sizes(spec, n, h if spec.countable else None)
    scope = f" (symbols <= {h})" if spec.countable else ""
    return f"language sizes n=1..{n}{scope}: " + " ".join(str(s) for s in sizes)


def cmd_check(cfg: RunConfig, spec, weights) -> int:
    table = build_table(spec, cfg.depth, cfg.horizon)
    lines = [f"spec: {describe_spec(spec)}", f"weights: {weights.describe()}", _language_line(spec, cfg)]
    if not isinstance(spec, DisjointFamilies):
        for m in range(1, min(4, cfg.depth) + 1):
            ws = sorted(table.words(m)) if not spec.countable else sorted(table._reduced(m))
            shown = " ".join(format_word(w) for w in ws[:12]) + (" …" if len(ws) > 12 else "")
            label = "witnesses" if not spec.countable else "witness labels"
            lines.append(f"{label} m={m} [{table.status(m)}] {len(ws)}: {shown}".rstrip())
    closed = exit_set_closed(spec, table)
    meets = closure_meets_k(spec, table)
    if isinstance(meets, Disjoint):
        if meets.depth is None:
            detail = "structural, gap 0 not attained"
        else:
            detail = f"gap {meets.bound}, exact distance {meets.gap}"
        lines.append(f"closed: yes, disjoint: yes ({detail})")
    elif isinstance(meets, Meets):
        lines.append(f"closed: no (witness {show_point(closed.witness)}), meets K: yes")
    else:
        lines.append(f"closed: unknown, meets K: unknown (no decision by depth {meets.depth})")
    _emit(lines)
    if cfg.out is not None:
        _write(cfg.out, table.dump())
    return OK


# ---------------------------------------------------------------------------
# build
# ---------------------------------------------------------------------------


def make_g(cfg: RunConfig, spec, weights, table):
    """The g-function named by ``cfg.variant`` and, when one is needed, its certificate."""
    if cfg.variant == "baseline":
        return BaselineG(spec, weights), None
    if cfg.variant == "krieger":
        if spec.alphabet_size is None:
            raise ValueError("the krieger variant needs a finite alphabet")
        return build_krieger(spec, table), None
    cert = certify_property_g(spec, table, cfg.m_max, cfg.horizon)
    if not isinstance(cert, GCertificate):
        raise NoCertificate(f"no property-G certificate up to m={cfg.m_max}: {cert}")
    return build_weighted(spec, cert, weights), cert


def _g_table(g, spec, eps: Fraction) -> list[str]:
    """Value of ``g`` on a representative of every two-symbol suffix."""
    lines = []
    alphabet = search_alphabet(spec)
    reps = {}
    for x in enumerate_points(alphabet, 6):
        w = x.suffix(2)
        if w not in reps and spec.contains(x.shift()):
            reps[w] = x
    for w in product(alphabet, repeat=2):
        x = reps.get(w)
        if x is None:
            continue
        lines.append(f"g\t{format_word(w)}\t{show_point(x)}\t{g.eval(x, eps)}")
    return lines


def cmd_build(cfg: RunConfig, spec, weights) -> int:
    table = build_table(spec, cfg.depth, cfg.horizon)
    try:
        g, cert = make_g(cfg, spec, weights, table)
    except NoCertificate as e:
        print(f"error: {e}", file=sys.stderr)
        return FAILED
    lines = [f"spec: {describe_spec(spec)}", f"variant: {g.kind}"]
    if cert is not None:
        lines.append(f"certificate: {cert.describe()}")
    if g.kind == "weighted":
        lines.append(f"weights: {g.weights.describe()}")
    if g.kind == "krieger":
        lines.extend(_g_table(g, spec, cfg.eps))

    report = Report()
    for x in sample_points(spec, 50):
        try:
            report.extend(verify_sum_one(g, x, cfg.eps))
        except UndeterminedDepth:
            report.add("sum_one", x, None, None, False)
    report.extend(verify_invariance(g, spec, table))
    report.extend(verify_strict(g, spec, table))
    lines.extend(c.tsv() for c in report.checks if not c.ok)
    n_fail = sum(not c.ok for c in report.checks)
    lines.append(f"checks: {len(report.checks) - n_fail} passed, {n_fail} failed")

    verdict = verify_strictly_positive(g, spec, table)
    if isinstance(verdict, Holds):
        gap = f"gap {verdict.gap}" if verdict.gap > 0 else "K misses the exit closure, no uniform gap"
        lines.append(f"strictly positive: Holds ({gap})")
    elif isinstance(verdict, NotApplicable):
        lines.append(f"strictly positive: NotApplicable (witness {show_point(verdict.witness)} in K)")
    else:
        lines.append(f"strictly positive: {verdict}")
    _emit(lines)
    _write(cfg.out, report.tsv())
    return OK if report.passed else FAILED


# ---------------------------------------------------------------------------
# simulate
# ---------------------------------------------------------------------------


def _start_point(cfg: RunConfig, spec) -> Point:
    if cfg.start is not None:
        x = Point.parse(cfg.start)
        if not spec.contains(x):
            raise ValueError(f"start point {show_point(x)} is not in K")
        return x
    for x in enumerate_points(search_alphabet(spec), 6):
        if spec.contains(x):
            return x
    raise ValueError("no short periodic point of K to start from; pass --start")


def cmd_simulate(cfg: RunConfig, spec, weights) -> int:
    table = build_table(spec, cfg.depth, cfg.horizon)
    try:
        g, _ = make_g(cfg, spec, weights, table)
    except NoCertificate as e:
        print(f"error: {e}", file=sys.stderr)
        return FAILED
    x0 = _start_point(cfg, spec)
    kept = []

    def keep(i, traj):
        if i == 0:
            kept.append(traj)

    report = empirical_invariance(g, spec, x0, cfg.steps, cfg.runs, cfg.seed, keep=keep)
    lines = [
        f"spec: {describe_spec(spec)}",
        f"variant: {g.kind}",
        f"start: {show_point(x0)}",
        f"rng: {RNG_ALGORITHM} seed={cfg.seed}",
        report.summary(),
    ]
    if kept and cfg.steps:
        counts = {}
        for a in kept[0].symbols:
            counts[a] = counts.get(a, 0) + 1
        lines.append("run 0 symbol counts: " + " ".join(f"{a}:{c}" for a, c in sorted(counts.items())))
    _emit(lines)
    if kept:
        _write(cfg.out, kept[0].dump())
    return OK if report.invariant else FAILED


# ---------------------------------------------------------------------------
# entry point
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="gshift", description=__doc__.splitlines()[0])
    p.add_argument("command", choices=["check", "build", "simulate"])
    p.add_argument("--spec", required=True, help="subshift spec file")
    p.add_argument("--variant", choices=["krieger", "weighted", "baseline"], default="weighted",
                   help="g construction (baseline is the weights alone; a negative control)")
    p.add_argument("--depth", type=int, default=16, help="witness probe depth N (default 16)")
    p.add_argument("--mmax", type=int, default=8, help="largest certificate depth (default 8)")
    p.add_argument("--eps", type=parse_eps, default=Fraction(1, 1 << 20),
                   help="enclosure width for countable sums, p/q (default 1/2^20)")
    p.add_argument("--horizon", type=int, default=32, help="symbol horizon for countable alphabets (default 32)")
    p.add_argument("--steps", type=int, default=10_000, help="steps per simulated run (default 10000)")
    p.add_argument("--runs", type=int, default=10, help="number of simulated runs (default 10)")
    p.add_argument("--seed", type=int, default=0, help="master seed (default 0)")
    p.add_argument("--start", default=None, help="initial point, e.g. 0 or 0|1 (default: first short point of K)")
    p.add_argument("--out", default=None, help="file for the witness table, check TSV or trajectory")
    return p


COMMANDS = {"check": cmd_check, "build": cmd_build, "simulate": cmd_simulate}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = RunConfig(args.spec, args.command, args.variant, args.depth, args.mmax, args.eps,
                        args.horizon, args.steps, args.runs, args.seed, args.start, args.out)
        if cfg.variant == "baseline" and cfg.command != "simulate":
            raise ValueError("the baseline variant is only for simulate")
        sf = load_spec(cfg.spec_path)
        weights = Weights.for_spec(sf.spec, sf.weights)
        return COMMANDS[cfg.command](cfg, sf.spec, weights)
    except (SpecParseError, EmptySubshift, OSError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return USAGE


if __name__ == "__main__":
    sys.exit(main())
