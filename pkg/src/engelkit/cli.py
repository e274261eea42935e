"""Command-line entry point: ``engelkit <verb> <subverb> [options]``.

Exit codes: 0 success, 1 a check came out false, 2 usage or input error,
3 budget exhausted, 4 protocol failure.
"""

from __future__ import annotations

import argparse
import hashlib
import random
import sys
import time
from fractions import Fraction

from engelkit import algorithms as alg
from engelkit.analysis import (
    LawSpec,
    check_law,
    classify_engel_elements,
    degree_ball_estimate,
    degree_of_nilpotency,
    exponent,
    nilpotency_class,
)
from engelkit.catalog import (
    CATALOG_ENV,
    CATALOG_NAMES,
    defining_generators,
    random_automorphism,
    resolve,
)
from engelkit.errors import BudgetExhausted, CollectionBudgetExceeded, EngelKitError, ProtocolError
from engelkit.pc import (
    INFINITY,
    FreeWord,
    collect,
    commutator,
    engel_commutator,
    growth_curve,
    random_element,
)
from engelkit.protocols.lhn import lhn_sample
from engelkit.session import SessionConfig, session_run
from engelkit.wire import emit_presentation

EXIT_OK, EXIT_FALSE, EXIT_USAGE, EXIT_BUDGET, EXIT_PROTOCOL = 0, 1, 2, 3, 4


class UsageError(Exception):
    pass


def emit(record: dict, fmt: str, out=None) -> None:
    out = out or sys.stdout
    if fmt == "kv":
        for k, v in record.items():
            out.write(f"{k}={_fmt(v)}\n")
    else:
        width = max((len(k) for k in record), default=0)
        for k, v in record.items():
            out.write(f"{k.ljust(width)}  {_fmt(v)}\n")


def _fmt(v) -> str:
    if isinstance(v, bool):
        return str(v).lower()
    if v == INFINITY:
        return "inf"
    if isinstance(v, (list, tuple)):
        return ",".join(_fmt(x) for x in v)
    return str(v)


def _group(args):
    return resolve(args.name, args.catalog_dir)


def _elem(p, text: str):
    try:
        return collect(p, FreeWord.parse(text, p.ngens))
    except ValueError as exc:
        raise UsageError(f"bad element {text!r}: {exc}") from None


def _need_seed(args):
    if args.seed is None:
        raise UsageError(f"{args.verb} {getattr(args, 'sub', '') or ''}".strip() + " needs --seed")
    return random.Random(args.seed)


# -- group --------------------------------------------------------------------


def cmd_group(args) -> int:
    p = _group(args)
    if args.sub == "export":
        text = emit_presentation(p)
        if args.out:
            with open(args.out, "w", encoding="utf-8") as fh:
                fh.write(text)
            emit({"label": p.label, "written": args.out}, args.format)
        else:
            sys.stdout.write(text)
        return EXIT_OK
    rec = {"label": p.label, "ngens": p.ngens, "orders": [r or 0 for r in p.relative_orders],
           "order": p.order()}
    if args.sub == "build":
        if args.out:
            with open(args.out, "w", encoding="utf-8") as fh:
                fh.write(emit_presentation(p))
            rec["written"] = args.out
        emit(rec, args.format)
        return EXIT_OK
    # info
    if p.is_finite and p.order() <= args.enumerate_limit:
        rec["exponent"] = exponent(p)
        cls = nilpotency_class(p)
        rec["class"] = cls if cls is not None else "not nilpotent"
    elif p.weights is not None and getattr(p, "relatively_free", False):
        rec["class"] = max(p.weights)
    rec["defining_generators"] = [f"g{i + 1}" for i in defining_generators(p)]
    if p.weights is not None:
        rec["weights"] = list(p.weights)
    variety = getattr(p, "variety", "")
    if variety:
        rec["variety"] = variety
    if args.growth is not None:
        gens = [p.gen(i) for i in defining_generators(p)]
        sizes, _ = growth_curve(p, gens, args.growth)
        rec["growth"] = sizes
        if args.plot:
            from engelkit.report import plot_growth

            rec["plot"] = plot_growth(sizes, args.plot, p.label)
    emit(rec, args.format)
    return EXIT_OK


# -- calc ---------------------------------------------------------------------


def cmd_calc(args) -> int:
    p = _group(args)
    if args.sub == "mul":
        res = _elem(p, args.x) * _elem(p, args.y)
    elif args.sub == "pow":
        res = _elem(p, args.x) ** args.k
    elif args.sub == "comm":
        res = commutator([_elem(p, t) for t in args.elems])
    else:
        res = engel_commutator(_elem(p, args.x), _elem(p, args.y), args.n)
    emit({"result": str(res), "identity": res.is_identity()}, args.format)
    return EXIT_OK


# -- engel --------------------------------------------------------------------


def cmd_engel(args) -> int:
    p = _group(args)
    if args.sub == "check-law":
        law = LawSpec(args.law, n=args.n, r=args.r, m=args.m)
        rng = _need_seed(args) if args.mode == "sampled" else None
        v = check_law(p, law, args.mode, samples=args.samples, rng=rng)
        rec = {"group": p.label, "law": str(law), "mode": args.mode, "holds": v.holds, "checked": v.checked}
        if v.witness:
            rec["witness"] = [str(w) for w in v.witness]
        if v.note:
            rec["note"] = v.note
        emit(rec, args.format)
        return EXIT_OK if v.holds else EXIT_FALSE
    cls = classify_engel_elements(p, args.side, args.n_max)
    counts: dict = {}
    for k in cls.engel.values():
        counts[k] = counts.get(k, 0) + 1
    rec = {"group": p.label, "side": args.side, "n_max": args.n_max}
    for k in sorted(counts):
        rec[f"count.n{k}"] = counts[k]
    rec["undetermined"] = len(cls.undetermined)
    if cls.undetermined:
        rec["note"] = cls.note
    if args.plot:
        from engelkit.report import plot_engel_profile

        rec["plot"] = plot_engel_profile(counts, len(cls.undetermined), args.plot, p.label, args.side)
    emit(rec, args.format)
    return EXIT_OK


# -- degree -------------------------------------------------------------------


def cmd_degree(args) -> int:
    p = _group(args)
    rec = {"group": p.label, "n": args.n, "mode": args.mode}
    if args.mode == "exact":
        rep = degree_of_nilpotency(p, args.n, "exact")
        rec["degree"] = str(rep.value)
        rec["tuples"] = rep.sample_count
    elif args.mode == "montecarlo":
        rng = _need_seed(args)
        rep = degree_of_nilpotency(p, args.n, "montecarlo", samples=args.samples,
                                   confidence=args.confidence, rng=rng)
        lo, hi = rep.interval
        rec.update({"estimate": f"{rep.value:.6f}", "samples": rep.sample_count,
                    "hits": rep.satisfied_count, "confidence": args.confidence,
                    "interval": f"[{lo:.6f}, {hi:.6f}]"})
    else:
        rng = random.Random(args.seed) if args.seed is not None else None
        gens = [p.gen(i) for i in defining_generators(p)]
        rows = degree_ball_estimate(p, gens, args.n, args.radius, samples=args.samples // 5 or 1, rng=rng)
        for m, size, ratio, exact in rows:
            val = str(ratio) if isinstance(ratio, Fraction) else f"{ratio:.6f}"
            rec[f"radius{m}"] = f"size={size} ratio={val} {'exact' if exact else 'sampled'}"
        if args.plot:
            from engelkit.report import plot_degree_curve

            rec["plot"] = plot_degree_curve(rows, args.plot, p.label, args.n)
    emit(rec, args.format)
    return EXIT_OK


# -- solve --------------------------------------------------------------------


def cmd_solve(args) -> int:
    p = _group(args)
    budget = alg.SearchBudget(max_steps=args.max_steps, max_memory_items=args.max_memory)
    rec: dict = {"group": p.label, "problem": args.sub}
    if args.sub == "wp":
        w = FreeWord.parse(args.word, p.ngens)
        rec["trivial"] = alg.word_problem(p, w)
        rec["normal_form"] = str(collect(p, w))
    elif args.sub == "power":
        n = alg.power_decision(_elem(p, args.x), _elem(p, args.y), budget)
        rec["exponent"] = "none" if n is None else n
    elif args.sub == "dlp":
        if args.cyclic:
            n = alg.dlp_cyclic(_elem(p, args.x), _elem(p, args.y), budget)
            rec["exponent"] = "none" if n is None else n
        else:
            rec["exponents"] = list(alg.generalized_dlp(p, p.gens(), _elem(p, args.y)))
    elif args.sub == "root":
        a = _elem(p, args.a)
        res = alg.nth_root(a, args.n, budget, "all" if args.all else "any")
        if args.all:
            rec["count"] = len(res)
            rec["roots"] = [str(r) for r in res]
        else:
            rec["root"] = "none" if res is None else str(res)
    elif args.sub == "conj":
        pairs = []
        for item in args.pairs:
            left, sep, right = item.partition(":")
            if not sep:
                raise UsageError(f"pair {item!r} must look like 'a:b'")
            pairs.append((_elem(p, left), _elem(p, right)))
        res = alg.conjugacy_search(pairs, args.variant, budget)
        if res is None:
            rec["conjugator"] = "none"
        elif args.variant == "power":
            rec["n"], rec["conjugator"] = res[0], str(res[1])
        else:
            rec["conjugator"] = str(res)
    elif args.sub == "geodesic":
        gens = [p.gen(i) for i in defining_generators(p)]
        res = alg.geodesic_length(p, gens, _elem(p, args.g), budget)
        if res is None:
            rec["length"] = "unreachable"
        else:
            rec["length"], word = res
            rec["witness"] = str(word)
    else:
        rec["member"] = alg.subgroup_membership(p, [_elem(p, h) for h in args.h], _elem(p, args.g), budget)
    emit(rec, args.format)
    return EXIT_OK


# -- proto --------------------------------------------------------------------

_PROTO_NAMES = {"mkep": "mkep", "eke2": "eke2", "sig4": "sig4", "sss1": "sss1", "sss2": "sss2", "sdp": "sdpkex"}


def cmd_proto(args) -> int:
    _need_seed(args)
    if args.sub == "lhn":
        return _cmd_lhn(args)
    params: dict = {}
    if args.sub in ("sss1", "sss2"):
        params["n"] = args.users
        if args.groups:
            params["groups"] = args.groups
        if args.k is not None:
            params["k"] = args.k
        if args.sub == "sss2":
            params["t"] = args.t
            params["prime"] = args.prime
    config = SessionConfig(
        _PROTO_NAMES[args.sub],
        group=args.name or "",
        seed=args.seed,
        parties=args.users if args.sub == "mkep" else 2,
        params=params,
        catalog_dir=args.catalog_dir,
    )
    outcome = session_run(config, args.transport, args.address)
    rec = outcome.to_kv()
    if args.transcript:
        with open(args.transcript, "wb") as fh:
            fh.write(outcome.transcript)
        rec["transcript_file"] = args.transcript
    emit(rec, args.format)
    return EXIT_OK if outcome.ok else EXIT_PROTOCOL


def _parse_dist(text: str):
    if text in ("uniform", "identity"):
        return text
    if text.startswith("ball:"):
        return ("ball", int(text.split(":", 1)[1]))
    raise UsageError(f"distribution {text!r} must be uniform, identity or ball:<radius>")


def _cmd_lhn(args) -> int:
    p = resolve(args.name or "burnside3:2", args.catalog_dir)
    rng = random.Random(args.seed)
    phi = random_automorphism(p, rng)
    samples = lhn_sample(phi, _parse_dist(args.alpha), _parse_dist(args.beta), args.count, rng)
    rec = {"group": p.label, "phi": [str(img) for img in phi.images], "count": len(samples)}
    for j, (g, h) in enumerate(samples[: args.show]):
        rec[f"sample{j}"] = f"{g} | {h}"
    digest = hashlib.sha256()
    for g, h in samples:
        digest.update(f"{g}|{h};".encode())
    rec["samples_sha256"] = digest.hexdigest()
    emit(rec, args.format)
    return EXIT_OK


# -- bench --------------------------------------------------------------------


def cmd_bench(args) -> int:
    rng = _need_seed(args)
    p = _group(args)
    if p.is_finite:
        xs = [random_element(p, rng) for _ in range(args.ops + 1)]
    else:
        xs = [p.element([rng.randint(-50, 50) for _ in range(p.ngens)]) for _ in range(args.ops + 1)]
    timings = []
    checksum = hashlib.sha256()

    def run(name, fn):
        t0 = time.perf_counter()
        for k in range(args.ops):
            checksum.update(str(fn(k)).encode())
        timings.append((name, (time.perf_counter() - t0) * 1e6 / args.ops))

    run("mul", lambda k: xs[k] * xs[k + 1])
    run("inv", lambda k: ~xs[k])
    run("pow", lambda k: xs[k] ** 1000003)
    run("comm", lambda k: commutator([xs[k], xs[k + 1]]))
    emit({"group": p.label, "ops": args.ops, "checksum": checksum.hexdigest()}, args.format)
    # wall-clock numbers go to stderr so stdout stays reproducible
    for name, us in timings:
        sys.stderr.write(f"{name}: {us:.1f} us/op\n")
    if args.plot:
        from engelkit.report import plot_bench

        sys.stderr.write(f"plot: {plot_bench(timings, args.plot, p.label)}\n")
    return EXIT_OK


# -- parser -------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("text", "kv"), default="text")
    common.add_argument("--seed", type=int)
    common.add_argument("--catalog-dir", default=None,
                        help=f"directory of presentation files (default: ${CATALOG_ENV})")

    parser = argparse.ArgumentParser(prog="engelkit", description="Engel groups, pc collection and group-based protocols.")
    verbs = parser.add_subparsers(dest="verb", required=True)

    def named(sp, name, **kw):
        s = sp.add_parser(name, parents=[common], **kw)
        s.add_argument("--name", required=True,
                       help=f"catalog name, e.g. {', '.join(CATALOG_NAMES[:4])}")
        return s

    g = verbs.add_parser("group").add_subparsers(dest="sub", required=True)
    s = named(g, "build")
    s.add_argument("--out")
    s = named(g, "info")
    s.add_argument("--growth", type=int, help="also report ball sizes up to this radius")
    s.add_argument("--plot", help="write the growth curve figure here")
    s.add_argument("--enumerate-limit", type=int, default=100_000)
    s = named(g, "export")
    s.add_argument("--out")

    c = verbs.add_parser("calc").add_subparsers(dest="sub", required=True)
    s = named(c, "mul")
    s.add_argument("--x", required=True)
    s.add_argument("--y", required=True)
    s = named(c, "pow")
    s.add_argument("--x", required=True)
    s.add_argument("--k", type=int, required=True)
    s = named(c, "comm")
    s.add_argument("elems", nargs="+")
    s = named(c, "engel")
    s.add_argument("--x", required=True)
    s.add_argument("--y", required=True)
    s.add_argument("--n", type=int, required=True)

    e = verbs.add_parser("engel").add_subparsers(dest="sub", required=True)
    s = named(e, "check-law")
    s.add_argument("--law", choices=LawSpec.KINDS, required=True)
    s.add_argument("--n", type=int, default=0)
    s.add_argument("--r", type=int, default=0)
    s.add_argument("--m", type=int, default=0)
    s.add_argument("--mode", choices=("exhaustive", "sampled"), default="exhaustive")
    s.add_argument("--samples", type=int, default=10_000)
    s = named(e, "classify")
    s.add_argument("--side", choices=("left", "right"), default="right")
    s.add_argument("--n-max", type=int, default=10)
    s.add_argument("--plot")

    s = verbs.add_parser("degree", parents=[common])
    s.add_argument("--name", required=True)
    s.add_argument("--n", type=int, default=1)
    s.add_argument("--mode", choices=("exact", "montecarlo", "ball"), default="exact")
    s.add_argument("--samples", type=int, default=100_000)
    s.add_argument("--confidence", type=float, default=0.95)
    s.add_argument("--radius", type=int, default=4)
    s.add_argument("--plot")

    sv = verbs.add_parser("solve").add_subparsers(dest="sub", required=True)
    solvers = {}
    for name in ("wp", "power", "dlp", "root", "conj", "geodesic", "member"):
        solvers[name] = s = named(sv, name)
        s.add_argument("--max-steps", type=int, default=10**7)
        s.add_argument("--max-memory", type=int, default=10**6)
    solvers["wp"].add_argument("--word", required=True)
    solvers["power"].add_argument("--x", required=True)
    solvers["power"].add_argument("--y", required=True)
    solvers["dlp"].add_argument("--x", default="1")
    solvers["dlp"].add_argument("--y", required=True)
    solvers["dlp"].add_argument("--cyclic", action="store_true", help="baby-step giant-step in <x>")
    solvers["root"].add_argument("--a", required=True)
    solvers["root"].add_argument("--n", type=int, required=True)
    solvers["root"].add_argument("--all", action="store_true")
    solvers["conj"].add_argument("pairs", nargs="+", help="a:b pairs")
    solvers["conj"].add_argument("--variant", choices=("single", "multiple", "power"), default="single")
    solvers["geodesic"].add_argument("--g", required=True)
    solvers["member"].add_argument("--h", nargs="+", required=True)
    solvers["member"].add_argument("--g", required=True)

    pr = verbs.add_parser("proto").add_subparsers(dest="sub", required=True)
    for name in ("mkep", "eke2", "sig4", "sss1", "sss2", "sdp", "lhn"):
        s = pr.add_parser(name, parents=[common])
        s.add_argument("--name", default=None, help="platform group (protocol default if omitted)")
        if name == "lhn":
            s.add_argument("--count", type=int, default=1000)
            s.add_argument("--alpha", default="uniform")
            s.add_argument("--beta", default="ball:1")
            s.add_argument("--show", type=int, default=5)
            continue
        s.add_argument("--transport", choices=("inprocess", "stream"), default="inprocess")
        s.add_argument("--address", help="host:port for the stream hub (default: ephemeral localhost port)")
        s.add_argument("--transcript", help="write the raw transcript bytes here")
        s.add_argument("--users", type=int, default=3 if name == "mkep" else 5)
        if name in ("sss1", "sss2"):
            s.add_argument("--groups", nargs="+", help="platform groups for the participants")
            s.add_argument("--k", type=int, default=None, help="secret bits (sss1)")
        if name == "sss2":
            s.add_argument("--t", type=int, default=3)
            s.add_argument("--prime", type=int, default=2**31 - 1)

    s = verbs.add_parser("bench", parents=[common])
    s.add_argument("--name", required=True)
    s.add_argument("--ops", type=int, default=1000)
    s.add_argument("--plot")
    return parser


HANDLERS = {
    "group": cmd_group,
    "calc": cmd_calc,
    "engel": cmd_engel,
    "degree": cmd_degree,
    "solve": cmd_solve,
    "proto": cmd_proto,
    "bench": cmd_bench,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return HANDLERS[args.verb](args)
    except UsageError as exc:
        sys.stderr.write(f"engelkit: {exc}\n")
        return EXIT_USAGE
    except (BudgetExhausted, CollectionBudgetExceeded) as exc:
        sys.stderr.write(f"engelkit: budget exhausted: {exc}\n")
        return EXIT_BUDGET
    except ProtocolError as exc:
        sys.stderr.write(f"engelkit: protocol failure: {exc}\n")
        return EXIT_PROTOCOL
    except (EngelKitError, ValueError, KeyError, IndexError, OSError) as exc:
        sys.stderr.write(f"engelkit: {exc}\n")
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
