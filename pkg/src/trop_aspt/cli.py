"""``trop-aspt`` command-line driver.

Exit codes: 0 success, 1 verification failure, 2 capacity or usage error,
3 I/O failure.  Reports go to stdout; timings go to stderr so that stdout is
a deterministic function of the arguments.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Sequence

from . import checks, cluster, fan as fanmod, polygon, trees
from .errors import CapacityError, InputError, IntegrityError, TropAsptError

EXIT_OK, EXIT_VERIFY, EXIT_CAPACITY, EXIT_IO = 0, 1, 2, 3


@dataclass(frozen=True)
class RunConfig:
    n: int
    seed: int
    mode: str
    output_path: Path | None
    format: str
    subfan: str | None = None
    input: str | None = None
    threads: int = 1

    def __post_init__(self) -> None:
        polygon.check_n(self.n)


def threads_from_env() -> int:
    raw = os.environ.get("TROP_ASPT_THREADS", "1")
    try:
        value = int(raw)
    except ValueError:
        raise InputError(f"TROP_ASPT_THREADS must be a positive integer, got {raw!r}") from None
    if value < 1:
        raise InputError(f"TROP_ASPT_THREADS must be a positive integer, got {raw!r}")
    return value


def _emit(cfg: RunConfig, text: str) -> None:
    if cfg.output_path is None:
        sys.stdout.write(text)
    else:
        cfg.output_path.write_text(text)


def _json(data) -> str:
    return json.dumps(data, indent=2) + "\n"


# ------------------------------------------------------------------ commands


def cmd_enumerate(cfg: RunConfig) -> int:
    by_dim: dict[int, int] = {}
    for a in trees.enumerate_aspts(cfg.n):
        by_dim[a.k] = by_dim.get(a.k, 0) + 1
    by_dim = dict(sorted(by_dim.items()))
    n_asdo = len(polygon.enumerate_orderings(cfg.n, "ASDO"))
    n_csdo = len(polygon.enumerate_orderings(cfg.n, "CSDO"))
    total = sum(by_dim.values())
    if cfg.format == "json":
        _emit(cfg, _json({
            "n": cfg.n,
            "aspts": {"total": total, "by_dim": {str(d): c for d, c in by_dim.items()}},
            "orderings": {"ASDO": n_asdo, "CSDO": n_csdo},
        }))
    else:
        dims = ", ".join(f"dim{d}:{c}" for d, c in by_dim.items())
        _emit(cfg, f"ASPTs: {total} ({dims}); ASDO:{n_asdo} CSDO:{n_csdo}\n")
    return EXIT_OK


def cmd_verify(cfg: RunConfig) -> int:
    polygon.check_n(cfg.n, 4)
    results = checks.run_all(cfg.n, cfg.seed)
    for r in results:
        print(f"[{r.seconds:8.2f}s] {r.name}", file=sys.stderr)
    ok = all(r.passed for r in results)
    if cfg.format == "json":
        _emit(cfg, _json({"n": cfg.n, "seed": cfg.seed, "passed": ok, "checks": [r.as_json() for r in results]}))
    else:
        lines = []
        for r in results:
            tag = "INFO" if r.reported_only else ("PASS" if r.passed else "FAIL")
            lines.append(f"{tag} {r.name}: {r.detail}")
            if not r.passed:
                lines.append("     certificate: " + json.dumps(r.certificate, sort_keys=True))
        lines.append(f"{'all checks passed' if ok else 'verification FAILED'}")
        _emit(cfg, "\n".join(lines) + "\n")
    return EXIT_OK if ok else EXIT_VERIFY


def cmd_export(cfg: RunConfig) -> int:
    fan = fanmod.build_fan(cfg.n)
    name = "omega"
    if cfg.subfan:
        lam = polygon.DihedralOrdering.parse(cfg.subfan)
        if lam.n != cfg.n:
            raise InputError(f"ordering {cfg.subfan!r} is not for n={cfg.n}")
        fan = fanmod.subfan_for_ordering(lam, fan)
        name = "omega_" + polygon.classify(lam).lower()
    if cfg.format == "dot":
        _emit(cfg, fan.to_dot(name))
    elif cfg.format == "json":
        _emit(cfg, _json(fan.as_json()))
    else:
        census = ", ".join(f"dim{d}:{c}" for d, c in fan.census().items())
        g = fan.ray_graph()
        _emit(cfg, f"cones: {len(fan.cones)} ({census}); facets: {len(fan.facets)}; "
                   f"ray graph: {g.number_of_nodes()} nodes, {g.number_of_edges()} edges\n")
    return EXIT_OK


def cmd_signs(cfg: RunConfig) -> int:
    polygon.check_n(cfg.n, 4)
    fan = fanmod.build_fan(cfg.n)
    rels = cluster.discover_relations(cfg.n, cfg.seed)
    patterns = cluster.sample_sign_patterns(cfg.n, 10**6, cfg.seed, saturate=True)
    cl = cluster.classify_signed(patterns, fan, rels)
    if cfg.format == "json":
        _emit(cfg, _json({
            "n": cfg.n,
            "seed": cfg.seed,
            "relations": [r.as_json() for r in rels],
            "patterns": [p.as_json() for p in patterns],
            "classification": cl.as_json(),
        }))
    else:
        counts = cl.counts()
        lines = [
            f"quadrics: {len(rels)}",
            f"occurring sign patterns: {len(patterns)}",
            f"signed tropicalizations: {counts['subfans']} ({counts['associahedral']} associahedral, "
            f"{counts['cyclohedral']} cyclohedral, {counts['other']} other)",
            f"fiber sizes: {sorted(set(cl.fiber_sizes()))}",
        ]
        for item in cl.as_json()["subfans"]:
            lines.append(f"  {item['ordering']}  {item['shape']}  cones={item['cones']}  patterns={len(item['patterns'])}")
        _emit(cfg, "\n".join(lines) + "\n")
    return EXIT_OK


def _read_vector(cfg: RunConfig) -> tuple[Fraction, ...]:
    if cfg.input is None:
        raise InputError("member needs --input (a JSON list of n^2 rationals, or - for stdin)")
    text = sys.stdin.read() if cfg.input == "-" else Path(cfg.input).read_text()
    try:
        data = json.loads(text)
        vec = tuple(Fraction(str(x)) for x in data)
    except (ValueError, TypeError, ZeroDivisionError) as exc:
        raise InputError(f"could not parse the input vector: {exc}") from None
    if len(vec) != cfg.n * cfg.n:
        raise InputError(f"expected {cfg.n * cfg.n} coordinates, got {len(vec)}")
    return vec


def cmd_member(cfg: RunConfig) -> int:
    w = _read_vector(cfg)
    rec = fanmod.member_reconstruct(w, fanmod.build_fan(cfg.n))
    if rec is None:
        out = {"member": False}
    else:
        out = {
            "member": True,
            "tree": rec.aspt.tree.as_json(),
            "orbit_weights": [str(x) for x in rec.weighting.orbit_weights],
            "boundary": rec.boundary,
        }
    if cfg.format == "json":
        _emit(cfg, _json(out))
    elif rec is None:
        _emit(cfg, "not in the fan\n")
    else:
        _emit(cfg, f"tree {rec.aspt.code.decode()}\nweights {' '.join(out['orbit_weights'])}\n"
                   f"{'boundary' if rec.boundary else 'interior'} point\n")
    return EXIT_OK


COMMANDS = {
    "enumerate": cmd_enumerate,
    "verify": cmd_verify,
    "export": cmd_export,
    "signs": cmd_signs,
    "member": cmd_member,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="trop-aspt", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="mode", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("-n", type=int, required=True, help="half the number of polygon sides")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--format", choices=("text", "json", "dot"), default="text")
        p.add_argument("--output", type=Path, default=None, help="write here instead of stdout")
        if name == "export":
            p.add_argument("--subfan", help='ASDO or CSDO, e.g. "1,2,3,1~,2~,3~"')
            p.add_argument("--dot", action="store_true", help="shorthand for --format dot")
        if name == "member":
            p.add_argument("--input", help="JSON vector in Q^D, or - for stdin")
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    start = time.perf_counter()
    try:
        cfg = RunConfig(
            n=args.n,
            seed=args.seed,
            mode=args.mode,
            output_path=args.output,
            format="dot" if getattr(args, "dot", False) else args.format,
            subfan=getattr(args, "subfan", None),
            input=getattr(args, "input", None),
            threads=threads_from_env(),
        )
        code = COMMANDS[args.mode](cfg)
    except CapacityError as exc:
        print(f"capacity error: {exc}", file=sys.stderr)
        return EXIT_CAPACITY
    except IntegrityError as exc:
        print(f"integrity error: {exc}", file=sys.stderr)
        return EXIT_VERIFY
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (InputError, TropAsptError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CAPACITY
    print(f"[{time.perf_counter() - start:.2f}s total]", file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
