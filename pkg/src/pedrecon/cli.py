"""Command-line front end: simulate, reconstruct, evaluate, experiment.

Exit codes: 0 on success, 1 on usage errors, 2 when input data is bad.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from pedrecon.evaluate import accuracy, half_sibling_recovery, report_json
from pedrecon.ibd import DEFAULT_MIN_TRACT
from pedrecon.pedigree import PedigreeError, read_pedigree, write_pedigree
from pedrecon.reconstruct import ReconstructConfig, reconstruct
from pedrecon.simulator import (
    PARAMETER_SETS,
    SimParams,
    read_haplotypes,
    read_params,
    read_truth,
    simulate,
    write_haplotypes,
    write_truth,
)
from pedrecon.stats import DEFAULT_RECOMB_RATE, PairingRule

log = logging.getLogger("pedrecon")

EXIT_OK, EXIT_USAGE, EXIT_DATA = 0, 1, 2


class DataError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _add_reconstruct_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--min-tract-bp", type=int, default=DEFAULT_MIN_TRACT,
                   help="shortest IBD tract kept (default %(default)s)")
    p.add_argument("--recomb-rate", type=float, default=DEFAULT_RECOMB_RATE,
                   help="recombination rate per bp per meiosis (default %(default)s)")
    p.add_argument("--pairing-rule", choices=[r.value for r in PairingRule], default="text",
                   help="how the two haplotype pairings are chosen (default %(default)s)")
    p.add_argument("--sibling-only", action="store_true",
                   help="drop the half-sibling and first-half-cousin hypotheses")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="pedrecon", description="Pedigree reconstruction from extant haplotypes.")
    parser.add_argument("-v", "--verbose", action="count", default=0)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("simulate", help="simulate a pedigree and its extant haplotypes")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--config", type=Path, help="key=value parameter file")
    src.add_argument("--set", type=int, choices=sorted(PARAMETER_SETS), dest="param_set",
                     help="built-in parameter set")
    p.add_argument("--out", type=Path, required=True)
    p.add_argument("--seed", type=int, help="overrides the seed in the config")
    p.add_argument("--height", type=int, help="overrides the pedigree height")
    p.add_argument("--genome-length", type=float, help="overrides the genome length (bp)")

    p = sub.add_parser("reconstruct", help="rebuild a pedigree from a haplotype file")
    p.add_argument("haplotypes", type=Path)
    p.add_argument("--out", type=Path, required=True)
    p.add_argument("--max-height", type=int, default=5)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--no-trace", action="store_true", help="skip the JSON trace")
    _add_reconstruct_flags(p)

    p = sub.add_parser("evaluate", help="compare a reconstructed pedigree with the original")
    p.add_argument("reconstructed", type=Path)
    p.add_argument("original", type=Path)
    p.add_argument("--truth", type=Path, help="truth relationship file from simulate")

    p = sub.add_parser("experiment", help="simulate, reconstruct and score many replicates")
    p.add_argument("--sets", type=int, nargs="+", default=[1, 2], choices=sorted(PARAMETER_SETS))
    p.add_argument("--heights", type=int, nargs="+",
                   help="pedigree heights to run (default 2 up to each set's height)")
    p.add_argument("--replicates", type=int, default=10)
    p.add_argument("--seed", type=int, default=0, help="seed of the first replicate")
    p.add_argument("--genome-length", type=float, default=3e9)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--out", type=Path, required=True)
    _add_reconstruct_flags(p)
    return parser


def _reconstruct_config(args, max_height: int, sibling_only: bool | None = None) -> ReconstructConfig:
    return ReconstructConfig(
        max_height=max_height,
        recomb_rate=args.recomb_rate,
        min_tract_length=args.min_tract_bp,
        pairing_rule=PairingRule(args.pairing_rule),
        sibling_only=args.sibling_only if sibling_only is None else sibling_only,
        seed=getattr(args, "seed", 0),
    )


def cmd_simulate(args) -> int:
    if args.config is not None:
        try:
            with open(args.config) as fh:
                params = read_params(fh)
        except OSError as exc:
            raise DataError(f"cannot read config: {exc}") from None
        except ValueError as exc:
            raise DataError(f"{args.config}: {exc}") from None
    else:
        params = SimParams(**PARAMETER_SETS[args.param_set])
    overrides = {}
    if args.seed is not None:
        overrides["seed"] = args.seed
    if args.height is not None:
        overrides["height"] = args.height
    if args.genome_length is not None:
        overrides["genome_length"] = int(args.genome_length)
    try:
        params = replace(params, **overrides)
    except ValueError as exc:
        raise DataError(str(exc)) from None

    sim, extant = simulate(params)
    args.out.mkdir(parents=True, exist_ok=True)
    with open(args.out / "pedigree.tsv", "w") as fh:
        write_pedigree(sim.pedigree, fh)
    with open(args.out / "haplotypes.tsv", "w") as fh:
        write_haplotypes(extant, fh)
    with open(args.out / "truth.tsv", "w") as fh:
        write_truth(sim, fh)
    print(f"simulated {len(sim.pedigree)} individuals over {sim.pedigree.height} generations, "
          f"{len(extant)} extant, {len(sim.sibling_pairs)} sibling pairs, "
          f"{len(sim.half_sibling_pairs)} half-sibling pairs")
    return EXIT_OK


def cmd_reconstruct(args) -> int:
    try:
        with open(args.haplotypes) as fh:
            extant = read_haplotypes(fh)
    except OSError as exc:
        raise DataError(f"cannot read haplotypes: {exc}") from None
    except ValueError as exc:
        raise DataError(f"{args.haplotypes}: {exc}") from None
    if len(extant) < 2:
        raise DataError("need at least two extant individuals")
    try:
        cfg = _reconstruct_config(args, args.max_height)
    except ValueError as exc:
        raise DataError(str(exc)) from None

    t0 = time.perf_counter()
    rec = reconstruct(extant, cfg)
    elapsed = time.perf_counter() - t0
    args.out.mkdir(parents=True, exist_ok=True)
    with open(args.out / "reconstructed.tsv", "w") as fh:
        write_pedigree(rec.pedigree, fh)
    if not args.no_trace:
        with open(args.out / "trace.json", "w") as fh:
            json.dump(rec.trace, fh, indent=1)
            fh.write("\n")
    print(f"reconstructed {len(rec.pedigree)} individuals over {rec.pedigree.height} generations "
          f"in {elapsed:.2f}s")
    return EXIT_OK


def cmd_evaluate(args) -> int:
    try:
        with open(args.reconstructed) as fh:
            r = read_pedigree(fh)
        with open(args.original) as fh:
            o = read_pedigree(fh)
        truth_half = None
        if args.truth is not None:
            with open(args.truth) as fh:
                truth_half = read_truth(fh)[1]
        report = accuracy(r, o)
    except OSError as exc:
        raise DataError(str(exc)) from None
    except ValueError as exc:
        raise DataError(str(exc)) from None
    print(report_json(report, half_sibling_recovery(r, o, truth_half)))
    return EXIT_OK


@dataclass(frozen=True)
class Job:
    param_set: int
    height: int
    replicate: int
    params: SimParams
    cfg: ReconstructConfig


def run_replicate(job: Job) -> dict:
    """Simulate once, reconstruct in both modes and score each."""
    row = {"set": job.param_set, "height": job.height, "replicate": job.replicate,
           "seed": job.params.seed}
    try:
        t0 = time.perf_counter()
        sim, extant = simulate(job.params)
        row["sim_seconds"] = time.perf_counter() - t0
        ped = sim.pedigree
        sizes = [len(ped.children(i)) for i in ped.ids() if ped.children(i)]
        row["family_size"] = float(np.mean(sizes)) if sizes else 0.0
        row["extant"] = len(ped.extant)
        for mode, sib_only in (("full", False), ("sibling_only", True)):
            t0 = time.perf_counter()
            rec = reconstruct(extant, replace(job.cfg, sibling_only=sib_only))
            row[f"{mode}_seconds"] = time.perf_counter() - t0
            row[f"{mode}_accuracy"] = accuracy(rec.pedigree, ped).accuracy
            got, real = half_sibling_recovery(rec.pedigree, ped, sim.half_sibling_pairs)
            row[f"{mode}_half_sib"] = got
            row["half_sib_real"] = real
        row["error"] = ""
    except Exception as exc:  # one failed replicate must not sink the batch
        row["error"] = f"{type(exc).__name__}: {exc}"
    return row


COLUMNS = ["set", "height", "replicate", "seed", "extant", "family_size", "full_accuracy",
           "sibling_only_accuracy", "full_half_sib", "sibling_only_half_sib", "half_sib_real",
           "sim_seconds", "full_seconds", "sibling_only_seconds", "error"]
SUMMARY_COLUMNS = ["set", "height", "runs", "family_size", "accuracy", "sibling_only_accuracy",
                   "half_sib_reconstructed", "half_sib_real", "seconds"]


def summarise(rows: list[dict]) -> list[dict]:
    groups: dict[tuple[int, int], list[dict]] = {}
    for row in rows:
        groups.setdefault((row["set"], row["height"]), []).append(row)
    out = []
    for (s, h), members in sorted(groups.items()):
        ok = [r for r in members if not r["error"]]

        def mean(key):
            return float(np.mean([r[key] for r in ok])) if ok else float("nan")

        out.append({
            "set": s, "height": h, "runs": len(ok),
            "family_size": mean("family_size"),
            "accuracy": mean("full_accuracy"),
            "sibling_only_accuracy": mean("sibling_only_accuracy"),
            "half_sib_reconstructed": mean("full_half_sib"),
            "half_sib_real": mean("half_sib_real"),
            "seconds": mean("full_seconds"),
        })
    return out


def _fmt(v) -> str:
    return f"{v:.4f}" if isinstance(v, float) else str(v)


def write_tsv(rows: list[dict], columns: list[str], path: Path) -> None:
    with open(path, "w") as fh:
        fh.write("\t".join(columns) + "\n")
        for row in rows:
            fh.write("\t".join(_fmt(row.get(c, "")) for c in columns) + "\n")


def markdown_table(rows: list[dict], columns: list[str]) -> str:
    lines = ["| " + " | ".join(columns) + " |", "|" + "---|" * len(columns)]
    for row in rows:
        lines.append("| " + " | ".join(_fmt(row[c]) for c in columns) + " |")
    return "\n".join(lines) + "\n"


def plan_jobs(args) -> list[Job]:
    if args.replicates < 1:
        raise DataError("replicates must be at least 1")
    cfg = _reconstruct_config(args, 2, sibling_only=False)
    jobs = []
    for s in args.sets:
        base = PARAMETER_SETS[s]
        heights = args.heights or list(range(2, base["height"] + 1))
        for h in heights:
            try:
                params = SimParams(**{**base, "height": h, "genome_length": int(args.genome_length),
                                      "recomb_rate": args.recomb_rate})
                job_cfg = replace(cfg, max_height=h)
            except ValueError as exc:
                raise DataError(str(exc)) from None
            for k in range(args.replicates):
                jobs.append(Job(s, h, k, replace(params, seed=args.seed + k), job_cfg))
    return jobs


def cmd_experiment(args) -> int:
    jobs = plan_jobs(args)
    if args.workers > 1:
        with ProcessPoolExecutor(max_workers=args.workers) as pool:
            rows = list(pool.map(run_replicate, jobs))
    else:
        rows = [run_replicate(job) for job in jobs]
    for row in rows:
        if row["error"]:
            log.error("set %d height %d replicate %d failed: %s",
                      row["set"], row["height"], row["replicate"], row["error"])
    summary = summarise(rows)
    args.out.mkdir(parents=True, exist_ok=True)
    write_tsv(rows, COLUMNS, args.out / "runs.tsv")
    write_tsv(summary, SUMMARY_COLUMNS, args.out / "summary.tsv")
    table = markdown_table(summary, SUMMARY_COLUMNS)
    (args.out / "summary.md").write_text(table)
    print(table, end="")
    return EXIT_OK


COMMANDS = {
    "simulate": cmd_simulate,
    "reconstruct": cmd_reconstruct,
    "evaluate": cmd_evaluate,
    "experiment": cmd_experiment,
}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.WARNING - 10 * min(args.verbose, 2),
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return COMMANDS[args.command](args)
    except (DataError, PedigreeError) as exc:
        print(f"pedrecon: error: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
