"""Command-line front end: refutation runs, grid sweeps, and property suites.

Reports are flat JSON documents with sorted keys (byte-identical for a fixed
config and seed) and every report embeds the config digest and the toolkit
version.  Exit codes: 0 success, 1 input errors, 2 infeasibility or capacity.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import sys
import time
from dataclasses import asdict, dataclass
from pathlib import Path

from ._version import VERSION
from .errors import CapacityError, InfeasibilityError, InputError
from .hypergraph import MatchingFamily, decompose
from .ldc import hadamard_fixture, pad_to_next_arity
from .randomness import random_matching_family, substream
from .refuter import (
    expectation_over_signs,
    refute_3xor,
    refute_even_q,
    refute_via_decomposition,
)
from .spectral import refute_2xor
from .suites import ALL_SUITES, run_suites
from .xor import XorInstance, brute_force_val, instance_from_text, random_signs

FIXTURES = ("hadamard", "hadamard-padded")


@dataclass(frozen=True)
class ExperimentConfig:
    command: str
    file: str | None = None
    fixture: str | None = None
    random: bool = False
    n: int | None = None
    k: int | None = None
    q: int = 3
    l: int = 2
    d: int = 2
    eps: float = 0.25
    delta: float = 0.25
    c: float = 4.0
    seed: int = 0
    partitions: str = "exhaustive"
    b: str | None = None
    spectral: str = "dense"
    out: str | None = None
    format: str = "report"

    def to_json(self) -> str:
        return json.dumps(asdict(self), sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "ExperimentConfig":
        return cls(**json.loads(text))

    @property
    def digest(self) -> str:
        return hashlib.sha256(self.to_json().encode()).hexdigest()[:16]


def _parse_mode(raw: str, what: str) -> tuple[str, int | None]:
    if raw == "exhaustive":
        return "exhaustive", None
    if raw.startswith("sample:"):
        try:
            count = int(raw.split(":", 1)[1])
        except ValueError:
            raise InputError(f"--{what} sample count must be an integer") from None
        if count < 1:
            raise InputError(f"--{what} sample count must be positive")
        return "sample", count
    raise InputError(f"--{what} must be 'exhaustive' or 'sample:N', got {raw!r}")


def _parse_signs(raw: str, k: int) -> tuple[int, ...]:
    token = raw.split(":", 1)[1]
    signs = []
    for ch in token:
        if ch == "+":
            signs.append(1)
        elif ch == "-":
            signs.append(-1)
        else:
            raise InputError(f"--b fixed signs must use +/-, got {ch!r}")
    if len(signs) != k:
        raise InputError(f"--b fixed needs {k} signs, got {len(signs)}")
    return tuple(signs)


def _load_family(cfg: ExperimentConfig) -> tuple[MatchingFamily, tuple[int, ...] | None]:
    sources = sum(1 for flag in (cfg.file, cfg.fixture) if flag) + int(cfg.random)
    if sources != 1:
        raise InputError("pick exactly one instance source: --file, --fixture, or --random")
    if cfg.file:
        inst = instance_from_text(Path(cfg.file).read_text())
        return inst.family(), inst.signs
    if cfg.fixture:
        if cfg.k is None:
            raise InputError("--fixture needs --k")
        if cfg.fixture == "hadamard":
            return hadamard_fixture(cfg.k).matchings, None
        if cfg.fixture == "hadamard-padded":
            return pad_to_next_arity(hadamard_fixture(cfg.k)).matchings, None
        raise InputError(f"unknown fixture {cfg.fixture!r}; expected one of {FIXTURES}")
    if cfg.n is None or cfg.k is None:
        raise InputError("--random needs --n and --k")
    rng = substream(cfg.seed, f"instance:{cfg.command}")
    return random_matching_family(rng, cfg.n, cfg.k, cfg.q, max_edges=cfg.n // cfg.q), None


def _single_certificate(cfg: ExperimentConfig, family: MatchingFamily, signs):
    part_mode, part_samples = _parse_mode(cfg.partitions, "partitions")
    rng = substream(cfg.seed, "partition")
    if cfg.command == "refute-3xor":
        return refute_3xor(
            family, signs, cfg.l, part_mode, samples=part_samples, rng=rng,
            spectral_mode=cfg.spectral,
        )
    if cfg.command == "refute-even":
        return refute_even_q(family, signs, cfg.l, spectral_mode=cfg.spectral)
    if cfg.command == "combine":
        return refute_via_decomposition(
            family, signs, cfg.d, cfg.l, part_mode, samples=part_samples, rng=rng,
            spectral_mode=cfg.spectral,
        )
    dec = decompose(family, cfg.d)
    return refute_2xor(family.n, dec.heavy_pairs, dec.bipartite, signs, mode=cfg.spectral)


_PIPELINE_OF = {"refute-3xor": "3xor", "refute-even": "even", "combine": "combine"}


def _run_refute(cfg: ExperimentConfig) -> tuple[dict, list[dict]]:
    family, file_signs = _load_family(cfg)
    sign_spec = cfg.b
    if sign_spec is None:
        sign_spec = "fixed-from-file" if file_signs is not None else "exhaustive"

    if sign_spec.startswith("fixed"):
        signs = file_signs if sign_spec == "fixed-from-file" else _parse_signs(sign_spec, family.k)
        if signs is None:
            raise InputError("--b fixed-from-file needs an instance file with signs")
        cert = _single_certificate(cfg, family, signs)
        payload = cert.as_flat_dict()
        payload["sign_mode"] = "fixed"
        rows = [dict(payload)]
        return payload, rows

    sign_mode, sign_samples = _parse_mode(sign_spec, "b")
    part_mode, part_samples = _parse_mode(cfg.partitions, "partitions")
    if cfg.command == "refute-2xor":
        dec = decompose(family, cfg.d)
        bounds = []
        rows = []
        from .xor import enumerate_sign_vectors

        rng = substream(cfg.seed, "b")
        vectors = (
            list(enumerate_sign_vectors(family.k))
            if sign_mode == "exhaustive"
            else [random_signs(family.k, rng) for _ in range(sign_samples)]
        )
        for signs in vectors:
            cert = refute_2xor(family.n, dec.heavy_pairs, dec.bipartite, signs, mode=cfg.spectral)
            bounds.append(cert.bound)
            rows.append({"signs": _fmt_signs(signs), "bound": cert.bound})
        payload = {
            "target": "bipartite-2xor",
            "sign_mode": sign_mode if sign_mode == "exhaustive" else f"sampled:{sign_samples}",
            "bound_mean": sum(bounds) / len(bounds),
            "bound_min": min(bounds),
            "bound_max": max(bounds),
            "heavy_pair_count": len(dec.heavy_pairs),
            "sound": sign_mode == "exhaustive",
        }
        return payload, rows

    params: dict = {"ell": cfg.l, "spectral_mode": cfg.spectral}
    if cfg.command in ("refute-3xor", "combine"):
        params.update(
            partition_mode=part_mode,
            samples=part_samples,
            rng=substream(cfg.seed, "partition"),
        )
    if cfg.command == "combine":
        params["d"] = cfg.d
    summary = expectation_over_signs(
        _PIPELINE_OF[cfg.command],
        family,
        params,
        sign_mode=sign_mode,
        samples=sign_samples,
        rng=substream(cfg.seed, "b"),
    )
    payload = {
        "target": "psi-normalized",
        "sign_mode": summary.sign_mode,
        "partition_mode": cfg.partitions,
        "bound_mean": summary.mean_bound,
        "bound_min": summary.min_bound,
        "bound_max": summary.max_bound,
        "sound": summary.all_sound,
    }
    rows = [
        {"signs": _fmt_signs(signs), "bound": bound}
        for signs, bound, _ in summary.per_sign
    ]
    return payload, rows


def _fmt_signs(signs) -> str:
    return "".join("+" if s == 1 else "-" for s in signs)


def _emit_report(cfg: ExperimentConfig, payload: dict, rows: list[dict]) -> None:
    document = dict(payload)
    document["config_digest"] = cfg.digest
    document["version"] = VERSION
    report_text = json.dumps(document, sort_keys=True, indent=2) + "\n"
    csv_text = _rows_to_csv(rows)
    if cfg.out:
        Path(cfg.out).write_text(report_text)
        Path(cfg.out + ".csv").write_text(csv_text)
    if cfg.format == "report" or not cfg.out:
        sys.stdout.write(report_text)
    elif cfg.format == "csv":
        sys.stdout.write(csv_text)


def _rows_to_csv(rows: list[dict]) -> str:
    buf = io.StringIO()
    if rows:
        writer = csv.DictWriter(buf, fieldnames=list(rows[0]))
        writer.writeheader()
        writer.writerows(rows)
    return buf.getvalue()


def _parse_grid(raw: str) -> list[int]:
    if ".." in raw:
        lo, hi = raw.split("..", 1)
        return list(range(int(lo), int(hi) + 1))
    return [int(tok) for tok in raw.split(",") if tok]


def _run_sweep(args) -> int:
    ns = _parse_grid(args.n)
    ks = _parse_grid(args.k)
    rows = []
    for n in ns:
        for k in ks:
            for seed in range(args.seeds):
                row = {
                    "n": n,
                    "k": k,
                    "seed": seed,
                    "status": "ok",
                    "bound": "",
                    "value": "",
                    "ratio": "",
                    "seconds": "",
                }
                started = time.perf_counter()
                try:
                    inst_rng = substream(seed, f"instance:n{n}:k{k}")
                    family = random_matching_family(inst_rng, n, k, 3, max_edges=n // 3)
                    signs = random_signs(k, substream(seed, f"b:n{n}:k{k}"))
                    cert = refute_via_decomposition(
                        family, signs, args.d, args.l, "exhaustive",
                        spectral_mode=args.spectral,
                    )
                    row["bound"] = f"{cert.bound:.6f}"
                    if n <= 24:
                        result = brute_force_val(XorInstance.from_family(family, signs))
                        value = float(result.value)
                        row["value"] = f"{value:.6f}"
                        if value > 0:
                            row["ratio"] = f"{cert.bound / value:.6f}"
                except (CapacityError, InfeasibilityError) as exc:
                    row["status"] = f"skipped: {exc}"
                except InputError as exc:
                    row["status"] = f"input-error: {exc}"
                row["seconds"] = f"{time.perf_counter() - started:.3f}"
                rows.append(row)
    text = _rows_to_csv(rows) if rows else "n,k,seed,status,bound,value,ratio,seconds\n"
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return 0


def _run_verify(args) -> int:
    try:
        results = run_suites(args.suites or None, seed=args.seed)
    except KeyError as exc:
        raise InputError(f"unknown suite {exc.args[0]!r}; known: {sorted(ALL_SUITES)}") from None
    failed = False
    for res in results:
        status = "PASS" if res.passed else "FAIL"
        line = f"{res.name}: {status} (checks={res.checks})"
        if res.detail:
            line += f" {res.detail}"
        print(line)
        failed = failed or not res.passed
    return 1 if failed else 0


def _add_refute_parser(sub, name: str) -> None:
    p = sub.add_parser(name, help=f"run the {name} pipeline")
    p.add_argument("--file", help="XOR instance in the hypergraph text format")
    p.add_argument("--fixture", choices=FIXTURES)
    p.add_argument("--random", action="store_true", help="seeded random matchings")
    p.add_argument("--config", help="load a saved experiment config (overrides flags)")
    p.add_argument("--n", type=int)
    p.add_argument("--k", type=int)
    p.add_argument("--q", type=int, default=3)
    p.add_argument("--l", type=int, default=2)
    p.add_argument("--d", type=int, default=2)
    p.add_argument("--eps", type=float, default=0.25)
    p.add_argument("--delta", type=float, default=0.25)
    p.add_argument("--c", type=float, default=4.0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--partitions", default="exhaustive", metavar="exhaustive|sample:N")
    p.add_argument("--b", default=None, metavar="exhaustive|sample:N|fixed:SIGNS")
    p.add_argument("--spectral", choices=("dense", "product"), default="dense")
    p.add_argument("--out")
    p.add_argument("--format", choices=("report", "csv"), default="report")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="kikuchi", description="spectral refutation certificates for XOR instances"
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name in ("refute-2xor", "refute-3xor", "refute-even", "combine"):
        _add_refute_parser(sub, name)
    sweep = sub.add_parser("sweep", help="grid of seeded experiments, CSV out")
    sweep.add_argument("--n", required=True, help="range like 8..16 or list 8,12,16")
    sweep.add_argument("--k", required=True, help="range like 2..4 or list 2,3")
    sweep.add_argument("--seeds", type=int, default=1)
    sweep.add_argument("--d", type=int, default=2)
    sweep.add_argument("--l", type=int, default=2)
    sweep.add_argument("--spectral", choices=("dense", "product"), default="dense")
    sweep.add_argument("--out")
    verify = sub.add_parser("verify", help="run the lemma-level property suites")
    verify.add_argument("suites", nargs="*", metavar="SUITE")
    verify.add_argument("--seed", type=int, default=0)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "sweep":
            return _run_sweep(args)
        if args.command == "verify":
            return _run_verify(args)
        if args.config:
            cfg = ExperimentConfig.from_json(Path(args.config).read_text())
        else:
            cfg = ExperimentConfig(
                command=args.command,
                file=args.file,
                fixture=args.fixture,
                random=args.random,
                n=args.n,
                k=args.k,
                q=args.q,
                l=args.l,
                d=args.d,
                eps=args.eps,
                delta=args.delta,
                c=args.c,
                seed=args.seed,
                partitions=args.partitions,
                b=args.b,
                spectral=args.spectral,
                out=args.out,
                format=args.format,
            )
        payload, rows = _run_refute(cfg)
        _emit_report(cfg, payload, rows)
        return 0
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (InfeasibilityError, CapacityError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
