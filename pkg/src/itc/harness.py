"""Experiment configuration, memory Monte Carlo, validation and export."""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import tempfile
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy.stats import binomtest

from itc.cells import Geometry, Kind, build_complex
from itc.code import Presentation, SubsystemCode, build_itc, build_logicals, count_logical_qubits, export_text
from itc.decoder import Decoder, logical_flips
from itc.noise import NoiseModel, sample
from itc.syndrome import Sector, SyndromeMaps, apply, build_maps, outcome

MODES = ("memory", "validate", "export", "trace")
CSV_COLUMNS = ("geometry", "L", "p", "q", "T", "trials", "failures", "rate", "ci_low", "ci_high")


@dataclass(frozen=True)
class ExperimentConfig:
    geometry: str = "slab"
    L: tuple[int, ...] = (3,)
    presentation: str = "kvc"
    p: tuple[float, ...] = (0.01,)
    # empty q means "same as p", giving one point per p
    q: tuple[float, ...] = ()
    rounds: int = 4
    trials: int = 100
    seed: int = 0
    sector: str = "Z"
    noisy_boundary_measurements: bool = True
    out: str | None = None
    mode: str = "memory"
    workers: int = 1
    backend: str = "pymatching"

    def __post_init__(self) -> None:
        Kind(self.geometry)
        Presentation(self.presentation)
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}")
        if self.sector not in ("Z", "X", "both"):
            raise ValueError("sector must be Z, X or both")
        if self.trials < 1 or self.rounds < 0 or self.workers < 1:
            raise ValueError("need trials >= 1, rounds >= 0, workers >= 1")
        if not self.L or not self.p:
            raise ValueError("L and p lists must be nonempty")

    def points(self) -> list[tuple[int, float, float]]:
        if self.q:
            return [(L, p, q) for L in self.L for p in self.p for q in self.q]
        return [(L, p, p) for L in self.L for p in self.p]

    def sectors(self) -> tuple[Sector, ...]:
        return (Sector.Z, Sector.X) if self.sector == "both" else (Sector(self.sector),)


# config parsing ------------------------------------------------------------

_LIST_INT = {"L"}
_LIST_FLOAT = {"p", "q"}
_INT = {"rounds", "trials", "seed", "workers"}
_BOOL = {"noisy_boundary_measurements"}
_ALIASES = {"T": "rounds", "noisy-boundary-measurements": "noisy_boundary_measurements"}


def _coerce(key: str, value: str):
    if key in _LIST_INT:
        return tuple(int(v) for v in value.replace(",", " ").split())
    if key in _LIST_FLOAT:
        return tuple(float(v) for v in value.replace(",", " ").split())
    if key in _INT:
        return int(value)
    if key in _BOOL:
        if value.lower() in ("1", "true", "yes", "on"):
            return True
        if value.lower() in ("0", "false", "no", "off"):
            return False
        raise ValueError(f"{key}: not a boolean: {value!r}")
    return value


def parse_config_text(text: str) -> dict:
    """Flat ``key = value`` lines; ``#`` starts a comment."""
    out = {}
    for n, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"config line {n}: expected key=value")
        key, value = (s.strip() for s in line.split("=", 1))
        key = _ALIASES.get(key, key).replace("-", "_")
        if key not in ExperimentConfig.__dataclass_fields__:
            raise ValueError(f"config line {n}: unknown key {key!r}")
        out[key] = _coerce(key, value)
    return out


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="itc", description="Intertwined toric code experiments")
    ap.add_argument("--config", help="key=value config file; flags override it")
    ap.add_argument("--geometry", choices=[k.value for k in Kind])
    ap.add_argument("--L", nargs="+", type=int)
    ap.add_argument("--p", nargs="+", type=float)
    ap.add_argument("--q", nargs="+", type=float, help="defaults to q = p")
    ap.add_argument("--rounds", "--T", type=int, dest="rounds")
    ap.add_argument("--trials", type=int)
    ap.add_argument("--seed", type=int)
    ap.add_argument("--sector", choices=["Z", "X", "both"])
    ap.add_argument("--mode", choices=MODES)
    ap.add_argument("--out")
    ap.add_argument("--presentation", choices=[p.value for p in Presentation])
    ap.add_argument("--workers", type=int)
    ap.add_argument("--backend", choices=["pymatching", "exact"])
    noisy = ap.add_mutually_exclusive_group()
    noisy.add_argument("--noisy-boundary-measurements", dest="noisy_boundary_measurements", action="store_true", default=None)
    noisy.add_argument("--clean-boundary-measurements", dest="noisy_boundary_measurements", action="store_false")
    return ap


def config_from_args(argv: list[str] | None = None) -> ExperimentConfig:
    args = build_parser().parse_args(argv)
    values: dict = {}
    if args.config:
        values.update(parse_config_text(Path(args.config).read_text()))
    for key, val in vars(args).items():
        if key == "config" or val is None:
            continue
        values[key] = tuple(val) if isinstance(val, list) else val
    return ExperimentConfig(**values)


# shared per-process context ------------------------------------------------


@dataclass
class Context:
    code: SubsystemCode
    maps: dict[Sector, SyndromeMaps]
    decoders: dict[Sector, Decoder]


_CONTEXTS: dict[tuple, Context] = {}


def get_context(geometry: str, L: int, presentation: str, sectors, backend: str = "pymatching") -> Context:
    key = (geometry, L, presentation, tuple(sectors), backend)
    if key not in _CONTEXTS:
        cx = build_complex(Geometry(geometry, L))
        code = build_logicals(build_itc(cx, presentation))
        maps = {s: build_maps(code, s) for s in sectors}
        _CONTEXTS[key] = Context(code, maps, {s: Decoder(m, backend) for s, m in maps.items()})
    return _CONTEXTS[key]


# memory experiment ---------------------------------------------------------


def run_trial(cfg: ExperimentConfig, L: int, p: float, q: float, trial: int, gamma_seed: int | None = None) -> dict:
    """One sustained-memory trial: ``rounds`` noisy rounds, then a noiseless one.

    ``gamma_seed`` adds a random gauge shift to every outcome; verdicts must
    not depend on it.
    """
    t0 = time.perf_counter()
    ctx = get_context(cfg.geometry, L, cfg.presentation, cfg.sectors(), cfg.backend)
    model = NoiseModel(p, q, cfg.seed, cfg.noisy_boundary_measurements)
    flips = np.zeros(len(ctx.code.bare_logicals), dtype=np.uint8)
    sigma_w: dict[str, list[int]] = {}
    resid_w: dict[str, list[int]] = {}
    terminal_uses = 0
    for sector in cfg.sectors():
        maps, dec = ctx.maps[sector], ctx.decoders[sector]
        g_rng = np.random.default_rng([gamma_seed, trial]) if gamma_seed is not None else None
        eps = np.zeros(maps.dims["C_Q"], dtype=np.uint8)
        sw, rw = [], []
        for r in range(cfg.rounds + 1):
            if r < cfg.rounds:
                new, mu = sample(model, maps, trial, r)
                eps ^= new
            else:
                mu = np.zeros(maps.dims["C_M"], dtype=np.uint8)
            gamma = g_rng.integers(0, 2, maps.dims["C_G"]) if g_rng is not None else None
            res = dec.decode(outcome(maps, eps, mu, gamma).zeta, r)
            terminal_uses += sum(res.used_terminal)
            eps ^= res.eps_hat
            sw.append(int(res.stabilizer_syndrome.sum()))
            rw.append(int(apply(maps.bS_sp, eps).sum()))
        flips ^= logical_flips(ctx.code, maps, eps)
        sigma_w[sector.value] = sw
        resid_w[sector.value] = rw
    return {
        "geometry": cfg.geometry,
        "L": L,
        "p": p,
        "q": q,
        "T": cfg.rounds,
        "sector": cfg.sector,
        "seed": cfg.seed,
        "noisy_boundary_measurements": cfg.noisy_boundary_measurements,
        "trial": trial,
        "syndrome_weights": sigma_w,
        "residual_weights": resid_w,
        "terminal_uses": terminal_uses,
        "verdict": [int(b) for b in flips],
        "failed": bool(flips.any()),
        "wall_time": time.perf_counter() - t0,
    }


def _run_chunk(args) -> list[dict]:
    cfg, L, p, q, trials = args
    return [run_trial(cfg, L, p, q, t) for t in trials]


def wilson(failures: int, trials: int) -> tuple[float, float]:
    ci = binomtest(failures, trials).proportion_ci(confidence_level=0.95, method="wilson")
    return float(ci.low), float(ci.high)


def aggregate(cfg: ExperimentConfig, L: int, p: float, q: float, records: list[dict]) -> dict:
    failures = sum(r["failed"] for r in records)
    lo, hi = wilson(failures, len(records))
    return {
        "geometry": cfg.geometry,
        "L": L,
        "p": p,
        "q": q,
        "T": cfg.rounds,
        "trials": len(records),
        "failures": failures,
        "rate": failures / len(records),
        "ci_low": lo,
        "ci_high": hi,
    }


def run_memory(cfg: ExperimentConfig) -> tuple[list[dict], list[dict]]:
    """Returns (aggregate rows, trial records); writes files when ``cfg.out`` is set."""
    rows, records = [], []
    for L, p, q in cfg.points():
        ids = list(range(cfg.trials))
        if cfg.workers > 1:
            chunks = [ids[i :: cfg.workers] for i in range(cfg.workers)]
            with ProcessPoolExecutor(cfg.workers) as pool:
                parts = list(pool.map(_run_chunk, [(cfg, L, p, q, c) for c in chunks]))
            recs = sorted((r for part in parts for r in part), key=lambda r: r["trial"])
        else:
            recs = _run_chunk((cfg, L, p, q, ids))
        if len(recs) != cfg.trials:
            raise RuntimeError(f"lost trials: {len(recs)} of {cfg.trials}")
        rows.append(aggregate(cfg, L, p, q, recs))
        records.extend(recs)
    if cfg.out:
        out = Path(cfg.out)
        write_atomic(out.with_suffix(".jsonl"), "".join(json.dumps(r, sort_keys=True) + "\n" for r in records))
        write_atomic(out.with_suffix(".csv"), rows_to_csv(rows))
    return rows, records


def rows_to_csv(rows: list[dict]) -> str:
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=CSV_COLUMNS, lineterminator="\n")
    w.writeheader()
    for r in rows:
        w.writerow({k: r[k] for k in CSV_COLUMNS})
    return buf.getvalue()


# file output ---------------------------------------------------------------


def write_atomic(path: str | os.PathLike, text: str) -> None:
    """Write via a temporary file in the same directory, then rename."""
    path = Path(path)
    try:
        fd, tmp = tempfile.mkstemp(prefix=f".{path.name}.", dir=path.parent)
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc}") from exc
    try:
        with os.fdopen(fd, "w", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def export_files(cfg: ExperimentConfig) -> dict[str, str]:
    """Text of every export file, keyed by relative file name."""
    files: dict[str, str] = {}
    for L in cfg.L:
        cx = build_complex(Geometry(cfg.geometry, L))
        code = build_itc(cx, cfg.presentation)
        if count_logical_qubits(code) > 0:
            code = build_logicals(code)
        stem = f"{cfg.geometry}_L{L}_{cfg.presentation}"
        for name, text in export_text(code).items():
            files[f"{stem}_{name}.txt"] = text
        files[f"{stem}_summary.json"] = code.summary_json()
        files[f"{stem}_cells.txt"] = cx.dump()
        if code.presentation is not Presentation.TORIC:
            for s in Sector:
                files[f"{stem}_maps_{s.value}.txt"] = build_maps(code, s).dump_maps()
    return files


def run_export(cfg: ExperimentConfig) -> list[Path]:
    if not cfg.out:
        raise ValueError("export needs an output directory (--out)")
    outdir = Path(cfg.out)
    files = export_files(cfg)
    if not outdir.is_dir():
        raise OSError(f"output directory does not exist: {outdir}")
    written = []
    for name, text in sorted(files.items()):
        write_atomic(outdir / name, text)
        written.append(outdir / name)
    return written


# trace ---------------------------------------------------------------------


def run_trace(cfg: ExperimentConfig, trial: int = 0) -> str:
    """Round-by-round decoder output of one trial as JSON lines."""
    L, p, q = cfg.points()[0]
    ctx = get_context(cfg.geometry, L, cfg.presentation, cfg.sectors(), cfg.backend)
    model = NoiseModel(p, q, cfg.seed, cfg.noisy_boundary_measurements)
    lines = []
    for sector in cfg.sectors():
        maps, dec = ctx.maps[sector], ctx.decoders[sector]
        eps = np.zeros(maps.dims["C_Q"], dtype=np.uint8)
        for r in range(cfg.rounds + 1):
            if r < cfg.rounds:
                new, mu = sample(model, maps, trial, r)
                eps ^= new
            else:
                mu = np.zeros(maps.dims["C_M"], dtype=np.uint8)
            zeta = outcome(maps, eps, mu)
            res = dec.decode(zeta.zeta, r)
            eps ^= res.eps_hat
            rec = json.loads(res.to_json())
            rec.update(sector=sector.value, zeta=zeta.dump(maps).strip())
            lines.append(json.dumps(rec, sort_keys=True))
        verdict = logical_flips(ctx.code, maps, eps)
        lines.append(json.dumps({"sector": sector.value, "verdict": verdict.tolist()}, sort_keys=True))
    return "\n".join(lines) + "\n"


# validation ----------------------------------------------------------------


def run_validate(cfg: ExperimentConfig) -> list[tuple[str, bool]]:
    """Module invariant suites at the configured geometry and sizes."""
    from itc import validate

    return validate.run_all(cfg.geometry, cfg.L, cfg.presentation)


def main(argv: list[str] | None = None) -> int:
    cfg = config_from_args(argv)
    if cfg.mode == "memory":
        rows, _ = run_memory(cfg)
        print(rows_to_csv(rows), end="")
        return 0
    if cfg.mode == "export":
        for path in run_export(cfg):
            print(path)
        return 0
    if cfg.mode == "trace":
        text = run_trace(cfg)
        if cfg.out:
            write_atomic(cfg.out, text)
        else:
            print(text, end="")
        return 0
    results = run_validate(cfg)
    for name, ok in results:
        print(f"{'PASS' if ok else 'FAIL'} {name}")
    return 0 if all(ok for _, ok in results) else 1
