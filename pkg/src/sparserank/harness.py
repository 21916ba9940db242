"""Seeded Monte Carlo experiments and their CSV/JSON plumbing.

Experiments: full-row-rank rates, the normalized rank formula, nullity under
ternary-row augmentation, and Phi curves.  Reproducibility contract: the
trial seed is a fixed 64-bit mix of (master seed, n, trial index), results
are gathered and sorted by (n, trial), and floats are written with shortest
round-trip repr, so identical configs give byte-identical CSV up to the
wall_ms column (which strip_timing removes for comparisons).
"""

from __future__ import annotations

import io
import json
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import degdist as dd
from . import linalg, matgen
from . import threshold as th
from .errors import BadConfig, RetriesExhausted, SparseRankError
from .gf import field_new
from .linalg import SparseMatrix
from .threshold import ModelSpec

CSV_VERSION = "sparse-rank v1"
EXPERIMENTS = ("fullrank", "rankformula", "nullity_ternary", "phi_curve")

_M64 = (1 << 64) - 1


def _splitmix64(x: int) -> int:
    x = (x + 0x9E3779B97F4A7C15) & _M64
    z = x
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _M64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _M64
    return (z ^ (z >> 31)) & _M64


def trial_seed(master: int, n: int, trial: int) -> int:
    """Fixed 64-bit mixing of (master seed, n, trial index); execution order
    therefore cannot affect any trial's stream."""
    h = _splitmix64(master & _M64)
    h = _splitmix64(h ^ (n & _M64))
    h = _splitmix64(h ^ (trial & _M64))
    return h


# -- configuration ---------------------------------------------------------------


def parse_dist(doc) -> dd.DegreeDist:
    try:
        kind = doc["kind"]
    except (TypeError, KeyError) as e:
        raise BadConfig(f"distribution document needs a 'kind': {doc!r}") from e
    try:
        if kind == "fixed":
            return dd.dist_fixed(int(doc["value"]))
        if kind == "poisson":
            return dd.dist_poisson(float(doc["mean"]), float(doc.get("tol", 1e-12)))
        if kind == "powerlaw":
            return dd.dist_powerlaw(
                float(doc["alpha"]), int(doc.get("kmin", 1)), float(doc.get("tol", 1e-12))
            )
        if kind == "table":
            return dd.dist_table([(int(v), float(p)) for v, p in doc["pairs"]])
    except KeyError as e:
        raise BadConfig(f"missing field for {kind!r} distribution: {e}") from e
    raise BadConfig(f"unknown distribution kind {kind!r}")


def parse_chi(doc, q: int):
    if doc is None:
        return th.chi_point(q, 1)
    kind = doc.get("kind")
    if kind == "point":
        return th.chi_point(q, int(doc.get("value", 1)))
    if kind == "uniform":
        return th.chi_uniform(q)
    if kind == "table":
        return tuple((int(v), float(p)) for v, p in doc["pairs"])
    raise BadConfig(f"unknown chi kind {kind!r}")


def parse_spec(doc) -> ModelSpec:
    doc = doc.get("spec", doc)
    try:
        q = int(doc["q"])
        ddist = parse_dist(doc["ddist"])
        kdist = parse_dist(doc["kdist"])
    except (TypeError, KeyError) as e:
        raise BadConfig(f"spec document needs q, ddist, kdist: {e}") from e
    try:
        return ModelSpec(ddist, kdist, q, parse_chi(doc.get("chi"), q))
    except SparseRankError:
        raise
    except Exception as e:  # q validation reraises as config problem
        raise BadConfig(str(e)) from e


def load_config(path: str) -> dict:
    try:
        with open(path) as f:
            return json.load(f)
    except (OSError, json.JSONDecodeError) as e:
        raise BadConfig(f"cannot read config {path}: {e}") from e


@dataclass
class ExperimentConfig:
    spec: ModelSpec
    spec_doc: dict
    n_values: list[int]
    trials: int
    seed: int
    experiment: str
    delta: float | None = None
    out_path: str | None = None
    model: str = "simple"
    jobs: int = 1

    def __post_init__(self):
        if self.experiment not in EXPERIMENTS:
            raise BadConfig(f"unknown experiment {self.experiment!r}")
        if self.trials < 1:
            raise BadConfig("trials must be >= 1")
        if self.model not in ("simple", "pairing"):
            raise BadConfig(f"model must be simple|pairing, got {self.model!r}")
        if any(n < 1 for n in self.n_values):
            raise BadConfig("n_values must be positive")
        for n in self.n_values:
            if not matgen.degree_sum_attainable(self.spec.ddist, self.spec.f_k, n):
                raise BadConfig(
                    f"n={n}: degree sums can never match (check-degree gcd "
                    f"{self.spec.f_k})"
                )
        if self.experiment == "nullity_ternary":
            if self.delta is None or not (0 < self.delta <= 0.1):
                raise BadConfig("nullity_ternary needs delta in (0, 0.1]")


def config_from_doc(doc: dict, experiment: str | None = None) -> ExperimentConfig:
    spec = parse_spec(doc)
    exp = experiment or doc.get("experiment")
    if exp is None:
        raise BadConfig("no experiment selected")
    return ExperimentConfig(
        spec=spec,
        spec_doc=doc.get("spec", doc),
        n_values=[int(n) for n in doc.get("n_values", [1000])],
        trials=int(doc.get("trials", 100)),
        seed=int(doc.get("seed", 0)),
        experiment=exp,
        delta=float(doc["delta"]) if "delta" in doc else None,
        out_path=doc.get("out_path"),
        model=doc.get("model", "simple"),
        jobs=int(doc.get("jobs", 1)),
    )


# -- trial execution ---------------------------------------------------------------


def _generate(spec: ModelSpec, model: str, n: int, rng) -> tuple[matgen.DegreeSequencePair, SparseMatrix]:
    degs = matgen.sample_degrees(spec, n, rng)
    if model == "simple":
        A = matgen.gen_simple(spec, degs, rng)
    else:
        A = matgen.gen_pairing(spec, degs, rng)
    return degs, A


def _run_trial(task: tuple) -> dict:
    """One seeded trial; module-level so process pools can pickle it."""
    spec_json, experiment, model, n, trial, seed, delta = task
    spec = parse_spec(json.loads(spec_json))
    rng = np.random.default_rng(seed)
    t0 = time.perf_counter()
    rec: dict = {"n": n, "trial": trial, "seed_used": seed, "error": ""}
    try:
        degs, A = _generate(spec, model, n, rng)
        if experiment == "nullity_ternary":
            t_added = int(math.floor(delta * n))
            nul0 = linalg.nullity(A)
            B = matgen.add_ternary_rows(A, t_added, rng, chi=spec.chi)
            nul = linalg.nullity(B)
            rec.update(
                m=degs.m, t_added=t_added, nullity0=nul0, nullity=nul,
                nullity_per_n=nul / n,
            )
        else:
            elim = linalg.eliminate(A)
            ks = linalg.kernel(A, elim)
            rec.update(
                m=degs.m, rank=elim.rank, nullity=A.ncols - elim.rank,
                frozen_count=len(ks.frozen), full_row_rank=elim.rank == degs.m,
                rank_per_n=elim.rank / n,
            )
    except RetriesExhausted:
        rec["error"] = "retries_exhausted"
    rec["wall_ms"] = int((time.perf_counter() - t0) * 1000)
    return rec


def _run_all_trials(config: ExperimentConfig) -> list[dict]:
    spec_json = json.dumps(config.spec_doc, sort_keys=True)
    tasks = [
        (spec_json, config.experiment, config.model, n, t,
         trial_seed(config.seed, n, t), config.delta)
        for n in config.n_values
        for t in range(config.trials)
    ]
    if config.jobs > 1:
        with ProcessPoolExecutor(max_workers=config.jobs) as pool:
            records = list(pool.map(_run_trial, tasks, chunksize=4))
    else:
        records = [_run_trial(t) for t in tasks]
    records.sort(key=lambda r: (r["n"], r["trial"]))
    return records


# -- CSV ---------------------------------------------------------------------------


def _fmt(x) -> str:
    if isinstance(x, bool):
        return "1" if x else "0"
    if isinstance(x, float):
        return repr(x)
    return str(x)


def _write_csv(buf, header_comment: str, columns: list[str], rows: list[dict]) -> None:
    buf.write(header_comment + "\n")
    buf.write(",".join(columns) + "\n")
    for row in rows:
        buf.write(",".join(_fmt(row.get(c, "")) for c in columns) + "\n")


def wilson_interval(successes: int, total: int, z: float = 1.96) -> tuple[float, float]:
    if total == 0:
        return 0.0, 1.0
    phat = successes / total
    denom = 1.0 + z * z / total
    center = (phat + z * z / (2 * total)) / denom
    half = z * math.sqrt(phat * (1 - phat) / total + z * z / (4 * total * total)) / denom
    return max(center - half, 0.0), min(center + half, 1.0)


def run_fullrank_mc(config: ExperimentConfig) -> str:
    """Per-trial full-row-rank indicators plus per-n aggregate rates with
    Wilson 95% intervals.  Skipped trials keep their rows (error tag) and are
    excluded from the aggregate numerator and denominator."""
    records = _run_all_trials(config)
    columns = [
        "kind", "n", "trial", "m", "rank", "nullity", "frozen_count",
        "full_row_rank", "seed_used", "error", "trials_requested",
        "trials_completed", "full_count", "full_rate", "wilson_lo",
        "wilson_hi", "wall_ms",
    ]
    rows = [{"kind": "trial", **r} for r in records]
    for n in config.n_values:
        done = [r for r in records if r["n"] == n and not r["error"]]
        full = sum(1 for r in done if r.get("full_row_rank"))
        lo, hi = wilson_interval(full, len(done))
        rows.append({
            "kind": "aggregate", "n": n, "trials_requested": config.trials,
            "trials_completed": len(done), "full_count": full,
            "full_rate": full / len(done) if done else 0.0,
            "wilson_lo": lo, "wilson_hi": hi,
        })
    buf = io.StringIO()
    _write_csv(buf, f"# {CSV_VERSION}, seed={config.seed}, experiment=fullrank", columns, rows)
    return _finish(buf, config)


def run_rankformula_mc(config: ExperimentConfig) -> str:
    """Per-trial rank/n against the analytic normalized rank."""
    prediction = th.normalized_rank(config.spec)
    records = _run_all_trials(config)
    columns = [
        "kind", "n", "trial", "m", "rank", "rank_per_n", "seed_used", "error",
        "trials_completed", "mean_rank_per_n", "prediction", "abs_deviation",
        "wall_ms",
    ]
    rows = [{"kind": "trial", **r} for r in records]
    for n in config.n_values:
        done = [r for r in records if r["n"] == n and not r["error"]]
        mean = sum(r["rank_per_n"] for r in done) / len(done) if done else float("nan")
        rows.append({
            "kind": "aggregate", "n": n, "trials_completed": len(done),
            "mean_rank_per_n": mean, "prediction": prediction,
            "abs_deviation": abs(mean - prediction),
        })
    buf = io.StringIO()
    _write_csv(buf, f"# {CSV_VERSION}, seed={config.seed}, experiment=rankformula", columns, rows)
    return _finish(buf, config)


def run_nullity_ternary(config: ExperimentConfig) -> str:
    """Nullity per column after appending floor(delta*n) ternary rows,
    against the bound 1 - d/k - delta.  Refuses to run unless the full-rank
    condition holds (the bound is not asserted otherwise)."""
    rep = th.condition_check(config.spec)
    if not rep.holds:
        raise BadConfig(
            "nullity_ternary requires a spec satisfying the full-rank "
            f"condition (margin={rep.margin!r}, coprime={rep.coprime})"
        )
    bound = 1.0 - config.spec.d_mean / config.spec.k_mean - config.delta
    records = _run_all_trials(config)
    columns = [
        "kind", "n", "trial", "m", "t_added", "nullity0", "nullity",
        "nullity_per_n", "seed_used", "error", "trials_completed",
        "mean_nullity_per_n", "bound", "excess_over_bound", "wall_ms",
    ]
    rows = [{"kind": "trial", **r} for r in records]
    for n in config.n_values:
        done = [r for r in records if r["n"] == n and not r["error"]]
        mean = sum(r["nullity_per_n"] for r in done) / len(done) if done else float("nan")
        rows.append({
            "kind": "aggregate", "n": n, "trials_completed": len(done),
            "mean_nullity_per_n": mean, "bound": bound,
            "excess_over_bound": mean - bound,
        })
    buf = io.StringIO()
    _write_csv(buf, f"# {CSV_VERSION}, seed={config.seed}, experiment=nullity_ternary", columns, rows)
    return _finish(buf, config)


def phi_curve_csv(spec: ModelSpec, points: int = 1000, seed: int | None = None) -> str:
    zs = np.linspace(0.0, 1.0, points)
    vals = np.asarray(th.phi(spec, zs))
    buf = io.StringIO()
    seed_part = f", seed={seed}" if seed is not None else ""
    buf.write(f"# {CSV_VERSION}{seed_part}, experiment=phi_curve\n")
    buf.write("z,phi\n")
    for z, v in zip(zs, vals):
        buf.write(f"{float(z)!r},{float(v)!r}\n")
    return buf.getvalue()


def _finish(buf: io.StringIO, config: ExperimentConfig) -> str:
    text = buf.getvalue()
    if config.out_path:
        with open(config.out_path, "w") as f:
            f.write(text)
    return text


def strip_timing(csv_text: str) -> str:
    """Remove the wall_ms column so byte comparisons ignore timing."""
    out_lines = []
    drop = None
    for line in csv_text.splitlines():
        if line.startswith("#"):
            out_lines.append(line)
            continue
        cells = line.split(",")
        if drop is None:
            drop = cells.index("wall_ms") if "wall_ms" in cells else -1
        if drop >= 0:
            cells = cells[:drop] + cells[drop + 1:]
        out_lines.append(",".join(cells))
    return "\n".join(out_lines) + "\n"


RUNNERS = {
    "fullrank": run_fullrank_mc,
    "rankformula": run_rankformula_mc,
    "nullity_ternary": run_nullity_ternary,
}


# -- Matrix Market I/O ---------------------------------------------------------------


def write_matrix_market(A: SparseMatrix, path: str, seed: int, model: str,
                        degs: matgen.DegreeSequencePair | None = None) -> None:
    """Coordinate-format output; the comment line records q, the seed and the
    degree checksums so the matrix is self-describing."""
    if degs is not None:
        dsum, ksum = int(degs.dvec.sum()), int(degs.kvec.sum())
    else:  # fall back to the stored pattern's support sizes
        dsum = sum(A.col_support_sizes())
        ksum = sum(A.row_support_sizes())
    with open(path, "w") as f:
        f.write("%%MatrixMarket matrix coordinate integer general\n")
        f.write(
            f"%{CSV_VERSION} q={A.field.q} seed={seed} model={model} "
            f"n={A.ncols} m={A.nrows} dsum={dsum} ksum={ksum}\n"
        )
        f.write(f"{A.nrows} {A.ncols} {A.nnz}\n")
        for i, row in enumerate(A.rows):
            for j, coeff in row:
                f.write(f"{i + 1} {j + 1} {coeff}\n")


def read_matrix_market(path: str) -> SparseMatrix:
    try:
        with open(path) as f:
            lines = f.read().splitlines()
    except OSError as e:
        raise BadConfig(f"cannot read {path}: {e}") from e
    if not lines or not lines[0].startswith("%%MatrixMarket"):
        raise BadConfig(f"{path} is not a MatrixMarket file")
    q = None
    body = []
    for line in lines[1:]:
        if line.startswith("%"):
            for tok in line[1:].split():
                if tok.startswith("q="):
                    q = int(tok[2:])
            continue
        if line.strip():
            body.append(line)
    if q is None:
        raise BadConfig(f"{path} lacks the 'q=' header comment")
    m, n, nnz = (int(x) for x in body[0].split())
    entries = [tuple(int(x) for x in line.split()) for line in body[1:]]
    if len(entries) != nnz:
        raise BadConfig(f"{path}: expected {nnz} entries, found {len(entries)}")
    rows: list[list[tuple[int, int]]] = [[] for _ in range(m)]
    for i, j, v in entries:
        rows[i - 1].append((j - 1, v))
    ctx = field_new(q)
    return SparseMatrix(m, n, tuple(tuple(sorted(r)) for r in rows), ctx)
