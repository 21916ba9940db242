"""Command line interface.

Exit codes: 0 success, 2 bad configuration or parameters, 3 retries
exhausted while sampling.
"""

from __future__ import annotations

import functools
import json
import sys

import click
import numpy as np

from . import harness, lattice, linalg, matgen
from . import threshold as th
from .errors import RetriesExhausted, SparseRankError
from .gf import field_new


def _guard(fn):
    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except RetriesExhausted as e:
            click.echo(f"error: {e}", err=True)
            sys.exit(3)
        except SparseRankError as e:
            click.echo(f"error: {e}", err=True)
            sys.exit(2)

    return wrapper


def _echo_json(obj) -> None:
    click.echo(json.dumps(obj, indent=2, sort_keys=True))


@click.group()
def main() -> None:
    """Sparse random matrices over finite fields: thresholds, exact ranks,
    lattice bases, and Monte Carlo experiments."""


# -- threshold ------------------------------------------------------------------


@main.group()
def threshold() -> None:
    """The threshold functional and the full-rank condition."""


@threshold.command("check")
@click.option("--config", "config_path", required=True, type=click.Path())
@_guard
def threshold_check(config_path: str) -> None:
    """Evaluate the full-row-rank condition for a spec config."""
    spec = harness.parse_spec(harness.load_config(config_path))
    _echo_json(th.condition_check(spec).to_dict())


@threshold.command("xorsat")
@click.option("-k", "k", required=True, type=int)
@click.option("--q", "q", default=2, show_default=True, type=int)
@click.option("--tol", default=1e-6, show_default=True, type=float)
@_guard
def threshold_xorsat(k: int, q: int, tol: float) -> None:
    """Bisect the density threshold of random k-XOR-type systems."""
    _echo_json({"k": k, "q": q, "tol": tol, "threshold": th.xorsat_threshold(k, q, tol)})


# -- phi ------------------------------------------------------------------------


@main.group()
def phi() -> None:
    """Curves of the threshold functional."""


@phi.command("curve")
@click.option("--config", "config_path", required=True, type=click.Path())
@click.option("--points", default=1000, show_default=True, type=int)
@click.option("--out", "out_path", default=None, type=click.Path())
@_guard
def phi_curve(config_path: str, points: int, out_path: str | None) -> None:
    """Write (z, phi) samples as CSV (stdout unless --out)."""
    spec = harness.parse_spec(harness.load_config(config_path))
    text = harness.phi_curve_csv(spec, points)
    if out_path:
        with open(out_path, "w") as f:
            f.write(text)
    else:
        click.echo(text, nl=False)


# -- gen / rank -------------------------------------------------------------------


@main.command("gen")
@click.option("--config", "config_path", required=True, type=click.Path())
@click.option("-n", "n", required=True, type=int)
@click.option("--seed", default=0, show_default=True, type=int)
@click.option("--model", default="simple", show_default=True,
              type=click.Choice(["simple", "pairing"]))
@click.option("--out", "out_path", required=True, type=click.Path())
@_guard
def gen(config_path: str, n: int, seed: int, model: str, out_path: str) -> None:
    """Sample one matrix and write it in MatrixMarket coordinate format."""
    spec = harness.parse_spec(harness.load_config(config_path))
    rng = np.random.default_rng(seed)
    degs = matgen.sample_degrees(spec, n, rng)
    if model == "simple":
        A = matgen.gen_simple(spec, degs, rng)
    else:
        A = matgen.gen_pairing(spec, degs, rng)
    harness.write_matrix_market(A, out_path, seed=seed, model=model, degs=degs)
    click.echo(f"wrote {out_path}: {A.nrows}x{A.ncols}, nnz={A.nnz}")


@main.command("rank")
@click.option("--in", "in_path", required=True, type=click.Path())
@click.option("--kernel", "show_kernel", is_flag=True, help="include a kernel basis")
@click.option("--frozen", "show_frozen", is_flag=True, help="include the frozen set")
@_guard
def rank_cmd(in_path: str, show_kernel: bool, show_frozen: bool) -> None:
    """Exact rank/nullity/frozen count of a stored matrix."""
    A = harness.read_matrix_market(in_path)
    elim = linalg.eliminate(A)
    ks = linalg.kernel(A, elim)
    out = {"rank": elim.rank, "nullity": ks.nullity, "frozen_count": len(ks.frozen)}
    if show_kernel:
        out["kernel_basis"] = [[int(x) for x in b] for b in ks.basis]
    if show_frozen:
        out["frozen"] = sorted(ks.frozen)
    _echo_json(out)


# -- lattice ----------------------------------------------------------------------


def _parse_coeffs(ctx, text: str):
    try:
        return tuple(int(t) for t in text.split(","))
    except ValueError as e:
        raise SparseRankError(f"bad coefficient list {text!r}") from e


@main.group("lattice")
def lattice_group() -> None:
    """Solution-frequency lattice bases."""


@lattice_group.command("basis")
@click.option("-q", "q", required=True, type=int)
@click.option("--coeffs", required=True, help="comma separated units, e.g. 1,1,1")
@_guard
def lattice_basis(q: int, coeffs: str) -> None:
    """Construct the explicit basis for the coefficient multiset."""
    ctx = field_new(q)
    cs = _parse_coeffs(ctx, coeffs)
    if len(set(cs)) == 1:
        bases = lattice.basis_identical(ctx)
        _echo_json({
            "q": q, "coeffs": list(cs), "kind": "identical",
            "triangular_basis": bases.B1.matrix.tolist(),
            "short_basis": bases.B2.matrix.tolist(),
            "det_abs": bases.B2.det_abs,
        })
    else:
        basis = lattice.basis_general(ctx, cs)
        _echo_json({
            "q": q, "coeffs": list(cs), "kind": "general",
            "basis": basis.matrix.tolist(), "det_abs": basis.det_abs,
        })


@lattice_group.command("verify")
@click.option("-q", "q", required=True, type=int)
@click.option("--coeffs", required=True)
@_guard
def lattice_verify(q: int, coeffs: str) -> None:
    """Verify the constructed basis against the brute-force module."""
    ctx = field_new(q)
    cs = _parse_coeffs(ctx, coeffs)
    if len(set(cs)) == 1:
        basis = lattice.basis_identical(ctx).B2
    else:
        basis = lattice.basis_general(ctx, cs)
    rep = lattice.verify_basis(ctx, cs, basis)
    _echo_json({"q": q, "coeffs": list(cs), **rep.to_dict()})


# -- mc ---------------------------------------------------------------------------


def _mc_command(experiment: str):
    @click.option("--config", "config_path", required=True, type=click.Path())
    @click.option("--out", "out_path", default=None, type=click.Path())
    @click.option("--jobs", default=None, type=int)
    @_guard
    def cmd(config_path: str, out_path: str | None, jobs: int | None) -> None:
        doc = harness.load_config(config_path)
        config = harness.config_from_doc(doc, experiment=experiment)
        if out_path:
            config.out_path = out_path
        if jobs:
            config.jobs = jobs
        text = harness.RUNNERS[experiment](config)
        if config.out_path:
            click.echo(f"wrote {config.out_path}")
        else:
            click.echo(text, nl=False)

    cmd.__name__ = f"mc_{experiment}"
    return cmd


@main.group("mc")
def mc_group() -> None:
    """Seeded Monte Carlo experiments (CSV output)."""


mc_group.command("fullrank")(_mc_command("fullrank"))
mc_group.command("rankformula")(_mc_command("rankformula"))
mc_group.command("nullity")(_mc_command("nullity_ternary"))


if __name__ == "__main__":
    main()
