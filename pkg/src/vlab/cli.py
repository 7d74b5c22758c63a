"""``vlab`` command line: reproducible experiments written as CSV tables.

Exit codes: 0 success, 1 a checked property failed, 2 usage or config error.
Reals are written with 17 significant digits, big integers in plain decimal.
All randomness comes from the counter generator in :mod:`vlab.rng` keyed by
the configured seed, so identical inputs give byte-identical output.
"""

from __future__ import annotations

import argparse
import csv
import io
import sys
import time
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import counterexample as cx
from .config import ConfigError, ExperimentConfig, load_config
from .group import DenseCapError, build_basis
from .operators import domination_bounds, hp_norm, maximal_batch, weak_lp
from .rng import signed_uniform
from .spectral import GridFunction, SpectralFunction, forward, inverse, vft_naive
from .summability import fejer_mean, parse_weight, partial_sums_prefix, t_mean

TOL = 1e-9
DENSE_CHAIN_LIMIT = 2**16  # block levels small enough for the all-points chain check


@dataclass
class Table:
    header: list[str]
    rows: list[list] = field(default_factory=list)
    failures: list[str] = field(default_factory=list)

    def to_csv(self) -> str:
        buf = io.StringIO()
        wr = csv.writer(buf, lineterminator="\n")
        wr.writerow(self.header)
        for row in self.rows:
            wr.writerow([_cell(v) for v in row])
        return buf.getvalue()


def _cell(v) -> str:
    if v is None:
        return ""
    if isinstance(v, (bool, np.bool_)):
        return "pass" if v else "fail"
    if isinstance(v, (float, np.floating)):
        return "%.16e" % v
    return str(v)


def _basis_label(m) -> str:
    return "x".join(map(str, m))


def _random_values(cfg: ExperimentConfig, shape, complex_valued: bool) -> np.ndarray:
    re = signed_uniform(cfg.seed, shape, stream=0)
    if not complex_valued:
        return re
    return re + 1j * signed_uniform(cfg.seed, shape, stream=1)


# -- commands -------------------------------------------------------------------


def cmd_transform(cfg: ExperimentConfig, timing: bool = False) -> Table:
    """Fast transform against the direct sum, plus Parseval and round trip."""
    b = build_basis(cfg.m, cfg.N)
    b.require_dense()
    vals = _random_values(cfg, b.size, True)
    f = GridFunction(b, vals)
    t0 = time.perf_counter()
    c = forward(b, vals)
    t1 = time.perf_counter()
    naive = vft_naive(f).coeffs
    t2 = time.perf_counter()
    err = float(np.abs(c - naive).max())
    energy = float(np.mean(np.abs(vals) ** 2))
    parseval = abs(energy - float(np.sum(np.abs(c) ** 2))) / energy
    roundtrip = float(np.abs(inverse(b, c) - vals).max())
    tab = Table(["basis", "M_N", "max_abs_err", "parseval_rel_err", "roundtrip_err",
                 "fast_ms", "naive_ms"])
    tab.rows.append([_basis_label(b.m), b.size, err, parseval, roundtrip,
                     1e3 * (t1 - t0) if timing else None, 1e3 * (t2 - t1) if timing else None])
    if err > TOL:
        tab.failures.append(f"transform mismatch {err:.3e}")
    if roundtrip > 1e-10:
        tab.failures.append(f"round trip error {roundtrip:.3e}")
    return tab


def _weight_or_fejer(label: str):
    return None if label == "fejer" else parse_weight(label)


def cmd_maximal(cfg: ExperimentConfig) -> Table:
    """``T*`` against ``sigma*`` on a seeded batch, with weak-L_p over H_p ratios."""
    b = build_basis(cfg.m, cfg.N)
    b.require_dense()
    ws = [_weight_or_fejer(w) for w in cfg.weights]
    vals = _random_values(cfg, (cfg.batch, b.size), False)
    maxes = maximal_batch(b, vals, [None] + ws)
    sigma = maxes[:, 0]
    hp = {p: np.array([hp_norm(GridFunction(b, v), float(p)) for v in vals]) for p in cfg.p}
    tab = Table(["kind", "p", "n_range", "c", "sup_ratio_weakLp_over_Hp", "domination_margin"])
    for i, (label, w) in enumerate(zip(cfg.weights, ws)):
        tstar = maxes[:, i + 1]
        if w is None:
            c, start = 1.0, 1
        else:
            cs = domination_bounds(w, b.size)
            c = float(np.nanmax(cs)) if np.isfinite(cs).any() else 1.0
            Q = w.Q_array(b.size)
            start = int(np.argmax(Q > 0))
        margin = float((c * sigma - tstar).min())
        for p in cfg.p:
            ratio = max(weak_lp(t, float(p)) / h for t, h in zip(tstar, hp[p]))
            tab.rows.append([label, str(p), f"{start}..{b.size}", c, ratio, margin])
        if margin < -TOL:
            tab.failures.append(f"{label}: domination margin {margin:.3e}")
    return tab


def cmd_counterexample(cfg: ExperimentConfig) -> Table:
    """Per-block rows for the divergence martingale, one block set per ``p < 1/2``."""
    ps = [p for p in cfg.p if p < Fraction(1, 2)]
    if not ps:
        raise ConfigError("counterexample needs some p < 1/2 in [experiment] p")
    if len(set(cfg.m)) == 1:
        radix = cfg.m[0]
    else:
        radix = cfg.m
    ws = [parse_weight(w) for w in cfg.weights]
    tab = Table(["p", "weight", "k", "alpha_k", "M_alpha_k", "cond3", "cond4", "threshold",
                 "i_bound", "min_sample_margin", "dense_min_abs_T", "certified",
                 "chain_pass", "hp_bound", "ratio"])
    for p in ps:
        spec = cx.find_alphas(p, radix, max(cfg.blocks, 2))
        conds = cx.check_conditions(spec)
        for w in ws:
            for k, a in enumerate(spec.alphas):
                row = conds[k]
                thr = margin = dense = cert = ok = ibound = None
                if k >= 1:
                    rep = cx.lower_bound_chain(spec, k, w, samples=cfg.samples)
                    thr, margin, cert, ibound = rep.threshold, rep.min_margin, rep.certified, rep.i_bound
                    ok = rep.passed
                    if spec.M(a + 1) <= DENSE_CHAIN_LIMIT:
                        drep = cx.dense_chain(spec, k, w)
                        dense = drep.min_abs_T
                        ok = ok and drep.passed
                    if cert and not ok:
                        tab.failures.append(f"chain violation p={p} {w.label} k={k}")
                tab.rows.append([str(p), w.label, k, a, spec.M(a), row.cond3, row.cond4, thr,
                                 ibound, margin, dense, cert, ok, cx.hp_bound(spec, k),
                                 cx.divergence_ratio(spec, k)])
                if not row.cond3 or row.cond4 is False:
                    tab.failures.append(f"condition failure at k={k}")
    return tab


def _n_grid(top: int, start: int) -> np.ndarray:
    g = np.unique(np.round(np.geomspace(1, top, 24)).astype(np.int64))
    return g[g >= start]


def cmd_converge(cfg: ExperimentConfig) -> Table:
    """``||T_n f - f||_inf`` for ``f`` with spectrum below ``M_level``, against the certified bound."""
    b = build_basis(cfg.m, cfg.N)
    b.require_dense()
    j = cfg.level
    if not 0 <= j < b.N:
        raise ConfigError(f"level must satisfy 0 <= level < N = {b.N}, got {j}")
    c = np.zeros(b.size)
    c[: b.Mk[j]] = signed_uniform(cfg.seed, b.Mk[j], stream=2)
    return convergence_table(b, c, j, cfg.weights)


def convergence_table(b, c: np.ndarray, j: int, labels, grid: np.ndarray | None = None) -> Table:
    """Rows ``kind, n, err_inf, bound, ok`` for the function with coefficients ``c``.

    ``c`` must vanish from ``M_j`` on.  Then ``T_n f - f`` only involves
    ``S_k f - f`` with ``k < M_j``, which gives the bound
    ``(Q_{M_j} / Q_n) max_{k < M_j} ||S_k f - f||_inf``.  With ``q_0 > 0`` the
    means also carry ``S_0 f = 0``, so constants are reproduced exactly only by
    ``fejer`` and by weights with ``q_0 = 0``.
    """
    Mj = b.Mk[j]
    c = np.asarray(c, dtype=complex)
    if np.any(c[Mj:]):
        raise ValueError(f"coefficients must vanish from index M_{j} = {Mj} on")
    f = GridFunction(b, inverse(b, c))
    S = partial_sums_prefix(SpectralFunction(b, c), Mj)
    worst = float(np.abs(S[:Mj] - f.values[None, :]).max())
    tab = Table(["kind", "n", "err_inf", "bound", "ok"])
    for label in labels:
        w = _weight_or_fejer(label)
        if w is None:
            Q = np.arange(b.size + 1, dtype=float)
            start = 1
        else:
            Q = w.Q_array(b.size)
            start = int(np.argmax(Q > 0))
        ns = _n_grid(b.size, start) if grid is None else [n for n in grid if n >= start]
        for n in ns:
            n = int(n)
            mean = fejer_mean(f, n).values if w is None else t_mean(f, w, n).value.values
            err = float(np.abs(mean - f.values).max())
            bound = Q[Mj] / Q[n] * worst
            ok = bool(err <= bound + TOL)
            tab.rows.append([label, n, err, bound, ok])
            if not ok:
                tab.failures.append(f"{label}: n={n} error {err:.3e} above bound {bound:.3e}")
    return tab


COMMANDS = {
    "transform": cmd_transform,
    "maximal": cmd_maximal,
    "counterexample": cmd_counterexample,
    "converge": cmd_converge,
}


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="vlab", description=__doc__.splitlines()[0])
    ap.add_argument("command", choices=sorted(COMMANDS))
    ap.add_argument("--config", help="experiment INI file (defaults apply if omitted)")
    ap.add_argument("--out", help="CSV destination; '-' for stdout")
    ap.add_argument("--seed", type=int, help="override the configured 64-bit seed")
    ap.add_argument("--quiet", action="store_true", help="no summary on stderr")
    ap.add_argument("--timing", action="store_true",
                    help="fill the transform timing columns (output no longer reproducible)")
    return ap


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config) if args.config else ExperimentConfig()
        if args.seed is not None:
            cfg = cfg.replace(seed=args.seed)
        if args.command == "transform":
            tab = cmd_transform(cfg, timing=args.timing)
        else:
            tab = COMMANDS[args.command](cfg)
    except (ConfigError, DenseCapError) as exc:
        print(f"vlab: {exc}", file=sys.stderr)
        return 2
    text = tab.to_csv()
    out = args.out if args.out is not None else cfg.out
    if out and out != "-":
        with open(out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    if not args.quiet:
        status = "ok" if not tab.failures else f"{len(tab.failures)} failure(s)"
        print(f"vlab {args.command}: {len(tab.rows)} rows, {status}", file=sys.stderr)
        for msg in tab.failures:
            print(f"  {msg}", file=sys.stderr)
    return 1 if tab.failures else 0


if __name__ == "__main__":
    sys.exit(main())
