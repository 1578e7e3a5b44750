"""Command-line front end: experiments and verifications with deterministic
seeding and machine-readable output.

Exit codes: 0 success, 1 usage error, 2 verification failure (a residual or
statistical test out of tolerance; "the math disagrees" rather than a crash).
Every output starts with a metadata header embedding the resolved config and
schema version; the timestamp line can be suppressed for byte-identical runs.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
import time

import numpy as np

from . import SCHEMA_VERSION, __version__
from . import analysis, chains, counting, flow, measures, poisson
from .rng import RngStream

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_VERIFICATION = 2


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse defaults to exit code 2; we want 1
        self.print_usage(sys.stderr)
        sys.stderr.write(f"error: {message}\n")
        raise SystemExit(EXIT_USAGE)


def _meta_lines(config: dict, no_timestamp: bool) -> list[str]:
    head = {
        "tool": "partigrowth",
        "version": __version__,
        "schema": SCHEMA_VERSION,
        "config": config,
    }
    lines = [f"# {json.dumps(head, sort_keys=True)}"]
    if not no_timestamp:
        lines.append(f"# timestamp={time.strftime('%Y-%m-%dT%H:%M:%SZ', time.gmtime())}")
    return lines


def _open_out(path: str | None):
    return open(path, "w") if path else sys.stdout


def _set_threads(args) -> None:
    n = os.environ.get("PARTIGROWTH_THREADS") or getattr(args, "threads", None)
    if n:
        import numba

        numba.set_num_threads(int(n))


def _cell(v) -> str:
    # repr for floats so every emitted number round-trips exactly
    return repr(v) if isinstance(v, float) else str(v)


def _render_rows(fmt: str, header: list[str], rows, out) -> None:
    """Tabular output: csv (machine) or pretty (aligned columns)."""
    if fmt == "jsonl":
        raise ValueError("this command emits tabular data; use csv or pretty")
    text_rows = [[_cell(v) for v in row] for row in rows]
    if fmt == "csv":
        print(",".join(header), file=out)
        for row in text_rows:
            print(",".join(row), file=out)
        return
    widths = [
        max(len(header[i]), *(len(r[i]) for r in text_rows)) if text_rows else len(header[i])
        for i in range(len(header))
    ]
    print("  ".join(h.ljust(w) for h, w in zip(header, widths)), file=out)
    for row in text_rows:
        print("  ".join(c.ljust(w) for c, w in zip(row, widths)), file=out)


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

def _emit_record(fmt: str, rec: dict, out) -> None:
    if fmt == "pretty":
        print("  ".join(f"{k}={_cell(v)}" for k, v in rec.items()), file=out)
    else:
        print(json.dumps(rec), file=out)


def _cmd_sample(args) -> int:
    if args.out == "csv":
        raise ValueError("per-replica output is jsonl or pretty")
    cfg = {"command": "sample", "n": args.n, "replicas": args.replicas, "seed": args.seed}
    rng = RngStream(args.seed, 0)
    out = _open_out(args.output)
    try:
        for line in _meta_lines(cfg, args.no_timestamp):
            print(line, file=out)
        for rep in range(args.replicas):
            lam, attempts = chains.sample_uniform_rejection(args.n, rng.child(rep))
            rec = {"replica": rep, "attempts": attempts, "partition": lam.to_json()}
            _emit_record(args.out, rec, out)
    finally:
        if out is not sys.stdout:
            out.close()
    return EXIT_OK


def _cmd_grow(args) -> int:
    if args.out == "csv":
        raise ValueError("per-replica output is jsonl or pretty")
    cfg = {
        "command": "grow",
        "n": args.n,
        "replicas": args.replicas,
        "seed": args.seed,
        "emit_partitions": args.emit_partitions,
    }
    out = _open_out(args.output)
    try:
        for line in _meta_lines(cfg, args.no_timestamp):
            print(line, file=out)
        hit_partitions = []
        if args.n <= 30:
            # per-replica path: materialized partitions allow the uniformity
            # verdict over the full level
            hits = 0
            for rep in range(args.replicas):
                rng = RngStream(args.seed, rep)
                traj, hit = chains.run_backward_until(args.n, rng)
                hits += hit
                rec = {
                    "seed": args.seed,
                    "stream": rep,
                    "hit": bool(hit),
                    "n_final": traj.final.weight,
                    "steps": len(traj),
                }
                if hit:
                    hit_partitions.append(traj.final)
                    if args.emit_partitions and args.n <= args.emit_partitions:
                        rec["partition"] = traj.final.to_json()
                _emit_record(args.out, rec, out)
            rate = hits / args.replicas
        else:
            stats = chains.backward_hit_stats(args.n, args.replicas, RngStream(args.seed, 0))
            for rep in range(args.replicas):
                rec = {
                    "seed": args.seed,
                    "stream": rep,
                    "hit": bool(stats["finals"][rep] == args.n),
                    "n_final": int(stats["finals"][rep]),
                    "steps": int(stats["steps"][rep]),
                }
                _emit_record(args.out, rec, out)
            rate = stats["hit_rate"]
        gamma = math.exp(measures.log_level_visit_prob(args.n).log_value)
        sd = math.sqrt(gamma * (1 - gamma) / args.replicas)
        summary = {
            "hit_rate": rate,
            "gamma_exact": gamma,
            "z": (rate - gamma) / sd if sd > 0 else 0.0,
        }
        ok = abs(summary["z"]) <= 4.0
        from .partitions import enumerate_partitions

        cells = enumerate_partitions(args.n) if args.n <= 30 else []
        if hit_partitions and len(hit_partitions) >= 5 * len(cells):
            index = {lam: i for i, lam in enumerate(cells)}
            counts = np.zeros(len(cells))
            for lam in hit_partitions:
                counts[index[lam]] += 1
            _, p = analysis.chi_square(counts, np.full(len(cells), 1.0 / len(cells)))
            summary["uniformity_p"] = p
            ok = ok and p > 0.001
        print(f"# summary: {json.dumps(summary)}", file=out)
        return EXIT_OK if ok else EXIT_VERIFICATION
    finally:
        if out is not sys.stdout:
            out.close()


def _cmd_ppp(args) -> int:
    cfg = {"command": "ppp", "smax": args.smax, "seed": args.seed}
    out = _open_out(args.output)
    try:
        for line in _meta_lines(cfg, args.no_timestamp):
            print(line, file=out)
        pts = poisson.sample_trajectory(args.smax, RngStream(args.seed, 0))
        _render_rows(
            args.out, ["s", "t", "k", "r"], [(p.s, p.t, p.k, p.r) for p in pts], out
        )
    finally:
        if out is not sys.stdout:
            out.close()
    return EXIT_OK


def _cmd_verify(args) -> int:
    if args.what == "recursions":
        return _verify_recursions(args)
    if args.what == "identities":
        return _verify_identities(args)
    sys.stderr.write("error: unknown verify target\n")
    return EXIT_USAGE


def _verify_recursions(args) -> int:
    cfg = {"command": "verify recursions", "nmax": args.nmax}
    out = _open_out(args.output)
    failures = 0
    try:
        for line in _meta_lines(cfg, args.no_timestamp):
            print(line, file=out)
        worst = counting.np_recursion_max_residual(args.nmax)
        ok = worst == 0
        failures += not ok
        print(f"weighted-convolution residual n<=%d: %s (max |residual| = %d)"
              % (args.nmax, "PASS" if ok else "FAIL", worst), file=out)
        enum_max = min(args.nmax, 40)
        from .partitions import enumerate_partitions

        ok = all(
            len(enumerate_partitions(n)) == counting.partition_count(n)
            for n in range(enum_max + 1)
        )
        failures += not ok
        print(f"count vs enumeration n<=%d: %s" % (enum_max, "PASS" if ok else "FAIL"), file=out)
        sm = counting.strict_partition_counts_upto(max(200, min(args.nmax, 1000)))
        ok = all(sm[n + 1] > sm[n] for n in range(4, len(sm) - 1))
        failures += not ok
        print(f"strict counts strictly increase for n>=4: %s" % ("PASS" if ok else "FAIL"), file=out)
    finally:
        if out is not sys.stdout:
            out.close()
    return EXIT_VERIFICATION if failures else EXIT_OK


def _parse_precision(text: str) -> int | None:
    if text == "double":
        return None
    if text.startswith("mp:"):
        d = int(text.split(":", 1)[1])
        if d < 50:
            raise ValueError("high-precision mode needs at least 50 digits")
        return d
    raise ValueError(f"bad precision {text!r}; use double or mp:<digits>")


def _verify_identities(args) -> int:
    try:
        dps = _parse_precision(args.precision)
    except ValueError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_USAGE
    cfg = {"command": "verify identities", "nmax": args.nmax, "precision": args.precision}
    out = _open_out(args.output)
    failures = 0
    try:
        for line in _meta_lines(cfg, args.no_timestamp):
            print(line, file=out)
        rows = []
        for n in range(args.nmax + 1):
            for fn in (measures.backward_normalization_residual, measures.divisor_identity_residual):
                chk = fn(n, dps=dps)
                failures += not chk.passed
                rows.append((chk.name, n, chk.residual, chk.tail_bound, int(chk.passed)))
        # closed form vs resummed series at a few weights
        for n in (1, 5, 20, min(args.nmax, 200)) if args.nmax >= 1 else ():
            cf = math.exp(measures._log_visit_prob_float(n))
            acc = measures.visit_prob_series_accelerated(n)
            resid = abs(acc - cf) / cf
            ok = resid <= 1e-9
            failures += not ok
            rows.append(("visit-series-vs-closed-form", n, resid, math.nan, int(ok)))
        for q in (0.1, 0.5, 0.9):
            resid = abs(measures.euler_product(q) - measures.pentagonal_series(q))
            ok = resid <= 1e-12
            failures += not ok
            rows.append(("pentagonal-product", int(q * 10), resid, math.nan, int(ok)))
        _render_rows(args.out, ["name", "n", "residual", "bound", "pass"], rows, out)
    finally:
        if out is not sys.stdout:
            out.close()
    return EXIT_VERIFICATION if failures else EXIT_OK


def _cmd_shape(args) -> int:
    cfg = {
        "command": "shape",
        "n": args.n,
        "samples": args.samples,
        "x0": args.x0,
        "seed": args.seed,
    }
    out = _open_out(args.output)
    try:
        for line in _meta_lines(cfg, args.no_timestamp):
            print(line, file=out)
        dists = []
        rows = []
        batch = 250
        done = 0
        b = 0
        while done < args.samples:
            take = min(batch, args.samples - done)
            cnts, _ = chains.uniform_counts_batch(args.n, take, RngStream(args.seed, b))
            for i in range(take):
                d = analysis.sup_distance_from_counts(cnts[i], args.n, args.x0)
                dists.append(d)
                rows.append(("sample", float(done + i), d))
            done += take
            b += 1
        for x in np.geomspace(max(args.x0, 1e-3), 6.0, 120):
            rows.append(("curve", float(x), measures.limit_shape(float(x))))
        _render_rows(args.out, ["kind", "key", "value"], rows, out)
        dists = np.array(dists)
        summary = {
            "median": float(np.median(dists)),
            "frac_within_0.05": float((dists <= 0.05).mean()),
        }
        print(f"# summary: {json.dumps(summary)}", file=out)
    finally:
        if out is not sys.stdout:
            out.close()
    return EXIT_OK


def _cmd_oddeven(args) -> int:
    cfg = {"command": "oddeven", "n": args.n, "samples": args.samples, "seed": args.seed}
    out = _open_out(args.output)
    try:
        for line in _meta_lines(cfg, args.no_timestamp):
            print(line, file=out)
        xs, ys, ls = [], [], []
        done = 0
        b = 0
        while done < args.samples:
            take = min(250, args.samples - done)
            cnts, _ = chains.uniform_counts_batch(args.n, take, RngStream(args.seed, b))
            for i in range(take):
                x, y, ell = analysis.odd_even_from_counts(cnts[i], args.n)
                xs.append(x)
                ys.append(y)
                ls.append(ell)
            done += take
            b += 1
        _render_rows(args.out, ["x", "y"], list(zip(xs, ys)), out)
        xs, ys, ls = map(np.asarray, (xs, ys, ls))
        ks_o = analysis.ks_statistic(xs, lambda v: analysis.limiting_cdfs(v).H_o)
        ks_e = analysis.ks_statistic(ys, lambda v: analysis.limiting_cdfs(v).H_e)
        ks_l = analysis.ks_statistic(ls, lambda v: analysis.limiting_cdfs(v).gumbel_length)
        corr = float(np.corrcoef(xs, ys)[0, 1])
        ok = ks_o <= 0.06 and ks_e <= 0.06 and ks_l <= 0.06 and abs(corr) <= 0.08
        summary = {
            "ks_odd": ks_o,
            "ks_even": ks_e,
            "ks_length": ks_l,
            "corr": corr,
            "pass": bool(ok),
        }
        print(f"# summary: {json.dumps(summary)}", file=out)
        return EXIT_OK if ok else EXIT_VERIFICATION
    finally:
        if out is not sys.stdout:
            out.close()


def _cmd_flowcheck(args) -> int:
    cfg = {"command": "flowcheck", "kind": args.kind, "nmax": args.nmax}
    out = _open_out(args.output)
    failures = 0
    try:
        for line in _meta_lines(cfg, args.no_timestamp):
            print(line, file=out)
        rows = []
        for rep in flow.scan_levels(args.nmax, args.kind):
            rows.append(
                (rep.n, rep.left_size, rep.right_size, int(rep.feasible), rep.violating_set_size)
            )
            if rep.expected_infeasible and rep.feasible:
                failures += 1
        _render_rows(
            args.out,
            ["n", "left_size", "right_size", "feasible", "violating_set_size"],
            rows,
            out,
        )
    finally:
        if out is not sys.stdout:
            out.close()
    return EXIT_VERIFICATION if failures else EXIT_OK


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="partigrowth", description=__doc__)
    p.add_argument("--threads", type=int, default=None, help="worker threads (default: all cores)")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--out", choices=["jsonl", "csv", "pretty"], default="csv")
        sp.add_argument("--output", default=None, help="output file (default stdout)")
        sp.add_argument("--no-timestamp", action="store_true")

    sp = sub.add_parser("sample", help="uniform partitions by plain rejection")
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--replicas", type=int, default=10)
    common(sp)
    sp.set_defaults(func=_cmd_sample, out="jsonl")

    sp = sub.add_parser("grow", help="backward growth runs to a target level")
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--replicas", type=int, default=1000)
    sp.add_argument("--emit-partitions", type=int, default=0, metavar="CAP",
                    help="emit hit partitions when n <= CAP (slow per-replica path)")
    common(sp)
    sp.set_defaults(func=_cmd_grow, out="jsonl")

    sp = sub.add_parser("ppp", help="marked Poisson trajectory")
    sp.add_argument("--smax", type=float, required=True)
    common(sp)
    sp.set_defaults(func=_cmd_ppp)

    sp = sub.add_parser("verify", help="identity and recursion verifications")
    sp.add_argument("what", choices=["identities", "recursions"])
    sp.add_argument("--nmax", type=int, default=100)
    sp.add_argument("--precision", default="double", help="double or mp:<digits>")
    common(sp)
    sp.set_defaults(func=_cmd_verify)

    sp = sub.add_parser("shape", help="limit-shape distances of uniform samples")
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--samples", type=int, default=200)
    sp.add_argument("--x0", type=float, default=0.1)
    common(sp)
    sp.set_defaults(func=_cmd_shape)

    sp = sub.add_parser("oddeven", help="odd/even part-count limit law")
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--samples", type=int, default=2000)
    common(sp)
    sp.set_defaults(func=_cmd_oddeven)

    sp = sub.add_parser("flowcheck", help="adjacent-level transportation feasibility")
    sp.add_argument("--kind", choices=["ordinary", "strict"], default="ordinary")
    sp.add_argument("--nmax", type=int, default=25)
    common(sp)
    sp.set_defaults(func=_cmd_flowcheck)
    return p


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    _set_threads(args)
    try:
        return args.func(args)
    except (ValueError, RuntimeError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
