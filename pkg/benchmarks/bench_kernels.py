"""Time the numpy and numba builds of the finite-space kernels.

Two workload shapes: the single-scan kernels walk all p**n tuple codes, the
pair kernels walk p**(2n) comparable pairs, so each group gets its own
(p, n) sized to land near the documented 10**6 hot-loop scale. Outputs of
the two builds are compared for equality before timing counts.

Run from a checkout:

    python benchmarks/bench_kernels.py
    python benchmarks/bench_kernels.py --scan-p 8 --scan-n 6 --repeats 5 --json out.json
"""

import argparse
import json
import time

import numpy as np

from starfix._kernels import IMPLEMENTATIONS

SCAN_KERNELS = (
    "coincidence_mask",
    "common_fixed_mask",
    "fstar_codes",
    "bigg_codes",
    "commuting_violation",
)
PAIR_KERNELS = (
    "monotone_violation",
    "argumentwise_violation",
    "comparable_pair_codes",
)


def make_workload(rng, p, n):
    from starfix._kernels import all_digit_rows

    f_flat = rng.integers(0, p, size=p**n).astype(np.int64)
    g_tab = rng.integers(0, p, size=p).astype(np.int64)
    rows0 = rng.integers(0, n, size=(n, n)).astype(np.int64)
    ids = np.arange(p, dtype=np.int64)
    leq = np.ascontiguousarray(ids[:, None] <= ids[None, :])  # chain: dense order
    g_leq = np.ascontiguousarray(leq[g_tab[:, None], g_tab[None, :]])
    # the violation kernels stop at the first hit, so they only do full
    # work on clean instances: max-of-slots is monotone on the chain and
    # any map commutes with the identity
    f_clean = np.ascontiguousarray(all_digit_rows(p, n).max(axis=1))
    return {
        "f_flat": f_flat,
        "f_clean": f_clean,
        "g_tab": g_tab,
        "g_id": ids,
        "rows0": rows0,
        "leq": leq,
        "g_leq": g_leq,
        "p": p,
        "n": n,
    }


def call(fn, name, w):
    if name in ("coincidence_mask", "common_fixed_mask"):
        return fn(w["f_flat"], w["g_tab"], w["rows0"], w["p"], w["n"])
    if name == "fstar_codes":
        return fn(w["f_flat"], w["rows0"], w["p"], w["n"])
    if name == "bigg_codes":
        return fn(w["g_tab"], w["p"], w["n"])
    if name == "commuting_violation":
        return fn(w["f_flat"], w["g_id"], w["p"], w["n"])
    if name in ("monotone_violation", "argumentwise_violation"):
        return fn(w["f_clean"], w["leq"], w["leq"], w["p"], w["n"])
    return fn(w["g_leq"], w["p"], w["n"])  # comparable_pair_codes


def best_of(fn, name, w, repeats):
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        call(fn, name, w)
        best = min(best, time.perf_counter() - t0)
    return best


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--scan-p", type=int, default=10, help="alphabet for scan kernels")
    ap.add_argument("--scan-n", type=int, default=6, help="tuple length for scan kernels")
    ap.add_argument("--pair-p", type=int, default=10, help="alphabet for pair kernels")
    ap.add_argument("--pair-n", type=int, default=3, help="tuple length for pair kernels")
    ap.add_argument("--repeats", type=int, default=3, help="timed repeats, best kept")
    ap.add_argument("--seed", type=int, default=20240822)
    ap.add_argument("--json", metavar="PATH", help="also write results as JSON")
    args = ap.parse_args(argv)

    numpy_build = IMPLEMENTATIONS["numpy"]
    numba_build = IMPLEMENTATIONS["numba"]
    if numba_build is None:
        print("numba build unavailable (STARFIX_BACKEND=numpy or numba not installed);")
        print("timing the numpy build alone.")

    rng = np.random.default_rng(args.seed)
    scan_w = make_workload(rng, args.scan_p, args.scan_n)
    pair_w = make_workload(rng, args.pair_p, args.pair_n)

    rows = []
    for name in SCAN_KERNELS + PAIR_KERNELS:
        w = scan_w if name in SCAN_KERNELS else pair_w
        codes = w["p"] ** w["n"]
        work = codes if name in SCAN_KERNELS else codes * codes
        np_fn = numpy_build[name]
        np_out = call(np_fn, name, w)  # warm caches
        row = {
            "kernel": name,
            "work_items": work,
            "numpy_ms": best_of(np_fn, name, w, args.repeats) * 1e3,
        }
        if numba_build is not None:
            nb_fn = numba_build[name]
            nb_out = call(nb_fn, name, w)  # compile before timing
            if not np.array_equal(np.asarray(np_out), np.asarray(nb_out)):
                raise SystemExit(f"builds disagree on {name}")
            row["numba_ms"] = best_of(nb_fn, name, w, args.repeats) * 1e3
            row["speedup"] = row["numpy_ms"] / row["numba_ms"]
        rows.append(row)

    header = f"{'kernel':<24} {'items':>9} {'numpy ms':>10}"
    if numba_build is not None:
        header += f" {'numba ms':>10} {'speedup':>8}"
    print(header)
    print("-" * len(header))
    for row in rows:
        line = f"{row['kernel']:<24} {row['work_items']:>9} {row['numpy_ms']:>10.3f}"
        if "numba_ms" in row:
            line += f" {row['numba_ms']:>10.3f} {row['speedup']:>7.2f}x"
        print(line)

    if args.json:
        doc = {
            "scan_shape": {"p": args.scan_p, "n": args.scan_n},
            "pair_shape": {"p": args.pair_p, "n": args.pair_n},
            "repeats": args.repeats,
            "seed": args.seed,
            "results": rows,
        }
        with open(args.json, "w", encoding="utf-8") as fh:
            json.dump(doc, fh, indent=2, sort_keys=True)
            fh.write("\n")


if __name__ == "__main__":
    main()
