"""Time the numba kernels against their numpy/python fallbacks.

    python benchmarks/bench_kernels.py [--repeat 5]

Both versions are called directly, so no environment flag is needed.  Each
row also checks that the two paths agree.
"""
import argparse
import time

import numpy as np

from walklemma import kernels
from walklemma.graph import petersen_graph, torus_grid
from walklemma.lattice import (CUBIC, SQUARE, _roots, _slot_tables, _transition_plan,
                               build_lattice_automaton, preset_pattern)
from walklemma.walks import build_class_automaton, preset_filters


def best_of(fn, repeat):
    fn()  # warm-up, includes JIT compilation
    times = []
    for _ in range(repeat):
        t = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t)
    return min(times), out


def lattice_inputs(spec, name):
    pattern = preset_pattern(spec, name)
    pats, pidx, slots = _slot_tables(spec, pattern, None)
    width = 1 + max(len(s) for s in slots)
    return (_roots(spec, pats, slots, width),) + _transition_plan(spec, pats, pidx, slots)


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    rows = []

    g = torus_grid(4, 5)
    nbr = np.array(g.masks, dtype=np.int64)
    x = -np.full(g.n, 0.05)
    t_nb, a = best_of(lambda: kernels.restricted_table_numba(nbr, x), args.repeat)
    t_np, b = best_of(lambda: kernels.restricted_table_numpy(nbr, x), args.repeat)
    rows.append(("restricted_table torus 4x5", t_nb, t_np, np.allclose(a, b, rtol=1e-12)))

    a_sq = build_lattice_automaton(SQUARE, preset_pattern(SQUARE, "ball:3"))
    w = np.full(a_sq.num_classes, 0.11)
    r = np.full(a_sq.num_classes, 0.2)
    t_nb, a = best_of(lambda: kernels.iterate_numba(a_sq.indptr, a_sq.succ, w, r), args.repeat)
    t_np, b = best_of(lambda: kernels.iterate_numpy(a_sq.indptr, a_sq.succ, w, r), args.repeat)
    rows.append((f"iterate square ball:3 ({a_sq.num_classes} classes)", t_nb, t_np,
                 np.allclose(a[0], b[0], rtol=1e-13)))

    r0 = np.zeros(a_sq.num_classes)
    t_nb, a = best_of(lambda: kernels.run_iteration_numba(a_sq.indptr, a_sq.succ, w, r0, 2000, 1e-12),
                      args.repeat)
    t_np, b = best_of(lambda: kernels.run_iteration_numpy(a_sq.indptr, a_sq.succ, w, r0, 2000, 1e-12),
                      args.repeat)
    rows.append(("run_iteration square ball:3", t_nb, t_np, np.allclose(a[0], b[0], rtol=1e-12)))

    ga = build_class_automaton(petersen_graph(), preset_filters(petersen_graph(), "neighborhoods"))
    wp = np.full(ga.num_classes, 0.12)
    rp = np.full(ga.num_classes, 0.3)
    t_nb, a = best_of(lambda: kernels.certificate_slack_numba(ga.indptr, ga.succ, wp, rp), args.repeat)
    t_np, b = best_of(lambda: kernels.certificate_slack_numpy(ga.indptr, ga.succ, wp, rp), args.repeat)
    rows.append(("certificate_slack petersen", t_nb, t_np, np.allclose(a, b, rtol=1e-12)))

    inp = lattice_inputs(CUBIC, "ball:2")
    t_nb, a = best_of(lambda: kernels.lattice_bfs_numba(*inp, 10 ** 6), 1)
    t_np, b = best_of(lambda: kernels.lattice_bfs_python(*inp, 10 ** 6), 1)
    same = all(np.array_equal(u, v) for u, v in zip(a[:5], b[:5]))
    rows.append((f"lattice_bfs cubic ball:2 ({len(a[0])} classes)", t_nb, t_np, same))

    print(f"{'kernel':48s} {'numba [s]':>10s} {'fallback [s]':>13s} {'speedup':>8s}  agree")
    for name, tn, tp, ok in rows:
        print(f"{name:48s} {tn:10.5f} {tp:13.5f} {tp / tn:8.1f}  {ok}")


if __name__ == "__main__":
    main()
