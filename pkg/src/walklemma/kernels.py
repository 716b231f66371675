"""Hot numeric kernels, each with a numba path and a numpy path.

The public names at the bottom of the module dispatch on
:data:`walklemma._accel.HAVE_NUMBA`; both implementations stay importable
so tests and the benchmark can compare them directly.
"""
import numpy as np

from ._accel import HAVE_NUMBA, jit

DIVERGED = 1.0

# --------------------------------------------------------------------------
# restricted independent-set polynomial table
# --------------------------------------------------------------------------


def restricted_table_numpy(nbr_masks, x):
    """``Z[S] = Z_G(x; S)`` for every subset mask ``S``.

    Adds vertices in label order: for ``S`` with highest vertex ``i``,
    ``Z[S] = Z[S - i] + x_i * Z[(S - i) minus N(i)]``.
    """
    n = len(x)
    z = np.empty(1 << n, dtype=np.float64)
    z[0] = 1.0
    for i in range(n):
        base = 1 << i
        idx = np.arange(base, dtype=np.int64)
        z[base:2 * base] = z[:base] + x[i] * z[idx & ~np.int64(nbr_masks[i])]
    return z


@jit
def restricted_table_numba(nbr_masks, x):
    n = len(x)
    z = np.empty(1 << n, dtype=np.float64)
    z[0] = 1.0
    for i in range(n):
        base = 1 << i
        keep = ~nbr_masks[i]
        xi = x[i]
        for m in range(base):
            z[base + m] = z[m] + xi * z[m & keep]
    return z


# --------------------------------------------------------------------------
# fixed-point step on a class automaton (CSR successor lists)
# --------------------------------------------------------------------------


def _successor_products(indptr, succ, r):
    """``prod_{c' in succ(c)} (1 - r_c')`` for every class, clamped at 0."""
    one_minus = np.maximum(1.0 - r, 0.0)
    prod = np.ones(len(indptr) - 1, dtype=np.float64)
    if len(succ):
        nz = np.diff(indptr) > 0
        prod[nz] = np.multiply.reduceat(one_minus[succ], indptr[:-1][nz])
    return prod


def iterate_numpy(indptr, succ, weight, r):
    """One Jacobi step ``r'_c = w_c / prod_{c' in succ(c)} (1 - r_c')``.

    Components that reach 1 are set to :data:`DIVERGED`.  Returns
    ``(r', number_diverged)``.
    """
    prod = _successor_products(indptr, succ, r)
    with np.errstate(divide="ignore", invalid="ignore"):
        out = np.where(prod > 0, weight / np.where(prod > 0, prod, 1.0), np.inf)
    bad = ~(out < DIVERGED)
    out[bad] = DIVERGED
    return out, int(bad.sum())


@jit
def iterate_numba(indptr, succ, weight, r):
    n = len(weight)
    out = np.empty(n, dtype=np.float64)
    bad = 0
    for c in range(n):
        prod = 1.0
        for k in range(indptr[c], indptr[c + 1]):
            v = r[succ[k]]
            if v >= DIVERGED:
                prod = 0.0
                break
            prod *= 1.0 - v
        val = weight[c] / prod if prod > 0.0 else np.inf
        if not val < DIVERGED:
            val = DIVERGED
            bad += 1
        out[c] = val
    return out, bad


def run_iteration_numpy(indptr, succ, weight, r0, max_iter, tol):
    """Iterate from ``r0`` until the relative change is below ``tol``.

    Returns ``(r, iterations, status, last_change, bad_class)`` where status
    is 1 when converged, -1 when component ``bad_class`` reached 1 (``r`` is
    then only meaningful at that index) and 0 when ``max_iter`` ran out.
    Asserts monotone growth, which holds whenever ``r0`` is a sub-solution.
    """
    r = r0.copy()
    change = np.inf
    for it in range(1, max_iter + 1):
        new, bad = iterate_numpy(indptr, succ, weight, r)
        if bad:
            return new, it, -1, np.inf, int(np.argmax(new >= DIVERGED))
        if np.any(new < r):
            raise AssertionError("fixed-point iterates must be non-decreasing")
        with np.errstate(invalid="ignore", divide="ignore"):
            rel = np.where(new > 0, (new - r) / np.where(new > 0, new, 1.0), 0.0)
        change = float(rel.max()) if len(rel) else 0.0
        r = new
        if change <= tol:
            return r, it, 1, change, -1
    return r, max_iter, 0, change, -1


@jit
def run_iteration_numba(indptr, succ, weight, r0, max_iter, tol):
    n = len(weight)
    r = r0.copy()
    new = np.empty(n, dtype=np.float64)
    change = np.inf
    for it in range(1, max_iter + 1):
        change = 0.0
        for c in range(n):
            prod = 1.0
            for k in range(indptr[c], indptr[c + 1]):
                prod *= 1.0 - r[succ[k]]
            val = weight[c] / prod if prod > 0.0 else np.inf
            if not val < DIVERGED:
                new[c] = DIVERGED
                return new, it, -1, np.inf, c
            if val < r[c]:
                raise AssertionError("fixed-point iterates must be non-decreasing")
            if val > 0.0:
                d = (val - r[c]) / val
                if d > change:
                    change = d
            new[c] = val
        r, new = new, r
        if change <= tol:
            return r, it, 1, change, -1
    return r, max_iter, 0, change, -1


# --------------------------------------------------------------------------
# certificate inequality with a rounding-error allowance
# --------------------------------------------------------------------------

UNIT_ROUNDOFF = 2.0 ** -53


def certificate_slack_numpy(indptr, succ, weight, r):
    """Per-class ``rhs_lower - w_c`` for ``w_c <= r_c prod (1 - r_c')``.

    ``rhs_lower`` is the float product shrunk by ``2d + 2`` unit roundoffs
    (``d`` = out-degree), which covers one subtraction and one multiplication
    per factor plus the shrinking itself under round-to-nearest.  With no
    successors the product is ``r`` exactly and nothing is shrunk.  A
    non-negative slack therefore proves the real inequality.
    """
    n = len(weight)
    one_minus = 1.0 - r
    rhs = r.copy()
    counts = np.diff(indptr)
    if len(succ):
        nz = counts > 0
        with np.errstate(under="ignore"):
            prods = np.multiply.reduceat(one_minus[succ], indptr[:-1][nz])
        rhs[nz] = rhs[nz] * prods
    rhs = rhs * np.where(counts > 0, 1.0 - (2 * counts + 2) * UNIT_ROUNDOFF, 1.0)
    slack = rhs - weight
    slack[~((r >= 0.0) & (r < 1.0))] = -np.inf
    return slack if n else np.zeros(0)


@jit
def certificate_slack_numba(indptr, succ, weight, r):
    n = len(weight)
    slack = np.empty(n, dtype=np.float64)
    for c in range(n):
        rc = r[c]
        if not (rc >= 0.0 and rc < 1.0):
            slack[c] = -np.inf
            continue
        prod = rc
        d = indptr[c + 1] - indptr[c]
        for k in range(indptr[c], indptr[c + 1]):
            prod *= 1.0 - r[succ[k]]
        if d > 0:
            prod *= 1.0 - (2 * d + 2) * UNIT_ROUNDOFF
        slack[c] = prod - weight[c]
    return slack



# --------------------------------------------------------------------------
# breadth-first class enumeration for lattice automata
# --------------------------------------------------------------------------
#
# A state is a row of uint64 words: word 0 is the terminal's sublattice, the
# remaining words are forbidden-set bitmasks, one per tracked filter slot.
# For a move ``d`` out of sublattice ``s`` the entries
# ``ent_ptr[s * ndir + d] : ent_ptr[s * ndir + d + 1]`` describe, for each
# slot of the target sublattice, where its mask comes from:
# ``ent_old >= 0`` continues that slot of the current state (move rejected if
# ``mask & ent_bit``; new mask ``mask | ent_add``), ``ent_old < 0`` starts a
# fresh mask ``ent_add``.

_FNV_OFFSET = np.uint64(1469598103934665603)
_FNV_PRIME = np.uint64(1099511628211)
_SHIFT = np.uint64(29)


def lattice_bfs_python(roots, nsub_dirs, ndir, target_sub, ent_ptr, ent_old, ent_bit, ent_add,
                       budget):
    """Reference BFS using a dict keyed by row bytes.

    Returns ``(rows, indptr, succ, letter, start, status)``; ``status`` is -1
    when the budget was exceeded (arrays then hold the partial automaton).
    """
    width = roots.shape[1]
    index = {}
    rows = []
    start = np.empty(len(roots), dtype=np.int64)
    for s in range(len(roots)):
        key = roots[s].tobytes()
        if key not in index:
            index[key] = len(rows)
            rows.append(roots[s].copy())
        start[s] = index[key]
    indptr = [0]
    succ = []
    letter = []
    status = 0
    i = 0
    while i < len(rows):
        row = rows[i]
        s = int(row[0])
        for d in range(nsub_dirs[s]):
            tmp = np.zeros(width, dtype=np.uint64)
            tmp[0] = target_sub[s * ndir + d]
            ok = True
            for slot, e in enumerate(range(ent_ptr[s * ndir + d], ent_ptr[s * ndir + d + 1])):
                old = ent_old[e]
                if old < 0:
                    tmp[1 + slot] = ent_add[e]
                else:
                    f = row[1 + old]
                    if f & ent_bit[e]:
                        ok = False
                        break
                    tmp[1 + slot] = f | ent_add[e]
            if not ok:
                continue
            key = tmp.tobytes()
            j = index.get(key)
            if j is None:
                if len(rows) >= budget:
                    status = -1
                    break
                j = len(rows)
                index[key] = j
                rows.append(tmp)
            succ.append(j)
            letter.append(d)
        if status < 0:
            break
        indptr.append(len(succ))
        i += 1
    out_rows = np.array(rows, dtype=np.uint64).reshape(len(rows), width)
    return (out_rows, np.array(indptr, dtype=np.int64), np.array(succ, dtype=np.int64),
            np.array(letter, dtype=np.int64), start, status)


@jit
def _row_hash(buf, width):
    h = _FNV_OFFSET
    for k in range(width):
        h ^= buf[k]
        h *= _FNV_PRIME
        h ^= h >> _SHIFT
    return h


@jit
def _rows_equal(a, b, width):
    for k in range(width):
        if a[k] != b[k]:
            return False
    return True


@jit
def _find_or_insert(table, rows, count, buf, width):
    """Index of ``buf`` in ``rows[:count]``; ``-(slot + 1)`` if absent."""
    tmask = np.uint64(len(table) - 1)
    h = _row_hash(buf, width) & tmask
    while True:
        idx = table[np.int64(h)]
        if idx < 0:
            return -(np.int64(h) + 1)
        if _rows_equal(rows[idx], buf, width):
            return idx
        h = (h + np.uint64(1)) & tmask


@jit
def _rehash(rows, count, size, width):
    table = np.full(size, -1, dtype=np.int64)
    tmask = np.uint64(size - 1)
    for i in range(count):
        h = _row_hash(rows[i], width) & tmask
        while table[np.int64(h)] >= 0:
            h = (h + np.uint64(1)) & tmask
        table[np.int64(h)] = i
    return table


@jit
def lattice_bfs_numba(roots, nsub_dirs, ndir, target_sub, ent_ptr, ent_old, ent_bit, ent_add,
                      budget):
    width = roots.shape[1]
    cap = 1024
    rows = np.zeros((cap, width), dtype=np.uint64)
    table = np.full(4 * cap, -1, dtype=np.int64)
    count = 0
    start = np.empty(roots.shape[0], dtype=np.int64)
    for s in range(roots.shape[0]):
        r = _find_or_insert(table, rows, count, roots[s], width)
        if r < 0:
            table[-r - 1] = count
            rows[count, :] = roots[s]
            r = count
            count += 1
        start[s] = r
    tcap = 4096
    succ = np.empty(tcap, dtype=np.int64)
    letter = np.empty(tcap, dtype=np.int64)
    ntrans = 0
    indptr_cap = 1024
    indptr = np.zeros(indptr_cap + 1, dtype=np.int64)
    tmp = np.zeros(width, dtype=np.uint64)
    status = 0
    i = 0
    while i < count:
        s = np.int64(rows[i, 0])
        for d in range(nsub_dirs[s]):
            key = s * ndir + d
            for k in range(width):
                tmp[k] = 0
            tmp[0] = np.uint64(target_sub[key])
            ok = True
            slot = 0
            for e in range(ent_ptr[key], ent_ptr[key + 1]):
                old = ent_old[e]
                if old < 0:
                    tmp[1 + slot] = ent_add[e]
                else:
                    f = rows[i, 1 + old]
                    if (f & ent_bit[e]) != np.uint64(0):
                        ok = False
                        break
                    tmp[1 + slot] = f | ent_add[e]
                slot += 1
            if not ok:
                continue
            r = _find_or_insert(table, rows, count, tmp, width)
            if r < 0:
                if count >= budget:
                    status = -1
                    break
                if count == rows.shape[0]:
                    grown = np.zeros((2 * rows.shape[0], width), dtype=np.uint64)
                    grown[:count, :] = rows[:count, :]
                    rows = grown
                rows[count, :] = tmp
                if 2 * (count + 1) > len(table):
                    table = _rehash(rows, count + 1, 2 * len(table), width)
                else:
                    table[-r - 1] = count
                r = count
                count += 1
            if ntrans == len(succ):
                s2 = np.empty(2 * len(succ), dtype=np.int64)
                l2 = np.empty(2 * len(succ), dtype=np.int64)
                s2[:ntrans] = succ[:ntrans]
                l2[:ntrans] = letter[:ntrans]
                succ, letter = s2, l2
            succ[ntrans] = r
            letter[ntrans] = d
            ntrans += 1
        if status < 0:
            break
        if i + 1 >= len(indptr):
            ip2 = np.zeros(2 * len(indptr), dtype=np.int64)
            ip2[:len(indptr)] = indptr
            indptr = ip2
        indptr[i + 1] = ntrans
        i += 1
    return (rows[:count].copy(), indptr[:i + 1].copy(), succ[:ntrans].copy(),
            letter[:ntrans].copy(), start, status)

if HAVE_NUMBA:
    restricted_table = restricted_table_numba
    iterate = iterate_numba
    run_iteration = run_iteration_numba
    certificate_slack = certificate_slack_numba
    lattice_bfs = lattice_bfs_numba
else:  # pragma: no cover - exercised with WALKLEMMA_DISABLE_NUMBA=1
    restricted_table = restricted_table_numpy
    iterate = iterate_numpy
    run_iteration = run_iteration_numpy
    certificate_slack = certificate_slack_numpy
    lattice_bfs = lattice_bfs_python
