"""Low-index subgroups by backtracking over partial coset tables.

Cosets are numbered by a fixed traversal: for each coset k in turn, trace
every relator from k, then read off k's remaining row.  The search always
fills the first empty entry that traversal meets, so a new coset gets the
next number exactly where it first appears and every partial table is in
canonical form.  Following relators first closes relator cycles early,
which is where relator scanning finds its deductions and contradictions.

One table per conjugacy class is kept by comparing, step by step, the
traversal from base 0 with the traversal from every other coset; a branch
is cut as soon as some other base gives a smaller sequence.

Which rotation (and direction) of each relator the traversal follows does
not affect the result, only the size of the search tree, so for larger
indices it is picked by counting nodes of a small pilot search.  The
search loop is compiled with numba.
"""
from __future__ import annotations

import numpy as np
from numba import njit

from ..words import Presentation
from .cosets import CosetTable, word_columns

_RESET = -1


def _rotations(pres: Presentation) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Cyclic rotations of relators and their inverses, grouped by first column.

    Returns (ptr, spans, data): rotations starting with column x are rows
    ``spans[ptr[x]:ptr[x+1]]``, each an (offset, length) slice of ``data``.
    """
    ncols = 2 * pres.ngens
    by_col: list[list[tuple[int, ...]]] = [[] for _ in range(ncols)]
    seen = set()
    for r in pres.relators:
        for w in (r, r.inverse()):
            cols = word_columns(w)
            for s in range(len(cols)):
                rot = tuple(cols[s:] + cols[:s])
                if rot and rot not in seen:
                    seen.add(rot)
                    by_col[rot[0]].append(rot)
    ptr = np.zeros(ncols + 1, dtype=np.int64)
    spans = []
    data: list[int] = []
    for x in range(ncols):
        for rot in by_col[x]:
            spans.append((len(data), len(rot)))
            data.extend(rot)
        ptr[x + 1] = len(spans)
    return (
        ptr,
        np.array(spans, dtype=np.int64).reshape(-1, 2),
        np.array(data, dtype=np.int64).reshape(-1),
    )


def _row_program(relators: list[list[int]], ncols: int) -> np.ndarray:
    """Per-coset traversal: trace each relator, then visit every column."""
    prog: list[int] = []
    for cols in relators:
        if cols:
            prog.append(_RESET)
            prog.extend(cols)
    for x in range(ncols):
        prog.extend((_RESET, x))
    return np.array(prog, dtype=np.int64)


@njit(cache=True)
def _assign(t, trail, top, c, x, d):
    # top[0] is the trail length; False on conflict
    if t[c, x] != -1:
        return t[c, x] == d
    if t[d, x ^ 1] != -1:
        return False
    t[c, x] = d
    t[d, x ^ 1] = c
    k = top[0]
    trail[k, 0] = c
    trail[k, 1] = x
    trail[k + 1, 0] = d
    trail[k + 1, 1] = x ^ 1
    top[0] = k + 2
    return True


@njit(cache=True)
def _deduce(t, trail, top, queue, c0, x0, ptr, spans, data):
    """Scan every relator cycle through newly filled edges."""
    qn = 1
    queue[0, 0] = c0
    queue[0, 1] = x0
    while qn > 0:
        qn -= 1
        c = queue[qn, 0]
        x = queue[qn, 1]
        for k in range(ptr[x], ptr[x + 1]):
            off = spans[k, 0]
            L = spans[k, 1]
            f = c
            i = 0
            while i < L:
                nf = t[f, data[off + i]]
                if nf == -1:
                    break
                f = nf
                i += 1
            if i == L:
                if f != c:
                    return False
                continue
            b = c
            j = L - 1
            while j > i:
                nb = t[b, data[off + j] ^ 1]
                if nb == -1:
                    break
                b = nb
                j -= 1
            if j == i:
                col = data[off + i]
                if not _assign(t, trail, top, f, col, b):
                    return False
                queue[qn, 0] = f
                queue[qn, 1] = col
                qn += 1
    return True


@njit(cache=True)
def _first_gap(t, used, prog, state):
    """Advance the traversal state (row, pc, coset) to the first empty entry.

    Returns its column, or -1 when every row below ``used`` is complete.
    """
    k = state[0]
    pc = state[1]
    cur = state[2]
    plen = len(prog)
    while k < used:
        while pc < plen:
            x = prog[pc]
            if x == -1:
                cur = k
            else:
                nxt = t[cur, x]
                if nxt == -1:
                    state[0] = k
                    state[1] = pc
                    state[2] = cur
                    return x
                cur = nxt
            pc += 1
        k += 1
        pc = 0
    return -1


@njit(cache=True)
def _canonical(t, used, prog, new_of, old_of):
    """False if the traversal from some other base is already smaller."""
    plen = len(prog)
    for beta in range(1, used):
        for i in range(used):
            new_of[i] = -1
        new_of[beta] = 0
        old_of[0] = beta
        nold = 1
        verdict = 0
        for k in range(used):
            if k >= nold:
                break
            cur = k
            rcur = beta
            for pc in range(plen):
                x = prog[pc]
                if x == -1:
                    cur = k
                    rcur = old_of[k]
                    continue
                e = t[cur, x]
                o = t[rcur, x]
                if e == -1 or o == -1:
                    verdict = 2
                    break
                m = new_of[o]
                if m == -1:
                    m = nold
                    new_of[o] = m
                    old_of[nold] = o
                    nold += 1
                if m != e:
                    verdict = -1 if m < e else 1
                    break
                cur = e
                rcur = o
            if verdict != 0:
                break
        if verdict == -1:
            return False
    return True


@njit(cache=True)
def _search(n, ncols, ptr, spans, data, prog, nodes):
    t = -np.ones((n, ncols), dtype=np.int64)
    cap = n * ncols + 2
    trail = np.empty((cap, 2), dtype=np.int64)
    queue = np.empty((cap, 2), dtype=np.int64)
    new_of = np.empty(n, dtype=np.int64)
    old_of = np.empty(n, dtype=np.int64)
    top = np.zeros(1, dtype=np.int64)
    state = np.zeros(3, dtype=np.int64)
    # frame: coset, column, next value to try, trail mark, cosets in use,
    # then the traversal state (row, pc, coset) at this entry
    frames = np.zeros((cap, 8), dtype=np.int64)
    found = []
    if n == 1:
        # the whole group; relators hold trivially on one coset
        t[:, :] = 0
        found.append(t.copy())
        return found
    x0 = _first_gap(t, 1, prog, state)
    frames[0, 0] = state[2]
    frames[0, 1] = x0
    frames[0, 4] = 1
    frames[0, 5:8] = state
    depth = 0
    while depth >= 0:
        c = frames[depth, 0]
        x = frames[depth, 1]
        mark = frames[depth, 3]
        while top[0] > mark:
            top[0] -= 1
            t[trail[top[0], 0], trail[top[0], 1]] = -1
        used = frames[depth, 4]
        d = frames[depth, 2]
        while d < used and t[d, x ^ 1] != -1:
            d += 1
        if d == used and used == n:
            d += 1
        if d > used:
            depth -= 1
            continue
        frames[depth, 2] = d + 1
        nodes[0] += 1
        if d == used:
            used += 1
        if not _assign(t, trail, top, c, x, d):
            continue
        if not _deduce(t, trail, top, queue, c, x, ptr, spans, data):
            continue
        if not _canonical(t, used, prog, new_of, old_of):
            continue
        state[:] = frames[depth, 5:8]
        gx = _first_gap(t, used, prog, state)
        if gx == -1:
            if used == n:
                found.append(t.copy())
            continue
        depth += 1
        frames[depth, 0] = state[2]
        frames[depth, 1] = gx
        frames[depth, 2] = 0
        frames[depth, 3] = top[0]
        frames[depth, 4] = used
        frames[depth, 5:8] = state
    return found


PILOT_INDEX = 6


def _choose_program(pres: Presentation, n: int, ptr, spans, data) -> np.ndarray:
    """Relator rotations for the traversal, chosen by pilot node counts.

    Each relator in turn gets the rotation and direction that minimises the
    node count of the search at a small index, the others held fixed.  The
    choice is deterministic.
    """
    ncols = 2 * pres.ngens
    base = [word_columns(r) for r in pres.relators if len(r)]
    if n <= PILOT_INDEX or not base:
        return _row_program(base, ncols)
    choice = list(base)
    for i, r in enumerate(base):
        options = []
        inverse = [x ^ 1 for x in reversed(r)]
        for w in (r, inverse):
            options += [w[s:] + w[:s] for s in range(len(w))]
        best = None
        for opt in options:
            trial = choice[:i] + [opt] + choice[i + 1 :]
            nodes = np.zeros(1, dtype=np.int64)
            _search(PILOT_INDEX, ncols, ptr, spans, data, _row_program(trial, ncols), nodes)
            if best is None or nodes[0] < best[0]:
                best = (int(nodes[0]), opt)
        choice[i] = best[1]
    return _row_program(choice, ncols)


def low_index_subgroups(pres: Presentation, n: int) -> list[CosetTable]:
    """One coset table per conjugacy class of index-n subgroups.

    Tables are returned in standard (breadth-first) form and sorted, so
    the output order is deterministic.
    """
    if n < 1:
        raise ValueError("index must be positive")
    if pres.ngens == 0:
        return [CosetTable(1, (), 0)] if n == 1 else []
    ptr, spans, data = _rotations(pres)
    prog = _choose_program(pres, n, ptr, spans, data)
    nodes = np.zeros(1, dtype=np.int64)
    found = _search(n, 2 * pres.ngens, ptr, spans, data, prog, nodes)
    tables = [CosetTable.from_rows(tab.tolist(), pres.ngens).standardize() for tab in found]
    return sorted(tables, key=lambda T: T.columns())
