# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled run loop and survival kernels.

Mirrors the pure-Python engine draw for draw: the same PCG64 state is read
through numpy's bit-generator capsule and every derived draw (uniform double,
bounded integer, coin, genome word) follows the recipes in ``core``.
Genomes are packed 64 bits per word, least significant bit first.
"""
from cpython.pycapsule cimport PyCapsule_GetPointer
from libc.math cimport INFINITY, floor, log1p
from libc.stdint cimport int32_t, int64_t, uint8_t, uint64_t
from libc.stdlib cimport free, qsort, realloc
from libc.string cimport memcpy, memset
from numpy.random cimport bitgen_t

import numpy as np

cdef extern from *:
    """
    static inline uint64_t k_mul(uint64_t a, uint64_t b, uint64_t *lo) {
        __uint128_t m = (__uint128_t)a * b;
        *lo = (uint64_t)m;
        return (uint64_t)(m >> 64);
    }
    static inline int k_popcount(uint64_t x) { return __builtin_popcountll(x); }
    static inline int k_ctz(uint64_t x) { return __builtin_ctzll(x); }
    static inline int k_clz(uint64_t x) { return __builtin_clzll(x); }
    """
    uint64_t k_mul(uint64_t a, uint64_t b, uint64_t *lo) nogil
    int k_popcount(uint64_t x) nogil
    int k_ctz(uint64_t x) nogil
    int k_clz(uint64_t x) nogil

cdef enum:
    NIL = -1
cdef double INV53 = 1.0 / 9007199254740992.0


# ---------------------------------------------------------------- draws

cdef inline uint64_t r_u64(bitgen_t *bg) noexcept nogil:
    return bg.next_uint64(bg.state)


cdef inline double r_random(bitgen_t *bg) noexcept nogil:
    return (bg.next_uint64(bg.state) >> 11) * INV53


cdef inline uint64_t r_below(bitgen_t *bg, uint64_t k) noexcept nogil:
    cdef uint64_t lo, hi, thr
    hi = k_mul(bg.next_uint64(bg.state), k, &lo)
    if lo < k:
        thr = (0 - k) % k
        while lo < thr:
            hi = k_mul(bg.next_uint64(bg.state), k, &lo)
    return hi


cdef inline double combine(int64_t g1, int64_t r1, int64_t g2, int64_t r2) noexcept nogil:
    if r1 > 0 and r2 > 0:
        return <double>(g1 * r2 + g2 * r1) / <double>(r1 * r2)
    if r1 > 0:
        return <double>g1 / <double>r1
    if r2 > 0:
        return <double>g2 / <double>r2
    return 0.0


# ------------------------------------------------- current-CD workspace

cdef struct CD:
    int s
    int64_t *v1
    int64_t *v2
    int *prv1
    int *nxt1
    int *prv2
    int *nxt2
    int head1
    int tail1
    int head2
    int tail2
    int alive
    int64_t r1
    int64_t r2
    int *heap
    int *slot
    double *kcd
    double *ktie
    int hsize
    int64_t ops
    int64_t sift


cdef inline bint cd_less(CD *w, int a, int b) noexcept nogil:
    if w.kcd[a] != w.kcd[b]:
        return w.kcd[a] < w.kcd[b]
    if w.ktie[a] != w.ktie[b]:
        return w.ktie[a] < w.ktie[b]
    return a < b


cdef void cd_sift_up(CD *w, int s) noexcept nogil:
    cdef int item = w.heap[s], parent, p_item
    while s > 0:
        parent = (s - 1) >> 1
        p_item = w.heap[parent]
        if not cd_less(w, item, p_item):
            break
        w.heap[s] = p_item
        w.slot[p_item] = s
        s = parent
        w.sift += 1
    w.heap[s] = item
    w.slot[item] = s


cdef void cd_sift_down(CD *w, int s) noexcept nogil:
    cdef int item = w.heap[s], child, c_item
    while True:
        child = 2 * s + 1
        if child >= w.hsize:
            break
        if child + 1 < w.hsize and cd_less(w, w.heap[child + 1], w.heap[child]):
            child += 1
        c_item = w.heap[child]
        if not cd_less(w, c_item, item):
            break
        w.heap[s] = c_item
        w.slot[c_item] = s
        s = child
        w.sift += 1
    w.heap[s] = item
    w.slot[item] = s


cdef inline double cd_current(CD *w, int h) noexcept nogil:
    cdef int p1 = w.prv1[h], q1 = w.nxt1[h], p2 = w.prv2[h], q2 = w.nxt2[h]
    if p1 == NIL or q1 == NIL or p2 == NIL or q2 == NIL:
        return INFINITY
    return combine(w.v1[p1] - w.v1[q1], w.r1, w.v2[p2] - w.v2[q2], w.r2)


cdef void cd_heapify(CD *w) noexcept nogil:
    cdef int s
    for s in range(w.hsize):
        w.slot[w.heap[s]] = s
    for s in range(w.hsize // 2 - 1, -1, -1):
        cd_sift_down(w, s)


cdef void cd_init(CD *w, int s, const int *order1, const int *order2) noexcept nogil:
    """Lists from handle orders (descending objective, ascending id); keys from current cdis."""
    cdef int i
    w.s = s
    w.alive = s
    for i in range(s):
        w.prv1[order1[i]] = order1[i - 1] if i > 0 else NIL
        w.nxt1[order1[i]] = order1[i + 1] if i + 1 < s else NIL
        w.prv2[order2[i]] = order2[i - 1] if i > 0 else NIL
        w.nxt2[order2[i]] = order2[i + 1] if i + 1 < s else NIL
    w.head1, w.tail1 = order1[0], order1[s - 1]
    w.head2, w.tail2 = order2[0], order2[s - 1]
    w.r1 = w.v1[w.head1] - w.v1[w.tail1]
    w.r2 = w.v2[w.head2] - w.v2[w.tail2]
    w.hsize = s
    for i in range(s):
        w.heap[i] = i
        w.kcd[i] = cd_current(w, i)
    cd_heapify(w)


cdef inline void cd_unlink(int *prv, int *nxt, int *head, int *tail, int i) noexcept nogil:
    cdef int p = prv[i], q = nxt[i]
    if p != NIL:
        nxt[p] = q
    else:
        head[0] = q
    if q != NIL:
        prv[q] = p
    else:
        tail[0] = p
    prv[i] = NIL
    nxt[i] = NIL


cdef int cd_remove_min(CD *w, double *removed_cd) noexcept nogil:
    cdef int i = w.heap[0], j, k, cnt = 0, last
    cdef int nb[4]
    cdef int64_t r1, r2
    cdef double d
    removed_cd[0] = w.kcd[i]
    w.ops += 1
    w.hsize -= 1
    last = w.heap[w.hsize]
    w.slot[i] = NIL
    if w.hsize > 0:
        w.heap[0] = last
        w.slot[last] = 0
        cd_sift_down(w, 0)
    nb[0], nb[1], nb[2], nb[3] = w.prv1[i], w.nxt1[i], w.prv2[i], w.nxt2[i]
    for k in range(4):
        if nb[k] != NIL:
            nb[cnt] = nb[k]
            cnt += 1
    cd_unlink(w.prv1, w.nxt1, &w.head1, &w.tail1, i)
    cd_unlink(w.prv2, w.nxt2, &w.head2, &w.tail2, i)
    w.alive -= 1
    r1 = w.v1[w.head1] - w.v1[w.tail1] if w.alive > 0 else 0
    r2 = w.v2[w.head2] - w.v2[w.tail2] if w.alive > 0 else 0
    if r1 != w.r1 or r2 != w.r2:
        w.r1, w.r2 = r1, r2
        for k in range(w.hsize):
            j = w.heap[k]
            w.kcd[j] = cd_current(w, j)
        w.ops += w.hsize
        cd_heapify(w)
        return i
    for k in range(cnt):
        j = nb[k]
        d = cd_current(w, j)
        if d != w.kcd[j]:
            w.ops += 1
            if d < w.kcd[j]:
                w.kcd[j] = d
                cd_sift_up(w, w.slot[j])
            else:
                w.kcd[j] = d
                cd_sift_down(w, w.slot[j])
    return i


# ------------------------------------------------------- classic order

cdef struct Cand:
    double cd
    double tie
    int pos


cdef int cand_cmp(const void *a, const void *b) noexcept nogil:
    cdef const Cand *x = <const Cand *>a
    cdef const Cand *y = <const Cand *>b
    if x.cd != y.cd:
        return -1 if x.cd < y.cd else 1
    if x.tie != y.tie:
        return -1 if x.tie < y.tie else 1
    return x.pos - y.pos


# ------------------------------------------------------------ the engine

cdef struct Eng:
    bitgen_t *bg
    int n
    int W
    int N
    int cap
    int kind
    int variant
    int mating
    int mutation
    uint64_t *genome
    int64_t *ids
    int32_t *f1
    int32_t *f2
    int32_t *rank
    double *cdis
    double *tie
    int *pop
    int *R
    int m
    int *freeslots
    int nfree
    int *parents
    # positional scratch over R
    int *rk
    int *fstart
    int *fsize
    int *ffill
    int *fmem
    int *ord1
    int *ord2
    int *seq
    int *cnt
    int64_t *gap1
    int64_t *gap2
    uint8_t *gone
    int *lastf1
    int *lastf2
    int *hnd
    int *horder1
    int *horder2
    Cand *cands
    CD cd
    uint8_t *present
    int64_t queue_ops


cdef void evaluate(Eng *e, int slot) noexcept nogil:
    cdef uint64_t *g = e.genome + <Py_ssize_t>slot * e.W
    cdef int w, ones = 0, lo, tz, idx
    if e.kind == 0:
        for w in range(e.W):
            ones += k_popcount(g[w])
        e.f1[slot] = e.n - ones
        e.f2[slot] = ones
        return
    lo = e.n
    for w in range(e.W):
        if ~g[w] != 0:
            idx = w * 64 + k_ctz(~g[w])
            lo = idx if idx < e.n else e.n
            break
    tz = e.n
    for w in range(e.W - 1, -1, -1):
        if g[w] != 0:
            idx = w * 64 + 63 - k_clz(g[w])
            tz = e.n - 1 - idx
            break
    e.f1[slot] = lo
    e.f2[slot] = tz


cdef void mutate_slot(Eng *e, int slot) noexcept nogil:
    cdef uint64_t *g = e.genome + <Py_ssize_t>slot * e.W
    cdef int n = e.n
    cdef long pos
    cdef double log_q, skip
    if e.mutation == 0:
        pos = <long>r_below(e.bg, n)
        g[pos >> 6] ^= (<uint64_t>1) << (pos & 63)
        return
    if n == 1:
        g[0] ^= 1
        return
    log_q = log1p(-1.0 / n)
    pos = -1
    while True:
        skip = log1p(-r_random(e.bg)) / log_q
        if skip >= <double>(n - 1 - pos):
            return
        pos += <long>floor(skip) + 1
        g[pos >> 6] ^= (<uint64_t>1) << (pos & 63)


cdef void counting_order(Eng *e, const int32_t *key, int *out) noexcept nogil:
    """Positions of R by descending ``key``, stable (so ascending id within ties)."""
    cdef int v, pos, n = e.n, acc = 0
    for v in range(n + 1):
        e.cnt[v] = 0
    for pos in range(e.m):
        e.cnt[key[e.R[pos]]] += 1
    for v in range(n, -1, -1):
        pos = e.cnt[v]
        e.cnt[v] = acc
        acc += pos
    for pos in range(e.m):
        v = key[e.R[pos]]
        out[e.cnt[v]] = pos
        e.cnt[v] += 1


cdef int sort_fronts(Eng *e) noexcept nogil:
    """Front index per position; returns the number of fronts."""
    cdef int pos, i, k, nf, a, b
    if e.kind == 0:
        for pos in range(e.m):
            e.rk[pos] = 0
        return 1
    # lexicographic (f1 desc, f2 desc, id asc): stable passes on f2 then f1
    counting_order(e, e.f2, e.seq)
    for i in range(e.n + 1):
        e.cnt[i] = 0
    for i in range(e.m):
        e.cnt[e.f1[e.R[e.seq[i]]]] += 1
    a = 0
    for i in range(e.n, -1, -1):
        b = e.cnt[i]
        e.cnt[i] = a
        a += b
    for i in range(e.m):
        pos = e.seq[i]
        k = e.f1[e.R[pos]]
        e.ord1[e.cnt[k]] = pos
        e.cnt[k] += 1
    nf = 0
    for i in range(e.m):
        pos = e.ord1[i]
        a = e.f1[e.R[pos]]
        b = e.f2[e.R[pos]]
        k = 0
        while k < nf:
            if e.lastf2[k] < b or (e.lastf2[k] == b and e.lastf1[k] == a):
                break
            k += 1
        if k == nf:
            nf += 1
        e.lastf1[k] = a
        e.lastf2[k] = b
        e.rk[pos] = k
    return nf


cdef void layout_fronts(Eng *e, int nf) noexcept nogil:
    """Group positions by front: ``fmem`` in R order, ``ord1``/``ord2`` by objective."""
    cdef int f, pos, i, j, acc = 0, k = 0
    if e.kind == 0:
        # one front; f2 = n - f1, so the f2 order is the f1 order with its groups reversed
        e.fstart[0] = 0
        e.fsize[0] = e.m
        for pos in range(e.m):
            e.fmem[pos] = pos
        counting_order(e, e.f1, e.ord1)
        j = e.m - 1
        while j >= 0:
            i = j
            while i > 0 and e.f1[e.R[e.ord1[i - 1]]] == e.f1[e.R[e.ord1[j]]]:
                i -= 1
            for pos in range(i, j + 1):
                e.ord2[k] = e.ord1[pos]
                k += 1
            j = i - 1
        return
    for f in range(nf):
        e.fsize[f] = 0
    for pos in range(e.m):
        e.fsize[e.rk[pos]] += 1
    for f in range(nf):
        e.fstart[f] = acc
        acc += e.fsize[f]
    for f in range(nf):
        e.ffill[f] = e.fstart[f]
    for pos in range(e.m):
        f = e.rk[pos]
        e.fmem[e.ffill[f]] = pos
        e.ffill[f] += 1
    counting_order(e, e.f1, e.seq)
    for f in range(nf):
        e.ffill[f] = e.fstart[f]
    for i in range(e.m):
        pos = e.seq[i]
        f = e.rk[pos]
        e.ord1[e.ffill[f]] = pos
        e.ffill[f] += 1
    counting_order(e, e.f2, e.seq)
    for f in range(nf):
        e.ffill[f] = e.fstart[f]
    for i in range(e.m):
        pos = e.seq[i]
        f = e.rk[pos]
        e.ord2[e.ffill[f]] = pos
        e.ffill[f] += 1


cdef void crowd_front(Eng *e, int f) noexcept nogil:
    cdef int a = e.fstart[f], s = e.fsize[f], j, pos
    cdef int *o1 = e.ord1 + a
    cdef int *o2 = e.ord2 + a
    cdef int64_t r1 = e.f1[e.R[o1[0]]] - e.f1[e.R[o1[s - 1]]]
    cdef int64_t r2 = e.f2[e.R[o2[0]]] - e.f2[e.R[o2[s - 1]]]
    for j in range(s):
        e.gone[o1[j]] = 0
    e.gone[o1[0]] = 1
    e.gone[o1[s - 1]] = 1
    e.gone[o2[0]] = 1
    e.gone[o2[s - 1]] = 1
    for j in range(1, s - 1):
        e.gap1[o1[j]] = e.f1[e.R[o1[j - 1]]] - e.f1[e.R[o1[j + 1]]]
        e.gap2[o2[j]] = e.f2[e.R[o2[j - 1]]] - e.f2[e.R[o2[j + 1]]]
    for j in range(s):
        pos = o1[j]
        e.rank[e.R[pos]] = f + 1
        e.cdis[e.R[pos]] = INFINITY if e.gone[pos] else combine(e.gap1[pos], r1, e.gap2[pos], r2)
        e.gone[pos] = 0


cdef int rank_and_crowd(Eng *e, bint all_fronts) noexcept nogil:
    """Sort R into fronts and crowd every front, or fronts up to the critical front ``i*``."""
    cdef int nf = sort_fronts(e), f, total = 0, istar = nf - 1, upto = nf - 1
    layout_fronts(e, nf)
    if not all_fronts:
        for f in range(nf):
            total += e.fsize[f]
            if total >= e.N:
                istar = f
                break
        upto = istar
    for f in range(upto + 1):
        crowd_front(e, f)
    return upto


cdef int select_survivors(Eng *e, int istar, double *removed, int *n_removed) noexcept nogil:
    """Mark removed positions in ``gone``; at-removal cdis of ``F_i*`` removals go to ``removed``."""
    cdef int a = e.fstart[istar], s = e.fsize[istar], j, pos, h, k
    cdef int n_remove = a + s - e.N
    cdef CD *w = &e.cd
    cdef Cand tmp
    for pos in range(e.m):
        e.gone[pos] = 1 if e.rk[pos] > istar else 0
    for j in range(s):
        e.tie[e.R[e.fmem[a + j]]] = r_random(e.bg)
    n_removed[0] = 0
    if n_remove <= 0:
        return 0
    if e.variant != 1:
        for j in range(s):
            pos = e.fmem[a + j]
            e.cands[j].cd = e.cdis[e.R[pos]]
            e.cands[j].tie = e.tie[e.R[pos]]
            e.cands[j].pos = pos
        if n_remove == 1:
            k = 0
            for j in range(1, s):
                if cand_cmp(&e.cands[j], &e.cands[k]) < 0:
                    k = j
            tmp = e.cands[0]
            e.cands[0] = e.cands[k]
            e.cands[k] = tmp
        else:
            qsort(e.cands, s, sizeof(Cand), cand_cmp)
        for j in range(n_remove):
            e.gone[e.cands[j].pos] = 1
            removed[j] = e.cands[j].cd
        n_removed[0] = n_remove
        return 0
    # handles are positions inside F_i* in R order
    for j in range(s):
        pos = e.fmem[a + j]
        e.hnd[pos] = j
        w.v1[j] = e.f1[e.R[pos]]
        w.v2[j] = e.f2[e.R[pos]]
        w.ktie[j] = e.tie[e.R[pos]]
    for j in range(s):
        e.horder1[j] = e.hnd[e.ord1[a + j]]
        e.horder2[j] = e.hnd[e.ord2[a + j]]
    w.ops = 0
    cd_init(w, s, e.horder1, e.horder2)
    for j in range(n_remove):
        h = cd_remove_min(w, &removed[j])
        e.gone[e.fmem[a + h]] = 1
    for j in range(s):
        pos = e.fmem[a + j]
        if not e.gone[pos]:
            e.cdis[e.R[pos]] = cd_current(w, j)
    e.queue_ops += w.ops
    n_removed[0] = n_remove
    return 0


cdef void compact(Eng *e) noexcept nogil:
    cdef int pos, k = 0
    e.nfree = 0
    for pos in range(e.m):
        if e.gone[pos]:
            e.freeslots[e.nfree] = e.R[pos]
            e.nfree += 1
        else:
            e.pop[k] = e.R[pos]
            k += 1


cdef int observe(Eng *e, int32_t *mei, uint8_t *ext, int32_t *mx, int32_t *mn) noexcept nogil:
    cdef int i, v, last = -1, first = -1, best = 0, slot
    cdef bint hi = 0, lo = 0
    memset(e.present, 0, e.n + 1)
    for i in range(e.N):
        slot = e.pop[i]
        e.present[e.f1[slot]] = 1
        if e.kind == 1:
            if e.f1[slot] == e.n:
                hi = 1
            if e.f2[slot] == e.n:
                lo = 1
    for v in range(e.n + 1):
        if e.present[v]:
            if last >= 0 and v - last > best:
                best = v - last
            if first < 0:
                first = v
            last = v
    mei[0] = best
    mx[0] = last
    mn[0] = first
    if e.kind == 0:
        ext[0] = e.present[0] and e.present[e.n]
    else:
        ext[0] = hi and lo
    return ext[0]


cdef void make_offspring(Eng *e, int count) noexcept nogil:
    cdef int i, a, b, p, child
    cdef int N = e.N
    if e.mating == 0:
        for i in range(count):
            e.parents[i] = e.pop[i]
    elif e.mating == 1:
        for i in range(count):
            e.parents[i] = e.pop[r_below(e.bg, N)]
    else:
        for i in range(count):
            a = e.pop[r_below(e.bg, N)]
            b = e.pop[r_below(e.bg, N)]
            if e.rank[a] != e.rank[b]:
                p = a if e.rank[a] < e.rank[b] else b
            elif e.cdis[a] != e.cdis[b]:
                p = a if e.cdis[a] > e.cdis[b] else b
            else:
                p = b if (r_u64(e.bg) >> 63) else a
            e.parents[i] = p
    for i in range(count):
        child = e.freeslots[i]
        memcpy(e.genome + <Py_ssize_t>child * e.W, e.genome + <Py_ssize_t>e.parents[i] * e.W,
               e.W * sizeof(uint64_t))
        mutate_slot(e, child)
        evaluate(e, child)


cdef int *_iptr(arr):
    cdef int[::1] v = arr
    return &v[0]


cdef double *_dptr(arr):
    cdef double[::1] v = arr
    return &v[0]


cdef int64_t *_lptr(arr):
    cdef int64_t[::1] v = arr
    return &v[0]


cdef class _Buffers:
    """Growable per-generation output arrays."""
    cdef int32_t *mei
    cdef uint8_t *ext
    cdef int32_t *mx
    cdef int32_t *mn
    cdef Py_ssize_t size
    cdef Py_ssize_t capacity

    def __cinit__(self, Py_ssize_t capacity):
        self.capacity = 0
        self.size = 0
        self.grow(capacity)

    cdef int grow(self, Py_ssize_t capacity) except -1:
        cdef void *p
        p = realloc(self.mei, capacity * sizeof(int32_t))
        if p == NULL:
            raise MemoryError()
        self.mei = <int32_t *>p
        p = realloc(self.ext, capacity * sizeof(uint8_t))
        if p == NULL:
            raise MemoryError()
        self.ext = <uint8_t *>p
        p = realloc(self.mx, capacity * sizeof(int32_t))
        if p == NULL:
            raise MemoryError()
        self.mx = <int32_t *>p
        p = realloc(self.mn, capacity * sizeof(int32_t))
        if p == NULL:
            raise MemoryError()
        self.mn = <int32_t *>p
        self.capacity = capacity
        return 0

    cdef int reserve_next(self) except -1:
        if self.size == self.capacity:
            self.grow(2 * self.capacity)
        return 0

    def __dealloc__(self):
        free(self.mei)
        free(self.ext)
        free(self.mx)
        free(self.mn)

    def arrays(self):
        n = self.size
        out_mei = np.empty(n, np.int32)
        out_ext = np.empty(n, np.uint8)
        out_mx = np.empty(n, np.int32)
        out_mn = np.empty(n, np.int32)
        cdef int32_t[::1] a = out_mei
        cdef uint8_t[::1] b = out_ext
        cdef int32_t[::1] c = out_mx
        cdef int32_t[::1] d = out_mn
        if n:
            memcpy(&a[0], self.mei, n * sizeof(int32_t))
            memcpy(&b[0], self.ext, n * sizeof(uint8_t))
            memcpy(&c[0], self.mx, n * sizeof(int32_t))
            memcpy(&d[0], self.mn, n * sizeof(int32_t))
        return out_mei, out_ext, out_mx, out_mn


cdef tuple coverage_of(Eng *e):
    return tuple(v for v in range(e.n + 1) if e.present[v])


def run_loop(bit_generator, int n, int kind, int N, int variant, int mating, int mutation,
             long long max_generations, long long stop_after_t0, bint record_coverage,
             bint check_removals, double removal_limit):
    """Whole optimizer run; the caller holds ``bit_generator.lock``."""
    cdef Eng e
    cdef int W = (n + 63) // 64
    cdef int count = 1 if variant == 2 else N
    cdef int cap = N + count
    cdef int i, w, istar, n_removed = 0
    cdef long long g = 0, t0 = -1
    cdef uint64_t last_mask = ((<uint64_t>1) << (n % 64)) - 1 if n % 64 else ~(<uint64_t>0)
    cdef bint prev_ext
    cdef int64_t checks = 0, violations = 0
    cdef double max_removed = 0.0

    capsule = bit_generator.capsule
    e.bg = <bitgen_t *>PyCapsule_GetPointer(capsule, "BitGenerator")
    e.n, e.W, e.N, e.cap, e.kind = n, W, N, cap, kind
    e.variant, e.mating, e.mutation = variant, mating, mutation
    e.queue_ops = 0

    genome_a = np.zeros(cap * W, np.uint64)
    ints = {name: np.zeros(size, np.intc) for name, size in (
        ("pop", N), ("R", cap), ("free", cap), ("parents", count), ("rk", cap), ("fstart", cap + 1),
        ("fsize", cap + 1), ("ffill", cap + 1), ("fmem", cap), ("ord1", cap), ("ord2", cap),
        ("seq", cap), ("cnt", n + 2), ("lastf1", cap), ("lastf2", cap), ("hnd", cap),
        ("horder1", cap), ("horder2", cap), ("prv1", cap), ("nxt1", cap), ("prv2", cap),
        ("nxt2", cap), ("heap", cap), ("slot", cap))}
    ids_a = np.zeros(cap, np.int64)
    f1_a = np.zeros(cap, np.int32)
    f2_a = np.zeros(cap, np.int32)
    rank_a = np.zeros(cap, np.int32)
    dbl = {name: np.zeros(cap, np.float64) for name in ("cdis", "tie", "kcd", "ktie", "removed")}
    i64 = {name: np.zeros(cap, np.int64) for name in ("gap1", "gap2", "v1", "v2")}
    gone_a = np.zeros(cap, np.uint8)
    present_a = np.zeros(n + 1, np.uint8)
    cands_a = np.zeros(cap * sizeof(Cand), np.uint8)

    cdef uint64_t[::1] genome_v = genome_a
    cdef int64_t[::1] ids_v = ids_a
    cdef int32_t[::1] f1_v = f1_a
    cdef int32_t[::1] f2_v = f2_a
    cdef int32_t[::1] rank_v = rank_a
    cdef uint8_t[::1] gone_v = gone_a
    cdef uint8_t[::1] present_v = present_a
    cdef uint8_t[::1] cands_v = cands_a
    e.genome = &genome_v[0]
    e.ids = &ids_v[0]
    e.f1 = &f1_v[0]
    e.f2 = &f2_v[0]
    e.rank = &rank_v[0]
    e.gone = &gone_v[0]
    e.present = &present_v[0]
    e.cands = <Cand *>&cands_v[0]
    e.pop = _iptr(ints["pop"])
    e.R = _iptr(ints["R"])
    e.freeslots = _iptr(ints["free"])
    e.parents = _iptr(ints["parents"])
    e.rk = _iptr(ints["rk"])
    e.fstart = _iptr(ints["fstart"])
    e.fsize = _iptr(ints["fsize"])
    e.ffill = _iptr(ints["ffill"])
    e.fmem = _iptr(ints["fmem"])
    e.ord1 = _iptr(ints["ord1"])
    e.ord2 = _iptr(ints["ord2"])
    e.seq = _iptr(ints["seq"])
    e.cnt = _iptr(ints["cnt"])
    e.lastf1 = _iptr(ints["lastf1"])
    e.lastf2 = _iptr(ints["lastf2"])
    e.hnd = _iptr(ints["hnd"])
    e.horder1 = _iptr(ints["horder1"])
    e.horder2 = _iptr(ints["horder2"])
    e.cdis = _dptr(dbl["cdis"])
    e.tie = _dptr(dbl["tie"])
    e.gap1 = _lptr(i64["gap1"])
    e.gap2 = _lptr(i64["gap2"])
    e.cd.v1 = _lptr(i64["v1"])
    e.cd.v2 = _lptr(i64["v2"])
    e.cd.prv1 = _iptr(ints["prv1"])
    e.cd.nxt1 = _iptr(ints["nxt1"])
    e.cd.prv2 = _iptr(ints["prv2"])
    e.cd.nxt2 = _iptr(ints["nxt2"])
    e.cd.heap = _iptr(ints["heap"])
    e.cd.slot = _iptr(ints["slot"])
    e.cd.kcd = _dptr(dbl["kcd"])
    e.cd.ktie = _dptr(dbl["ktie"])
    e.cd.sift = 0
    cdef double *removed = _dptr(dbl["removed"])

    # initial population: slots 0..N-1, ids 0..N-1
    for i in range(N):
        for w in range(W):
            e.genome[i * W + w] = r_u64(e.bg)
        e.genome[i * W + W - 1] &= last_mask
        e.ids[i] = i
        evaluate(&e, i)
        e.pop[i] = i
        e.R[i] = i
    for i in range(count):
        e.freeslots[i] = N + i
    e.nfree = count
    e.m = N
    rank_and_crowd(&e, True)
    cdef int64_t next_id = N

    buf = _Buffers(max(16, min(max_generations + 1, 1 << 16)))
    cdef _Buffers b = buf
    coverage = [] if record_coverage else None
    prev_ext = observe(&e, b.mei, b.ext, b.mx, b.mn)
    b.size = 1
    if coverage is not None:
        coverage.append(coverage_of(&e))
    if prev_ext:
        t0 = 0

    while g < max_generations and not (stop_after_t0 >= 0 and t0 >= 0 and g >= t0 + stop_after_t0):
        g += 1
        make_offspring(&e, count)
        for i in range(N):
            e.R[i] = e.pop[i]
        for i in range(count):
            e.R[N + i] = e.freeslots[i]
            e.ids[e.freeslots[i]] = next_id
            next_id += 1
        e.m = cap
        istar = rank_and_crowd(&e, False)
        select_survivors(&e, istar, removed, &n_removed)
        if check_removals and prev_ext:
            for i in range(n_removed):
                checks += 1
                if removed[i] > max_removed:
                    max_removed = removed[i]
                if not removed[i] < removal_limit:
                    violations += 1
        compact(&e)
        b.reserve_next()
        prev_ext = observe(&e, b.mei + b.size, b.ext + b.size, b.mx + b.size, b.mn + b.size)
        b.size += 1
        if coverage is not None:
            coverage.append(coverage_of(&e))
        if prev_ext and t0 < 0:
            t0 = g

    mei_a, ext_a, mx_a, mn_a = buf.arrays()
    pop_idx = np.asarray(ints["pop"], dtype=np.intp)
    words = genome_a.reshape(cap, W)[pop_idx].copy()
    return dict(
        mei=mei_a, extremes=ext_a, max_f1=mx_a, min_f1=mn_a, coverage=coverage,
        removal_checks=int(checks), removal_violations=int(violations), max_removal_cdis=float(max_removed),
        final_words=words, final_ids=ids_a[pop_idx].copy(), final_rank=rank_a[pop_idx].copy(),
        final_cdis=dbl["cdis"][pop_idx].copy(), queue_ops=int(e.queue_ops),
    )


cdef void _select_preset_ties(Eng *e, double *removed, int *n_removed) noexcept nogil:
    """``select_survivors`` for one front with caller-supplied tie keys; removal order into ``seq``."""
    cdef int s = e.m, n_remove = s - e.N, j, h
    cdef CD *w = &e.cd
    for j in range(s):
        e.gone[j] = 0
    n_removed[0] = n_remove
    if n_remove <= 0:
        n_removed[0] = 0
        return
    if e.variant == 0:
        for j in range(s):
            e.cands[j].cd = e.cdis[j]
            e.cands[j].tie = e.tie[j]
            e.cands[j].pos = j
        qsort(e.cands, s, sizeof(Cand), cand_cmp)
        for j in range(n_remove):
            e.gone[e.cands[j].pos] = 1
            removed[j] = e.cands[j].cd
            e.seq[j] = e.cands[j].pos
        return
    for j in range(s):
        w.v1[j] = e.f1[j]
        w.v2[j] = e.f2[j]
        w.ktie[j] = e.tie[j]
    cd_init(w, s, e.ord1, e.ord2)
    for j in range(n_remove):
        h = cd_remove_min(w, &removed[j])
        e.gone[h] = 1
        e.seq[j] = h
    for j in range(s):
        if not e.gone[j]:
            e.cdis[j] = cd_current(w, j)


def select_front(f1, f2, tie, int keep, bint current):
    """Thin one front of individuals listed in ascending-id order down to ``keep`` members.

    Returns ``(removed positions, at-removal cdis, final cdis)`` where the final
    cdis is the initial one for classic thinning and the current one otherwise.
    Used by the benchmark and the cross-engine tests.
    """
    cdef int m = len(f1), j
    a1 = np.ascontiguousarray(f1, dtype=np.int32)
    a2 = np.ascontiguousarray(f2, dtype=np.int32)
    at = np.ascontiguousarray(tie, dtype=np.float64)
    if not (len(a2) == m == len(at)) or not 1 <= keep <= m:
        raise ValueError("bad front arguments")
    n = int(max(a1.max(), a2.max()))
    cdef Eng e
    e.n, e.N, e.m, e.cap, e.kind = n, keep, m, m, 0
    e.variant = 1 if current else 0
    e.queue_ops = 0
    ints = {name: np.arange(m, dtype=np.intc) if name == "R" else np.zeros(m + 2, np.intc)
            for name in ("R", "rk", "fstart", "fsize", "ffill", "fmem", "ord1", "ord2", "seq",
                         "hnd", "horder1", "horder2", "prv1", "nxt1", "prv2", "nxt2", "heap", "slot")}
    cnt_a = np.zeros(n + 2, np.intc)
    dbl = {name: np.zeros(m, np.float64) for name in ("cdis", "kcd", "ktie", "removed")}
    i64 = {name: np.zeros(m, np.int64) for name in ("gap1", "gap2", "v1", "v2")}
    rank_a = np.zeros(m, np.int32)
    gone_a = np.zeros(m, np.uint8)
    cands_a = np.zeros(m * sizeof(Cand), np.uint8)
    cdef int32_t[::1] f1_v = a1
    cdef int32_t[::1] f2_v = a2
    cdef int32_t[::1] rank_v = rank_a
    cdef uint8_t[::1] gone_v = gone_a
    cdef uint8_t[::1] cands_v = cands_a
    e.f1 = &f1_v[0]
    e.f2 = &f2_v[0]
    e.rank = &rank_v[0]
    e.gone = &gone_v[0]
    e.cands = <Cand *>&cands_v[0]
    e.tie = _dptr(at)
    e.cdis = _dptr(dbl["cdis"])
    e.gap1 = _lptr(i64["gap1"])
    e.gap2 = _lptr(i64["gap2"])
    e.cnt = _iptr(cnt_a)
    e.R = _iptr(ints["R"])
    e.rk = _iptr(ints["rk"])
    e.fstart = _iptr(ints["fstart"])
    e.fsize = _iptr(ints["fsize"])
    e.ffill = _iptr(ints["ffill"])
    e.fmem = _iptr(ints["fmem"])
    e.ord1 = _iptr(ints["ord1"])
    e.ord2 = _iptr(ints["ord2"])
    e.seq = _iptr(ints["seq"])
    e.hnd = _iptr(ints["hnd"])
    e.horder1 = _iptr(ints["horder1"])
    e.horder2 = _iptr(ints["horder2"])
    e.cd.v1 = _lptr(i64["v1"])
    e.cd.v2 = _lptr(i64["v2"])
    e.cd.prv1 = _iptr(ints["prv1"])
    e.cd.nxt1 = _iptr(ints["nxt1"])
    e.cd.prv2 = _iptr(ints["prv2"])
    e.cd.nxt2 = _iptr(ints["nxt2"])
    e.cd.heap = _iptr(ints["heap"])
    e.cd.slot = _iptr(ints["slot"])
    e.cd.kcd = _dptr(dbl["kcd"])
    e.cd.ktie = _dptr(dbl["ktie"])
    e.cd.sift = 0
    cdef double *removed = _dptr(dbl["removed"])
    cdef int n_removed = 0
    for j in range(m):
        e.rk[j] = 0
    layout_fronts(&e, 1)
    crowd_front(&e, 0)
    _select_preset_ties(&e, removed, &n_removed)
    order = np.empty(n_removed, np.intp)
    cdef Py_ssize_t[::1] order_v = order
    # recover removal order: classic sorts candidates, current records pops
    for j in range(n_removed):
        order_v[j] = e.seq[j]
    final = dbl["cdis"][gone_a == 0].copy()
    return order, dbl["removed"][:n_removed].copy(), final
