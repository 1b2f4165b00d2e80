# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot kernels: addressable binary heap, segment/box sampling and
the LRA* main loop.

The heap and sampling functions mirror ``_pykernels`` exactly. ``LRACore``
is a line-for-line port of :class:`lrastar.search.LRAStar` over flat
arrays; both produce identical replay logs and counters.
"""
cimport cython
from libc.math cimport ceil, sqrt, INFINITY
from libc.stdlib cimport malloc, realloc, free

import numpy as np
from time import perf_counter


cdef inline bint _less(double ka, long ia, double kb, long ib) noexcept nogil:
    return ka < kb or (ka == kb and ia < ib)


@cython.final
cdef class IndexedHeap:
    cdef double* _keys
    cdef long* _items
    cdef long* _pos
    cdef Py_ssize_t _n
    cdef Py_ssize_t _cap

    def __cinit__(self, Py_ssize_t capacity):
        cdef Py_ssize_t i
        self._cap = capacity if capacity > 0 else 1
        self._keys = <double*> malloc(self._cap * sizeof(double))
        self._items = <long*> malloc(self._cap * sizeof(long))
        self._pos = <long*> malloc(self._cap * sizeof(long))
        if self._keys == NULL or self._items == NULL or self._pos == NULL:
            raise MemoryError()
        for i in range(self._cap):
            self._pos[i] = -1
        self._n = 0

    def __dealloc__(self):
        free(self._keys)
        free(self._items)
        free(self._pos)

    def __len__(self):
        return self._n

    def __bool__(self):
        return self._n > 0

    def __contains__(self, long item):
        return self._pos[item] >= 0

    cdef inline bint has(self, long item) noexcept:
        return self._pos[item] >= 0

    cdef inline long top(self) noexcept:
        return self._items[0]

    cdef inline double top_key(self) noexcept:
        return self._keys[0]

    cdef inline void drop_top(self) noexcept:
        self._delete_at(0)

    cpdef clear(self):
        cdef Py_ssize_t i
        for i in range(self._n):
            self._pos[self._items[i]] = -1
        self._n = 0

    cpdef double key(self, long item) except? -1.0:
        cdef long i = self._pos[item]
        if i < 0:
            raise KeyError(item)
        return self._keys[i]

    def peek(self):
        if self._n == 0:
            raise IndexError("peek from empty heap")
        return self._items[0], self._keys[0]

    cpdef double peek_key(self):
        return self._keys[0] if self._n > 0 else INFINITY

    def items(self):
        return [self._items[i] for i in range(self._n)]

    cpdef push(self, long item, double key):
        cdef long i = self._pos[item]
        cdef double old
        if i < 0:
            i = self._n
            self._n += 1
            self._items[i] = item
            self._keys[i] = key
            self._pos[item] = i
            self._sift_up(i)
        else:
            old = self._keys[i]
            self._keys[i] = key
            if key < old:
                self._sift_up(i)
            elif key > old:
                self._sift_down(i)

    def pop(self):
        if self._n == 0:
            raise IndexError("pop from empty heap")
        cdef long item = self._items[0]
        cdef double key = self._keys[0]
        self._delete_at(0)
        return item, key

    cpdef bint remove(self, long item):
        cdef long i = self._pos[item]
        if i < 0:
            return False
        self._delete_at(i)
        return True

    cdef void _delete_at(self, Py_ssize_t i) noexcept:
        cdef long last_item
        cdef double last_key
        self._pos[self._items[i]] = -1
        self._n -= 1
        if i < self._n:
            last_item = self._items[self._n]
            last_key = self._keys[self._n]
            self._items[i] = last_item
            self._keys[i] = last_key
            self._pos[last_item] = i
            self._sift_up(i)
            self._sift_down(self._pos[last_item])

    cdef void _sift_up(self, Py_ssize_t i) noexcept:
        cdef long item = self._items[i]
        cdef double key = self._keys[i]
        cdef Py_ssize_t p
        while i > 0:
            p = (i - 1) >> 1
            if _less(self._keys[p], self._items[p], key, item):
                break
            self._items[i] = self._items[p]
            self._keys[i] = self._keys[p]
            self._pos[self._items[i]] = i
            i = p
        self._items[i] = item
        self._keys[i] = key
        self._pos[item] = i

    cdef void _sift_down(self, Py_ssize_t i) noexcept:
        cdef long item = self._items[i]
        cdef double key = self._keys[i]
        cdef Py_ssize_t c, r
        while True:
            c = 2 * i + 1
            if c >= self._n:
                break
            r = c + 1
            if r < self._n and _less(self._keys[r], self._items[r], self._keys[c], self._items[c]):
                c = r
            if _less(key, item, self._keys[c], self._items[c]):
                break
            self._items[i] = self._items[c]
            self._keys[i] = self._keys[c]
            self._pos[self._items[i]] = i
            i = c
        self._items[i] = item
        self._keys[i] = key
        self._pos[item] = i


def sample_count(p, q, double resolution):
    cdef double[::1] a = np.ascontiguousarray(p, dtype=np.float64)
    cdef double[::1] b = np.ascontiguousarray(q, dtype=np.float64)
    cdef Py_ssize_t j
    cdef double s = 0.0, t
    for j in range(a.shape[0]):
        t = b[j] - a[j]
        s += t * t
    return <long> ceil(sqrt(s) / resolution) + 1


def segment_hits_boxes(p, q, lo, hi, double resolution):
    cdef double[::1] a = np.ascontiguousarray(p, dtype=np.float64)
    cdef double[::1] b = np.ascontiguousarray(q, dtype=np.float64)
    cdef double[:, ::1] blo = np.ascontiguousarray(lo, dtype=np.float64).reshape(-1, a.shape[0])
    cdef double[:, ::1] bhi = np.ascontiguousarray(hi, dtype=np.float64).reshape(-1, a.shape[0])
    return _segment_hits(a, b, blo, bhi, resolution)


cdef bint _segment_hits(double[::1] a, double[::1] b, double[:, ::1] blo,
                        double[:, ::1] bhi, double resolution) noexcept nogil:
    cdef Py_ssize_t d = a.shape[0]
    cdef Py_ssize_t m = blo.shape[0]
    cdef Py_ssize_t i, j, s, k
    cdef double length = 0.0, t, x, u
    cdef bint inside
    for j in range(d):
        t = b[j] - a[j]
        length += t * t
    k = <Py_ssize_t> ceil(sqrt(length) / resolution) + 1
    for i in range(m):
        # Skip boxes disjoint from the segment's bounding box.
        inside = True
        for j in range(d):
            if blo[i, j] > (a[j] if a[j] > b[j] else b[j]) or bhi[i, j] < (a[j] if a[j] < b[j] else b[j]):
                inside = False
                break
        if not inside:
            continue
        for s in range(k):
            u = s / <double> (k - 1) if k > 1 else 0.0
            inside = True
            for j in range(d):
                x = a[j] + u * (b[j] - a[j])
                if x < blo[i, j] or x > bhi[i, j]:
                    inside = False
                    break
            if inside:
                return True
    return False


# -- LRA* core -------------------------------------------------------------

cdef enum:
    _UNKNOWN = 0
    _FREE = 1
    _BLOCKED = 2

cdef enum:
    OUT_TARGET = 0
    OUT_FREE = 1
    OUT_BLOCKED = 2
    OUT_EXHAUSTED = 3

cdef Py_ssize_t NO_BUDGET = (<Py_ssize_t> 1) << 62

TARGET_REACHED = OUT_TARGET
EXHAUSTED = OUT_EXHAUSTED


@cython.final
cdef class LRACore:
    """Array-based LRA* state; see ``lrastar.search.LRAStar``."""

    cdef object graph
    cdef object replay
    cdef public list evaluated, results, ftrace
    cdef Py_ssize_t n, source, target, alpha, beta
    cdef bint lazy
    cdef Py_ssize_t[::1] adj_ptr, adj_v, adj_e
    cdef double[::1] w, h
    cdef double[::1] c, l
    cdef Py_ssize_t[::1] b, parent, pedge
    cdef Py_ssize_t[::1] first_child, next_sib, prev_sib
    cdef signed char[::1] in_tree, linked, status
    cdef Py_ssize_t[::1] trw, sbuf, mark
    cdef Py_ssize_t n_trw, stamp
    cdef IndexedHeap qf, qe, qu, qr
    cdef public long updates, queue_ops, rewired, blocked, iterations
    cdef public double rewire_time

    def __init__(self, graph, Py_ssize_t source, Py_ssize_t target, Py_ssize_t alpha,
                 Py_ssize_t beta, bint lazy, h, csr, replay=None):
        cdef Py_ssize_t n = graph.n
        self.graph = graph
        self.replay = replay
        self.n = n
        self.source = source
        self.target = target
        self.alpha = alpha
        self.beta = beta
        self.lazy = lazy
        self.adj_ptr, self.adj_v, self.adj_e = csr
        self.w = np.asarray(graph.weights, dtype=np.float64)
        self.h = np.asarray(h, dtype=np.float64)
        self.status = np.asarray(graph.status, dtype=np.int8)
        self.c = np.full(n, INFINITY)
        self.l = np.full(n, INFINITY)
        self.b = np.full(n, NO_BUDGET, dtype=np.intp)
        self.parent = np.full(n, -1, dtype=np.intp)
        self.pedge = np.full(n, -1, dtype=np.intp)
        self.first_child = np.full(n, -1, dtype=np.intp)
        self.next_sib = np.full(n, -1, dtype=np.intp)
        self.prev_sib = np.full(n, -1, dtype=np.intp)
        self.in_tree = np.zeros(n, dtype=np.int8)
        self.linked = np.zeros(n, dtype=np.int8)
        self.trw = np.empty(max(n, 1), dtype=np.intp)
        self.sbuf = np.empty(max(n, 1), dtype=np.intp)
        self.mark = np.zeros(n, dtype=np.intp)
        self.n_trw = 0
        self.stamp = 0
        self.qf = IndexedHeap(n)
        self.qe = IndexedHeap(n)
        self.qu = IndexedHeap(n)
        self.qr = IndexedHeap(n)
        self.evaluated = []
        self.results = []
        self.ftrace = []
        self.updates = self.queue_ops = self.rewired = self.blocked = self.iterations = 0
        self.rewire_time = 0.0

    # -- node bookkeeping --------------------------------------------------

    cdef int _set(self, Py_ssize_t v, Py_ssize_t p, Py_ssize_t e, double c,
                  double l, Py_ssize_t b) except -1:
        if b > self.alpha:
            raise AssertionError(
                f"budget invariant violated at vertex {v}: b={b} > alpha={self.alpha}")
        self.parent[v] = p
        self.pedge[v] = e
        self.c[v] = c
        self.l[v] = l
        self.b[v] = b
        self.updates += 1
        return 0

    cdef inline void _reset(self, Py_ssize_t v) noexcept:
        self.parent[v] = -1
        self.pedge[v] = -1
        self.c[v] = INFINITY
        self.l[v] = INFINITY
        self.b[v] = NO_BUDGET

    cdef inline void _attach(self, Py_ssize_t v) noexcept:
        cdef Py_ssize_t p = self.parent[v], f
        self.in_tree[v] = 1
        if p >= 0 and not self.linked[v]:
            f = self.first_child[p]
            self.next_sib[v] = f
            self.prev_sib[v] = -1
            if f >= 0:
                self.prev_sib[f] = v
            self.first_child[p] = v
            self.linked[v] = 1

    cdef inline void _detach(self, Py_ssize_t v) noexcept:
        cdef Py_ssize_t p = self.parent[v], a, z
        self.in_tree[v] = 0
        if p >= 0 and self.linked[v]:
            a = self.prev_sib[v]
            z = self.next_sib[v]
            if a >= 0:
                self.next_sib[a] = z
            else:
                self.first_child[p] = z
            if z >= 0:
                self.prev_sib[z] = a
            self.linked[v] = 0

    cdef inline void _clear_children(self, Py_ssize_t v) noexcept:
        cdef Py_ssize_t k = self.first_child[v]
        while k >= 0:
            self.linked[k] = 0
            k = self.next_sib[k]
        self.first_child[v] = -1

    cdef Py_ssize_t _subtree(self, Py_ssize_t v, Py_ssize_t[::1] out) noexcept:
        cdef Py_ssize_t cnt = 1, i = 0, u, k
        out[0] = v
        while i < cnt:
            u = out[i]
            i += 1
            k = self.first_child[u]
            while k >= 0:
                out[cnt] = k
                cnt += 1
                k = self.next_sib[k]
        return cnt

    cdef inline double fkey(self, Py_ssize_t v) noexcept:
        return (self.c[v] + self.l[v]) + self.h[v]

    cdef inline double gkey(self, Py_ssize_t v) noexcept:
        return self.c[v] + self.l[v]

    # -- accessors -----------------------------------------------------------

    def cost(self, Py_ssize_t v):
        return self.c[v]

    def path_to(self, Py_ssize_t v):
        out = []
        while v >= 0:
            out.append(v)
            v = self.parent[v]
        return tuple(reversed(out))

    # -- main loop -----------------------------------------------------------

    def run(self):
        """Run to completion; returns ``OUT_TARGET`` or ``OUT_EXHAUSTED``."""
        cdef Py_ssize_t s = self.source
        cdef int out
        cdef double t0
        self._set(s, -1, -1, 0.0, 0.0, 0)
        self._attach(s)
        self.qe.push(s, self.fkey(s))
        self.queue_ops += 1
        self.extend_alpha_band()
        while True:
            out = self.select_and_evaluate()
            if out == OUT_EXHAUSTED or out == OUT_TARGET:
                return out
            self.update_alpha_band()
            t0 = perf_counter()
            self.rewire_alpha_band()
            self.rewire_time += perf_counter() - t0
            self.extend_alpha_band()

    cdef int select_and_evaluate(self) except -1:
        cdef Py_ssize_t tau, v, u, e, a, z, i, k, cnt
        cdef double f, wt
        cdef int st
        if self.qf._n == 0:
            return OUT_EXHAUSTED
        tau = self.qf.top()
        f = self.qf.top_key()
        self.qf.drop_top()
        self.queue_ops += 1
        self.iterations += 1
        self.ftrace.append(f)
        if self.replay is not None:
            self.replay.append("POP %d %r" % (tau, f))

        # Walk up to the border node; the chain lands reversed in sbuf.
        cnt = 0
        v = tau
        self.sbuf[cnt] = v
        cnt += 1
        while self.b[v] > 0:
            v = self.parent[v]
            self.sbuf[cnt] = v
            cnt += 1

        k = min(self.beta, cnt - 1)
        for i in range(k):
            u = self.sbuf[cnt - 1 - i]
            v = self.sbuf[cnt - 2 - i]
            e = self.pedge[v]
            if self.status[e] != _UNKNOWN:
                raise AssertionError(f"tail edge {e} already evaluated")
            res = self.graph.evaluate_edge(e)
            st = int(res[0])
            wt = res[1]
            self.status[e] = st
            a, z = (u, v) if u < v else (v, u)
            self.evaluated.append((a, z))
            self.results.append(st == _FREE)
            if self.replay is not None:
                self.replay.append("EVAL %d %d %s" % (a, z, "F" if st == _FREE else "B"))
            if st == _FREE:
                self._set(v, u, e, self.c[u] + wt, 0.0, 0)
                self.qu.push(v, self.gkey(v))
                self.queue_ops += 1
                if v == self.target:
                    return OUT_TARGET
            else:
                self.blocked += 1
                self.n_trw = self._subtree(v, self.trw)
                self._detach(v)
                return OUT_BLOCKED
        return OUT_FREE

    cdef int update_alpha_band(self) except -1:
        cdef Py_ssize_t tau, k, e
        cdef long count = 0
        cdef IndexedHeap qu = self.qu
        while qu._n > 0:
            tau = qu.top()
            qu.drop_top()
            self.queue_ops += 1
            count += 1
            k = self.first_child[tau]
            if k < 0:
                self.qe.push(tau, self.fkey(tau))
                self.queue_ops += 1
                continue
            while k >= 0:
                if self.b[k] == self.alpha:
                    self.qf.remove(k)
                    self.queue_ops += 1
                e = self.pedge[k]
                if self.b[tau] == 0 and self.status[e] == _FREE:
                    self._set(k, tau, e, self.c[tau] + self.w[e], 0.0, 0)
                else:
                    self._set(k, tau, e, self.c[tau], self.l[tau] + self.w[e], self.b[tau] + 1)
                qu.push(k, self.gkey(k))
                self.queue_ops += 1
                k = self.next_sib[k]
        if count and self.replay is not None:
            self.replay.append("UPDATE %d" % count)
        return 0

    cdef int rewire_alpha_band(self) except -1:
        cdef Py_ssize_t i, j, t, u, v, e, bt, n_trw = self.n_trw
        cdef Py_ssize_t alpha = self.alpha, target = self.target
        cdef double best, lu, lv, cand, ct, lt
        cdef IndexedHeap qr = self.qr
        if n_trw == 0:
            return 0
        self.n_trw = 0
        self.stamp += 1
        for i in range(n_trw):
            t = self.trw[i]
            self.mark[t] = self.stamp
            self.in_tree[t] = 0
            self._clear_children(t)
            self._reset(t)
            if self.qf.remove(t):
                self.queue_ops += 1
            if self.qe.remove(t):
                self.queue_ops += 1
        for i in range(n_trw):
            t = self.trw[i]
            best = INFINITY
            for j in range(self.adj_ptr[t], self.adj_ptr[t + 1]):
                e = self.adj_e[j]
                if self.status[e] == _BLOCKED:
                    continue
                u = self.adj_v[j]
                if (not self.in_tree[u] or self.b[u] >= alpha or u == target
                        or self.mark[u] == self.stamp or self.qe.has(u)):
                    continue
                lu = self.l[u] + self.w[e]
                cand = self.c[u] + lu
                if cand < best:
                    best = cand
                    self._set(t, u, e, self.c[u], lu, self.b[u] + 1)
            qr.push(t, self.gkey(t))
            self.queue_ops += 1
        self.rewired += n_trw
        if self.replay is not None:
            self.replay.append("REWIRE %d" % n_trw)

        while qr._n > 0:
            t = qr.top()
            qr.drop_top()
            self.queue_ops += 1
            if self.parent[t] < 0:
                continue
            self._attach(t)
            if self.b[t] == alpha or t == target:
                self.qf.push(t, self.fkey(t))
                self.queue_ops += 1
                continue
            self.qe.push(t, self.fkey(t))
            self.queue_ops += 1
            ct = self.c[t]
            lt = self.l[t]
            bt = self.b[t]
            for j in range(self.adj_ptr[t], self.adj_ptr[t + 1]):
                e = self.adj_e[j]
                if self.status[e] == _BLOCKED:
                    continue
                v = self.adj_v[j]
                if not qr.has(v):
                    continue
                lv = lt + self.w[e]
                if ct + lv < self.c[v] + self.l[v]:
                    self._set(v, t, e, ct, lv, bt + 1)
                    qr.push(v, self.gkey(v))
                    self.queue_ops += 1
        return 0

    cdef int extend_alpha_band(self) except -1:
        cdef Py_ssize_t t, v, e, j, i, k, sub, bt
        cdef Py_ssize_t alpha = self.alpha, target = self.target
        cdef double ct, lt, lv, key
        cdef IndexedHeap qf = self.qf, qe = self.qe
        while qe._n > 0:
            if self.lazy and qf._n > 0 and qe.top_key() >= qf.top_key():
                break
            t = qe.top()
            qe.drop_top()
            self.queue_ops += 1
            if t == target:
                qf.push(t, self.fkey(t))
                self.queue_ops += 1
                continue
            ct = self.c[t]
            lt = self.l[t]
            bt = self.b[t]
            for j in range(self.adj_ptr[t], self.adj_ptr[t + 1]):
                e = self.adj_e[j]
                if self.status[e] == _BLOCKED:
                    continue
                v = self.adj_v[j]
                lv = lt + self.w[e]
                if ct + lv >= self.c[v] + self.l[v]:
                    continue
                if self.in_tree[v]:
                    sub = self._subtree(v, self.sbuf)
                    self._detach(v)
                    for i in range(sub):
                        k = self.sbuf[i]
                        self.in_tree[k] = 0
                        self._clear_children(k)
                        if qf.remove(k):
                            self.queue_ops += 1
                        if qe.remove(k):
                            self.queue_ops += 1
                        if k != v:
                            self._reset(k)
                self._set(v, t, e, ct, lv, bt + 1)
                self._attach(v)
                key = (ct + lv) + self.h[v]
                if bt + 1 == alpha:
                    qf.push(v, key)
                else:
                    qe.push(v, key)
                self.queue_ops += 1
        return 0
