"""Pure-Python versions of the hot kernels.

Used when the compiled ``_ckernels`` extension is unavailable, or when
``LRASTAR_PURE=1`` is set in the environment.
"""
import math

import numpy as np

INF = math.inf


class IndexedHeap:
    """Binary min-heap over integer items in ``[0, capacity)``.

    Entries are ordered by ``(key, item)``; every item appears at most once
    and its key can be changed or the item removed in O(log n).
    """

    __slots__ = ("_keys", "_items", "_pos")

    def __init__(self, capacity):
        self._keys = []
        self._items = []
        self._pos = [-1] * capacity

    def __len__(self):
        return len(self._items)

    def __bool__(self):
        return bool(self._items)

    def __contains__(self, item):
        return self._pos[item] >= 0

    def clear(self):
        for item in self._items:
            self._pos[item] = -1
        self._keys.clear()
        self._items.clear()

    def key(self, item):
        i = self._pos[item]
        if i < 0:
            raise KeyError(item)
        return self._keys[i]

    def peek(self):
        if not self._items:
            raise IndexError("peek from empty heap")
        return self._items[0], self._keys[0]

    def peek_key(self):
        return self._keys[0] if self._keys else INF

    def items(self):
        return list(self._items)

    def push(self, item, key):
        """Insert ``item`` or change its key if already present."""
        i = self._pos[item]
        if i < 0:
            i = len(self._items)
            self._items.append(item)
            self._keys.append(key)
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
        if not self._items:
            raise IndexError("pop from empty heap")
        item, key = self._items[0], self._keys[0]
        self._delete_at(0)
        return item, key

    def remove(self, item):
        i = self._pos[item]
        if i < 0:
            return False
        self._delete_at(i)
        return True

    def _delete_at(self, i):
        items, keys, pos = self._items, self._keys, self._pos
        pos[items[i]] = -1
        last_item = items.pop()
        last_key = keys.pop()
        if i < len(items):
            items[i] = last_item
            keys[i] = last_key
            pos[last_item] = i
            self._sift_up(i)
            self._sift_down(pos[last_item])

    def _sift_up(self, i):
        items, keys, pos = self._items, self._keys, self._pos
        item, key = items[i], keys[i]
        while i > 0:
            p = (i - 1) >> 1
            pk = keys[p]
            if pk < key or (pk == key and items[p] < item):
                break
            items[i] = items[p]
            keys[i] = pk
            pos[items[i]] = i
            i = p
        items[i] = item
        keys[i] = key
        pos[item] = i

    def _sift_down(self, i):
        items, keys, pos = self._items, self._keys, self._pos
        n = len(items)
        item, key = items[i], keys[i]
        while True:
            c = 2 * i + 1
            if c >= n:
                break
            r = c + 1
            if r < n and (keys[r] < keys[c] or (keys[r] == keys[c] and items[r] < items[c])):
                c = r
            ck = keys[c]
            if key < ck or (key == ck and item < items[c]):
                break
            items[i] = items[c]
            keys[i] = ck
            pos[items[i]] = i
            i = c
        items[i] = item
        keys[i] = key
        pos[item] = i


def sample_count(p, q, resolution):
    """Number of samples covering segment ``pq`` at spacing <= resolution."""
    length = float(np.linalg.norm(np.asarray(q, dtype=float) - np.asarray(p, dtype=float)))
    return int(math.ceil(length / resolution)) + 1


def segment_hits_boxes(p, q, lo, hi, resolution):
    """True iff a sample of segment ``pq`` lies in a closed box ``[lo_i, hi_i]``."""
    if len(lo) == 0:
        return False
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    k = sample_count(p, q, resolution)
    t = np.arange(k) / (k - 1) if k > 1 else np.zeros(1)
    pts = p[None, :] + t[:, None] * (q - p)[None, :]
    # Cheap rejection on the segment's bounding box first.
    seg_lo = np.minimum(p, q)
    seg_hi = np.maximum(p, q)
    near = np.all((lo <= seg_hi) & (hi >= seg_lo), axis=1)
    if not near.any():
        return False
    blo = lo[near]
    bhi = hi[near]
    for start in range(0, k, 1024):
        chunk = pts[start:start + 1024]
        inside = np.all((chunk[:, None, :] >= blo[None]) & (chunk[:, None, :] <= bhi[None]), axis=2)
        if inside.any():
            return True
    return False
