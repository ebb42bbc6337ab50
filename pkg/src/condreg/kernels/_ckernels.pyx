# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled search kernels over 64-bit fluent masks.

Same contracts as ``_pykernels``; callers must route domains with more than
64 fluents to the pure-Python backend.
"""

from libc.stdlib cimport malloc, calloc, free
from libc.stdint cimport uint64_t, int64_t

NAME = "compiled"
MAX_FLUENTS = 64

cdef enum:
    MAX_SLOTS = 64


def regress_layer(states, actions):
    cdef Py_ssize_t ns = len(states), na = len(actions)
    cdef Py_ssize_t si, ai
    cdef uint64_t T, F, pp, pn, add, dele
    cdef uint64_t *A = <uint64_t *> malloc(4 * na * sizeof(uint64_t) + 1)
    if A == NULL:
        raise MemoryError()
    out = []
    try:
        for ai in range(na):
            act = actions[ai]
            A[4 * ai] = act[0]
            A[4 * ai + 1] = act[1]
            A[4 * ai + 2] = act[2]
            A[4 * ai + 3] = act[3]
        for si in range(ns):
            st = states[si]
            T = st[0]
            F = st[1]
            for ai in range(na):
                pp = A[4 * ai]
                pn = A[4 * ai + 1]
                add = A[4 * ai + 2]
                dele = A[4 * ai + 3]
                if (add & T) == 0 and (dele & F) == 0:
                    continue
                if (add & F) or (dele & T) or (pp & F & ~dele) or (pn & T & ~add):
                    continue
                out.append((si, ai, (T & ~add) | pp, (F & ~dele) | pn))
    finally:
        free(A)
    return out


cdef struct PairSet:
    uint64_t *keys
    char *used
    Py_ssize_t cap
    Py_ssize_t size


cdef inline uint64_t _hash(uint64_t T, uint64_t F) nogil:
    cdef uint64_t h = T * <uint64_t> 0x9E3779B97F4A7C15ULL
    h ^= F + <uint64_t> 0x632BE59BD9B4E019ULL + (h << 6) + (h >> 2)
    h ^= h >> 31
    h *= <uint64_t> 0xBF58476D1CE4E5B9ULL
    h ^= h >> 29
    return h


cdef int _set_init(PairSet *s, Py_ssize_t hint):
    cdef Py_ssize_t cap = 16
    while cap < 2 * hint + 2:
        cap *= 2
    s.keys = <uint64_t *> malloc(2 * cap * sizeof(uint64_t))
    s.used = <char *> calloc(cap, 1)
    s.cap = cap
    s.size = 0
    if s.keys == NULL or s.used == NULL:
        free(s.keys)
        free(s.used)
        s.keys = NULL
        s.used = NULL
        return -1
    return 0


cdef void _set_free(PairSet *s):
    free(s.keys)
    free(s.used)
    s.keys = NULL
    s.used = NULL


cdef int _set_add(PairSet *s, uint64_t T, uint64_t F):
    """1 if added, 0 if present, -1 on allocation failure."""
    cdef Py_ssize_t i, old_cap
    cdef uint64_t *old_keys
    cdef char *old_used
    if 2 * (s.size + 1) > s.cap:
        old_keys = s.keys
        old_used = s.used
        old_cap = s.cap
        s.cap = old_cap * 2
        s.keys = <uint64_t *> malloc(2 * s.cap * sizeof(uint64_t))
        s.used = <char *> calloc(s.cap, 1)
        if s.keys == NULL or s.used == NULL:
            free(s.keys)
            free(s.used)
            s.keys = old_keys
            s.used = old_used
            s.cap = old_cap
            return -1
        s.size = 0
        for i in range(old_cap):
            if old_used[i]:
                _set_add(s, old_keys[2 * i], old_keys[2 * i + 1])
        free(old_keys)
        free(old_used)
    i = <Py_ssize_t> (_hash(T, F) & <uint64_t> (s.cap - 1))
    while s.used[i]:
        if s.keys[2 * i] == T and s.keys[2 * i + 1] == F:
            return 0
        i = (i + 1) & (s.cap - 1)
    s.used[i] = 1
    s.keys[2 * i] = T
    s.keys[2 * i + 1] = F
    s.size += 1
    return 1


def combine_branches(slots, init_T, init_F, outside, rest, first_new, seen):
    cdef Py_ssize_t k = len(slots)
    if k > MAX_SLOTS:
        raise ValueError("too many branch slots for the compiled kernel")
    cdef Py_ssize_t total = 0, j, p, n
    for slot in slots:
        total += len(slot)
    cdef PairSet known
    if _set_init(&known, len(seen)) < 0:
        raise MemoryError()
    cdef int64_t *idx = <int64_t *> malloc((total + 1) * sizeof(int64_t))
    cdef uint64_t *Ts = <uint64_t *> malloc((total + 1) * sizeof(uint64_t))
    cdef uint64_t *Fs = <uint64_t *> malloc((total + 1) * sizeof(uint64_t))
    if idx == NULL or Ts == NULL or Fs == NULL:
        free(idx)
        free(Ts)
        free(Fs)
        _set_free(&known)
        raise MemoryError()

    cdef Py_ssize_t off[MAX_SLOTS + 1]
    cdef Py_ssize_t new_start[MAX_SLOTS]
    cdef bint has_new_after[MAX_SLOTS + 1]
    cdef Py_ssize_t pos[MAX_SLOTS]
    cdef uint64_t uT[MAX_SLOTS + 1]
    cdef uint64_t uF[MAX_SLOTS + 1]
    cdef int news[MAX_SLOTS + 1]
    cdef uint64_t mask = outside
    cdef uint64_t rest_mask = rest
    cdef int64_t fn = first_new
    cdef uint64_t T, F, unknown, choice, rT, rF
    cdef Py_ssize_t consistent = 0
    cdef int added

    out = []
    try:
        for st in seen:
            if _set_add(&known, <uint64_t> st[0], <uint64_t> st[1]) < 0:
                raise MemoryError()
        p = 0
        for j in range(k):
            off[j] = p
            new_start[j] = -1
            for cand in slots[j]:
                idx[p] = cand[0]
                Ts[p] = (<uint64_t> cand[1]) & mask
                Fs[p] = (<uint64_t> cand[2]) & mask
                if new_start[j] < 0 and idx[p] >= fn:
                    new_start[j] = p
                p += 1
            if new_start[j] < 0:
                new_start[j] = p
        off[k] = p
        has_new_after[k] = False
        for j in range(k - 1, -1, -1):
            has_new_after[j] = has_new_after[j + 1] or new_start[j] < off[j + 1]

        if k == 0 or not has_new_after[0]:
            return out, 0
        uT[0] = (<uint64_t> init_T) & mask
        uF[0] = (<uint64_t> init_F) & mask
        news[0] = 0
        j = 0
        pos[0] = new_start[0] if not has_new_after[1] else off[0]
        while j >= 0:
            if pos[j] >= off[j + 1]:
                j -= 1
                if j >= 0:
                    pos[j] += 1
                continue
            T = Ts[pos[j]]
            F = Fs[pos[j]]
            if (T & uF[j]) or (F & uT[j]):
                pos[j] += 1
                continue
            uT[j + 1] = uT[j] | T
            uF[j + 1] = uF[j] | F
            news[j + 1] = news[j] or (idx[pos[j]] >= fn)
            if j + 1 == k:
                if news[k]:
                    consistent += 1
                    unknown = rest_mask & ~(uT[k] | uF[k])
                    choice = 0
                    while True:
                        rT = uT[k] | choice
                        rF = uF[k] | (unknown & ~choice)
                        added = _set_add(&known, rT, rF)
                        if added < 0:
                            raise MemoryError()
                        if added:
                            out.append((tuple([idx[pos[n]] for n in range(k)]), rT, rF))
                        if choice == unknown:
                            break
                        choice = (choice - unknown) & unknown
                pos[j] += 1
                continue
            if not news[j + 1] and not has_new_after[j + 1]:
                pos[j] += 1
                continue
            j += 1
            if not news[j] and not has_new_after[j + 1]:
                pos[j] = new_start[j]
            else:
                pos[j] = off[j]
    finally:
        free(idx)
        free(Ts)
        free(Fs)
        _set_free(&known)
    return out, consistent
