# cython: boundscheck=False, wraparound=False
"""Compiled gate kernels; semantics must match _gates_py exactly."""

from libc.stdlib cimport free, malloc, qsort


cdef struct Pair:
    double value
    long index


cdef int _cmp_desc(const void* a, const void* b) noexcept nogil:
    cdef const Pair* pa = <const Pair*>a
    cdef const Pair* pb = <const Pair*>b
    if pa.value > pb.value:
        return -1
    if pa.value < pb.value:
        return 1
    if pa.index < pb.index:
        return -1
    if pa.index > pb.index:
        return 1
    return 0


cdef int _cmp_asc(const void* a, const void* b) noexcept nogil:
    cdef const Pair* pa = <const Pair*>a
    cdef const Pair* pb = <const Pair*>b
    if pa.value < pb.value:
        return -1
    if pa.value > pb.value:
        return 1
    if pa.index < pb.index:
        return -1
    if pa.index > pb.index:
        return 1
    return 0


cdef Pair* _to_pairs(list values, Py_ssize_t n) except NULL:
    cdef Pair* pairs = <Pair*>malloc(n * sizeof(Pair))
    if pairs == NULL:
        raise MemoryError()
    cdef Py_ssize_t i
    for i in range(n):
        pairs[i].value = <double>values[i]
        pairs[i].index = i
    return pairs


def kernel_threshold(list values, double tau):
    cdef Py_ssize_t n = len(values)
    cdef list selected = []
    cdef Py_ssize_t i
    cdef double v
    cdef Py_ssize_t best = 0
    cdef double best_value
    for i in range(n):
        v = <double>values[i]
        if v >= tau:
            selected.append(i)
    if selected:
        return selected
    best_value = <double>values[0]
    for i in range(1, n):
        v = <double>values[i]
        if v > best_value:
            best = i
            best_value = v
    return [best]


def kernel_factor(list values, double gamma):
    cdef Py_ssize_t n = len(values)
    cdef Pair* pairs = _to_pairs(values, n)
    cdef Py_ssize_t k = 0
    cdef list out
    cdef Py_ssize_t i
    try:
        qsort(pairs, n, sizeof(Pair), _cmp_desc)
        while k < n:
            if (k + 2) * (1.0 - pairs[k].value) < gamma:
                k += 1
            else:
                break
        if k == 0:
            out = [pairs[0].index]
        else:
            out = [pairs[i].index for i in range(k)]
        return out
    finally:
        free(pairs)


def kernel_smallest(list values, Py_ssize_t r):
    if r == 0:
        return []
    cdef Py_ssize_t n = len(values)
    cdef Pair* pairs = _to_pairs(values, n)
    cdef list out
    cdef Py_ssize_t i
    try:
        qsort(pairs, n, sizeof(Pair), _cmp_asc)
        out = [pairs[i].index for i in range(r)]
        return out
    finally:
        free(pairs)
