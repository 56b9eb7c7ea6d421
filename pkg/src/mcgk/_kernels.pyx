# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled enumeration kernels; see _kernels_py.py for the reference version."""
from libc.stdlib cimport malloc, free


cdef inline long _gcd(long a, long b) nogil:
    cdef long t
    if a < 0:
        a = -a
    if b < 0:
        b = -b
    while b:
        t = a % b
        a = b
        b = t
    return a


def enumerate_counts(long budget, weights):
    cdef Py_ssize_t m = len(weights)
    cdef long *w
    cdef long *a
    cdef long *rem
    cdef Py_ssize_t j, k
    out = []
    if budget < 0:
        return out
    if m == 0:
        if budget == 0:
            out.append(())
        return out
    w = <long *> malloc(m * sizeof(long))
    a = <long *> malloc(m * sizeof(long))
    rem = <long *> malloc((m + 1) * sizeof(long))
    try:
        for j in range(m):
            w[j] = weights[j]
            a[j] = 0
        rem[0] = budget
        j = 0
        # iterative DFS; a[j] is the value being tried at level j
        while True:
            if j == m - 1:
                if rem[j] % w[j] == 0:
                    a[j] = rem[j] // w[j]
                    out.append(tuple([a[k] for k in range(m)]))
                # backtrack
                j -= 1
                while j >= 0:
                    a[j] += 1
                    if a[j] * w[j] <= rem[j]:
                        break
                    j -= 1
                if j < 0:
                    break
                rem[j + 1] = rem[j] - a[j] * w[j]
                j += 1
                a[j] = 0
            else:
                a[j] = 0
                rem[j + 1] = rem[j]
                j += 1
                a[j] = 0
    finally:
        free(w)
        free(a)
        free(rem)
    return out


def search_vectors(long n, orders, bint need_generate, bint first_only):
    cdef Py_ssize_t q = len(orders)
    cdef Py_ssize_t j, k, total
    cdef long *cand
    cdef long *start
    cdef long *size
    cdef long *idx
    cdef long *vec
    cdef long *psum
    cdef long *pg
    cdef long m, step, u, c, last_m
    out = []
    if q == 0:
        if not need_generate or n == 1:
            out.append(())
        return out
    start = <long *> malloc(q * sizeof(long))
    size = <long *> malloc(q * sizeof(long))
    idx = <long *> malloc(q * sizeof(long))
    vec = <long *> malloc(q * sizeof(long))
    psum = <long *> malloc((q + 1) * sizeof(long))
    pg = <long *> malloc((q + 1) * sizeof(long))
    total = 0
    for j in range(q):
        total += orders[j]
    cand = <long *> malloc((total + 1) * sizeof(long))
    try:
        total = 0
        for j in range(q):
            m = orders[j]
            step = n // m
            start[j] = total
            size[j] = 0
            for u in range(1, m):
                if _gcd(u, m) == 1:
                    cand[total] = step * u
                    total += 1
                    size[j] += 1
        last_m = orders[q - 1]
        psum[0] = 0
        pg[0] = n
        if q == 1:
            # the lone entry would have to be 0, which has order 1
            return out
        # odometer over the first q-1 positions
        for j in range(q - 1):
            if size[j] == 0:
                return out
            idx[j] = 0
        j = 0
        while True:
            # fill prefix sums from level j onward
            for k in range(j, q - 1):
                vec[k] = cand[start[k] + idx[k]]
                psum[k + 1] = (psum[k] + vec[k]) % n
                pg[k + 1] = _gcd(pg[k], vec[k])
            c = (n - psum[q - 1]) % n
            if c != 0 and n // _gcd(c, n) == last_m:
                if not need_generate or _gcd(pg[q - 1], c) == 1:
                    vec[q - 1] = c
                    out.append(tuple([vec[k] for k in range(q)]))
                    if first_only:
                        return out
            # advance odometer (last free position fastest)
            j = q - 2
            while j >= 0:
                idx[j] += 1
                if idx[j] < size[j]:
                    break
                idx[j] = 0
                j -= 1
            if j < 0:
                break
    finally:
        free(start)
        free(size)
        free(idx)
        free(vec)
        free(psum)
        free(pg)
        free(cand)
    return out
