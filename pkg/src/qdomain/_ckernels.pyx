# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels; same contracts as ``qdomain._kernels_py``."""

import numpy as np
cimport numpy as cnp

cnp.import_array()

cdef enum:
    LUKASIEWICZ = 0


cdef inline double _conj(double x, double y, const double[:] lo, const double[:] hi,
                         const long[:] kind, Py_ssize_t npieces) nogil:
    cdef Py_ssize_t p
    cdef double a, b, v
    for p in range(npieces):
        a = lo[p]
        b = hi[p]
        if x > a and x < b and y > a and y < b:
            if kind[p] == LUKASIEWICZ:
                v = x + y - b
                return a if a > v else v
            return a + (x - a) * (y - a) / (b - a)
    return x if x < y else y


cdef inline double _res(double x, double y, const double[:] lo, const double[:] hi,
                        const long[:] kind, Py_ssize_t npieces, double top) nogil:
    cdef Py_ssize_t p
    cdef double a, b
    if x <= y:
        return top
    for p in range(npieces):
        a = lo[p]
        b = hi[p]
        if y >= a and x < b:
            if kind[p] == LUKASIEWICZ:
                return b - x + y
            return a + (b - a) * (y - a) / (x - a)
    return y


def _pieces(lo, hi, kind):
    return (np.ascontiguousarray(lo, dtype=np.float64),
            np.ascontiguousarray(hi, dtype=np.float64),
            np.ascontiguousarray(kind, dtype=np.int_))


def conj(x, y, lo, hi, kind, top):
    xb, yb = np.broadcast_arrays(np.asarray(x, dtype=np.float64), np.asarray(y, dtype=np.float64))
    shape = xb.shape
    cdef const double[:] xs = np.ascontiguousarray(xb).ravel()
    cdef const double[:] ys = np.ascontiguousarray(yb).ravel()
    lo_a, hi_a, kind_a = _pieces(lo, hi, kind)
    cdef const double[:] l = lo_a
    cdef const double[:] h = hi_a
    cdef const long[:] k = kind_a
    cdef Py_ssize_t npieces = l.shape[0]
    out = np.empty(xs.shape[0], dtype=np.float64)
    cdef double[:] o = out
    cdef Py_ssize_t i
    with nogil:
        for i in range(xs.shape[0]):
            o[i] = _conj(xs[i], ys[i], l, h, k, npieces)
    return out.reshape(shape)


def residuum(x, y, lo, hi, kind, top):
    xb, yb = np.broadcast_arrays(np.asarray(x, dtype=np.float64), np.asarray(y, dtype=np.float64))
    shape = xb.shape
    cdef const double[:] xs = np.ascontiguousarray(xb).ravel()
    cdef const double[:] ys = np.ascontiguousarray(yb).ravel()
    lo_a, hi_a, kind_a = _pieces(lo, hi, kind)
    cdef const double[:] l = lo_a
    cdef const double[:] h = hi_a
    cdef const long[:] k = kind_a
    cdef Py_ssize_t npieces = l.shape[0]
    cdef double t = top
    out = np.empty(xs.shape[0], dtype=np.float64)
    cdef double[:] o = out
    cdef Py_ssize_t i
    with nogil:
        for i in range(xs.shape[0]):
            o[i] = _res(xs[i], ys[i], l, h, k, npieces, t)
    return out.reshape(shape)


def compose_max(A, B, lo, hi, kind, top):
    cdef const double[:, :] a = np.ascontiguousarray(A, dtype=np.float64)
    cdef const double[:, :] b = np.ascontiguousarray(B, dtype=np.float64)
    if a.shape[1] != b.shape[0]:
        raise ValueError(f"inner dimensions differ: {a.shape[1]} vs {b.shape[0]}")
    lo_a, hi_a, kind_a = _pieces(lo, hi, kind)
    cdef const double[:] l = lo_a
    cdef const double[:] h = hi_a
    cdef const long[:] k = kind_a
    cdef Py_ssize_t npieces = l.shape[0]
    cdef Py_ssize_t m = a.shape[0], inner = a.shape[1], p = b.shape[1]
    out = np.zeros((m, p), dtype=np.float64)
    cdef double[:, :] o = out
    cdef Py_ssize_t i, j, r
    cdef double best, v
    with nogil:
        for i in range(m):
            for j in range(p):
                best = 0.0
                for r in range(inner):
                    v = _conj(a[i, r], b[r, j], l, h, k, npieces)
                    if v > best:
                        best = v
                o[i, j] = best
    return out


def residuum_meet(A, B, lo, hi, kind, top):
    cdef const double[:, :] a = np.ascontiguousarray(A, dtype=np.float64)
    cdef const double[:, :] b = np.ascontiguousarray(B, dtype=np.float64)
    if a.shape[1] != b.shape[1]:
        raise ValueError(f"row lengths differ: {a.shape[1]} vs {b.shape[1]}")
    lo_a, hi_a, kind_a = _pieces(lo, hi, kind)
    cdef const double[:] l = lo_a
    cdef const double[:] h = hi_a
    cdef const long[:] k = kind_a
    cdef Py_ssize_t npieces = l.shape[0]
    cdef Py_ssize_t m = a.shape[0], inner = a.shape[1], p = b.shape[0]
    cdef double t = top
    out = np.empty((m, p), dtype=np.float64)
    cdef double[:, :] o = out
    cdef Py_ssize_t i, j, r
    cdef double worst, v
    with nogil:
        for i in range(m):
            for j in range(p):
                worst = t
                for r in range(inner):
                    v = _res(a[i, r], b[j, r], l, h, k, npieces, t)
                    if v < worst:
                        worst = v
                o[i, j] = worst
    return out


def approach_violations(delta, lo, hi, kind, top):
    cdef const double[:, :] d = np.ascontiguousarray(delta, dtype=np.float64)
    lo_a, hi_a, kind_a = _pieces(lo, hi, kind)
    cdef const double[:] l = lo_a
    cdef const double[:] h = hi_a
    cdef const long[:] k = kind_a
    cdef Py_ssize_t npieces = l.shape[0]
    cdef Py_ssize_t n = d.shape[0], m = d.shape[1]
    cdef double t = top
    cdef Py_ssize_t x, A, B, b, low
    cdef double v, best3 = 0.0, best4 = 0.0, lhs
    cdef Py_ssize_t w3x = -1, w3a = -1, w3b = -1, w4x = -1, w4a = -1, w4b = -1

    meet = np.empty((m, m), dtype=np.float64)
    cdef double[:, :] mb = meet

    with nogil:
        for x in range(n):
            for A in range(m):
                for B in range(m):
                    lhs = d[x, A] if d[x, A] > d[x, B] else d[x, B]
                    v = d[x, A | B] - lhs
                    if v < 0:
                        v = -v
                    if v > best3:
                        best3 = v
                        w3x = x
                        w3a = A
                        w3b = B
        for A in range(m):
            mb[A, 0] = t
            for B in range(1, m):
                low = B & -B
                b = 0
                while (low >> b) != 1:
                    b += 1
                v = d[b, A]
                mb[A, B] = mb[A, B ^ low] if mb[A, B ^ low] < v else v
        for A in range(m):
            for x in range(n):
                for B in range(m):
                    v = _conj(mb[A, B], d[x, B], l, h, k, npieces) - d[x, A]
                    if v > best4:
                        best4 = v
                        w4x = x
                        w4a = A
                        w4b = B
    w3 = (int(w3x), int(w3a), int(w3b)) if w3x >= 0 else None
    w4 = (int(w4x), int(w4a), int(w4b)) if w4x >= 0 else None
    return float(best3), w3, float(best4), w4
