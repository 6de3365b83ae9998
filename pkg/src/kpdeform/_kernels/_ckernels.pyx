# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled implementations of the hot kernels.

Same contracts as ``_impl_py``; selected at import when available.
"""
import numpy as np

cimport numpy as cnp
from libc.math cimport asin, fabs, INFINITY, pi, sin, sqrt

cnp.import_array()

BACKEND = "cython"


def nearest_neighbors(a, b):
    cdef cnp.ndarray[cnp.float64_t, ndim=2] aa = np.ascontiguousarray(a, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=2] bb = np.ascontiguousarray(b, dtype=np.float64)
    cdef Py_ssize_t n = aa.shape[0], m = bb.shape[0], i, j
    cdef cnp.ndarray[cnp.int64_t, ndim=1] idx = np.empty(n, dtype=np.int64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] dist = np.empty(n, dtype=np.float64)
    cdef double best, d, dx, dy, dz
    cdef Py_ssize_t bj
    for i in range(n):
        best = INFINITY
        bj = 0
        for j in range(m):
            dx = aa[i, 0] - bb[j, 0]
            dy = aa[i, 1] - bb[j, 1]
            dz = aa[i, 2] - bb[j, 2]
            d = dx * dx + dy * dy + dz * dz
            if d < best:
                best = d
                bj = j
        idx[i] = bj
        dist[i] = best
    return idx, dist


def farthest_point_indices(points, Py_ssize_t count, Py_ssize_t start):
    cdef cnp.ndarray[cnp.float64_t, ndim=2] pts = np.ascontiguousarray(points, dtype=np.float64)
    cdef Py_ssize_t n = pts.shape[0], i, k, best_i
    cdef cnp.ndarray[cnp.int64_t, ndim=1] chosen = np.empty(count, dtype=np.int64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] mind2 = np.empty(n, dtype=np.float64)
    cdef double dx, dy, dz, d, best
    chosen[0] = start
    for i in range(n):
        dx = pts[i, 0] - pts[start, 0]
        dy = pts[i, 1] - pts[start, 1]
        dz = pts[i, 2] - pts[start, 2]
        mind2[i] = dx * dx + dy * dy + dz * dz
    for k in range(1, count):
        best = -1.0
        best_i = 0
        for i in range(n):
            if mind2[i] > best:
                best = mind2[i]
                best_i = i
        chosen[k] = best_i
        for i in range(n):
            dx = pts[i, 0] - pts[best_i, 0]
            dy = pts[i, 1] - pts[best_i, 1]
            dz = pts[i, 2] - pts[best_i, 2]
            d = dx * dx + dy * dy + dz * dz
            if d < mind2[i]:
                mind2[i] = d
    return chosen


def mean_value_coordinates(points, vertices, faces, double eps=1e-10):
    cdef cnp.ndarray[cnp.float64_t, ndim=2] x = np.ascontiguousarray(points, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=2] v = np.ascontiguousarray(vertices, dtype=np.float64)
    cdef cnp.ndarray[cnp.int64_t, ndim=2] f = np.ascontiguousarray(faces, dtype=np.int64)
    cdef Py_ssize_t n = x.shape[0], c = v.shape[0], nf = f.shape[0]
    cdef cnp.ndarray[cnp.float64_t, ndim=2] weights = np.zeros((n, c), dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] d = np.empty(c, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=2] u = np.empty((c, 3), dtype=np.float64)
    cdef Py_ssize_t p, j, t, i, i0, i1, i2, hit
    cdef Py_ssize_t tri[3]
    cdef double l[3]
    cdef double theta[3]
    cdef double ci[3]
    cdef double si[3]
    cdef double w[3]
    cdef double dx, dy, dz, dist, h, det, sgn, total, denom, lk
    cdef bint skip, on_face

    for p in range(n):
        hit = -1
        on_face = False
        for j in range(c):
            dx = v[j, 0] - x[p, 0]
            dy = v[j, 1] - x[p, 1]
            dz = v[j, 2] - x[p, 2]
            dist = sqrt(dx * dx + dy * dy + dz * dz)
            if dist < 1e-12:
                hit = j
                break
            d[j] = dist
            u[j, 0] = dx / dist
            u[j, 1] = dy / dist
            u[j, 2] = dz / dist
        if hit >= 0:
            weights[p, hit] = 1.0
            continue

        for t in range(nf):
            tri[0] = f[t, 0]
            tri[1] = f[t, 1]
            tri[2] = f[t, 2]
            for i in range(3):
                i1 = tri[(i + 1) % 3]
                i2 = tri[(i + 2) % 3]
                dx = u[i1, 0] - u[i2, 0]
                dy = u[i1, 1] - u[i2, 1]
                dz = u[i1, 2] - u[i2, 2]
                lk = sqrt(dx * dx + dy * dy + dz * dz)
                if lk > 2.0:
                    lk = 2.0
                l[i] = lk
                theta[i] = 2.0 * asin(0.5 * lk)
            h = 0.5 * (theta[0] + theta[1] + theta[2])
            if pi - h < eps:
                # x lies inside this triangle: 2D barycentric, this face only
                for j in range(c):
                    weights[p, j] = 0.0
                total = 0.0
                for i in range(3):
                    w[i] = sin(theta[i]) * d[tri[(i + 2) % 3]] * d[tri[(i + 1) % 3]]
                    total += w[i]
                for i in range(3):
                    weights[p, tri[i]] = w[i] / total
                on_face = True
                break
            i0 = tri[0]
            i1 = tri[1]
            i2 = tri[2]
            det = (u[i0, 0] * (u[i1, 1] * u[i2, 2] - u[i1, 2] * u[i2, 1])
                   - u[i0, 1] * (u[i1, 0] * u[i2, 2] - u[i1, 2] * u[i2, 0])
                   + u[i0, 2] * (u[i1, 0] * u[i2, 1] - u[i1, 1] * u[i2, 0]))
            sgn = 1.0 if det >= 0.0 else -1.0
            skip = False
            for i in range(3):
                denom = sin(theta[(i + 1) % 3]) * sin(theta[(i + 2) % 3])
                if fabs(denom) <= eps * eps or sin(theta[i]) <= eps:
                    skip = True
                    break
                ci[i] = 2.0 * sin(h) * sin(h - theta[i]) / denom - 1.0
                if ci[i] > 1.0:
                    ci[i] = 1.0
                elif ci[i] < -1.0:
                    ci[i] = -1.0
                si[i] = sgn * sqrt(1.0 - ci[i] * ci[i])
            if skip:
                continue
            if fabs(si[0]) <= eps or fabs(si[1]) <= eps or fabs(si[2]) <= eps:
                continue  # x on the plane of t but outside it
            for i in range(3):
                weights[p, tri[i]] += (
                    (theta[i] - ci[(i + 1) % 3] * theta[(i + 2) % 3]
                     - ci[(i + 2) % 3] * theta[(i + 1) % 3])
                    / (d[tri[i]] * sin(theta[(i + 1) % 3]) * si[(i + 2) % 3])
                )
        if on_face:
            continue
        total = 0.0
        for j in range(c):
            total += weights[p, j]
        if fabs(total) < 1e-12:
            raise ArithmeticError(f"degenerate mean value coordinates for point {p}")
        for j in range(c):
            weights[p, j] /= total
    return weights


cdef inline double _seg_sqdist(double px, double py, double pz,
                               double ax, double ay, double az,
                               double ex, double ey, double ez) nogil:
    cdef double ee = ex * ex + ey * ey + ez * ez
    cdef double t, dx, dy, dz
    if ee > 0.0:
        t = ((px - ax) * ex + (py - ay) * ey + (pz - az) * ez) / ee
        if t < 0.0:
            t = 0.0
        elif t > 1.0:
            t = 1.0
    else:
        t = 0.0
    dx = px - ax - t * ex
    dy = py - ay - t * ey
    dz = pz - az - t * ez
    return dx * dx + dy * dy + dz * dz


def point_mesh_sqdist(points, vertices, faces):
    cdef cnp.ndarray[cnp.float64_t, ndim=2] x = np.ascontiguousarray(points, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=2] v = np.ascontiguousarray(vertices, dtype=np.float64)
    cdef cnp.ndarray[cnp.int64_t, ndim=2] f = np.ascontiguousarray(faces, dtype=np.int64)
    cdef Py_ssize_t n = x.shape[0], nf = f.shape[0], p, t
    cdef cnp.ndarray[cnp.float64_t, ndim=1] out = np.empty(n, dtype=np.float64)
    cdef double px, py, pz, best, d2
    cdef double ax, ay, az, bx, by, bz, cx, cy, cz
    cdef double abx, aby, abz, acx, acy, acz, apx, apy, apz
    cdef double d00, d01, d11, d20, d21, denom, bv, bw, dx, dy, dz
    for p in range(n):
        px = x[p, 0]
        py = x[p, 1]
        pz = x[p, 2]
        best = INFINITY
        for t in range(nf):
            ax = v[f[t, 0], 0]; ay = v[f[t, 0], 1]; az = v[f[t, 0], 2]
            bx = v[f[t, 1], 0]; by = v[f[t, 1], 1]; bz = v[f[t, 1], 2]
            cx = v[f[t, 2], 0]; cy = v[f[t, 2], 1]; cz = v[f[t, 2], 2]
            d2 = _seg_sqdist(px, py, pz, ax, ay, az, bx - ax, by - ay, bz - az)
            if d2 < best:
                best = d2
            d2 = _seg_sqdist(px, py, pz, ax, ay, az, cx - ax, cy - ay, cz - az)
            if d2 < best:
                best = d2
            d2 = _seg_sqdist(px, py, pz, bx, by, bz, cx - bx, cy - by, cz - bz)
            if d2 < best:
                best = d2
            abx = bx - ax; aby = by - ay; abz = bz - az
            acx = cx - ax; acy = cy - ay; acz = cz - az
            apx = px - ax; apy = py - ay; apz = pz - az
            d00 = abx * abx + aby * aby + abz * abz
            d01 = abx * acx + aby * acy + abz * acz
            d11 = acx * acx + acy * acy + acz * acz
            d20 = apx * abx + apy * aby + apz * abz
            d21 = apx * acx + apy * acy + apz * acz
            denom = d00 * d11 - d01 * d01
            if denom > 0.0:
                bv = (d11 * d20 - d01 * d21) / denom
                bw = (d00 * d21 - d01 * d20) / denom
                if bv >= 0.0 and bw >= 0.0 and bv + bw <= 1.0:
                    dx = apx - bv * abx - bw * acx
                    dy = apy - bv * aby - bw * acy
                    dz = apz - bv * abz - bw * acz
                    d2 = dx * dx + dy * dy + dz * dz
                    if d2 < best:
                        best = d2
        out[p] = best
    return out
