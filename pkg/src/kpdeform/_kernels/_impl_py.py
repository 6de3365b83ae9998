"""Numpy implementations of the hot kernels.

Used when the compiled extension is unavailable. Same contracts as
``_ckernels``: float64 in, float64 out, deterministic.
"""
import numpy as np

BACKEND = "python"

_BLOCK = 512


def nearest_neighbors(a, b):
    """For each row of ``a`` (n,3), nearest row of ``b`` (m,3).

    Returns (idx, sqdist): int64 indices into ``b`` and exact squared
    distances. Brute force; blocked to bound memory.
    """
    a = np.ascontiguousarray(a, dtype=np.float64)
    b = np.ascontiguousarray(b, dtype=np.float64)
    n = a.shape[0]
    idx = np.empty(n, dtype=np.int64)
    b_sq = np.einsum("ij,ij->i", b, b)
    for lo in range(0, n, _BLOCK):
        hi = min(lo + _BLOCK, n)
        blk = a[lo:hi]
        d2 = np.einsum("ij,ij->i", blk, blk)[:, None] - 2.0 * blk @ b.T + b_sq[None, :]
        idx[lo:hi] = np.argmin(d2, axis=1)
    # recompute exactly: the expanded form loses a few ulps and can go negative
    diff = a - b[idx]
    return idx, np.einsum("ij,ij->i", diff, diff)


def farthest_point_indices(points, count, start):
    """Greedy max-min farthest point sampling from ``start``. Returns
    indices in selection order."""
    pts = np.ascontiguousarray(points, dtype=np.float64)
    n = pts.shape[0]
    chosen = np.empty(count, dtype=np.int64)
    chosen[0] = start
    diff = pts - pts[start]
    mind2 = np.einsum("ij,ij->i", diff, diff)
    for k in range(1, count):
        nxt = int(np.argmax(mind2))
        chosen[k] = nxt
        diff = pts - pts[nxt]
        np.minimum(mind2, np.einsum("ij,ij->i", diff, diff), out=mind2)
    return chosen


def mean_value_coordinates(points, vertices, faces, eps=1e-10):
    """Mean value coordinates of ``points`` (n,3) w.r.t. a closed triangle
    mesh (``vertices`` (c,3), ``faces`` (f,3) int).

    Rows are normalized to sum to 1. Points on the mesh surface resolve to
    the interpolating special cases (vertex indicator / in-triangle
    barycentric).
    """
    x = np.ascontiguousarray(points, dtype=np.float64)
    v = np.ascontiguousarray(vertices, dtype=np.float64)
    f = np.ascontiguousarray(faces, dtype=np.int64)
    n, c = x.shape[0], v.shape[0]

    diff = v[None, :, :] - x[:, None, :]            # (n,c,3)
    d = np.linalg.norm(diff, axis=2)                # (n,c)
    on_vertex = d < 1e-12
    d_safe = np.where(on_vertex, 1.0, d)
    u = diff / d_safe[:, :, None]

    tri = f.T                                       # (3,F)
    uu = u[:, tri, :]                               # (n,3,F,3): corner, face, xyz
    dd = d[:, tri]                                  # (n,3,F)

    # edge lengths of the projected spherical triangle, l_i = |u_{i+1} - u_{i-1}|
    l = np.stack(
        [np.linalg.norm(uu[:, (i + 1) % 3] - uu[:, (i + 2) % 3], axis=2) for i in range(3)],
        axis=1,
    )                                               # (n,3,F)
    theta = 2.0 * np.arcsin(np.clip(0.5 * l, 0.0, 1.0))
    h = 0.5 * theta.sum(axis=1)                     # (n,F)
    on_face = (np.pi - h) < eps

    sin_t = np.sin(theta)
    sin_h = np.sin(h)
    with np.errstate(divide="ignore", invalid="ignore"):
        ci = np.stack(
            [
                2.0 * sin_h * np.sin(h - theta[:, i]) / (sin_t[:, (i + 1) % 3] * sin_t[:, (i + 2) % 3])
                - 1.0
                for i in range(3)
            ],
            axis=1,
        )
    ci = np.clip(np.nan_to_num(ci, nan=-1.0, posinf=1.0, neginf=-1.0), -1.0, 1.0)
    det = np.einsum("nfi,nfi->nf", uu[:, 0], np.cross(uu[:, 1], uu[:, 2]))
    si = np.sign(det)[:, None, :] * np.sqrt(np.clip(1.0 - ci * ci, 0.0, None))

    degenerate = (np.abs(si) <= eps).any(axis=1) | (sin_t <= eps).any(axis=1)
    use = ~(on_face | degenerate)                   # (n,F)

    with np.errstate(divide="ignore", invalid="ignore"):
        wi = np.stack(
            [
                (theta[:, i] - ci[:, (i + 1) % 3] * theta[:, (i + 2) % 3]
                 - ci[:, (i + 2) % 3] * theta[:, (i + 1) % 3])
                / (dd[:, i] * sin_t[:, (i + 1) % 3] * si[:, (i + 2) % 3])
                for i in range(3)
            ],
            axis=1,
        )
    wi = np.where(use[:, None, :], np.nan_to_num(wi), 0.0)

    weights = np.zeros((n, c))
    flat = (np.arange(n)[:, None, None] * c + tri[None, :, :]).ravel()
    np.add.at(weights.ravel(), flat, wi.ravel())

    # points lying inside some triangle: 2D barycentric on that face only
    hit_rows = np.where(on_face.any(axis=1) & ~on_vertex.any(axis=1))[0]
    for row in hit_rows:
        fi = int(np.argmax(on_face[row]))
        weights[row] = 0.0
        for i in range(3):
            weights[row, tri[i, fi]] = sin_t[row, i, fi] * dd[row, (i + 2) % 3, fi] * dd[row, (i + 1) % 3, fi]

    # points coinciding with a cage vertex: indicator row
    vrow, vcol = np.where(on_vertex)
    if vrow.size:
        weights[vrow] = 0.0
        weights[vrow, vcol] = 1.0

    total = weights.sum(axis=1)
    bad = np.abs(total) < 1e-12
    if bad.any():
        raise ArithmeticError(
            f"degenerate mean value coordinates for {int(bad.sum())} point(s)"
        )
    return weights / total[:, None]


def point_mesh_sqdist(points, vertices, faces):
    """Exact squared distance from each point to the closest triangle of the
    mesh. Vectorized closest-point-on-triangle (Ericson)."""
    x = np.ascontiguousarray(points, dtype=np.float64)
    v = np.ascontiguousarray(vertices, dtype=np.float64)
    f = np.ascontiguousarray(faces, dtype=np.int64)
    n = x.shape[0]
    out = np.empty(n)
    step = max(1, _BLOCK * 512 // max(1, f.shape[0]))
    for lo in range(0, n, step):
        out[lo:lo + step] = _pt_tri_block(x[lo:lo + step], v, f)
    return out


def _edge_sqdist(p_minus_a, edge):
    # squared distance to segment a + t*edge, t clamped to [0,1]
    ee = np.einsum("fi,fi->f", edge, edge)[None]
    with np.errstate(divide="ignore", invalid="ignore"):
        t = np.nan_to_num(np.einsum("nfi,fi->nf", p_minus_a, edge) / ee)
    t = np.clip(t, 0.0, 1.0)
    diff = p_minus_a - t[..., None] * edge[None]
    return np.einsum("nfi,nfi->nf", diff, diff)


def _pt_tri_block(x, v, f):
    # min over: the three clamped edges (covers vertices) and the interior
    # plane projection where it lands inside the triangle
    a, b, c = v[f[:, 0]], v[f[:, 1]], v[f[:, 2]]    # (F,3)
    ap = x[:, None, :] - a[None]                    # (n,F,3)
    bp = x[:, None, :] - b[None]

    d2 = _edge_sqdist(ap, b - a)
    np.minimum(d2, _edge_sqdist(ap, c - a), out=d2)
    np.minimum(d2, _edge_sqdist(bp, c - b), out=d2)

    ab, ac = b - a, c - a
    d00 = np.einsum("fi,fi->f", ab, ab)
    d01 = np.einsum("fi,fi->f", ab, ac)
    d11 = np.einsum("fi,fi->f", ac, ac)
    d20 = np.einsum("nfi,fi->nf", ap, ab)
    d21 = np.einsum("nfi,fi->nf", ap, ac)
    denom = (d00 * d11 - d01 * d01)[None]
    with np.errstate(divide="ignore", invalid="ignore"):
        bv = np.nan_to_num((d11[None] * d20 - d01[None] * d21) / denom)
        bw = np.nan_to_num((d00[None] * d21 - d01[None] * d20) / denom)
    inside = (bv >= 0.0) & (bw >= 0.0) & (bv + bw <= 1.0) & (denom > 0.0)
    diff = ap - bv[..., None] * ab[None] - bw[..., None] * ac[None]
    inner = np.einsum("nfi,nfi->nf", diff, diff)
    np.minimum(d2, np.where(inside, inner, np.inf), out=d2)
    return d2.min(axis=1)
