"""Hot numeric kernels with a numba path and a pure-numpy path.

Two kernels dominate the sweeps and grid checks:

* ``wigner_quats`` -- closed-form Wigner rotation (polar split, Halpern angle,
  SU(2) product) for a batch of (Lambda, p, m) samples.
* ``central_difference`` -- second-order first derivative of a complex 3D
  array along one axis, with one-sided second-order stencils at the faces.

Quaternions here are SU(2) coordinates: ``q = (w, x, y, z)`` stands for
``w*I + i*(x*s1 + y*s2 + z*s3)``, so composition is the matrix product.

Set ``WIGNERBELL_DISABLE_NUMBA=1`` to force the numpy implementations.
"""

import os

import numpy as np

_DISABLED = os.environ.get("WIGNERBELL_DISABLE_NUMBA", "").strip().lower() in {"1", "true", "yes", "on"}

try:
    if _DISABLED:
        raise ImportError("numba disabled by environment")
    from numba import njit

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - exercised only without numba
    HAVE_NUMBA = False

    def njit(*args, **kwargs):
        if len(args) == 1 and callable(args[0]):
            return args[0]
        return lambda f: f


BACKEND = "numba" if HAVE_NUMBA else "numpy"


# --------------------------------------------------------------------------
# numpy implementations
# --------------------------------------------------------------------------


def _quat_from_so3_np(R):
    """Largest-branch extraction for a stack of 3x3 rotations ``R[..., 3, 3]``."""
    R = np.asarray(R, dtype=float)
    shape = R.shape[:-2]
    R = R.reshape(-1, 3, 3)
    n = R.shape[0]
    q = np.empty((n, 4))
    tr = R[:, 0, 0] + R[:, 1, 1] + R[:, 2, 2]
    cand = np.stack([tr, R[:, 0, 0], R[:, 1, 1], R[:, 2, 2]], axis=1)
    branch = np.argmax(cand, axis=1)

    b = branch == 0
    w = 0.5 * np.sqrt(np.maximum(1.0 + tr[b], 0.0))
    q[b, 0] = w
    q[b, 1] = (R[b, 1, 2] - R[b, 2, 1]) / (4 * w)
    q[b, 2] = (R[b, 2, 0] - R[b, 0, 2]) / (4 * w)
    q[b, 3] = (R[b, 0, 1] - R[b, 1, 0]) / (4 * w)

    b = branch == 1
    x = 0.5 * np.sqrt(np.maximum(1.0 + R[b, 0, 0] - R[b, 1, 1] - R[b, 2, 2], 0.0))
    q[b, 1] = x
    q[b, 0] = (R[b, 1, 2] - R[b, 2, 1]) / (4 * x)
    q[b, 2] = (R[b, 0, 1] + R[b, 1, 0]) / (4 * x)
    q[b, 3] = (R[b, 0, 2] + R[b, 2, 0]) / (4 * x)

    b = branch == 2
    y = 0.5 * np.sqrt(np.maximum(1.0 - R[b, 0, 0] + R[b, 1, 1] - R[b, 2, 2], 0.0))
    q[b, 2] = y
    q[b, 0] = (R[b, 2, 0] - R[b, 0, 2]) / (4 * y)
    q[b, 1] = (R[b, 0, 1] + R[b, 1, 0]) / (4 * y)
    q[b, 3] = (R[b, 1, 2] + R[b, 2, 1]) / (4 * y)

    b = branch == 3
    z = 0.5 * np.sqrt(np.maximum(1.0 - R[b, 0, 0] - R[b, 1, 1] + R[b, 2, 2], 0.0))
    q[b, 3] = z
    q[b, 0] = (R[b, 0, 1] - R[b, 1, 0]) / (4 * z)
    q[b, 1] = (R[b, 0, 2] + R[b, 2, 0]) / (4 * z)
    q[b, 2] = (R[b, 1, 2] + R[b, 2, 1]) / (4 * z)

    q /= np.linalg.norm(q, axis=1, keepdims=True)
    q[q[:, 0] < 0] *= -1.0
    return q.reshape(shape + (4,))


def _quat_mul_np(a, b):
    a0, av = a[..., 0], a[..., 1:]
    b0, bv = b[..., 0], b[..., 1:]
    out = np.empty(np.broadcast(a, b).shape)
    out[..., 0] = a0 * b0 - np.sum(av * bv, axis=-1)
    out[..., 1:] = a0[..., None] * bv + b0[..., None] * av - np.cross(av, bv)
    return out


def _halpern_quats_np(alpha, n, p3, m):
    """Half-angle quaternion of the Wigner rotation of a pure boost (alpha, n) on p."""
    alpha = np.asarray(alpha, dtype=float)
    pn = np.linalg.norm(p3, axis=-1)
    p0 = np.sqrt(pn * pn + m * m)
    safe_pn = np.where(pn > 0, pn, 1.0)
    phat = p3 / safe_pn[..., None]
    cross = np.cross(n, phat)
    cn = np.linalg.norm(cross, axis=-1)
    c = np.sum(n * phat, axis=-1)
    ch, sh = np.cosh(alpha), np.sinh(alpha)
    npdot = np.sum(n * p3, axis=-1)
    den = m + p0 * ch + sh * npdot
    cos_phi = (m * ch + p0 + sh * npdot + (ch - 1.0) * (p0 - m) * c * c) / den
    sin_coef = (pn * sh + (p0 - m) * (ch - 1.0) * c) / den
    sin_phi = np.abs(sin_coef) * cn
    phi = np.arctan2(sin_phi, cos_phi)
    degenerate = (pn == 0) | (alpha == 0) | (cn == 0) | (sin_phi == 0)
    axis = np.where(degenerate[..., None], 0.0, cross / np.where(cn > 0, cn, 1.0)[..., None])
    axis = axis * np.where(sin_coef < 0, -1.0, 1.0)[..., None]
    half = np.where(degenerate, 0.0, 0.5 * phi)
    q = np.empty(alpha.shape + (4,))
    q[..., 0] = np.cos(half)
    q[..., 1:] = np.sin(half)[..., None] * axis
    return q


def wigner_quats_numpy(L, p3, m):
    """Batch closed-form Wigner quaternion for ``L[N,4,4]``, ``p3[N,3]``, ``m[N]``."""
    L = np.asarray(L, dtype=float)
    p3 = np.asarray(p3, dtype=float)
    m = np.broadcast_to(np.asarray(m, dtype=float), L.shape[:1])
    row = L[:, 0, 1:]
    s = np.linalg.norm(row, axis=1)
    n = np.where(s[:, None] > 0, row / np.where(s > 0, s, 1.0)[:, None], 0.0)
    alpha = np.arcsinh(s)
    ch = np.sqrt(1.0 + s * s)
    # R = L . B^{-1}, B^{-1} = boost(alpha, -n); only the spatial block is needed
    binv_0j = -n * s[:, None]
    binv_ij = np.eye(3)[None] + (ch - 1.0)[:, None, None] * n[:, :, None] * n[:, None, :]
    R = L[:, 1:, 0][:, :, None] * binv_0j[:, None, :] + L[:, 1:, 1:] @ binv_ij
    q_rot = _quat_from_so3_np(R)
    q_boost = _halpern_quats_np(alpha, n, p3, m)
    return _quat_mul_np(q_rot, q_boost)


def central_difference_numpy(f, h, axis):
    f = np.asarray(f)
    out = np.empty_like(f)
    f = np.moveaxis(f, axis, 0)
    o = np.moveaxis(out, axis, 0)
    o[1:-1] = (f[2:] - f[:-2]) / (2.0 * h)
    o[0] = (-3.0 * f[0] + 4.0 * f[1] - f[2]) / (2.0 * h)
    o[-1] = (3.0 * f[-1] - 4.0 * f[-2] + f[-3]) / (2.0 * h)
    return out


# --------------------------------------------------------------------------
# numba implementations
# --------------------------------------------------------------------------


@njit(cache=True)
def _quat_from_so3_nb(R, q):
    tr = R[0, 0] + R[1, 1] + R[2, 2]
    best = tr
    branch = 0
    for k in range(3):
        if R[k, k] > best:
            best = R[k, k]
            branch = k + 1
    if branch == 0:
        w = 0.5 * np.sqrt(max(1.0 + tr, 0.0))
        q[0] = w
        q[1] = (R[1, 2] - R[2, 1]) / (4 * w)
        q[2] = (R[2, 0] - R[0, 2]) / (4 * w)
        q[3] = (R[0, 1] - R[1, 0]) / (4 * w)
    elif branch == 1:
        x = 0.5 * np.sqrt(max(1.0 + R[0, 0] - R[1, 1] - R[2, 2], 0.0))
        q[1] = x
        q[0] = (R[1, 2] - R[2, 1]) / (4 * x)
        q[2] = (R[0, 1] + R[1, 0]) / (4 * x)
        q[3] = (R[0, 2] + R[2, 0]) / (4 * x)
    elif branch == 2:
        y = 0.5 * np.sqrt(max(1.0 - R[0, 0] + R[1, 1] - R[2, 2], 0.0))
        q[2] = y
        q[0] = (R[2, 0] - R[0, 2]) / (4 * y)
        q[1] = (R[0, 1] + R[1, 0]) / (4 * y)
        q[3] = (R[1, 2] + R[2, 1]) / (4 * y)
    else:
        z = 0.5 * np.sqrt(max(1.0 - R[0, 0] - R[1, 1] + R[2, 2], 0.0))
        q[3] = z
        q[0] = (R[0, 1] - R[1, 0]) / (4 * z)
        q[1] = (R[0, 2] + R[2, 0]) / (4 * z)
        q[2] = (R[1, 2] + R[2, 1]) / (4 * z)
    nrm = np.sqrt(q[0] ** 2 + q[1] ** 2 + q[2] ** 2 + q[3] ** 2)
    sgn = -1.0 if q[0] < 0 else 1.0
    for k in range(4):
        q[k] = sgn * q[k] / nrm


@njit(cache=True)
def _wigner_quats_nb(L, p3, m):
    n_samples = L.shape[0]
    out = np.empty((n_samples, 4))
    R = np.empty((3, 3))
    qr = np.empty(4)
    nvec = np.empty(3)
    for k in range(n_samples):
        s = np.sqrt(L[k, 0, 1] ** 2 + L[k, 0, 2] ** 2 + L[k, 0, 3] ** 2)
        for i in range(3):
            nvec[i] = L[k, 0, i + 1] / s if s > 0 else 0.0
        ch = np.sqrt(1.0 + s * s)
        alpha = np.arcsinh(s)
        for i in range(3):
            for j in range(3):
                acc = L[k, i + 1, 0] * (-nvec[j] * s)
                for l in range(3):
                    binv = (1.0 if l == j else 0.0) + (ch - 1.0) * nvec[l] * nvec[j]
                    acc += L[k, i + 1, l + 1] * binv
                R[i, j] = acc
        _quat_from_so3_nb(R, qr)

        # Halpern angle, mass-momentum form
        mk = m[k]
        px, py, pz = p3[k, 0], p3[k, 1], p3[k, 2]
        pn = np.sqrt(px * px + py * py + pz * pz)
        qb0, qb1, qb2, qb3 = 1.0, 0.0, 0.0, 0.0
        if pn > 0 and alpha > 0:
            hx, hy, hz = px / pn, py / pn, pz / pn
            cx = nvec[1] * hz - nvec[2] * hy
            cy = nvec[2] * hx - nvec[0] * hz
            cz = nvec[0] * hy - nvec[1] * hx
            cn = np.sqrt(cx * cx + cy * cy + cz * cz)
            if cn > 0:
                p0 = np.sqrt(pn * pn + mk * mk)
                c = nvec[0] * hx + nvec[1] * hy + nvec[2] * hz
                sh = s
                npdot = c * pn
                den = mk + p0 * ch + sh * npdot
                cos_phi = (mk * ch + p0 + sh * npdot + (ch - 1.0) * (p0 - mk) * c * c) / den
                sin_coef = (pn * sh + (p0 - mk) * (ch - 1.0) * c) / den
                sin_phi = abs(sin_coef) * cn
                if sin_phi > 0:
                    phi = np.arctan2(sin_phi, cos_phi)
                    sg = -1.0 if sin_coef < 0 else 1.0
                    sh2 = np.sin(0.5 * phi) * sg / cn
                    qb0 = np.cos(0.5 * phi)
                    qb1, qb2, qb3 = sh2 * cx, sh2 * cy, sh2 * cz

        # SU(2) product q_rot * q_boost
        a0, a1, a2, a3 = qr[0], qr[1], qr[2], qr[3]
        out[k, 0] = a0 * qb0 - (a1 * qb1 + a2 * qb2 + a3 * qb3)
        out[k, 1] = a0 * qb1 + qb0 * a1 - (a2 * qb3 - a3 * qb2)
        out[k, 2] = a0 * qb2 + qb0 * a2 - (a3 * qb1 - a1 * qb3)
        out[k, 3] = a0 * qb3 + qb0 * a3 - (a1 * qb2 - a2 * qb1)
    return out


@njit(cache=True)
def _central_difference_nb(f, h):
    # f is (n0, rest); differentiate along axis 0
    n0, rest = f.shape
    out = np.empty_like(f)
    inv = 1.0 / (2.0 * h)
    for j in range(rest):
        out[0, j] = (-3.0 * f[0, j] + 4.0 * f[1, j] - f[2, j]) * inv
        out[n0 - 1, j] = (3.0 * f[n0 - 1, j] - 4.0 * f[n0 - 2, j] + f[n0 - 3, j]) * inv
    for i in range(1, n0 - 1):
        for j in range(rest):
            out[i, j] = (f[i + 1, j] - f[i - 1, j]) * inv
    return out


def wigner_quats_numba(L, p3, m):
    L = np.ascontiguousarray(L, dtype=np.float64)
    p3 = np.ascontiguousarray(p3, dtype=np.float64)
    m = np.ascontiguousarray(np.broadcast_to(np.asarray(m, dtype=np.float64), L.shape[:1]))
    return _wigner_quats_nb(L, p3, m)


def central_difference_numba(f, h, axis):
    f = np.asarray(f, dtype=np.complex128)
    moved = np.ascontiguousarray(np.moveaxis(f, axis, 0))
    out = _central_difference_nb(moved.reshape(moved.shape[0], -1), float(h))
    return np.moveaxis(out.reshape(moved.shape), 0, axis)


IMPLEMENTATIONS = {
    "numpy": {"wigner_quats": wigner_quats_numpy, "central_difference": central_difference_numpy},
}
if HAVE_NUMBA:
    IMPLEMENTATIONS["numba"] = {"wigner_quats": wigner_quats_numba, "central_difference": central_difference_numba}

wigner_quats = IMPLEMENTATIONS[BACKEND]["wigner_quats"]
central_difference = IMPLEMENTATIONS[BACKEND]["central_difference"]
quat_from_so3 = _quat_from_so3_np
quat_mul = _quat_mul_np
