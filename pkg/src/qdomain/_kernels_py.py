"""Pure numpy kernels. Reference implementation and fallback for ``_ckernels``.

Every kernel takes the ordinal-sum pieces of a t-norm as three parallel arrays
``lo``, ``hi`` (float64) and ``kind`` (int, 0 = Lukasiewicz, 1 = product), plus
``top``, the value representing 1.  Float mode uses ``top = 1.0``; the exact
grid mode passes integer numerators stored in float64 with ``top = n``.
"""

import numpy as np

LUKASIEWICZ = 0
PRODUCT = 1


def conj(x, y, lo, hi, kind, top):
    x, y = np.broadcast_arrays(np.asarray(x, dtype=np.float64), np.asarray(y, dtype=np.float64))
    out = np.minimum(x, y)
    for a, b, k in zip(lo, hi, kind):
        mask = (x > a) & (x < b) & (y > a) & (y < b)
        if not mask.any():
            continue
        xs, ys = x[mask], y[mask]
        if k == LUKASIEWICZ:
            out[mask] = np.maximum(a, xs + ys - b)
        else:
            out[mask] = a + (xs - a) * (ys - a) / (b - a)
    return out


def residuum(x, y, lo, hi, kind, top):
    x, y = np.broadcast_arrays(np.asarray(x, dtype=np.float64), np.asarray(y, dtype=np.float64))
    out = np.where(x <= y, float(top), y)
    for a, b, k in zip(lo, hi, kind):
        mask = (y >= a) & (y < x) & (x < b)
        if not mask.any():
            continue
        xs, ys = x[mask], y[mask]
        if k == LUKASIEWICZ:
            out[mask] = b - xs + ys
        else:
            out[mask] = a + (b - a) * (ys - a) / (xs - a)
    return out


def compose_max(A, B, lo, hi, kind, top):
    """``C[i, j] = max_k A[i, k] & B[k, j]``."""
    A = np.asarray(A, dtype=np.float64)
    B = np.asarray(B, dtype=np.float64)
    m, k = A.shape
    k2, p = B.shape
    if k != k2:
        raise ValueError(f"inner dimensions differ: {k} vs {k2}")
    C = np.empty((m, p))
    if k == 0:
        C.fill(0.0)
        return C
    step = max(1, 2_000_000 // max(1, k * p))
    for start in range(0, m, step):
        block = A[start:start + step, :, None]
        C[start:start + step] = conj(block, B[None, :, :], lo, hi, kind, top).max(axis=1)
    return C


def residuum_meet(A, B, lo, hi, kind, top):
    """``C[i, j] = min_k A[i, k] -> B[j, k]``; a matrix of fuzzy inclusions."""
    A = np.asarray(A, dtype=np.float64)
    B = np.asarray(B, dtype=np.float64)
    m, k = A.shape
    p, k2 = B.shape
    if k != k2:
        raise ValueError(f"row lengths differ: {k} vs {k2}")
    C = np.empty((m, p))
    if k == 0:
        C.fill(float(top))
        return C
    step = max(1, 2_000_000 // max(1, k * p))
    for start in range(0, m, step):
        block = A[start:start + step, None, :]
        C[start:start + step] = residuum(block, B[None, :, :], lo, hi, kind, top).min(axis=2)
    return C


def approach_violations(delta, lo, hi, kind, top):
    """Largest violations of the union and transitivity axioms of an approach table.

    ``delta`` has shape ``(n, 2**n)``, column index = subset bitmask.  Returns
    ``(a3, a3_witness, a4, a4_witness)`` where a witness is ``(x, A, B)`` or None.
    """
    delta = np.asarray(delta, dtype=np.float64)
    n, m = delta.shape
    masks = np.arange(m)
    union = masks[:, None] | masks[None, :]

    a3, a3_w = 0.0, None
    for x in range(n):
        row = delta[x]
        diff = np.abs(row[union] - np.maximum(row[:, None], row[None, :]))
        idx = int(np.argmax(diff))
        if diff.flat[idx] > a3:
            a3 = float(diff.flat[idx])
            a3_w = (x, idx // m, idx % m)

    # meet_b[A, B] = min over b in B of delta(b, A); empty B gives top
    meet_b = np.full((m, m), float(top))
    for B in range(1, m):
        low = B & -B
        b = low.bit_length() - 1
        meet_b[:, B] = np.minimum(meet_b[:, B ^ low], delta[b, :])

    a4, a4_w = 0.0, None
    for A in range(m):
        rhs = conj(meet_b[A][None, :], delta, lo, hi, kind, top)
        viol = rhs - delta[:, A][:, None]
        idx = int(np.argmax(viol))
        if viol.flat[idx] > a4:
            a4 = float(viol.flat[idx])
            a4_w = (idx // m, A, idx % m)
    return a3, a3_w, a4, a4_w
