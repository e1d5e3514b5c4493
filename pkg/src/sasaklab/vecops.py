"""Small-vector helpers generic over jet scalars.

Ambient vectors are plain Python lists whose entries are floats or jet
scalars; numpy only enters at the float level (frames, rank decisions).
"""

import numpy as np

from .jets import jsqrt, value


def vadd(u, v):
    return [a + b for a, b in zip(u, v)]


def vsub(u, v):
    return [a - b for a, b in zip(u, v)]


def vscale(u, c):
    return [a * c for a in u]


def vaxpy(c, u, v):
    """c*u + v."""
    return [c * a + b for a, b in zip(u, v)]


def vdot(u, v):
    acc = u[0] * v[0]
    for a, b in zip(u[1:], v[1:]):
        acc = acc + a * b
    return acc


def vnorm(u):
    return jsqrt(vdot(u, u))


def vnormalize(u):
    return vscale(u, 1.0 / vnorm(u))


def vzero(m):
    return [0.0] * m


def cmult(v):
    """Multiplication by i on pairwise coordinates (x, y) -> (-y, x)."""
    out = []
    for j in range(0, len(v), 2):
        out.append(-v[j + 1])
        out.append(v[j])
    return out


def vvalue(u):
    """Strip jets: the float value part of each component."""
    return [value(a) for a in u]


def as_list(u):
    """Accept numpy arrays or sequences, return a plain list."""
    if isinstance(u, np.ndarray):
        return [float(a) for a in u]
    return list(u)


def as_array(u):
    return np.asarray(vvalue(u), dtype=float)


def solve_linear(A, b):
    """Gaussian elimination with partial pivoting, generic over scalars.

    Pivots are chosen by the float value part, so the elimination order
    is deterministic and identical across jet depths.
    """
    n = len(b)
    M = [row[:] for row in A]
    rhs = list(b)
    perm = list(range(n))
    for col in range(n):
        piv = max(range(col, n), key=lambda r: abs(value(M[r][col])))
        if abs(value(M[piv][col])) == 0.0:
            raise ZeroDivisionError("singular system in solve_linear")
        if piv != col:
            M[col], M[piv] = M[piv], M[col]
            rhs[col], rhs[piv] = rhs[piv], rhs[col]
            perm[col], perm[piv] = perm[piv], perm[col]
        for r in range(col + 1, n):
            f = M[r][col] / M[col][col]
            M[r] = [a - f * b_ for a, b_ in zip(M[r], M[col])]
            rhs[r] = rhs[r] - f * rhs[col]
    x = [0.0] * n
    for r in range(n - 1, -1, -1):
        acc = rhs[r]
        for c in range(r + 1, n):
            acc = acc - M[r][c] * x[c]
        x[r] = acc / M[r][r]
    return x
