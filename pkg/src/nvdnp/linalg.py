"""Dense matrix exponential by scaling and squaring with Pade approximants.

Follows Higham's 2005 scheme: pick the lowest Pade degree in {3, 5, 7, 9, 13}
whose 1-norm threshold covers the input, otherwise scale by 2**-s and use
degree 13, then square s times.

Every squaring doubles the rounding error already present, so in double
precision the result carries an error of roughly ``eps * ||A||``. For long
propagations of a Liouvillian with GHz-scale coherences that is ~1e-10,
enough to break trace preservation at the 1e-10 level. ``extended=True``
evaluates the Pade approximant and the squarings in ``np.longdouble``
(80-bit on x86; identical to double on platforms without it), with the
Pade linear system solved in double and refined iteratively.
"""

import numpy as np

_THETA = {
    3: 1.495585217958292e-2,
    5: 2.539398330063230e-1,
    7: 9.504178996162932e-1,
    9: 2.097847961257068e0,
    13: 5.371920351148152e0,
}

_PADE = {
    3: (120.0, 60.0, 12.0, 1.0),
    5: (30240.0, 15120.0, 3360.0, 420.0, 30.0, 1.0),
    7: (17297280.0, 8648640.0, 1995840.0, 277200.0, 25200.0, 1512.0, 56.0, 1.0),
    9: (
        17643225600.0, 8821612800.0, 2075673600.0, 302702400.0, 30270240.0,
        2162160.0, 110880.0, 3960.0, 90.0, 1.0,
    ),
    13: (
        64764752532480000.0, 32382376266240000.0, 7771770303897600.0,
        1187353796428800.0, 129060195264000.0, 10559470521600.0,
        670442572800.0, 33522128640.0, 1323241920.0, 40840800.0, 960960.0,
        16380.0, 182.0, 1.0,
    ),
}


def _pade_uv(a, m):
    b = _PADE[m]
    ident = np.eye(a.shape[0], dtype=a.dtype)
    a2 = a @ a
    if m == 13:
        a4 = a2 @ a2
        a6 = a4 @ a2
        u = a @ (a6 @ (b[13] * a6 + b[11] * a4 + b[9] * a2)
                 + b[7] * a6 + b[5] * a4 + b[3] * a2 + b[1] * ident)
        v = (a6 @ (b[12] * a6 + b[10] * a4 + b[8] * a2)
             + b[6] * a6 + b[4] * a4 + b[2] * a2 + b[0] * ident)
        return u, v
    powers = [ident, a2]
    for _ in range(2, m // 2 + 1):
        powers.append(powers[-1] @ a2)
    u = a @ sum(b[2 * k + 1] * powers[k] for k in range(m // 2 + 1))
    v = sum(b[2 * k] * powers[k] for k in range(m // 2 + 1))
    return u, v


def _solve_refined(den, num, steps=3):
    """Solve ``den @ x = num`` to the working precision of ``den``'s dtype."""
    lo = np.complex128 if np.iscomplexobj(den) else np.float64
    den_lo = den.astype(lo)
    x = np.linalg.solve(den_lo, num.astype(lo)).astype(den.dtype)
    for _ in range(steps):
        resid = num - den @ x
        x = x + np.linalg.solve(den_lo, resid.astype(lo)).astype(den.dtype)
    return x


def expm(a, extended=False):
    """Matrix exponential of a square array.

    With ``extended=True`` the computation runs in long double and the result
    is rounded back to the input precision once at the end.
    """
    a = np.asarray(a)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError("expm needs a square matrix")
    if not np.issubdtype(a.dtype, np.complexfloating):
        a = a.astype(float)
    norm = np.linalg.norm(a, 1)
    if not np.isfinite(norm):
        raise ValueError("expm input has non-finite entries")
    out_dtype = a.dtype
    if extended:
        a = a.astype(np.clongdouble if np.iscomplexobj(a) else np.longdouble)
        solve = _solve_refined
    else:
        solve = np.linalg.solve
    for m in (3, 5, 7, 9):
        if norm <= _THETA[m]:
            u, v = _pade_uv(a, m)
            return solve(v - u, v + u).astype(out_dtype)
    s = max(0, int(np.ceil(np.log2(norm / _THETA[13]))))
    u, v = _pade_uv(a / 2.0**s, 13)
    r = solve(v - u, v + u)
    for _ in range(s):
        r = r @ r
    return r.astype(out_dtype)
