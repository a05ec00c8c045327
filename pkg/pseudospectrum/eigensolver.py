"""
Eigenvalues of a dense real matrix at a configurable binary precision.

    balance -> Householder reduction to upper Hessenberg -> shifted QR with deflation

Every routine works on row lists of numbers owned by an explicit mpmath context,
so solves running side by side never share a working precision.
"""
import logging

import mpmath

from model.errors import ConvergenceError, ParameterError

logger = logging.getLogger("phantomlab.pseudospectrum")

RADIX = 2
BALANCE_CRITERION = 0.95
SWEEPS_PER_EIGENVALUE = 100


def make_context(bits: int) -> mpmath.MPContext:
    if bits < 53:
        raise ParameterError(f"precision must be at least 53 bits (got {bits})", bits=bits)
    ctx = mpmath.MPContext()
    ctx.prec = bits
    return ctx


def frobenius_norm(ctx, rows) -> mpmath.mpf:
    return ctx.sqrt(ctx.fsum(abs(x) ** 2 for row in rows for x in row))


def balance(ctx, A):
    """Diagonal similarity by powers of two until row and column norms agree (in place)."""
    n = len(A)
    sqrdx = RADIX * RADIX
    passes = 0
    done = False
    while not done:
        done = True
        passes += 1
        for i in range(n):
            c = ctx.fsum(abs(A[j][i]) for j in range(n) if j != i)
            r = ctx.fsum(abs(A[i][j]) for j in range(n) if j != i)
            if c == 0 or r == 0:
                continue
            s = c + r
            f = ctx.one
            g = r / RADIX
            while c < g:
                f *= RADIX
                c *= sqrdx
            g = r * RADIX
            while c > g:
                f /= RADIX
                c /= sqrdx
            if (c + r) / f < BALANCE_CRITERION * s:
                done = False
                g = 1 / f
                for j in range(n):
                    A[i][j] *= g
                for j in range(n):
                    A[j][i] *= f
    logger.debug(f"Balanced {n}x{n} matrix in {passes} passes")


def hessenberg_reduce(ctx, A):
    """Householder reduction of a real matrix to upper Hessenberg form, bottom row first (in place)."""
    n = len(A)
    if n <= 2:
        return
    tau = [ctx.zero] * n
    for i in range(n - 1, 1, -1):
        scale = ctx.fsum(abs(A[i][k]) for k in range(i))
        if scale == 0:
            A[i][i - 1] = ctx.zero
            continue
        inv = 1 / scale
        H = ctx.zero
        for k in range(i):
            A[i][k] *= inv
            H += A[i][k] ** 2

        F = A[i][i - 1]
        f = abs(F)
        G = ctx.sqrt(H)
        A[i][i - 1] = -G * scale
        if f == 0:
            tau[i] = G
        else:
            sign = F / f
            tau[i] = F + G * sign
            A[i][i - 1] *= sign

        H = 1 / ctx.sqrt(H + G * f)
        tau[i] *= H
        for k in range(i - 1):
            A[i][k] *= H

        # reflector v = (A[i][0..i-2], tau[i]) applied from the right, then from the left
        for j in range(i):
            G = tau[i] * A[j][i - 1] + ctx.fsum(A[i][k] * A[j][k] for k in range(i - 1))
            A[j][i - 1] -= G * tau[i]
            for k in range(i - 1):
                A[j][k] -= G * A[i][k]
        for j in range(n):
            G = tau[i] * A[i - 1][j] + ctx.fsum(A[i][k] * A[k][j] for k in range(i - 1))
            A[i - 1][j] -= G * tau[i]
            for k in range(i - 1):
                A[k][j] -= G * A[i][k]

    for x in range(n):
        for y in range(x + 2, n):
            A[y][x] = ctx.zero


def _rotation(ctx, c, s):
    v = ctx.hypot(abs(c), abs(s))
    if v == 0:
        return ctx.zero, ctx.one, ctx.zero
    return v, c / v, s / v


def qr_sweep(ctx, n0: int, n1: int, A, shift):
    """One implicitly shifted QR sweep by Givens rotations on the active block A[n0:n1, n0:n1]."""
    _, c, s = _rotation(ctx, A[n0][n0] - shift, A[n0 + 1][n0])
    for k in range(n0, n1):
        x, y = A[n0][k], A[n0 + 1][k]
        A[n0][k] = ctx.conj(c) * x + ctx.conj(s) * y
        A[n0 + 1][k] = -s * x + c * y
    for k in range(n0, min(n1, n0 + 3)):
        x, y = A[k][n0], A[k][n0 + 1]
        A[k][n0] = c * x + s * y
        A[k][n0 + 1] = -ctx.conj(s) * x + ctx.conj(c) * y

    # chase the bulge down the subdiagonal
    for j in range(n0, n1 - 2):
        v, c, s = _rotation(ctx, A[j + 1][j], A[j + 2][j])
        A[j + 1][j] = v
        A[j + 2][j] = ctx.zero
        for k in range(j + 1, n1):
            x, y = A[j + 1][k], A[j + 2][k]
            A[j + 1][k] = ctx.conj(c) * x + ctx.conj(s) * y
            A[j + 2][k] = -s * x + c * y
        for k in range(n0, min(n1, j + 4)):
            x, y = A[k][j + 1], A[k][j + 2]
            A[k][j + 1] = c * x + s * y
            A[k][j + 2] = -ctx.conj(s) * x + ctx.conj(c) * y


def _wilkinson_shift(ctx, A, n1: int):
    a11, a12 = A[n1 - 2][n1 - 2], A[n1 - 2][n1 - 1]
    a21, a22 = A[n1 - 1][n1 - 2], A[n1 - 1][n1 - 1]
    t = a11 + a22
    s = (a22 - a11) ** 2 + 4 * a21 * a12
    s = ctx.sqrt(s) if ctx.re(s) > 0 else ctx.sqrt(-s) * ctx.j
    plus, minus = (t + s) / 2, (t - s) / 2
    return minus if abs(a22 - plus) > abs(a22 - minus) else plus


def hessenberg_eigenvalues(ctx, A, max_sweeps: int | None = None) -> list:
    """Diagonal of the triangularized Hessenberg matrix A (overwritten, complex entries)."""
    n = len(A)
    for i in range(n):
        A[i] = [ctx.mpc(x) for x in A[i]]
    if n == 1:
        return [A[0][0]]
    norm = ctx.sqrt(ctx.fsum(abs(A[y][x]) ** 2 for x in range(n) for y in range(min(x + 2, n)))) / n
    if norm == 0:
        return [A[i][i] for i in range(n)]

    eps = ctx.eps / (100 * n)
    max_sweeps = max_sweeps or SWEEPS_PER_EIGENVALUE * n
    n0, n1 = 0, n
    its = total = 0
    while True:
        k = n0
        while k + 1 < n1:
            s = abs(A[k][k]) + abs(A[k + 1][k + 1])
            if s < eps * norm:
                s = norm
            if abs(A[k + 1][k]) < eps * s:
                break
            k += 1

        if k + 1 < n1:
            A[k + 1][k] = ctx.zero
            n0 = k + 1
            its = 0
            if n0 + 1 >= n1:
                n0, n1 = 0, k + 1
                if n1 < 2:
                    break
            continue

        if its % 30 == 10:
            shift = A[n1 - 1][n1 - 2]
        elif its % 30 == 20:
            shift = abs(A[n1 - 1][n1 - 2])
        elif its % 30 == 29:
            shift = norm
        else:
            shift = _wilkinson_shift(ctx, A, n1)
        its += 1
        total += 1
        qr_sweep(ctx, n0, n1, A, shift)
        if total > max_sweeps:
            raise ConvergenceError(
                f"shifted QR did not converge within {max_sweeps} sweeps",
                size=n, sweeps=total, block=(n0, n1),
                subdiagonal=ctx.nstr(abs(A[n1 - 1][n1 - 2]), 5),
            )

    logger.debug(f"QR converged: {n} eigenvalues in {total} sweeps at {ctx.prec} bits")
    return [A[i][i] for i in range(n)]


def eigenvalues(ctx, rows, max_sweeps: int | None = None) -> list:
    """All eigenvalues of the real square matrix `rows` (numbers of ctx), sorted by
    descending real part then ascending imaginary part."""
    A = [list(row) for row in rows]
    if any(len(row) != len(A) for row in A):
        raise ParameterError("eigenvalue solve needs a square matrix", shape=(len(A), [len(r) for r in A]))
    balance(ctx, A)
    hessenberg_reduce(ctx, A)
    values = hessenberg_eigenvalues(ctx, A, max_sweeps)
    return sorted(values, key=lambda z: (-ctx.re(z), ctx.im(z)))
