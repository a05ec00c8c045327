"""
Jordan-kernel generalized eigenvectors of T and A in exact rational arithmetic.

At alpha = 1 the right vectors r_hat_k are integer and the left vectors l_hat_k rational;
the diagonal similarity [r_k]_j = [r_hat_k]_j alpha^(j-2k), [l_k]_j = [l_hat_k]_j alpha^(2k-j)
carries them to any alpha, and the lift to A appends the scalars b_k.
Components are 1-based in docstrings; storage is 0-based tuples.
"""
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from math import comb

import numpy as np

from model.errors import PhantomLabError, ParameterError
from model.params import ModelParams
from model.propagator import ArithmeticMode, build_propagator

logger = logging.getLogger("phantomlab.kernel")


def _check_n(n: int):
    if not isinstance(n, int) or n < 6 or n % 2:
        raise ParameterError(f"kernel construction needs an even n >= 6 (got {n})", n=n)


@dataclass(frozen=True)
class KernelBasis:
    """right[k-1] and left[k-1] hold r_k and l_k for k = 1..n/2-1."""
    n: int
    right: tuple[tuple, ...]
    left: tuple[tuple, ...]
    alpha: Fraction = Fraction(1)
    b: tuple[Fraction, ...] = field(default=())

    @property
    def dimension(self) -> int:
        return len(self.right)

    @property
    def lifted(self) -> bool:
        return bool(self.b)

    def r(self, k: int) -> np.ndarray:
        """r_k; the zero vector outside 1..n/2-1 (r_0 = 0)."""
        size = len(self.right[0])
        if not 1 <= k <= self.dimension:
            return np.array([Fraction(0)] * size, dtype=object)
        return np.array(self.right[k - 1], dtype=object)

    def l(self, k: int) -> np.ndarray:
        """l_k; the zero vector outside 1..n/2-1 (l_{n/2} = 0)."""
        size = len(self.left[0])
        if not 1 <= k <= self.dimension:
            return np.array([Fraction(0)] * size, dtype=object)
        return np.array(self.left[k - 1], dtype=object)


def _right_closed_form(n: int, k: int) -> tuple[int, ...]:
    vec = [0] * (n - 2)
    for p in range(2 * k):
        total = sum((-1) ** r * comb(k - r, p - 2 * r) for r in range(p // 2 + 1) if k - r >= 0)
        vec[2 * k - p - 1] = -((-1) ** (k + p)) * total
    return tuple(vec)


def _right_recursion(n: int) -> list[tuple[int, ...]]:
    m = n // 2 - 1
    first = [0] * (n - 2)
    first[0], first[1] = -1, 1
    vectors = [tuple(first)]
    for _ in range(2, m + 1):
        prev = vectors[-1]
        nxt = [0] * (n - 2)
        nxt[0] = -1
        for j in range(2, n - 2):
            nxt[j] = prev[j - 1] - prev[j - 2]
        vectors.append(tuple(nxt))
    return vectors


def kernel_right_vectors(n: int, method: str = "closed-form") -> list[tuple[int, ...]]:
    """r_hat_k for k = 1..n/2-1, integer entries, nonzero only in components 1..2k."""
    _check_n(n)
    if method == "closed-form":
        return [_right_closed_form(n, k) for k in range(1, n // 2)]
    if method == "recursion":
        return _right_recursion(n)
    raise ParameterError(f"unknown construction method '{method}'", method=method)


def _dot(x, y):
    return sum((a * b for a, b in zip(x, y)), Fraction(0))


def kernel_left_vectors(n: int) -> list[tuple[Fraction, ...]]:
    """l_hat_k for k = 1..n/2-1, built downward from l_hat_{n/2-1} = (-1)^(n/2) (0, ..., -2/n, 2/n).

    Each step fixes all but the last two components by l_hat_{k-1}[j] = l_hat_k[j+1] - l_hat_k[j+2];
    the last pair (a, b) satisfies a + b = l_hat_k[n-2] and <r_hat_{n/2-1}|l_hat_{k-1}> = 0.
    """
    _check_n(n)
    size, m = n - 2, n // 2 - 1
    rights = kernel_right_vectors(n)
    top = rights[-1]
    sign = (-1) ** (n // 2)
    seed = [Fraction(0)] * size
    seed[-2], seed[-1] = Fraction(-2 * sign, n), Fraction(2 * sign, n)
    lefts = [tuple(seed)]
    for k in range(m, 1, -1):
        cur = lefts[0]
        x = [cur[j + 1] - cur[j + 2] for j in range(size - 2)]
        s = cur[-1]
        pivot = top[-2] - top[-1]
        if pivot == 0:
            raise PhantomLabError("singular tail system in left kernel recursion", n=n, k=k)
        a = -(_dot(top[: size - 2], x) + top[-1] * s) / pivot
        lefts.insert(0, tuple(x + [a, s - a]))

    for i, r in enumerate(rights):
        for j, l in enumerate(lefts):
            if _dot(r, l) != (1 if i == j else 0):
                raise PhantomLabError("kernel basis is not biorthonormal", n=n, k=i + 1, j=j + 1)
    logger.debug(f"Left kernel vectors built for n={n} ({m} vectors, biorthonormal)")
    return lefts


def kernel_basis(n: int) -> KernelBasis:
    return KernelBasis(
        n=n,
        right=tuple(tuple(Fraction(x) for x in r) for r in kernel_right_vectors(n)),
        left=tuple(kernel_left_vectors(n)),
    )


def rescale_alpha(basis: KernelBasis, alpha: Fraction) -> KernelBasis:
    if not isinstance(alpha, Fraction):
        raise ParameterError("rescaling needs an exact rational alpha", alpha=alpha)
    right, left = [], []
    for k in range(1, basis.dimension + 1):
        # 1-based component j sits at index j-1
        right.append(tuple(x * alpha ** (j + 1 - 2 * k) for j, x in enumerate(basis.right[k - 1])))
        left.append(tuple(x * alpha ** (2 * k - j - 1) for j, x in enumerate(basis.left[k - 1])))
    return KernelBasis(n=basis.n, right=tuple(right), left=tuple(left), alpha=alpha)


def lift_to_A(basis: KernelBasis, params: ModelParams) -> KernelBasis:
    """r_k^A = (0, r_k, 0), l_k^A = (0, l_k, b_k) with b_k = b_{k+1} - alpha [l_k]_{n-2}, b_{n/2} = 0."""
    if basis.lifted:
        raise ParameterError("basis is already lifted")
    alpha = params.alpha
    zero = Fraction(0)
    b = [zero] * basis.dimension
    nxt = zero
    for k in range(basis.dimension, 0, -1):
        nxt = nxt - alpha * basis.left[k - 1][-1]
        b[k - 1] = nxt
    right = tuple((zero, *r, zero) for r in basis.right)
    left = tuple((zero, *l, b[k]) for k, l in enumerate(basis.left))
    return KernelBasis(n=basis.n, right=right, left=left, alpha=basis.alpha, b=tuple(b))


_LIFTED_CACHE: dict[tuple[int, int], KernelBasis] = {}


def lifted_basis(params: ModelParams) -> KernelBasis:
    """Kernel basis of A for (n, d), cached per process."""
    key = (params.n, params.d)
    if key not in _LIFTED_CACHE:
        _LIFTED_CACHE[key] = lift_to_A(rescale_alpha(kernel_basis(params.n), params.alpha), params)
    return _LIFTED_CACHE[key]


def kernel_matrix(params: ModelParams) -> np.ndarray:
    """A_ker = sum_k r_k^A (l_{k+1}^A)^T, exact n x n object array."""
    basis = lifted_basis(params)
    n = params.n
    A_ker = np.array([[Fraction(0)] * n for _ in range(n)], dtype=object)
    for k in range(1, basis.dimension):
        A_ker = A_ker + np.outer(basis.r(k), basis.l(k + 1))
    return A_ker


def nilpotency_degree(matrix: np.ndarray, limit: int | None = None) -> int:
    """Smallest s with matrix^s == 0 exactly; raises if none up to `limit` (default: size)."""
    limit = limit or matrix.shape[0]
    power = matrix.copy()
    for s in range(1, limit + 1):
        if all(x == 0 for x in power.flat):
            return s
        power = power.dot(matrix)
    raise PhantomLabError("matrix is not nilpotent within the tested degree", limit=limit)


def solve_exact(M: np.ndarray, rhs: np.ndarray) -> np.ndarray:
    """Gauss-Jordan solve of M x = rhs over Fractions."""
    size = M.shape[0]
    X = M.copy()
    y = rhs.copy()
    for i in range(size):
        for j in range(i, size):
            if X[j, i] != 0:
                if i != j:
                    X[[i, j]] = X[[j, i]]
                    y[[i, j]] = y[[j, i]]
                break
        else:
            raise PhantomLabError("matrix is not invertible", column=i)
        pivot = X[i, i]
        X[i, :] = X[i, :] / pivot
        y[i] = y[i] / pivot
        for j in range(size):
            if j != i and X[j, i] != 0:
                factor = X[j, i]
                X[j, :] = X[j, :] - factor * X[i, :]
                y[j] = y[j] - factor * y[i]
    return y


def steady_state_partner(params: ModelParams) -> np.ndarray:
    """R0' = (1, (1 - T)^-1 (a1 - a2), -1): the second lambda = 1 right vector, with
    <L0'|R0'> = 1 and <L0|R0'> = 0."""
    prop = build_propagator(params, ArithmeticMode.RATIONAL)
    size = params.n - 2
    identity = np.array([[Fraction(int(i == j)) for j in range(size)] for i in range(size)], dtype=object)
    x = solve_exact(identity - prop.T, prop.a1 - prop.a2)
    return np.array([Fraction(1), *x, Fraction(-1)], dtype=object)
