"""
Statevector simulation of the staircase Haar circuit on n qudits.

Qudit 1 is the most significant tensor axis, so the cut after qudit k is a
d^k x d^(n-k) reshape of the amplitude vector.
"""
import logging
from dataclasses import dataclass

import numpy as np
from numpy.linalg import qr

from model.errors import ParameterError, PhantomLabError

logger = logging.getLogger("phantomlab.oracle")

NORM_TOL = 1e-10


@dataclass
class CircuitState:
    amplitudes: np.ndarray
    n: int
    d: int

    def __post_init__(self):
        if self.amplitudes.shape != (self.d**self.n,):
            raise ParameterError(
                f"state needs {self.d}^{self.n} amplitudes (got shape {self.amplitudes.shape})",
                n=self.n, d=self.d,
            )

    @classmethod
    def product(cls, n: int, d: int) -> "CircuitState":
        """|0...0>, the product initial state."""
        amplitudes = np.zeros(d**n, dtype=complex)
        amplitudes[0] = 1.0
        return cls(amplitudes=amplitudes, n=n, d=d)

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))


def sample_haar_gate(d: int, rng: np.random.Generator) -> np.ndarray:
    """Haar unitary on two qudits: QR of a complex Ginibre matrix, phases of diag(R) moved into Q."""
    dim = d * d
    Z = (rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))) / np.sqrt(2)
    Q, R = qr(Z)
    phases = np.diagonal(R) / np.abs(np.diagonal(R))
    return Q * phases


def apply_gate(state: CircuitState, gate: np.ndarray, bond: int) -> CircuitState:
    """Two-qudit gate on qudits (bond, bond+1), 1-based."""
    n, d = state.n, state.d
    if not 1 <= bond <= n - 1:
        raise ParameterError(f"bond must satisfy 1 <= bond <= n-1 (got {bond})", bond=bond, n=n)
    if gate.shape != (d * d, d * d):
        raise ParameterError(f"gate must be {d * d}x{d * d} (got {gate.shape})", shape=gate.shape, d=d)
    psi = state.amplitudes.reshape(d ** (bond - 1), d * d, d ** (n - bond - 1))
    psi = np.moveaxis(np.tensordot(gate, psi, axes=([1], [1])), 0, 1)
    return CircuitState(amplitudes=psi.reshape(-1), n=n, d=d)


def apply_staircase_layer(state: CircuitState, gates) -> CircuitState:
    """gates[b-1] acts on bond (b, b+1); bond (1,2) first, (n-1,n) last."""
    if len(gates) != state.n - 1:
        raise ParameterError(
            f"staircase layer needs n-1={state.n - 1} gates (got {len(gates)})", n=state.n, gates=len(gates)
        )
    for bond, gate in enumerate(gates, start=1):
        state = apply_gate(state, gate, bond)
    drift = abs(state.norm() - 1.0)
    if drift > NORM_TOL:
        raise PhantomLabError("state norm drifted during staircase layer", drift=drift, n=state.n, d=state.d)
    return state


def purity_of_cut(state: CircuitState, k: int) -> float:
    """tr rho_k^2 for the first k qudits, from the Gram matrix of the smaller side."""
    n, d = state.n, state.d
    if not 1 <= k <= n - 1:
        raise ParameterError(f"cut must satisfy 1 <= k <= n-1 (got {k})", k=k, n=n)
    M = state.amplitudes.reshape(d**k, d ** (n - k))
    gram = M @ M.conj().T if k <= n - k else M.conj().T @ M
    return float(np.sum(np.abs(gram) ** 2))


def purities(state: CircuitState) -> np.ndarray:
    return np.array([purity_of_cut(state, k) for k in range(1, state.n)])
