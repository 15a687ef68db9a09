"""Dense density-matrix ground truth for small systems.

Every operator applied here is a signed Pauli, i.e. a monomial matrix: it
permutes computational basis states and multiplies by phases.  Channels and
trace formulas therefore cost O(4^n) instead of O(8^n), which keeps the
cross-checks against the stabilizer engine fast up to the n = 10 cap.
"""

from __future__ import annotations

import numpy as np

from .. import bitops
from ..pauli import PauliString
from ..stabilizer import StabilizerMixedState

N_CAP = 10  # 2^10 x 2^10 complex128 = 16 MB; keeps the oracle suite quick


def _check_n(n: int) -> None:
    if n > N_CAP:
        raise ValueError(f"dense oracle capped at n <= {N_CAP}, got {n}")


def pauli_action(p: PauliString) -> tuple[np.ndarray, np.ndarray]:
    """(perm, coef) with p |b> = coef[b] |perm[b]>.

    perm[b] = b XOR x-mask; coef[b] = i^(phase + #Y) * (-1)^<z, b>.
    """
    n = p.n
    _check_n(n)
    dim = 1 << n
    xmask = 0
    zmask = 0
    for s in bitops.indices(p.x, n):
        xmask |= 1 << int(s)
    for s in bitops.indices(p.z, n):
        zmask |= 1 << int(s)
    b = np.arange(dim, dtype=np.int64)
    perm = b ^ xmask
    zpar = np.bitwise_count(b & zmask) & 1
    y = bitops.popcount(p.x & p.z)
    coef = (1j) ** ((p.phase + y) % 4) * np.where(zpar, -1.0, 1.0)
    return perm, coef.astype(np.complex128)


def pauli_matrix(p: PauliString) -> np.ndarray:
    perm, coef = pauli_action(p)
    dim = len(perm)
    m = np.zeros((dim, dim), dtype=np.complex128)
    m[perm, np.arange(dim)] = coef
    return m


def conjugate_by_pauli(rho: np.ndarray, p: PauliString) -> np.ndarray:
    """p rho p^dag without building the matrix of p."""
    perm, coef = pauli_action(p)
    cp = coef[perm]  # value picked up along the permuted index
    return (cp[:, None] * cp[None, :].conj()) * rho[np.ix_(perm, perm)]


def dense_apply_channel(rho: np.ndarray, m: PauliString, p: float) -> np.ndarray:
    """rho -> (1-p) rho + p m rho m for the Hermitian Pauli m.

    p = 1/2 is the projective no-record dephasing channel.
    """
    if not 0.0 <= p <= 0.5:
        raise ValueError(f"dephasing parameter must be in [0, 1/2], got {p}")
    if not m.is_hermitian:
        raise ValueError(f"channel operator {m} must be Hermitian")
    if rho.shape[0] != 1 << m.n:
        raise ValueError("dimension mismatch between rho and m")
    return (1.0 - p) * rho + p * conjugate_by_pauli(rho, m)


class DenseState:
    """Dense rho with the exact trace formulas used for cross-validation."""

    def __init__(self, n: int, rho: np.ndarray):
        _check_n(n)
        self.n = n
        self.rho = rho

    @classmethod
    def from_stabilizer(cls, state: StabilizerMixedState) -> "DenseState":
        _check_n(state.n)
        dim = 1 << state.n
        rho = np.eye(dim, dtype=np.complex128)
        for g in state.generators:
            perm, coef = pauli_action(g)
            rho = (rho + coef[perm][:, None] * rho[perm, :]) / 2.0
        return cls(state.n, rho / (1 << (state.n - state.k)))

    def apply_channel(self, m: PauliString, p: float) -> "DenseState":
        self.rho = dense_apply_channel(self.rho, m, p)
        return self

    def dephase(self, m: PauliString) -> "DenseState":
        return self.apply_channel(m, 0.5)

    def purity(self) -> float:
        return float(np.vdot(self.rho, self.rho).real)

    def expectation(self, p: PauliString) -> complex:
        """Tr[rho p]."""
        perm, coef = pauli_action(p)
        idx = np.arange(len(perm))
        return complex((self.rho[idx, perm] * coef).sum())

    def type1(self, op_i: PauliString, op_j: PauliString) -> float:
        return self.expectation(op_i * op_j).real

    def renyi2(self, op_i: PauliString, op_j: PauliString) -> float:
        """Tr[q rho q rho] / Tr[rho^2] with q = O_i O_j."""
        q = op_i * op_j
        qrq = conjugate_by_pauli(self.rho, q)
        num = float(np.trace(qrq @ self.rho).real)
        return num / self.purity()

    def check_valid(self, atol: float = 1e-12) -> None:
        rho = self.rho
        if not np.allclose(rho, rho.conj().T, atol=atol):
            raise AssertionError("rho is not Hermitian")
        if abs(np.trace(rho).real - 1.0) > atol:
            raise AssertionError("Tr rho != 1")
        evals = np.linalg.eigvalsh(rho)
        if evals.min() < -1e-9:
            raise AssertionError(f"rho not PSD: min eigenvalue {evals.min()}")
