"""Shared test helpers: naive per-site Pauli reference and dense builders.

The naive reference derives its single-site multiplication table from
explicit 2x2 matrices at import time, so it is independent of the packed
implementation's phase bookkeeping.
"""

import numpy as np
import pytest

from sssbsim.pauli import PauliString
from sssbsim.stabilizer import StabilizerMixedState

I2 = np.eye(2, dtype=complex)
X2 = np.array([[0, 1], [1, 0]], dtype=complex)
Y2 = np.array([[0, -1j], [1j, 0]], dtype=complex)
Z2 = np.array([[1, 0], [0, -1]], dtype=complex)
MATS = {"I": I2, "X": X2, "Y": Y2, "Z": Z2}
LETTERS = "IXYZ"


def _build_mul_table():
    table = {}
    for a in LETTERS:
        for b in LETTERS:
            m = MATS[a] @ MATS[b]
            for c in LETTERS:
                for k in range(4):
                    if np.allclose(m, (1j**k) * MATS[c]):
                        table[a, b] = (c, k)
    return table


MUL_TABLE = _build_mul_table()


class NaivePauli:
    """Letter-list Pauli with an i-power, multiplied site by site."""

    def __init__(self, letters, phase=0):
        self.letters = list(letters)
        self.phase = phase % 4

    @classmethod
    def from_packed(cls, p: PauliString) -> "NaivePauli":
        letters = []
        for s in range(p.n):
            xb = (int(p.x[s >> 6]) >> (s & 63)) & 1
            zb = (int(p.z[s >> 6]) >> (s & 63)) & 1
            letters.append("IXZY"[xb + 2 * zb] if not (xb and zb) else "Y")
        return cls(letters, p.phase)

    def to_packed(self) -> PauliString:
        p = PauliString.identity(len(self.letters))
        for s, letter in enumerate(self.letters):
            if letter != "I":
                p = p * PauliString.single(len(self.letters), s, letter)
        return PauliString(p.n, p.x, p.z, p.phase + self.phase)

    def mul(self, other: "NaivePauli") -> "NaivePauli":
        letters = []
        phase = self.phase + other.phase
        for a, b in zip(self.letters, other.letters):
            c, k = MUL_TABLE[a, b]
            letters.append(c)
            phase += k
        return NaivePauli(letters, phase)

    def symplectic(self, other: "NaivePauli") -> int:
        count = 0
        for a, b in zip(self.letters, other.letters):
            if a != "I" and b != "I" and a != b:
                count += 1
        return count & 1


def random_packed(rng, n) -> PauliString:
    letters = rng.choice(list("IXYZ"), size=n)
    p = PauliString.identity(n)
    for s, letter in enumerate(letters):
        if letter != "I":
            p = p * PauliString.single(n, s, letter)
    if rng.random() < 0.5:
        p = p.negate()
    return p


def random_hermitian_local(rng, n, max_weight=2) -> PauliString:
    weight = int(rng.integers(1, max_weight + 1))
    sites = rng.choice(n, size=weight, replace=False)
    p = PauliString.identity(n)
    for s in sites:
        p = p * PauliString.single(n, int(s), str(rng.choice(list("XYZ"))))
    if not p.is_hermitian:  # single Y factors keep it Hermitian anyway
        p = PauliString(n, p.x, p.z, 0)
    return p


def random_mixed_state(rng, n, n_dephase=None) -> StabilizerMixedState:
    """Random product state followed by random local dephasings."""
    gens = []
    for s in range(n):
        g = PauliString.single(n, s, str(rng.choice(list("XYZ"))))
        if rng.random() < 0.5:
            g = g.negate()
        gens.append(g)
    state = StabilizerMixedState.from_generators(n, gens)
    if n_dephase is None:
        n_dephase = int(rng.integers(0, n + 1))
    for _ in range(n_dephase):
        state.dephase(random_hermitian_local(rng, n))
    return state


def kron_pauli(letters, coeff=1.0) -> np.ndarray:
    m = np.array([[coeff]], dtype=complex)
    for letter in letters:
        m = np.kron(m, MATS[letter])
    return m


def dense_from_packed(p: PauliString) -> np.ndarray:
    naive = NaivePauli.from_packed(p)
    return kron_pauli(naive.letters[::-1], (1j) ** naive.phase)


@pytest.fixture(scope="session")
def warm_kernel():
    """Compile the trajectory kernel once so timed tests measure steady state."""
    from sssbsim.models import build
    from sssbsim.trajectory import run_trajectory

    run_trajectory(build("square-zz", (4, 4)), 0.5, 0, 0)
    return True
