"""Mixed stabilizer states as signed generator tableaux.

A state on n qubits is ``rho = 2^(k-n) * prod_l (1 + g_l) / 2`` for k
independent, pairwise-commuting, signed Pauli generators.  The tableau is
bit-packed (one uint64 word per 64 qubits, X and Z planes separate) and all
row operations track signs exactly.

The only dynamical map here is the no-record dephasing channel
``rho -> (rho + m rho m) / 2`` for a Hermitian Pauli m: it deletes one pivot
generator that anticommutes with m after folding the pivot into every other
anticommuting row.  Everything else is linear algebra over GF(2):
canonicalization (reduced row echelon form), group membership with signs, and
the strong / weak symmetry predicates built on them.
"""

from __future__ import annotations

import json

import numpy as np

from . import bitops
from .pauli import PauliString


class ConstructionError(ValueError):
    """Raised when a generator list cannot define a stabilizer state."""


def _row_popcounts(words: np.ndarray) -> np.ndarray:
    return np.bitwise_count(words).sum(axis=1).astype(np.int64)


class StabilizerMixedState:
    """Tableau of k <= n commuting signed Pauli generators.

    Single-owner mutable: ``dephase`` edits rows in place.  Reads
    (observables, membership) never mutate.
    """

    def __init__(self, n: int, X: np.ndarray, Z: np.ndarray, phase: np.ndarray):
        self.n = int(n)
        self._X = X
        self._Z = Z
        self._phase = phase
        self._canon: "StabilizerMixedState | None" = None
        self._pivots: np.ndarray | None = None  # set on canonical instances

    # -- construction ------------------------------------------------------

    @classmethod
    def from_generators(
        cls, n: int, generators: list[PauliString], validate: bool = True
    ) -> "StabilizerMixedState":
        """Build a state, silently dropping GF(2)-dependent inputs.

        Raises ConstructionError for anticommuting pairs, non-Hermitian
        inputs, or sign-inconsistent dependencies (e.g. both +Z0 and -Z0,
        which would put -I in the group).
        """
        W = bitops.n_words(n)
        kept_rows: list[tuple[np.ndarray, np.ndarray, int]] = []
        # echelon copy used only for the independence test
        ech_x: list[np.ndarray] = []
        ech_z: list[np.ndarray] = []
        ech_phase: list[int] = []
        ech_pivot: list[int] = []

        for g in generators:
            if g.n != n:
                raise ConstructionError(f"generator {g} has n={g.n}, expected {n}")
            if not g.is_hermitian:
                raise ConstructionError(f"generator {g} is not Hermitian")
            ax, az, aph = g.x.copy(), g.z.copy(), g.phase
            for rx, rz, rph, piv in zip(ech_x, ech_z, ech_phase, ech_pivot):
                if _bit_at(ax, az, piv, n):
                    aph = _mul_phase(ax, az, aph, rx, rz, rph)
                    ax ^= rx
                    az ^= rz
            if ax.any() or az.any():
                kept_rows.append((g.x.copy(), g.z.copy(), g.phase))
                ech_x.append(ax)
                ech_z.append(az)
                ech_phase.append(aph)
                ech_pivot.append(_leading_bit(ax, az, n))
            elif aph != 0:
                raise ConstructionError(
                    f"generator {g} is sign-inconsistent with earlier generators"
                )
            # else: exact duplicate of the group so far; drop it

        k = len(kept_rows)
        X = np.zeros((k, W), dtype=np.uint64)
        Z = np.zeros((k, W), dtype=np.uint64)
        phase = np.zeros(k, dtype=np.uint8)
        for i, (gx, gz, gp) in enumerate(kept_rows):
            X[i], Z[i], phase[i] = gx, gz, gp
        state = cls(n, X, Z, phase)
        if validate:
            state._check_commuting()
        return state

    def _check_commuting(self) -> None:
        for i in range(self.k):
            anti = self._anticommute_vector(self._X[i], self._Z[i])
            anti[i] = 0
            bad = np.flatnonzero(anti)
            if len(bad):
                raise ConstructionError(
                    f"generators {i} and {int(bad[0])} anticommute"
                )

    def copy(self) -> "StabilizerMixedState":
        return StabilizerMixedState(
            self.n, self._X.copy(), self._Z.copy(), self._phase.copy()
        )

    # -- basic views -------------------------------------------------------

    @property
    def k(self) -> int:
        return self._X.shape[0]

    @property
    def purity_log2(self) -> int:
        """log2 Tr[rho^2] = k - n."""
        return self.k - self.n

    def generator(self, i: int) -> PauliString:
        return PauliString(
            self.n, self._X[i].copy(), self._Z[i].copy(), int(self._phase[i])
        )

    @property
    def generators(self) -> list[PauliString]:
        return [self.generator(i) for i in range(self.k)]

    def __repr__(self) -> str:
        return f"StabilizerMixedState(n={self.n}, k={self.k})"

    # -- channel -----------------------------------------------------------

    def _anticommute_vector(self, mx: np.ndarray, mz: np.ndarray) -> np.ndarray:
        """Bit i = 1 iff generator i anticommutes with the Pauli (mx, mz)."""
        cnt = np.bitwise_count(self._X & mz).sum(axis=1)
        cnt += np.bitwise_count(self._Z & mx).sum(axis=1)
        return (cnt & 1).astype(np.uint8)

    def dephase(self, m: PauliString) -> "StabilizerMixedState":
        """Apply the no-record dephasing channel of the Hermitian Pauli m.

        If no generator anticommutes with m the state is unchanged.
        Otherwise the first anticommuting generator (current row order) is
        the pivot: it is multiplied into every other anticommuting row and
        then deleted, so k drops by exactly one.
        """
        if m.n != self.n:
            raise ValueError(f"length mismatch: {m.n} != {self.n}")
        if not m.is_hermitian:
            raise ValueError(f"dephasing operator {m} must be Hermitian")
        anti = np.flatnonzero(self._anticommute_vector(m.x, m.z))
        if len(anti) == 0:
            return self
        pivot = int(anti[0])
        rows = anti[1:]
        if len(rows):
            self._mul_rows_by(rows, pivot)
        keep = np.arange(self.k) != pivot
        self._X = self._X[keep]
        self._Z = self._Z[keep]
        self._phase = self._phase[keep]
        self._canon = None
        return self

    def _mul_rows_by(self, rows: np.ndarray, pivot: int) -> None:
        px = self._X[pivot]
        pz = self._Z[pivot]
        par = (np.bitwise_count(self._Z[rows] & px).sum(axis=1) & 1).astype(np.int64)
        y1 = _row_popcounts(self._X[rows] & self._Z[rows])
        yp = int(np.bitwise_count(px & pz).sum())
        self._X[rows] ^= px
        self._Z[rows] ^= pz
        ynew = _row_popcounts(self._X[rows] & self._Z[rows])
        ph = self._phase[rows].astype(np.int64)
        ph = (ph + int(self._phase[pivot]) + 2 * par + y1 + yp - ynew) & 3
        self._phase[rows] = ph.astype(np.uint8)
        self._canon = None

    # -- canonical form ----------------------------------------------------

    def canonicalize(self) -> "StabilizerMixedState":
        """Reduced row echelon form over columns (x0..x_{n-1}, z0..z_{n-1}).

        Deterministic, idempotent, group-preserving (each row operation is a
        generator multiplication with exact sign tracking).
        """
        st = self.copy()
        n, k = st.n, st.k
        pivots = []
        rank = 0
        for col in range(2 * n):
            bits = _column_bits(st._X, st._Z, col, n)
            cand = np.flatnonzero(bits[rank:])
            if len(cand) == 0:
                continue
            src = rank + int(cand[0])
            if src != rank:
                _swap_rows(st._X, st._Z, st._phase, rank, src)
                bits = _column_bits(st._X, st._Z, col, n)
            others = np.flatnonzero(bits)
            others = others[others != rank]
            if len(others):
                st._mul_rows_by(others, rank)
            pivots.append(col)
            rank += 1
            if rank == k:
                break
        st._pivots = np.array(pivots, dtype=np.int64)
        st._canon = st
        return st

    def _canonical(self) -> "StabilizerMixedState":
        if self._canon is None:
            self._canon = self.canonicalize()
        return self._canon

    # -- membership and symmetry -------------------------------------------

    def member(self, p: PauliString) -> int | None:
        """Solve p over the generator rows.

        Returns the sign s with s*p in the group, or None when the
        symplectic part of p is outside the row span.
        """
        if p.n != self.n:
            raise ValueError(f"length mismatch: {p.n} != {self.n}")
        canon = self._canonical()
        ax, az, aph = p.x.copy(), p.z.copy(), p.phase
        for i in range(canon.k):
            piv = int(canon._pivots[i])
            if _bit_at(ax, az, piv, self.n):
                aph = _mul_phase(ax, az, aph, canon._X[i], canon._Z[i], int(canon._phase[i]))
                ax ^= canon._X[i]
                az ^= canon._Z[i]
        if ax.any() or az.any():
            return None
        # residual is i^aph * I = p * (product of used rows); aph is even
        # because both factors are Hermitian with equal symplectic part.
        return 1 if aph == 0 else -1

    def is_strong_symmetric(self, u: PauliString) -> bool:
        """U rho = +/- rho, i.e. u is in the signed group up to sign."""
        if not u.is_hermitian:
            raise ValueError(f"symmetry operator {u} must be Hermitian")
        return self.member(u) is not None

    def is_weak_symmetric(self, u: PauliString) -> bool:
        """U rho U^dag = rho.

        For a Pauli u the conjugate of a generator g is (-1)^<u,g> g; the
        sign-flipped copy of a group element is never in the signed group
        (that would require -I), so weak symmetry holds iff u commutes with
        every generator.
        """
        if not u.is_hermitian:
            raise ValueError(f"symmetry operator {u} must be Hermitian")
        anti = self._anticommute_vector(u.x, u.z)
        return not anti.any()

    def same_group(self, other: "StabilizerMixedState") -> bool:
        """Equality of the signed stabilizer groups (two-way membership)."""
        if self.n != other.n or self.k != other.k:
            return False
        return all(self.member(g) == 1 for g in other.generators) and all(
            other.member(g) == 1 for g in self.generators
        )

    # -- serialization -----------------------------------------------------

    def to_json_dict(self) -> dict:
        return {"n": self.n, "generators": [str(g) for g in self.generators]}

    @classmethod
    def from_json_dict(cls, d: dict) -> "StabilizerMixedState":
        gens = [PauliString.parse(s, d["n"]) for s in d["generators"]]
        return cls.from_generators(d["n"], gens)

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict())

    @classmethod
    def from_json(cls, s: str) -> "StabilizerMixedState":
        return cls.from_json_dict(json.loads(s))


# -- small helpers (module-private) ----------------------------------------


def _column_bits(X: np.ndarray, Z: np.ndarray, col: int, n: int) -> np.ndarray:
    plane, q = (X, col) if col < n else (Z, col - n)
    return ((plane[:, q >> 6] >> np.uint64(q & 63)) & np.uint64(1)).astype(np.uint8)


def _bit_at(ax: np.ndarray, az: np.ndarray, col: int, n: int) -> int:
    if col < n:
        return bitops.get_bit(ax, col)
    return bitops.get_bit(az, col - n)


def _leading_bit(ax: np.ndarray, az: np.ndarray, n: int) -> int:
    xs = bitops.indices(ax, n)
    if len(xs):
        return int(xs[0])
    zs = bitops.indices(az, n)
    return n + int(zs[0])


def _mul_phase(
    ax: np.ndarray, az: np.ndarray, aph: int, bx: np.ndarray, bz: np.ndarray, bph: int
) -> int:
    """Phase of the product (a * b) before the XOR of the bit planes."""
    par = bitops.popcount(az & bx) & 1
    y1 = bitops.popcount(ax & az)
    y2 = bitops.popcount(bx & bz)
    y12 = bitops.popcount((ax ^ bx) & (az ^ bz))
    return (aph + bph + 2 * par + y1 + y2 - y12) & 3


def _swap_rows(X: np.ndarray, Z: np.ndarray, phase: np.ndarray, i: int, j: int) -> None:
    X[[i, j]] = X[[j, i]]
    Z[[i, j]] = Z[[j, i]]
    phase[[i, j]] = phase[[j, i]]
