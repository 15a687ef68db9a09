"""Signed n-qubit Pauli strings in a bit-packed symplectic representation.

A Pauli string is stored as two packed GF(2) vectors ``x`` and ``z`` plus a
global phase exponent: the operator value is ``i**phase * prod_s P_s`` with
``P_s in {I, X, Y, Z}`` determined by the (x, z) bits at site ``s``.  The
letter convention is the usual one, Y = i X Z, so Hermitian strings carry
``phase in {0, 2}`` (signs +1 / -1).

Multiplication accumulates the phase exactly (mod 4), which keeps Type-I
correlators signed and lets the tableau layer track generator signs through
every row operation.
"""

from __future__ import annotations

import re

import numpy as np

from . import bitops

_SIGN_TEXT = {0: "+", 1: "+i", 2: "-", 3: "-i"}
_TOKEN = re.compile(r"([IXYZ])(\d+)")


class PauliParseError(ValueError):
    """Malformed Pauli text; carries the offending position."""

    def __init__(self, text: str, pos: int, message: str):
        super().__init__(f"{message} at position {pos} in {text!r}")
        self.pos = pos


class PauliString:
    """Immutable signed Pauli operator on ``n`` qubits."""

    __slots__ = ("n", "x", "z", "phase")

    def __init__(self, n: int, x: np.ndarray, z: np.ndarray, phase: int = 0):
        self.n = int(n)
        self.x = x
        self.z = z
        self.phase = int(phase) & 3
        # padding bits above n must stay zero for popcount-based arithmetic
        rem = n & 63
        if rem and len(x):
            mask = (np.uint64(1) << np.uint64(rem)) - np.uint64(1)
            x[-1] &= mask
            z[-1] &= mask

    # -- constructors ------------------------------------------------------

    @classmethod
    def identity(cls, n: int) -> "PauliString":
        return cls(n, bitops.zeros(n), bitops.zeros(n), 0)

    @classmethod
    def from_ops(cls, n: int, ops: dict[int, str], sign: int = 1) -> "PauliString":
        """Build from a site -> letter map, e.g. {0: 'Z', 1: 'Z'}.

        Repeated sites multiply (XOR), so geometric builders may list a site
        twice and get the identity there.
        """
        p = cls.identity(n)
        for site, letter in ops.items():
            p = p * cls.single(n, site, letter)
        if sign == -1:
            p = p.negate()
        elif sign != 1:
            raise ValueError("sign must be +1 or -1")
        return p

    @classmethod
    def single(cls, n: int, site: int, letter: str) -> "PauliString":
        if not 0 <= site < n:
            raise ValueError(f"site {site} outside [0, {n})")
        x = bitops.zeros(n)
        z = bitops.zeros(n)
        if letter in ("X", "Y"):
            bitops.set_bit(x, site)
        if letter in ("Z", "Y"):
            bitops.set_bit(z, site)
        if letter not in ("I", "X", "Y", "Z"):
            raise ValueError(f"unknown Pauli letter {letter!r}")
        return cls(n, x, z, 0)

    # -- text format -------------------------------------------------------

    @classmethod
    def parse(cls, text: str, n: int) -> "PauliString":
        """Parse ``[+-]?i?([IXYZ]<site>)*`` into a PauliString on n qubits."""
        s = text.strip()
        pos = 0
        phase = 0
        if s[pos : pos + 2] in ("+i", "-i"):
            phase = 1 if s[pos] == "+" else 3
            pos += 2
        elif s[pos : pos + 1] == "i":
            phase = 1
            pos += 1
        elif s[pos : pos + 1] in ("+", "-"):
            phase = 0 if s[pos] == "+" else 2
            pos += 1
        p = cls.identity(n)
        while pos < len(s):
            m = _TOKEN.match(s, pos)
            if m is None:
                raise PauliParseError(text, pos, "expected [IXYZ]<site>")
            letter, site_s = m.groups()
            site = int(site_s)
            if site >= n:
                raise PauliParseError(text, pos, f"site {site} >= n={n}")
            p = p * cls.single(n, site, letter)
            pos = m.end()
        if phase:
            q = cls(p.n, p.x.copy(), p.z.copy(), p.phase + phase)
            return q
        return p

    def __str__(self) -> str:
        parts = [_SIGN_TEXT[self.phase]]
        xb = bitops.to_bool(self.x, self.n)
        zb = bitops.to_bool(self.z, self.n)
        for site in np.flatnonzero(xb | zb):
            if xb[site] and zb[site]:
                parts.append(f"Y{site}")
            elif xb[site]:
                parts.append(f"X{site}")
            else:
                parts.append(f"Z{site}")
        return "".join(parts)

    def __repr__(self) -> str:
        return f"PauliString({self!s}, n={self.n})"

    # -- algebra -----------------------------------------------------------

    def __mul__(self, other: "PauliString") -> "PauliString":
        if self.n != other.n:
            raise ValueError(f"length mismatch: {self.n} != {other.n}")
        x = self.x ^ other.x
        z = self.z ^ other.z
        # i-power of the product in the Y = iXZ convention:
        #   c = c1 + c2 + 2<z1, x2> + y1 + y2 - y12   (mod 4)
        par = bitops.popcount(self.z & other.x) & 1
        y1 = bitops.popcount(self.x & self.z)
        y2 = bitops.popcount(other.x & other.z)
        y12 = bitops.popcount(x & z)
        phase = (self.phase + other.phase + 2 * par + y1 + y2 - y12) & 3
        return PauliString(self.n, x, z, phase)

    def negate(self) -> "PauliString":
        return PauliString(self.n, self.x.copy(), self.z.copy(), self.phase + 2)

    def commutes_with(self, other: "PauliString") -> bool:
        return symplectic_product(self, other) == 0

    @property
    def is_hermitian(self) -> bool:
        return self.phase in (0, 2)

    @property
    def sign(self) -> int:
        """+1 or -1 for Hermitian strings."""
        if not self.is_hermitian:
            raise ValueError(f"{self} has an imaginary phase")
        return 1 if self.phase == 0 else -1

    @property
    def is_identity_op(self) -> bool:
        """True when the x/z parts vanish (any phase)."""
        return not (self.x.any() or self.z.any())

    def support(self) -> np.ndarray:
        """Sorted array of sites with a non-identity local factor."""
        return bitops.indices(self.x | self.z, self.n)

    def weight(self) -> int:
        return bitops.popcount(self.x | self.z)

    # -- comparisons -------------------------------------------------------

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, PauliString):
            return NotImplemented
        return (
            self.n == other.n
            and self.phase == other.phase
            and np.array_equal(self.x, other.x)
            and np.array_equal(self.z, other.z)
        )

    def __hash__(self) -> int:
        return hash((self.n, self.phase, self.x.tobytes(), self.z.tobytes()))


def symplectic_product(p: PauliString, q: PauliString) -> int:
    """0 when [p, q] = 0, 1 when {p, q} = 0.

    Parity of the number of sites where the local factors anticommute:
    <p.x, q.z> + <p.z, q.x> over GF(2).
    """
    if p.n != q.n:
        raise ValueError(f"length mismatch: {p.n} != {q.n}")
    return (bitops.popcount(p.x & q.z) + bitops.popcount(p.z & q.x)) & 1


def mul(p: PauliString, q: PauliString) -> PauliString:
    return p * q


def parse(text: str, n: int) -> PauliString:
    return PauliString.parse(text, n)


def format_pauli(p: PauliString) -> str:
    return str(p)
