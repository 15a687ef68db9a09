import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import NaivePauli, random_packed
from sssbsim.pauli import PauliParseError, PauliString, mul, symplectic_product


def P(text, n):
    return PauliString.parse(text, n)


class TestSymplecticProduct:
    def test_single_qubit_anticommutation(self):
        assert symplectic_product(P("+X0", 1), P("+Z0", 1)) == 1

    def test_two_local_anticommutations_cancel(self):
        assert symplectic_product(P("+X0X1", 2), P("+Z0Z1", 2)) == 0

    def test_zz_link_against_product_state_generators(self):
        zz = P("+Z0Z1", 4)
        expected = [1, 1, 0, 0]
        got = [symplectic_product(zz, P(f"+X{i}", 4)) for i in range(4)]
        assert got == expected

    def test_length_mismatch(self):
        with pytest.raises(ValueError):
            symplectic_product(P("+X0", 1), P("+X0", 2))


class TestMul:
    def test_involution(self):
        p = mul(P("+X0", 2), P("+X0", 2))
        assert p == PauliString.identity(2)

    def test_xz_gives_minus_i_y(self):
        p = mul(P("+X0", 1), P("+Z0", 1))
        assert str(p) == "-iY0"
        # squared: XZ XZ = -I
        assert str(mul(p, p)) == "-"

    def test_generator_merging(self):
        p = mul(P("+X0X1", 3), P("+X1X2", 3))
        assert str(p) == "+X0X2"

    def test_length_mismatch(self):
        with pytest.raises(ValueError):
            mul(P("+X0", 1), P("+X0X1", 2))


class TestSupport:
    def test_identity_empty(self):
        assert PauliString.identity(5).support().tolist() == []

    def test_z3z7(self):
        assert P("+Z3Z7", 9).support().tolist() == [3, 7]

    def test_all_x(self):
        p = PauliString.from_ops(4, {i: "X" for i in range(4)})
        assert p.support().tolist() == [0, 1, 2, 3]


class TestParseFormat:
    def test_parse_zz(self):
        p = P("+Z0Z1", 4)
        assert p.support().tolist() == [0, 1]
        assert p.phase == 0

    def test_parse_negative(self):
        p = P("-X2", 3)
        assert p.phase == 2
        assert str(p) == "-X2"

    def test_round_trip(self):
        assert str(P("+Y1", 3)) == "+Y1"

    def test_identity_round_trip(self):
        assert str(PauliString.identity(4)) == "+"
        assert P("+", 4) == PauliString.identity(4)

    def test_malformed_reports_position(self):
        with pytest.raises(PauliParseError) as err:
            P("+Z0Q1", 4)
        assert err.value.pos == 3

    def test_site_out_of_range(self):
        with pytest.raises(PauliParseError):
            P("+Z9", 4)

    @pytest.mark.parametrize("text", ["+Z0Z1", "-X2", "+Y1", "-iY0", "+iX0Z1", "+"])
    def test_round_trip_many(self, text):
        assert str(P(text, 4)) == text


def test_matches_naive_reference_on_random_strings():
    # packed mul / symplectic vs the matrix-derived per-site reference
    rng = np.random.default_rng(2024)
    for case in range(10_000):
        n = int(rng.integers(1, 201)) if case % 10 == 0 else int(rng.integers(1, 24))
        a = random_packed(rng, n)
        b = random_packed(rng, n)
        na, nb = NaivePauli.from_packed(a), NaivePauli.from_packed(b)
        prod = a * b
        nprod = na.mul(nb)
        assert NaivePauli.from_packed(prod).letters == nprod.letters
        assert prod.phase == nprod.phase
        assert symplectic_product(a, b) == na.symplectic(nb)


@st.composite
def paulis(draw, n=8):
    x = draw(st.integers(0, 2**n - 1))
    z = draw(st.integers(0, 2**n - 1))
    phase = draw(st.integers(0, 3))
    xa = np.array([x], dtype=np.uint64)
    za = np.array([z], dtype=np.uint64)
    return PauliString(n, xa, za, phase)


@given(paulis(), paulis())
@settings(max_examples=300, deadline=None)
def test_symplectic_symmetric(p, q):
    assert symplectic_product(p, q) == symplectic_product(q, p)


@given(paulis(), paulis())
@settings(max_examples=300, deadline=None)
def test_commutation_phase_relation(p, q):
    pq, qp = p * q, q * p
    assert np.array_equal(pq.x, qp.x) and np.array_equal(pq.z, qp.z)
    expected = (pq.phase + 2 * symplectic_product(p, q)) & 3
    assert qp.phase == expected


@given(paulis())
@settings(max_examples=300, deadline=None)
def test_self_product_has_empty_bits(p):
    assert (p * p).is_identity_op


@given(paulis(), paulis(), paulis())
@settings(max_examples=300, deadline=None)
def test_mul_associative_including_phase(p, q, r):
    assert (p * q) * r == p * (q * r)
