import numpy as np
import pytest

from conftest import dense_from_packed, random_hermitian_local, random_mixed_state
from sssbsim.oracles.dense import DenseState, dense_apply_channel
from sssbsim.pauli import PauliString
from sssbsim.stabilizer import ConstructionError, StabilizerMixedState


def P(text, n):
    return PauliString.parse(text, n)


def state_of(n, *texts):
    return StabilizerMixedState.from_generators(n, [P(t, n) for t in texts])


class TestFromGenerators:
    def test_plus_plus(self):
        st = state_of(2, "+X0", "+X1")
        assert st.k == 2

    def test_glassy_ghz(self):
        st = state_of(8, "+X0X1X2X3X4X5X6X7")
        assert st.k == 1 and st.purity_log2 == -7

    def test_duplicate_dropped(self):
        st = state_of(3, "+X0", "+X0")
        assert st.k == 1

    def test_dependent_product_dropped(self):
        st = state_of(3, "+X0X1", "+X1X2", "+X0X2")
        assert st.k == 2

    def test_anticommuting_pair_rejected(self):
        with pytest.raises(ConstructionError):
            state_of(2, "+X0", "+Z0")

    def test_sign_inconsistency_rejected(self):
        with pytest.raises(ConstructionError):
            state_of(2, "+Z0", "-Z0")

    def test_non_hermitian_rejected(self):
        with pytest.raises(ConstructionError):
            state_of(2, "+iX0")

    def test_empty_is_maximally_mixed(self):
        st = StabilizerMixedState.from_generators(3, [])
        assert st.k == 0 and st.purity_log2 == -3


class TestCanonicalize:
    def test_elimination(self):
        st = state_of(2, "+X0X1", "+X1").canonicalize()
        assert [str(g) for g in st.generators] == ["+X0", "+X1"]

    def test_cluster_generators_same_group(self):
        n = 6
        gens = [f"+Z{i}X{(i+1)%n}Z{(i+2)%n}" for i in range(n)]
        st = state_of(n, *gens)
        canon = st.canonicalize()
        assert st.same_group(canon)

    def test_idempotent_on_random_states(self):
        rng = np.random.default_rng(11)
        for _ in range(1000):
            st = random_mixed_state(rng, int(rng.integers(2, 10)))
            c1 = st.canonicalize()
            c2 = c1.canonicalize()
            assert [str(g) for g in c1.generators] == [str(g) for g in c2.generators]


class TestDephase:
    def test_merges_first_pair(self):
        st = state_of(4, "+X0", "+X1", "+X2", "+X3")
        st.dephase(P("+Z0Z1", 4))
        assert [str(g) for g in st.generators] == ["+X0X1", "+X2", "+X3"]

    def test_commuting_noop(self):
        st = state_of(2, "+X0", "+X1")
        st.dephase(P("+X0", 2))
        assert st.k == 2

    def test_non_hermitian_rejected(self):
        st = state_of(2, "+X0", "+X1")
        with pytest.raises(ValueError):
            st.dephase(P("+iZ0", 2))

    def test_matches_dense_channel_on_random_states(self):
        rng = np.random.default_rng(4)
        for _ in range(60):
            st = random_mixed_state(rng, 6, n_dephase=int(rng.integers(0, 4)))
            m = random_hermitian_local(rng, 6)
            rho = DenseState.from_stabilizer(st).rho
            expected = dense_apply_channel(rho, m, 0.5)
            st.dephase(m)
            got = DenseState.from_stabilizer(st).rho
            assert np.allclose(got, expected, atol=1e-12)

    def test_idempotent(self):
        rng = np.random.default_rng(5)
        for _ in range(40):
            st = random_mixed_state(rng, 6)
            m = random_hermitian_local(rng, 6)
            st.dephase(m)
            once = st.copy()
            st.dephase(m)
            assert st.same_group(once)

    def test_rank_rule(self):
        rng = np.random.default_rng(6)
        for _ in range(40):
            st = random_mixed_state(rng, 6)
            m = random_hermitian_local(rng, 6)
            anti = bool(st._anticommute_vector(m.x, m.z).any())
            k0 = st.k
            st.dephase(m)
            assert st.k == k0 - 1 if anti else st.k == k0

    def test_any_pivot_gives_same_group(self):
        # alternative rule: fold the *last* anticommuting row instead
        rng = np.random.default_rng(7)
        for _ in range(40):
            st = random_mixed_state(rng, 6)
            alt = st.copy()
            m = random_hermitian_local(rng, 6)
            st.dephase(m)
            idx = np.flatnonzero(alt._anticommute_vector(m.x, m.z))
            if len(idx):
                pivot = int(idx[-1])
                others = idx[:-1]
                if len(others):
                    alt._mul_rows_by(others, pivot)
                keep = np.arange(alt.k) != pivot
                alt._X, alt._Z = alt._X[keep], alt._Z[keep]
                alt._phase = alt._phase[keep]
                alt._canon = None
            assert st.same_group(alt)


class TestMember:
    def test_ghz_parity(self):
        st = state_of(4, "+X0X1X2X3")
        assert st.member(P("+X0X1X2X3", 4)) == 1

    def test_ghz_zz_not_member(self):
        st = state_of(4, "+X0X1X2X3")
        assert st.member(P("+Z0Z1", 4)) is None

    def test_product_of_rows(self):
        st = state_of(3, "+X0X1", "+X1X2")
        assert st.member(P("+X0X2", 3)) == 1

    def test_sign_tracking(self):
        st = state_of(1, "-Z0")
        assert st.member(P("+Z0", 1)) == -1
        assert st.member(P("-Z0", 1)) == 1

    def test_bell_state_yy(self):
        st = state_of(2, "+X0X1", "+Z0Z1")
        assert st.member(P("+Y0Y1", 2)) == -1

    def test_member_sign_matches_dense_expectation(self):
        rng = np.random.default_rng(8)
        for _ in range(40):
            st = random_mixed_state(rng, 5)
            dense = DenseState.from_stabilizer(st)
            p = random_hermitian_local(rng, 5)
            s = st.member(p)
            tr = float(np.trace(dense.rho @ dense_from_packed(p)).real)
            assert abs(tr - (s or 0)) < 1e-12


class TestSymmetry:
    def test_ghz_strong(self):
        st = state_of(8, "+X0X1X2X3X4X5X6X7")
        assert st.is_strong_symmetric(P("+X0X1X2X3X4X5X6X7", 8))

    def test_maximally_mixed_not_strong(self):
        st = StabilizerMixedState.from_generators(4, [])
        assert not st.is_strong_symmetric(
            PauliString.from_ops(4, {i: "X" for i in range(4)})
        )

    def test_maximally_mixed_weak_for_anything(self):
        st = StabilizerMixedState.from_generators(3, [])
        assert st.is_weak_symmetric(P("+X0Y1Z2", 3))

    def test_z_projector_not_weak_under_x(self):
        st = state_of(1, "+Z0")
        assert not st.is_weak_symmetric(P("+X0", 1))

    def test_strong_implies_weak_on_random_states(self):
        rng = np.random.default_rng(9)
        for _ in range(60):
            st = random_mixed_state(rng, 6)
            u = random_hermitian_local(rng, 6)
            if st.is_strong_symmetric(u):
                assert st.is_weak_symmetric(u)
            # any group element is strongly symmetric, hence weakly too
            if st.k:
                pick = np.flatnonzero(rng.integers(0, 2, st.k))
                g = PauliString.identity(6)
                for i in pick:
                    g = g * st.generator(int(i))
                assert st.is_strong_symmetric(g)
                assert st.is_weak_symmetric(g)


class TestSerialization:
    def test_round_trip(self):
        rng = np.random.default_rng(10)
        for _ in range(20):
            st = random_mixed_state(rng, 7)
            back = StabilizerMixedState.from_json(st.to_json())
            assert back.n == st.n and back.k == st.k
            assert [str(g) for g in back.generators] == [str(g) for g in st.generators]

    def test_snapshot_schema(self):
        st = state_of(2, "+X0", "-X1")
        d = st.to_json_dict()
        assert d == {"n": 2, "generators": ["+X0", "-X1"]}
