import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cyqt.errors import CapacityError, DimensionMismatchError, QubitIndexError
from cyqt.statevec import (
    CNOT,
    GateOp,
    H,
    LabelMap,
    StateVector,
    apply_gate,
    basis_state,
    fidelity,
    init_zero,
    permute,
    reduced_density,
    schmidt_rank,
    tensor,
)

S = 1 / np.sqrt(2)


def states(n):
    return st.lists(
        st.tuples(st.floats(-1, 1), st.floats(-1, 1)), min_size=2**n, max_size=2**n
    ).map(lambda v: np.array([complex(a, b) for a, b in v])).filter(
        lambda v: np.linalg.norm(v) > 1e-3
    ).map(lambda v: StateVector(v / np.linalg.norm(v)))


gates3 = st.one_of(
    st.builds(lambda k, q: GateOp(k, (q,)), st.sampled_from("HXYZ"), st.integers(0, 2)),
    st.tuples(st.integers(0, 2), st.integers(0, 2)).filter(lambda p: p[0] != p[1]).map(
        lambda p: CNOT(*p)
    ),
)


class TestInitZero:
    def test_one_qubit(self):
        assert np.array_equal(init_zero(1).amps, [1, 0])

    def test_twelve_qubits(self):
        s = init_zero(12)
        assert s.amps.size == 4096
        assert s.amps[0] == 1
        assert np.count_nonzero(s.amps) == 1

    def test_eighteen_normalized(self):
        assert abs(init_zero(18).norm() - 1) < 1e-12

    @pytest.mark.parametrize("n", [0, 25, -3])
    def test_capacity(self, n):
        with pytest.raises(CapacityError):
            init_zero(n)


class TestApplyGate:
    def test_hadamard(self):
        out = apply_gate(init_zero(1), H(0))
        assert np.allclose(out.amps, [S, S], atol=1e-15)

    def test_bell_pair(self):
        s = apply_gate(init_zero(2), H(0))
        out = apply_gate(s, CNOT(0, 1))
        assert np.allclose(out.amps, [S, 0, 0, S], atol=1e-15)

    def test_cnot_msb_convention(self):
        # control 0 is the leftmost ket symbol: |10> -> |11>
        out = apply_gate(basis_state("10"), CNOT(0, 1))
        assert out.amplitude("11") == 1
        out = apply_gate(basis_state("01"), CNOT(1, 0))
        assert out.amplitude("11") == 1

    @pytest.mark.parametrize("control,target", [(0, 2), (2, 0), (1, 3), (3, 1)])
    def test_cnot_matches_permutation(self, control, target):
        rng = np.random.default_rng(control * 7 + target)
        v = rng.normal(size=16) + 1j * rng.normal(size=16)
        out = apply_gate(StateVector(v), CNOT(control, target)).amps
        expected = np.empty_like(v)
        for i in range(16):
            bits = list(format(i, "04b"))
            if bits[control] == "1":
                bits[target] = "0" if bits[target] == "1" else "1"
            expected[int("".join(bits), 2)] = v[i]
        assert np.allclose(out, expected)

    def test_single_qubit_matches_kron(self):
        rng = np.random.default_rng(0)
        v = rng.normal(size=8) + 1j * rng.normal(size=8)
        hm = np.array([[S, S], [S, -S]])
        full = np.kron(np.kron(np.eye(2), hm), np.eye(2))
        assert np.allclose(apply_gate(StateVector(v), H(1)).amps, full @ v)

    def test_index_error(self):
        with pytest.raises(QubitIndexError):
            apply_gate(init_zero(2), H(2))
        with pytest.raises(QubitIndexError):
            apply_gate(init_zero(2), CNOT(0, 5))

    def test_gateop_validation(self):
        with pytest.raises(QubitIndexError):
            CNOT(1, 1)
        with pytest.raises(ValueError):
            GateOp("H", (0, 1))
        with pytest.raises(ValueError):
            GateOp("T", (0,))

    @settings(max_examples=100, deadline=None)
    @given(states(3), gates3)
    def test_norm_preserved(self, s, g):
        assert abs(apply_gate(s, g).norm() - 1) < 1e-12

    @settings(max_examples=100, deadline=None)
    @given(states(3), gates3)
    def test_involution(self, s, g):
        twice = apply_gate(apply_gate(s, g), g)
        assert np.max(np.abs(twice.amps - s.amps)) < 1e-12

    def test_input_not_mutated(self):
        s = apply_gate(init_zero(2), H(0))
        before = s.amps.copy()
        apply_gate(s, CNOT(0, 1))
        assert np.array_equal(s.amps, before)
        with pytest.raises(ValueError):
            s.amps[0] = 0


class TestTensor:
    def test_basis(self):
        out = tensor(basis_state("0"), basis_state("1"))
        assert out.amplitude("01") == 1

    def test_labels_offset(self):
        a = basis_state("0", ["x"])
        b = basis_state("10", ["y", "z"])
        out = tensor(a, b)
        assert out.labels.names == ("x", "y", "z")
        assert out.index_of("z") == 2

    @settings(max_examples=50, deadline=None)
    @given(states(1), states(2), states(1))
    def test_associative(self, a, b, c):
        left = tensor(tensor(a, b), c).amps
        right = tensor(a, tensor(b, c)).amps
        assert np.max(np.abs(left - right)) < 1e-12

    def test_norm_multiplicative(self):
        a = StateVector(np.array([3, 4j]))
        b = StateVector(np.array([1, 1, 1, 1]))
        assert np.isclose(tensor(a, b).norm(), a.norm() * b.norm())

    def test_capacity(self):
        with pytest.raises(CapacityError):
            tensor(init_zero(12), init_zero(13))


class TestFidelity:
    def test_self(self):
        s = StateVector(np.array([0.6, 0.8j]))
        assert abs(fidelity(s, s) - 1) < 1e-15

    def test_orthogonal(self):
        assert fidelity(basis_state("0"), basis_state("1")) == 0

    def test_symmetric(self, rng):
        a = StateVector(rng.normal(size=4) + 1j * rng.normal(size=4)).normalized()
        b = StateVector(rng.normal(size=4) + 1j * rng.normal(size=4)).normalized()
        assert np.isclose(fidelity(a, b), fidelity(b, a))

    def test_global_phase(self):
        a = StateVector(np.array([0.6, 0.8]))
        b = StateVector(np.exp(0.7j) * a.amps)
        assert abs(fidelity(a, b) - 1) < 1e-15

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionMismatchError):
            fidelity(init_zero(1), init_zero(2))


def test_labelmap_duplicates():
    with pytest.raises(ValueError):
        LabelMap(["a", "a"])


def test_labelmap_remove_keeps_order():
    m = LabelMap(["a", "b", "c", "d"]).remove([0, 2])
    assert m.names == ("b", "d")


def test_permute_roundtrip(rng):
    v = rng.normal(size=8) + 0j
    s = StateVector(v, ["a", "b", "c"])
    p = permute(s, [2, 0, 1])
    assert p.labels.names == ("c", "a", "b")
    assert p.amplitude("100") == s.amplitude("001")


def test_reduced_density_and_schmidt():
    bell = StateVector(np.array([S, 0, 0, S]))
    prod = tensor(bell, basis_state("0"))
    assert np.allclose(reduced_density(prod, [0, 1]), np.outer(bell.amps, bell.amps.conj()))
    assert schmidt_rank(prod, [0, 1]) == 1
    assert schmidt_rank(prod, [0]) == 2
