import json
from collections import Counter

import numpy as np
import pytest

from cyqt.bell import BellOutcome
from cyqt.channel import MessageState
from cyqt.corrections import (
    CSV_HEADER,
    PAULI_MATRICES,
    PAULI_SYMBOLS,
    RECEIVER_LABELS,
    CorrectionRecord,
    PauliString,
    correction_for,
    default_probes,
    derive_all,
    derive_correction,
    export_table,
    fidelity_one_assignments,
    import_table,
    locality_tables,
    pair_candidates_table,
)
from cyqt.errors import DerivationError
from cyqt.protocol import (
    DELIVERIES,
    N_TUPLES,
    all_outcome_tuples,
    collapse_sequence,
    enumerate_branches,
    corrected_fidelities,
    tuple_from_index,
)
from cyqt.statevec import StateVector

import oracles
from conftest import random_triple

P, M, SP, SM = BellOutcome
ALL_PHI = (P,) * 6
IDENT = ("I", "I")

# printed rows: beta1B4 runs over Phi+, Phi-, Psi+, Psi- with everything else Phi+
TABLE_ROWS = [
    (P, ("I", "I")),
    (M, ("Z", "I")),
    (SP, ("X", "X")),
    (SM, ("iY", "X")),
]


@pytest.fixture(scope="module")
def table():
    return derive_all()


def test_iy_matrix():
    assert np.array_equal(PAULI_MATRICES["iY"], np.array([[0, 1], [-1, 0]]))
    y = np.array([[0, -1j], [1j, 0]])
    assert np.allclose(PAULI_MATRICES["iY"], 1j * y)


class TestPrintedRows:
    @pytest.mark.parametrize("last,charlie", TABLE_ROWS)
    def test_derive_all_rows(self, table, last, charlie):
        i = TABLE_ROWS.index((last, charlie))
        rec = table[i]
        assert rec.outcomes == (P,) * 5 + (last,)
        assert rec.charlie == charlie
        assert rec.alice == IDENT and rec.bob == IDENT

    @pytest.mark.parametrize("last,charlie", TABLE_ROWS)
    def test_derive_correction_rows(self, last, charlie):
        rec = derive_correction((P,) * 5 + (last,))
        assert (rec.alice, rec.bob, rec.charlie) == (IDENT, IDENT, charlie)


def test_record_count_and_order(table):
    assert len(table) == N_TUPLES
    assert [r.outcomes for r in table] == all_outcome_tuples()


def test_table_matches_byproduct_algebra(table):
    for rec in table:
        expected = oracles.analytic_correction([o.symbol for o in rec.outcomes])
        assert (rec.alice, rec.bob, rec.charlie) == (
            expected["Alice"],
            expected["Bob"],
            expected["Charlie"],
        ), rec.outcomes


@pytest.mark.parametrize("index", [0, 3, 1234, 2766, 4095])
def test_single_and_bulk_derivation_agree(table, index):
    outcomes = tuple_from_index(index)
    assert derive_correction(outcomes) == table[index]
    assert correction_for(outcomes) == table[index]


@pytest.mark.parametrize("index", [5, 1777, 4094])
def test_brute_force_oracle_confirms_fidelity(table, index):
    rng = np.random.default_rng(index)
    inputs = random_triple(rng)
    outcomes = [o.symbol for o in tuple_from_index(index)]
    fids = oracles.protocol_fidelities(
        [x.state().amps for x in inputs], outcomes, dict(table[index].pauli_string)
    )
    for f in fids.values():
        assert f == pytest.approx(1.0, abs=1e-10)


def test_input_independence(table):
    rng = np.random.default_rng(99)
    triples = [tuple(MessageState(1, 0) for _ in range(3))] + [random_triple(rng) for _ in range(3)]
    for inputs in triples:
        fids = corrected_fidelities(enumerate_branches(inputs), inputs, table)
        assert np.all(np.abs(fids - 1) < 1e-10)


class TestLocality:
    def test_sixteen_rows_per_receiver(self, table):
        lookups = locality_tables(table)
        assert {k: len(v) for k, v in lookups.items()} == {"Alice": 16, "Bob": 16, "Charlie": 16}

    def test_receiver_lookup_values(self, table):
        lookups = locality_tables(table)
        assert lookups["Charlie"][(P, SM)] == ("iY", "X")
        assert lookups["Bob"][(M, P)] == ("Z", "I")
        assert lookups["Alice"][(M, M)] == ("I", "I")

    def test_detects_nonlocal_table(self, table):
        broken = list(table)
        r = broken[7]
        broken[7] = CorrectionRecord(r.outcomes, alice=("X", "X"), bob=r.bob, charlie=r.charlie)
        with pytest.raises(DerivationError):
            locality_tables(broken)


class TestUniqueness:
    """Each receiver's qubits end in span{|00>,|11>}, so P and P.(Z(x)Z) both work."""

    def test_two_candidates_per_receiver(self):
        ok = pair_candidates_table()
        assert np.all(ok.sum(axis=2) == 2)

    def test_candidates_differ_by_zz(self):
        ok = pair_candidates_table()
        zz = np.kron(PAULI_MATRICES["Z"], PAULI_MATRICES["Z"])
        pairs = [(a, b) for a in PAULI_SYMBOLS for b in PAULI_SYMBOLS]
        for i in range(0, N_TUPLES, 97):
            for r in range(3):
                (c1, c2) = np.flatnonzero(ok[i, r])
                m1 = np.kron(PAULI_MATRICES[pairs[c1][0]], PAULI_MATRICES[pairs[c1][1]])
                m2 = np.kron(PAULI_MATRICES[pairs[c2][0]], PAULI_MATRICES[pairs[c2][1]])
                prod = m1 @ zz
                phase = prod.flat[np.argmax(np.abs(prod))] / m2.flat[np.argmax(np.abs(m2))]
                assert np.allclose(prod, phase * m2)

    @pytest.mark.parametrize("index", [0, 2049])
    def test_joint_search_has_eight_winners(self, index):
        assert len(fidelity_one_assignments(tuple_from_index(index))) == 8

    def test_alternative_representatives_give_same_state(self):
        inputs = default_probes()[1]
        run = collapse_sequence(inputs, ALL_PHI)
        t = run.final_state.tensor()
        zz_c = np.einsum("ai,bj,ij...->ab...", PAULI_MATRICES["Z"], PAULI_MATRICES["Z"], t)
        assert np.allclose(zz_c, t)


def test_operator_histogram(table):
    # brute-force count over the derived table, with the second-qubit tie-break
    counts = {label: Counter(r.pauli_string[label] for r in table) for label in RECEIVER_LABELS}
    for first, second in (("A1", "A3"), ("B1", "B3"), ("C1", "C3")):
        assert counts[first] == {"I": 1024, "X": 1024, "iY": 1024, "Z": 1024}
        assert counts[second] == {"I": 2048, "X": 2048}


def test_derivation_failure_for_untransportable_probe():
    bad = StateVector(np.array([0, 1, 0, 0], dtype=complex))  # |01>
    # alone, |01> is reachable by some Pauli; together with the family probes it is not
    probes = default_probes() + [(bad, MessageState(1, 0), MessageState(1, 0))]
    with pytest.raises(DerivationError) as err:
        derive_correction(ALL_PHI, probes=probes)
    assert err.value.outcomes == ALL_PHI
    with pytest.raises(DerivationError):
        derive_all(probes=probes)


class TestPauliString:
    def test_requires_all_six_labels(self):
        with pytest.raises(ValueError):
            PauliString({"A1": "I"})
        with pytest.raises(ValueError):
            PauliString({k: "I" for k in RECEIVER_LABELS} | {"A2": "I"})

    def test_rejects_unknown_symbol(self):
        with pytest.raises(ValueError):
            PauliString({k: "Y" for k in RECEIVER_LABELS})

    def test_mapping_behaviour(self):
        s = PauliString({k: "X" for k in RECEIVER_LABELS})
        assert list(s) == list(RECEIVER_LABELS)
        assert s == {k: "X" for k in RECEIVER_LABELS}
        assert hash(s) == hash(PauliString(dict(s)))

    def test_for_delivery(self, table):
        rec = table[3]
        assert rec.for_delivery("beta") == ("iY", "X")
        assert rec.for_delivery("alpha") == rec.bob
        assert [d.register for d in DELIVERIES] == ["alpha", "beta", "gamma"]


class TestExport:
    def test_csv_header_and_first_row(self, table):
        lines = export_table(table, "csv").splitlines()
        assert lines[0] == "alpha0A2,beta0B2,gamma0C2,alpha1A4,gamma1C4,beta1B4,A1,A3,B1,B3,C1,C3"
        assert lines[1] == ",".join(["Phi+"] * 6 + ["I"] * 6)
        assert lines[4] == "Phi+,Phi+,Phi+,Phi+,Phi+,Psi-,I,I,I,I,iY,X"
        assert len(lines) == N_TUPLES + 1
        assert CSV_HEADER == lines[0].split(",")

    @pytest.mark.parametrize("fmt", ["csv", "json"])
    def test_round_trip(self, table, fmt):
        assert import_table(export_table(table, fmt), fmt) == table

    def test_json_layout(self, table):
        doc = json.loads(export_table(table[:2], "json"))
        assert doc["columns"] == CSV_HEADER
        assert doc["rows"][1]["outcomes"]["beta1B4"] == "Phi-"
        assert doc["rows"][1]["corrections"]["C1"] == "Z"

    def test_unknown_format(self, table):
        with pytest.raises(ValueError):
            export_table(table, "xml")
        with pytest.raises(ValueError):
            import_table("", "xml")

    def test_bad_header(self):
        with pytest.raises(ValueError):
            import_table("a,b\n", "csv")
