import json
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from relaxed_greedy.dictionary import (
    A1MembershipError,
    AtomRef,
    Dictionary,
    DictionaryError,
    build_a1_element,
    canonical_dictionary,
    dump_instance,
    load_instance,
    select_atom,
    validate,
)
from relaxed_greedy.hilbert import DimensionMismatchError


def test_canonical_dictionary():
    np.testing.assert_array_equal(canonical_dictionary(2).atoms, [[1, 0], [0, 1]])
    np.testing.assert_array_equal(canonical_dictionary(1).atoms, [[1]])
    d4 = canonical_dictionary(4)
    assert (d4.n_atoms, d4.dim) == (4, 4)
    with pytest.raises(ValueError):
        canonical_dictionary(0)


def test_validate():
    assert validate(canonical_dictionary(3)) == []
    problems = validate(Dictionary([[2.0, 0.0]], check=False))
    assert len(problems) == 1 and "atom 0" in problems[0]
    assert validate(Dictionary([[1 / math.sqrt(2), 1 / math.sqrt(2)]])) == []
    with pytest.raises(DictionaryError):
        Dictionary([[2.0, 0.0]])


def test_dictionary_is_immutable():
    d = canonical_dictionary(2)
    with pytest.raises(ValueError):
        d.atoms[0, 0] = 5.0


@pytest.mark.parametrize("r, expected", [
    ((0.8, 0.1), AtomRef(0, 1, 0.8)),
    ((0.0, -0.4), AtomRef(1, -1, 0.4)),
    ((0.5, 0.5), AtomRef(0, 1, 0.5)),
    ((0.0, 0.0), AtomRef(0, 1, 0.0)),
])
def test_select_atom(r, expected):
    assert select_atom(canonical_dictionary(2), r) == expected


def test_select_atom_tie_lowest_index_with_negative():
    # equal magnitude, the lower index wins even with a negative sign
    assert select_atom(canonical_dictionary(3), (-0.3, 0.3, 0.1)) == AtomRef(0, -1, 0.3)


def test_select_atom_dimension_mismatch():
    with pytest.raises(DimensionMismatchError):
        select_atom(canonical_dictionary(2), (1, 2, 3))


def _brute_force_select(atoms, r):
    best = None
    for i, a in enumerate(atoms):
        for s in (1, -1):
            c = s * sum(x * y for x, y in zip(a, r))
            if best is None or c > best[2]:
                best = (i, s, c)
    return best


@given(arrays(np.float64, (5, 3), elements=st.floats(-1, 1, allow_nan=False)),
       arrays(np.float64, 3, elements=st.floats(-10, 10, allow_nan=False)))
def test_select_atom_matches_enumeration_of_symmetric_closure(raw, r):
    norms = np.linalg.norm(raw, axis=1)
    raw = raw[norms > 1e-3]
    if raw.shape[0] == 0:
        return
    atoms = raw / np.linalg.norm(raw, axis=1, keepdims=True)
    d = Dictionary(atoms)
    ref = select_atom(d, r)
    _, _, c = _brute_force_select(atoms, r)
    assert ref.correlation >= 0
    assert ref.correlation == pytest.approx(c, abs=1e-12)
    scaled = select_atom(d, 2 * r)
    assert (scaled.index, scaled.sign) == (ref.index, ref.sign)


@given(arrays(np.float64, 6, elements=st.floats(-5, 5, allow_nan=False)))
def test_select_atom_canonical_is_max_abs_coordinate(r):
    ref = select_atom(canonical_dictionary(6), r)
    assert abs(r[ref.index]) == np.max(np.abs(r))


def test_build_a1_element_examples():
    b = 0.4
    el = build_a1_element(canonical_dictionary(2), [(0, 1, 1 - b), (1, 1, b)], tau=1)
    np.testing.assert_allclose(el.vector, [0.6, 0.4], atol=1e-12)
    el = build_a1_element(canonical_dictionary(1), [(0, 1, 1.0)], tau=1)
    np.testing.assert_array_equal(el.vector, [1.0])
    el = build_a1_element(canonical_dictionary(4), [(i, 1, 0.25) for i in range(4)], tau=1)
    np.testing.assert_array_equal(el.vector, [0.25] * 4)
    assert el.coefficient_sum == 1.0


def test_build_a1_element_rejects_violation():
    with pytest.raises(A1MembershipError) as info:
        build_a1_element(canonical_dictionary(2), [(0, 1, 0.8), (1, 1, 0.8)], tau=1)
    assert info.value.total == pytest.approx(1.6)


def test_build_a1_element_tau():
    # 0.6**2 + 0.8**2 == 1 so this is in A_2 but not A_1
    entries = [(0, 1, 0.6), (1, -1, 0.8)]
    el = build_a1_element(canonical_dictionary(2), entries, tau=2)
    np.testing.assert_allclose(el.vector, [0.6, -0.8])
    with pytest.raises(A1MembershipError):
        build_a1_element(canonical_dictionary(2), entries, tau=1)


def test_build_a1_element_bad_entries():
    d = canonical_dictionary(2)
    with pytest.raises(IndexError):
        build_a1_element(d, [(2, 1, 0.1)])
    with pytest.raises(ValueError):
        build_a1_element(d, [(0, 0, 0.1)])
    with pytest.raises(ValueError):
        build_a1_element(d, [(0, 1, 0.1)], tau=0)


def test_instance_json_round_trip():
    d = Dictionary([[1, 0], [0, 1], [1 / math.sqrt(2), 1 / math.sqrt(2)]])
    el = build_a1_element(d, [(2, -1, 0.5), (0, 1, 0.25)])
    doc = json.loads(json.dumps(dump_instance(d, el)))
    assert set(doc) == {"dim", "atoms", "entries", "tau"}
    d2, el2 = load_instance(doc)
    assert d2 == d
    np.testing.assert_array_equal(el2.vector, el.vector)


def test_instance_json_defaults_to_canonical():
    d, el = load_instance({"dim": 3, "entries": [[1, -1, 0.5]], "tau": 1})
    assert d == canonical_dictionary(3)
    np.testing.assert_array_equal(el.vector, [0, -0.5, 0])
