"""Finite symmetric dictionaries and atomic-class elements.

A :class:`Dictionary` stores one representative per ``{g, -g}`` pair; the
negated atoms are implicit. Greedy selection over the symmetric closure is
therefore a maximum over absolute correlations.
"""

import json
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .hilbert import DimensionMismatchError, as_vector, norm_l2

UNIT_NORM_TOL = 1e-9
MEMBERSHIP_TOL = 1e-12


class DictionaryError(ValueError):
    """Raised when atoms fail the unit-norm or shape requirements."""


class A1MembershipError(ValueError):
    """Raised when coefficients violate ``sum |a_k|**tau <= 1``."""

    def __init__(self, total, tau):
        self.total = total
        self.tau = tau
        super().__init__(
            f"coefficient sum |a|^{tau} = {total!r} exceeds 1 (tolerance {MEMBERSHIP_TOL})"
        )


class AtomRef(NamedTuple):
    index: int
    sign: int
    correlation: float


class Dictionary:
    """Immutable finite dictionary of unit-norm atoms.

    Parameters
    ----------
    atoms : array-like of shape (n_atoms, dim)
        One representative per symmetric pair.
    check : bool, default=True
        Raise :class:`DictionaryError` if any atom is not unit norm. Pass
        ``False`` to build a dictionary that :func:`validate` can inspect.
    """

    def __init__(self, atoms, check=True):
        arr = np.array(atoms, dtype=np.float64)
        if arr.ndim != 2 or arr.shape[0] == 0 or arr.shape[1] == 0:
            raise DictionaryError(
                f"atoms must be a non-empty (n_atoms, dim) array, got shape {arr.shape}"
            )
        if not np.all(np.isfinite(arr)):
            raise DictionaryError("atoms contain non-finite entries")
        arr.setflags(write=False)
        self._atoms = arr
        if check:
            problems = validate(self)
            if problems:
                raise DictionaryError("; ".join(problems))

    @property
    def atoms(self):
        return self._atoms

    @property
    def dim(self):
        return self._atoms.shape[1]

    @property
    def n_atoms(self):
        return self._atoms.shape[0]

    def __len__(self):
        return self.n_atoms

    def __eq__(self, other):
        return isinstance(other, Dictionary) and np.array_equal(self._atoms, other._atoms)

    def __repr__(self):
        return f"Dictionary(n_atoms={self.n_atoms}, dim={self.dim})"

    def signed_atom(self, index, sign):
        return sign * self._atoms[index]

    def to_dict(self):
        return {"dim": self.dim, "atoms": self._atoms.tolist()}

    @classmethod
    def from_dict(cls, doc):
        atoms = doc.get("atoms")
        if atoms is None:
            return canonical_dictionary(int(doc["dim"]))
        d = cls(atoms)
        if "dim" in doc and int(doc["dim"]) != d.dim:
            raise DictionaryError(f"declared dim {doc['dim']} does not match atoms (dim {d.dim})")
        return d

    def to_json(self):
        return json.dumps(self.to_dict())


def canonical_dictionary(n):
    """The ``n`` canonical basis vectors of R^n."""
    if int(n) != n or n < 1:
        raise ValueError(f"n must be a positive integer, got {n!r}")
    return Dictionary(np.eye(int(n)))


def validate(dictionary):
    """Return a list of human-readable violations; empty means valid."""
    atoms = np.asarray(dictionary.atoms if isinstance(dictionary, Dictionary) else dictionary,
                       dtype=np.float64)
    problems = []
    if atoms.ndim != 2:
        return [f"atoms must form a 2-D array, got shape {atoms.shape}"]
    for i, atom in enumerate(atoms):
        nrm = norm_l2(atom)
        if abs(nrm - 1.0) > UNIT_NORM_TOL:
            problems.append(f"atom {i} has norm {nrm!r}, expected 1")
    return problems


def select_atom(dictionary, r):
    """Greedy selection over the symmetric closure of ``dictionary``.

    Returns the lowest index maximising ``|<r, atom_i>|`` together with the
    sign that makes the correlation nonnegative (``+1`` at an exact zero).
    """
    r = as_vector(r, "r")
    if r.shape[0] != dictionary.dim:
        raise DimensionMismatchError(
            f"residual has dim {r.shape[0]}, dictionary has dim {dictionary.dim}"
        )
    corr = dictionary.atoms @ r
    # np.argmax returns the first maximiser, which is the tie-break we want
    i = int(np.argmax(np.abs(corr)))
    c = float(corr[i])
    sign = -1 if c < 0 else 1
    return AtomRef(i, sign, abs(c))


@dataclass(frozen=True)
class A1Element:
    """A vector with an atomic representation certifying membership in A_tau."""

    vector: np.ndarray
    support: tuple
    coefficients: tuple
    tau: float = 1.0

    @property
    def coefficient_sum(self):
        return float(sum(abs(a) ** self.tau for a in self.coefficients))

    def to_dict(self):
        return {
            "entries": [[i, s, a] for (i, s), a in zip(self.support, self.coefficients)],
            "tau": self.tau,
        }


def build_a1_element(dictionary, entries, tau=1.0):
    """Assemble ``sum_k a_k * (s_k * atom_{i_k})`` and certify it.

    Parameters
    ----------
    dictionary : Dictionary
    entries : iterable of (index, sign, coefficient)
    tau : float, default=1.0

    Raises
    ------
    A1MembershipError
        If ``sum |a_k|**tau`` exceeds ``1 + 1e-12``.
    """
    if not tau > 0:
        raise ValueError(f"tau must be positive, got {tau!r}")
    support = []
    coefficients = []
    vector = np.zeros(dictionary.dim)
    for index, sign, coef in entries:
        index = int(index)
        sign = int(sign)
        if not 0 <= index < dictionary.n_atoms:
            raise IndexError(f"atom index {index} out of range for {dictionary.n_atoms} atoms")
        if sign not in (1, -1):
            raise ValueError(f"sign must be +1 or -1, got {sign}")
        support.append((index, sign))
        coefficients.append(float(coef))
        vector = vector + float(coef) * dictionary.signed_atom(index, sign)
    total = float(sum(abs(a) ** tau for a in coefficients))
    if total > 1.0 + MEMBERSHIP_TOL:
        raise A1MembershipError(total, tau)
    vector.setflags(write=False)
    return A1Element(vector, tuple(support), tuple(coefficients), float(tau))


def load_instance(doc):
    """Build ``(Dictionary, A1Element)`` from a parsed instance document.

    The document merges the dictionary and element schemas::

        {"dim": n, "atoms": [[...], ...], "entries": [[index, sign, coeff], ...], "tau": t}

    ``atoms`` may be omitted, meaning the canonical basis of R^dim.
    """
    dictionary = Dictionary.from_dict(doc)
    element = build_a1_element(dictionary, doc["entries"], doc.get("tau", 1.0))
    return dictionary, element


def dump_instance(dictionary, element):
    doc = dictionary.to_dict()
    doc.update(element.to_dict())
    return doc
