"""Sparse composite-system scenarios in the Bloore parameterization.

A density matrix of order n is written rho_ij = z_ij * sqrt(rho_ii rho_jj),
so positivity of rho depends on the off-diagonal z variables alone.  A
*scenario* fixes the system split (which sets n and the partial-transpose
block size) together with the list of off-diagonal entries that are kept,
each tagged real, complex, or quaternion.  Every entry not listed is pinned
to zero.  All downstream machinery (sampling weights, PPT moves, catalog
lookups) keys off this object, so it is deliberately small and immutable.

Pairs use 1-based (row, col) indices with row < col, mirroring the usual
matrix-element notation rho_23 and friends.
"""

import json
from dataclasses import dataclass

import numpy as np

__all__ = [
    "ScenarioError",
    "IndexOutOfRangeError",
    "DuplicatePairError",
    "ShapeMismatchError",
    "UnknownSplitError",
    "Split",
    "SPLITS",
    "ScenarioSpec",
    "make_scenario",
    "build_matrix",
    "quaternion_embed",
    "leading_minors",
    "positivity_z",
    "positivity_z_batch",
    "scenario_alias",
    "canonical_json",
]

FIELD_COMPONENTS = {"real": 1, "complex": 2, "quaternion": 4}


class ScenarioError(ValueError):
    """Base class for scenario construction problems."""


class IndexOutOfRangeError(ScenarioError):
    pass


class DuplicatePairError(ScenarioError):
    pass


class UnknownSplitError(ScenarioError):
    pass


class ShapeMismatchError(ValueError):
    """An array argument has the wrong length for the scenario."""


@dataclass(frozen=True)
class Split:
    """System split: matrix order, transpose block size, ratio count.

    block is the size of the square blocks that the partial transpose
    acts on; n_ratios is the number of independent diagonal ratios the
    PPT test depends on.
    """

    name: str
    n: int
    block: int
    n_ratios: int


SPLITS = {
    "qubit-qubit": Split("qubit-qubit", 4, 2, 1),
    "qubit-qutrit": Split("qubit-qutrit", 6, 3, 2),
    "qutrit-qutrit": Split("qutrit-qutrit", 9, 3, 4),
    "3qubit-bipartite": Split("3qubit-bipartite", 8, 4, 3),
    "3qubit-tripartite": Split("3qubit-tripartite", 8, 2, 3),
}

_ALIAS_PREFIX = {
    "qubit-qubit": "qq",
    "qubit-qutrit": "qq6",
    "qutrit-qutrit": "q9",
    "3qubit-bipartite": "bi8",
    "3qubit-tripartite": "tri8",
}


@dataclass(frozen=True)
class ScenarioSpec:
    """A validated scenario: split name plus the kept off-diagonal pairs.

    pairs is a tuple of (i, j, field) with 1 <= i < j <= n, sorted
    row-major.  The free z vector is the concatenation of the field
    components of each pair in that order, so its length is
    z_size = sum of components (1 real, 2 complex, 4 quaternion).
    """

    split: str
    pairs: tuple

    @property
    def n(self):
        return SPLITS[self.split].n

    @property
    def block(self):
        return SPLITS[self.split].block

    @property
    def n_ratios(self):
        return SPLITS[self.split].n_ratios

    @property
    def z_size(self):
        return sum(FIELD_COMPONENTS[f] for _, _, f in self.pairs)

    @property
    def has_quaternion(self):
        return any(f == "quaternion" for _, _, f in self.pairs)

    def pair_offsets(self):
        """Offset of each pair's first component in the z vector."""
        off = {}
        pos = 0
        for i, j, f in self.pairs:
            off[(i, j)] = pos
            pos += FIELD_COMPONENTS[f]
        return off

    def to_dict(self):
        return {
            "split": self.split,
            "pairs": [[i, j, f] for i, j, f in self.pairs],
        }

    def to_json(self):
        return canonical_json(self.to_dict())

    @staticmethod
    def from_dict(d):
        return make_scenario(d["split"], [tuple(p) for p in d["pairs"]])

    @staticmethod
    def from_json(s):
        return ScenarioSpec.from_dict(json.loads(s))


def canonical_json(obj):
    """The one JSON text form used for files this package writes."""
    return json.dumps(obj, indent=2) + "\n"


def make_scenario(split, pairs):
    """Validate and normalize a scenario description.

    Accepts pairs in any order and with indices either way around;
    normalizes to i < j and sorts row-major.  Raises UnknownSplitError,
    IndexOutOfRangeError, or DuplicatePairError on bad input.
    """
    if split not in SPLITS:
        raise UnknownSplitError(
            "unknown split %r; expected one of %s" % (split, sorted(SPLITS))
        )
    n = SPLITS[split].n
    norm = []
    seen = set()
    for p in pairs:
        try:
            i, j, f = p
        except (TypeError, ValueError):
            raise ScenarioError("pair %r is not (i, j, field)" % (p,))
        i = int(i)
        j = int(j)
        if f not in FIELD_COMPONENTS:
            raise ScenarioError(
                "bad field %r in pair (%d, %d); expected real/complex/quaternion"
                % (f, i, j)
            )
        if i == j:
            raise IndexOutOfRangeError("pair (%d, %d) sits on the diagonal" % (i, j))
        if i > j:
            i, j = j, i
        if not (1 <= i < j <= n):
            raise IndexOutOfRangeError(
                "pair (%d, %d) outside 1..%d for split %s" % (i, j, n, split)
            )
        if (i, j) in seen:
            raise DuplicatePairError("pair (%d, %d) listed twice" % (i, j))
        seen.add((i, j))
        norm.append((i, j, f))
    norm.sort()
    return ScenarioSpec(split=split, pairs=tuple(norm))


def scenario_alias(spec):
    """Short handle like qq-real-23 or qq6-mixed-12c-34.

    Field tag is the common field when uniform (quaternion shortens to
    quat), otherwise "mixed" with a per-pair letter suffix r/c/q.
    """
    prefix = _ALIAS_PREFIX[spec.split]
    fields = {f for _, _, f in spec.pairs}
    if not spec.pairs:
        return "%s-diag" % prefix
    if fields == {"real"}:
        tag, suffix = "real", False
    elif fields == {"complex"}:
        tag, suffix = "complex", False
    elif fields == {"quaternion"}:
        tag, suffix = "quat", False
    else:
        tag, suffix = "mixed", True
    parts = []
    for i, j, f in spec.pairs:
        s = "%d%d" % (i, j)
        if suffix:
            s += {"real": "r", "complex": "c", "quaternion": "q"}[f]
        parts.append(s)
    return "-".join([prefix, tag] + parts)


def _check_lengths(spec, diag, z):
    diag = np.asarray(diag, dtype=np.float64)
    z = np.asarray(z, dtype=np.float64)
    if diag.shape != (spec.n,):
        raise ShapeMismatchError(
            "diag has shape %s, expected (%d,)" % (diag.shape, spec.n)
        )
    if z.shape != (spec.z_size,):
        raise ShapeMismatchError(
            "z has shape %s, expected (%d,)" % (z.shape, spec.z_size)
        )
    return diag, z


def build_matrix(spec, diag, z):
    """Assemble the dense matrix for one draw.

    Returns a complex (n, n) Hermitian array for real/complex scenarios.
    If any pair is quaternionic the result is an (n, n, 4) float array
    holding the components in (1, i, j, k) order, with the diagonal in
    component 0; feed it to quaternion_embed or leading_minors.
    Entry (i, j) is the pair value times sqrt(diag_i * diag_j).
    """
    diag, z = _check_lengths(spec, diag, z)
    n = spec.n
    if spec.has_quaternion:
        m = np.zeros((n, n, 4))
        for k in range(n):
            m[k, k, 0] = diag[k]
        pos = 0
        for i, j, f in spec.pairs:
            c = FIELD_COMPONENTS[f]
            s = np.sqrt(diag[i - 1] * diag[j - 1])
            comp = np.zeros(4)
            comp[:c] = z[pos : pos + c]
            m[i - 1, j - 1] = comp * s
            conj = comp * s
            conj[1:] = -conj[1:]
            m[j - 1, i - 1] = conj
            pos += c
        return m
    m = np.zeros((n, n), dtype=np.complex128)
    for k in range(n):
        m[k, k] = diag[k]
    pos = 0
    for i, j, f in spec.pairs:
        c = FIELD_COMPONENTS[f]
        s = np.sqrt(diag[i - 1] * diag[j - 1])
        v = z[pos] * s
        if c == 2:
            v = complex(z[pos] * s, z[pos + 1] * s)
        m[i - 1, j - 1] = v
        m[j - 1, i - 1] = np.conj(v)
        pos += c
    return m


def quaternion_embed(m):
    """Symplectic embedding of an (n, n, 4) quaternion matrix into C^(2n x 2n).

    a + b i + c j + d k maps to the 2x2 complex block
        [[a + b i,  c + d i],
         [-c + d i, a - b i]]
    which is a *-homomorphism, so Hermiticity and positivity carry over.
    """
    m = np.asarray(m, dtype=np.float64)
    if m.ndim != 3 or m.shape[2] != 4 or m.shape[0] != m.shape[1]:
        raise ShapeMismatchError("expected an (n, n, 4) quaternion array")
    n = m.shape[0]
    out = np.zeros((2 * n, 2 * n), dtype=np.complex128)
    a, b, c, d = m[..., 0], m[..., 1], m[..., 2], m[..., 3]
    out[0::2, 0::2] = a + 1j * b
    out[0::2, 1::2] = c + 1j * d
    out[1::2, 0::2] = -c + 1j * d
    out[1::2, 1::2] = a - 1j * b
    return out


def leading_minors(m):
    """Leading principal minors of a Hermitian matrix, as real floats.

    For a complex (n, n) array this is just det of each leading block.
    For an (n, n, 4) quaternion array the k-th value is the signed Moore
    determinant of the leading k x k quaternion block, recovered from the
    symplectic embedding: its spectrum is doubled (Kramers pairs), so the
    product of every other sorted eigenvalue restores the sign that a
    plain sqrt(det) would lose.
    """
    m = np.asarray(m)
    if m.ndim == 3:
        full = quaternion_embed(m)
        n = m.shape[0]
        out = np.empty(n)
        for k in range(1, n + 1):
            sub = full[: 2 * k, : 2 * k]
            eig = np.linalg.eigvalsh(sub)
            out[k - 1] = float(np.prod(eig[::2]))
        return out
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ShapeMismatchError("expected a square matrix")
    n = m.shape[0]
    out = np.empty(n)
    for k in range(1, n + 1):
        out[k - 1] = float(np.linalg.det(m[:k, :k]).real)
    return out


def positivity_z(spec, z):
    """True iff the scenario matrix is positive semidefinite at this z.

    The Bloore factorization makes this independent of the diagonal, so
    no diagonal argument is needed.  Tolerance policy: the minor chain
    accepts borderline values within eps * scale^k of zero.
    """
    z = np.asarray(z, dtype=np.float64)
    if z.shape != (spec.z_size,):
        raise ShapeMismatchError(
            "z has shape %s, expected (%d,)" % (z.shape, spec.z_size)
        )
    return bool(positivity_z_batch(spec, z[None, :])[0])


def positivity_z_batch(spec, zz):
    """Vectorized positivity_z: zz is (batch, z_size), returns bool array."""
    from . import _plans

    zz = np.ascontiguousarray(zz, dtype=np.float64)
    if zz.ndim != 2 or zz.shape[1] != spec.z_size:
        raise ShapeMismatchError(
            "z batch has shape %s, expected (*, %d)" % (zz.shape, spec.z_size)
        )
    plan = _plans.positivity_plan(spec)
    dd = np.ones((zz.shape[0], spec.n))
    return _plans.run_plan(plan, dd, zz).astype(bool)
