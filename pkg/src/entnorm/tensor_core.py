"""Dense complex linear algebra over multipartite Hilbert spaces.

Composite spaces are explicit tensor products of finite-dimensional parts.
Part 1 is the slowest-varying index in the flattened basis, matching the
Kronecker-product layout of ``numpy.kron``. Dense storage only; the intended
scale is a total dimension of a few thousand at most.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

__all__ = [
    "HERMITIAN_ATOL",
    "CompositeStructure",
    "NormMeta",
    "OperatorMatrix",
    "StateVector",
    "SchmidtForm",
    "SchemaError",
    "tensor_product",
    "partial_trace",
    "schmidt_decompose",
    "hermitian_eigensystem",
    "operator_to_document",
    "operator_from_document",
    "state_to_document",
    "state_from_document",
    "save_operator",
    "load_operator",
    "save_state",
    "load_state",
    "validate_operator",
]

# absolute entrywise tolerance for Hermiticity checks; inputs are constructed,
# not measured, so drift beyond rounding signals a bug
HERMITIAN_ATOL = 1e-12

# relative tolerance on the declared trace of a density matrix with NormMeta
DENSITY_TRACE_RTOL = 1e-9

STATE_NORM_ATOL = 1e-12


@dataclass(frozen=True)
class CompositeStructure:
    """Ordered part dimensions (d_1, ..., d_p) of a tensor-product space."""

    dims: tuple[int, ...]

    def __post_init__(self):
        dims = tuple(int(d) for d in self.dims)
        if len(dims) < 1:
            raise ValueError("structure needs at least one part")
        if any(d < 1 for d in dims):
            raise ValueError(f"part dimensions must be positive, got {dims}")
        object.__setattr__(self, "dims", dims)

    @property
    def num_parts(self) -> int:
        return len(self.dims)

    @property
    def total_dim(self) -> int:
        return math.prod(self.dims)


@dataclass(frozen=True)
class NormMeta:
    """Trace normalization for reduced density matrices of an N-particle
    system: a p-order matrix carries trace N!/(N-p)!."""

    n_particles: int
    p_order: int

    def __post_init__(self):
        if self.p_order < 1:
            raise ValueError("p_order must be >= 1")
        if self.n_particles < self.p_order:
            raise ValueError("n_particles must be >= p_order")

    def expected_trace(self) -> float:
        # N!/(N-p)! as a falling factorial, exact in integer arithmetic
        return float(math.perm(self.n_particles, self.p_order))


def _freeze(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class OperatorMatrix:
    """Square complex matrix bound to a CompositeStructure."""

    structure: CompositeStructure
    entries: np.ndarray
    norm_meta: Optional[NormMeta] = None

    def __post_init__(self):
        m = np.array(self.entries, dtype=complex)
        d = self.structure.total_dim
        if m.shape != (d, d):
            raise ValueError(
                f"entries shape {m.shape} does not match total dimension {d}"
            )
        object.__setattr__(self, "entries", _freeze(m))

    def trace(self) -> complex:
        return complex(np.trace(self.entries))

    def is_hermitian(self, atol: float = HERMITIAN_ATOL) -> bool:
        return bool(
            np.max(np.abs(self.entries - self.entries.conj().T)) <= atol
        )

    def require_hermitian(self, atol: float = HERMITIAN_ATOL) -> None:
        dev = float(np.max(np.abs(self.entries - self.entries.conj().T)))
        if dev > atol:
            raise ValueError(f"matrix is not Hermitian: max deviation {dev:.3e}")

    def as_tensor(self) -> np.ndarray:
        """View with one row axis and one column axis per part."""
        dims = self.structure.dims
        return self.entries.reshape(dims + dims)


@dataclass(frozen=True)
class StateVector:
    """Complex amplitude vector bound to a CompositeStructure."""

    structure: CompositeStructure
    amplitudes: np.ndarray

    def __post_init__(self):
        v = np.array(self.amplitudes, dtype=complex)
        d = self.structure.total_dim
        if v.shape != (d,):
            raise ValueError(
                f"amplitudes shape {v.shape} does not match total dimension {d}"
            )
        object.__setattr__(self, "amplitudes", _freeze(v))

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def require_normalized(self, atol: float = STATE_NORM_ATOL) -> None:
        n = self.norm()
        if abs(n - 1.0) > atol:
            raise ValueError(f"state is not normalized: norm {n!r}")

    def projector(self) -> OperatorMatrix:
        v = self.amplitudes
        return OperatorMatrix(self.structure, np.outer(v, v.conj()))


@dataclass(frozen=True)
class SchmidtForm:
    """Biorthogonal expansion of a two-part state.

    coefficients are nonnegative and nonincreasing; left_basis and
    right_basis hold one orthonormal column per coefficient.
    """

    coefficients: np.ndarray
    left_basis: np.ndarray
    right_basis: np.ndarray

    def __post_init__(self):
        object.__setattr__(
            self, "coefficients", _freeze(np.array(self.coefficients, dtype=float))
        )
        object.__setattr__(
            self, "left_basis", _freeze(np.array(self.left_basis, dtype=complex))
        )
        object.__setattr__(
            self, "right_basis", _freeze(np.array(self.right_basis, dtype=complex))
        )

    def reconstruct(self) -> np.ndarray:
        """Flattened amplitudes of sum_n c_n u_n (x) v_n."""
        c = self.coefficients
        return ((self.left_basis * c) @ self.right_basis.T).reshape(-1)


def tensor_product(a: OperatorMatrix, b: OperatorMatrix) -> OperatorMatrix:
    """Operator tensor product; the result's parts are a's parts then b's."""
    structure = CompositeStructure(a.structure.dims + b.structure.dims)
    return OperatorMatrix(structure, np.kron(a.entries, b.entries))


def partial_trace(a: OperatorMatrix, keep: int) -> OperatorMatrix:
    """Trace out every part except ``keep`` (0-based part index)."""
    p = a.structure.num_parts
    if p < 2:
        raise ValueError("partial_trace needs at least two parts")
    if not 0 <= keep < p:
        raise ValueError(f"part index {keep} out of range for {p} parts")
    t = a.as_tensor()
    # contract matching row/column axes of every part except the kept one
    row = list(range(p))
    col = list(range(p))
    col[keep] = p
    out = np.einsum(t, row + col, [keep, p])
    return OperatorMatrix(CompositeStructure((a.structure.dims[keep],)), out)


def schmidt_decompose(psi: StateVector, cutoff: float = 1e-12) -> SchmidtForm:
    """Biorthogonal form of a normalized two-part state.

    Coefficients below ``cutoff`` (relative to the largest) are dropped,
    so a product state reports a single coefficient.
    """
    if psi.structure.num_parts != 2:
        raise ValueError(
            f"need exactly 2 parts, got {psi.structure.num_parts}"
        )
    psi.require_normalized()
    d1, d2 = psi.structure.dims
    m = psi.amplitudes.reshape(d1, d2)
    u, s, vh = np.linalg.svd(m, full_matrices=False)
    keep = max(1, int(np.sum(s > cutoff * s[0])))
    return SchmidtForm(s[:keep], u[:, :keep], vh[:keep].T)


def hermitian_eigensystem(
    a: OperatorMatrix, atol: float = HERMITIAN_ATOL
) -> tuple[np.ndarray, np.ndarray]:
    """Eigenvalues (nonincreasing) and matching eigenvector columns."""
    a.require_hermitian(atol)
    vals, vecs = np.linalg.eigh(a.entries)
    return vals[::-1].copy(), vecs[:, ::-1].copy()


# ---------------------------------------------------------------------------
# document (de)serialization
#
# An operator document is a JSON object:
#   {"dims": [d1, ...], "entries": [[re, im], ...], "norm_meta": {"N": n, "p": p}}
# entries are row-major, one [re, im] pair per matrix element; norm_meta is
# optional. A state document uses "amplitudes" instead of "entries".
# ---------------------------------------------------------------------------


class SchemaError(ValueError):
    """Malformed document; ``field`` names the offending entry."""

    def __init__(self, field_name: str, message: str):
        self.field = field_name
        super().__init__(f"{field_name}: {message}")


def _parse_dims(doc: dict) -> CompositeStructure:
    if "dims" not in doc:
        raise SchemaError("dims", "missing")
    dims = doc["dims"]
    if (
        not isinstance(dims, list)
        or not dims
        or not all(isinstance(d, int) and d >= 1 for d in dims)
    ):
        raise SchemaError("dims", f"expected a nonempty list of positive integers, got {dims!r}")
    return CompositeStructure(tuple(dims))


def _parse_complex_list(doc: dict, field_name: str, expected_len: int) -> np.ndarray:
    if field_name not in doc:
        raise SchemaError(field_name, "missing")
    raw = doc[field_name]
    if not isinstance(raw, list) or len(raw) != expected_len:
        raise SchemaError(
            field_name,
            f"expected a list of {expected_len} [re, im] pairs, got length "
            f"{len(raw) if isinstance(raw, list) else 'non-list'}",
        )
    out = np.empty(expected_len, dtype=complex)
    for k, pair in enumerate(raw):
        if (
            not isinstance(pair, (list, tuple))
            or len(pair) != 2
            or not all(isinstance(x, (int, float)) for x in pair)
        ):
            raise SchemaError(field_name, f"element {k} is not a [re, im] pair: {pair!r}")
        if not all(math.isfinite(x) for x in pair):
            raise SchemaError(field_name, f"element {k} is not finite: {pair!r}")
        out[k] = complex(pair[0], pair[1])
    return out


def _parse_norm_meta(doc: dict) -> Optional[NormMeta]:
    if "norm_meta" not in doc or doc["norm_meta"] is None:
        return None
    meta = doc["norm_meta"]
    if not isinstance(meta, dict):
        raise SchemaError("norm_meta", f"expected an object, got {meta!r}")
    for key in ("N", "p"):
        if key not in meta:
            raise SchemaError(f"norm_meta.{key}", "missing")
        if not isinstance(meta[key], int):
            raise SchemaError(f"norm_meta.{key}", f"expected an integer, got {meta[key]!r}")
    try:
        return NormMeta(meta["N"], meta["p"])
    except ValueError as exc:
        raise SchemaError("norm_meta", str(exc)) from exc


def operator_from_document(doc: dict) -> OperatorMatrix:
    if not isinstance(doc, dict):
        raise SchemaError("document", "expected a JSON object")
    structure = _parse_dims(doc)
    d = structure.total_dim
    flat = _parse_complex_list(doc, "entries", d * d)
    meta = _parse_norm_meta(doc)
    return OperatorMatrix(structure, flat.reshape(d, d), meta)


def operator_to_document(a: OperatorMatrix) -> dict:
    flat = a.entries.reshape(-1)
    doc: dict = {
        "dims": list(a.structure.dims),
        "entries": [[float(z.real), float(z.imag)] for z in flat],
    }
    if a.norm_meta is not None:
        doc["norm_meta"] = {"N": a.norm_meta.n_particles, "p": a.norm_meta.p_order}
    return doc


def state_from_document(doc: dict) -> StateVector:
    if not isinstance(doc, dict):
        raise SchemaError("document", "expected a JSON object")
    structure = _parse_dims(doc)
    flat = _parse_complex_list(doc, "amplitudes", structure.total_dim)
    return StateVector(structure, flat)


def state_to_document(psi: StateVector) -> dict:
    return {
        "dims": list(psi.structure.dims),
        "amplitudes": [[float(z.real), float(z.imag)] for z in psi.amplitudes],
    }


def save_operator(a: OperatorMatrix, path) -> None:
    with open(path, "w") as fh:
        json.dump(operator_to_document(a), fh)


def load_operator(path) -> OperatorMatrix:
    with open(path) as fh:
        return operator_from_document(json.load(fh))


def save_state(psi: StateVector, path) -> None:
    with open(path, "w") as fh:
        json.dump(state_to_document(psi), fh)


def load_state(path) -> StateVector:
    with open(path) as fh:
        return state_from_document(json.load(fh))


def validate_operator(a: OperatorMatrix) -> None:
    """Check declared invariants: trace of a matrix carrying NormMeta."""
    if a.norm_meta is not None:
        expected = a.norm_meta.expected_trace()
        actual = a.trace()
        if abs(actual - expected) > DENSITY_TRACE_RTOL * abs(expected):
            raise ValueError(
                f"declared order-{a.norm_meta.p_order} density matrix has trace "
                f"{actual:.12g}, expected {expected:.12g}"
            )
