"""Entanglement as a norm ratio against a nonentangling counterpart.

An operator A over a composite space is compared with the product operator
built from its single-part marginals, normalized to the same trace. The
measure is

    epsilon(A) = log2( |A|_D / |A_x|_D )

where |.|_D is the product-vector norm and A_x the product counterpart.
All logarithms are base 2; values are in bits.

Trace-normalized reduced density matrices (an order-p matrix of an
N-particle system carries trace N!/(N-p)!) declare that convention through
``NormMeta``; their counterpart then uses marginals of trace N and the
prefactor N!/((N-p)! N^p). For plain operators the marginal constant is 1
and the prefactor restores the trace; the measure is invariant to how that
constant is split, so the simplest split is used.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .disentangled_norm import NormResult, OptimizerOptions, disentangled_norm
from .tensor_core import (
    CompositeStructure,
    NormMeta,
    OperatorMatrix,
    StateVector,
    partial_trace,
    schmidt_decompose,
)

__all__ = [
    "ProductFactorization",
    "MeasureReport",
    "ModePopulations",
    "marginal",
    "normalized_marginal",
    "product_counterpart",
    "entanglement_measure",
    "measure_report",
    "reduced_density_measure",
    "measure_bipartite_pure",
    "multimode_measure",
    "multimode_density",
    "reduced_von_neumann_entropy",
    "report_document",
]

_POPULATION_TOL = 1e-9


@dataclass(frozen=True)
class ProductFactorization:
    """prefactor * (x)_i factors, the nonentangling counterpart of some A.

    The product-space trace of this object is prefactor times the product
    of the factor traces; construction always matches it to the trace of
    the source operator.
    """

    prefactor: float
    factors: tuple[OperatorMatrix, ...]

    def trace(self) -> complex:
        out = complex(self.prefactor)
        for f in self.factors:
            out *= f.trace()
        return out

    def matrix(self) -> OperatorMatrix:
        ent = np.array([[1.0 + 0.0j]])
        dims: tuple[int, ...] = ()
        for f in self.factors:
            ent = np.kron(ent, f.entries)
            dims = dims + f.structure.dims
        return OperatorMatrix(
            structure=CompositeStructure(dims=dims),
            entries=self.prefactor * ent,
        )


@dataclass(frozen=True)
class MeasureReport:
    """Measure value with the two norm certificates behind it."""

    epsilon_bits: float
    numerator: NormResult
    denominator: NormResult

    @property
    def norm_numerator(self) -> float:
        return self.numerator.value

    @property
    def norm_denominator(self) -> float:
        return self.denominator.value

    @property
    def converged(self) -> bool:
        return self.numerator.converged and self.denominator.converged


@dataclass(frozen=True)
class ModePopulations:
    """Fractional mode populations: w_n in [0, 1], summing to 1."""

    w: tuple[float, ...]
    p_order: int
    n_particles: int = 1

    def __post_init__(self):
        if len(self.w) == 0:
            raise ValueError("populations must be nonempty")
        if self.p_order < 1:
            raise ValueError("p_order must be >= 1")
        w = tuple(float(x) for x in self.w)
        if min(w) < -_POPULATION_TOL or max(w) > 1.0 + _POPULATION_TOL:
            raise ValueError("populations must lie in [0, 1]")
        if abs(sum(w) - 1.0) > _POPULATION_TOL:
            raise ValueError("populations must sum to 1")
        object.__setattr__(self, "w", w)

    @property
    def num_modes(self) -> int:
        return len(self.w)


def marginal(a: OperatorMatrix, i: int) -> OperatorMatrix:
    """Trace out every part except i (marginal constant 1)."""
    if a.structure.num_parts < 2:
        raise ValueError("marginal needs at least 2 parts")
    return partial_trace(a, i)


def normalized_marginal(rho_p: OperatorMatrix, i: int) -> OperatorMatrix:
    """Single-part marginal of a trace-normalized reduced matrix, trace N."""
    meta = rho_p.norm_meta
    if meta is None:
        raise ValueError("normalized_marginal requires norm_meta on the input")
    if meta.p_order != rho_p.structure.num_parts:
        raise ValueError(
            f"norm_meta order {meta.p_order} does not match "
            f"{rho_p.structure.num_parts} parts"
        )
    expected = meta.expected_trace()
    actual = rho_p.trace()
    if abs(actual - expected) > 1e-6 * abs(expected):
        raise ValueError(
            f"trace {actual:.9g} does not match declared {expected:.9g}"
        )
    if meta.p_order == 1:
        return OperatorMatrix(structure=rho_p.structure, entries=rho_p.entries)
    if not 0 <= i < rho_p.structure.num_parts:
        raise ValueError(f"part index {i} out of range")
    reduced = partial_trace(rho_p, i)
    scale = 1.0 / math.perm(meta.n_particles - 1, meta.p_order - 1)
    return OperatorMatrix(structure=reduced.structure, entries=scale * reduced.entries)


def product_counterpart(a: OperatorMatrix) -> ProductFactorization:
    """Nonentangling counterpart: marginal factors, trace-matching prefactor."""
    tr = a.trace()
    scale = float(np.max(np.abs(a.entries))) if a.entries.size else 0.0
    if abs(tr) <= 1e-12 * max(1.0, scale):
        raise ValueError("zero-trace input has no trace-matching counterpart")

    p = a.structure.num_parts
    if a.norm_meta is not None:
        n = a.norm_meta.n_particles
        factors = tuple(normalized_marginal(a, i) for i in range(p))
        prefactor = math.perm(n, p) / n**p
        return ProductFactorization(prefactor=prefactor, factors=factors)

    if p == 1:
        return ProductFactorization(
            prefactor=1.0,
            factors=(OperatorMatrix(structure=a.structure, entries=a.entries),),
        )
    factors = tuple(marginal(a, i) for i in range(p))
    # every marginal keeps the full trace, so the product overcounts by tr^(p-1)
    prefactor = complex(tr) ** (1 - p)
    if abs(prefactor.imag) > 1e-12 * abs(prefactor.real):
        raise ValueError(f"non-real trace {tr:.6g} admits no real prefactor")
    return ProductFactorization(prefactor=float(prefactor.real), factors=factors)


def measure_report(
    a: OperatorMatrix,
    opts: OptimizerOptions | None = None,
    counterpart: ProductFactorization | None = None,
) -> MeasureReport:
    """epsilon(A) with both norm certificates; counterpart may be supplied."""
    fact = counterpart if counterpart is not None else product_counterpart(a)
    numerator = disentangled_norm(a, opts)
    denominator = disentangled_norm(fact.matrix(), opts)
    if not denominator.value > 0.0:
        raise ValueError("degenerate counterpart: its product-vector norm is 0")
    eps = math.log2(numerator.value / denominator.value)
    return MeasureReport(
        epsilon_bits=eps, numerator=numerator, denominator=denominator
    )


def entanglement_measure(
    a: OperatorMatrix, opts: OptimizerOptions | None = None
) -> float:
    """log2 of the norm ratio between A and its product counterpart, in bits."""
    return measure_report(a, opts).epsilon_bits


def reduced_density_measure(
    rho_p: OperatorMatrix, opts: OptimizerOptions | None = None
) -> float:
    """Fast path for trace-normalized reduced matrices.

    The counterpart norm of a positive product operator factorizes, so the
    denominator is evaluated as N!/((N-p)! N^p) times the product of the
    marginals' top eigenvalues instead of running the optimizer on the
    materialized product matrix.
    """
    meta = rho_p.norm_meta
    if meta is None:
        raise ValueError("reduced_density_measure requires norm_meta on the input")
    rho_p.require_hermitian()
    p = rho_p.structure.num_parts
    numerator = disentangled_norm(rho_p, opts).value
    denominator = math.perm(meta.n_particles, p) / meta.n_particles**p
    for i in range(p):
        lam = np.linalg.eigvalsh(normalized_marginal(rho_p, i).entries)
        denominator *= float(lam[-1])
    if not denominator > 0.0:
        raise ValueError("degenerate counterpart: its product-vector norm is 0")
    return math.log2(numerator / denominator)


def measure_bipartite_pure(psi: StateVector) -> float:
    """Closed form for pure bipartite states: -log2 of the top Schmidt weight."""
    if psi.structure.num_parts != 2:
        raise ValueError(
            f"bipartite closed form needs 2 parts, got {psi.structure.num_parts}"
        )
    psi.require_normalized()
    form = schmidt_decompose(psi)
    top = float(form.coefficients[0])
    return -math.log2(top * top)


def multimode_measure(populations: ModePopulations) -> float:
    """(1 - p) log2 of the top population; 0 for a single occupied mode."""
    w_max = min(max(populations.w), 1.0)
    return (1 - populations.p_order) * math.log2(w_max)


def multimode_density(populations: ModePopulations) -> OperatorMatrix:
    """Diagonal order-p reduced matrix of N particles spread over m modes.

    Entry N!/(N-p)! w_n sits at the product-basis index (n, ..., n); the
    trace is N!/(N-p)! as declared by the attached NormMeta.
    """
    m = populations.num_modes
    p = populations.p_order
    n_part = populations.n_particles
    meta = NormMeta(n_particles=n_part, p_order=p)
    dim = m**p
    ent = np.zeros((dim, dim), dtype=complex)
    stride = (dim - 1) // (m - 1) if m > 1 else 1  # 1 + m + ... + m^(p-1)
    full = meta.expected_trace()
    for n, w_n in enumerate(populations.w):
        ent[n * stride, n * stride] = full * w_n
    return OperatorMatrix(
        structure=CompositeStructure(dims=(m,) * p), entries=ent, norm_meta=meta
    )


def reduced_von_neumann_entropy(rho1: OperatorMatrix) -> float:
    """-sum lambda log2 lambda over the spectrum, with 0 log 0 = 0."""
    rho1.require_hermitian()
    tr = rho1.trace()
    if abs(tr - 1.0) > 1e-6:
        raise ValueError(f"entropy needs a unit-trace matrix, got trace {tr:.9g}")
    lam = np.linalg.eigvalsh(rho1.entries)
    if lam[0] < -1e-9:
        raise ValueError(f"negative eigenvalue {lam[0]:.3g} beyond tolerance")
    lam = np.clip(lam, 0.0, None)
    nonzero = lam[lam > 0.0]
    return float(-np.sum(nonzero * np.log2(nonzero)))


def report_document(report: MeasureReport) -> dict:
    """JSON-ready record of a measure evaluation."""

    def vectors(pv):
        return [[[float(z.real), float(z.imag)] for z in f] for f in pv.factors]

    def side(res: NormResult) -> dict:
        return {
            "value": res.value,
            "iterations": res.iterations,
            "converged": res.converged,
            "witness_left": vectors(res.witness_left),
            "witness_right": vectors(res.witness_right),
        }

    return {
        "epsilon_bits": report.epsilon_bits,
        "norm_numerator": report.norm_numerator,
        "norm_denominator": report.norm_denominator,
        "converged": report.converged,
        "numerator": side(report.numerator),
        "denominator": side(report.denominator),
    }
