"""Seeded property-verification suites over the norm, measure, and dynamics
layers.

Each suite draws reproducible random cases, checks one documented property at
its stated tolerance, and reports a per-case failure count plus the worst
excess over tolerance (negative excess means the suite passed with margin).
The semipositivity suite reports observed violations instead of asserting the
property away: the measure is genuinely negative on a small fraction of random
bipartite density matrices, so a sufficiently large ensemble fails honestly.
"""

import dataclasses
import math

import numpy as np

from .bec_dynamics import (
    DynState,
    ModeParams,
    init_from_amplitudes,
    integrate,
    rhs_raw,
)
from .disentangled_norm import (
    brute_force_disentangled_norm,
    disentangled_norm,
    hilbert_norm,
)
from .entanglement_measure import (
    ModePopulations,
    entanglement_measure,
    measure_report,
    multimode_density,
    multimode_measure,
)
from .tensor_core import CompositeStructure, OperatorMatrix, tensor_product

SEMIPOSITIVITY_TOL = 1e-6
_MAX_NOTES = 20


@dataclasses.dataclass(frozen=True)
class SuiteResult:
    """Outcome of one property suite."""

    name: str
    cases: int
    failures: int
    worst_excess: float
    notes: tuple = ()

    @property
    def passed(self) -> bool:
        return self.failures == 0


@dataclasses.dataclass(frozen=True)
class VerifyReport:
    suites: tuple
    seed: int
    cases: int

    @property
    def passed(self) -> bool:
        return all(s.passed for s in self.suites)

    @property
    def failing(self) -> tuple:
        return tuple(s.name for s in self.suites if not s.passed)

    def to_document(self) -> dict:
        return {
            "passed": self.passed,
            "seed": self.seed,
            "cases": self.cases,
            "suites": [
                {
                    "name": s.name,
                    "cases": s.cases,
                    "failures": s.failures,
                    "worst_excess": s.worst_excess,
                    "notes": list(s.notes),
                }
                for s in self.suites
            ],
        }


def _complex_gaussian(rng, shape):
    return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)


def _random_density(rng, dims):
    d = int(np.prod(dims))
    g = _complex_gaussian(rng, (d, d))
    rho = g @ g.conj().T
    rho /= np.trace(rho).real
    return OperatorMatrix(CompositeStructure(dims), rho)


def _random_hermitian(rng, dims):
    d = int(np.prod(dims))
    g = _complex_gaussian(rng, (d, d))
    return OperatorMatrix(CompositeStructure(dims), (g + g.conj().T) / 2)


def _random_unitary(rng, d):
    q, r = np.linalg.qr(_complex_gaussian(rng, (d, d)))
    return q * (np.diag(r) / np.abs(np.diag(r)))


def _collect(name, excesses, notes):
    failures = sum(1 for e in excesses if e > 0)
    worst = max(excesses) if excesses else -math.inf
    return SuiteResult(name, len(excesses), failures, float(worst), tuple(notes))


def suite_semipositivity(cases, seed, corrupt=False):
    """Measure of random bipartite density matrices stays above -1e-6.

    The case stream is a fixed function of the seed, so violations are
    reproducible. `corrupt` halves the numerator norm before taking the
    ratio; it exists so harness self-tests can confirm a genuine failure
    is surfaced and named.
    """
    rng = np.random.default_rng(seed)
    excesses = []
    notes = []
    for k in range(cases):
        dims = tuple(int(x) for x in rng.integers(2, 5, size=2))
        a = _random_density(rng, dims)
        report = measure_report(a)
        eps = report.epsilon_bits
        if corrupt:
            eps = math.log2(0.5 * report.norm_numerator / report.norm_denominator)
        excesses.append(-SEMIPOSITIVITY_TOL - eps)
        if eps < -SEMIPOSITIVITY_TOL and len(notes) < _MAX_NOTES:
            notes.append(f"case {k}: dims {dims} epsilon {eps:.6f}")
    if corrupt:
        notes.append("numerator corruption hook active")
    return _collect("semipositivity", excesses, notes)


def suite_nonentangling(cases, seed):
    """Product operators with equal unit-trace marginals measure zero."""
    rng = np.random.default_rng([seed, 1])
    excesses = []
    notes = []
    for k in range(cases):
        d = int(rng.integers(2, 5))
        part = _random_density(rng, (d,))
        a = tensor_product(part, part)
        eps = entanglement_measure(a)
        excesses.append(abs(eps) - 1e-6)
        if excesses[-1] > 0 and len(notes) < _MAX_NOTES:
            notes.append(f"case {k}: dims ({d},{d}) epsilon {eps:.3e}")
    return _collect("nonentangling", excesses, notes)


def suite_additivity(cases, seed):
    """Measure adds across tensor products of diagonal multimode matrices."""
    rng = np.random.default_rng([seed, 2])
    excesses = []
    notes = []
    for k in range(cases):
        w_a = rng.dirichlet(np.ones(int(rng.integers(2, 4))))
        w_b = rng.dirichlet(np.ones(int(rng.integers(2, 4))))
        rho_a = multimode_density(ModePopulations(tuple(w_a), 2, 50))
        rho_b = multimode_density(ModePopulations(tuple(w_b), 2, 80))
        joint = tensor_product(rho_a, rho_b)
        gap = abs(
            entanglement_measure(joint)
            - entanglement_measure(rho_a)
            - entanglement_measure(rho_b)
        )
        excesses.append(gap - 1e-6)
        if excesses[-1] > 0 and len(notes) < _MAX_NOTES:
            notes.append(f"case {k}: additivity gap {gap:.3e}")
    return _collect("additivity", excesses, notes)


def suite_local_unitary(cases, seed):
    """Measure is invariant under part-local unitary conjugation."""
    rng = np.random.default_rng([seed, 3])
    excesses = []
    notes = []
    for k in range(cases):
        dims = tuple(int(x) for x in rng.integers(2, 4, size=2))
        a = _random_density(rng, dims)
        u = np.kron(_random_unitary(rng, dims[0]), _random_unitary(rng, dims[1]))
        rotated = OperatorMatrix(a.structure, u.conj().T @ a.entries @ u)
        gap = abs(entanglement_measure(rotated) - entanglement_measure(a))
        excesses.append(gap - 1e-5)
        if excesses[-1] > 0 and len(notes) < _MAX_NOTES:
            notes.append(f"case {k}: dims {dims} drift {gap:.3e}")
    return _collect("local_unitary", excesses, notes)


def suite_mixed_combination(cases, seed):
    """Mixtures of product operators with matched factor norms measure zero."""
    rng = np.random.default_rng([seed, 4])
    excesses = []
    notes = []
    for k in range(cases):
        left = _random_density(rng, (3,))
        c1 = np.diag(rng.dirichlet(np.ones(2))).astype(complex)
        u = _random_unitary(rng, 2)
        c2 = u @ c1 @ u.conj().T
        weight = float(rng.uniform(0.2, 0.8))
        mix = weight * np.kron(left.entries, c1) + (1 - weight) * np.kron(
            left.entries, c2
        )
        eps = entanglement_measure(OperatorMatrix(CompositeStructure((3, 2)), mix))
        excesses.append(abs(eps) - 1e-6)
        if excesses[-1] > 0 and len(notes) < _MAX_NOTES:
            notes.append(f"case {k}: epsilon {eps:.3e}")
    return _collect("mixed_combination", excesses, notes)


def suite_continuity(cases, seed):
    """Mode-population measure moves at most (p-1)/(w_max ln 2) per unit
    perturbation of the populations."""
    rng = np.random.default_rng([seed, 5])
    delta = 1e-6
    excesses = []
    notes = []
    for k in range(cases):
        m = int(rng.integers(3, 6))
        p = int(rng.integers(2, 4))
        w = rng.dirichlet(np.ones(m))
        order = np.argsort(w)
        if w[order[-1]] - w[order[-2]] < 10 * delta:
            w[order[-1]] += 0.05
            w /= w.sum()
        base = multimode_measure(ModePopulations(tuple(w), p, 100))
        bound = 1.01 * (p - 1) / (float(np.max(w)) * math.log(2)) * delta
        worst_gap = 0.0
        for idx, sign in ((int(np.argmax(w)), 1.0), (int(np.argmax(w)), -1.0), (0, 1.0)):
            bump = np.array(w)
            bump[idx] += sign * delta
            bump /= bump.sum()
            moved = multimode_measure(ModePopulations(tuple(bump), p, 100))
            worst_gap = max(worst_gap, abs(moved - base))
        excesses.append(worst_gap - bound)
        if excesses[-1] > 0 and len(notes) < _MAX_NOTES:
            notes.append(f"case {k}: moved {worst_gap:.3e} bound {bound:.3e}")
    return _collect("continuity", excesses, notes)


def suite_norm_dominance(cases, seed):
    """Product-vector norm never exceeds the full operator norm."""
    rng = np.random.default_rng([seed, 6])
    excesses = []
    notes = []
    for k in range(cases):
        parts = 2 if k % 3 else 3
        dims = tuple(int(x) for x in rng.integers(2, 4, size=parts))
        a = _random_hermitian(rng, dims)
        gap = disentangled_norm(a).value - hilbert_norm(a)
        excesses.append(gap - 1e-9)
        if excesses[-1] > 0 and len(notes) < _MAX_NOTES:
            notes.append(f"case {k}: dims {dims} excess {gap:.3e}")
    return _collect("norm_dominance", excesses, notes)


def suite_norm_scaling(cases, seed):
    """Positive rescaling of the operator rescales the norm exactly."""
    rng = np.random.default_rng([seed, 7])
    lam = 3.7
    excesses = []
    notes = []
    for k in range(cases):
        dims = tuple(int(x) for x in rng.integers(2, 4, size=2))
        a = _random_density(rng, dims)
        scaled = OperatorMatrix(a.structure, lam * a.entries)
        base = disentangled_norm(a).value
        gap = abs(disentangled_norm(scaled).value - lam * base)
        excesses.append(gap - 1e-9 * lam * base)
        if excesses[-1] > 0 and len(notes) < _MAX_NOTES:
            notes.append(f"case {k}: scaling gap {gap:.3e}")
    return _collect("norm_scaling", excesses, notes)


def suite_norm_multiplicativity(cases, seed):
    """Norm of a tensor product factors into largest singular values."""
    rng = np.random.default_rng([seed, 8])
    excesses = []
    notes = []
    for k in range(cases):
        d1 = int(rng.integers(2, 4))
        d2 = int(rng.integers(2, 4))
        r1 = _random_density(rng, (d1,))
        r2 = _random_density(rng, (d2,))
        a = tensor_product(r1, r2)
        target = hilbert_norm(r1) * hilbert_norm(r2)
        gap = abs(disentangled_norm(a).value - target)
        excesses.append(gap - 1e-6)
        if excesses[-1] > 0 and len(notes) < _MAX_NOTES:
            notes.append(f"case {k}: multiplicativity gap {gap:.3e}")
    return _collect("norm_multiplicativity", excesses, notes)


def suite_oracle_agreement(cases, seed):
    """Optimizer matches the exact diagonal value and clears the grid oracle."""
    rng = np.random.default_rng([seed, 9])
    excesses = []
    notes = []
    for k in range(cases):
        m = int(rng.integers(2, 5))
        p = int(rng.integers(2, 4))
        if m**p > 64:
            m, p = 4, 2
        diag = rng.uniform(-1, 1, m**p)
        a = OperatorMatrix(CompositeStructure((m,) * p), np.diag(diag).astype(complex))
        gap = abs(disentangled_norm(a).value - float(np.max(np.abs(diag))))
        excesses.append(gap - 1e-8)
        if excesses[-1] > 0 and len(notes) < _MAX_NOTES:
            notes.append(f"case {k}: diagonal gap {gap:.3e}")
    for k in range(min(cases, 3)):
        d2 = int(rng.integers(2, 5))
        a = OperatorMatrix(
            CompositeStructure((2, d2)), rng.standard_normal((2 * d2, 2 * d2))
        )
        shortfall = brute_force_disentangled_norm(a) - 1e-3 - disentangled_norm(a).value
        excesses.append(shortfall)
        if shortfall > 0 and len(notes) < _MAX_NOTES:
            notes.append(f"grid case {k}: optimizer short by {shortfall:.3e}")
    return _collect("oracle_agreement", excesses, notes)


def suite_dynamics(cases, seed):
    """Short-horizon transport, time reversal, constraint-surface rank, and
    population-sum identities of the three-mode equations."""
    rng = np.random.default_rng([seed, 10])
    excesses = []
    notes = []

    def note(tag, value):
        if len(notes) < _MAX_NOTES:
            notes.append(f"{tag}: excess {value:.3e}")

    for k in range(cases):
        c = _complex_gaussian(rng, 3)
        c /= np.linalg.norm(c)
        params = ModeParams(
            b12=float(rng.uniform(-1, 1)),
            b23=float(rng.uniform(-1, 1)),
            alpha=rng.uniform(-1, 1, (3, 3)),
            delta21=float(rng.uniform(-1, 1)),
            delta32=float(rng.uniform(-1, 1)),
            gamma12=float(rng.uniform(0, 6)),
            gamma23=float(rng.uniform(0, 6)),
        )
        s0 = init_from_amplitudes(c, params)

        traj = integrate(s0, params, 50.0, sample_count=51)
        sum_excess = float(np.max(np.abs(traj.residuals[:, 0]))) - 1e-9
        ladder_excess = float(np.max(np.abs(traj.residuals[:, 1:]))) - 1e-6
        excesses.append(sum_excess)
        excesses.append(ladder_excess)
        if sum_excess > 0:
            note(f"case {k} population sum", sum_excess)
        if ladder_excess > 0:
            note(f"case {k} ladder residual", ladder_excess)

        mirrored = ModeParams(
            b12=-params.b12,
            b23=-params.b23,
            alpha=-params.alpha,
            delta21=-params.delta21,
            delta32=-params.delta32,
        )
        back = integrate(traj.state_at(-1), mirrored, 50.0, sample_count=51)
        rev_excess = float(np.max(np.abs(back.states[-1] - s0.to_array()))) - 1e-6
        excesses.append(rev_excess)
        if rev_excess > 0:
            note(f"case {k} time reversal", rev_excess)

        sing = np.linalg.svd(s0.constraint_jacobian(), compute_uv=False)
        rank_excess = max(1e-8 - float(sing[4]), float(sing[5]) - 1e-8)
        excesses.append(rank_excess)
        if rank_excess > 0:
            note(f"case {k} constraint rank", rank_excess)

        probe = DynState.from_array(rng.uniform(-1, 1, 9))
        dw1, dw2, dw3, _, _, _ = rhs_raw(probe, params)
        identity_excess = max(
            abs(dw1 + dw2 + dw3),
            abs(dw1.imag),
            abs(dw2.imag),
            abs(dw3.imag),
        ) - 1e-14
        excesses.append(identity_excess)
        if identity_excess > 0:
            note(f"case {k} population identities", identity_excess)
    return _collect("dynamics", excesses, notes)


def run_property_suites(cases=200, seed=0, corrupt_semipositivity=False):
    """Run every suite and aggregate a report.

    `cases` sets the semipositivity ensemble size; the remaining suites use
    a fixed fraction with a floor so small requests stay meaningful.
    """
    if cases < 1:
        raise ValueError("cases must be at least 1")
    small = max(5, cases // 20)
    suites = (
        suite_semipositivity(cases, seed, corrupt_semipositivity),
        suite_nonentangling(small, seed),
        suite_additivity(small, seed),
        suite_local_unitary(small, seed),
        suite_mixed_combination(small, seed),
        suite_continuity(small, seed),
        suite_norm_dominance(small, seed),
        suite_norm_scaling(small, seed),
        suite_norm_multiplicativity(small, seed),
        suite_oracle_agreement(small, seed),
        suite_dynamics(3, seed),
    )
    return VerifyReport(suites=suites, seed=seed, cases=cases)
