"""Three-mode resonant-coupling dynamics with monitored algebraic constraints.

State: fractional mode populations w1, w2, w3 and ladder variables h1, h2,
h3 (complex). The evolution couples neighboring modes through external field
amplitudes b12, b23, interaction amplitudes alpha[m, n], and detunings
delta21, delta32. Five algebraic relations tie the nine real coordinates
together:

    w1 + w2 + w3 = 1
    |h1|^2 = 4 w1 w2,  |h2|^2 = 4 w2 w3,  |h3|^2 = 4 w3 w1
    h1 h2 = 2 w2 h3

They are conserved by the flow but not enforced during integration; their
residuals are recorded per sample as an accuracy gauge. The measure series
is the multimode closed form (1 - p) log2 max_n w_n(t) over three modes.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass

import numpy as np

from .rk import IntegrationError, StepControl, integrate_sampled

__all__ = [
    "ModeParams",
    "DynState",
    "IntegratorOptions",
    "Trajectory",
    "init_from_amplitudes",
    "rhs",
    "rhs_raw",
    "integrate",
    "entanglement_series",
    "write_trajectory_csv",
    "CSV_HEADER",
]

CSV_HEADER = (
    "t,w1,w2,w3,re_h1,im_h1,re_h2,im_h2,re_h3,im_h3,"
    "res_sum,res_h1,res_h2,res_h3,res_ladder,epsilon"
)

_POPULATION_FLOOR = -1e-9


@dataclass(frozen=True, eq=False)
class ModeParams:
    """Couplings in frequency units; gamma are initial phases in radians.

    alpha[m, n] is the interaction transition amplitude between modes m and
    n (0-based); diagonal entries are unused.
    """

    b12: float = 0.0
    b23: float = 0.0
    alpha: np.ndarray = None
    delta21: float = 0.0
    delta32: float = 0.0
    gamma12: float = 0.0
    gamma23: float = 0.0

    def __post_init__(self):
        alpha = np.zeros((3, 3)) if self.alpha is None else np.array(
            self.alpha, dtype=float
        )
        if alpha.shape != (3, 3):
            raise ValueError(f"alpha must be 3x3, got {alpha.shape}")
        alpha.setflags(write=False)
        object.__setattr__(self, "alpha", alpha)
        scalars = (self.b12, self.b23, self.delta21, self.delta32,
                   self.gamma12, self.gamma23)
        if not all(math.isfinite(x) for x in scalars) or not np.all(
            np.isfinite(alpha)
        ):
            raise ValueError("parameters must be finite")


@dataclass(frozen=True)
class DynState:
    w1: float
    w2: float
    w3: float
    h1: complex
    h2: complex
    h3: complex

    def to_array(self) -> np.ndarray:
        return np.array(
            [
                self.w1, self.w2, self.w3,
                self.h1.real, self.h1.imag,
                self.h2.real, self.h2.imag,
                self.h3.real, self.h3.imag,
            ]
        )

    @classmethod
    def from_array(cls, y: np.ndarray) -> "DynState":
        y = np.asarray(y, dtype=float)
        if y.shape != (9,):
            raise ValueError(f"state array must have 9 entries, got {y.shape}")
        return cls(
            w1=float(y[0]), w2=float(y[1]), w3=float(y[2]),
            h1=complex(y[3], y[4]), h2=complex(y[5], y[6]), h3=complex(y[7], y[8]),
        )

    def constraint_residuals(self) -> np.ndarray:
        """(sum - 1, |h1|^2 - 4w1w2, |h2|^2 - 4w2w3, |h3|^2 - 4w3w1, |ladder|)."""
        return np.array(
            [
                self.w1 + self.w2 + self.w3 - 1.0,
                abs(self.h1) ** 2 - 4.0 * self.w1 * self.w2,
                abs(self.h2) ** 2 - 4.0 * self.w2 * self.w3,
                abs(self.h3) ** 2 - 4.0 * self.w3 * self.w1,
                abs(self.h1 * self.h2 - 2.0 * self.w2 * self.h3),
            ]
        )

    def constraint_jacobian(self) -> np.ndarray:
        """Jacobian of the six real constraint components (ladder split into
        real and imaginary parts) with respect to the nine real coordinates."""
        a1, b1 = self.h1.real, self.h1.imag
        a2, b2 = self.h2.real, self.h2.imag
        a3, b3 = self.h3.real, self.h3.imag
        w1, w2, w3 = self.w1, self.w2, self.w3
        jac = np.zeros((6, 9))
        jac[0, 0:3] = 1.0
        jac[1] = [-4 * w2, -4 * w1, 0, 2 * a1, 2 * b1, 0, 0, 0, 0]
        jac[2] = [0, -4 * w3, -4 * w2, 0, 0, 2 * a2, 2 * b2, 0, 0]
        jac[3] = [-4 * w3, 0, -4 * w1, 0, 0, 0, 0, 2 * a3, 2 * b3]
        # Re/Im of h1 h2 - 2 w2 h3
        jac[4] = [0, -2 * a3, 0, a2, -b2, a1, -b1, -2 * w2, 0]
        jac[5] = [0, -2 * b3, 0, b2, a2, b1, a1, 0, -2 * w2]
        return jac


@dataclass(frozen=True)
class IntegratorOptions:
    rel_tol: float = 1e-10
    abs_tol: float = 1e-12
    max_step: float = math.inf
    renormalize_populations: bool = False
    residual_abort: float | None = 1e-3


@dataclass(frozen=True)
class Trajectory:
    """Sampled run: times strictly increasing, one 9-coordinate row each."""

    times: np.ndarray
    states: np.ndarray
    residuals: np.ndarray
    epsilon: np.ndarray | None = None
    p_order: int | None = None

    def state_at(self, index: int) -> DynState:
        return DynState.from_array(self.states[index])

    def __len__(self) -> int:
        return int(self.times.size)


def init_from_amplitudes(c, params: ModeParams) -> DynState:
    """State at t = 0 from three mode amplitudes; phases come from params."""
    c = np.asarray(c, dtype=complex)
    if c.shape != (3,):
        raise ValueError("need exactly 3 amplitudes")
    total = float(np.sum(np.abs(c) ** 2))
    if abs(total - 1.0) > 1e-12:
        raise ValueError(f"amplitudes must be normalized, got sum {total:.12g}")
    g12 = complex(math.cos(params.gamma12), math.sin(params.gamma12))
    g23 = complex(math.cos(params.gamma23), math.sin(params.gamma23))
    c1, c2, c3 = complex(c[0]), complex(c[1]), complex(c[2])
    return DynState(
        w1=abs(c1) ** 2,
        w2=abs(c2) ** 2,
        w3=abs(c3) ** 2,
        h1=2.0 * c1.conjugate() * c2 * g12,
        h2=2.0 * c2.conjugate() * c3 * g23,
        h3=2.0 * c1.conjugate() * c3 * g12 * g23,
    )


def rhs_raw(state: DynState, params: ModeParams):
    """Time derivatives with the population slots kept complex.

    The population derivatives are (i/4) b (h* - h) combinations whose
    imaginary parts vanish identically; they are returned unprojected so the
    identity can be checked.
    """
    al = params.alpha
    b12, b23 = params.b12, params.b23
    d21, d32 = params.delta21, params.delta32
    w1, w2, w3 = state.w1, state.w2, state.w3
    h1, h2, h3 = state.h1, state.h2, state.h3

    dw1 = 0.25j * b12 * (h1.conjugate() - h1)
    dw2 = 0.25j * b23 * (h2.conjugate() - h2) - 0.25j * b12 * (h1.conjugate() - h1)
    dw3 = -0.25j * b23 * (h2.conjugate() - h2)

    dh1 = (
        1j * h1 * (al[0, 1] * w2 - al[1, 0] * w1 + (al[0, 2] - al[1, 2]) * w3 + d21)
        + 1j * b12 * (w2 - w1)
        - 0.5j * b23 * h3
    )
    dh2 = (
        1j * h2 * (al[1, 2] * w3 - al[2, 1] * w2 + (al[1, 0] - al[2, 0]) * w1 + d32)
        + 1j * b23 * (w3 - w2)
        + 0.5j * b12 * h3
    )
    dh3 = (
        1j * h3 * (al[0, 2] * w3 - al[2, 0] * w1 + (al[0, 1] - al[2, 1]) * w2
                   + d32 + d21)
        + 0.5j * b12 * h2
        - 0.5j * b23 * h1
    )
    return dw1, dw2, dw3, dh1, dh2, dh3


def rhs(state: DynState, params: ModeParams) -> DynState:
    """d/dt of the state under the three-mode equations."""
    dw1, dw2, dw3, dh1, dh2, dh3 = rhs_raw(state, params)
    return DynState(
        w1=dw1.real, w2=dw2.real, w3=dw3.real, h1=dh1, h2=dh2, h3=dh3
    )


def _array_rhs(params: ModeParams):
    """Flat real-coordinate version of the vector field for the integrator."""
    al = params.alpha
    a01, a10 = al[0, 1], al[1, 0]
    a12, a21 = al[1, 2], al[2, 1]
    a02, a20 = al[0, 2], al[2, 0]
    b12, b23 = params.b12, params.b23
    d21, d32 = params.delta21, params.delta32

    def deriv(t, y):
        w1, w2, w3 = y[0], y[1], y[2]
        h1 = complex(y[3], y[4])
        h2 = complex(y[5], y[6])
        h3 = complex(y[7], y[8])
        dw1 = 0.5 * b12 * h1.imag
        dw2 = 0.5 * b23 * h2.imag - 0.5 * b12 * h1.imag
        dw3 = -0.5 * b23 * h2.imag
        dh1 = (
            1j * h1 * (a01 * w2 - a10 * w1 + (a02 - a12) * w3 + d21)
            + 1j * b12 * (w2 - w1)
            - 0.5j * b23 * h3
        )
        dh2 = (
            1j * h2 * (a12 * w3 - a21 * w2 + (a10 - a20) * w1 + d32)
            + 1j * b23 * (w3 - w2)
            + 0.5j * b12 * h3
        )
        dh3 = (
            1j * h3 * (a02 * w3 - a20 * w1 + (a01 - a21) * w2 + d32 + d21)
            + 0.5j * b12 * h2
            - 0.5j * b23 * h1
        )
        return np.array(
            [
                dw1, dw2, dw3,
                dh1.real, dh1.imag, dh2.real, dh2.imag, dh3.real, dh3.imag,
            ]
        )

    return deriv


def _residual_rows(states: np.ndarray) -> np.ndarray:
    w1, w2, w3 = states[:, 0], states[:, 1], states[:, 2]
    h1 = states[:, 3] + 1j * states[:, 4]
    h2 = states[:, 5] + 1j * states[:, 6]
    h3 = states[:, 7] + 1j * states[:, 8]
    return np.column_stack(
        [
            w1 + w2 + w3 - 1.0,
            np.abs(h1) ** 2 - 4.0 * w1 * w2,
            np.abs(h2) ** 2 - 4.0 * w2 * w3,
            np.abs(h3) ** 2 - 4.0 * w3 * w1,
            np.abs(h1 * h2 - 2.0 * w2 * h3),
        ]
    )


def integrate(
    state0: DynState,
    params: ModeParams,
    t_end: float,
    opts: IntegratorOptions | None = None,
    sample_count: int = 201,
) -> Trajectory:
    """Run from t = 0 to t_end > 0, sampling on a uniform grid.

    The initial state must satisfy the constraints to 1e-9. Residuals are
    evaluated at every sample; if any exceeds ``opts.residual_abort`` the
    run is abandoned with the offending time reported.
    """
    opts = opts or IntegratorOptions()
    if not t_end > 0:
        raise ValueError("t_end must be positive")
    if sample_count < 2:
        raise ValueError("sample_count must be at least 2")
    start_res = float(np.max(np.abs(state0.constraint_residuals())))
    if start_res > 1e-9:
        raise ValueError(
            f"initial state violates constraints (residual {start_res:.3g})"
        )

    post_step = None
    if opts.renormalize_populations:

        def post_step(t, y):
            total = y[0] + y[1] + y[2]
            if total <= 0:
                return None
            fixed = y.copy()
            fixed[:3] /= total
            return fixed

    times = np.linspace(0.0, float(t_end), sample_count)
    control = StepControl(
        rel_tol=opts.rel_tol, abs_tol=opts.abs_tol, max_step=opts.max_step
    )
    result = integrate_sampled(
        _array_rhs(params), state0.to_array(), times, control, post_step
    )
    residuals = _residual_rows(result.states)
    if opts.residual_abort is not None:
        worst = np.max(np.abs(residuals), axis=1)
        bad = np.nonzero(worst > opts.residual_abort)[0]
        if bad.size:
            raise IntegrationError(
                f"constraint residual {worst[bad[0]]:.3g} exceeds the abort "
                f"threshold {opts.residual_abort:.3g}",
                float(times[bad[0]]),
            )
    return Trajectory(times=times, states=result.states, residuals=residuals)


def entanglement_series(traj: Trajectory, p_order: int) -> Trajectory:
    """Fill the measure column: (1 - p) log2 of the top population per sample.

    Populations are clamped to [0, 1] first; anything below -1e-9 means the
    run left the physical region and is an error, not a clamp.
    """
    if p_order < 1:
        raise ValueError("p_order must be >= 1")
    w = traj.states[:, :3]
    low = float(w.min())
    if low < _POPULATION_FLOOR:
        raise ValueError(
            f"population {low:.3g} is below the clamp floor {_POPULATION_FLOOR:g}"
        )
    w_max = np.clip(w, 0.0, 1.0).max(axis=1)
    # + 0.0 turns the -0.0 produced at w_max == 1 into a plain zero
    eps = (1 - p_order) * np.log2(w_max) + 0.0
    return dataclasses.replace(traj, epsilon=eps, p_order=p_order)


def write_trajectory_csv(traj: Trajectory, stream) -> None:
    """Emit the documented CSV layout with 17-significant-digit floats."""
    if traj.epsilon is None:
        raise ValueError("trajectory has no measure series; fill it first")
    stream.write(CSV_HEADER + "\n")
    for i in range(len(traj)):
        row = np.concatenate(
            [[traj.times[i]], traj.states[i], traj.residuals[i], [traj.epsilon[i]]]
        )
        stream.write(",".join(f"{x:.17g}" for x in row) + "\n")
