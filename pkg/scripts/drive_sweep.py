"""Sweep the pair couplings and summarize how far the measure swings.

For each grid point the three-mode system starts fully condensed, integrates
for a fixed horizon, and reports the peak and mean of the measure series plus
the worst constraint residual, one line per point.
"""

import argparse
import itertools

import numpy as np

from entnorm.bec_dynamics import (
    ModeParams,
    entanglement_series,
    init_from_amplitudes,
    integrate,
)


def run_point(b12, b23, t_end, samples, p_order):
    params = ModeParams(b12=b12, b23=b23)
    state0 = init_from_amplitudes([1.0, 0.0, 0.0], params)
    traj = entanglement_series(
        integrate(state0, params, t_end, sample_count=samples), p_order
    )
    return (
        float(np.max(traj.epsilon)),
        float(np.mean(traj.epsilon)),
        float(np.max(np.abs(traj.residuals))),
    )


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--b12", type=float, nargs="+", default=[0.25, 0.5, 1.0])
    parser.add_argument("--b23", type=float, nargs="+", default=[0.0, 0.5, 1.0])
    parser.add_argument("--t-end", type=float, default=40.0)
    parser.add_argument("--samples", type=int, default=201)
    parser.add_argument("--p-order", type=int, default=2)
    args = parser.parse_args()

    print(f"{'b12':>7} {'b23':>7} {'peak eps':>10} {'mean eps':>10} {'residual':>10}")
    for b12, b23 in itertools.product(args.b12, args.b23):
        peak, mean, residual = run_point(
            b12, b23, args.t_end, args.samples, args.p_order
        )
        print(f"{b12:7.3f} {b23:7.3f} {peak:10.6f} {mean:10.6f} {residual:10.3e}")


if __name__ == "__main__":
    main()
