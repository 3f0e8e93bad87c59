"""Glauber chains against their predicted limits.

Validates the sampler against the exact stationary law at tiny n, then runs
desk-scale chains and measures how the empirical local-field cloud
approaches its predicted limit set as n grows.
"""

import numpy as np

from multigibbs import (
    CouplingMatrix,
    ModelSpec,
    MultistartSpec,
    build_limit_sets,
    distance_to_set,
    empirical_of_fields,
    exact_glauber_stationarity,
    ising_pm1,
    kernel_preset,
    motif_preset,
    sample_chain,
    solve_free_energy,
)
from multigibbs.sampler import conditional_means
from multigibbs.empirics import lp_profile_distance

THETA = 1.0


def main():
    mu = ising_pm1()
    k2 = motif_preset("K2")
    one = kernel_preset("complete")

    spec3 = ModelSpec(k2, mu, THETA, CouplingMatrix(1.0 - np.eye(3)))
    print("exact stationarity gap at n=3:", exact_glauber_stationarity(spec3))

    rep = solve_free_energy(k2, one, mu, THETA, 0.0, MultistartSpec(n_random=8))
    sets = build_limit_sets(rep.optimizers, k2, one, mu, THETA)
    t_star = max(abs(float(p.values[0])) for p in rep.optimizers)
    print(f"predicted |X-bar| limit {t_star:.6f}, hamiltonian limit {2*t_star**2:.6f}")

    print(f"\n{'n':>6} {'|X-bar|':>10} {'ham':>10} {'field dist':>11} {'lp dist':>10}")
    for n in (250, 500, 1000, 2000):
        spec = ModelSpec(k2, mu, THETA, one, n=n)
        tr = sample_chain(
            spec, sweeps=900, burn_in=300, thin=4, seed=1,
            stats=("abs_mag", "ham"), snapshots=True, snapshot_stride=30,
        )
        dists, lps = [], []
        for _, m in tr.snapshots:
            dists.append(distance_to_set(empirical_of_fields(m), sets.field_laws, seed=1))
            lps.append(lp_profile_distance(conditional_means(spec, m), rep.optimizers, 1.0))
        print(
            f"{n:6d} {tr.summary['abs_mag'][0]:10.5f} {tr.summary['ham'][0]:10.5f}"
            f" {np.mean(dists):11.5f} {np.mean(lps):10.5f}"
        )
    print("(field dist = truncated-l1 matching distance to the limit set; decreasing in n)")


if __name__ == "__main__":
    main()
