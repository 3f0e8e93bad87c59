"""Replica symmetry and its two failure modes.

With a regular, strictly positive kernel, positive temperature, and a
suitable base measure, every free-energy optimizer is a constant profile.
This script shows the symmetric case and then breaks each hypothesis in
turn: a negatively tilted base measure on the tripartite kernel, and a
negative temperature on the bipartite kernel.
"""

import math

import numpy as np

from multigibbs import (
    BaseMeasure,
    MultistartSpec,
    ising_pm1,
    kernel_preset,
    motif_preset,
    replica_symmetry_verdict,
)


def report(label, verdict):
    print(f"\n== {label}")
    print("  verdict:", verdict.verdict)
    print("  best constant objective:   ", f"{verdict.best_constant:.6f}")
    if math.isfinite(verdict.best_nonconstant):
        print("  best non-constant objective:", f"{verdict.best_nonconstant:.6f}")
    print("  sufficient conditions:", verdict.sufficient_conditions)
    best = verdict.report.optimizers[0]
    print("  best profile:", np.round(best.values, 6), f"residual {verdict.report.residuals[0]:.1e}")


def main():
    k2, k3 = motif_preset("K2"), motif_preset("K3")
    one = kernel_preset("complete")

    report(
        "Curie-Weiss, theta = 1 (all hypotheses hold)",
        replica_symmetry_verdict(k2, one, ising_pm1(), 1.0, 0.0, MultistartSpec(n_random=16)),
    )

    w = math.exp(-4.0) / (math.exp(-4.0) + math.exp(4.0))
    mu_neg = BaseMeasure([-1.0, 1.0], [1.0 - w, w])
    report(
        "tripartite kernel, triangle motif, negatively tilted measure, theta = 9",
        replica_symmetry_verdict(
            k3, kernel_preset("tripartite"), mu_neg, 9.0, 0.0,
            MultistartSpec(n_random=48, seed=7),
        ),
    )

    report(
        "bipartite kernel, theta = -5 (antiferromagnet)",
        replica_symmetry_verdict(
            k2, kernel_preset("bipartite", c=2.0), ising_pm1(), -5.0, 0.0,
            MultistartSpec(n_random=16, seed=11),
        ),
    )


if __name__ == "__main__":
    main()
