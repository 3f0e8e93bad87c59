"""Step kernels and motif functionals: degrees, homomorphisms, cut norms."""

import numpy as np

from multigibbs import (
    StepKernel,
    cut_distance,
    cut_norm_exact,
    cut_norm_heuristic,
    degree_profile,
    hom_functional,
    is_regular,
    kernel_preset,
    lr_norm,
    motif_preset,
    vartheta_profile,
    weak_cut_distance_small,
)


def main():
    k3 = motif_preset("K3")
    k2 = motif_preset("K2")
    tri = kernel_preset("tripartite")
    bip = kernel_preset("bipartite", c=2.0)

    print("tripartite kernel, triangle motif")
    print("  degree profile:", degree_profile(k3, tri))
    print("  regular:", is_regular(k3, tri))
    f = np.array([-0.99, -0.99, 0.83])
    print("  G_W(f) for f =", f, "->", hom_functional(k3, tri, f))
    print("  local-field profile vartheta:", vartheta_profile(k3, tri, f))

    print("\nbipartite kernel, edge motif")
    print("  degree profile:", degree_profile(k2, bip))
    print("  L2 norm:", lr_norm(bip, 2.0))

    pm = StepKernel([0.5, 0.5], [[1.0, -1.0], [-1.0, 1.0]])
    print("\ncheckerboard kernel")
    print("  exact cut norm:", cut_norm_exact(pm))
    print("  heuristic lower bound:", cut_norm_heuristic(pm, restarts=8, seed=0))

    shifted = StepKernel(tri.masses, tri.values + 0.25)
    print("\ncut distance to a +0.25 shift:", cut_distance(tri, shifted))
    swapped = StepKernel([0.5, 0.5], [[0.4, 0.1], [0.1, 0.9]])
    relabeled = StepKernel([0.5, 0.5], [[0.9, 0.1], [0.1, 0.4]])
    print(
        "weak cut distance across a block relabeling:",
        weak_cut_distance_small(swapped, relabeled),
    )


if __name__ == "__main__":
    main()
