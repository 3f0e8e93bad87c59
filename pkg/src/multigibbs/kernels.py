"""Motif graphs, step kernels, and their multilinear functionals.

The interaction geometry of the model is the pair (H, W): a finite simple
graph H on v >= 2 vertices and a symmetric step function W on [0,1]^2 with
k blocks of arbitrary masses.  This module computes

- ``sym_eval`` / ``sym_tensor``: the permutation-symmetrized edge product,
- ``degree_profile``: its (v-1)-fold average in one coordinate (constant
  degree profile = "regular" kernel),
- ``hom_functional``: the homomorphism-type functional G_W(f) of a step
  profile f,
- ``vartheta_profile``: the local-field profile, i.e. the functional
  derivative of G_W,
- cut norms and (weak) cut distances between step kernels,
- embeddings between finite coupling matrices and step kernels.

All tuple sums are exact nested contractions over blocks; sizes are guarded
by ``k**v <= 1e7``.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "MotifGraph",
    "StepKernel",
    "CouplingMatrix",
    "motif_preset",
    "kernel_preset",
    "sym_eval",
    "sym_tensor",
    "degree_profile",
    "is_regular",
    "hom_functional",
    "vartheta_profile",
    "lr_norm",
    "cut_norm_exact",
    "cut_norm_heuristic",
    "refine",
    "cut_distance",
    "weak_cut_distance_small",
    "matrix_to_kernel",
    "blow_up",
    "block_assignment",
    "er_quenched",
]

MAX_TUPLE_GRID = 10**7  # cap on k**v for exact block contractions


class MotifGraph:
    """Finite simple graph with 1-based vertex labels, the interaction motif."""

    def __init__(self, v: int, edges):
        v = int(v)
        if v < 2:
            raise ValueError("motif needs at least 2 vertices")
        if v > 6:
            raise ValueError("motif size v > 6 unsupported")
        seen = set()
        norm = []
        for a, b in edges:
            a, b = int(a), int(b)
            if a == b:
                raise ValueError("motif must be a simple graph (no loops)")
            if not (1 <= a <= v and 1 <= b <= v):
                raise ValueError(f"edge ({a},{b}) outside vertex range 1..{v}")
            key = (min(a, b), max(a, b))
            if key in seen:
                raise ValueError(f"duplicate edge {key}")
            seen.add(key)
            norm.append(key)
        if not norm:
            raise ValueError("motif edge list must be non-empty")
        self.v = v
        self.edges = tuple(sorted(norm))

    @property
    def max_degree(self) -> int:
        deg = [0] * (self.v + 1)
        for a, b in self.edges:
            deg[a] += 1
            deg[b] += 1
        return max(deg)

    @property
    def edges0(self):
        """Edges with 0-based vertex indices, for array work."""
        return tuple((a - 1, b - 1) for a, b in self.edges)

    def __repr__(self):
        return f"MotifGraph(v={self.v}, edges={list(self.edges)})"


def motif_preset(name: str, v: int | None = None) -> MotifGraph:
    name = name.strip()
    if name == "K2":
        return MotifGraph(2, [(1, 2)])
    if name == "K3":
        return MotifGraph(3, [(1, 2), (1, 3), (2, 3)])
    if name == "K1_2":
        return MotifGraph(3, [(1, 2), (1, 3)])
    if name == "Kv":
        if v is None:
            raise ValueError("Kv preset needs v")
        return MotifGraph(v, list(itertools.combinations(range(1, v + 1), 2)))
    raise ValueError(f"unknown motif preset {name!r}")


class StepKernel:
    """Symmetric block-constant kernel on [0,1]^2.

    ``masses`` are the block measures (positive, summing to 1) and
    ``values`` is the exactly-symmetric k x k block value matrix.
    """

    def __init__(self, masses, values):
        masses = np.asarray(masses, dtype=float)
        values = np.asarray(values, dtype=float)
        if masses.ndim != 1 or np.any(masses <= 0):
            raise ValueError("block masses must be a 1-d positive array")
        if abs(masses.sum() - 1.0) > 1e-12:
            raise ValueError(f"block masses sum to {masses.sum()!r}, not 1")
        k = len(masses)
        if values.shape != (k, k):
            raise ValueError("values must be k x k")
        if not np.array_equal(values, values.T):
            raise ValueError("values must be exactly symmetric")
        self.masses = masses
        self.values = values
        cum = np.cumsum(masses)
        cum[-1] = 1.0
        self.boundaries = cum
        for arr in (self.masses, self.values, self.boundaries):
            arr.setflags(write=False)

    @property
    def k(self) -> int:
        return len(self.masses)

    def block_of(self, u):
        """Block index of u in [0,1]; block b covers (boundary_{b-1}, boundary_b]."""
        idx = np.searchsorted(self.boundaries, np.asarray(u, dtype=float), side="left")
        return np.minimum(idx, self.k - 1)

    def min_value(self) -> float:
        return float(self.values.min())

    def __repr__(self):
        return f"StepKernel(k={self.k})"


class CouplingMatrix:
    """Symmetric n x n coupling with zero diagonal."""

    def __init__(self, entries):
        entries = np.asarray(entries, dtype=float)
        n = entries.shape[0]
        if entries.shape != (n, n):
            raise ValueError("coupling must be square")
        if not np.array_equal(entries, entries.T):
            raise ValueError("coupling must be symmetric")
        if np.any(np.diagonal(entries) != 0):
            raise ValueError("coupling diagonal must be zero")
        self.entries = entries
        self.entries.setflags(write=False)

    @property
    def n(self) -> int:
        return self.entries.shape[0]

    def __repr__(self):
        return f"CouplingMatrix(n={self.n})"


def kernel_preset(name: str, **kw) -> StepKernel:
    name = name.strip()
    if name == "complete":
        return StepKernel([1.0], [[1.0]])
    if name == "tripartite":
        third = 1.0 / 3.0
        vals = 1.0 - np.eye(3)
        return StepKernel([third, third, third], vals)
    if name == "bipartite":
        c = float(kw.get("c", 2.0))
        return StepKernel([0.5, 0.5], [[0.0, c], [c, 0.0]])
    if name == "er_quenched":
        return matrix_to_kernel(er_quenched(int(kw["n"]), float(kw["p"]), int(kw["seed"])))
    raise ValueError(f"unknown kernel preset {name!r}")


def er_quenched(n: int, p: float, seed: int) -> CouplingMatrix:
    """Quenched Erdos-Renyi 0/1 coupling scaled by 1/p (mean degree ~ 1)."""
    if not 0.0 < p <= 1.0:
        raise ValueError("p must be in (0, 1]")
    rng = np.random.default_rng(seed)
    upper = (rng.random((n, n)) < p).astype(float)
    a = np.triu(upper, 1)
    q = (a + a.T) / p
    return CouplingMatrix(q)


# -- symmetrization and tuple sums ---------------------------------------


def sym_eval(motif: MotifGraph, kernel: StepKernel, blocks) -> float:
    """Sym[W] at one tuple of block indices: edge products averaged over S_v."""
    blocks = tuple(int(b) for b in blocks)
    if len(blocks) != motif.v:
        raise ValueError(f"need {motif.v} block indices")
    if any(not 0 <= b < kernel.k for b in blocks):
        raise ValueError("block index out of range")
    vals = kernel.values
    total = 0.0
    for sigma in itertools.permutations(range(motif.v)):
        prod = 1.0
        for a, b in motif.edges0:
            prod *= vals[blocks[sigma[a]], blocks[sigma[b]]]
        total += prod
    return total / math.factorial(motif.v)


def _check_grid(motif: MotifGraph, kernel: StepKernel):
    if kernel.k**motif.v > MAX_TUPLE_GRID:
        raise ValueError(
            f"block grid k^v = {kernel.k}^{motif.v} exceeds {MAX_TUPLE_GRID}"
        )


def sym_tensor(motif: MotifGraph, kernel: StepKernel) -> np.ndarray:
    """Full Sym[W] tensor of shape (k,)*v, vectorized over tuples."""
    _check_grid(motif, kernel)
    v, k = motif.v, kernel.k
    idx = np.indices((k,) * v)
    total = np.zeros((k,) * v)
    for sigma in itertools.permutations(range(v)):
        prod = np.ones((k,) * v)
        for a, b in motif.edges0:
            prod = prod * kernel.values[idx[sigma[a]], idx[sigma[b]]]
        total += prod
    return total / math.factorial(v)


def _edge_product_tensor(motif: MotifGraph, kernel: StepKernel) -> np.ndarray:
    """Plain (unsymmetrized) edge product over block tuples, shape (k,)*v."""
    _check_grid(motif, kernel)
    v, k = motif.v, kernel.k
    idx = np.indices((k,) * v)
    prod = np.ones((k,) * v)
    for a, b in motif.edges0:
        prod = prod * kernel.values[idx[a], idx[b]]
    return prod


def degree_profile(motif: MotifGraph, kernel: StepKernel) -> np.ndarray:
    """T[Sym[W]] per block: Sym[W] averaged over the other v-1 coordinates."""
    t = sym_tensor(motif, kernel)
    for _ in range(motif.v - 1):
        t = t @ kernel.masses
    return t


def is_regular(motif: MotifGraph, kernel: StepKernel, tol: float = 1e-9):
    """(True, constant) when the degree profile is constant within tol."""
    if tol <= 0:
        raise ValueError("tol must be positive")
    prof = degree_profile(motif, kernel)
    if prof.max() - prof.min() <= tol:
        return True, float(kernel.masses @ prof)
    return False, None


def _contract_profile(tensor: np.ndarray, weighted: np.ndarray, times: int):
    t = tensor
    for _ in range(times):
        t = t @ weighted
    return t


def hom_functional(motif: MotifGraph, kernel: StepKernel, values) -> float:
    """G_W(f) for a step profile f given by per-block values on W's partition."""
    kernel, values = _align_profile(kernel, values)
    g = kernel.masses * values
    t = _contract_profile(_edge_product_tensor(motif, kernel), g, motif.v)
    return float(t)


def vartheta_profile(motif: MotifGraph, kernel: StepKernel, values) -> np.ndarray:
    """Local-field profile: v * Sym[W](u, .) integrated against f on v-1 slots.

    This is the functional derivative of ``hom_functional`` at f, evaluated
    per block of W's partition.
    """
    kernel, values = _align_profile(kernel, values)
    return _vartheta_from_tensor(sym_tensor(motif, kernel), motif.v, kernel.masses, values)


def _vartheta_from_tensor(sym_t, v, masses, values):
    g = masses * np.asarray(values, dtype=float)
    return v * _contract_profile(sym_t, g, v - 1)


def _align_profile(kernel: StepKernel, values):
    """Broadcast or refine a profile onto the kernel partition."""
    values = np.asarray(values, dtype=float)
    if values.ndim == 0:
        return kernel, np.full(kernel.k, float(values))
    if values.shape == (kernel.k,):
        return kernel, values
    raise ValueError(
        f"profile has {values.shape[0]} blocks but kernel has {kernel.k}; "
        "refine onto a common partition first"
    )


# -- norms and cut distances ----------------------------------------------


def lr_norm(kernel: StepKernel, r: float) -> float:
    """L^r norm of the kernel under the product block measure."""
    if r < 1:
        raise ValueError("r must be >= 1")
    mm = np.outer(kernel.masses, kernel.masses)
    return float((mm * np.abs(kernel.values) ** r).sum() ** (1.0 / r))


def _mass_matrix(kernel: StepKernel) -> np.ndarray:
    return np.outer(kernel.masses, kernel.masses) * kernel.values


def cut_norm_exact(kernel: StepKernel) -> float:
    """sup_{S,T} |integral of W over S x T|, exact.

    The bilinear objective over fractional block memberships attains its
    optimum at vertices, so S ranges over the 2^k block subsets and T is
    chosen greedily per block sign.  Requires k <= 20.
    """
    k = kernel.k
    if k > 20:
        raise ValueError("cut_norm_exact supports k <= 20; use cut_norm_heuristic")
    m = _mass_matrix(kernel)
    best = 0.0
    chunk = 1 << 14
    bits = np.arange(k, dtype=np.uint32)
    for start in range(0, 1 << k, chunk):
        idx = np.arange(start, min(start + chunk, 1 << k), dtype=np.uint32)
        masks = ((idx[:, None] >> bits) & 1).astype(float)
        rows = masks @ m
        vals = np.maximum(
            np.clip(rows, 0.0, None).sum(axis=1),
            np.clip(-rows, 0.0, None).sum(axis=1),
        )
        best = max(best, float(vals.max()))
    return best


def cut_norm_heuristic(kernel, restarts: int = 16, seed: int = 0) -> float:
    """Alternating-sign local search lower bound for the cut norm.

    Deterministic given the seed; ``restarts=0`` uses the single all-ones
    start.  The returned value is always attained by some (S, T) pair, hence
    a certified lower bound.
    """
    if isinstance(kernel, CouplingMatrix):
        kernel = matrix_to_kernel(kernel)
    m = _mass_matrix(kernel)
    k = kernel.k
    rng = np.random.default_rng(seed)
    starts = [np.ones(k)]
    for _ in range(int(restarts)):
        starts.append(rng.integers(0, 2, size=k).astype(float))
    best = 0.0
    for s0 in starts:
        for sign in (1.0, -1.0):
            s = s0.copy()
            value = -np.inf
            for _ in range(200):
                t = (sign * (s @ m) > 0).astype(float)
                s = (sign * (m @ t) > 0).astype(float)
                new = sign * (s @ m @ t)
                if new <= value + 1e-15:
                    value = max(value, new)
                    break
                value = new
            best = max(best, abs(value))
    return float(best)


def refine(k1: StepKernel, k2: StepKernel):
    """Rewrite two step kernels on the common refinement of their partitions."""
    cuts = np.unique(np.concatenate([k1.boundaries, k2.boundaries]))
    cuts = cuts[cuts > 1e-15]
    # collapse boundary points closer than 1e-12 to avoid zero-mass slivers
    keep = [cuts[0]]
    for c in cuts[1:]:
        if c - keep[-1] > 1e-12:
            keep.append(c)
    keep[-1] = 1.0
    bounds = np.asarray(keep)
    masses = np.diff(np.concatenate([[0.0], bounds]))
    mids = bounds - 0.5 * masses
    out = []
    for k in (k1, k2):
        parent = k.block_of(mids)
        out.append(StepKernel(masses, k.values[np.ix_(parent, parent)]))
    return out[0], out[1]


def refine_kernel_profile(kernel: StepKernel, p_masses, p_values):
    """Refine a kernel and a step profile onto their common partition.

    Returns (kernel', values') with matching block structure.
    """
    p_masses = np.asarray(p_masses, dtype=float)
    p_values = np.asarray(p_values, dtype=float)
    p_bounds = np.cumsum(p_masses)
    p_bounds[-1] = 1.0
    cuts = np.unique(np.concatenate([kernel.boundaries, p_bounds]))
    cuts = cuts[cuts > 1e-15]
    keep = [cuts[0]]
    for c in cuts[1:]:
        if c - keep[-1] > 1e-12:
            keep.append(c)
    keep[-1] = 1.0
    bounds = np.asarray(keep)
    masses = np.diff(np.concatenate([[0.0], bounds]))
    mids = bounds - 0.5 * masses
    parent_k = kernel.block_of(mids)
    parent_p = np.minimum(np.searchsorted(p_bounds, mids, side="left"), len(p_masses) - 1)
    refined = StepKernel(masses, kernel.values[np.ix_(parent_k, parent_k)])
    return refined, p_values[parent_p]


def cut_distance(k1: StepKernel, k2: StepKernel, method: str = "auto") -> float:
    """Strong cut distance between two step kernels (refine, then cut norm).

    ``method="auto"`` uses the exact enumeration up to 20 refined blocks and
    the seeded heuristic lower bound beyond.
    """
    r1, r2 = refine(k1, k2)
    diff = StepKernel(r1.masses, r1.values - r2.values)
    if method == "exact" or (method == "auto" and diff.k <= 20):
        return cut_norm_exact(diff)
    return cut_norm_heuristic(diff, restarts=64, seed=0)


def weak_cut_distance_small(k1: StepKernel, k2: StepKernel) -> float:
    """Weak cut distance minimized over block relabelings.

    Supports only equal-mass kernels with the same k <= 8 blocks; the
    minimum runs over the k! block permutations.
    """
    k = k1.k
    if k != k2.k:
        raise ValueError("kernels must have the same block count")
    if k > 8:
        raise ValueError("weak_cut_distance_small supports k <= 8")
    for kk in (k1, k2):
        if np.any(np.abs(kk.masses - 1.0 / k) > 1e-12):
            raise ValueError("weak_cut_distance_small needs equal block masses")
    best = np.inf
    for perm in itertools.permutations(range(k)):
        p = np.asarray(perm)
        permuted = k1.values[np.ix_(p, p)]
        diff = StepKernel(k1.masses, permuted - k2.values)
        best = min(best, cut_norm_exact(diff))
    return float(best)


# -- matrix embeddings ------------------------------------------------------


def matrix_to_kernel(q: CouplingMatrix) -> StepKernel:
    """Embed an n x n coupling as an n-block equal-mass step kernel."""
    n = q.n
    return StepKernel(np.full(n, 1.0 / n), q.entries)


def block_assignment(masses, n: int) -> np.ndarray:
    """Assign n sites to blocks contiguously, proportional to block masses."""
    cum = np.cumsum(np.asarray(masses, dtype=float))
    cum[-1] = 1.0
    bounds = np.rint(cum * n).astype(int)
    bounds = np.maximum.accumulate(bounds)
    bounds[-1] = n
    labels = np.zeros(n, dtype=int)
    start = 0
    for b, stop in enumerate(bounds):
        labels[start:stop] = b
        start = stop
    return labels


def blow_up(kernel: StepKernel, n: int):
    """Materialize a step kernel as an n-site coupling with zero diagonal.

    Returns (coupling, labels) where labels is the contiguous block
    assignment of the n sites.
    """
    labels = block_assignment(kernel.masses, n)
    q = kernel.values[np.ix_(labels, labels)].copy()
    np.fill_diagonal(q, 0.0)
    return CouplingMatrix(q), labels
