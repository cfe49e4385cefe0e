"""Random environment: tree sampling, certified enclosures, Monte Carlo.

This is the independent check on the exact recursion: Galton-Watson trees
are sampled to a finite depth, the per-tree partition value is bracketed
by interval propagation (unresolved frontier subtrees contribute the only
bounds that follow from distances lying in [0, 1]: exactly 1 for at most
one particle, [0, 1/n!] for n of them), and the sample mean of enclosure
midpoints estimates the mean partition function.  Statistical error
(std_error) and systematic truncation error (enclosure_width_max) are
reported separately.

The hot kernels live in `_mc_numba` (default) and `_mc_numpy` (fallback);
set BRANCHGAS_BACKEND=numpy|numba|auto to pick.  Both backends share the
splitmix64 path-keyed stream, so a (law, seed) pair names one infinite
tree regardless of truncation depth or backend.
"""

from __future__ import annotations

import logging
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from ._mc_numpy import base_key, mix64_int
from .errors import (
    BranchGasError,
    InvalidPathError,
    NegativeBetaUnsupportedError,
)
from .law import BranchingLaw
from .poly import binom2
from .report import Report

logger = logging.getLogger(__name__)

DEFAULT_SEED = 42
BACKEND_ENV = "BRANCHGAS_BACKEND"


def _load_backend():
    choice = os.environ.get(BACKEND_ENV, "auto").strip().lower() or "auto"
    if choice not in {"auto", "numba", "numpy"}:
        raise BranchGasError(f"{BACKEND_ENV} must be auto, numba or numpy, got {choice!r}")
    if choice in {"auto", "numba"}:
        try:
            from . import _mc_numba as impl

            return impl, "numba"
        except ImportError:
            if choice == "numba":
                raise BranchGasError("numba backend requested but numba is not importable")
            logger.warning("numba unavailable, falling back to the NumPy backend")
    from . import _mc_numpy as impl

    return impl, "numpy"


_IMPL, _BACKEND_NAME = _load_backend()


def active_backend() -> str:
    return _BACKEND_NAME


# ----------------------------------------------------------------------
# law / factor preparation shared by both backends


def law_arrays(law: BranchingLaw) -> tuple[np.ndarray, np.ndarray]:
    """Support values and the float cumulative distribution (last entry 1)."""
    qs = np.array(law.support(), dtype=np.int64)
    cdf = np.cumsum([float(p) for _, p in law.entries])
    cdf[-1] = 1.0
    return qs, cdf


def level_weight_table(qs: np.ndarray, n_particles: int, beta: float) -> np.ndarray:
    """factors[i, k] = q_i^(-k - beta*C(k,2)): the weight of a k-particle
    block living one level below a node with q_i children."""
    out = np.empty((qs.size, n_particles + 1))
    for i, q in enumerate(qs):
        for k in range(n_particles + 1):
            out[i, k] = float(q) ** (-(k + beta * binom2(k)))
    return out


def frontier_bounds(n_particles: int) -> tuple[np.ndarray, np.ndarray]:
    lo = np.zeros(n_particles + 1)
    hi = np.empty(n_particles + 1)
    for k in range(n_particles + 1):
        hi[k] = 1.0 / math.factorial(k)
        if k <= 1:
            lo[k] = 1.0
    return lo, hi


# ----------------------------------------------------------------------
# sampled trees


@dataclass(frozen=True)
class SampledTree:
    """Truncated tree as per-level child-count arrays.

    level_counts[d][i] is the child count of node i at depth d, for
    d < depth; depth-D nodes are the truncation frontier.  Nodes are
    numbered level by level, children contiguous in parent order.
    """

    depth: int
    level_counts: tuple[np.ndarray, ...]
    law: BranchingLaw | None = None
    seed: int | None = None

    def __post_init__(self):
        if self.depth < 1 or len(self.level_counts) != self.depth:
            raise BranchGasError("need child counts for levels 0..depth-1")
        if self.level_counts[0].size != 1:
            raise BranchGasError("level 0 must hold exactly the root")
        for d in range(self.depth):
            counts = self.level_counts[d]
            if counts.min() < 1:
                raise BranchGasError("every node needs at least one child")
            if d + 1 < self.depth and self.level_counts[d + 1].size != int(counts.sum()):
                raise BranchGasError(f"level {d + 1} size does not match level {d} counts")

    @classmethod
    def from_level_counts(cls, counts) -> "SampledTree":
        arrays = tuple(np.asarray(c, dtype=np.int64) for c in counts)
        return cls(depth=len(arrays), level_counts=arrays)

    @property
    def frontier_size(self) -> int:
        return int(self.level_counts[-1].sum())

    @property
    def n_nodes(self) -> int:
        return 1 + sum(int(c.sum()) for c in self.level_counts)

    def child_starts(self, d: int) -> np.ndarray:
        counts = self.level_counts[d]
        return np.concatenate(([0], np.cumsum(counts)[:-1]))


def sample_tree(law: BranchingLaw, depth: int, seed: int) -> SampledTree:
    """Deterministic function of (law, depth, seed); deepening the same
    seed extends the same tree."""
    if depth < 1:
        raise BranchGasError("depth must be >= 1")
    qs, cdf = law_arrays(law)
    # Matches sample index 0 of the estimator stream for the same seed.
    root = np.uint64(mix64_int(base_key(seed)))
    idx_flat, level_ptr = _backend_sample(qs, cdf, depth, root)
    levels = []
    for d in range(depth):
        idx = np.asarray(idx_flat[level_ptr[d] : level_ptr[d + 1]])
        levels.append(qs[idx])
    return SampledTree(depth=depth, level_counts=tuple(levels), law=law, seed=seed)


def _backend_sample(qs, cdf, depth, root_key):
    return _IMPL.sample_level_indices(qs, cdf, depth, root_key)


# ----------------------------------------------------------------------
# per-tree enclosures


@dataclass(frozen=True)
class Enclosure:
    """Certified bracket [lo, hi] of a per-tree partition value."""

    lo: float
    hi: float

    def __post_init__(self):
        if not (0.0 <= self.lo <= self.hi):
            raise BranchGasError(f"invalid enclosure [{self.lo}, {self.hi}]")

    @property
    def width(self) -> float:
        return self.hi - self.lo

    @property
    def midpoint(self) -> float:
        return 0.5 * (self.lo + self.hi)

    def __contains__(self, value: float) -> bool:
        return self.lo <= value <= self.hi


def tree_partition(tree: SampledTree, n_particles: int, beta: float) -> Enclosure:
    """Enclosure of the canonical value for the infinite tree whose first
    `tree.depth` levels match the sample.

    Requires beta >= 0: the frontier bracket [0, 1/n!] comes from distances
    in [0, 1], which fails for negative beta (the symbolic path covers the
    continuation there).
    """
    if beta < 0:
        raise NegativeBetaUnsupportedError("per-tree enclosures need beta >= 0")
    if n_particles < 0:
        raise BranchGasError("particle count must be non-negative")
    if n_particles <= 1:
        return Enclosure(1.0, 1.0)
    uq = np.unique(np.concatenate([c for c in tree.level_counts]))
    idx_levels = [np.searchsorted(uq, c).astype(np.int64) for c in tree.level_counts]
    idx_flat = np.concatenate(idx_levels)
    level_ptr = np.zeros(tree.depth + 1, dtype=np.int64)
    for d, idx in enumerate(idx_levels):
        level_ptr[d + 1] = level_ptr[d] + idx.size
    factors = level_weight_table(uq, n_particles, beta)
    front_lo, front_hi = frontier_bounds(n_particles)
    lo, hi = _IMPL.enclosure(idx_flat, level_ptr, uq, factors, front_lo, front_hi, n_particles)
    return Enclosure(lo, hi)


# ----------------------------------------------------------------------
# Monte Carlo estimation


@dataclass(frozen=True)
class McEstimate:
    mean: float
    std_error: float
    samples: int
    enclosure_width_max: float
    depth: int
    seed: int

    def to_json(self) -> dict:
        return {
            "mean": self.mean,
            "std_error": self.std_error,
            "samples": self.samples,
            "enclosure_width_max": self.enclosure_width_max,
            "depth": self.depth,
            "seed": self.seed,
        }


def mc_mean_z(
    law: BranchingLaw,
    n_particles: int,
    beta: float,
    n_samples: int,
    depth: int,
    seed: int = DEFAULT_SEED,
    threads: int = 1,
) -> McEstimate:
    """Monte Carlo estimate of the mean partition function.

    Averages enclosure midpoints over independent trees; the per-sample
    seed is a function of (seed, sample index), so the result does not
    depend on the thread count, and the reduction order is fixed.
    """
    if beta < 0:
        raise NegativeBetaUnsupportedError("the estimator needs beta >= 0")
    if n_particles < 0:
        raise BranchGasError("particle count must be non-negative")
    if n_samples < 2:
        raise BranchGasError("need at least 2 samples for a standard error")
    if depth < 1:
        raise BranchGasError("depth must be >= 1")
    qs, cdf = law_arrays(law)
    factors = level_weight_table(qs, n_particles, beta)
    front_lo, front_hi = frontier_bounds(n_particles)
    base = np.uint64(base_key(seed))

    if n_particles <= 1:
        return McEstimate(1.0, 0.0, n_samples, 0.0, depth, seed)

    def run(start: int, count: int):
        return _IMPL.mc_batch(
            qs, cdf, factors, front_lo, front_hi, n_particles, depth, base, start, count
        )

    threads = max(1, int(threads))
    if threads == 1:
        mids, widths = run(0, n_samples)
    else:
        bounds = np.linspace(0, n_samples, threads + 1).astype(int)
        chunks = [(int(a), int(b - a)) for a, b in zip(bounds[:-1], bounds[1:]) if b > a]
        with ThreadPoolExecutor(max_workers=len(chunks)) as pool:
            parts = list(pool.map(lambda c: run(*c), chunks))
        mids = np.concatenate([p[0] for p in parts])
        widths = np.concatenate([p[1] for p in parts])
    mean = float(np.mean(mids))
    std_error = float(np.std(mids, ddof=1) / math.sqrt(n_samples))
    return McEstimate(
        mean=mean,
        std_error=std_error,
        samples=n_samples,
        enclosure_width_max=float(widths.max()),
        depth=depth,
        seed=seed,
    )


def choose_depth(
    law: BranchingLaw,
    n_particles: int,
    beta: float,
    tol: float = 1e-6,
    seed: int = DEFAULT_SEED,
    pilot: int = 16,
    node_budget: int = 10_000_000,
    start_depth: int = 2,
) -> int:
    """Smallest doubling depth whose pilot enclosure widths are all <= tol.

    Doubles the depth until the tolerance holds or the expected node count
    of a pilot batch would exceed the budget (then the current depth is
    returned and the residual width stays visible in the estimates).
    """
    if beta < 0:
        raise NegativeBetaUnsupportedError("the estimator needs beta >= 0")
    if n_particles < 0:
        raise BranchGasError("particle count must be non-negative")
    if n_particles <= 1:
        return start_depth
    qs, cdf = law_arrays(law)
    factors = level_weight_table(qs, n_particles, beta)
    front_lo, front_hi = frontier_bounds(n_particles)
    base = np.uint64(base_key(seed))
    mean_q = float(law.mean())
    depth = max(1, start_depth)
    while True:
        _, widths = _IMPL.mc_batch(
            qs, cdf, factors, front_lo, front_hi, n_particles, depth, base, 0, pilot
        )
        if float(widths.max()) <= 0.5 * tol:
            return depth
        next_depth = depth * 2
        est_nodes = pilot * (mean_q ** (next_depth + 1)) / max(mean_q - 1.0, 0.1)
        if est_nodes > node_budget:
            logger.warning(
                "node budget %d reached at depth %d (width %.3e > tol %.3e)",
                node_budget,
                depth,
                float(widths.max()),
                tol,
            )
            return depth
        depth = next_depth


# ----------------------------------------------------------------------
# distances and the ultrametric check


def _walk_nodes(tree: SampledTree, path) -> np.ndarray:
    """Node index at each level along a root-to-frontier path."""
    path = list(path)
    if len(path) != tree.depth:
        raise InvalidPathError(f"path length {len(path)} != depth {tree.depth}")
    nodes = np.empty(tree.depth + 1, dtype=np.int64)
    nodes[0] = 0
    cur = 0
    for d, step in enumerate(path):
        counts = tree.level_counts[d]
        if not 0 <= step < int(counts[cur]):
            raise InvalidPathError(
                f"child index {step} out of range at depth {d} (node has {counts[cur]})"
            )
        cur = int(tree.child_starts(d)[cur]) + int(step)
        nodes[d + 1] = cur
    return nodes


def tree_distance(tree: SampledTree, path_a, path_b) -> float:
    """Inherited-mass distance between two frontier chains.

    The distance is the measure of the subtree below the deepest common
    node: the product of 1/child-count over its strict ancestors.  Paths
    splitting at the root are at distance 1; identical truncated paths get
    the full-depth product (the unresolved self-distance).
    """
    nodes_a = _walk_nodes(tree, path_a)
    path_a = list(path_a)
    path_b = list(path_b)
    _walk_nodes(tree, path_b)  # validation
    split = tree.depth
    for d in range(tree.depth):
        if path_a[d] != path_b[d]:
            split = d
            break
    measure = Fraction(1)
    for d in range(split):
        measure /= int(tree.level_counts[d][nodes_a[d]])
    return float(measure)


def sample_leaf_paths(tree: SampledTree, n_paths: int, seed: int) -> np.ndarray:
    """Paths drawn by the equal-inheritance measure (uniform child at
    every step)."""
    rng = np.random.default_rng(seed)
    cur = np.zeros(n_paths, dtype=np.int64)
    paths = np.empty((n_paths, tree.depth), dtype=np.int64)
    for d in range(tree.depth):
        counts = tree.level_counts[d][cur]
        choice = rng.integers(0, counts)
        paths[:, d] = choice
        cur = tree.child_starts(d)[cur] + choice
    return paths


def _prefix_measures(tree: SampledTree, paths: np.ndarray) -> np.ndarray:
    """measures[i, m] = mass of the depth-m node on path i (m <= depth)."""
    n = paths.shape[0]
    out = np.ones((n, tree.depth + 1))
    cur = np.zeros(n, dtype=np.int64)
    for d in range(tree.depth):
        counts = tree.level_counts[d][cur]
        out[:, d + 1] = out[:, d] / counts
        cur = tree.child_starts(d)[cur] + paths[:, d]
    return out


def _pair_distances(tree: SampledTree, pa: np.ndarray, pb: np.ndarray) -> np.ndarray:
    differs = pa != pb
    split = np.where(differs.any(axis=1), differs.argmax(axis=1), tree.depth)
    meas = _prefix_measures(tree, pa)
    return meas[np.arange(pa.shape[0]), split]


def verify_ultrametric(tree: SampledTree, n_triples: int, seed: int = DEFAULT_SEED) -> Report:
    """Strong triangle inequality and symmetry on random path triples."""
    paths = sample_leaf_paths(tree, 3 * n_triples, seed)
    a = paths[0::3]
    b = paths[1::3]
    c = paths[2::3]
    d_ab = _pair_distances(tree, a, b)
    d_ba = _pair_distances(tree, b, a)
    d_ac = _pair_distances(tree, a, c)
    d_cb = _pair_distances(tree, c, b)
    d_aa = _pair_distances(tree, a, a)
    symmetric = bool(np.all(d_ab == d_ba))
    triangle = bool(
        np.all(d_ab <= np.maximum(d_ac, d_cb))
        and np.all(d_ac <= np.maximum(d_ab, d_cb))
        and np.all(d_cb <= np.maximum(d_ab, d_ac))
    )
    self_min = bool(np.all(d_aa <= d_ab))
    violations = []
    if not symmetric:
        violations.append("symmetry")
    if not triangle:
        violations.append("strong triangle inequality")
    if not self_min:
        violations.append("self-distance minimality")
    passed = not violations
    return Report(
        name=f"ultrametric(depth={tree.depth}, triples={n_triples})",
        passed=passed,
        first_failure=None if passed else 0,
        residuals=("0",) if passed else (", ".join(violations),),
        details={"triples": n_triples, "depth": tree.depth, "seed": seed},
    )


__all__ = [
    "DEFAULT_SEED",
    "Enclosure",
    "McEstimate",
    "SampledTree",
    "active_backend",
    "choose_depth",
    "frontier_bounds",
    "law_arrays",
    "level_weight_table",
    "mc_mean_z",
    "sample_leaf_paths",
    "sample_tree",
    "tree_distance",
    "tree_partition",
    "verify_ultrametric",
]
