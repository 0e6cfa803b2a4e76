"""Laplace and Schrodinger eigenpairs for the model manifolds.

Closed forms are used wherever they exist (exponentials on circles and tori,
spherical harmonics on the sphere); a second-order periodic finite-difference
discretization covers circles with a potential.  Eigenvalues are stored as
frequencies: an eigenpair (lam, e) satisfies -Delta e = lam^2 e, and for the
discretized Schrodinger operator lam_sq holds the raw (possibly negative)
operator eigenvalue while lam clamps at zero.

Eigenvalue grouping uses exact integer invariants where available (|n| on
circles, m^2+n^2 on square flat tori, (m^2, n^2) on warped tori, the degree l
on the sphere); only discretized spectra fall back to relative-tolerance
clustering.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
import scipy.linalg

from ._util import NumericalError, write_csv
from .manifolds import (TWO_PI, Circle1D, FlatTorus2D, ManifoldModel, MetricProfile1D,
                        QuadratureGrid, Sphere2, WarpedTorus2D)

MAX_SPHERE_DEGREE = 128
MAX_TORUS_PAIRS = 2_000_000


@dataclass(frozen=True)
class EigenPair:
    """One eigenfunction with its frequency and eigenspace label."""

    index: int
    lam: float
    lam_sq: float
    group_id: object
    evaluate: Callable[[np.ndarray], np.ndarray]


@dataclass(frozen=True)
class PotentialProfile:
    """Bounded real potential, a function of the arc-length coordinate."""

    fn: Callable[[np.ndarray], np.ndarray]
    name: str = "V"

    def __call__(self, s) -> np.ndarray:
        vals = np.asarray(self.fn(np.asarray(s, dtype=float)), dtype=float)
        if not np.all(np.isfinite(vals)):
            raise ValueError(f"potential {self.name!r} is not finite")
        return vals


def zero_potential() -> PotentialProfile:
    return PotentialProfile(lambda s: np.zeros_like(s), name="0")


def format_group_id(group_id) -> str:
    """Render an eigenspace key CSV-safe (tuples become 'a|b')."""
    if isinstance(group_id, tuple):
        return "|".join(str(v) for v in group_id)
    return str(group_id)


class SpectralBasis:
    """Ordered eigenpairs over a model manifold.

    Subclasses supply `_evaluate_indices`; everything else (grouping,
    windows, exports, orthonormality checks) is shared.
    """

    source = "closed_form"

    def __init__(self, manifold: ManifoldModel, lams: np.ndarray, lam_sqs: np.ndarray,
                 group_keys: Sequence, lam_max: float):
        self.manifold = manifold
        self.lams = np.asarray(lams, dtype=float)
        self.lam_sqs = np.asarray(lam_sqs, dtype=float)
        self.group_keys = list(group_keys)
        self.lam_max = float(lam_max)
        if np.any(np.diff(self.lams) < -1e-12):
            raise NumericalError("eigenvalues are not nondecreasing")
        self._groups: dict | None = None
        self._pairs: list | None = None

    # -- structure ---------------------------------------------------------

    @property
    def size(self) -> int:
        return self.lams.shape[0]

    def groups(self) -> dict:
        if self._groups is None:
            table: dict = {}
            for i, key in enumerate(self.group_keys):
                table.setdefault(key, []).append(i)
            self._groups = {k: np.asarray(v, dtype=int) for k, v in table.items()}
        return self._groups

    def group_indices(self, group_id) -> np.ndarray:
        try:
            return self.groups()[group_id]
        except KeyError:
            raise ValueError(f"unknown eigenvalue group {group_id!r}") from None

    def multiplicity(self, group_id) -> int:
        return int(self.group_indices(group_id).shape[0])

    def group_lambda(self, group_id) -> float:
        return float(self.lams[self.group_indices(group_id)[0]])

    def distinct_lambdas(self) -> np.ndarray:
        return np.asarray(sorted(self.group_lambda(g) for g in self.groups()))

    @property
    def pairs(self) -> list:
        if self._pairs is None:
            self._pairs = [
                EigenPair(index=i, lam=float(self.lams[i]), lam_sq=float(self.lam_sqs[i]),
                          group_id=self.group_keys[i], evaluate=self._single_evaluator(i))
                for i in range(self.size)
            ]
        return self._pairs

    def _single_evaluator(self, i: int):
        def evaluate(points):
            return self.evaluate([i], points)[0]
        return evaluate

    # -- evaluation --------------------------------------------------------

    def _evaluate_indices(self, indices: np.ndarray, points: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def evaluate(self, indices, points) -> np.ndarray:
        """Values e_j(x): array of shape (len(indices), npoints)."""
        idx = np.asarray(indices, dtype=int)
        pts = np.asarray(points, dtype=float)
        if pts.ndim == 1:
            pts = pts[:, None]
        return self._evaluate_indices(idx, pts)

    def abs2_sum(self, indices, points) -> np.ndarray:
        """Sum over the index set of |e_j(x)|^2 at each point."""
        vals = self.evaluate(indices, points)
        return np.sum(np.abs(vals) ** 2, axis=0)

    def project(self, samples: np.ndarray, grid: QuadratureGrid) -> np.ndarray:
        """Quadrature coefficients <f, e_j> for every j."""
        f = np.asarray(samples)
        out = np.empty(self.size, dtype=complex)
        block = max(1, 4_000_000 // max(grid.size, 1))
        wf = grid.weights * f
        for start in range(0, self.size, block):
            idx = np.arange(start, min(start + block, self.size))
            vals = self.evaluate(idx, grid.points)
            out[idx] = vals.conj() @ wf
        return out

    # -- diagnostics and export --------------------------------------------

    def orthonormality_defect(self, grid: QuadratureGrid, rng: np.random.Generator,
                              n_pairs: int = 60) -> float:
        """Max |<e_i, e_j> - delta_ij| over sampled index pairs."""
        worst = 0.0
        for _ in range(n_pairs):
            i, j = rng.integers(0, self.size, size=2)
            vi = self.evaluate([int(i)], grid.points)[0]
            vj = self.evaluate([int(j)], grid.points)[0]
            inner = complex(np.sum(grid.weights * vi * np.conj(vj)))
            target = 1.0 if i == j else 0.0
            worst = max(worst, abs(inner - target))
        return worst

    def to_csv(self, path) -> None:
        rows = [(i, self.lams[i], format_group_id(self.group_keys[i]),
                 self.multiplicity(self.group_keys[i])) for i in range(self.size)]
        write_csv(path, ("j", "lambda", "group_id", "multiplicity"), rows)


# ---------------------------------------------------------------------------
# circles


class CircleBasis(SpectralBasis):
    """Exponentials exp(2*pi*i*n*s/L)/sqrt(L) composed with s(x)."""

    def __init__(self, manifold: Circle1D, n_max: int):
        if n_max < 1:
            raise ValueError("n_max must be >= 1")
        ns = [0]
        for k in range(1, n_max + 1):
            ns.extend([k, -k])
        self.ns = np.asarray(ns, dtype=int)
        self.length = manifold.length
        lams = TWO_PI * np.abs(self.ns) / self.length
        super().__init__(manifold, lams, lams ** 2, [int(abs(n)) for n in self.ns],
                         lam_max=TWO_PI * n_max / self.length)

    def _evaluate_indices(self, indices, points):
        s = np.asarray(self.manifold.reparam.s_of_x(points[:, 0]))
        phases = np.exp((2j * math.pi / self.length) * np.outer(self.ns[indices], s))
        return phases / math.sqrt(self.length)


def circle_basis(manifold_or_length, n_max: int) -> CircleBasis:
    """Closed-form circle basis; accepts a Circle1D or a plain length."""
    if isinstance(manifold_or_length, Circle1D):
        return CircleBasis(manifold_or_length, n_max)
    from .manifolds import circle_of_length

    return CircleBasis(circle_of_length(float(manifold_or_length)), n_max)


# ---------------------------------------------------------------------------
# tori


def _cluster_group_ids(lam_sqs: np.ndarray, exact_keys: list, rel_tol: float = 1e-9) -> list:
    """Merge exact eigenspace keys whose eigenvalues coincide numerically."""
    order = np.argsort(lam_sqs, kind="stable")
    cluster_of_key: dict = {}
    cluster_reps: list = []
    prev = None
    for i in order:
        key = exact_keys[i]
        if key in cluster_of_key:
            prev = lam_sqs[i]
            continue
        if prev is not None and abs(lam_sqs[i] - prev) <= rel_tol * max(1.0, abs(lam_sqs[i])):
            cluster_of_key[key] = len(cluster_reps) - 1
        else:
            cluster_reps.append(key)
            cluster_of_key[key] = len(cluster_reps) - 1
        prev = lam_sqs[i]
    return [cluster_reps[cluster_of_key[k]] for k in exact_keys]


class FlatTorusBasis(SpectralBasis):
    """Lattice exponentials on [0, lx) x [0, ly)."""

    def __init__(self, manifold: FlatTorus2D, lam_max: float):
        if lam_max < 1:
            raise ValueError("lam_max must be >= 1")
        kx, ky = TWO_PI / manifold.lx, TWO_PI / manifold.ly
        mmax = int(math.floor(lam_max / kx + 1e-9))
        nmax = int(math.floor(lam_max / ky + 1e-9))
        est = (2 * mmax + 1) * (2 * nmax + 1)
        if est > MAX_TORUS_PAIRS:
            raise ValueError(
                f"lam_max={lam_max:g} would enumerate about {est} lattice pairs "
                f"(limit {MAX_TORUS_PAIRS})")
        ms, ns = np.meshgrid(np.arange(-mmax, mmax + 1), np.arange(-nmax, nmax + 1), indexing="ij")
        ms, ns = ms.ravel(), ns.ravel()
        lam_sq = (kx * ms) ** 2 + (ky * ns) ** 2
        keep = lam_sq <= lam_max ** 2 * (1 + 1e-12)
        ms, ns, lam_sq = ms[keep], ns[keep], lam_sq[keep]
        square = abs(manifold.lx - manifold.ly) <= 1e-12 * manifold.lx
        qs = ms.astype(np.int64) ** 2 + ns.astype(np.int64) ** 2
        sort_keys = np.lexsort((ns, ms, qs if square else lam_sq))
        ms, ns, lam_sq, qs = ms[sort_keys], ns[sort_keys], lam_sq[sort_keys], qs[sort_keys]
        self.ms, self.ns = ms, ns
        self.kx, self.ky = kx, ky
        self.norm = 1.0 / math.sqrt(manifold.volume)
        if square:
            group_keys = [int(q) for q in qs]
        else:
            group_keys = _cluster_group_ids(lam_sq, [(int(m * m), int(n * n)) for m, n in zip(ms, ns)])
        super().__init__(manifold, np.sqrt(lam_sq), lam_sq, group_keys, lam_max=lam_max)

    def _evaluate_indices(self, indices, points):
        phase = np.outer(self.kx * self.ms[indices], points[:, 0]) \
            + np.outer(self.ky * self.ns[indices], points[:, 1])
        return self.norm * np.exp(1j * phase)


class WarpedTorusBasis(SpectralBasis):
    """Separated products: exponential in x times a circle mode in s(y)."""

    def __init__(self, manifold: WarpedTorus2D, lam_max: float):
        if lam_max < 1:
            raise ValueError("lam_max must be >= 1")
        ly = manifold.length_y
        mmax = int(math.floor(lam_max + 1e-9))
        nmax = int(math.floor(lam_max * ly / TWO_PI + 1e-9))
        est = (2 * mmax + 1) * (2 * nmax + 1)
        if est > MAX_TORUS_PAIRS:
            raise ValueError(
                f"lam_max={lam_max:g} would enumerate about {est} lattice pairs "
                f"(limit {MAX_TORUS_PAIRS})")
        ms, ns = np.meshgrid(np.arange(-mmax, mmax + 1), np.arange(-nmax, nmax + 1), indexing="ij")
        ms, ns = ms.ravel(), ns.ravel()
        lam_sq = ms.astype(float) ** 2 + (TWO_PI * ns / ly) ** 2
        keep = lam_sq <= lam_max ** 2 * (1 + 1e-12)
        ms, ns, lam_sq = ms[keep], ns[keep], lam_sq[keep]
        order = np.lexsort((ns, ms, lam_sq))
        ms, ns, lam_sq = ms[order], ns[order], lam_sq[order]
        self.ms, self.ns = ms, ns
        self.length_y = ly
        group_keys = _cluster_group_ids(lam_sq, [(int(m * m), int(n * n)) for m, n in zip(ms, ns)])
        super().__init__(manifold, np.sqrt(lam_sq), lam_sq, group_keys, lam_max=lam_max)

    def _evaluate_indices(self, indices, points):
        s = np.asarray(self.manifold.reparam.s_of_x(points[:, 1]))
        phase = np.outer(self.ms[indices], points[:, 0]) \
            + np.outer(TWO_PI * self.ns[indices] / self.length_y, s)
        return np.exp(1j * phase) / math.sqrt(TWO_PI * self.length_y)


def torus_basis(manifold, lam_max: float) -> SpectralBasis:
    if isinstance(manifold, FlatTorus2D):
        return FlatTorusBasis(manifold, lam_max)
    if isinstance(manifold, WarpedTorus2D):
        return WarpedTorusBasis(manifold, lam_max)
    raise ValueError(f"torus_basis expects a torus, got {getattr(manifold, 'kind', manifold)!r}")


# ---------------------------------------------------------------------------
# sphere


def normalized_legendre(l: int, m: int, u: np.ndarray) -> np.ndarray:
    """Associated Legendre values normalized to unit L^2 norm on [-1, 1].

    Stable three-term recurrence; no Condon-Shortley phase.
    """
    if not 0 <= m <= l:
        raise ValueError("need 0 <= m <= l")
    u = np.asarray(u, dtype=float)
    somx2 = np.sqrt(np.maximum(0.0, 1.0 - u * u))
    pmm = np.full_like(u, math.sqrt(0.5))
    for k in range(1, m + 1):
        pmm = pmm * math.sqrt((2 * k + 1) / (2 * k)) * somx2
    if l == m:
        return pmm
    pml = math.sqrt(2 * m + 3) * u * pmm
    if l == m + 1:
        return pml
    for k in range(m + 2, l + 1):
        a_k = math.sqrt((4 * k * k - 1) / (k * k - m * m))
        a_prev = math.sqrt((4 * (k - 1) ** 2 - 1) / ((k - 1) ** 2 - m * m))
        pmm, pml = pml, a_k * (u * pml - pmm / a_prev)
    return pml


class SphereBasis(SpectralBasis):
    """Orthonormal spherical harmonics up to a degree cutoff."""

    def __init__(self, l_max: int):
        if not 1 <= l_max <= MAX_SPHERE_DEGREE:
            raise ValueError(f"l_max must lie in [1, {MAX_SPHERE_DEGREE}], got {l_max}")
        ls, ms = [], []
        for l in range(l_max + 1):
            for m in range(-l, l + 1):
                ls.append(l)
                ms.append(m)
        self.ls = np.asarray(ls, dtype=int)
        self.ms = np.asarray(ms, dtype=int)
        lams = np.sqrt(self.ls * (self.ls + 1.0))
        super().__init__(Sphere2(), lams, self.ls * (self.ls + 1.0), [int(l) for l in ls],
                         lam_max=math.sqrt(l_max * (l_max + 1.0)))

    def _evaluate_indices(self, indices, points):
        theta, phi = points[:, 0], points[:, 1]
        u = np.cos(theta)
        out = np.empty((len(indices), points.shape[0]), dtype=complex)
        for row, i in enumerate(indices):
            l, m = int(self.ls[i]), int(self.ms[i])
            plm = normalized_legendre(l, abs(m), u)
            out[row] = plm * np.exp(1j * m * phi) / math.sqrt(TWO_PI)
        return out

    def abs2_sum(self, indices, points):
        # |exp(i m phi)| = 1, so only the Legendre factor contributes
        pts = np.asarray(points, dtype=float).reshape(-1, 2)
        u = np.cos(pts[:, 0])
        total = np.zeros(pts.shape[0])
        for i in np.asarray(indices, dtype=int):
            plm = normalized_legendre(int(self.ls[i]), abs(int(self.ms[i])), u)
            total += plm * plm
        return total / TWO_PI


def sphere_basis(l_max: int) -> SphereBasis:
    return SphereBasis(l_max)


# ---------------------------------------------------------------------------
# discretized circle spectra


class DiscretizedCircleBasis(SpectralBasis):
    """Eigenpairs of -d^2/ds^2 + V(s) on a uniform periodic arc-length grid."""

    source = "discretized"

    def __init__(self, manifold: Circle1D, potential: PotentialProfile, grid_n: int, k: int):
        length = manifold.length
        step = length / grid_n
        s_nodes = step * np.arange(grid_n)
        v_vals = potential(s_nodes)
        matrix = np.zeros((grid_n, grid_n))
        inv_h2 = 1.0 / step ** 2
        np.fill_diagonal(matrix, 2.0 * inv_h2 + v_vals)
        idx = np.arange(grid_n - 1)
        matrix[idx, idx + 1] = -inv_h2
        matrix[idx + 1, idx] = -inv_h2
        matrix[0, -1] = matrix[-1, 0] = -inv_h2
        try:
            vals, vecs = scipy.linalg.eigh(matrix, subset_by_index=(0, k - 1))
        except scipy.linalg.LinAlgError as exc:
            raise NumericalError(f"eigensolver failed: {exc}") from exc
        residual = np.max(np.abs(matrix @ vecs - vecs * vals[None, :]))
        scale = 2.0 * inv_h2 + float(np.max(np.abs(v_vals)))
        if residual > 1e-8 * scale:
            raise NumericalError(f"eigensolver residual {residual:.3e} exceeds tolerance")
        self.s_nodes = s_nodes
        self.step = step
        self.samples = (vecs / math.sqrt(step)).T  # rows: discrete-L2-normalized eigenfunctions
        lam_sq = vals
        lams = np.sqrt(np.maximum(lam_sq, 0.0))
        group_keys = self._cluster(lam_sq)
        super().__init__(manifold, lams, lam_sq, group_keys, lam_max=float(lams[-1]))

    @staticmethod
    def _cluster(lam_sq: np.ndarray, rel_tol: float = 1e-9) -> list:
        keys, current = [], 0
        for i in range(len(lam_sq)):
            if i > 0 and abs(lam_sq[i] - lam_sq[i - 1]) > rel_tol * max(1.0, abs(lam_sq[i])):
                current += 1
            keys.append(current)
        return keys

    def _evaluate_indices(self, indices, points):
        length = self.manifold.length
        s = np.asarray(self.manifold.reparam.s_of_x(points[:, 0])) % length
        s_ext = np.concatenate([self.s_nodes, [length]])
        out = np.empty((len(indices), points.shape[0]), dtype=complex)
        for row, i in enumerate(indices):
            vals_ext = np.concatenate([self.samples[i], [self.samples[i][0]]])
            out[row] = np.interp(s, s_ext, vals_ext)
        return out

    def native_grid(self) -> QuadratureGrid:
        """Grid whose nodes and weights match the discretization exactly."""
        s_edges = self.step * (np.arange(self.s_nodes.shape[0] + 1) - 0.5)
        x_nodes = np.asarray(self.manifold.reparam.x_of_s(self.s_nodes))
        x_edges = np.asarray(self.manifold.reparam.x_of_s(s_edges))
        return QuadratureGrid(points=x_nodes[:, None],
                              weights=np.full(self.s_nodes.shape[0], self.step),
                              axes=(x_nodes,), cell_edges=(x_edges,), axis_names=("x",))


def fd_eigensolve_circle(profile: MetricProfile1D, potential: PotentialProfile | None,
                         grid_n: int, k: int,
                         manifold: Circle1D | None = None) -> DiscretizedCircleBasis:
    """Solve -d^2/ds^2 + V on the circle of length L = integral of sqrt(h).

    Standard second-order three-point stencil with periodic wrap on a uniform
    arc-length grid; returns the k smallest eigenpairs.
    """
    if grid_n < 128:
        raise ValueError(f"grid_n must be >= 128, got {grid_n}")
    if k < 1 or k > grid_n // 8:
        raise ValueError(f"k must lie in [1, grid_n/8], got {k}")
    if manifold is None:
        manifold = Circle1D(profile)
    return DiscretizedCircleBasis(manifold, potential or zero_potential(), grid_n, k)
