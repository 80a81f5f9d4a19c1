"""Distances between signal profiles.

The discriminative measure is an adjusted cosine distance: both signatures
are centered on the mean vector of the FIRST profile before the angle is
taken.  Centering stretches the usable range from [0, 1] (nonnegative
vectors can never be more than orthogonal) to [0, 2] and anchors the
comparison in the first profile's own geometry, which makes the measure
deliberately asymmetric: d(F, G) and d(G, F) are both computed and both
must agree before a pair is flagged downstream.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateCenteringError, ParameterError, ShapeError
from .pipeline import SignalProfile

DEGENERATE_NORM_TOL = 1e-12

# Substitutes when a centered vector collapses to (numerically) zero: a row
# equal to its own profile mean carries no directional information, so the
# f-side degenerates to "no distance"; an uninformative g-side is maximally
# uninformative about similarity.
F_SIDE_DEGENERATE_DISTANCE = 0.0
G_SIDE_DEGENERATE_DISTANCE = 1.0

BASELINE_METRICS = ("manhattan", "euclidean", "chebyshev", "cosine")


@dataclass(frozen=True)
class DistanceVector:
    """L per-row distances from one identity's profile to another's."""

    from_identity: str
    to_identity: str
    values: np.ndarray

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=np.float64)
        if vals.ndim != 1 or vals.size == 0:
            raise ShapeError(f"values must be a nonempty 1-D vector, got {vals.shape}")
        if np.any(vals < 0):
            raise ParameterError("distance values must be nonnegative")
        vals.flags.writeable = False
        object.__setattr__(self, "values", vals)

    @property
    def profile_len(self) -> int:
        return int(self.values.size)


@dataclass(frozen=True)
class DistanceMatrix:
    """All N(N-1) directed distance vectors between N identities."""

    identities: tuple
    values: np.ndarray  # (N, N, L), zero diagonal

    def __post_init__(self):
        ids = tuple(str(i) for i in self.identities)
        vals = np.asarray(self.values, dtype=np.float64)
        n = len(ids)
        if len(set(ids)) != n:
            raise ParameterError("identities must be unique")
        if vals.ndim != 3 or vals.shape[0] != n or vals.shape[1] != n:
            raise ShapeError(f"values must be (N, N, L) with N={n}, got {vals.shape}")
        if np.any(vals[np.arange(n), np.arange(n)] != 0.0):
            raise ParameterError("diagonal entries must be zero vectors")
        vals.flags.writeable = False
        object.__setattr__(self, "identities", ids)
        object.__setattr__(self, "values", vals)

    @property
    def n_identities(self) -> int:
        return len(self.identities)

    @property
    def profile_len(self) -> int:
        return int(self.values.shape[2])

    def index_of(self, identity: str) -> int:
        return self.identities.index(identity)

    def vector(self, from_identity: str, to_identity: str) -> DistanceVector:
        i = self.index_of(from_identity)
        j = self.index_of(to_identity)
        return DistanceVector(from_identity=from_identity, to_identity=to_identity,
                              values=self.values[i, j])


def cosine_distance(f, g) -> float:
    """1 - cos(angle between f and g); in [0, 1] for nonnegative vectors."""
    f = np.asarray(f, dtype=np.float64)
    g = np.asarray(g, dtype=np.float64)
    if f.shape != g.shape or f.ndim != 1:
        raise ShapeError(f"vectors must be equal-length 1-D, got {f.shape} and {g.shape}")
    nf = np.linalg.norm(f)
    ng = np.linalg.norm(g)
    if nf == 0.0 or ng == 0.0:
        raise ParameterError("cosine distance undefined for a zero vector")
    return max(0.0, 1.0 - float(np.dot(f, g)) / (nf * ng))


def adjusted_cosine_distance(f, g, mean_f) -> float:
    """Cosine distance after centering BOTH vectors on mean_f.

    mean_f is the mean vector of the first argument's profile; centering by
    it (and never by g's) is what makes the pairwise distances asymmetric.
    Raises DegenerateCenteringError when either centered vector has norm
    below DEGENERATE_NORM_TOL; callers substitute a fixed distance per side.
    """
    f = np.asarray(f, dtype=np.float64)
    g = np.asarray(g, dtype=np.float64)
    mean_f = np.asarray(mean_f, dtype=np.float64)
    if not (f.shape == g.shape == mean_f.shape) or f.ndim != 1:
        raise ShapeError(
            f"vectors must be equal-length 1-D, got {f.shape}, {g.shape}, {mean_f.shape}")
    fc = f - mean_f
    gc = g - mean_f
    nf = np.linalg.norm(fc)
    ng = np.linalg.norm(gc)
    if nf < DEGENERATE_NORM_TOL:
        raise DegenerateCenteringError(
            f"centered first vector has norm {nf:.3e}", side="first")
    if ng < DEGENERATE_NORM_TOL:
        raise DegenerateCenteringError(
            f"centered second vector has norm {ng:.3e}", side="second")
    # bitwise-equal centered vectors are zero by definition; the float
    # formula can leave a +-1 ulp residue
    if np.array_equal(fc, gc):
        return 0.0
    d = 1.0 - float(np.dot(fc, gc)) / (nf * ng)
    return float(np.clip(d, 0.0, 2.0))


def adjusted_distance_rows(rows_f, rows_g, mean_f) -> np.ndarray:
    """Adjusted cosine distance per aligned row pair, with substitutions.

    Bulk form of adjusted_cosine_distance over the L rows of two profiles.
    Degenerate rows are substituted instead of raised: a first-side collapse
    gives F_SIDE_DEGENERATE_DISTANCE, a second-side collapse
    G_SIDE_DEGENERATE_DISTANCE (first side checked first, as in the scalar
    form).
    """
    rows_f = np.atleast_2d(np.asarray(rows_f, dtype=np.float64))
    rows_g = np.atleast_2d(np.asarray(rows_g, dtype=np.float64))
    mean_f = np.asarray(mean_f, dtype=np.float64)
    if rows_f.shape != rows_g.shape or mean_f.shape != (rows_f.shape[1],):
        raise ShapeError(
            f"row blocks {rows_f.shape} / {rows_g.shape} and mean {mean_f.shape} disagree")
    fc = rows_f - mean_f
    gc = rows_g - mean_f
    nf = np.linalg.norm(fc, axis=1)
    ng = np.linalg.norm(gc, axis=1)
    f_bad = nf < DEGENERATE_NORM_TOL
    g_bad = ng < DEGENERATE_NORM_TOL
    safe = np.where(f_bad | g_bad, 1.0, nf * ng)
    values = np.clip(1.0 - np.einsum("ij,ij->i", fc, gc) / safe, 0.0, 2.0)
    values[np.all(fc == gc, axis=1)] = 0.0  # see adjusted_cosine_distance
    values[g_bad] = G_SIDE_DEGENERATE_DISTANCE
    values[f_bad] = F_SIDE_DEGENERATE_DISTANCE
    return values


def baseline_distance_rows(rows_f, rows_g, metric: str) -> np.ndarray:
    """Baseline distance per aligned row pair (bulk form of baseline_distance)."""
    rows_f = np.atleast_2d(np.asarray(rows_f, dtype=np.float64))
    rows_g = np.atleast_2d(np.asarray(rows_g, dtype=np.float64))
    if rows_f.shape != rows_g.shape:
        raise ShapeError(f"row blocks must agree, got {rows_f.shape} vs {rows_g.shape}")
    diff = rows_f - rows_g
    if metric == "manhattan":
        return np.abs(diff).sum(axis=1)
    if metric == "euclidean":
        return np.linalg.norm(diff, axis=1)
    if metric == "chebyshev":
        return np.abs(diff).max(axis=1)
    if metric == "cosine":
        nf = np.linalg.norm(rows_f, axis=1)
        ng = np.linalg.norm(rows_g, axis=1)
        if np.any(nf == 0.0) or np.any(ng == 0.0):
            raise ParameterError("cosine distance undefined for a zero row")
        return np.maximum(0.0, 1.0 - np.einsum("ij,ij->i", rows_f, rows_g) / (nf * ng))
    raise ParameterError(f"unknown metric {metric!r}; expected one of {BASELINE_METRICS}")


def profile_distance_vector(profile_f: SignalProfile, profile_g: SignalProfile) -> DistanceVector:
    """Row-by-row adjusted cosine distances, centered on profile_f's mean."""
    if profile_f.signatures.shape != profile_g.signatures.shape:
        raise ShapeError(
            f"profiles must agree in (L, K): {profile_f.signatures.shape} "
            f"vs {profile_g.signatures.shape}")
    values = adjusted_distance_rows(profile_f.signatures, profile_g.signatures,
                                    profile_f.mean_vector)
    return DistanceVector(from_identity=profile_f.identity,
                          to_identity=profile_g.identity, values=values)


def distance_matrix(profiles) -> DistanceMatrix:
    """Directed distance vectors between every ordered pair of profiles."""
    profiles = list(profiles)
    n = len(profiles)
    if n < 2:
        raise ParameterError(f"need at least 2 profiles, got {n}")
    shape = profiles[0].signatures.shape
    for p in profiles[1:]:
        if p.signatures.shape != shape:
            raise ShapeError(
                f"profile {p.identity!r} has shape {p.signatures.shape}, expected {shape}")
    ids = tuple(p.identity for p in profiles)
    values = np.zeros((n, n, shape[0]), dtype=np.float64)
    for i, pf in enumerate(profiles):
        for j, pg in enumerate(profiles):
            if i != j:
                values[i, j] = profile_distance_vector(pf, pg).values
    return DistanceMatrix(identities=ids, values=values)


def baseline_distance(f, g, metric: str) -> float:
    """Classical distances used for the metric-comparison experiment."""
    f = np.asarray(f, dtype=np.float64)
    g = np.asarray(g, dtype=np.float64)
    if f.shape != g.shape or f.ndim != 1:
        raise ShapeError(f"vectors must be equal-length 1-D, got {f.shape} and {g.shape}")
    if metric == "manhattan":
        return float(np.abs(f - g).sum())
    if metric == "euclidean":
        return float(np.linalg.norm(f - g))
    if metric == "chebyshev":
        return float(np.abs(f - g).max())
    if metric == "cosine":
        return cosine_distance(f, g)
    raise ParameterError(f"unknown metric {metric!r}; expected one of {BASELINE_METRICS}")


def baseline_profile_distance_vector(profile_f: SignalProfile, profile_g: SignalProfile,
                                     metric: str) -> DistanceVector:
    """Row-by-row baseline distances between two profiles."""
    if profile_f.signatures.shape != profile_g.signatures.shape:
        raise ShapeError(
            f"profiles must agree in (L, K): {profile_f.signatures.shape} "
            f"vs {profile_g.signatures.shape}")
    values = np.array([
        baseline_distance(profile_f.row(l), profile_g.row(l), metric)
        for l in range(profile_f.profile_len)
    ])
    return DistanceVector(from_identity=profile_f.identity,
                          to_identity=profile_g.identity, values=values)
