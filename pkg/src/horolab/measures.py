"""Atomic boundary measures of Patterson type: construction, conformality
diagnostics, horocycle conditionals, and quadrature estimators.

Busemann convention used throughout: beta_xi(p, q) is the limit of
d(p, z) - d(q, z) as z -> xi, matching geometry.busemann. Conditional
densities then read exp(s beta_xi(o, x)) and gain the factor exp(s t) when
the leaf is pushed distance t toward the boundary.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .geometry import (
    BoundaryPoint,
    Isometry,
    UnitTangent,
    isometry_distance,
    mobius_apply,
)
from .groups import FuchsianGroup, Word

__all__ = [
    "MeasureError",
    "PattersonConfig",
    "AtomicBoundaryMeasure",
    "ConditionalHorocycleMeasure",
    "TransversalSlice",
    "build_patterson",
    "conformality_defect",
    "conditional_on_horocycle",
    "horoball_mass",
    "ps_integral",
    "quadrature_report",
    "br_integral",
]


class MeasureError(ValueError):
    """Degenerate measure data: too few atoms, empty quadrature, zero mass."""


@dataclass(frozen=True)
class PattersonConfig:
    """Construction parameters: weight exponent, word-length cutoff, and an
    optional displacement prune so cusp corridors do not blow the word budget.

    The base point is i throughout.
    """

    exponent: float
    cutoff: int = 14
    radius: float | None = None

    def __post_init__(self):
        if not (self.exponent > 0 and math.isfinite(self.exponent)):
            raise MeasureError("exponent must be positive, got %r" % (self.exponent,))
        if self.cutoff < 4:
            raise MeasureError("cutoff below 4 leaves too coarse an orbit sample")


def _log_normalize(logw: np.ndarray) -> np.ndarray:
    m = float(np.max(logw))
    return logw - (m + math.log(float(np.sum(np.exp(logw - m)))))


def _busemann_at_origin(xi: np.ndarray, qx, qy):
    """beta_xi(o, q) for o = i, vectorized over finite xi."""
    return np.log(qy) + np.log(xi * xi + 1.0) - np.log((xi - qx) ** 2 + qy * qy)


@dataclass
class AtomicBoundaryMeasure:
    """Finitely many boundary atoms with unit total mass, log-space weights.

    Atoms are ray projections of orbit points of the base point; points are
    kept sorted so matching and interval masses are binary searches. The
    construction is deterministic: a fixed enumeration order and fixed
    accumulation order give bitwise-identical arrays on repeated runs.
    """

    group: FuchsianGroup
    exponent: float
    cutoff: int
    radius: float | None
    points: np.ndarray
    log_weights: np.ndarray
    displacements: np.ndarray
    lengths: np.ndarray
    _pair_cache: dict = field(default_factory=dict, repr=False)

    def __len__(self) -> int:
        return len(self.points)

    @property
    def atoms(self):
        return [
            (BoundaryPoint(float(x)), float(lw))
            for x, lw in zip(self.points, self.log_weights)
        ]

    def total_mass(self) -> float:
        m = float(np.max(self.log_weights))
        return math.exp(m) * float(np.sum(np.exp(self.log_weights - m)))

    def mass_in_interval(self, lo: float, hi: float) -> float:
        i, j = np.searchsorted(self.points, [lo, hi])
        if i == j:
            return 0.0
        return float(np.sum(np.exp(self.log_weights[i:j])))

    def heaviest(self, k: int) -> np.ndarray:
        """Indices of the k heaviest atoms, deterministic under ties."""
        order = np.argsort(-self.log_weights, kind="stable")
        return np.sort(order[: min(k, len(order))])


def build_patterson(group: FuchsianGroup, cfg: PattersonConfig) -> AtomicBoundaryMeasure:
    """Orbital-sum approximation of the conformal boundary measure.

    Atom for the word w: forward endpoint of the ray o -> w(o); log-weight
    -s d(o, w(o)). The identity has no ray and is excluded. Weights are
    normalized to unit total mass. Every atom lands inside a generator
    interval by the ping-pong nesting, which is asserted.
    """
    xs, ys, ds, ls = [], [], [], []
    for level, (mats, disp, *_) in enumerate(group._level_arrays(cfg.cutoff, cfg.radius), 1):
        if cfg.radius is None:
            m, dk = mats, disp
        else:
            keep = disp <= cfg.radius
            m, dk = mats[keep], disp[keep]
        den = m[:, 1, 0] ** 2 + m[:, 1, 1] ** 2
        xs.append((m[:, 0, 0] * m[:, 1, 0] + m[:, 0, 1] * m[:, 1, 1]) / den)
        ys.append(1.0 / den)
        ds.append(dk)
        ls.append(np.full(len(dk), level))
    if not xs:
        raise MeasureError("no orbit points at cutoff %d" % cfg.cutoff)
    x = np.concatenate(xs)
    y = np.concatenate(ys)
    d = np.concatenate(ds)
    ln = np.concatenate(ls)
    ok = np.abs(x) > 1e-300  # a dead-vertical ray has no finite endpoint
    x, y, d, ln = x[ok], y[ok], d[ok], ln[ok]
    if len(x) < 100:
        raise MeasureError(
            "only %d atoms survive cutoff %d radius %s; need at least 100"
            % (len(x), cfg.cutoff, cfg.radius)
        )
    c = (x * x + y * y - 1.0) / (2.0 * x)
    xi = c + np.sign(x) * np.sqrt(c * c + 1.0)
    logw = -cfg.exponent * d
    order = np.argsort(xi, kind="stable")
    xi, logw, d, ln = xi[order], logw[order], d[order], ln[order]
    logw = _log_normalize(logw)
    inside = np.zeros(len(xi), dtype=bool)
    for lo, hi in group.hull_intervals():
        inside |= (xi >= lo - 1e-12) & (xi <= hi + 1e-12)
    if not inside.all():
        raise MeasureError("atoms escaped the limit-set hull: %s" % (xi[~inside][:3],))
    return AtomicBoundaryMeasure(
        group=group,
        exponent=cfg.exponent,
        cutoff=cfg.cutoff,
        radius=cfg.radius,
        points=xi,
        log_weights=logw,
        displacements=d,
        lengths=ln,
    )


def _as_isometry_and_length(group: FuchsianGroup, gamma):
    if isinstance(gamma, Isometry):
        return gamma, 1
    if isinstance(gamma, Word):
        return gamma.matrix, len(gamma.letters)
    return group.word_matrix(gamma), len(gamma)


def conformality_defect(
    measure: AtomicBoundaryMeasure,
    gamma,
    hat_delta: float,
    match_tol: float = 1e-5,
) -> float:
    """Median deviation of matched atom pairs from the conformal scaling law.

    For atoms xi whose image gamma(xi) lands within match_tol of another
    atom eta, the defect is |log(w(eta)/w(xi)) - s beta_xi(o, gamma^-1 o)|.
    Matching is nearest-atom at the documented tolerance 1e-5, chosen
    between two scales: the image of an atom with a genuine combinatorial
    continuation in the truncated orbit lands exponentially close to it
    (e^-2d for depth d), while unrelated atoms sit at the mean spacing,
    around 1e-3 for the shipped groups. Source atoms are restricted to
    those whose continuation is guaranteed inside the truncation; without
    that restriction a deep atom would match the truncated prefix of its
    continuation, which carries an O(1) wrong weight.
    """
    m, glen = _as_isometry_and_length(measure.group, gamma)
    if isometry_distance(m, Isometry.identity()) < 1e-14:
        return 0.0
    a, b, c, d = m.entries()
    if measure.radius is not None:
        src = measure.displacements <= measure.radius - measure.group.displacement(m)
    else:
        src = measure.lengths + glen <= measure.cutoff
    xi = measure.points
    den = c * xi + d
    finite = src & (np.abs(den) > 1e-12)
    eta = np.zeros_like(xi)
    eta[finite] = (a * xi[finite] + b) / den[finite]
    j = np.searchsorted(measure.points, eta)
    cand = np.stack([np.clip(j - 1, 0, len(xi) - 1), np.clip(j, 0, len(xi) - 1)])
    dist = np.abs(measure.points[cand] - eta[None, :])
    pick = cand[np.argmin(dist, axis=0), np.arange(len(xi))]
    matched = finite & (np.abs(measure.points[pick] - eta) <= match_tol)
    if not matched.any():
        raise MeasureError("no atom pairs matched under %r" % (gamma,))
    q = mobius_apply(m.inverse(), UnitTangent.identity().base_point)
    beta = _busemann_at_origin(xi[matched], q.x, q.y)
    ratio = measure.log_weights[pick[matched]] - measure.log_weights[matched]
    return float(np.median(np.abs(ratio - hat_delta * beta)))


@dataclass
class ConditionalHorocycleMeasure:
    """Measure on a strong-unstable leaf in the flow-time parameter.

    The atom at parameter s stands for the vector h^s(u); weights stay in
    log space since the density blows up toward the backward endpoint.
    """

    leaf: UnitTangent
    exponent: float
    params: np.ndarray
    log_weights: np.ndarray

    def __len__(self) -> int:
        return len(self.params)

    def horoball_mass(self, r: float) -> float:
        if not r > 0:
            raise MeasureError("ball radius must be positive")
        sel = np.abs(self.params) < r
        if not sel.any():
            return 0.0
        return float(np.sum(np.exp(self.log_weights[sel])))


def conditional_on_horocycle(
    u: UnitTangent, measure: AtomicBoundaryMeasure, hat_delta: float
) -> ConditionalHorocycleMeasure:
    """Disintegrate the boundary measure over the expanding leaf of u.

    Every atom xi other than the backward endpoint of u is the forward
    endpoint of exactly one leaf vector h^s u; the parameter is the
    reciprocal of the frame pullback of xi, and the weight picks up
    exp(s beta_xi(o, base of h^s u)). Atoms at the backward endpoint are
    skipped. Pushing by the geodesic flow reweights atoms exactly: g^-t
    turns (s, lam) into (s e^-t, lam - s t), atom by atom.
    """
    ai, bi, ci, di = u.frame.inverse().entries()
    xi = measure.points
    num = ai * xi + bi
    den = ci * xi + di
    keep = np.abs(num) > 1e-13 * (np.abs(den) + 1.0)
    xi, num, den = xi[keep], num[keep], den[keep]
    s = den / num
    a, b, c, d = u.frame.entries()
    ds_den = (c + d * s) ** 2 + d * d
    px = ((a + b * s) * (c + d * s) + b * d) / ds_den
    py = 1.0 / ds_den
    lam = measure.log_weights[keep] + hat_delta * _busemann_at_origin(xi, px, py)
    order = np.argsort(s, kind="stable")
    return ConditionalHorocycleMeasure(
        leaf=u, exponent=hat_delta, params=s[order], log_weights=lam[order]
    )


def horoball_mass(cond: ConditionalHorocycleMeasure, r: float) -> float:
    """Mass of the leaf ball {h^s u : |s| < r}; nondecreasing in r."""
    return cond.horoball_mass(r)


# ------------------------------------------------------------- quadratures


def _direction_angles(c, d):
    # angle of the frame direction: arg(i / (c i + d)^2) without complex math
    return np.arctan2(d * d - c * c, 2.0 * c * d)


def _fundamental_mask(group: FuchsianGroup, x, y):
    inside = np.zeros(x.shape, dtype=bool)
    for ctr, rad in zip(group._centers, group._radii):
        inside |= (x - ctr) ** 2 + y * y < rad * rad
    return ~inside


def _evaluate(psi, x, y, theta):
    """Test-function values at already-reduced phase points."""
    return np.asarray(psi.evaluate_points(x, y, theta), dtype=float)


def _pair_field(measure, hat_delta, t_grid, top_k):
    """Fundamental-domain samples of the geodesic-pair quadrature.

    Returns flat arrays (x, y, theta, weight); the weight already carries
    both atom masses, the boundary-separation kernel and the grid cell
    width. Cached on the measure: the field is integrand-independent, so
    several test functions share one geometry pass.
    """
    key = (round(hat_delta, 12), len(t_grid), float(t_grid[0]), float(t_grid[-1]), top_k)
    hit = measure._pair_cache.get(key)
    if hit is not None:
        return hit
    idx = measure.heaviest(top_k)
    xi = measure.points[idx]
    lw = measure.log_weights[idx]
    n = len(xi)
    ii, jj = np.meshgrid(np.arange(n), np.arange(n), indexing="ij")
    ii, jj = ii.ravel(), jj.ravel()
    sep = np.abs(xi[ii] - xi[jj])
    ok = sep > 1e-12
    ii, jj, sep = ii[ok], jj[ok], sep[ok]
    # chordal-gap kernel for densities normalized at the origin i: the
    # Liouville case (exponent one, Poisson weights) must reduce to
    # dxi deta / (xi - eta)^2, which forces the (xi^2+1) factors.
    logw = (
        lw[ii]
        + lw[jj]
        - 2.0 * hat_delta * np.log(sep)
        + hat_delta * (np.log1p(xi[ii] ** 2) + np.log1p(xi[jj] ** 2))
    )
    logw -= np.max(logw)  # common scale cancels in the normalized integral
    dt = float(t_grid[1] - t_grid[0])
    parts = []
    for lo in range(0, len(ii), 4096):
        sl = slice(lo, lo + 4096)
        xm, xp = xi[ii[sl]], xi[jj[sl]]
        w = np.exp(logw[sl])
        # interval pairing matrix sending (0, inf) to (xm, xp), det one
        swap = xp <= xm
        a0 = xp
        b0 = np.where(swap, -xm, xm)
        c0 = np.ones_like(xp)
        d0 = np.where(swap, -1.0, 1.0)
        rs = 1.0 / np.sqrt(a0 * d0 - b0 * c0)
        a0, b0, c0, d0 = a0 * rs, b0 * rs, c0 * rs, d0 * rs
        bden = c0 * c0 + d0 * d0
        bx = (a0 * c0 + b0 * d0) / bden
        by = 1.0 / bden
        # leaf coordinate of the raw frame; flow so it matches the grid
        beta0 = -_busemann_at_origin(xm, bx, by)
        e = np.exp(0.5 * (t_grid[None, :] - beta0[:, None]))
        A = a0[:, None] * e
        B = b0[:, None] / e
        C = c0[:, None] * e
        D = d0[:, None] / e
        den = C * C + D * D
        X = (A * C + B * D) / den
        Y = 1.0 / den
        mask = _fundamental_mask(measure.group, X, Y)
        if mask.any():
            TH = _direction_angles(C[mask], D[mask])
            W = np.broadcast_to((w * dt)[:, None], mask.shape)[mask]
            parts.append((X[mask], Y[mask], TH, W))
    if not parts:
        raise MeasureError("pair quadrature found no fundamental-domain samples")
    out = tuple(np.concatenate([p[k] for p in parts]) for k in range(4))
    measure._pair_cache[key] = out
    return out


def ps_integral(
    psi,
    measure: AtomicBoundaryMeasure,
    hat_delta: float,
    t_grid: np.ndarray | None = None,
    top_k: int = 220,
) -> float:
    """Normalized integral against the product-form invariant measure.

    Double sum over atom pairs with the kernel |xi- - xi+|^(-2s), times a
    uniform leaf-coordinate grid, keeping only samples that lie in the
    fundamental domain (reduce word the identity); the same sum with the
    constant one divides out, so a constant integrates to itself exactly.
    """
    return quadrature_report(psi, measure, hat_delta, t_grid, top_k)[0]


def quadrature_report(
    psi,
    measure: AtomicBoundaryMeasure,
    hat_delta: float,
    t_grid: np.ndarray | None = None,
    top_k: int = 220,
) -> tuple[float, int, float]:
    """ps_integral together with its quadrature size: (estimate, cells, step)."""
    if t_grid is None:
        t_grid = np.arange(-8.0, 8.0 + 1e-9, 0.05)
    t_grid = np.asarray(t_grid, dtype=float)
    x, y, th, w = _pair_field(measure, hat_delta, t_grid, top_k)
    den = float(np.sum(w))
    if den <= 0.0:
        raise MeasureError("empty normalizer in the pair quadrature")
    est = float(np.sum(w * _evaluate(psi, x, y, th))) / den
    return est, int(len(w)), float(t_grid[1] - t_grid[0])


@dataclass(frozen=True)
class TransversalSlice:
    """Cells of a quadrature transverse to the expanding foliation.

    One cell per (atom, leaf coordinate); the holonomy-invariant density is
    exp(-s t) times the atom weight, stored in log space.
    """

    atom_points: np.ndarray
    t_values: np.ndarray
    log_density: np.ndarray

    def __post_init__(self):
        if not np.all(np.diff(self.t_values) > 0):
            raise MeasureError("transversal grid must be strictly increasing")


def _plaque_points(xi_minus, t, sigma):
    """Phase coordinates of h^sigma applied to the leaf frame with backward
    endpoint xi_minus and leaf coordinate t; sigma is the arc-length grid."""
    b0 = -np.log(xi_minus * xi_minus + 1.0)  # leaf coordinate of [[1, xm], [0, 1]]
    e = np.exp(0.5 * (t - b0))
    A = e[:, None] + (xi_minus / e)[:, None] * sigma[None, :]
    B = np.broadcast_to((xi_minus / e)[:, None], A.shape)
    C = (1.0 / e)[:, None] * sigma[None, :]
    D = np.broadcast_to((1.0 / e)[:, None], A.shape)
    den = C * C + D * D
    X = (A * C + B * D) / den
    Y = 1.0 / den
    return X, Y, C, D


def br_integral(
    psi,
    measure: AtomicBoundaryMeasure,
    hat_delta: float,
    t_grid: np.ndarray | None = None,
    sigma_span: float = 30.0,
    sigma_step: float = 0.05,
    window_span: float = 5.0,
    top_k: int = 200,
) -> float:
    """Box quadrature for the horocycle-invariant infinite measure.

    Outer sum over transversal cells (atom w-, leaf coordinate t) with
    density exp(-s t) w dt; inner arc-length integral of psi along the
    plaque through the cell, clipped to the fundamental domain. The global
    scale is fixed by declaring the reference window (the same cells, arc
    parameter within window_span) to have unit mass, so only ratios of
    these integrals carry meaning.
    """
    if t_grid is None:
        t_grid = np.arange(-4.0, 4.0 + 1e-9, 0.1)
    t_grid = np.asarray(t_grid, dtype=float)
    idx = measure.heaviest(top_k)
    xi = measure.points[idx]
    lw = measure.log_weights[idx]
    dt = float(t_grid[1] - t_grid[0])
    slate = TransversalSlice(
        atom_points=xi,
        t_values=t_grid,
        log_density=lw[:, None] - hat_delta * t_grid[None, :],
    )
    sigma = np.arange(-sigma_span, sigma_span + 1e-9, sigma_step)
    win = np.abs(sigma) <= window_span
    num = 0.0
    den = 0.0
    for k, t in enumerate(t_grid):
        scale = np.exp(slate.log_density[:, k]) * dt
        X, Y, C, D = _plaque_points(xi, np.full(len(xi), t), sigma)
        mask = _fundamental_mask(measure.group, X, Y)
        if mask.any():
            vals = np.zeros_like(X)
            vals[mask] = _evaluate(psi, X[mask], Y[mask], _direction_angles(C[mask], D[mask]))
            num += float(np.sum(scale * np.sum(vals, axis=1) * sigma_step))
        den += float(np.sum(scale * np.sum(mask[:, win], axis=1) * sigma_step))
    if den <= 0.0:
        raise MeasureError("reference window has zero mass")
    return num / den
