"""Perturbation series G = sum p_n, Gaussian envelopes and exponential lower bounds.

With the start point x fixed, the ratios r_n(u, z) = p_n(0, x, u, z) / g(u, x, z)
satisfy

    r_n(u, z) = int_0^u E[r_{n-1}(s, Z_s) V(Z_s)] ds,

where Z_s follows the bridge from x (time 0) to z (time u). The recursion is a
linear operator acting on functions of (u, z). It is discretized once on a
product grid: Chebyshev-Lobatto nodes in v = sqrt(u / t_max) times piecewise
Lagrange panels in space. Applying the matrix n times gives every term, and the
exact target (t, y) gets its own row.

The spatial variable is z itself for d = 1, and |z| for radial potentials with
one endpoint at the origin in d >= 2.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Sequence

import numpy as np

from .bridge_quad import (DEFAULT_QUAD, F_sup, PairGrid, QuadConfig, default_grid, f_sup, s_value)
from .kernel import BridgeSpec, DomainError, heat_kernel
from .potentials import Potential
from .quadrature import log_radial_density


@dataclass(frozen=True)
class SeriesConfig:
    n_v: int = 16
    panel_order: int = 6
    panel_width: float = 1.0
    grade_start: float = 0.02
    grade_ratio: float = 2.2
    k_s: int = 24
    n_gl: int = 10
    window_k: float = 8.0
    domain_k: float = 5.0
    tail_tol: float = 1e-6
    n_cap: int = 25
    richardson: bool = True
    chunk: int = 48

    def coarser(self) -> "SeriesConfig":
        return replace(self, n_v=self.n_v - 4, panel_order=self.panel_order - 2, k_s=self.k_s - 6,
                       n_gl=self.n_gl - 2, richardson=False)


DEFAULT_SERIES = SeriesConfig()


# ---------------------------------------------------------------------------
# interpolation bases


def _lobatto(n: int, a: float = 0.0, b: float = 1.0):
    k = np.arange(n)
    x = a + (b - a) * 0.5 * (1.0 - np.cos(np.pi * k / (n - 1)))
    w = (-1.0) ** k
    w[0] *= 0.5
    w[-1] *= 0.5
    return x, w


def _barycentric(nodes: np.ndarray, bw: np.ndarray, x: np.ndarray) -> np.ndarray:
    """Lagrange basis values at ``x`` (shape (..., n))."""
    diff = x[..., None] - nodes
    exact = diff == 0
    with np.errstate(divide="ignore", invalid="ignore"):
        t = bw / diff
        out = t / t.sum(axis=-1, keepdims=True)
    hit = exact.any(axis=-1)
    if np.any(hit):
        out[hit] = exact[hit].astype(float)
    return out


class _Panels:
    """Continuous piecewise Lagrange interpolation on consecutive panels."""

    def __init__(self, breaks: np.ndarray, order: int):
        self.breaks = np.asarray(breaks, dtype=float)
        self.order = order
        loc, self.bw = _lobatto(order + 1, -1.0, 1.0)
        self.loc = loc
        mids = 0.5 * (self.breaks[1:] + self.breaks[:-1])
        half = 0.5 * (self.breaks[1:] - self.breaks[:-1])
        nodes = (mids[:, None] + half[:, None] * loc[None, :])[:, :-1].ravel()
        self.nodes = np.append(nodes, self.breaks[-1])

    @property
    def size(self) -> int:
        return self.nodes.size

    def weights(self, z: np.ndarray):
        """Global node indices and weights, shape z.shape + (order+1,); zero outside the domain."""
        b = self.breaks
        k = np.clip(np.searchsorted(b, z, side="right") - 1, 0, b.size - 2)
        a0, a1 = b[k], b[k + 1]
        t = np.clip((2.0 * z - a0 - a1) / (a1 - a0), -1.0, 1.0)
        w = _barycentric(self.loc, self.bw, t)
        inside = (z >= b[0]) & (z <= b[-1])
        w = w * inside[..., None]
        idx = k[..., None] * self.order + np.arange(self.order + 1)
        return idx, w


def _graded_breaks(a: float, b: float, graded: set, cfg: SeriesConfig) -> list[float]:
    """Subdivide [a, b], refining geometrically towards endpoints listed in ``graded``."""
    pts = {a, b}
    mid = 0.5 * (a + b)
    for end, sign in ((a, 1.0), (b, -1.0)):
        if end in graded:
            h = cfg.grade_start
            pos = end
            while abs(mid - pos) > h:
                pos = pos + sign * h
                pts.add(pos)
                h = min(h * cfg.grade_ratio, cfg.panel_width)
    pts = sorted(pts)
    out = [pts[0]]
    for lo, hi in zip(pts[:-1], pts[1:]):
        n = max(1, int(math.ceil((hi - lo) / cfg.panel_width - 1e-9)))
        out.extend(lo + (hi - lo) * np.arange(1, n + 1) / n)
    return out


# ---------------------------------------------------------------------------
# the discretized recursion


def _support_radii(V: Potential) -> list[float]:
    return sorted({f.profile.radius for t in V.terms for f in t.factors if math.isfinite(f.profile.radius)})


def _singular(V: Potential) -> bool:
    return any(getattr(f.profile, "beta", 0.0) > 0 for t in V.terms for f in t.factors)


def series_supported(V: Potential, spec: BridgeSpec) -> bool:
    if V.dim == 1:
        return True
    return V.is_radial() and (not np.any(spec.x) or not np.any(spec.y))


class SeriesSolver:
    """Discretized ratio recursion for fixed V, start point x and horizon t_max."""

    def __init__(self, V: Potential, x, t_max: float, targets: Sequence = (), cfg: SeriesConfig = DEFAULT_SERIES):
        if not t_max > 0:
            raise DomainError("t_max must be positive")
        self.V, self.cfg, self.t_max = V, cfg, float(t_max)
        self.d = V.dim
        self.x = np.atleast_1d(np.asarray(x, dtype=float))
        self.radial = self.d > 1
        if self.radial:
            if not V.is_radial():
                raise NotImplementedError("series grid needs d = 1 or a radial potential")
            if np.any(self.x):
                raise NotImplementedError("radial series grid needs the start point at the origin")
        radii = _support_radii(V)
        span = 1.0 + cfg.domain_k * math.sqrt(t_max)
        ys = [float(np.linalg.norm(y)) if self.radial else float(np.atleast_1d(y)[0]) for y in targets]
        if self.radial:
            lo, hi = 0.0, max([span] + [abs(y) + span for y in ys] + [r + span for r in radii])
            feats = {0.0} | set(radii)
        else:
            x0 = float(self.x[0])
            pts = [x0] + ys
            lo = min(pts + [-r for r in radii]) - span
            hi = max(pts + radii) + span
            feats = {x0} | set(radii) | {-r for r in radii} | ({0.0} if _singular(V) else set())
        feats = sorted(f for f in feats if lo <= f <= hi)
        self.v_breaks = sorted({r for r in radii} | {-r for r in radii} | ({0.0} if _singular(V) else set()))
        self.sing = {0.0} if _singular(V) else set()
        edges = sorted({lo, hi} | set(feats))
        breaks = [edges[0]]
        graded = (set(radii) | {-r for r in radii} | self.sing) & set(feats)
        for a, b in zip(edges[:-1], edges[1:]):
            breaks.extend(_graded_breaks(a, b, graded, cfg)[1:])
        self.domain = (lo, hi)
        self.panels = _Panels(np.array(breaks), cfg.panel_order)
        self.v_nodes, self.v_bw = _lobatto(cfg.n_v)
        th, tw = np.polynomial.legendre.leggauss(cfg.k_s)
        self.theta = 0.5 * np.pi * (th + 1.0)
        self.theta_w = 0.5 * np.pi * tw
        self.gl_x, self.gl_w = np.polynomial.legendre.leggauss(cfg.n_gl)
        nz = self.panels.size
        self.size = cfg.n_v * nz
        u_grid = self.t_max * self.v_nodes**2
        U, Z = np.meshgrid(u_grid, self.panels.nodes, indexing="ij")
        self.K = self._rows(U.ravel(), Z.ravel())
        self._powers = None

    # -- spatial quadrature -------------------------------------------------
    def _window(self, mean, sd):
        k = self.cfg.window_k
        if self.radial:
            lo = np.maximum(mean - k * sd, 0.0)
            hi = mean + (k + math.sqrt(self.d)) * sd
        else:
            lo, hi = mean - k * sd, mean + k * sd
        lo = np.clip(lo, *self.domain)
        hi = np.clip(hi, *self.domain)
        cuts = [lo + (hi - lo) * j / 4.0 for j in range(5)]
        cuts += [np.clip(np.full_like(lo, b), lo, hi) for b in self.v_breaks]
        return np.sort(np.stack(cuts, axis=-1), axis=-1)

    def _nodes(self, edges):
        """Quadrature nodes and weights on each piece, refined towards singular points."""
        a, b = edges[..., :-1, None], edges[..., 1:, None]
        w01 = 0.5 * (self.gl_x + 1.0)
        ww = 0.5 * self.gl_w
        if self.sing:
            s = 0.0
            left = a == s
            right = b == s
            # z = a + L w^2 near a singular left end, mirrored at a right end
            L = b - a
            z = np.where(left, a + L * w01**2, np.where(right, b - L * w01**2, a + L * w01))
            jac = np.where(left | right, 2.0 * L * w01, L)
        else:
            z = a + (b - a) * w01
            jac = (b - a) * np.ones_like(w01)
        return z, jac * ww

    def _density(self, z, mean, sd):
        if self.radial:
            lam = mean / sd
            return np.exp(log_radial_density(z / sd, lam, self.d)) / sd
        return np.exp(-0.5 * ((z - mean) / sd) ** 2) / (math.sqrt(2.0 * math.pi) * sd)

    def _eval_V(self, z):
        if self.radial:
            pts = np.zeros(z.shape + (self.d,))
            pts[..., 0] = z
        else:
            pts = z[..., None]
        with np.errstate(invalid="ignore", divide="ignore"):
            v = self.V.eval(pts)
        return np.where(np.isfinite(v), v, 0.0)

    # -- assembly -------------------------------------------------------------
    def _rows(self, U: np.ndarray, Zt: np.ndarray) -> np.ndarray:
        """Rows mapping grid values of r_{n-1} to r_n at the points (U, Zt)."""
        nz = self.panels.size
        out = np.zeros((U.size, self.size))
        x0 = 0.0 if self.radial else float(self.x[0])
        ct = np.cos(self.theta)
        for start in range(0, U.size, self.cfg.chunk):
            sl = slice(start, start + self.cfg.chunk)
            u = U[sl][:, None]
            zt = Zt[sl][:, None]
            live = U[sl] > 0
            if not np.any(live):
                continue
            s = u * 0.5 * (1.0 - ct)
            c = u * 0.5 * (1.0 + ct)
            tw = u * 0.5 * np.sin(self.theta) * self.theta_w
            with np.errstate(invalid="ignore", divide="ignore"):
                mean = np.where(u > 0, (c * x0 + s * zt) / np.where(u > 0, u, 1.0), 0.0)
                sd = np.sqrt(np.where(u > 0, 2.0 * s * c / np.where(u > 0, u, 1.0), 0.0))
            sd = np.maximum(sd, 1e-300)
            if self.radial:
                mean = np.abs(mean)
            edges = self._window(mean, sd)
            z, w = self._nodes(edges)
            dens = self._density(z, mean[..., None, None], sd[..., None, None])
            coef = dens * w * self._eval_V(z)
            coef[~live] = 0.0
            idx, lw = self.panels.weights(z)
            rows, ks = coef.shape[:2]
            flat = (np.arange(rows * ks).reshape(rows, ks)[:, :, None, None, None] * nz + idx)
            A = np.bincount(flat.ravel(), (coef[..., None] * lw).ravel(), minlength=rows * ks * nz)
            A = A.reshape(rows, ks, nz)
            vq = np.sqrt(np.clip(s / self.t_max, 0.0, 1.0))
            T = tw[..., None] * _barycentric(self.v_nodes, self.v_bw, vq)
            out[sl] = np.matmul(T.transpose(0, 2, 1), A).reshape(rows, -1)
        return out

    def powers(self, n_max: int) -> list[np.ndarray]:
        """Grid values of r_0 .. r_{n_max - 1}."""
        if self._powers is None or len(self._powers) < n_max:
            R = [np.ones(self.size)]
            while len(R) < n_max:
                R.append(self.K @ R[-1])
            self._powers = R
        return self._powers[:n_max]

    def ratios(self, t: float, y, n_max: int) -> np.ndarray:
        """r_0 .. r_{n_max} at the target (t, y)."""
        if t > self.t_max * (1 + 1e-12):
            raise DomainError("target time exceeds the solver horizon")
        y = np.atleast_1d(np.asarray(y, dtype=float))
        zt = float(np.linalg.norm(y)) if self.radial else float(y[0])
        row = self._rows(np.array([t]), np.array([zt]))[0]
        R = self.powers(n_max)
        return np.array([1.0] + [float(row @ r) for r in R])


# ---------------------------------------------------------------------------
# certificate and truncation


def tail_bound(eta: float, t: float, h: float, N: int, v_sup: float = math.inf) -> float:
    """Bound on sum_{n > N} |r_n| for the ratio series.

    Applying the geometric bound to lambda |V| gives sum_n lambda^n r_n(|V|) <=
    (1/(1 - lambda eta))^(1 + t/h) for lambda eta < 1, hence the tail is at most
    B(lambda) lambda^(-N) / (lambda - 1). For bounded V the factorial bound
    sum_{n > N} (||V|| t)^n / n! also holds; the smaller value is returned.
    """
    best = math.inf
    if 0 <= eta < 1:
        if eta == 0:
            return 0.0
        # minimize over lambda in (1, 1/eta) on a log grid
        lams = np.exp(np.linspace(1e-6, math.log(1.0 / eta), 400)[1:-1])
        lams = lams[lams > 1.0]
        if lams.size:
            logb = -(1.0 + t / h) * np.log1p(-lams * eta) - N * np.log(lams) - np.log(lams - 1.0)
            best = float(np.exp(np.min(logb)))
    if math.isfinite(v_sup):
        a = v_sup * t
        term = math.exp(-math.lgamma(N + 2) + (N + 1) * math.log(a)) if a > 0 else 0.0
        # geometric majorant of the factorial tail
        ratio = a / (N + 2)
        fac = term / (1.0 - ratio) if ratio < 1 else math.inf
        best = min(best, fac)
    return best


@dataclass
class Certificate:
    eta: float
    h: float
    table: list = field(default_factory=list)
    grid_spec: str = ""


def certificate(V: Potential, t: float, cfg: QuadConfig = DEFAULT_QUAD, grid: PairGrid | None = None,
                levels: int = 6) -> Certificate:
    """eta = F(h) for |V| on h = t 2^-k, choosing the h that minimizes the 25-term tail bound.

    The suprema are grid estimates.
    """
    A = V.abs()
    if not A.abs_terms():
        return Certificate(0.0, t, [], "zero potential")
    grid = grid or default_grid(A)
    hs = [t * 2.0**-k for k in range(levels)][::-1]
    fs = [f_sup(A, h, grid, cfg).value for h in hs]
    table = []
    best = None
    running = 0.0
    for h, f in zip(hs, fs):
        running = max(running, f)
        table.append((h, running))
        bound = tail_bound(running, t, h, 25, V.sup_abs())
        if best is None or bound < best[0]:
            best = (bound, running, h)
    return Certificate(best[1], best[2], table, grid.description)


@dataclass
class SeriesEstimate:
    value: float
    ratio: float
    terms: list[float]
    n_max: int
    eta: float
    h: float
    truncation_bound: float
    tail_bound: float = 0.0
    discretization_error: float = 0.0
    flags: list[str] = field(default_factory=list)


def _choose_n(eta: float, t: float, h: float, v_sup: float, tol: float, cap: int) -> int:
    for n in range(1, cap + 1):
        if tail_bound(eta, t, h, n, v_sup) < tol:
            return n
    return cap


def _solver_for(V, spec, cfg, targets=()):
    if V.dim > 1 and np.any(spec.x):
        raise NotImplementedError("radial series grid needs x = 0")
    return SeriesSolver(V, spec.x, spec.t, targets or [spec.y], cfg)


def _oriented(V: Potential, spec: BridgeSpec) -> BridgeSpec:
    # G is symmetric in (x, y): put the origin at the start for radial grids
    if V.dim > 1 and np.any(spec.x) and not np.any(spec.y):
        return spec.reversed()
    return spec


def g_series(V: Potential, spec: BridgeSpec, cfg: QuadConfig = DEFAULT_QUAD, n_max: int | None = None,
             eta: float | None = None, h: float | None = None, series_cfg: SeriesConfig = DEFAULT_SERIES,
             solver: SeriesSolver | None = None, coarse: SeriesSolver | None = None) -> SeriesEstimate:
    """G(t, x, y) as the truncated perturbation series.

    The smallness certificate eta (a grid estimate of sup S(|V|) over times <= h)
    is computed when not supplied; eta >= 1 is refused.
    """
    if V.dim != spec.dim:
        raise DomainError("dimension mismatch")
    spec = _oriented(V, spec)
    if not series_supported(V, spec):
        raise NotImplementedError("series grid needs d = 1 or a radial potential with an endpoint at 0")
    g = heat_kernel(spec.t, spec.x, spec.y)
    flags = []
    if not V.terms:
        return SeriesEstimate(g, 1.0, [g], 0, 0.0, spec.t, 0.0)
    if eta is None:
        cert = certificate(V, spec.t, cfg) if h is None else Certificate(
            F_sup(V.abs(), h, None, cfg).value, h)
        eta, h = cert.eta, cert.h
    h = spec.t if h is None else h
    if not eta < 1:
        raise DomainError(f"smallness certificate failed: eta = {eta:.6g} >= 1")
    v_sup = V.sup_abs()
    n = n_max if n_max is not None else _choose_n(eta, spec.t, h, v_sup, series_cfg.tail_tol, series_cfg.n_cap)
    tail = tail_bound(eta, spec.t, h, n, v_sup)
    if tail >= series_cfg.tail_tol and n_max is None:
        flags.append("tail_bound_above_target")
    solver = solver or _solver_for(V, spec, series_cfg)
    r = solver.ratios(spec.t, spec.y, n)
    ratio = float(np.sum(r))
    disc = 0.0
    if series_cfg.richardson:
        coarse = coarse or _solver_for(V, spec, series_cfg.coarser(), [spec.y])
        disc = abs(ratio - float(np.sum(coarse.ratios(spec.t, spec.y, n))))
    if not ratio > 0:
        flags.append("nonpositive_value")
    return SeriesEstimate(g * ratio, ratio, list(g * r), n, eta, h, g * (tail + disc), g * tail, g * disc, flags)


def perturbation_term(n: int, V: Potential, spec: BridgeSpec, series_cfg: SeriesConfig = DEFAULT_SERIES) -> float:
    """p_n(0, x, t, y); p_0 = g."""
    if n < 0:
        raise DomainError("n must be >= 0")
    spec = _oriented(V, spec)
    g = heat_kernel(spec.t, spec.x, spec.y)
    if n == 0 or not V.terms:
        return g if n == 0 else 0.0
    solver = _solver_for(V, spec, series_cfg)
    return g * float(solver.ratios(spec.t, spec.y, n)[n])


def g_series_batch(V: Potential, specs: Sequence[BridgeSpec], cfg: QuadConfig = DEFAULT_QUAD,
                   series_cfg: SeriesConfig = DEFAULT_SERIES, grid: PairGrid | None = None) -> list[SeriesEstimate]:
    """g_series at many points with one certificate and one solver pair per start point.

    The certificate is taken at the largest t; it stays valid for shorter
    horizons because the tail bound only uses t through 1 + t/h.
    """
    specs = [_oriented(V, sp) for sp in specs]
    if not specs:
        return []
    if not V.terms:
        return [g_series(V, sp, cfg, series_cfg=series_cfg) for sp in specs]
    cert = certificate(V, max(sp.t for sp in specs), cfg, grid)
    groups: dict[tuple, list[int]] = {}
    for i, sp in enumerate(specs):
        groups.setdefault(tuple(sp.x), []).append(i)
    out: list = [None] * len(specs)
    for idx in groups.values():
        x = specs[idx[0]].x
        tm = max(specs[i].t for i in idx)
        targets = [specs[i].y for i in idx]
        solver = SeriesSolver(V, x, tm, targets, series_cfg)
        coarse = SeriesSolver(V, x, tm, targets, series_cfg.coarser()) if series_cfg.richardson else None
        for i in idx:
            out[i] = g_series(V, specs[i], cfg, eta=cert.eta, h=cert.h, series_cfg=series_cfg,
                              solver=solver, coarse=coarse)
    return out


# ---------------------------------------------------------------------------
# envelopes and lower bounds


@dataclass
class EnvelopeReport:
    ratio: float
    lower: float
    upper: float
    h: float
    eta: float
    passed: bool | None
    method: str = "series"
    ratio_error: float = 0.0
    flags: list[str] = field(default_factory=list)


def upper_envelope(eta: float, t: float, h: float) -> float:
    return (1.0 / (1.0 - eta)) ** (1.0 + t / h)


def envelope_check(V: Potential, spec: BridgeSpec, h: float | None = None, cfg: QuadConfig = DEFAULT_QUAD,
                   tol: float = 1e-6, eta_pos: float | None = None, ratio=None, grid: PairGrid | None = None,
                   series_cfg: SeriesConfig = DEFAULT_SERIES) -> EnvelopeReport:
    """exp(-S(V-, t, x, y)) <= G/g <= (1/(1-eta))^(1+t/h) with eta = sup_{t'<=h} S(V+).

    ``ratio`` may carry a precomputed (value, error, method) for G/g.
    """
    h = spec.t if h is None else h
    flags = []
    pos = V.positive_part()
    if eta_pos is None:
        eta_pos = F_sup(pos, h, grid or default_grid(V), cfg).value if pos.abs_terms() else 0.0
        flags.append("eta_is_grid_estimate")
    neg = V.negative_part()
    s_neg = s_value(neg, spec, cfg) if neg.abs_terms() else None
    lower = math.exp(-s_neg.value) if s_neg is not None else 1.0
    if s_neg is not None and s_neg.divergent:
        flags.append("S(V-)_divergent")
    hyp = eta_pos < 1 and math.isfinite(lower)
    upper = upper_envelope(eta_pos, spec.t, h) if eta_pos < 1 else math.inf
    if ratio is None:
        est = g_series(V, spec, cfg, series_cfg=series_cfg)
        value, err, method = est.ratio, est.truncation_bound / heat_kernel(spec.t, spec.x, spec.y), "series"
        flags += est.flags
    else:
        value, err, method = ratio
    if not hyp:
        flags.append("hypothesis_failed")
        return EnvelopeReport(value, lower, upper, h, eta_pos, None, method, err, flags)
    ok = lower - tol <= value <= upper + tol
    return EnvelopeReport(value, lower, upper, h, eta_pos, ok, method, err, flags)


@dataclass
class LowerExpConstants:
    C: float
    c: float
    F_T: float
    f_T: float
    T: float
    grid_spec: str
    checks: list = field(default_factory=list)
    violations: int = 0
    flags: list[str] = field(default_factory=list)


def lower_exp_constants(V: Potential, T: float, grid: PairGrid | None = None, cfg: QuadConfig = DEFAULT_QUAD,
                        times: Sequence[float] | None = None, check_points: Sequence = (),
                        series_cfg: SeriesConfig = DEFAULT_SERIES, tol: float = 1e-9) -> LowerExpConstants:
    """C = exp(-F(T)) and c = f(T)/T for V <= 0, with optional spot checks C e^{-ct} g <= G.

    ``check_points`` holds (t, x, y) triples checked against the series.
    """
    if V.terms and V.sign() > 0:
        raise DomainError("lower_exp_constants needs V <= 0")
    if not T > 0:
        raise DomainError("T must be positive")
    if not V.terms:
        return LowerExpConstants(1.0, 0.0, 0.0, 0.0, T, "zero potential")
    grid = grid or default_grid(V)
    Fm = F_sup(V, T, grid, cfg, times=times)
    fT = f_sup(V, T, grid, cfg)
    if Fm.divergent or not math.isfinite(Fm.value) or not math.isfinite(fT.value):
        raise DomainError("S is divergent: no exponential lower bound")
    F_T = max(Fm.value, fT.value)
    C, c = math.exp(-F_T), fT.value / T
    checks, bad = [], 0
    specs = [BridgeSpec(t, x, y) for t, x, y in check_points]
    for spec, est in zip(specs, g_series_batch(V, specs, cfg, series_cfg)):
        t, x, y = spec.t, spec.x, spec.y
        lhs = C * math.exp(-c * t) * heat_kernel(t, x, y)
        ok = lhs <= est.value + est.truncation_bound + tol * est.value
        bad += not ok
        checks.append((t, tuple(np.atleast_1d(x)), tuple(np.atleast_1d(y)), lhs, est.value, bool(ok)))
    return LowerExpConstants(C, c, F_T, fT.value, T, Fm.grid_spec, checks, bad, ["suprema_are_grid_estimates"])


@dataclass
class ConditionReport:
    eta: float
    h: float
    max_slack: float
    min_slack: float
    passed: bool
    table: list = field(default_factory=list)


def condition1_check(V: Potential, h: float, grid: PairGrid | None = None, cfg: QuadConfig = DEFAULT_QUAD,
                     taus: Sequence[float] | None = None) -> ConditionReport:
    """p_1 <= (eta + Q(s,t)) p_0 with eta = F(h), Q(s,t) = (t-s) F(h)/h, over grid pairs.

    p_1/p_0 for |V| over an interval of length tau is S(|V|, tau, x, y).
    """
    A = V.abs()
    if not A.abs_terms():
        return ConditionReport(0.0, h, 0.0, 0.0, True)
    grid = grid or default_grid(A)
    taus = list(taus) if taus is not None else [h * 2.0**k for k in range(-3, 3)]
    eta = F_sup(A, h, grid, cfg).value
    table = []
    slacks = []
    for tau in taus:
        est = f_sup(A, tau, grid, cfg)
        rhs = eta + tau * eta / h
        table.append((tau, est.value, rhs))
        slacks.append(rhs - est.value)
    return ConditionReport(eta, h, max(slacks), min(slacks), min(slacks) >= -cfg.rel_tol * max(1.0, eta), table)
