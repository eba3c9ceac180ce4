"""Bridge operators, the time-integrated bridge potential S(V, t, x, y) and its suprema.

S(V, t, x, y) = int_0^t T^{t,y}_s |V| (x) ds, where T^{t,y}_s averages against the
Gaussian law of the bridge at time s (mean ((t-s)x + s y)/t, per-coordinate
variance 2 s (t-s)/t). For tensor-product potentials the spatial average is a
product of one-dimensional radial integrals, one per block.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Sequence

import numpy as np
from scipy import special

from .kernel import BridgeSpec, DomainError, as_point
from .potentials import Factor, Potential, Term, ball_volume
from .quadrature import radial_expectation, tanh_sinh


@dataclass(frozen=True)
class QuadConfig:
    rel_tol: float = 1e-8
    abs_tol: float = 1e-12
    max_depth: int = 40
    tail_k: float = 10.0
    # endpoint exponents above this are flagged as slowly convergent
    time_singularity_exponent_cap: float = 0.75
    divergence_factor: float = 1.2
    divergence_probe_start: float = 1e-2
    divergence_probe_steps: int = 14
    partial_cutoffs: tuple[float, ...] = (1e-2, 1e-3, 1e-4, 1e-5, 1e-6)
    threads: int = 1

    def __post_init__(self):
        if not (self.rel_tol > 0 and self.abs_tol > 0):
            raise DomainError("tolerances must be positive")
        if not (0 <= self.time_singularity_exponent_cap < 1):
            raise DomainError("time_singularity_exponent_cap must lie in [0, 1)")

    @property
    def outer_level(self) -> int:
        return max(4, min(self.max_depth, 9))

    @property
    def inner_tol(self) -> float:
        return min(1e-10, self.rel_tol * 1e-2)


DEFAULT_QUAD = QuadConfig()


def pmap(fn, items, threads: int = 1):
    """Order-preserving map, threaded when ``threads > 1``."""
    items = list(items)
    if threads <= 1 or len(items) < 2:
        return [fn(it) for it in items]
    with ThreadPoolExecutor(max_workers=threads) as ex:
        return list(ex.map(fn, items))


# ---------------------------------------------------------------------------
# spatial averages


def _term_average(term: Term, mean_x: np.ndarray, mean_y: np.ndarray, sig: np.ndarray, comp: np.ndarray,
                  var: np.ndarray, cfg: QuadConfig):
    """prod over blocks of E[profile(|Z_b|)], Z ~ N(mean, var I), for batched times.

    ``sig`` and ``comp`` are s/t and (t-s)/t, so the block mean is
    comp * x_b + sig * y_b.
    """
    out = np.ones_like(sig)
    err = np.zeros_like(sig)
    ok = np.ones(sig.shape, dtype=bool)
    sd = np.sqrt(var)
    for a, b, f in term.blocks():
        xb, yb = mean_x[a:b], mean_y[a:b]
        mu = np.linalg.norm(comp[:, None] * xb[None, :] + sig[:, None] * yb[None, :], axis=1)
        res = radial_expectation(f.profile, f.dim, mu, sd, tail_k=cfg.tail_k, rel_tol=cfg.inner_tol)
        with np.errstate(invalid="ignore"):
            err = err * np.abs(res.value) + np.abs(out) * res.error
            out = out * res.value
        ok &= res.converged
    return out, err, ok


def _generic_average_1d(func: Callable, mean: np.ndarray, sd: np.ndarray, breakpoints: Sequence[float],
                        cfg: QuadConfig):
    """E[func(Z)] for Z ~ N(mean, sd^2) on the line, split at the given breakpoints."""
    n = mean.shape[0]
    lo = mean - cfg.tail_k * sd
    hi = mean + cfg.tail_k * sd
    edges = [lo] + [np.clip(np.full(n, b), lo, hi) for b in sorted(breakpoints)] + [hi]
    total = np.zeros(n)
    err = np.zeros(n)
    ok = np.ones(n, dtype=bool)
    for a, b in zip(edges[:-1], edges[1:]):
        def integrand(rows, z, dl, dr, a=a):
            m, s = mean[rows, None], sd[rows, None]
            dens = np.exp(-0.5 * ((z - m) / s) ** 2) / (math.sqrt(2 * math.pi) * s)
            return func(z) * dens
        res = tanh_sinh(integrand, a, b, rel_tol=cfg.inner_tol, abs_tol=1e-300, max_level=8)
        total += res.value
        err += res.error
        ok &= res.converged
    return total, err, ok


def _abs_integrand_factory(V: Potential, spec: BridgeSpec, cfg: QuadConfig):
    """Return E(sig, comp) -> (T_s |view| (x), error, converged) with s = sig * t."""
    t = spec.t
    if V.dim != spec.dim:
        raise DomainError(f"potential lives in R^{V.dim}, bridge in R^{spec.dim}")
    try:
        terms = V.abs_terms()
    except DomainError:
        if V.dim != 1:
            raise
        terms = None
    if terms is None:
        breaks = sorted({0.0} | {s * f.profile.radius for tm in V.terms for f in tm.factors
                                 for s in (-1.0, 1.0) if math.isfinite(f.profile.radius)})
        view = V if V.part != "signed" else V.abs()

        def E(sig, comp):
            mean = comp * spec.x[0] + sig * spec.y[0]
            sd = np.sqrt(2.0 * t * sig * comp)
            return _generic_average_1d(lambda z: view.eval(z[..., None]), mean, sd, breaks, cfg)
        return E

    def E(sig, comp):
        var = 2.0 * t * sig * comp
        total = np.zeros_like(sig)
        err = np.zeros_like(sig)
        ok = np.ones(sig.shape, dtype=bool)
        for term in terms:
            v, e, o = _term_average(term, spec.x, spec.y, sig, comp, var, cfg)
            total += term.coeff * v
            err += term.coeff * e
            ok &= o
        return total, err, ok
    return E


def bridge_apply(f, s: float, spec: BridgeSpec, cfg: QuadConfig = DEFAULT_QUAD) -> tuple[float, float]:
    """T^{t,y}_s f (x) and an error estimate.

    ``f`` may be a :class:`Potential` (its view is applied linearly), a radial
    profile on R^d, or a callable of points of shape (..., d).
    """
    if not (0 < s < spec.t):
        raise DomainError(f"s must lie in (0, t), got {s}")
    sig = np.array([s / spec.t])
    comp = np.array([(spec.t - s) / spec.t])
    var = 2.0 * s * (spec.t - s) / spec.t
    if isinstance(f, Potential):
        if f.part == "signed":
            total, err = 0.0, 0.0
            for term in f.terms:
                v, e, ok = _term_average(term, spec.x, spec.y, sig, comp, np.array([var]), cfg)
                if not ok[0]:
                    raise ArithmeticError("bridge quadrature did not converge")
                total += term.coeff * float(v[0])
                err += abs(term.coeff) * float(e[0])
            return total, err
        v, e, ok = _abs_integrand_factory(f, spec, cfg)(sig, comp)
        if not ok[0]:
            raise ArithmeticError("bridge quadrature did not converge")
        return float(v[0]), float(e[0])
    if hasattr(f, "inner_log"):
        term = Term(1.0, (Factor(f, spec.dim),))
        v, e, ok = _term_average(term, spec.x, spec.y, sig, comp, np.array([var]), cfg)
        return float(v[0]), float(e[0])
    mean = comp[0] * spec.x + sig[0] * spec.y
    sd = math.sqrt(var)
    if spec.dim == 1:
        v, e, _ = _generic_average_1d(lambda z: np.asarray(f(z[..., None]), dtype=float),
                                      mean, np.array([sd]), [], cfg)
        return float(v[0]), float(e[0])
    # tensor Gauss-Hermite for smooth callables in low dimension
    nodes, weights = special.roots_hermitenorm(40)
    weights = weights / math.sqrt(2 * math.pi)
    grids = np.meshgrid(*([nodes] * spec.dim), indexing="ij")
    pts = mean + sd * np.stack([g.ravel() for g in grids], axis=-1)
    w = np.prod(np.stack(np.meshgrid(*([weights] * spec.dim), indexing="ij")), axis=0).ravel()
    return float(np.sum(w * np.asarray(f(pts), dtype=float))), float("nan")


# ---------------------------------------------------------------------------
# the S functional


@dataclass
class SResult:
    value: float
    error: float
    divergent: bool = False
    partial: dict[float, float] = field(default_factory=dict)
    endpoint_exponents: tuple[float, float] = (0.0, 0.0)
    flags: list[str] = field(default_factory=list)

    def __float__(self):
        return self.value


def _probe_endpoint(E, t: float, cfg: QuadConfig):
    """Increments of the time integral over [delta/4, delta] as delta -> 0 at both ends."""
    gl_x, gl_w = np.polynomial.legendre.leggauss(10)
    k = np.arange(cfg.divergence_probe_steps)
    hi = cfg.divergence_probe_start * 4.0**-k
    log_lo, log_hi = np.log(hi / 4.0), np.log(hi)
    half = 0.5 * (log_hi - log_lo)
    logs = (0.5 * (log_hi + log_lo))[:, None] + half[:, None] * gl_x[None, :]
    sm = np.exp(logs).ravel()
    w = (half[:, None] * gl_w[None, :] * np.exp(logs)).ravel()
    left, _, _ = E(sm, 1.0 - sm)
    right, _, _ = E(1.0 - sm, sm)
    inc_l = t * (left * w).reshape(k.size, -1).sum(axis=1)
    inc_r = t * (right * w).reshape(k.size, -1).sum(axis=1)
    return inc_l, inc_r


def _diverges(inc: np.ndarray, factor: float) -> tuple[bool, float]:
    """Divergence when the last three increments fail to shrink by ``factor``."""
    if not np.all(np.isfinite(inc)):
        return True, math.inf
    tail = inc[-4:]
    if np.any(tail <= 1e-300):
        return False, 0.0
    ratios = tail[1:] / tail[:-1]
    alpha = 1.0 + math.log(ratios[-1]) / math.log(4.0)
    return bool(np.all(ratios >= 1.0 / factor)), alpha


def _time_integral(E, t: float, lo: float, hi: float, cfg: QuadConfig):
    """t * int_lo^hi E(sig) dsig with accurate complements 1 - sig."""
    one_minus_hi = 1.0 - hi if hi < 1.0 else 0.0

    def integrand(rows, x, dl, dr):
        sig = lo + dl[0]
        comp = one_minus_hi + dr[0]
        v, _, _ = E(sig, comp)
        return v[None, :]

    res = tanh_sinh(integrand, [lo], [hi], rel_tol=cfg.rel_tol, abs_tol=cfg.abs_tol / max(t, 1e-300),
                    min_level=3, max_level=cfg.outer_level)
    return t * float(res.value[0]), t * float(res.error[0]), bool(res.converged[0])


def s_value(V: Potential, spec: BridgeSpec, cfg: QuadConfig = DEFAULT_QUAD, partial: bool = False) -> SResult:
    """S(V, t, x, y) = int_0^t T^{t,y}_s |V| (x) ds with a divergence verdict.

    For a signed potential the absolute value is integrated; for the views
    V+ / V- the corresponding part is.
    """
    E = _abs_integrand_factory(V if V.part != "signed" else V.abs(), spec, cfg)
    if not V.terms:
        return SResult(0.0, 0.0)
    t = spec.t
    inc_l, inc_r = _probe_endpoint(E, t, cfg)
    div_l, a_l = _diverges(inc_l, cfg.divergence_factor)
    div_r, a_r = _diverges(inc_r, cfg.divergence_factor)
    flags = []
    parts = {}
    if div_l or div_r or partial:
        for delta in cfg.partial_cutoffs:
            parts[delta] = _time_integral(E, t, delta, 1.0 - delta, cfg)[0]
    if div_l or div_r:
        flags.append("divergent")
        return SResult(math.inf, math.inf, True, parts, (a_l, a_r), flags)
    if max(a_l, a_r) > cfg.time_singularity_exponent_cap:
        flags.append("strong_endpoint_singularity")
    value, err, ok = _time_integral(E, t, 0.0, 1.0, cfg)
    if not ok:
        flags.append("quadrature_not_converged")
    if not math.isfinite(value):
        flags.append("error:nonfinite_without_divergence_verdict")
    return SResult(value, err, False, parts, (a_l, a_r), flags)


def s_values_along_t(V: Potential, x, y, ts: Sequence[float], cfg: QuadConfig = DEFAULT_QUAD) -> list[SResult]:
    return pmap(lambda t: s_value(V, BridgeSpec(t, x, y), cfg), ts, cfg.threads)


# ---------------------------------------------------------------------------
# grids and suprema


@dataclass(frozen=True)
class PairGrid:
    """Finite set of (x, y) pairs over which suprema are estimated."""

    pairs: tuple[tuple[tuple[float, ...], tuple[float, ...]], ...]
    description: str

    @staticmethod
    def from_pairs(pairs, description: str = "explicit") -> "PairGrid":
        out = tuple((tuple(map(float, as_point(x))), tuple(map(float, as_point(y)))) for x, y in pairs)
        return PairGrid(out, description)

    def arrays(self):
        return [(np.array(x), np.array(y)) for x, y in self.pairs]

    def __len__(self):
        return len(self.pairs)


DEFAULT_RADII = (0.0, 0.25, 0.5, 1.0, 2.0, 4.0)


def block_starts(V: Potential) -> list[int]:
    starts = {0}
    for term in V.terms:
        for a, _, _ in term.blocks():
            starts.add(a)
    return sorted(starts)


def default_grid(V: Potential, radii: Sequence[float] = DEFAULT_RADII, antipodal: bool = True) -> PairGrid:
    """x = y = 0, diagonal pairs at axis points of every block, plus antipodal pairs."""
    d = V.dim
    points = [np.zeros(d)]
    for start in block_starts(V):
        for r in radii:
            if r > 0:
                p = np.zeros(d)
                p[start] = r
                points.append(p)
    pairs = [(p, p) for p in points]
    if antipodal:
        pairs += [(p, -p) for p in points[1:]]
    desc = f"default(radii={list(radii)}, blocks={block_starts(V)}, antipodal={antipodal})"
    return PairGrid.from_pairs(pairs, desc)


def origin_grid(d: int) -> PairGrid:
    return PairGrid.from_pairs([(np.zeros(d), np.zeros(d))], "origin")


def segment_grid(x, y, n: int = 5) -> PairGrid:
    """Pairs (x, w) and (w, y) for w on the segment [x, y], plus (x, x) and (y, y)."""
    x, y = as_point(x), as_point(y)
    ws = [x + (y - x) * k / n for k in range(n + 1)]
    pairs = [(x, w) for w in ws] + [(w, y) for w in ws] + [(w, w) for w in ws]
    return PairGrid.from_pairs(pairs, f"segment(n={n})")


@dataclass
class SupEstimate:
    value: float
    arg: tuple
    grid_spec: str
    is_lower_bound: bool = True
    t: float | None = None
    divergent: bool = False
    flags: list[str] = field(default_factory=list)
    table: list[tuple] = field(default_factory=list)


def f_sup(V: Potential, t: float, grid: PairGrid | None = None, cfg: QuadConfig = DEFAULT_QUAD) -> SupEstimate:
    """Grid maximum of S(V, t, ., .); a lower estimate of sup_{x,y} S."""
    if not t > 0:
        raise DomainError("t must be positive")
    grid = grid or default_grid(V)
    results = pmap(lambda xy: s_value(V, BridgeSpec(t, xy[0], xy[1]), cfg), grid.arrays(), cfg.threads)
    vals = [r.value for r in results]
    i = int(np.argmax(vals))
    flags = sorted({f for r in results for f in r.flags})
    table = [(grid.pairs[j], results[j].value) for j in range(len(results))]
    return SupEstimate(vals[i], grid.pairs[i], grid.description, True, t, results[i].divergent, flags, table)


def default_time_grid(t: float, n: int = 6) -> list[float]:
    """Geometric times in (0, t], ending at t."""
    return [t * 2.0 ** -(n - 1 - k) for k in range(n)]


def F_sup(V: Potential, t: float, grid: PairGrid | None = None, cfg: QuadConfig = DEFAULT_QUAD,
          times: Sequence[float] | None = None) -> SupEstimate:
    """Running maximum of f_sup over a time grid in (0, t]."""
    times = sorted(times) if times is not None else default_time_grid(t)
    if any(s <= 0 or s > t for s in times):
        raise DomainError("time grid must lie in (0, t]")
    best = None
    table = []
    for s in times:
        est = f_sup(V, s, grid, cfg)
        table.append((s, est.value))
        if best is None or est.value > best.value:
            best = est
    best = SupEstimate(best.value, best.arg, best.grid_spec + f"; times={list(times)}", True, best.t,
                       best.divergent, best.flags, table)
    return best


# ---------------------------------------------------------------------------
# bound constants


def lp_bridge_constant(d: int, p: float) -> float:
    """C(d, p) of the heat-semigroup L^p -> L^inf estimate; C(d, inf) = 1."""
    if p < 1:
        raise DomainError("p must be >= 1")
    if p == 1:
        return (4.0 * math.pi) ** (-0.5 * d)
    if p == math.inf:
        return 1.0
    q = 1.0 - 1.0 / p
    return (4.0 * math.pi) ** (-d / (2.0 * p)) * q ** (q * d / 2.0)


def lp_bridge_bound(d: int, p: float, s: float, t: float, norm: float) -> float:
    """C(d,p) [(t-s)s/t]^(-d/(2p)) ||f||_p."""
    expo = 0.0 if p == math.inf else d / (2.0 * p)
    return lp_bridge_constant(d, p) * ((t - s) * s / t) ** (-expo) * norm


def beta_time_constant(alpha: float) -> float:
    """int_0^1 [s(1-s)]^(-alpha) ds = Gamma(1-alpha)^2 / Gamma(2-2 alpha), alpha < 1."""
    if not alpha < 1:
        raise DomainError("time exponent must be < 1")
    return math.exp(2.0 * special.gammaln(1.0 - alpha) - special.gammaln(2.0 - 2.0 * alpha))


def zhang_bound_a(V: Potential, p: float, t: float) -> float:
    """c t^(1-d/(2p)) with c = C(d,p) Gamma(1-d/2p)^2 / Gamma(2-d/p) ||V||_p."""
    d = V.dim
    if not p > d / 2.0:
        raise DomainError(f"need p > d/2 = {d / 2}")
    norm = V.lp_norm_bound(p)
    if not math.isfinite(norm):
        raise DomainError(f"||V||_{p} is infinite")
    alpha = 0.0 if p == math.inf else d / (2.0 * p)
    c = lp_bridge_constant(d, p) * beta_time_constant(alpha) * norm
    return c * t ** (1.0 - alpha)


def balance_p1(d1: int, d2: int, p2: float) -> float:
    """p1 solving d1/(2 p1) + d2/(2 p2) = 1."""
    rest = 1.0 - (0.0 if p2 == math.inf else d2 / (2.0 * p2))
    if rest <= 0:
        raise DomainError("balance condition has no solution with p1 <= inf")
    p1 = d1 / (2.0 * rest)
    if p1 < 1:
        raise DomainError(f"balance condition gives p1 = {p1:g} < 1")
    return p1


def _tensor_factors(V: Potential, split: tuple[int, int] | None):
    if len(V.terms) != 1:
        raise DomainError("tensor bounds need a single-term potential")
    term = V.terms[0]
    facs = list(term.factors)
    if split is not None and (len(facs) != 2 or (facs[0].dim, facs[1].dim) != tuple(split)):
        # merge / reorder is not supported: blocks must match the split exactly
        raise DomainError(f"potential blocks {[f.dim for f in facs]} do not match split {split}")
    if len(facs) != 2:
        raise DomainError("tensor bounds need exactly two factor blocks")
    return term.coeff, facs[0], facs[1]


def extended_bound_a(V: Potential, r: float, p2: float, t: float, split: tuple[int, int] | None = None):
    """Sharp local bound c t^(1 - d1/(2r) - d2/(2p2)) for V = V1(x1) V2(x2)."""
    coeff, f1, f2 = _tensor_factors(V, split)
    d1, d2 = f1.dim, f2.dim
    p1 = balance_p1(d1, d2, p2)
    if not r > p1:
        raise DomainError(f"need r > p1 = {p1:g}")
    alpha = (0.0 if r == math.inf else d1 / (2.0 * r)) + (0.0 if p2 == math.inf else d2 / (2.0 * p2))
    n1 = f1.profile.lp_norm(r, d1)
    n2 = f2.profile.lp_norm(p2, d2)
    if not (math.isfinite(n1) and math.isfinite(n2)):
        raise DomainError("factor norms must be finite")
    c = (lp_bridge_constant(d1, r) * lp_bridge_constant(d2, p2) * beta_time_constant(alpha)
         * abs(coeff) * n1 * n2)
    return c * t ** (1.0 - alpha)


def extended_exponent(d1: int, d2: int, r: float, p2: float) -> float:
    return 1.0 - (0.0 if r == math.inf else d1 / (2.0 * r)) - (0.0 if p2 == math.inf else d2 / (2.0 * p2))


def _finite_range(profile, m: int) -> tuple[float, float, bool, bool]:
    """Exponents p in [1, inf] with ||profile||_p < inf as (lo, hi, lo_closed, hi_closed)."""
    c = profile.constant_value()
    if c is not None:
        return (1.0, math.inf, True, True) if c == 0 else (math.inf, math.inf, True, True)
    if hasattr(profile, "beta"):
        if profile.beta == 0:
            return 1.0, math.inf, True, True
        return 1.0, m / profile.beta, True, False
    lo = m / profile.exponent
    return (max(1.0, lo), math.inf, lo < 1.0, True)


def _in_range(p, rng) -> bool:
    lo, hi, lc, hc = rng
    above = p > lo or (lc and p == lo)
    below = p < hi or (hc and p == hi)
    return above and below


def admissible_chains(V: Potential, n: int = 3) -> list[dict]:
    """Exponent choices 1 <= q < p1 < r, p2 with d1/(2p1) + d2/(2p2) = 1 and finite norms.

    Tries both block orders of a two-factor single-term potential and returns up
    to ``n`` choices per order.
    """
    if len(V.terms) != 1 or len(V.terms[0].factors) != 2:
        return []
    out = []
    f_a, f_b = V.terms[0].factors
    for first, second in ((f_a, f_b), (f_b, f_a)):
        d1, d2 = first.dim, second.dim
        rng1 = _finite_range(first.profile, d1)
        rng2 = _finite_range(second.profile, d2)
        lo = max(1.0, rng1[0], d1 / 2.0)
        hi = rng1[1] if math.isfinite(rng1[1]) else 4.0 * max(lo, 1.0) + 4.0
        if not hi > lo:
            continue
        for frac in np.linspace(0.0, 1.0, n + 2)[1:-1]:
            p1 = lo + frac * (hi - lo)
            rest = 1.0 - d1 / (2.0 * p1)
            p2 = d2 / (2.0 * rest) if rest > 0 else math.inf
            if p2 < 1 or not _in_range(p2, rng2):
                continue
            q = max(1.0, rng1[0]) if _in_range(max(1.0, rng1[0]), rng1) else 0.5 * (rng1[0] + p1)
            if not q < p1:
                continue
            r = 0.5 * (p1 + hi)
            if not (_in_range(q, rng1) and _in_range(r, rng1)):
                continue
            small = d1 / (2.0 * r) + d2 / (2.0 * p2)
            large = d1 / (2.0 * q) + d2 / (2.0 * p2)
            out.append({
                "d1": d1, "d2": d2, "q": q, "p1": p1, "r": r, "p2": p2,
                "balance": d1 / (2.0 * p1) + d2 / (2.0 * p2),
                "small_time_exponent": small, "large_time_exponent": large,
                "chain_holds": bool(1.0 <= q < p1 < r),
                "norms": {"q": first.profile.lp_norm(q, d1), "r": first.profile.lp_norm(r, d1),
                          "p2": second.profile.lp_norm(p2, d2)},
                "factor_order": "as_given" if first is f_a else "swapped",
            })
    return out


@dataclass
class GlobalBoundReport:
    hypotheses: dict
    small_time_piece: float
    large_time_piece: float
    short_time_bound: float
    analytic_bound: float
    measured_sup: float | None
    verdict: str
    constant_origin: str = "derived from the split of the time integral at t/2; not a printed constant"
    table: list = field(default_factory=list)


def global_condition_b(V: Potential, q: float, r: float, p2: float | None = None,
                       split: tuple[int, int] | None = None, time_grid: Sequence[float] | None = None,
                       space_grid: PairGrid | None = None, cfg: QuadConfig = DEFAULT_QUAD) -> GlobalBoundReport:
    """Explicit uniform-in-time bound on S from the small-time / large-time split.

    Without ``split``, ``V`` is treated as one block and ``r`` plays the role of
    the exponent p > d/2 (with q < d/2). With a split, V = V1(x1) V2(x2) and the
    exponents are d1/(2r) + d2/(2p2) < 1 < d1/(2q) + d2/(2p2).

    For t > 2, int_0^{t/2} is bounded by the r-piece on [0, 1] plus the q-piece on
    [1, inf), using (t-s)s/t >= s/2 for s <= t/2; the other half is symmetric.
    For t <= 2 the short-time bound at t = 2 applies.
    """
    if split is None:
        d = V.dim
        a_small, a_large = d / (2.0 * r) if r != math.inf else 0.0, d / (2.0 * q)
        c_small = lp_bridge_constant(d, r) * V.lp_norm_bound(r)
        c_large = lp_bridge_constant(d, q) * V.lp_norm_bound(q)
        hyp = {"q": q, "p": r, "d": d, "q<d/2<p": bool(q < d / 2.0 < r)}
        norms_ok = math.isfinite(c_small) and math.isfinite(c_large)
    else:
        coeff, f1, f2 = _tensor_factors(V, split)
        d1, d2 = f1.dim, f2.dim
        if p2 is None:
            raise DomainError("p2 is required with a split")
        p1 = balance_p1(d1, d2, p2)
        e2 = 0.0 if p2 == math.inf else d2 / (2.0 * p2)
        a_small = (0.0 if r == math.inf else d1 / (2.0 * r)) + e2
        a_large = d1 / (2.0 * q) + e2
        n2 = f2.profile.lp_norm(p2, d2)
        c_small = lp_bridge_constant(d1, r) * lp_bridge_constant(d2, p2) * abs(coeff) * f1.profile.lp_norm(r, d1) * n2
        c_large = lp_bridge_constant(d1, q) * lp_bridge_constant(d2, p2) * abs(coeff) * f1.profile.lp_norm(q, d1) * n2
        hyp = {"q": q, "p1": p1, "r": r, "p2": p2, "d1": d1, "d2": d2, "1<=q<p1<r": bool(1 <= q < p1 < r)}
        norms_ok = math.isfinite(c_small) and math.isfinite(c_large)
    hyp["norms_finite"] = bool(norms_ok)
    if not a_large > 1:
        raise DomainError(f"large-time exponent {a_large:g} <= 1: the tail integral diverges")
    if not a_small < 1:
        raise DomainError(f"small-time exponent {a_small:g} >= 1")
    small_piece = c_small * 2.0**a_small / (1.0 - a_small)
    large_piece = c_large * 2.0**a_large / (a_large - 1.0)
    short = c_small * beta_time_constant(a_small) * 2.0 ** (1.0 - a_small)
    bound = max(2.0 * (small_piece + large_piece), short)
    measured = None
    table = []
    hyp_ok = all(v for k, v in hyp.items() if isinstance(v, bool))
    if time_grid is not None and norms_ok:
        grid = space_grid or default_grid(V)
        for t in time_grid:
            est = f_sup(V, t, grid, cfg)
            table.append((t, est.value))
        measured = max(v for _, v in table)
    if not hyp_ok:
        verdict = "hypotheses fail"
    elif measured is None:
        verdict = "analytic bound only"
    elif measured <= bound:
        verdict = "global bound certified at grid scale"
    else:
        verdict = "measured S exceeds analytic bound"
    return GlobalBoundReport(hyp, small_piece, large_piece, short, bound, measured, verdict, table=table)


# ---------------------------------------------------------------------------
# drugi suprema


DRUGI_TIMES = (0.1, 0.5, 2.0, 8.0)


def drugi_grid(d: int) -> PairGrid:
    pts = [np.zeros(d)]
    for start in (0, 1):
        p = np.zeros(d)
        p[start] = 0.5
        pts.append(p)
    pairs = [(p, p) for p in pts] + [(p, -p) for p in pts[1:]]
    return PairGrid.from_pairs(pairs, "drugi(points={0, 0.5 e1, 0.5 e2}, antipodal)")


@lru_cache(maxsize=16)
def drugi_sup_estimates(n_terms: int, d: int = 3) -> dict[int, float]:
    """Grid estimates of a_n = sup_{t,x,y} S(V_n) for n = 2..n_terms (lower estimates)."""
    from .potentials import drugi_component

    out = {}
    grid = drugi_grid(d)
    for n in range(2, n_terms + 1):
        est = F_sup(drugi_component(n, d), max(DRUGI_TIMES), grid, times=DRUGI_TIMES)
        out[n] = est.value
    return out


def unit_ball_volume(m: int) -> float:
    return ball_volume(m, 1.0)
