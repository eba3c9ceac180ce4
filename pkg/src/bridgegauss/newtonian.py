"""Newtonian potentials -Delta^{-1} f and potential-boundedness diagnostics."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy import integrate, special

from .bridge_quad import DEFAULT_QUAD, QuadConfig, _diverges, pmap
from .kernel import DomainError, as_point
from .potentials import Constant, Factor, IndicatorBall, Potential, PowerIndicator, SmoothDecay, Term, sphere_area
from .quadrature import radial_expectation, tanh_sinh, tanh_sinh_scalar


def newton_constant(d: int) -> float:
    """C_d = Gamma(d/2 - 1) / (4 pi^(d/2)), d >= 3."""
    if d < 3:
        raise DomainError("C_d is defined for d >= 3")
    return math.exp(special.gammaln(0.5 * d - 1.0)) / (4.0 * math.pi ** (0.5 * d))


@dataclass
class NewtonianResult:
    value: float
    at: np.ndarray
    method: str
    error: float = 0.0
    flags: list[str] = field(default_factory=list)


def _power_radial(beta: float, R: float, a: float, d: int) -> float:
    """(1/(d-2)) int_0^R r^(d-1-beta) max(r, a)^(2-d) dr."""
    if beta >= d:
        return math.inf
    inner = min(a, R)
    total = 0.0
    if inner > 0:
        total += a ** (2 - d) * inner ** (d - beta) / (d - beta)
    if a < R:
        e = 2.0 - beta
        if a == 0 and e <= 0:
            return math.inf
        total += math.log(R / a) if e == 0 else (R**e - a**e) / e
    return total / (d - 2)


def _smooth_radial(prof: SmoothDecay, a: float, d: int) -> tuple[float, float]:
    if prof.exponent <= 2:
        return math.inf, 0.0
    f = lambda r: r ** (d - 1) * max(r, a) ** (2 - d) * (r + prof.shift) ** (-prof.exponent)
    pieces = [(0.0, a), (a, math.inf)] if a > 0 else [(0.0, math.inf)]
    val, err = 0.0, 0.0
    for lo, hi in pieces:
        v, e = integrate.quad(f, lo, hi, epsabs=0.0, epsrel=1e-12, limit=200)
        val += v
        err += e
    return val / (d - 2), err / (d - 2)


def _radial_term(term: Term, a: float, d: int) -> tuple[float, float, str]:
    prof = term.factors[0].profile
    c = abs(term.coeff)
    const = prof.constant_value()
    if const is not None:
        return (0.0 if const == 0 else math.inf), 0.0, "closed_form"
    if isinstance(prof, PowerIndicator):
        return c * _power_radial(prof.beta, prof.radius, a, d), 0.0, "closed_form"
    v, e = _smooth_radial(prof, a, d)
    return c * v, c * e, "radial_quadrature"


def _reduce_inert(term: Term, x: np.ndarray):
    """Drop constant factors: P_s acts trivially on them. Returns (coeff, factors, block means)."""
    coeff = abs(term.coeff)
    kept = []
    for a, b, f in term.blocks():
        c = f.profile.constant_value()
        if c is not None:
            coeff *= abs(c)
            continue
        kept.append((f, x[a:b]))
    return coeff, kept


def heat_time_integral(V: Potential, x, T: float = math.inf, cfg: QuadConfig = DEFAULT_QUAD):
    """int_0^T P_s |V| (x) ds by quadrature (P_s the heat semigroup). Returns (value, error, converged)."""
    x = as_point(x, V.dim)
    terms = [_reduce_inert(t, x) for t in V.abs_terms()]
    terms = [(c, k) for c, k in terms if c != 0]
    if not terms:
        return 0.0, 0.0, True
    if any(not k for _, k in terms):
        return math.inf, 0.0, True

    def P(s):
        total = np.zeros_like(s)
        for c, kept in terms:
            val = np.full_like(s, c)
            for f, xb in kept:
                res = radial_expectation(f.profile, f.dim, np.full_like(s, np.linalg.norm(xb)), np.sqrt(2.0 * s),
                                         rel_tol=cfg.inner_tol)
                val = val * res.value
            total += val
        return total

    if math.isfinite(T):
        def integrand(rows, v, dl, dr):
            return P(dl[0])[None, :]
        res = tanh_sinh(integrand, [0.0], [T], rel_tol=cfg.rel_tol * 1e-2, abs_tol=1e-300, max_level=9)
    else:
        # s = L v / (1 - v), ds = L / (1 - v)^2 dv
        L = 1.0 + float(np.dot(x, x))

        def integrand(rows, v, dl, dr):
            with np.errstate(over="ignore", divide="ignore", invalid="ignore"):
                s = L * dl[0] / dr[0]
                val = P(np.minimum(s, 1e300))
                out = np.exp(np.log(val) + math.log(L) - 2.0 * np.log(dr[0]))
                return np.where(val > 0, out, 0.0)[None, :]
        res = tanh_sinh(integrand, [0.0], [1.0], rel_tol=cfg.rel_tol * 1e-2, abs_tol=1e-300, max_level=9)
    return float(res.value[0]), float(res.error[0]), bool(res.converged[0])


def newtonian(f: Potential, x, cfg: QuadConfig = DEFAULT_QUAD, method: str | None = None) -> NewtonianResult:
    """-Delta^{-1} |f| (x) = C_d int |z - x|^(2-d) |f(z)| dz.

    Radial terms use Newton's theorem (the spherical mean of |z - x|^(2-d) over
    |z| = r is max(r, |x|)^(2-d)); other terms use the heat-semigroup time
    integral. ``method="full_quadrature"`` forces the latter for every term.
    """
    x = as_point(x, f.dim)
    d = f.dim
    terms = f.abs_terms()
    if not terms:
        return NewtonianResult(0.0, x, "closed_form")
    if d < 3:
        return NewtonianResult(math.inf, x, "closed_form", flags=["infinite_for_d<3"])
    if method == "full_quadrature":
        v, e, ok = heat_time_integral(f, x, cfg=cfg)
        return NewtonianResult(v, x, "full_quadrature", e, [] if ok else ["quadrature_not_converged"])
    a = float(np.linalg.norm(x))
    total, err, methods, flags = 0.0, 0.0, set(), []
    for term in terms:
        if len(term.factors) == 1:
            v, e, m = _radial_term(term, a, d)
        else:
            c, kept = _reduce_inert(term, x)
            if len(kept) == 1 and kept[0][0].dim >= 3:
                # P_s ignores inert coordinates: reduce to the Newtonian potential of the block
                fk, xb = kept[0]
                v, e, m = _radial_term(Term(c, (Factor(fk.profile, fk.dim),)),
                                       float(np.linalg.norm(xb)), fk.dim)
            else:
                v, e, ok = heat_time_integral(Potential(d, (term,)), x, cfg=cfg)
                m = "full_quadrature"
                if not ok:
                    flags.append("quadrature_not_converged")
        total += v
        err += e
        methods.add(m)
    order = ("full_quadrature", "radial_quadrature", "closed_form")
    method = next(m for m in order if m in methods)
    return NewtonianResult(total, x, method, err, flags)


@dataclass
class NewtonianSup:
    value: float
    arg: np.ndarray
    grid_spec: str
    certified_at_origin: bool
    table: list = field(default_factory=list)


def radial_nonincreasing(f: Potential) -> bool:
    """All terms radial over R^d with nonincreasing profiles (every supported profile is)."""
    return f.is_radial() and all(
        isinstance(t.factors[0].profile, (PowerIndicator, IndicatorBall, SmoothDecay, Constant)) for t in f.abs_terms()
    )


def default_points(d: int, radii: Sequence[float] = (0.0, 0.25, 0.5, 1.0, 2.0, 4.0)) -> list[np.ndarray]:
    pts = []
    for r in radii:
        p = np.zeros(d)
        p[0] = r
        pts.append(p)
    return pts


def potential_bound_sup(f: Potential, grid: Sequence | None = None, cfg: QuadConfig = DEFAULT_QUAD) -> NewtonianSup:
    """Grid estimate of sup_x -Delta^{-1}|f|(x); certified at the origin for radial nonincreasing f."""
    pts = [as_point(p, f.dim) for p in (grid if grid is not None else default_points(f.dim))]
    vals = pmap(lambda p: newtonian(f, p, cfg).value, pts, cfg.threads)
    i = int(np.argmax(vals))
    cert = radial_nonincreasing(f)
    if cert:
        origin = newtonian(f, np.zeros(f.dim), cfg).value
        # rearrangement: the origin dominates every grid value
        cert = all(v <= origin * (1 + 1e-9) + 1e-12 for v in vals)
        if cert:
            return NewtonianSup(origin, np.zeros(f.dim), f"points={len(pts)}", True, list(zip(pts, vals)))
    return NewtonianSup(vals[i], pts[i], f"points={len(pts)}", False, list(zip(pts, vals)))


@dataclass
class LocalTimeResult:
    value: float
    arg: np.ndarray
    divergent: bool
    partial: dict = field(default_factory=dict)
    decade_increments: list = field(default_factory=list)
    flags: list[str] = field(default_factory=list)


def _local_time_at(V: Potential, x: np.ndarray, T: float, cfg: QuadConfig) -> LocalTimeResult:
    terms = [_reduce_inert(t, x) for t in V.abs_terms()]

    def P(s):
        total = np.zeros_like(s)
        for c, kept in terms:
            val = np.full_like(s, c)
            for f, xb in kept:
                res = radial_expectation(f.profile, f.dim, np.full_like(s, np.linalg.norm(xb)), np.sqrt(2.0 * s),
                                         rel_tol=cfg.inner_tol)
                val = val * res.value
            total += val
        return total

    # increments over [delta/4, delta] T as delta -> 0 decide divergence at s = 0
    gl_x, gl_w = np.polynomial.legendre.leggauss(10)
    k = np.arange(cfg.divergence_probe_steps)
    hi = cfg.divergence_probe_start * 4.0**-k
    lo_l, hi_l = np.log(hi / 4), np.log(hi)
    half = 0.5 * (hi_l - lo_l)
    logs = (0.5 * (hi_l + lo_l))[:, None] + half[:, None] * gl_x
    sm = T * np.exp(logs)
    inc = (P(sm.ravel()).reshape(sm.shape) * sm * half[:, None] * gl_w).sum(axis=1)
    div, _ = _diverges(inc, cfg.divergence_factor)

    def partial(delta):
        def integrand(rows, v, dl, dr):
            return P(delta * T + dl[0])[None, :]
        res = tanh_sinh(integrand, [0.0], [T - delta * T], rel_tol=cfg.rel_tol * 1e-2, abs_tol=1e-300, max_level=9)
        return float(res.value[0])

    if div:
        parts = {delta: partial(delta) for delta in cfg.partial_cutoffs}
        ds = sorted(parts, reverse=True)
        steps = [(parts[b] - parts[a]) / math.log10(a / b) for a, b in zip(ds[:-1], ds[1:])]
        return LocalTimeResult(math.inf, x, True, parts, steps, ["divergent"])
    return LocalTimeResult(partial(0.0), x, False)


def local_time_bound(V: Potential, T: float, grid: Sequence | None = None, cfg: QuadConfig = DEFAULT_QUAD) -> LocalTimeResult:
    """Grid estimate of sup_x int_0^T P_s |V| (x) ds, with a divergence verdict."""
    if not T > 0:
        raise DomainError("T must be positive")
    pts = [as_point(p, V.dim) for p in (grid if grid is not None else [np.zeros(V.dim)])]
    if not V.abs_terms():
        return LocalTimeResult(0.0, pts[0], False)
    results = pmap(lambda p: _local_time_at(V, p, T, cfg), pts, cfg.threads)
    best = max(results, key=lambda r: r.value)
    return best


def nfs2_inner_integral(T: float, a: float) -> float:
    """int_{|x2|^2 < T/2} |x2|^(-1) (a^2 + |x2|^2)^(-2) dx2 over R^3, by radial quadrature."""
    if not (T > 0 and a > 0):
        raise DomainError("need T > 0 and |x1| > 0")
    R = math.sqrt(T / 2.0)
    area = sphere_area(3)
    # rho^2 * rho^(-1) from the radial measure and the kernel
    val, _, _ = tanh_sinh_scalar(lambda r, dl, dr: r / (a * a + r * r) ** 2, 0.0, R, rel_tol=1e-14, abs_tol=0.0)
    return area * val


def nfs2_inner_closed_form(T: float, a: float) -> float:
    return math.pi * T / (a * a * (T / 2.0 + a * a))


def nfs2_heat_constant() -> float:
    """c = int_0^1 g(s, 0, a) ds in R^6 for |a| = 1."""
    val, _ = integrate.quad(lambda s: (4 * math.pi * s) ** -3 * math.exp(-1.0 / (4 * s)), 0.0, 1.0,
                            epsabs=0.0, epsrel=1e-13)
    return val


def nfs2_lower_growth(T: float, delta: float, epsilon: float = 0.0) -> float:
    """pi^2 c T (1-eps)^2 int_delta^sqrt(T/2) r^(-1-eps) / (T/2 + r^2) dr (grows without bound as delta -> 0)."""
    R = math.sqrt(T / 2.0)
    if delta >= R:
        return 0.0
    val, _ = integrate.quad(lambda v: math.exp(-epsilon * v) / (T / 2 + math.exp(2 * v)), math.log(delta), math.log(R),
                            epsabs=0.0, epsrel=1e-12)
    return math.pi**2 * nfs2_heat_constant() * T * (1 - epsilon) ** 2 * val
