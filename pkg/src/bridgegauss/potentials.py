"""Tensor-product potentials, their L^p norms and the named example potentials.

A potential is a finite sum of terms ``coeff * prod_k profile_k(|x_k|)`` where the
``x_k`` are consecutive coordinate blocks. Profiles are nonnegative radial
functions; signs live on the coefficients.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Any

import numpy as np
from scipy import special

from .kernel import DomainError, as_point


def sphere_area(m: int) -> float:
    """Surface measure of the unit sphere in R^m (2 for m = 1)."""
    return 2.0 * math.pi ** (0.5 * m) / math.gamma(0.5 * m)


def ball_volume(m: int, radius: float = 1.0) -> float:
    return sphere_area(m) * radius**m / m


@dataclass(frozen=True)
class PowerIndicator:
    """|u|^(-beta) on |u| < radius, zero outside."""

    beta: float
    radius: float = 1.0
    kind = "power_indicator"

    def __post_init__(self):
        if self.beta < 0 or not self.radius > 0:
            raise DomainError("power_indicator needs beta >= 0 and radius > 0")

    def __call__(self, r):
        r = np.asarray(r, dtype=float)
        with np.errstate(divide="ignore"):
            val = np.where(r > 0, r, 0.0) ** (-self.beta) if self.beta > 0 else np.ones_like(r)
        return np.where(r < self.radius, val, 0.0)

    def inner_log(self, r, logr=None):
        """log profile(r) inside the support; ``logr`` avoids underflow of tiny radii."""
        if self.beta == 0:
            return np.zeros_like(r)
        return -self.beta * (np.log(r) if logr is None else logr)

    def constant_value(self):
        return None

    def diverges_locally(self, m: int) -> bool:
        return self.beta >= m

    def lp_norm(self, p: float, m: int) -> float:
        if p == math.inf:
            return math.inf if self.beta > 0 else 1.0
        e = m - self.beta * p
        if e <= 0:
            return math.inf
        return (sphere_area(m) * self.radius**e / e) ** (1.0 / p)

    def to_json(self):
        return {"type": self.kind, "beta": self.beta, "radius": self.radius}


@dataclass(frozen=True)
class IndicatorBall(PowerIndicator):
    """Indicator of the open ball of the given radius."""

    beta: float = field(default=0.0, init=False)
    radius: float = 1.0
    kind = "indicator_ball"

    def lp_norm(self, p: float, m: int) -> float:
        if p == math.inf:
            return 1.0
        return ball_volume(m, self.radius) ** (1.0 / p)

    def to_json(self):
        return {"type": self.kind, "radius": self.radius}


@dataclass(frozen=True)
class SmoothDecay:
    """(|u| + shift)^(-exponent)."""

    exponent: float
    shift: float = 1.0
    kind = "smooth_decay"
    radius = math.inf

    def __post_init__(self):
        if not (self.exponent > 0 and self.shift > 0):
            raise DomainError("smooth_decay needs exponent > 0 and shift > 0")

    def __call__(self, r):
        return (np.asarray(r, dtype=float) + self.shift) ** (-self.exponent)

    def inner_log(self, r, logr=None):
        return -self.exponent * np.log(r + self.shift)

    def constant_value(self):
        return None

    def diverges_locally(self, m: int) -> bool:
        return False

    def lp_norm(self, p: float, m: int) -> float:
        if p == math.inf:
            return self.shift ** (-self.exponent)
        q = self.exponent * p
        if q <= m:
            return math.inf
        # int_0^inf r^(m-1) (r+a)^(-q) dr = a^(m-q) B(m, q-m)
        radial = self.shift ** (m - q) * math.exp(special.betaln(m, q - m))
        return (sphere_area(m) * radial) ** (1.0 / p)

    def to_json(self):
        return {"type": self.kind, "exponent": self.exponent, "shift": self.shift}


@dataclass(frozen=True)
class Constant:
    value: float = 1.0
    kind = "constant"
    radius = math.inf

    def __call__(self, r):
        return np.full_like(np.asarray(r, dtype=float), self.value)

    def inner_log(self, r, logr=None):
        return np.full_like(r, math.log(self.value))

    def constant_value(self):
        return float(self.value)

    def diverges_locally(self, m: int) -> bool:
        return False

    def lp_norm(self, p: float, m: int) -> float:
        if self.value == 0:
            return 0.0
        return abs(self.value) if p == math.inf else math.inf

    def to_json(self):
        return {"type": self.kind, "value": self.value}


Profile = PowerIndicator | IndicatorBall | SmoothDecay | Constant


def lp_norm(profile, p: float, m: int = 1) -> float:
    """Exact L^p(R^m) norm of a radial profile; ``inf`` when divergent."""
    if p < 1:
        raise DomainError(f"p must be >= 1, got {p}")
    return profile.lp_norm(p, m)


@dataclass(frozen=True)
class Factor:
    profile: Any
    dim: int

    def __post_init__(self):
        if self.dim < 1:
            raise DomainError("factor block dimension must be >= 1")


@dataclass(frozen=True)
class Term:
    coeff: float
    factors: tuple[Factor, ...]

    @property
    def dim(self) -> int:
        return sum(f.dim for f in self.factors)

    def blocks(self):
        """Yield ``(start, stop, factor)`` for consecutive coordinate blocks."""
        start = 0
        for f in self.factors:
            yield start, start + f.dim, f
            start += f.dim

    def abs_value(self, x: np.ndarray) -> np.ndarray:
        """|coeff| * prod of profiles at points ``x`` of shape (..., d)."""
        out = np.full(x.shape[:-1], abs(self.coeff))
        zero = np.zeros(x.shape[:-1], dtype=bool)
        for a, b, f in self.blocks():
            r = np.linalg.norm(x[..., a:b], axis=-1)
            v = f.profile(r)
            zero |= v == 0
            with np.errstate(invalid="ignore"):
                out = out * v
        return np.where(zero | (self.coeff == 0), 0.0, out)

    def lp_norm(self, p: float) -> float:
        norms = [f.profile.lp_norm(p, f.dim) for f in self.factors]
        if self.coeff == 0 or any(n == 0 for n in norms):
            return 0.0
        return abs(self.coeff) * math.prod(norms)


_PARTS = ("signed", "pos", "neg", "abs")


@dataclass(frozen=True)
class Potential:
    """Finite sum of tensor-product terms in R^dim.

    ``part`` selects a derived view: the potential itself, V+, V- or |V|.
    """

    dim: int
    terms: tuple[Term, ...]
    part: str = "signed"
    name: str = ""
    meta: dict = field(default_factory=dict, compare=False, hash=False)

    def __post_init__(self):
        if self.dim < 1:
            raise DomainError("dimension must be >= 1")
        if self.part not in _PARTS:
            raise DomainError(f"unknown view {self.part!r}")
        object.__setattr__(self, "terms", tuple(self.terms))
        for term in self.terms:
            if term.dim != self.dim:
                raise DomainError(f"term blocks sum to {term.dim}, expected {self.dim}")

    # -- views -----------------------------------------------------------
    def positive_part(self) -> "Potential":
        return self._view("pos")

    def negative_part(self) -> "Potential":
        return self._view("neg")

    def abs(self) -> "Potential":
        return self._view("abs")

    def _view(self, part: str) -> "Potential":
        if self.part == "signed":
            return replace(self, part=part)
        if part == self.part or part in ("abs", "pos"):
            # views other than "signed" are already nonnegative functions
            return self
        return Potential(self.dim, (), name=f"{self.name}-")

    # -- structure -------------------------------------------------------
    def sign(self) -> int:
        """+1 / -1 if every nonzero term has that sign (0 for the zero potential), else raise."""
        signs = {int(np.sign(t.coeff)) for t in self.terms if t.coeff != 0}
        if not signs:
            return 0
        if len(signs) > 1:
            raise DomainError("potential has terms of both signs")
        return signs.pop()

    def is_single_signed(self) -> bool:
        try:
            self.sign()
        except DomainError:
            return False
        return True

    def abs_terms(self) -> list[Term]:
        """Terms of the nonnegative function this view integrates in S, i.e. of |view|.

        Only available when the sign structure makes |view| a tensor sum.
        """
        if self.part == "signed" or self.part == "abs":
            if not self.is_single_signed():
                raise DomainError("|V| of a mixed-sign potential is not a tensor sum")
            return [Term(abs(t.coeff), t.factors) for t in self.terms if t.coeff != 0]
        s = self.sign() if self.is_single_signed() else None
        if s is None:
            raise DomainError("positive/negative part of a mixed-sign potential is not a tensor sum")
        want = 1 if self.part == "pos" else -1
        if s != want:
            return []
        return [Term(abs(t.coeff), t.factors) for t in self.terms if t.coeff != 0]

    def is_radial(self) -> bool:
        """Every term is a single radial factor over all of R^dim."""
        return all(len(t.factors) == 1 for t in self.terms)

    def sup_abs(self) -> float:
        """sup |V| (inf when unbounded); exact for the supported profile families."""
        total = 0.0
        for t in self.terms:
            sups = []
            for f in t.factors:
                p = f.profile
                c = p.constant_value()
                if c is not None:
                    sups.append(abs(c))
                elif isinstance(p, SmoothDecay):
                    sups.append(p.shift ** (-p.exponent))
                else:
                    sups.append(math.inf if p.beta > 0 else 1.0)
            if t.coeff != 0 and all(s > 0 for s in sups):
                total += abs(t.coeff) * math.prod(sups)
        return total

    def lp_norm_bound(self, p: float) -> float:
        """Triangle-inequality upper bound of ||V||_p (exact for one term)."""
        return sum(t.lp_norm(p) for t in self.terms)

    def scaled(self, c: float) -> "Potential":
        return replace(self, terms=tuple(Term(c * t.coeff, t.factors) for t in self.terms))

    # -- evaluation ------------------------------------------------------
    def __call__(self, x) -> np.ndarray | float:
        return self.eval(x)

    def eval(self, x):
        """Pointwise value; +-inf only on the singular set."""
        arr = np.asarray(x, dtype=float)
        scalar = arr.ndim == 1
        if scalar:
            arr = as_point(arr, self.dim)[None, :]
        if arr.shape[-1] != self.dim:
            raise DomainError(f"expected points in R^{self.dim}, got trailing size {arr.shape[-1]}")
        total = np.zeros(arr.shape[:-1])
        for t in self.terms:
            if t.coeff == 0:
                continue
            v = t.abs_value(arr)
            with np.errstate(invalid="ignore"):
                total = total + np.sign(t.coeff) * v
        total = np.where(np.isnan(total), np.inf, total)
        if self.part == "pos":
            total = np.maximum(total, 0.0)
        elif self.part == "neg":
            total = np.maximum(-total, 0.0)
        elif self.part == "abs":
            total = np.abs(total)
        return float(total[0]) if scalar else total

    # -- serialisation ---------------------------------------------------
    def to_json(self) -> dict:
        out = {
            "dim": self.dim,
            "terms": [
                {"coeff": t.coeff, "factors": [{"dim": f.dim, "profile": f.profile.to_json()} for f in t.factors]}
                for t in self.terms
            ],
        }
        if self.part != "signed":
            out["part"] = self.part
        return out


def scale_shift(V: Potential, c: float) -> Potential:
    """c * |V| as a potential (used for the nonnegative rescaling |V|/(M+1))."""
    terms = [Term(c * t.coeff, t.factors) for t in V.abs_terms()]
    return Potential(V.dim, tuple(terms), name=f"{c:g}*|{V.name or 'V'}|", meta=dict(V.meta))


def single(profile, dim: int, coeff: float = -1.0, name: str = "") -> Potential:
    """One radial term ``coeff * profile(|x|)`` in R^dim."""
    return Potential(dim, (Term(coeff, (Factor(profile, dim),)),), name=name)


def constant(c: float, dim: int) -> Potential:
    """The constant potential V = c."""
    if c == 0:
        return Potential(dim, (), name="zero")
    return Potential(dim, (Term(float(c), (Factor(Constant(1.0), dim),)),), name=f"const({c:g})")


def profile_from_json(obj: dict):
    kind = obj.get("type")
    if kind == "power_indicator":
        return PowerIndicator(float(obj["beta"]), float(obj.get("radius", 1.0)))
    if kind == "indicator_ball":
        return IndicatorBall(radius=float(obj.get("radius", 1.0)))
    if kind == "smooth_decay":
        return SmoothDecay(float(obj["exponent"]), float(obj.get("shift", 1.0)))
    if kind == "constant":
        return Constant(float(obj.get("value", 1.0)))
    raise DomainError(f"unknown profile type {kind!r}")


def potential_from_json(obj: dict) -> Potential:
    if "example" in obj:
        params = {k: v for k, v in obj.items() if k != "example"}
        return paper_example(obj["example"], **params)
    try:
        dim = int(obj["dim"])
        terms = []
        for t in obj["terms"]:
            factors = tuple(Factor(profile_from_json(f["profile"]), int(f["dim"])) for f in t["factors"])
            terms.append(Term(float(t["coeff"]), factors))
    except (KeyError, TypeError) as exc:
        raise DomainError(f"malformed potential JSON: {exc}") from exc
    V = Potential(dim, tuple(terms), name=obj.get("name", ""))
    part = obj.get("part", "signed")
    return V if part == "signed" else V._view(part)


# ---------------------------------------------------------------------------
# named examples


def ld2(p: float = 2.0, d: int = 3) -> Potential:
    """-|x1|^(-1/p) 1{|x1|<1} 1{|x2|<1}, x1 in R, x2 in R^(d-1)."""
    if d < 3 or not (1 < p < math.inf):
        raise DomainError("ld2 needs d >= 3 and 1 < p < inf")
    factors = (Factor(PowerIndicator(1.0 / p, 1.0), 1), Factor(IndicatorBall(1.0), d - 1))
    return Potential(d, (Term(-1.0, factors),), name=f"ld2(p={p:g})", meta={"p": p})


def drugi_component(n: int, d: int = 3) -> Potential:
    """V_n = |x1|^(-1+1/n) 1{|x1|<1} 1{|x2|<1} (nonnegative)."""
    if n < 2:
        raise DomainError("drugi components start at n = 2")
    factors = (Factor(PowerIndicator(1.0 - 1.0 / n, 1.0), 1), Factor(IndicatorBall(1.0), d - 1))
    return Potential(d, (Term(1.0, factors),), name=f"V_{n}")


def drugi(n_terms: int = 6, d: int = 3, sup_estimates: dict | None = None) -> Potential:
    """-sum_{n=2}^{N} V_n / (n^2 a_n) with grid-estimated suprema a_n.

    ``sup_estimates`` maps n to a_n; missing entries are estimated with
    :func:`bridgegauss.bridge_quad.drugi_sup_estimates` (lower estimates of the
    true suprema, so the weights are biased high).
    """
    if d < 3 or n_terms < 2:
        raise DomainError("drugi needs d >= 3 and n_terms >= 2")
    if sup_estimates is None:
        from .bridge_quad import drugi_sup_estimates

        sup_estimates = drugi_sup_estimates(n_terms, d)
    terms = []
    weights = {}
    for n in range(2, n_terms + 1):
        a_n = float(sup_estimates[n])
        w = 1.0 / (n * n * a_n)
        weights[n] = w
        terms.append(Term(-w, drugi_component(n, d).terms[0].factors))
    meta = {"n_terms": n_terms, "a_n": {n: float(sup_estimates[n]) for n in weights}, "weights": weights,
            "a_n_are": "grid lower estimates"}
    return Potential(d, tuple(terms), name=f"drugi(N={n_terms})", meta=meta)


def czwarty(d: int = 3) -> Potential:
    """-(|x2| + 1)^(-3) with x2 in R^3 the last block; the first d-3 coordinates are inert."""
    if d < 3:
        raise DomainError("czwarty needs d >= 3")
    factors = ((Factor(Constant(1.0), d - 3),) if d > 3 else ()) + (Factor(SmoothDecay(3.0, 1.0), 3),)
    return Potential(d, (Term(-1.0, factors),), name=f"czwarty(d={d})")


def nfs2_factor(epsilon: float = 0.0) -> Potential:
    """-(1-eps)/2 |x|^(-1-eps) 1{|x|<1} in R^3."""
    if not (0.0 <= epsilon < 1.0):
        raise DomainError("epsilon must lie in [0, 1)")
    return single(PowerIndicator(1.0 + epsilon, 1.0), 3, -(1.0 - epsilon) / 2.0, name=f"nfs2_factor(eps={epsilon:g})")


def nfs2(epsilon: float = 0.0) -> Potential:
    """V1(x1) V2(x2) in R^6 with both factors equal to :func:`nfs2_factor`."""
    f = nfs2_factor(epsilon)
    prof = f.terms[0].factors[0]
    coeff = f.terms[0].coeff ** 2
    return Potential(6, (Term(coeff, (prof, prof)),), name=f"nfs2(eps={epsilon:g})", meta={"epsilon": epsilon})


def ce(d: int = 3, n_terms: int = 6, sup_estimates: dict | None = None) -> Potential:
    """Sum of the drugi and czwarty potentials in R^d."""
    a = drugi(n_terms, d, sup_estimates)
    b = czwarty(d)
    return Potential(d, a.terms + b.terms, name=f"ce(d={d})", meta=dict(a.meta))


def paper_example(name: str, **params) -> Potential:
    """Construct a named example potential.

    Recognised names: ``ld2`` (p, d), ``drugi`` (n_terms, d), ``czwarty`` (d),
    ``nfs2`` (epsilon, factor), ``ce`` (d, n_terms).
    """
    if name == "ld2":
        return ld2(float(params.get("p", 2.0)), int(params.get("d", 3)))
    if name == "drugi":
        return drugi(int(params.get("n_terms", params.get("N_terms", 6))), int(params.get("d", 3)))
    if name == "czwarty":
        return czwarty(int(params.get("d", 3)))
    if name == "nfs2":
        eps = float(params.get("epsilon", 0.0))
        return nfs2_factor(eps) if params.get("factor") else nfs2(eps)
    if name == "ce":
        return ce(int(params.get("d", 3)), int(params.get("n_terms", 6)))
    raise DomainError(f"unknown example {name!r}")


def drugi_lp_lower_bound(V: Potential, p: float, delta: float) -> float:
    """Lower bound of int_{B(0,2)} |V|^p from the slab delta < |x1| < 1, |x2| < 1.

    On that slab every drugi component reduces to its x1 power, so the bound is a
    1-D integral times the volume of the unit ball in R^(d-1).
    """
    from scipy import integrate

    weights = V.meta.get("weights")
    if not weights:
        raise DomainError("drugi_lp_lower_bound expects a potential built by drugi()")
    pairs = [(w, 1.0 - 1.0 / n) for n, w in weights.items()]

    def f(u):
        return sum(w * u ** (-b) for w, b in pairs) ** p

    # substitute u = exp(-v) to resolve the algebraic blow-up near delta -> 0
    val, _ = integrate.quad(lambda v: f(math.exp(-v)) * math.exp(-v), 0.0, -math.log(delta), limit=400)
    return 2.0 * val * ball_volume(V.dim - 1)
