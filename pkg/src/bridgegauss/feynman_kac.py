"""Monte Carlo estimates of G/g = E exp(int_0^t V(B_s) ds) over the bridge from x to y.

Paths are generated in fixed-size blocks; block k draws from its own Philox
stream spawned from the seed, so results do not depend on thread scheduling and
larger path counts extend rather than redraw earlier blocks.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .bridge_quad import pmap
from .kernel import BridgeSpec, DomainError
from .potentials import Potential

EXP_GUARD = 700.0


@dataclass(frozen=True)
class McConfig:
    paths: int = 100_000
    steps: int = 256
    seed: int = 0
    antithetic: bool = True
    block: int = 4096
    threads: int = 1

    def __post_init__(self):
        if self.paths < 1 or self.steps < 1 or self.block < 2:
            raise DomainError("paths, steps must be >= 1 and block >= 2")


@dataclass
class McEstimate:
    mean: float
    std_error: float
    paths_used: int
    steps: int
    seed: int
    clipped_fraction: float = 0.0
    flags: list[str] = field(default_factory=list)


def block_rng(seed: int, block: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(seed, spawn_key=(block,))))


def _bridge_paths(spec: BridgeSpec, normals: np.ndarray) -> np.ndarray:
    """Bridge paths at uniform times from standard normals of shape (n, steps, d)."""
    n, steps, d = normals.shape
    t = spec.t
    dt = t / steps
    out = np.empty((n, steps + 1, d))
    out[:, 0] = spec.x
    b = np.broadcast_to(spec.x, (n, d)).copy()
    for k in range(steps - 1):
        rem = t - k * dt
        mean = b + (spec.y - b) * (dt / rem)
        sd = math.sqrt(2.0 * dt * (rem - dt) / rem)
        b = mean + sd * normals[:, k]
        out[:, k + 1] = b
    out[:, steps] = spec.y
    return out


def sample_bridge_path(spec: BridgeSpec, steps: int, rng: np.random.Generator, n: int | None = None) -> np.ndarray:
    """One path of shape (steps+1, d), or ``n`` paths of shape (n, steps+1, d)."""
    if steps < 1:
        raise DomainError("steps must be >= 1")
    z = rng.standard_normal((1 if n is None else n, steps, spec.dim))
    paths = _bridge_paths(spec, z)
    return paths[0] if n is None else paths


def _term_integrals(V: Potential, paths: np.ndarray, steps: int, t: float):
    """Trapezoid integrals of each term along the paths and the interior clip mask.

    Singular profiles are capped at radius / steps. When a deterministic endpoint
    sits on a singularity of total order beta, the end interval uses
    int_0^dt s^(-beta/2) ds = dt^(1-beta/2) / (1 - beta/2) scaled from the
    neighbouring node instead of the trapezoid.
    """
    dt = t / steps
    n = paths.shape[0]
    out = []
    clipped = np.zeros(paths.shape[:-1], dtype=bool)
    corrected = False
    for term in V.terms:
        if term.coeff == 0:
            continue
        val = np.full(paths.shape[:-1], term.coeff)
        beta_end = [0.0, 0.0]
        for a, b, f in term.blocks():
            r = np.linalg.norm(paths[..., a:b], axis=-1)
            prof = f.profile
            beta = getattr(prof, "beta", 0.0)
            if beta > 0:
                floor = prof.radius / steps
                clipped |= r < floor
                for j, node in ((0, 0), (1, -1)):
                    if r[0, node] == 0.0:
                        beta_end[j] += beta
                r = np.maximum(r, floor)
            val = val * prof(r)
        w = np.full(steps + 1, dt)
        w[0] = w[-1] = 0.5 * dt
        for j, (node, nb) in enumerate(((0, 1), (-1, -2))):
            if beta_end[j] > 0:
                if beta_end[j] >= 2:
                    raise DomainError("path integral diverges at a singular endpoint")
                w[node] = 0.0
                w[nb] += dt / (1.0 - 0.5 * beta_end[j]) - 0.5 * dt
        corrected |= any(beta_end)
        out.append(val @ w)
    total = np.sum(out, axis=0) if out else np.zeros(n)
    return total, clipped, corrected


def _block(V: Potential, spec: BridgeSpec, cfg: McConfig, k: int, n: int):
    """Weights of block k as (per-sample weights, clipped count, guarded count, endpoint flag)."""
    rng = block_rng(cfg.seed, k)
    m = n // 2 if cfg.antithetic else n
    z = rng.standard_normal((m, cfg.steps, spec.dim))
    if cfg.antithetic:
        z = np.concatenate([z, -z])
    paths = _bridge_paths(spec, z)
    if V.part != "signed":
        raise DomainError("Monte Carlo expects a signed potential, not a derived view")
    integral, clip, endpoint = _term_integrals(V, paths, cfg.steps, spec.t)
    # deterministic endpoints never count as clipped paths
    clipped = int(np.count_nonzero(clip[:, 1:-1].any(axis=1)))
    guard = integral > EXP_GUARD
    w = np.exp(np.minimum(integral, EXP_GUARD))
    if cfg.antithetic:
        w = 0.5 * (w[:m] + w[m:])
    return w, clipped, int(np.count_nonzero(guard)), endpoint


def g_ratio_mc(V: Potential, spec: BridgeSpec, cfg: McConfig = McConfig()) -> McEstimate:
    """Monte Carlo estimate of G(t,x,y)/g(t,x,y) with standard error.

    With antithetic pairs the standard error is computed from the pair means.
    """
    if V.dim != spec.dim:
        raise DomainError("dimension mismatch")
    paths = cfg.paths + (cfg.paths % 2 if cfg.antithetic else 0)
    block = cfg.block - (cfg.block % 2 if cfg.antithetic else 0)
    sizes = [block] * (paths // block) + ([paths % block] if paths % block else [])
    if not V.terms:
        return McEstimate(1.0, 0.0, paths, cfg.steps, cfg.seed)
    results = pmap(lambda kn: _block(V, spec, cfg, *kn), list(enumerate(sizes)), cfg.threads)
    # ordered combination of block statistics (count, mean, centered sum of squares)
    count, mean, m2 = 0, 0.0, 0.0
    clipped = guarded = 0
    endpoint = False
    for w, c, g, e in results:
        nb = w.size
        # shift by the first weight so identical weights give exactly zero variance
        dev = w - w[0]
        md = float(np.mean(dev))
        mb = float(w[0]) + md
        m2b = float(np.sum((dev - md) ** 2))
        delta = mb - mean
        tot = count + nb
        mean = mean + delta * nb / tot
        m2 = m2 + m2b + delta * delta * count * nb / tot
        count = tot
        clipped += c
        guarded += g
        endpoint |= e
    se = math.sqrt(m2 / (count - 1) / count) if count > 1 else 0.0
    flags = []
    frac = (clipped + guarded) / paths
    if frac > 1e-3:
        flags.append("clipped_fraction_above_1e-3")
    if endpoint:
        flags.append("singular_endpoint_corrected")
    return McEstimate(mean, se, paths, cfg.steps, cfg.seed, frac, flags)
