"""Binary matrix factorization by penalized NMF with thresholding.

Each restart minimizes

    ||V - W H||_F^2 + 1/2 lam_w ||W*W - W||^2 + 1/2 lam_h ||H*H - H||^2

with multiplicative updates. The penalty gradient for ``H`` is
``lam_h (2 H^3 - 3 H^2 + H)``; putting its negative part into the numerator
and its positive part into the denominator gives

    H <- H * (W^T V + 3 lam_h H^2) / (W^T W H + 2 lam_h H^3 + lam_h H)
    W <- W * (V H^T + 3 lam_w W^2) / (W H H^T + 2 lam_w W^3 + lam_w W)

Both penalty weights start at ``lambda_w``/``lambda_h`` and are multiplied by
those same values after every iteration, so the pull towards {0, 1} grows
geometrically. A run stops after ``max_iter`` iterations or as soon as the
unpenalized objective drops by less than ``tol``. Factors are then
thresholded and the restart with the smallest Frobenius error after
thresholding wins.
"""

from __future__ import annotations

import logging
import math
from dataclasses import asdict, dataclass, field

import numpy as np

from .context import FormalContext, bits

log = logging.getLogger(__name__)

EPS = np.finfo(float).eps


def default_rank(n_attributes: int) -> int:
    """Number of factors giving roughly one order of magnitude of reduction."""
    return max(1, round(math.sqrt(n_attributes)))


@dataclass(frozen=True)
class BmfParams:
    rank: int
    max_iter: int = 500
    restarts: int = 10
    lambda_w: float = 1.1
    lambda_h: float = 1.1
    seed: int = 0
    threshold: float = 0.5
    tol: float = 1e-5

    def __post_init__(self):
        for name in ("rank", "max_iter", "restarts"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be a positive integer")
        if self.lambda_w <= 0 or self.lambda_h <= 0:
            raise ValueError("penalty rates must be positive")
        if not 0 < self.threshold < 1:
            raise ValueError("threshold must lie in (0, 1)")
        if self.tol < 0:
            raise ValueError("tol must be non-negative")


@dataclass
class RunTrace:
    restart: int
    iterations: int
    objective: list[float]
    mismatches: int
    frobenius: float
    increases: int = 0  # iterations where the unpenalized objective went up


@dataclass
class BinaryFactorization:
    S: np.ndarray  # |G| x k, bool
    H: np.ndarray  # k x |M|, bool
    fit_error: float
    best_run: int
    params: BmfParams
    runs: list[RunTrace] = field(default_factory=list)

    @property
    def rank(self) -> int:
        return self.S.shape[1]

    def product(self) -> np.ndarray:
        return (self.S.astype(np.int64) @ self.H.astype(np.int64)) > 0

    def scale_context(self, objects) -> FormalContext:
        return FormalContext.from_matrix(objects, factor_names(self.rank), self.S)

    def h_context(self, attributes) -> FormalContext:
        return FormalContext.from_matrix(factor_names(self.rank), attributes, self.H)

    def sidecar(self) -> dict:
        return {
            "params": asdict(self.params),
            "best_run": self.best_run,
            "fit_error": self.fit_error,
            "runs": [{"restart": r.restart, "iterations": r.iterations,
                      "frobenius": r.frobenius, "mismatches": r.mismatches,
                      "final_objective": r.objective[-1], "objective_increases": r.increases}
                     for r in self.runs],
        }


def factor_names(k: int) -> tuple[str, ...]:
    return tuple(str(j) for j in range(k))


def _normalize(W: np.ndarray, H: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    # rescale factor j so the largest entries of W[:, j] and H[j, :] agree;
    # the product W H is unchanged
    dw = W.max(axis=0)
    dh = H.max(axis=1)
    scale = np.sqrt(dh / dw)
    return W * scale, H / scale[:, None]


def _run(V: np.ndarray, params: BmfParams, rng: np.random.Generator, restart: int):
    n, m = V.shape
    k = params.rank
    W = rng.uniform(size=(n, k))
    H = rng.uniform(size=(k, m))
    W, H = _normalize(W, H)
    lam_w, lam_h = params.lambda_w, params.lambda_h
    obj = [float(np.sum((V - W @ H) ** 2))]
    it = 0
    increases = 0
    while it < params.max_iter:
        H = H * (W.T @ V + 3 * lam_h * H ** 2) / (W.T @ W @ H + 2 * lam_h * H ** 3 + lam_h * H + EPS)
        H = np.maximum(H, EPS)
        W = W * (V @ H.T + 3 * lam_w * W ** 2) / (W @ (H @ H.T) + 2 * lam_w * W ** 3 + lam_w * W + EPS)
        W = np.maximum(W, EPS)
        lam_w *= params.lambda_w
        lam_h *= params.lambda_h
        it += 1
        cur = float(np.sum((V - W @ H) ** 2))
        prev = obj[-1]
        obj.append(cur)
        if cur > prev + 1e-9:
            increases += 1
        if prev - cur < params.tol:
            break
    if increases:
        log.info("restart %d: objective increased in %d of %d iterations", restart, increases, it)
    S = W > params.threshold
    Hb = H > params.threshold
    diff = int(np.count_nonzero(((S.astype(np.int64) @ Hb.astype(np.int64)) > 0) != V.astype(bool)))
    return S, Hb, RunTrace(restart, it, obj, diff, math.sqrt(diff), increases)


def bmf_factorize(ctx: FormalContext | np.ndarray, params: BmfParams) -> BinaryFactorization:
    """Factor the incidence of ``ctx`` into boolean ``S`` (objects x rank) and ``H`` (rank x attributes)."""
    V = ctx.to_matrix() if isinstance(ctx, FormalContext) else np.asarray(ctx, dtype=bool)
    n, m = V.shape
    if n < 1 or m < 1:
        raise ValueError("cannot factorize a context without objects or attributes")
    if not 1 <= params.rank <= min(n, m):
        raise ValueError(f"rank {params.rank} outside 1..{min(n, m)}")
    if not V.any():
        raise ValueError("context has no incidences; the factorization would be empty")
    Vf = V.astype(float)
    seeds = np.random.SeedSequence(params.seed).spawn(params.restarts)
    best = None
    runs = []
    for r, ss in enumerate(seeds):
        S, Hb, trace = _run(Vf, params, np.random.default_rng(ss), r)
        runs.append(trace)
        if best is None or trace.mismatches < best[2].mismatches:
            best = (S, Hb, trace)
    S, Hb, trace = best
    return BinaryFactorization(S, Hb, trace.frobenius, trace.restart, params, runs)


def boolean_product(S, H, objects=None, attributes=None) -> FormalContext:
    """Context with ``(g, m)`` incident iff some factor ``j`` has ``S[g, j]`` and ``H[j, m]``.

    ``S`` and ``H`` may be formal contexts (objects x factors, factors x
    attributes) or boolean arrays; for arrays the names default to indices.
    """
    if isinstance(S, FormalContext) and isinstance(H, FormalContext):
        if S.n_attributes != H.n_objects:
            raise ValueError(f"inner dimensions differ: {S.n_attributes} vs {H.n_objects}")
        rows = []
        for r in S.rows:
            out = 0
            for j in bits(r):
                out |= H.rows[j]
            rows.append(out)
        return FormalContext(S.objects, H.attributes, tuple(rows))
    S = S.to_matrix() if isinstance(S, FormalContext) else np.asarray(S, dtype=bool)
    H = H.to_matrix() if isinstance(H, FormalContext) else np.asarray(H, dtype=bool)
    if S.ndim != 2 or H.ndim != 2 or S.shape[1] != H.shape[0]:
        raise ValueError(f"cannot multiply shapes {S.shape} and {H.shape}")
    P = (S.astype(np.int64) @ H.astype(np.int64)) > 0
    objects = objects if objects is not None else [str(i) for i in range(P.shape[0])]
    attributes = attributes if attributes is not None else [str(j) for j in range(P.shape[1])]
    return FormalContext.from_matrix(objects, attributes, P)


def _rows(x) -> tuple[tuple[int, ...], int]:
    if isinstance(x, FormalContext):
        return x.rows, x.n_attributes
    arr = np.asarray(x, dtype=bool)
    if arr.ndim != 2:
        raise ValueError("expected a 2-d boolean matrix")
    weights = [1 << j for j in range(arr.shape[1])]
    return tuple(sum(w for w, b in zip(weights, row) if b) for row in arr.tolist()), arr.shape[1]


def mismatches(k1, k2) -> int:
    """Number of cells where two incidences differ."""
    r1, w1 = _rows(k1)
    r2, w2 = _rows(k2)
    if (len(r1), w1) != (len(r2), w2):
        raise ValueError(f"shape mismatch: {len(r1)}x{w1} vs {len(r2)}x{w2}")
    return sum((a ^ b).bit_count() for a, b in zip(r1, r2))


def frobenius_error(k1, k2) -> float:
    return math.sqrt(mismatches(k1, k2))


def hamming_percent(k1, k2) -> float:
    r1, w = _rows(k1)
    cells = len(r1) * w
    return 100.0 * mismatches(k1, k2) / cells if cells else 0.0
