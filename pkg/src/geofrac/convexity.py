"""Convexity checks for functions along geodesics.

A "space function" maps a coordinate batch of some model space to a float
array; `squared_distance_function` and friends build the common ones.
Plain callables taking a single Point also work (detected by probing).

`check_h_convex` samples restrictions of one geodesic and tests the
endpoint form of h-convexity on each: with F(lam) the function along the
restriction,

    F(lam) <= h(1 - lam) F(0) + h(lam) F(1)

for a grid of lam.  The slack of the worst sample is reported together
with a witness, so a failed check is reproducible.  h values that are not
finite (godunova_levin at 0) make the bound vacuous at that lam and are
skipped.

Checks are sampling-based: a `holds` verdict certifies the inequality on
the sampled grid only, while a failed verdict carries a concrete witness.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Callable, Optional, Tuple, Union

import numpy as np

from .errors import DomainError, SpaceMismatchError
from .quadrature import as_array_function
from .spaces import Geodesic, Point, Space, euclidean

__all__ = ["HFunction", "h_function", "H_CATALOG", "ConvexityVerdict",
           "check_h_convex", "check_convex", "check_quasi_or_p_convex",
           "squared_distance_function", "distance_between_geodesics_function",
           "on_geodesic", "scalar_pullback"]


@dataclass(frozen=True)
class HFunction:
    """Multiplier function on (0, 1); h(0) and h(1) may be infinite."""

    name: str
    fn: Callable[[np.ndarray], np.ndarray]

    def __call__(self, t) -> np.ndarray:
        tt = np.asarray(t, dtype=float)
        with np.errstate(divide="ignore", invalid="ignore"):
            return np.asarray(self.fn(tt), dtype=float)

    def __repr__(self) -> str:
        return "HFunction(%s)" % self.name


H_CATALOG = ("identity", "constant_one", "godunova_levin", "power(k)")

_POWER_RE = re.compile(r"^power\(\s*([^)\s]+)\s*\)$")


def _power_h(k: float) -> HFunction:
    return HFunction("power(%g)" % k, lambda t: np.power(t, k))


def h_function(spec: Union[str, HFunction, Callable]) -> HFunction:
    """Resolve a catalog name, an HFunction, or a bare callable."""
    if isinstance(spec, HFunction):
        return spec
    if callable(spec):
        return HFunction(getattr(spec, "__name__", "custom"),
                         as_array_function(spec))
    name = str(spec).strip()
    if name == "identity":
        return HFunction("identity", lambda t: t)
    if name == "constant_one":
        return HFunction("constant_one", lambda t: np.ones_like(t))
    if name == "godunova_levin":
        return HFunction("godunova_levin", lambda t: 1.0 / t)
    m = _POWER_RE.match(name)
    if m:
        try:
            k = float(m.group(1))
        except ValueError:
            raise DomainError("bad power exponent in %r" % name) from None
        if not np.isfinite(k):
            raise DomainError("power exponent must be finite")
        return _power_h(k)
    raise DomainError("unknown h function %r; catalog: %s"
                      % (name, ", ".join(H_CATALOG)))


# ---------------------------------------------------------------------------
# space functions
# ---------------------------------------------------------------------------


def _batchify(space: Space, f: Callable) -> Callable:
    """Accept either a batch function or a per-Point function."""
    state = {"pointwise": False}

    def call(batch, m: int) -> np.ndarray:
        if not state["pointwise"]:
            try:
                vals = np.asarray(f(batch), dtype=float)
                if vals.shape == (m,):
                    return vals
            except Exception:
                pass
            state["pointwise"] = True
        return np.array([float(f(Point(space, space._single(batch, i))))
                         for i in range(m)])

    return call


def squared_distance_function(space: Space, y: Point,
                              k: float = 2.0) -> Callable:
    """d(., y)**k as a space function; convex along geodesics for k >= 1."""
    if y.space != space:
        raise SpaceMismatchError("reference point lives in a different space")
    k = float(k)
    if not (np.isfinite(k) and k >= 1.0):
        raise DomainError("exponent k must be >= 1")
    ystack = space._stack([y.coords])

    def f(batch) -> np.ndarray:
        return space._dist(batch, ystack) ** k

    f.__name__ = "dist_to_point_pow_%g" % k
    return f


def distance_between_geodesics_function(g1: Geodesic,
                                        g2: Geodesic) -> Callable:
    """t -> d(g1(t), g2(t))**2, vectorized over parameter arrays."""
    if g1.space != g2.space:
        raise SpaceMismatchError("geodesics live in different spaces")
    space = g1.space

    def fn(ts) -> np.ndarray:
        ts = np.asarray(ts, dtype=float).ravel()
        return space._dist(g1.eval_batch(ts), g2.eval_batch(ts)) ** 2

    fn.__name__ = "squared_geodesic_distance"
    return fn


def on_geodesic(f: Callable, geodesic: Geodesic) -> Callable:
    """Pull a space function back along a geodesic: t -> f(g(t))."""
    call = _batchify(geodesic.space, f)

    def fn(ts) -> np.ndarray:
        ts = np.asarray(ts, dtype=float).ravel()
        return call(geodesic.eval_batch(ts), ts.size)

    return fn


def scalar_pullback(fn: Callable, lo: float = 0.0,
                    hi: float = 1.0) -> Tuple[Callable, Geodesic]:
    """View a function on [lo, hi] as a space function on a segment."""
    if not (np.isfinite(lo) and np.isfinite(hi) and lo < hi):
        raise DomainError("need finite lo < hi")
    line = euclidean(1)
    g = Geodesic(line.point(lo), line.point(hi))
    arr = as_array_function(fn)

    def f(batch) -> np.ndarray:
        return arr(np.asarray(batch, dtype=float)[:, 0])

    return f, g


# ---------------------------------------------------------------------------
# checks
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ConvexityVerdict:
    holds: bool
    worst_slack: float
    witness: Optional[Tuple[float, float, float]]
    samples: int


def _restriction_values(f: Callable, geodesic: Geodesic, samples: int,
                        pairs: int, seed: int):
    if samples < 1 or pairs < 0:
        raise DomainError("need samples >= 1 and pairs >= 0")
    rng = np.random.default_rng(seed)
    draws = rng.uniform(0.0, 1.0, (pairs, 2))
    t1 = np.concatenate(([0.0], draws.min(axis=1)))
    t2 = np.concatenate(([1.0], draws.max(axis=1)))
    degenerate = (t2 - t1) < 1e-9
    t1 = np.where(degenerate, 0.25, t1)
    t2 = np.where(degenerate, 0.75, t2)
    lam = np.linspace(0.0, 1.0, samples + 2)
    params = t1[:, None] * (1.0 - lam)[None, :] + t2[:, None] * lam[None, :]
    call = _batchify(geodesic.space, f)
    values = call(geodesic.eval_batch(params.ravel()),
                  params.size).reshape(params.shape)
    return t1, t2, lam, values


def _verdict(slack: np.ndarray, t1, t2, lam, tol: float) -> ConvexityVerdict:
    finite = np.isfinite(slack)
    n = int(finite.sum())
    if n == 0:
        return ConvexityVerdict(True, np.inf, None, 0)
    masked = np.where(finite, slack, np.inf)
    holds = bool(np.all(masked >= -tol))
    idx = int(np.argmin(masked))
    r, j = divmod(idx, slack.shape[1])
    witness = (float(t1[r]), float(t2[r]), float(lam[j]))
    return ConvexityVerdict(holds, float(masked.flat[idx]), witness, n)


def check_h_convex(f: Callable, geodesic: Geodesic,
                   h: Union[str, HFunction, Callable] = "identity", *,
                   samples: int = 64, pairs: int = 8, tol: float = 1e-9,
                   seed: int = 0) -> ConvexityVerdict:
    """Sampled h-convexity of f along one geodesic and its restrictions."""
    hf = h_function(h)
    t1, t2, lam, values = _restriction_values(f, geodesic, samples, pairs,
                                              seed)
    hl = hf(lam)
    hr = hf(1.0 - lam)
    with np.errstate(invalid="ignore"):
        bound = (hr[None, :] * values[:, :1]
                 + hl[None, :] * values[:, -1:])
        slack = bound - values
    usable = np.isfinite(hl) & np.isfinite(hr)
    slack = np.where(usable[None, :], slack, np.inf)
    return _verdict(slack, t1, t2, lam, tol)


def check_convex(f: Callable, geodesic: Geodesic, *, samples: int = 64,
                 pairs: int = 8, tol: float = 1e-9,
                 seed: int = 0) -> ConvexityVerdict:
    """Sampled ordinary convexity (h = identity)."""
    return check_h_convex(f, geodesic, "identity", samples=samples,
                          pairs=pairs, tol=tol, seed=seed)


def check_quasi_or_p_convex(f: Callable, geodesic: Geodesic,
                            mode: str = "quasi", p: float = 2.0, *,
                            samples: int = 64, pairs: int = 8,
                            tol: float = 1e-9,
                            seed: int = 0) -> ConvexityVerdict:
    """Sampled quasiconvexity, or convexity of f**p for mode="p"."""
    if mode not in ("quasi", "p"):
        raise DomainError("mode must be 'quasi' or 'p'")
    t1, t2, lam, values = _restriction_values(f, geodesic, samples, pairs,
                                              seed)
    if mode == "quasi":
        slack = np.maximum(values[:, :1], values[:, -1:]) - values
        return _verdict(slack, t1, t2, lam, tol)
    p = float(p)
    if not (np.isfinite(p) and p > 0.0):
        raise DomainError("p must be positive and finite")
    if np.any(values < 0.0):
        raise DomainError("p-convexity needs nonnegative sampled values")
    vp = values ** p
    slack = ((1.0 - lam)[None, :] * vp[:, :1] + lam[None, :] * vp[:, -1:]
             - vp)
    return _verdict(slack, t1, t2, lam, tol)
