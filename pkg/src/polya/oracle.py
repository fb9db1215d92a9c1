"""Finite-difference cross-checks (non-rigorous).

Torsion and first Dirichlet eigenvalue on lattice masks with the 5-point
stencil, the classical series for rectangles, and Richardson extrapolation.
Nothing here is a proof; the numbers are used to bracket the certified bounds.

Triangles and rhombi use an anisotropic lattice (spacings hx, hy) scaled so
that every edge runs along a lattice diagonal.  The boundary then lies on
lattice points and the discretization error is O(h^2).  Curved domains
(disc, sector) drop the points outside the domain, which costs O(h).
"""

from __future__ import annotations

import json
import logging
import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from polya.errors import DomainNotSupported, NonConvergence

__all__ = [
    "GridSolution",
    "PolygonMask",
    "RectSeries",
    "Richardson",
    "disc_mask",
    "extrapolate",
    "mask_factory",
    "fd_lambda",
    "fd_torsion",
    "polygon_mask",
    "rect_mask",
    "rect_series",
    "rhombus_mask",
    "richardson",
    "sector_mask",
    "solve",
    "triangle_mask",
]

log = logging.getLogger(__name__)

MIN_INTERIOR = 10
DEFECT_TOL = 1e-10
RQ_TOL = 1e-10


@dataclass(frozen=True)
class PolygonMask:
    """Interior lattice points of a planar domain.

    Lattice point (i, j) sits at (x0 + i hx, y0 + j hy).  ``inside`` is a
    boolean array of shape (ny, nx); lattice points outside it carry the
    zero Dirichlet value.
    """

    shape: str
    vertices: tuple
    hx: float
    hy: float
    x0: float
    y0: float
    inside: np.ndarray = field(repr=False)
    area: float
    order: int = 2  # expected convergence order, used by Richardson

    @property
    def h(self) -> float:
        return max(self.hx, self.hy)

    @property
    def n_interior(self) -> int:
        return int(self.inside.sum())

    def points(self) -> tuple[np.ndarray, np.ndarray]:
        j, i = np.nonzero(self.inside)
        return self.x0 + i * self.hx, self.y0 + j * self.hy


@dataclass(frozen=True)
class GridSolution:
    mask: PolygonMask
    field: Optional[np.ndarray] = field(repr=False)
    T_est: float
    M_est: float
    lambda_est: float
    residual: float
    iterations: int

    @property
    def ratio(self) -> float:
        return self.lambda_est * self.T_est / self.mask.area

    @property
    def lambda_M(self) -> float:
        return self.lambda_est * self.M_est

    def summary(self) -> dict:
        return {
            "shape": self.mask.shape,
            "h": self.mask.h,
            "hx": self.mask.hx,
            "hy": self.mask.hy,
            "T_est": self.T_est,
            "M_est": self.M_est,
            "lambda_est": self.lambda_est,
            "ratio": self.ratio if math.isfinite(self.lambda_est) else None,
            "residual": self.residual,
            "iterations": self.iterations,
        }

    def to_json(self) -> str:
        return json.dumps(self.summary(), sort_keys=True)


# -- masks -------------------------------------------------------------------


def _polygon_area(vertices) -> float:
    s = 0.0
    for (x1, y1), (x2, y2) in zip(vertices, vertices[1:] + vertices[:1]):
        s += x1 * y2 - x2 * y1
    return 0.5 * s


def _check_convex_ccw(vertices) -> None:
    n = len(vertices)
    if n < 3:
        raise DomainNotSupported("a polygon needs at least 3 vertices")
    for k in range(n):
        (x1, y1), (x2, y2), (x3, y3) = vertices[k], vertices[(k + 1) % n], vertices[(k + 2) % n]
        if (x2 - x1) * (y3 - y2) - (y2 - y1) * (x3 - x2) <= 0.0:
            raise DomainNotSupported("vertices must be convex and counterclockwise")


def _finish(mask: PolygonMask) -> PolygonMask:
    if mask.n_interior < MIN_INTERIOR:
        raise DomainNotSupported(f"only {mask.n_interior} interior points; refine the grid")
    return mask


def polygon_mask(vertices, h: float, shape: str = "polygon") -> PolygonMask:
    """Isotropic lattice through the origin; keeps points strictly inside."""
    vertices = [(float(x), float(y)) for x, y in vertices]
    _check_convex_ccw(vertices)
    xs, ys = zip(*vertices)
    i0, i1 = math.floor(min(xs) / h) - 1, math.ceil(max(xs) / h) + 1
    j0, j1 = math.floor(min(ys) / h) - 1, math.ceil(max(ys) / h) + 1
    X, Y = np.meshgrid(np.arange(i0, i1 + 1) * h, np.arange(j0, j1 + 1) * h)
    inside = np.ones(X.shape, dtype=bool)
    tol = 1e-12 * h
    for (x1, y1), (x2, y2) in zip(vertices, vertices[1:] + vertices[:1]):
        ex, ey = x2 - x1, y2 - y1
        dist = (ex * (Y - y1) - ey * (X - x1)) / math.hypot(ex, ey)
        inside &= dist > tol
    return _finish(
        PolygonMask(shape, tuple(vertices), h, h, i0 * h, j0 * h, inside, _polygon_area(vertices), order=1)
    )


def triangle_mask(half_base: float, height: float, n: int) -> PolygonMask:
    """Isosceles triangle (-b, 0), (b, 0), (0, H) on the lattice hx = b/n, hy = H/n."""
    if n < 4:
        raise DomainNotSupported("n must be at least 4")
    hx, hy = half_base / n, height / n
    i = np.arange(2 * n + 1)[None, :] - n
    j = np.arange(n + 1)[:, None]
    inside = (j > 0) & (np.abs(i) < n - j)
    verts = ((-half_base, 0.0), (half_base, 0.0), (0.0, height))
    return _finish(PolygonMask("triangle", verts, hx, hy, -half_base, 0.0, inside, half_base * height))


def rhombus_mask(d: float, n: int) -> PolygonMask:
    """Rhombus with diagonals 2 (along x) and d on the lattice hx = 1/n, hy = (d/2)/n."""
    if n < 4:
        raise DomainNotSupported("n must be at least 4")
    hx, hy = 1.0 / n, 0.5 * d / n
    i = np.arange(2 * n + 1)[None, :] - n
    j = np.arange(2 * n + 1)[:, None] - n
    inside = np.abs(i) + np.abs(j) < n
    verts = ((-1.0, 0.0), (0.0, -0.5 * d), (1.0, 0.0), (0.0, 0.5 * d))
    return _finish(PolygonMask("rhombus", verts, hx, hy, -1.0, -0.5 * d, inside, d))


def rect_mask(a: float, b: float, n: int) -> PolygonMask:
    """Rectangle [0, a] x [0, b] with n cells along each side."""
    hx, hy = a / n, b / n
    inside = np.zeros((n + 1, n + 1), dtype=bool)
    inside[1:-1, 1:-1] = True
    verts = ((0.0, 0.0), (a, 0.0), (a, b), (0.0, b))
    return _finish(PolygonMask("rect", verts, hx, hy, 0.0, 0.0, inside, a * b))


def disc_mask(R: float, h: float) -> PolygonMask:
    k = math.ceil(R / h) + 1
    g = np.arange(-k, k + 1) * h
    X, Y = np.meshgrid(g, g)
    inside = X * X + Y * Y < R * R
    return _finish(PolygonMask("disc", (), h, h, -k * h, -k * h, inside, math.pi * R * R, order=1))


def sector_mask(rho: float, alpha: float, h: float) -> PolygonMask:
    """Sector of radius rho and opening alpha, apex at the origin, symmetric about the x axis."""
    if not 0.0 < alpha < math.pi:
        raise DomainNotSupported("sector opening must lie in (0, pi)")
    k = math.ceil(rho / h) + 1
    g = np.arange(-k, k + 1) * h
    X, Y = np.meshgrid(np.arange(0, k + 1) * h, g)
    inside = (X * X + Y * Y < rho * rho) & (np.abs(np.arctan2(Y, X)) < alpha / 2) & (X > 0)
    return _finish(PolygonMask("sector", (), h, h, 0.0, -k * h, inside, 0.5 * alpha * rho * rho, order=1))


# -- linear algebra ------------------------------------------------------------


def _laplacian(mask: PolygonMask) -> sp.csr_matrix:
    """Negative 5-point Laplacian restricted to the interior points."""
    ny, nx = mask.inside.shape

    def second_diff(n: int, step: float) -> sp.spmatrix:
        return sp.diags([-1.0, 2.0, -1.0], [-1, 0, 1], shape=(n, n)) / (step * step)

    full = sp.kron(sp.identity(ny), second_diff(nx, mask.hx)) + sp.kron(second_diff(ny, mask.hy), sp.identity(nx))
    idx = np.flatnonzero(mask.inside.ravel())
    return full.tocsr()[idx][:, idx].tocsc()


def _scatter(mask: PolygonMask, values: np.ndarray) -> np.ndarray:
    out = np.zeros(mask.inside.shape)
    out[mask.inside] = values
    return out


TORSION_METHODS = ("cg", "cg-plain", "direct")


def _torsion_vector(A, lu, method: str, tol: float, maxiter: Optional[int], name: str) -> tuple[np.ndarray, int]:
    n = A.shape[0]
    rhs = np.ones(n)
    v = np.zeros(n)
    iterations = 0
    cap = maxiter or 20 * n
    precond = None if method == "cg-plain" else spla.LinearOperator((n, n), matvec=lu.solve)
    # iterative refinement on the defect; each pass gains a few digits
    for _ in range(20):
        r = rhs - A @ v
        if np.max(np.abs(r)) <= tol:
            break
        if method == "direct":
            dv = lu.solve(r)
            iterations += 1
        else:
            count = [0]

            def cb(_xk, count=count):
                count[0] += 1

            dv, info = spla.cg(A, r, rtol=1e-13, atol=0.0, maxiter=cap, M=precond, callback=cb)
            iterations += count[0]
            if info > 0:
                raise NonConvergence(f"cg hit the iteration cap ({cap}) on {name}")
        v = v + dv
    return v, iterations


def fd_torsion(
    mask: PolygonMask,
    method: str = "cg",
    tol: float = DEFECT_TOL,
    maxiter: Optional[int] = None,
    keep_field: bool = True,
    _A=None,
    _lu=None,
) -> GridSolution:
    """Solve -Lap v = 1 with zero boundary data; T = hx hy sum v, M = max v.

    ``method`` is "cg" (conjugate gradients preconditioned by a sparse LU
    factorization, the default), "cg-plain" (no preconditioner) or
    "direct" (LU).  Every method is wrapped in iterative refinement, and
    the stop criterion is the max-norm of the defect 1 - A v.
    """
    if method not in TORSION_METHODS:
        raise ValueError(f"unknown method {method!r}")
    A = _laplacian(mask) if _A is None else _A
    lu = None
    if method != "cg-plain":
        lu = spla.splu(A) if _lu is None else _lu
    v, iterations = _torsion_vector(A, lu, method, tol, maxiter, mask.shape)
    residual = float(np.max(np.abs(1.0 - A @ v)))
    if residual > tol:
        raise NonConvergence(f"torsion defect {residual:.3e} above {tol:.1e}")
    return GridSolution(
        mask=mask,
        field=_scatter(mask, v) if keep_field else None,
        T_est=float(mask.hx * mask.hy * v.sum()),
        M_est=float(v.max()),
        lambda_est=math.nan,
        residual=residual,
        iterations=iterations,
    )


def _inverse_iteration(A, lu, start: np.ndarray, tol: float, maxiter: int) -> tuple[float, int]:
    x = start / np.linalg.norm(start)
    rq = float(x @ (A @ x))
    for k in range(1, maxiter + 1):
        y = lu.solve(x)
        x = y / np.linalg.norm(y)
        new = float(x @ (A @ x))
        if abs(new - rq) <= tol * abs(new):
            return new, k
        rq = new
    raise NonConvergence(f"inverse iteration did not settle within {maxiter} steps")


def fd_lambda(mask: PolygonMask, tol: float = RQ_TOL, maxiter: int = 2000, start: Optional[np.ndarray] = None) -> float:
    """Smallest discrete Dirichlet eigenvalue by inverse power iteration.

    The default start vector is the discrete torsion function, which is
    positive and already close to the ground state.
    """
    A = _laplacian(mask)
    lu = spla.splu(A)
    if start is None:
        start = lu.solve(np.ones(A.shape[0]))
    lam, _ = _inverse_iteration(A, lu, start, tol, maxiter)
    if not lam > 0.0:
        raise NonConvergence("non-positive Rayleigh quotient")
    return lam


def solve(mask: PolygonMask, method: str = "cg", tol: float = DEFECT_TOL, keep_field: bool = False) -> GridSolution:
    """Torsion and eigenvalue on one mask, sharing one factorization."""
    A = _laplacian(mask)
    lu = spla.splu(A)
    tor = fd_torsion(mask, method=method, tol=tol, keep_field=True, _A=A, _lu=lu)
    lam, its = _inverse_iteration(A, lu, tor.field[mask.inside], RQ_TOL, 2000)
    if not lam > 0.0:
        raise NonConvergence("non-positive Rayleigh quotient")
    log.debug("%s: n=%d lambda=%.10g after %d steps", mask.shape, mask.n_interior, lam, its)
    return GridSolution(
        mask=mask,
        field=tor.field if keep_field else None,
        T_est=tor.T_est,
        M_est=tor.M_est,
        lambda_est=lam,
        residual=tor.residual,
        iterations=tor.iterations + its,
    )


# -- extrapolation ---------------------------------------------------------------


@dataclass(frozen=True)
class Richardson:
    extrapolated: float
    error_indicator: float


def richardson(coarse: float, fine: float, p: int = 2) -> Richardson:
    """Combine estimates at h and h/2 assuming an error of order h^p."""
    if not (math.isfinite(coarse) and math.isfinite(fine)):
        raise ValueError("richardson needs finite inputs")
    q = 2.0**p - 1.0
    return Richardson(fine + (fine - coarse) / q, abs(fine - coarse) / q)


@dataclass(frozen=True)
class Extrapolated:
    """Solutions at spacings h and h/2 with Richardson estimates.

    The functionals lambda T / area and lambda M are extrapolated as
    functionals rather than assembled from extrapolated factors; on
    dropped-boundary grids their leading errors partly cancel.
    """

    coarse: GridSolution
    fine: GridSolution

    @property
    def shape(self) -> str:
        return self.fine.mask.shape

    @property
    def area(self) -> float:
        return self.fine.mask.area

    @property
    def order(self) -> int:
        return self.fine.mask.order

    def _rich(self, name: str) -> Richardson:
        return richardson(getattr(self.coarse, name), getattr(self.fine, name), self.order)

    @property
    def lam(self) -> Richardson:
        return self._rich("lambda_est")

    @property
    def T(self) -> Richardson:
        return self._rich("T_est")

    @property
    def M(self) -> Richardson:
        return self._rich("M_est")

    @property
    def ratio_r(self) -> Richardson:
        return self._rich("ratio")

    @property
    def lambda_M_r(self) -> Richardson:
        return self._rich("lambda_M")

    @property
    def ratio(self) -> float:
        return self.ratio_r.extrapolated

    @property
    def ratio_indicator(self) -> float:
        return self.ratio_r.error_indicator

    @property
    def lambda_M(self) -> float:
        return self.lambda_M_r.extrapolated

    @property
    def lambda_M_indicator(self) -> float:
        return self.lambda_M_r.error_indicator


def extrapolate(make_mask: Callable[[int], PolygonMask], n: int, method: str = "cg") -> Extrapolated:
    """Solve at resolution n and 2n (spacing h and h/2)."""
    return Extrapolated(coarse=solve(make_mask(n), method=method), fine=solve(make_mask(2 * n), method=method))


# -- rectangle series ---------------------------------------------------------------


@dataclass(frozen=True)
class RectSeries:
    lambda_exact: float
    T: float
    M: float
    T_tail: float
    M_tail: float

    @property
    def area_ratio_factor(self) -> float:
        return self.lambda_exact * self.T

    def summary(self, a: float, b: float) -> dict:
        return {
            "shape": "rect",
            "a": a,
            "b": b,
            "lambda_exact": self.lambda_exact,
            "T": self.T,
            "M": self.M,
            "T_tail": self.T_tail,
            "M_tail": self.M_tail,
            "ratio": self.lambda_exact * self.T / (a * b),
            "lambda_M": self.lambda_exact * self.M,
        }


def rect_series(a: float, b: float, terms: int = 200) -> RectSeries:
    """Torsion of the a x b rectangle from the single sine series across the short side.

    With s the short side and L the long side (odd n only, k = n pi L / (2 s)):

        T = s^3 L / 12 - (16 s^4 / pi^5) sum tanh(k) / n^5
        M = s^2 / 8 - (4 s^2 / pi^3) sum (-1)^((n-1)/2) / (n^3 cosh k)

    Truncating after n = 2 terms - 1 leaves |T error| <= 2 s^4 / (pi^5 N^4)
    and |M error| <= 4 s^2 / (pi^3 (N+2)^3) with N = 2 terms - 1 (integral
    test for T, alternating series for M).
    """
    if a <= 0.0 or b <= 0.0 or terms < 1:
        raise ValueError("need a, b > 0 and terms >= 1")
    s, L = (a, b) if a <= b else (b, a)
    n = np.arange(1, 2 * terms, 2, dtype=float)
    k = n * math.pi * L / (2 * s)
    T = s**3 * L / 12 - 16 * s**4 / math.pi**5 * float(np.sum(np.tanh(k) / n**5))
    sign = np.where(((n - 1) / 2) % 2 == 0, 1.0, -1.0)
    # 1/cosh(k) underflows harmlessly for large k
    sech = np.exp(-k) * 2.0 / (1.0 + np.exp(-2.0 * k))
    M = 4 * s**2 / math.pi**3 * float(np.sum(sign * (1.0 - sech) / n**3))
    N = float(2 * terms - 1)
    return RectSeries(
        lambda_exact=math.pi**2 * (1 / a**2 + 1 / b**2),
        T=T,
        M=M,
        T_tail=2 * s**4 / (math.pi**5 * N**4),
        M_tail=4 * s**2 / (math.pi**3 * (N + 2) ** 3),
    )


# -- shape dispatch -----------------------------------------------------------------


def mask_factory(shape, h: float) -> tuple[Callable[[int], PolygonMask], int]:
    """A resolution -> mask map for a parsed shape and the resolution matching spacing h.

    For lattice-aligned shapes the returned resolution n gives max(hx, hy) <= h;
    curved shapes take h itself at n = 1 and h / n in general.
    """
    from polya.shapes import Disc, IsoscelesTriangle, Rectangle, Rhombus, Sector

    if not h > 0.0:
        raise ValueError("grid spacing must be positive")
    if isinstance(shape, IsoscelesTriangle):
        b, H = shape.half_base.mid, shape.height.mid
        return (lambda n: triangle_mask(b, H, n)), max(4, math.ceil(max(b, H) / h))
    if isinstance(shape, Rhombus):
        d = shape.d.mid
        return (lambda n: rhombus_mask(d, n)), max(4, math.ceil(max(1.0, d / 2) / h))
    if isinstance(shape, Rectangle):
        return (lambda n: rect_mask(shape.a, shape.b, n)), max(4, math.ceil(max(shape.a, shape.b) / h))
    if isinstance(shape, Disc):
        return (lambda n: disc_mask(shape.r, h / n)), 1
    if isinstance(shape, Sector):
        rho, alpha = shape.rho.mid, shape.alpha.mid
        return (lambda n: sector_mask(rho, alpha, h / n)), 1
    raise DomainNotSupported(f"no finite-difference discretization for {type(shape).__name__}")
