"""DTLZ test problems and samplers for their true Pareto fronts.

The seven problems follow the standard definitions of Deb, Thiele, Laumanns
and Zitzler (2002): ``d`` decision variables in ``[0, 1]``, ``M`` objectives
to minimize, and ``k = d - M + 1`` distance variables driving the
convergence term ``g``. Front samplers produce the reference sets used for
inverted generational distance.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .sampling import lattice_covering, simplex_lattice

FAMILIES = ("dtlz1", "dtlz2", "dtlz3", "dtlz4", "dtlz5", "dtlz6", "dtlz7")


@dataclass(frozen=True)
class ProblemInstance:
    """A fully specified benchmark instance.

    Attributes:
        family: One of ``FAMILIES``.
        n_obj: Number of objectives, at least 2.
        n_var: Number of decision variables, at least ``n_obj`` so that the
            distance subspace is nonempty.
        alpha: Bias exponent used by DTLZ4 only.
    """

    family: str
    n_obj: int
    n_var: int
    alpha: float = 100.0

    def __post_init__(self) -> None:
        if self.family not in FAMILIES:
            raise ValueError(f"unknown problem family {self.family!r}")
        if self.n_obj < 2:
            raise ValueError(f"need at least two objectives, got {self.n_obj}")
        if self.n_var < self.n_obj:
            raise ValueError(
                f"need n_var >= n_obj, got n_var={self.n_var} n_obj={self.n_obj}"
            )

    @property
    def n_distance(self) -> int:
        """Size ``k`` of the distance subspace."""
        return self.n_var - self.n_obj + 1

    @property
    def bounds(self) -> tuple[float, float]:
        return (0.0, 1.0)


def evaluate(problem: ProblemInstance, x: np.ndarray) -> np.ndarray:
    """Evaluate the true objectives at ``x``.

    Accepts a single point of shape ``(n_var,)`` or a batch ``(n, n_var)``
    and returns ``(n_obj,)`` or ``(n, n_obj)`` accordingly.
    """
    arr = np.asarray(x, dtype=float)
    single = arr.ndim == 1
    pts = np.atleast_2d(arr)
    if pts.ndim != 2 or pts.shape[1] != problem.n_var:
        raise ValueError(
            f"expected points with {problem.n_var} variables, got shape {arr.shape}"
        )
    if np.any(pts < 0.0) or np.any(pts > 1.0):
        raise ValueError("decision variables must lie in [0, 1]")
    out = _EVALUATORS[problem.family](problem, pts)
    return out[0] if single else out


def _g_rastrigin(xm: np.ndarray) -> np.ndarray:
    # Multimodal distance function shared by DTLZ1 and DTLZ3.
    z = xm - 0.5
    return 100.0 * (xm.shape[1] + np.sum(z * z - np.cos(20.0 * np.pi * z), axis=1))


def _g_sphere(xm: np.ndarray) -> np.ndarray:
    z = xm - 0.5
    return np.sum(z * z, axis=1)


def _linear_objectives(pos: np.ndarray, g: np.ndarray) -> np.ndarray:
    # f_1 = (1/2)(1+g) x_1...x_{M-1}, later objectives peel off one factor
    # and pick up (1 - x_j); the last objective is (1/2)(1+g)(1 - x_1).
    n, m1 = pos.shape
    m = m1 + 1
    prod = np.ones((n, m1 + 1))
    prod[:, 1:] = np.cumprod(pos, axis=1)
    f = np.empty((n, m))
    f[:, 0] = prod[:, m1]
    for i in range(1, m):
        f[:, i] = prod[:, m1 - i] * (1.0 - pos[:, m1 - i])
    return 0.5 * (1.0 + g)[:, None] * f


def _spherical_objectives(theta: np.ndarray, g: np.ndarray) -> np.ndarray:
    # Concave unit-sphere parametrization: products of cosines with one
    # trailing sine, scaled by (1+g).
    n, m1 = theta.shape
    m = m1 + 1
    cos = np.cos(theta)
    sin = np.sin(theta)
    prod = np.cumprod(cos, axis=1)
    f = np.empty((n, m))
    f[:, 0] = prod[:, m1 - 1]
    for i in range(1, m):
        j = m1 - i
        base = prod[:, j - 1] if j >= 1 else 1.0
        f[:, i] = base * sin[:, j]
    return (1.0 + g)[:, None] * f


def _eval_dtlz1(problem: ProblemInstance, x: np.ndarray) -> np.ndarray:
    m = problem.n_obj
    return _linear_objectives(x[:, : m - 1], _g_rastrigin(x[:, m - 1 :]))


def _eval_dtlz2(problem: ProblemInstance, x: np.ndarray) -> np.ndarray:
    m = problem.n_obj
    theta = 0.5 * np.pi * x[:, : m - 1]
    return _spherical_objectives(theta, _g_sphere(x[:, m - 1 :]))


def _eval_dtlz3(problem: ProblemInstance, x: np.ndarray) -> np.ndarray:
    m = problem.n_obj
    theta = 0.5 * np.pi * x[:, : m - 1]
    return _spherical_objectives(theta, _g_rastrigin(x[:, m - 1 :]))


def _eval_dtlz4(problem: ProblemInstance, x: np.ndarray) -> np.ndarray:
    m = problem.n_obj
    theta = 0.5 * np.pi * np.power(x[:, : m - 1], problem.alpha)
    return _spherical_objectives(theta, _g_sphere(x[:, m - 1 :]))


def _degenerate_theta(pos: np.ndarray, g: np.ndarray) -> np.ndarray:
    # DTLZ5/6 bend all position variables but the first toward the
    # pi/4 meridian as g -> 0, collapsing the front to a curve.
    theta = np.empty_like(pos)
    theta[:, 0] = 0.5 * np.pi * pos[:, 0]
    if pos.shape[1] > 1:
        scale = np.pi / (4.0 * (1.0 + g))
        theta[:, 1:] = scale[:, None] * (1.0 + 2.0 * g[:, None] * pos[:, 1:])
    return theta


def _eval_dtlz5(problem: ProblemInstance, x: np.ndarray) -> np.ndarray:
    m = problem.n_obj
    g = _g_sphere(x[:, m - 1 :])
    return _spherical_objectives(_degenerate_theta(x[:, : m - 1], g), g)


def _eval_dtlz6(problem: ProblemInstance, x: np.ndarray) -> np.ndarray:
    m = problem.n_obj
    g = np.sum(np.power(x[:, m - 1 :], 0.1), axis=1)
    return _spherical_objectives(_degenerate_theta(x[:, : m - 1], g), g)


def _eval_dtlz7(problem: ProblemInstance, x: np.ndarray) -> np.ndarray:
    m = problem.n_obj
    k = problem.n_distance
    f = np.empty((x.shape[0], m))
    f[:, : m - 1] = x[:, : m - 1]
    g = 1.0 + 9.0 * np.sum(x[:, m - 1 :], axis=1) / k
    front = f[:, : m - 1]
    h = m - np.sum(front / (1.0 + g)[:, None] * (1.0 + np.sin(3.0 * np.pi * front)), axis=1)
    f[:, m - 1] = (1.0 + g) * h
    return f


_EVALUATORS = {
    "dtlz1": _eval_dtlz1,
    "dtlz2": _eval_dtlz2,
    "dtlz3": _eval_dtlz3,
    "dtlz4": _eval_dtlz4,
    "dtlz5": _eval_dtlz5,
    "dtlz6": _eval_dtlz6,
    "dtlz7": _eval_dtlz7,
}


def sample_pareto_front(problem: ProblemInstance, n: int = 10_000) -> np.ndarray:
    """Sample ``n`` points from the true Pareto front, deterministically.

    DTLZ1-4 fronts come from a simplex lattice (scaled onto the linear front
    or normalized onto the unit sphere), DTLZ5/6 from a uniform sweep of the
    degenerate curve, and DTLZ7 from the disconnected-region construction.
    The same arguments always produce the same array.
    """
    if n < problem.n_obj:
        raise ValueError(f"need at least n_obj={problem.n_obj} points, got {n}")
    return _FRONT_SAMPLERS[problem.family](problem, n)


def _evenly_spaced_subset(points: np.ndarray, n: int) -> np.ndarray:
    if len(points) < n:
        raise ValueError(f"cannot draw {n} points from {len(points)}")
    if len(points) == n:
        return points
    idx = np.round(np.linspace(0, len(points) - 1, n)).astype(int)
    return points[idx]


def _front_simplex(problem: ProblemInstance, n: int) -> np.ndarray:
    m = problem.n_obj
    weights = simplex_lattice(m, lattice_covering(m, n))
    return _evenly_spaced_subset(weights, n)


def _front_dtlz1(problem: ProblemInstance, n: int) -> np.ndarray:
    return 0.5 * _front_simplex(problem, n)


def _front_sphere(problem: ProblemInstance, n: int) -> np.ndarray:
    w = _front_simplex(problem, n)
    return w / np.linalg.norm(w, axis=1, keepdims=True)


def _front_curve(problem: ProblemInstance, n: int) -> np.ndarray:
    # At g = 0 the front depends on the first position variable only.
    m = problem.n_obj
    theta = np.empty((n, m - 1))
    theta[:, 0] = 0.5 * np.pi * np.linspace(0.0, 1.0, n)
    theta[:, 1:] = 0.25 * np.pi
    return _spherical_objectives(theta, np.zeros(n))


def _dtlz7_records(n_values: int) -> np.ndarray:
    # Nondominated positions of a single DTLZ7 coordinate: x is preferred
    # in f_i but enters f_M through -c(x) with c(x) = x/2 (1 + sin 3 pi x),
    # so exactly the strict running maxima of c survive.
    grid = max(1001, 8 * n_values)
    while True:
        x = np.linspace(0.0, 1.0, grid)
        c = 0.5 * x * (1.0 + np.sin(3.0 * np.pi * x))
        keep = np.empty(grid, dtype=bool)
        keep[0] = True
        keep[1:] = c[1:] > np.maximum.accumulate(c)[:-1]
        records = x[keep]
        if len(records) >= n_values:
            return _evenly_spaced_subset(records, n_values)
        grid *= 2


def _front_dtlz7(problem: ProblemInstance, n: int) -> np.ndarray:
    m = problem.n_obj
    per_dim = int(np.ceil(n ** (1.0 / (m - 1))))
    values = _dtlz7_records(per_dim)
    mesh = np.meshgrid(*([values] * (m - 1)), indexing="ij")
    front = np.stack([g.ravel() for g in mesh], axis=1)
    front = _evenly_spaced_subset(front, n)
    f = np.empty((len(front), m))
    f[:, : m - 1] = front
    # g = 1 on the front, so f_M = 2 (M - sum_i c(f_i)).
    c = 0.5 * front * (1.0 + np.sin(3.0 * np.pi * front))
    f[:, m - 1] = 2.0 * (m - np.sum(c, axis=1))
    return f


_FRONT_SAMPLERS = {
    "dtlz1": _front_dtlz1,
    "dtlz2": _front_sphere,
    "dtlz3": _front_sphere,
    "dtlz4": _front_sphere,
    "dtlz5": _front_curve,
    "dtlz6": _front_curve,
    "dtlz7": _front_dtlz7,
}
