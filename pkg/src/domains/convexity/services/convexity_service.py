"""
Discrete convexity certificates for curves, height fields and parametrized surfaces.

Surfaces are callables params (a, b) -> point in R^3. Second fundamental forms use
the unit normal pointing to the convex side, so spheres give +1/R and convex graphs
are nonnegative.
"""

import logging
from typing import Callable, Dict, Optional, Sequence, Tuple, Union

import numpy as np
from scipy.interpolate import RectBivariateSpline
from scipy.linalg import eigh

from src.core.exceptions import DegenerateGeometryError, InvalidDomainError
from src.core.models.curve import SupportCurve
from src.core.models.grid import GridField
from src.core.models.reports import ConvexityReport
from src.infrastructure.config.settings import APEX_EXCLUSION_CELLS, DEFAULT_SEED, MIDPOINT_PAIRS

logger = logging.getLogger(__name__)

METRIC_DETERMINANT_FLOOR = 1e-12
ROUNDOFF = 64.0 * np.finfo(float).eps
HOMOGENEITY_FACTOR = 2.0

Surface = Callable[[np.ndarray], np.ndarray]
Steps = Union[Tuple[float, float], Callable[[np.ndarray], Tuple[float, float]]]
Inward = Union[np.ndarray, Callable[[np.ndarray], np.ndarray]]

UPWARD = np.array([0.0, 0.0, 1.0])


def curve_convexity(curve: SupportCurve) -> ConvexityReport:
    """Strict test: min over angles of h'' + h must be positive."""
    r = curve.radius_of_curvature
    j = int(np.argmin(r))
    return ConvexityReport(
        kind="curve",
        min_margin=float(r[j]),
        witness=float(curve.thetas[j]),
        tolerance_budget=0.0,
        strict=True,
        details={"label": curve.label, "M": curve.M},
    )


def _hessian(values: np.ndarray, spacing: float) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Central-difference (f_xx, f_yy, f_xy) on interior nodes."""
    f = values
    fxx = (f[2:, 1:-1] - 2.0 * f[1:-1, 1:-1] + f[:-2, 1:-1]) / spacing**2
    fyy = (f[1:-1, 2:] - 2.0 * f[1:-1, 1:-1] + f[1:-1, :-2]) / spacing**2
    fxy = (f[2:, 2:] - f[2:, :-2] - f[:-2, 2:] + f[:-2, :-2]) / (4.0 * spacing**2)
    return fxx, fyy, fxy


def _hessian_min_eigenvalue(values: np.ndarray, spacing: float) -> np.ndarray:
    """Smaller eigenvalue of the central-difference Hessian on interior nodes."""
    fxx, fyy, fxy = _hessian(values, spacing)
    mean = 0.5 * (fxx + fyy)
    radius = np.sqrt((0.5 * (fxx - fyy)) ** 2 + fxy**2)
    return mean - radius


def _apex_mask(shape, center: int, cells: int, offset: int = 1) -> np.ndarray:
    """True on nodes farther than `cells` from the centre node; offset 1 for interior arrays."""
    i, j = np.indices(shape)
    return (i + offset - center) ** 2 + (j + offset - center) ** 2 > cells**2


def _richardson_nodes(field: GridField, fine: np.ndarray, mask: np.ndarray, coarse: np.ndarray, cmask: np.ndarray):
    """max |fine - coarse| / 3 over interior nodes shared by the grid and its stride-2 subgrid."""
    c = field.center_index
    ii = (np.arange(coarse.shape[0]) + 1) * 2 + c % 2 - 1
    common = fine[np.ix_(ii, ii)]
    common_mask = cmask & mask[np.ix_(ii, ii)]
    if not common_mask.any():
        return 0.0, common_mask
    return float(np.max(np.abs(common - coarse)[common_mask]) / 3.0), common_mask


def _subgrid(field: GridField) -> np.ndarray:
    c = field.center_index
    return field.values[c % 2 :: 2, c % 2 :: 2]


def _subgrid_mask(field: GridField, coarse_shape, apex_cells: int, exclude_apex: bool) -> np.ndarray:
    if not exclude_apex:
        return np.ones(coarse_shape, dtype=bool)
    c = field.center_index
    return _apex_mask(coarse_shape, (c - c % 2) // 2, max(1, apex_cells // 2 + 1))


def grid_convexity(
    field: GridField,
    exclude_apex: bool = True,
    apex_cells: int = APEX_EXCLUSION_CELLS,
    pairs: int = MIDPOINT_PAIRS,
    seed: int = DEFAULT_SEED,
) -> ConvexityReport:
    """
    Hessian scan plus midpoint scan.

    The midpoint defect (f(p) + f(q))/2 - f(m) is reported as 8 * defect / |p - q|^2,
    the mean second derivative along the segment, so both scans share units.
    Tolerance: max |lambda_h - lambda_2h| / 3 over the common nodes, plus roundoff.
    With `exclude_apex` both scans skip a disc of `apex_cells` around the centre.
    """
    if field.resolution < 5:
        raise InvalidDomainError("grid convexity needs resolution >= 5")
    f = field.values
    d = field.spacing
    c = field.center_index

    fine = _hessian_min_eigenvalue(f, d)
    mask = _apex_mask(fine.shape, c, apex_cells) if exclude_apex else np.ones(fine.shape, dtype=bool)
    if not mask.any():
        raise InvalidDomainError("apex exclusion removes every interior node")
    masked = np.where(mask, fine, np.inf)
    idx = np.unravel_index(int(np.argmin(masked)), masked.shape)
    hessian_min = float(masked[idx])
    witness = [float(field.axis[idx[0] + 1]), float(field.axis[idx[1] + 1])]

    richardson = 0.0
    coarse_values = _subgrid(field)
    if coarse_values.shape[0] >= 3:
        coarse = _hessian_min_eigenvalue(coarse_values, 2.0 * d)
        cmask = _subgrid_mask(field, coarse.shape, apex_cells, exclude_apex)
        richardson, _ = _richardson_nodes(field, fine, mask, coarse, cmask)
    roundoff = ROUNDOFF * float(np.max(np.abs(f))) / d**2
    tolerance = richardson + roundoff

    keep = _apex_mask(f.shape, c, apex_cells, offset=0) if exclude_apex else None
    midpoint_min, midpoint_witness = _midpoint_scan(field, pairs, seed, keep)
    margin = min(hessian_min, midpoint_min)

    return ConvexityReport(
        kind="grid_field",
        min_margin=margin,
        witness=witness if hessian_min <= midpoint_min else midpoint_witness,
        tolerance_budget=tolerance,
        details={
            "label": field.label,
            "hessian_min": hessian_min,
            "midpoint_min": midpoint_min,
            "pairs": pairs,
            "seed": seed,
            "apex_excluded": exclude_apex,
            "resolution": field.resolution,
        },
    )


def _transverse_radial(values: np.ndarray, spacing: float, x: np.ndarray, y: np.ndarray):
    """t.H.t and r.H.r on interior nodes, with r = y / |y| and t perpendicular to r."""
    fxx, fyy, fxy = _hessian(values, spacing)
    X, Y = x[1:-1, 1:-1], y[1:-1, 1:-1]
    r2 = X**2 + Y**2
    r2 = np.where(r2 > 0, r2, 1.0)
    transverse = (fxx * Y**2 - 2.0 * fxy * X * Y + fyy * X**2) / r2
    radial = (fxx * X**2 + 2.0 * fxy * X * Y + fyy * Y**2) / r2
    return transverse, radial


def cone_convexity(
    field: GridField,
    apex_cells: int = APEX_EXCLUSION_CELLS,
    pairs: int = MIDPOINT_PAIRS,
    seed: int = DEFAULT_SEED,
) -> ConvexityReport:
    """
    Convexity of a positively 1-homogeneous field, away from its apex at the origin.

    The Hessian of such a field annihilates the position vector, so its radial second
    derivative vanishes and convexity reduces to the transverse second derivative,
    which is positive for a cone over a strictly convex curve. min_margin is the
    smallest transverse value; the radial value (within HOMOGENEITY_FACTOR tolerances)
    and the midpoint scan (within one tolerance) are side conditions.
    """
    if field.resolution < 5:
        raise InvalidDomainError("cone convexity needs resolution >= 5")
    f = field.values
    d = field.spacing
    c = field.center_index
    x, y = field.mesh()

    transverse, radial = _transverse_radial(f, d, x, y)
    mask = _apex_mask(transverse.shape, c, apex_cells)
    if not mask.any():
        raise InvalidDomainError("apex exclusion removes every interior node")
    masked = np.where(mask, transverse, np.inf)
    idx = np.unravel_index(int(np.argmin(masked)), masked.shape)
    transverse_min = float(masked[idx])

    richardson = 0.0
    radial_max = float(np.abs(radial[mask]).max())
    coarse_values = _subgrid(field)
    if coarse_values.shape[0] >= 3:
        cx, cy = x[c % 2 :: 2, c % 2 :: 2], y[c % 2 :: 2, c % 2 :: 2]
        coarse_transverse, coarse_radial = _transverse_radial(coarse_values, 2.0 * d, cx, cy)
        cmask = _subgrid_mask(field, coarse_transverse.shape, apex_cells, True)
        richardson, common = _richardson_nodes(field, transverse, mask, coarse_transverse, cmask)
        radial_richardson, _ = _richardson_nodes(field, radial, mask, coarse_radial, cmask)
        richardson = max(richardson, radial_richardson)
        if common.any():
            ii = (np.arange(coarse_transverse.shape[0]) + 1) * 2 + c % 2 - 1
            radial_max = float(np.abs(radial[np.ix_(ii, ii)][common]).max())
    roundoff = ROUNDOFF * float(np.max(np.abs(f))) / d**2
    tolerance = richardson + roundoff

    keep = _apex_mask(f.shape, c, apex_cells, offset=0)
    midpoint_min, _ = _midpoint_scan(field, pairs, seed, keep)

    return ConvexityReport(
        kind="grid_field",
        min_margin=transverse_min,
        witness=[float(field.axis[idx[0] + 1]), float(field.axis[idx[1] + 1])],
        tolerance_budget=tolerance,
        details={
            "label": field.label,
            "transverse_min": transverse_min,
            "radial_max": radial_max,
            "midpoint_min": midpoint_min,
            "pairs": pairs,
            "seed": seed,
            "apex_excluded": True,
            "resolution": field.resolution,
        },
        conditions={
            "homogeneous": bool(radial_max <= HOMOGENEITY_FACTOR * tolerance),
            "midpoint": bool(midpoint_min >= -tolerance),
        },
    )


def _midpoint_scan(field: GridField, pairs: int, seed: int, keep: Optional[np.ndarray] = None):
    """
    Random node pairs of equal index parity so midpoints are grid nodes.

    `keep` masks admissible nodes; pairs with an endpoint or midpoint outside it are dropped.
    """
    n = field.resolution
    rng = np.random.default_rng(seed)
    p = rng.integers(0, n, size=(pairs, 2))
    q = rng.integers(0, n, size=(pairs, 2))
    q = q - ((q - p) % 2)  # match parity
    q = np.where(q < 0, q + 2, q)
    distinct = np.any(p != q, axis=1)
    p, q = p[distinct], q[distinct]
    m = (p + q) // 2
    if keep is not None:
        admissible = keep[p[:, 0], p[:, 1]] & keep[q[:, 0], q[:, 1]] & keep[m[:, 0], m[:, 1]]
        p, q, m = p[admissible], q[admissible], m[admissible]
    if p.size == 0:
        return np.inf, None
    f = field.values
    defect = 0.5 * (f[p[:, 0], p[:, 1]] + f[q[:, 0], q[:, 1]]) - f[m[:, 0], m[:, 1]]
    dist_sq = np.sum((p - q) ** 2, axis=1) * field.spacing**2
    normalized = 8.0 * defect / dist_sq
    k = int(np.argmin(normalized))
    witness = [float(field.axis[m[k, 0]]), float(field.axis[m[k, 1]])]
    return float(normalized[k]), witness


def graph_surface(field: GridField) -> Surface:
    """(x, y) -> (x, y, f(x, y)) with f a bicubic spline of the grid values."""
    spline = RectBivariateSpline(field.axis, field.axis, field.values, kx=3, ky=3)

    def embed(params):
        x, y = float(params[0]), float(params[1])
        return np.array([x, y, float(spline(x, y)[0, 0])])

    return embed


def _resolve(value, params):
    return value(params) if callable(value) else value


def second_fundamental_form(
    surface: Surface,
    params,
    steps: Steps = (1e-3, 1e-3),
    inward: Inward = UPWARD,
) -> Dict[str, np.ndarray]:
    """Metric g, second fundamental form h (w.r.t. the convex-side normal), normal and point."""
    params = np.asarray(params, dtype=float)
    da, db = _resolve(steps, params)
    ea = np.array([da, 0.0])
    eb = np.array([0.0, db])

    phi = np.asarray(surface(params), dtype=float)
    pa, ma = surface(params + ea), surface(params - ea)
    pb, mb = surface(params + eb), surface(params - eb)
    phi_a = (pa - ma) / (2.0 * da)
    phi_b = (pb - mb) / (2.0 * db)
    phi_aa = (pa - 2.0 * phi + ma) / da**2
    phi_bb = (pb - 2.0 * phi + mb) / db**2
    phi_ab = (
        surface(params + ea + eb) - surface(params + ea - eb) - surface(params - ea + eb) + surface(params - ea - eb)
    ) / (4.0 * da * db)

    g = np.array([[phi_a @ phi_a, phi_a @ phi_b], [phi_a @ phi_b, phi_b @ phi_b]])
    det = float(np.linalg.det(g))
    if det < METRIC_DETERMINANT_FLOOR:
        raise DegenerateGeometryError(
            f"degenerate first fundamental form (det = {det:.3e}) at params {params.tolist()}",
            {"params": params.tolist(), "det": det},
        )
    normal = np.cross(phi_a, phi_b)
    normal /= np.linalg.norm(normal)
    if normal @ np.asarray(_resolve(inward, phi), dtype=float) < 0:
        normal = -normal

    h = np.array([[phi_aa @ normal, phi_ab @ normal], [phi_ab @ normal, phi_bb @ normal]])
    return {"g": g, "h": h, "normal": normal, "point": phi, "tangents": np.array([phi_a, phi_b])}


def surface_sff(
    surface: Surface,
    params,
    direction: Sequence[float],
    steps: Steps = (1e-3, 1e-3),
    inward: Inward = UPWARD,
    form: Optional[Dict[str, np.ndarray]] = None,
) -> float:
    """
    h(W, W) for the tangent vector W = direction[0] Phi_a + direction[1] Phi_b.

    `form` reuses a second_fundamental_form result computed at the same point.
    """
    if form is None:
        form = second_fundamental_form(surface, params, steps, inward)
    w = np.asarray(direction, dtype=float)
    return float(w @ form["h"] @ w)


def principal_curvatures(surface: Surface, params, steps: Steps = (1e-3, 1e-3), inward: Inward = UPWARD):
    form = second_fundamental_form(surface, params, steps, inward)
    return eigh(form["h"], form["g"], eigvals_only=True)


def _scaled_steps(steps: Steps, factor: float) -> Steps:
    if callable(steps):
        return lambda params: tuple(factor * s for s in steps(params))
    return tuple(factor * s for s in steps)


def surface_convexity(
    surface: Surface,
    sample_lattice: Sequence[Sequence[float]],
    steps: Steps = (1e-3, 1e-3),
    inward: Inward = UPWARD,
    label: str = "",
) -> ConvexityReport:
    """Smallest principal curvature over the lattice; Richardson tolerance from steps h and 2h."""
    lattice = np.asarray(sample_lattice, dtype=float).reshape(-1, 2)
    smallest = np.empty(len(lattice))
    differences = np.empty(len(lattice))
    coarse_steps = _scaled_steps(steps, 2.0)
    for k, params in enumerate(lattice):
        fine = principal_curvatures(surface, params, steps, inward)
        coarse = principal_curvatures(surface, params, coarse_steps, inward)
        smallest[k] = fine.min()
        differences[k] = abs(fine.min() - coarse.min())
    k = int(np.argmin(smallest))
    tolerance = float(differences.max() / 3.0) + 1e-9 * float(np.abs(smallest).max())
    return ConvexityReport(
        kind="surface",
        min_margin=float(smallest[k]),
        witness=lattice[k].tolist(),
        tolerance_budget=tolerance,
        details={"label": label, "samples": len(lattice)},
    )
