"""
The convexity chain: convexity of the initial curve carried through cones, expanders,
squashed graphs, the space-time track and the canonical expander down to Z >= 0.

Links run in order; the first failing link breaks the chain and the rest are skipped.
"""

import logging
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np

from src.core import spectral
from src.core.models.curve import FlowHistory, SupportCurve
from src.core.models.grid import GridField, SpaceTimeSurface
from src.core.models.reports import ChainLink, ChainReport, ConvexityReport
from src.domains.curves.services import curve_flow_service as flow
from src.domains.curves.services.harnack_service import harnack_lattice
from src.domains.expanders.services.canonical_expander_service import INWARD, surface_steps
from src.domains.expanders.services.expander_service import compute_expander, squash
from src.domains.expanders.services.gauge_service import box_half_width, build_cone
from src.domains.expanders.services import track_service
from src.infrastructure.config.settings import DEFAULT_SEED, FLOW_DT, MIDPOINT_PAIRS

from .convexity_service import cone_convexity, curve_convexity, grid_convexity, surface_convexity

logger = logging.getLogger(__name__)

LINKS: Tuple[Tuple[str, str], ...] = (
    ("initial_curve", "convexity-chain"),
    ("cone", "convexity-chain"),
    ("expander", "expander-lipschitz"),
    ("squashed_graph", "convexity-chain"),
    ("limit_function", "level-set-limit"),
    ("spacetime_track", "level-set-limit"),
    ("canonical_expander", "canonical-expander-sff"),
    ("harnack_nonnegative", "mcf-harnack"),
)
LATTICE_WINDOW = (0.1, 0.8)


def chain_lattice(history: FlowHistory, n_theta: int, n_time: int) -> np.ndarray:
    """(theta, t) pairs with t in [0.1, 0.8] x the extinction bound."""
    horizon = history.metadata.get("horizon", history.t_max)
    lo, hi = LATTICE_WINDOW
    thetas = spectral.angles(n_theta)
    times = np.linspace(lo * horizon, hi * horizon, n_time)
    return np.array([[theta, t] for t in times for theta in thetas])


def _link_from_reports(index: int, reports: Sequence[ConvexityReport]) -> ChainLink:
    """
    The link margin is the smallest measured min_margin, its tolerance that report's
    budget. A link passes when every report passes and the margin is positive.
    """
    name, anchor = LINKS[index - 1]
    worst = min(reports, key=lambda r: r.min_margin)
    passed = all(r.passed for r in reports) and worst.min_margin > 0
    return ChainLink(
        index=index,
        name=name,
        anchor=anchor,
        status="pass" if passed else "fail",
        margin=float(worst.min_margin),
        tolerance=float(worst.tolerance_budget),
        details={"reports": [r.to_dict() for r in reports]},
    )


class _ChainRun:
    """State shared between links (fields are built once and reused downstream)."""

    def __init__(self, curve, N_sequence, resolution, L, history, lattice, harnack_shape, pairs, seed):
        self.curve = curve
        self.N_sequence = list(N_sequence)
        self.resolution = resolution
        self.L = L
        self.history = history
        self.lattice = lattice
        self.harnack_shape = harnack_shape
        self.pairs = pairs
        self.seed = seed
        self.expanders: dict = {}
        self.track: Optional[GridField] = None

    def _grid(self, field: GridField) -> ConvexityReport:
        return grid_convexity(field.restrict(0.5 * self.L), exclude_apex=False, pairs=self.pairs, seed=self.seed)

    def initial_curve(self) -> List[ConvexityReport]:
        return [curve_convexity(self.curve)]

    def cone(self) -> List[ConvexityReport]:
        return [
            cone_convexity(cone.restrict(0.5 * self.L), pairs=self.pairs, seed=self.seed)
            for cone in (build_cone(self.curve, N, self.L, self.resolution) for N in self.N_sequence)
        ]

    def expander(self) -> List[ConvexityReport]:
        for N in self.N_sequence:
            self.expanders[N] = compute_expander(self.curve, N, self.L, self.resolution)
        return [self._grid(self.expanders[N]) for N in self.N_sequence]

    def squashed_graph(self) -> List[ConvexityReport]:
        return [self._grid(squash(self.expanders[N], N)) for N in self.N_sequence]

    def limit_function(self) -> List[ConvexityReport]:
        self.track = track_service.spacetime_track(self.history, self.L, self.resolution)
        return [self._grid(self.track)]

    def spacetime_track(self) -> List[ConvexityReport]:
        lattice = chain_lattice(self.history, *self.lattice)
        return [surface_convexity(SpaceTimeSurface(1.0, self.history), lattice, surface_steps, INWARD, label="track")]

    def canonical_expander(self) -> List[ConvexityReport]:
        lattice = chain_lattice(self.history, *self.lattice)
        return [
            surface_convexity(SpaceTimeSurface(N, self.history), lattice, surface_steps, INWARD, label=f"Gamma_{N:g}")
            for N in self.N_sequence
        ]

    def harnack_nonnegative(self) -> List[ConvexityReport]:
        lattice = chain_lattice(self.history, *self.harnack_shape)
        thetas = np.unique(lattice[:, 0])
        times = np.unique(lattice[:, 1])
        Z = harnack_lattice(self.history, thetas, times)
        i, j = np.unravel_index(int(np.argmin(Z)), Z.shape)
        return [
            ConvexityReport(
                kind="surface",
                min_margin=float(Z[i, j]),
                witness=[float(thetas[j]), float(times[i])],
                tolerance_budget=0.0,
                strict=True,
                details={"label": "Z_min lattice", "shape": list(Z.shape)},
            )
        ]


def convexity_chain(
    curve: SupportCurve,
    N_sequence: Sequence[float],
    resolution: int,
    L: Optional[float] = None,
    history: Optional[FlowHistory] = None,
    dt: float = FLOW_DT,
    scheme: str = "semi_implicit",
    snapshot_every: int = 10,
    lattice: Tuple[int, int] = (16, 10),
    harnack_shape: Tuple[int, int] = (64, 40),
    pairs: int = MIDPOINT_PAIRS,
    seed: int = DEFAULT_SEED,
) -> ChainReport:
    """
    Evaluate the eight links in order on [-L, L]^2 (L = None picks box_half_width).
    Any exception inside a link is recorded as a failure of that link with the error
    message in its details.
    """
    report = ChainReport(curve=curve.label, N_sequence=[float(N) for N in N_sequence])
    L = box_half_width(curve, L)
    run = _ChainRun(curve, N_sequence, resolution, L, history, lattice, harnack_shape, pairs, seed)
    broken = False
    for index, (name, anchor) in enumerate(LINKS, start=1):
        if broken:
            report.links.append(ChainLink(index=index, name=name, anchor=anchor, status="skipped"))
            continue
        if index == 5 and run.history is None:
            try:
                t_end = flow.FLOW_HORIZON_FRACTION * flow.flow_horizon(curve)
                run.history = flow.run_flow(curve, t_end, dt, scheme, snapshot_every)
            except Exception as e:
                logger.error(f"❌ Chain link {index} ({name}): flow failed: {e}")
                report.links.append(_failed(index, name, anchor, e))
                broken = True
                continue
        step: Callable[[], List[ConvexityReport]] = getattr(run, name)
        try:
            link = _link_from_reports(index, step())
        except Exception as e:
            logger.error(f"❌ Chain link {index} ({name}) raised: {e}")
            link = _failed(index, name, anchor, e)
        marker = "✅" if link.passed else "❌"
        logger.info(f"{marker} Chain link {index} ({name}): margin {link.margin}")
        report.links.append(link)
        broken = not link.passed
    return report


def _failed(index: int, name: str, anchor: str, error: Exception) -> ChainLink:
    return ChainLink(
        index=index,
        name=name,
        anchor=anchor,
        status="fail",
        details={"error": type(error).__name__, "message": str(error)},
    )
