"""Initial states, fusion gates, heralded loss, and resource counting.

Gates are modeled at the probability level only: a fusion is a coin, and
the lattice sees nothing but the site and bond occupation probabilities
the coins induce. That is exactly the reduction the rest of the package
operates under, so nothing here touches optical modes or gate circuits.
"""

from __future__ import annotations

from dataclasses import dataclass

from .lattice import LatticeKind
from .percolation import Configuration, PercolationParams, close_lost_sites
from .rng import RngSpec

_STATE_SIZES = (4, 5, 6, 7)

# largest qubit count for which loss_budget at the default rates
# (p_effective=1e-5, block_nocross_prob=4.76e-6) stays below 3e-3
BUDGET_QUBIT_BOUND = 299


@dataclass(frozen=True)
class ResourceSpec:
    """Initial cluster species and the fusion gate acting between them.

    ``initial_state_size`` selects the preparation scheme: 7 for cubic
    stars, 6 for the covering-lattice K6 states, 5 for 3-arm stars with
    a redundantly encoded center, 4 for GHZ states on covering sites.
    """

    kind: LatticeKind
    initial_state_size: int
    p_fusion: float = 0.5

    def __post_init__(self) -> None:
        if self.initial_state_size not in _STATE_SIZES:
            raise ValueError(
                f"initial_state_size must be one of {_STATE_SIZES}, "
                f"got {self.initial_state_size}"
            )
        if not 0.0 <= self.p_fusion <= 1.0:
            raise ValueError("p_fusion must lie in [0, 1]")


@dataclass(frozen=True)
class LossSpec:
    """Heralded loss rate plus the post-encoding effective rate.

    ``branching`` documents the tree encoding the effective rate was
    derived from; it enters no computation here.
    """

    p_loss_heralded: float
    p_loss_effective: float = 1e-5
    branching: tuple[int, ...] = (6, 7, 7, 1)

    def __post_init__(self) -> None:
        for name in ("p_loss_heralded", "p_loss_effective"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1]")


def site_success_prob_5star(p_fusion: float) -> float:
    """Success probability of preparing a 5-star site.

    The center is encoded redundantly, so preparation succeeds iff at
    least one of the two central fusions does.
    """
    if not 0.0 <= p_fusion <= 1.0:
        raise ValueError("p_fusion must lie in [0, 1]")
    return 1.0 - (1.0 - p_fusion) ** 2


def mixed_params_from_gates(spec: ResourceSpec) -> PercolationParams:
    """Site/bond probabilities induced by the preparation scheme.

    7-qubit cubic stars leave sites deterministic and put the fusion
    coin on every bond. 5-qubit 3-arm stars additionally make the site
    itself probabilistic through the two central fusions. The covering
    schemes put the single fusion coin on the covering site and keep
    bonds deterministic.
    """
    kind, size, pf = spec.kind, spec.initial_state_size, spec.p_fusion
    if kind is LatticeKind.CUBIC and size == 7:
        return PercolationParams.mixed(1.0, pf)
    if size == 5 and kind in (LatticeKind.CUBIC, LatticeKind.DIAMOND):
        return PercolationParams.mixed(site_success_prob_5star(pf), pf)
    if kind is LatticeKind.COVERING_CUBIC and size == 6:
        return PercolationParams.mixed(pf, 1.0)
    if kind is LatticeKind.PYROCHLORE and size == 4:
        return PercolationParams.mixed(pf, 1.0)
    raise ValueError(
        f"no gate mapping for {kind.value} with {size}-qubit initial states"
    )


def diamond_bond_count(a: int, b: int, c: int) -> int:
    """Bonds of an a*b*c-cell diamond region, counted in closed form.

    7 internal bonds per conventional cell, plus the bonds crossing cell
    faces: 2 per interior face and 1 per interior edge of the cell grid.
    Matches ``build_block(DIAMOND, (a, b, c)).n_edges`` exactly.
    """
    if a < 1 or b < 1 or c < 1:
        raise ValueError("extents must be positive")
    internal = 7 * a * b * c
    faces = 2 * ((a - 1) * b * c + a * (b - 1) * c + a * b * (c - 1))
    edges = a * (b - 1) * (c - 1) + (a - 1) * b * (c - 1) + (a - 1) * (b - 1) * c
    return internal + faces + edges


def resource_count(kind: LatticeKind, L: int, k: int) -> tuple[int, int]:
    """(initial states, qubit total) for an assembled L x L region.

    Cubic stars sit one per vertex of the (2kL, 2kL, 2k) region, and the
    covering K6 states mirror that count one per covered vertex. GHZ
    states sit one per covering site, which is one per bond of the
    (kL, kL, k)-cell diamond region.
    """
    if L < 1 or k < 1:
        raise ValueError("L and k must be positive")
    if kind is LatticeKind.CUBIC:
        n = (2 * k * L) ** 2 * (2 * k)
        return n, 7 * n
    if kind is LatticeKind.COVERING_CUBIC:
        n = (2 * k * L) ** 2 * (2 * k)
        return n, 6 * n
    if kind in (LatticeKind.DIAMOND, LatticeKind.PYROCHLORE):
        n = diamond_bond_count(k * L, k * L, k)
        return n, 4 * n
    raise ValueError(f"no resource counting for kind {kind.value}")


def apply_heralded_loss(
    cfg: Configuration, p_loss: float, rng: RngSpec, radius: int = 1
) -> Configuration:
    """Close every lost site and all sites within ``radius`` of one.

    Loss is heralded, so the neighborhood of each failure is measured
    out; that closure is what the radius controls.
    """
    out, _ = close_lost_sites(cfg, p_loss, rng, radius=radius)
    return out


def loss_budget(
    p_effective: float, block_nocross_prob: float, qubits_in_use: int
) -> float:
    """Overall failure rate of one renormalized site.

    The site fails if any of the qubits actually used from its block is
    lost at the effective (post-encoding) rate, or if the block fails to
    cross at all.
    """
    if not 0.0 <= p_effective <= 1.0:
        raise ValueError("p_effective must lie in [0, 1]")
    if not 0.0 <= block_nocross_prob <= 1.0:
        raise ValueError("block_nocross_prob must lie in [0, 1]")
    if qubits_in_use < 0:
        raise ValueError("qubits_in_use must be nonnegative")
    keep = (1.0 - p_effective) ** qubits_in_use * (1.0 - block_nocross_prob)
    return 1.0 - keep
