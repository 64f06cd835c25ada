"""Resource accounting: fusion success probabilities, state counts and
the unheralded loss budget."""

import numpy as np
import pytest

from percrenorm.lattice import LatticeKind, build_block
from percrenorm.percolation import Configuration, Model, close_lost_sites
from percrenorm.resources import (
    BUDGET_QUBIT_BOUND,
    LossSpec,
    ResourceSpec,
    apply_heralded_loss,
    diamond_bond_count,
    loss_budget,
    mixed_params_from_gates,
    resource_count,
    site_success_prob_5star,
)
from percrenorm.rng import RngSpec


def test_5star_site_success_exact_value():
    assert site_success_prob_5star(0.5) == 0.75
    assert site_success_prob_5star(0.0) == 0.0
    assert site_success_prob_5star(1.0) == 1.0
    with pytest.raises(ValueError):
        site_success_prob_5star(1.5)


def test_5star_site_success_against_coin_simulation():
    # the site stays usable unless both central fusions fail
    rng = np.random.default_rng(0)
    n = 20000
    pf = 0.5
    ok = (rng.random(n) < pf) | (rng.random(n) < pf)
    freq = ok.mean()
    sigma = np.sqrt(0.75 * 0.25 / n)
    assert abs(freq - site_success_prob_5star(pf)) < 3 * sigma


def test_resource_spec_validation():
    ResourceSpec(LatticeKind.CUBIC, 7)
    with pytest.raises(ValueError):
        ResourceSpec(LatticeKind.CUBIC, 3)
    with pytest.raises(ValueError):
        ResourceSpec(LatticeKind.CUBIC, 7, p_fusion=1.5)


def test_loss_spec_validation():
    spec = LossSpec(0.1)
    assert spec.p_loss_effective == 1e-5
    assert spec.branching == (6, 7, 7, 1)
    with pytest.raises(ValueError):
        LossSpec(-0.1)
    with pytest.raises(ValueError):
        LossSpec(0.1, p_loss_effective=2.0)


@pytest.mark.parametrize(
    "kind,size,pf,want_site,want_bond",
    [
        (LatticeKind.CUBIC, 7, 0.5, 1.0, 0.5),
        (LatticeKind.CUBIC, 5, 0.5, 0.75, 0.5),
        (LatticeKind.DIAMOND, 5, 0.5, 0.75, 0.5),
        (LatticeKind.DIAMOND, 5, 0.8, 0.96, 0.8),
        (LatticeKind.COVERING_CUBIC, 6, 0.5, 0.5, 1.0),
        (LatticeKind.PYROCHLORE, 4, 0.5, 0.5, 1.0),
    ],
)
def test_gate_mapping_table(kind, size, pf, want_site, want_bond):
    params = mixed_params_from_gates(ResourceSpec(kind, size, pf))
    assert params.model is Model.MIXED
    assert params.p_site == pytest.approx(want_site)
    assert params.p_bond == pytest.approx(want_bond)


@pytest.mark.parametrize(
    "kind,size",
    [
        (LatticeKind.CUBIC, 4),
        (LatticeKind.CUBIC, 6),
        (LatticeKind.DIAMOND, 7),
        (LatticeKind.PYROCHLORE, 7),
        (LatticeKind.COVERING_CUBIC, 5),
    ],
)
def test_gate_mapping_rejects_unknown_combinations(kind, size):
    with pytest.raises(ValueError):
        mixed_params_from_gates(ResourceSpec(kind, size))


def test_gate_mapping_against_two_coin_simulation():
    # diamond 5-qubit stars: per-site coin pair, per-bond single coin
    pf = 0.5
    params = mixed_params_from_gates(ResourceSpec(LatticeKind.DIAMOND, 5, pf))
    rng = np.random.default_rng(1)
    n = 20000
    sites = (rng.random(n) < pf) | (rng.random(n) < pf)
    bonds = rng.random(n) < pf
    for freq, p in ((sites.mean(), params.p_site), (bonds.mean(), params.p_bond)):
        assert abs(freq - p) < 3 * np.sqrt(p * (1 - p) / n)


@pytest.mark.parametrize("extent", [(1, 1, 1), (2, 2, 2), (2, 3, 4), (4, 4, 2)])
def test_diamond_bond_count_matches_builder(extent):
    assert diamond_bond_count(*extent) == build_block(
        LatticeKind.DIAMOND, extent
    ).n_edges


def test_resource_count_cubic():
    assert resource_count(LatticeKind.CUBIC, 1, 1) == (8, 56)
    n, q = resource_count(LatticeKind.CUBIC, 3, 2)
    assert n == (2 * 2 * 3) ** 2 * (2 * 2)
    assert q == 7 * n
    # doubling k multiplies the region volume by eight
    n2, _ = resource_count(LatticeKind.CUBIC, 3, 4)
    assert n2 == 8 * n


def test_resource_count_covering_cubic():
    n, q = resource_count(LatticeKind.COVERING_CUBIC, 1, 1)
    assert (n, q) == (8, 48)


@pytest.mark.parametrize("kind", [LatticeKind.DIAMOND, LatticeKind.PYROCHLORE])
def test_resource_count_diamond_family(kind):
    n, q = resource_count(kind, 2, 3)
    assert n == diamond_bond_count(6, 6, 3)
    assert q == 4 * n


def test_resource_count_validation():
    with pytest.raises(ValueError):
        resource_count(LatticeKind.CUBIC, 0, 1)


def test_apply_heralded_loss_wraps_site_closure():
    g = build_block(LatticeKind.CUBIC, 3)
    cfg = Configuration(g, np.ones(g.n_vertices, bool), np.ones(g.n_edges, bool))
    spec = RngSpec(5, 1)
    out = apply_heralded_loss(cfg, 0.2, spec)
    want, _ = close_lost_sites(cfg, 0.2, spec)
    np.testing.assert_array_equal(out.open_sites, want.open_sites)
    np.testing.assert_array_equal(out.open_bonds, want.open_bonds)
    same = apply_heralded_loss(cfg, 0.0, spec)
    np.testing.assert_array_equal(same.open_sites, cfg.open_sites)


def test_two_pass_loss_dominates_single_pass():
    # first pass shares the stream with the single pass; the second pass
    # can only close additional sites, so the coupling is pointwise
    g = build_block(LatticeKind.DIAMOND, 2)
    cfg = Configuration(g, np.ones(g.n_vertices, bool), np.ones(g.n_edges, bool))
    x, y = 0.15, 0.08
    single = apply_heralded_loss(cfg, x, RngSpec(9, 0))
    double = apply_heralded_loss(
        apply_heralded_loss(cfg, x, RngSpec(9, 0)), y, RngSpec(9, 1)
    )
    assert (double.open_sites <= single.open_sites).all()


def test_loss_budget_formula_and_bound():
    pe, pb = 1e-5, 4.76e-6
    for n in (1, 10, 299, 300):
        want = 1.0 - (1.0 - pe) ** n * (1.0 - pb)
        assert loss_budget(pe, pb, n) == pytest.approx(want, rel=1e-12)
    assert loss_budget(pe, pb, BUDGET_QUBIT_BOUND) < 3e-3
    assert loss_budget(pe, pb, BUDGET_QUBIT_BOUND + 1) >= 3e-3
    # monotone in every argument
    assert loss_budget(pe, pb, 10) < loss_budget(pe, pb, 11)
    assert loss_budget(pe, pb, 10) < loss_budget(2 * pe, pb, 10)
    assert loss_budget(pe, pb, 0) == pytest.approx(pb)
    with pytest.raises(ValueError):
        loss_budget(-0.1, pb, 10)
    with pytest.raises(ValueError):
        loss_budget(pe, pb, -1)
