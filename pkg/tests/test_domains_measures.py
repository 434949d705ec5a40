import numpy as np
import pytest

from volgron.domains import (
    Interval1D,
    OutsideDomainError,
    ProductBox,
    QuadratureGrid,
    VoidSet,
    contains,
    leq,
    lower_set,
)
from volgron.measures import DiscreteMeasure, Lebesgue, ProductMeasure


def test_interval_must_be_nondegenerate():
    with pytest.raises(ValueError):
        Interval1D(1.0, 1.0)
    with pytest.raises(ValueError):
        Interval1D(2.0, 1.0)


def test_lower_set_interval():
    dom = Interval1D(0.0, 2.0)
    region = lower_set(dom, 1.0)
    assert region == Interval1D(0.0, 1.0)


def test_lower_set_box_componentwise():
    box = ProductBox((Interval1D(0, 1), Interval1D(0, 1)))
    region = lower_set(box, (0.5, 0.8))
    assert region.factors[0] == Interval1D(0.0, 0.5)
    assert region.factors[1] == Interval1D(0.0, 0.8)


def test_lower_set_void_is_whole_set():
    dom = VoidSet("fredholm")
    assert lower_set(dom, 123.0) is dom


def test_lower_set_rejects_outside_points():
    with pytest.raises(OutsideDomainError):
        lower_set(Interval1D(0.0, 1.0), 2.0)
    with pytest.raises(OutsideDomainError):
        lower_set(ProductBox((Interval1D(0, 1),)), (1.5,))


def test_preorders():
    assert leq(Interval1D(0, 1), 0.2, 0.7)
    assert not leq(Interval1D(0, 1), 0.7, 0.2)
    box = ProductBox((Interval1D(0, 1), Interval1D(0, 1)))
    assert leq(box, (0.1, 0.2), (0.5, 0.2))
    assert not leq(box, (0.1, 0.5), (0.5, 0.2))
    assert leq(VoidSet(), 7.0, -3.0)


def test_grid_nodes_increasing_and_refine_keeps_nodes():
    grid = QuadratureGrid.for_interval(Interval1D(0, 1), 3)
    assert grid.nodes.size == 9
    assert np.all(np.diff(grid.nodes) > 0)
    fine = grid.refine()
    assert fine.nodes.size == 17
    np.testing.assert_allclose(fine.nodes[::2], grid.nodes)


def test_discrete_measure_validation():
    with pytest.raises(ValueError):
        DiscreteMeasure(())
    with pytest.raises(ValueError):
        DiscreteMeasure(((0.0, -1.0),))
    mu = DiscreteMeasure(((0.0, 0.25), (1.0, 0.75)))
    assert mu.total_mass == pytest.approx(1.0)


def test_product_measure_shapes():
    pm = ProductMeasure((Lebesgue(), Lebesgue()))
    assert len(pm.factors) == 2
    with pytest.raises(ValueError):
        ProductMeasure(())
