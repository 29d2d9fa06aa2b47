import csv
import io
import json
import math

import numpy as np
import pytest

from loewner import (
    DescriptorSystem,
    FrequencyResponseDataset,
    build_pencil,
    conjugate_close,
    error_sweep,
    generate_modal_system,
    log_grid,
    partition,
    reduce,
    relative_error,
    response_table,
    sample_frequency_response,
    singular_value_table,
    svd_pencil,
)
from loewner.analysis import sweep_table
from loewner.errors import DimensionMismatch, PoleHit, ROutOfRange, ValidationError

from conftest import random_stable_siso


def scaled(sys, c):
    return DescriptorSystem(sys.E, sys.A, sys.B, c * sys.C, c * sys.D)


@pytest.fixture
def order20():
    sys = random_stable_siso(20, seed=3)
    ds = sample_frequency_response(sys, log_grid(0.1, 100, 50))
    P = build_pencil(conjugate_close(partition(ds)), True)
    return sys, ds, P, svd_pencil(P)


def test_exact_model_zero_error(order20):
    sys, ds, P, svd = order20
    rep = relative_error(ds, reduce(P, svd, 20))
    assert rep.epsilon <= 1e-8
    assert rep.r == 20
    assert len(rep.per_frequency) == len(ds)
    assert rep.notes["unstable_poles"] == 0


def test_source_system_error_is_zero(first_order):
    ds = sample_frequency_response(first_order, log_grid(0.1, 10, 20))
    rep = relative_error(ds, first_order)
    assert rep.epsilon == 0.0
    assert rep.worst == 0.0


def test_zero_model_error_is_one(first_order):
    ds = sample_frequency_response(first_order, log_grid(0.1, 10, 20))
    rep = relative_error(ds, scaled(first_order, 0.0))
    assert rep.epsilon == pytest.approx(1.0, rel=1e-15)
    assert all(e == pytest.approx(1.0) for _, e in rep.per_frequency)


def test_doubled_model_error_is_one(first_order):
    ds = sample_frequency_response(first_order, log_grid(0.1, 10, 20))
    assert relative_error(ds, scaled(first_order, 2.0)).epsilon == pytest.approx(1.0, rel=1e-15)


def test_scale_consistency():
    sys = generate_modal_system(4, m=2, p=2, seed=1)
    other = generate_modal_system(4, m=2, p=2, seed=2)
    ds = sample_frequency_response(sys, log_grid(0.1, 100, 30))
    e1 = relative_error(ds, other).epsilon
    ds3 = FrequencyResponseDataset.from_arrays(ds.s, 4.0 * ds.H)
    e2 = relative_error(ds3, scaled(other, 4.0)).epsilon
    assert e1 == pytest.approx(e2, rel=1e-14)


def test_per_frequency_uses_matrix_two_norm():
    sys = generate_modal_system(3, m=2, p=2, seed=1)
    ds = sample_frequency_response(sys, [1.0])
    rep = relative_error(ds, scaled(sys, 1.5))
    # ||0.5 H|| / ||H|| in any norm
    assert rep.per_frequency[0] == (1.0, pytest.approx(0.5, rel=1e-14))


def test_dimension_mismatch(first_order):
    ds = sample_frequency_response(generate_modal_system(2, m=2, p=2), [1.0])
    with pytest.raises(DimensionMismatch):
        relative_error(ds, first_order)


def test_pole_hit(first_order):
    ds = FrequencyResponseDataset.from_arrays([-1.0 + 0j, 1j], [1.0, 1.0])
    with pytest.raises(PoleHit):
        relative_error(ds, first_order)


def test_report_json(first_order):
    ds = sample_frequency_response(first_order, [0.0, 1.0])
    doc = json.loads(relative_error(ds, scaled(first_order, 2.0)).to_json())
    assert doc["epsilon"] == pytest.approx(1.0)
    assert [p["omega"] for p in doc["per_frequency"]] == [0.0, 1.0]


# -- sweep -----------------------------------------------------------------------------

def test_sweep_error_drops(order20):
    sys, ds, P, svd = order20
    entries = error_sweep(P, svd, ds, [20, 5, 10])
    assert [e.r for e in entries] == [5, 10, 20]
    assert all(e.ok for e in entries)
    eps = {e.r: e.epsilon for e in entries}
    assert eps[20] < eps[5]


def test_sweep_singleton_matches_relative_error(order20):
    sys, ds, P, svd = order20
    (entry,) = error_sweep(P, svd, ds, [12])
    assert entry.epsilon == relative_error(ds, reduce(P, svd, 12)).epsilon


def test_sweep_records_failures():
    ds = FrequencyResponseDataset.from_arrays(1j * np.arange(1, 9), np.full(8, 2.0))
    P = build_pencil(partition(ds))
    entries = error_sweep(P, svd_pencil(P), ds, [1, 2])
    assert [e.status for e in entries] == ["skipped: SingularEt"] * 2
    assert all(math.isnan(e.epsilon) for e in entries)


def test_sweep_validates_orders(order20):
    sys, ds, P, svd = order20
    with pytest.raises(ValidationError):
        error_sweep(P, svd, ds, [])
    with pytest.raises(ROutOfRange):
        error_sweep(P, svd, ds, [10, 10_000])


def test_sweep_bitwise_reproducible(order20):
    sys, ds, P, svd = order20
    a = sweep_table(error_sweep(P, svd, ds, range(2, 41, 2))).to_csv()
    b = sweep_table(error_sweep(P, svd, ds, range(2, 41, 2))).to_csv()
    assert a == b


# -- tables --------------------------------------------------------------------------------

def test_response_table_exact(first_order):
    ds = sample_frequency_response(first_order, log_grid(0.1, 10, 15))
    P = build_pencil(conjugate_close(partition(ds)), True)
    model = reduce(P, svd_pencil(P), 1)
    t = response_table(ds, model)
    assert t.header == ("omega", "|H|", "|G|", "argH", "argG")
    rows = np.array(t.rows)
    np.testing.assert_allclose(rows[:, 1], rows[:, 2], rtol=1e-8)
    assert np.all((rows[:, 3] > -np.pi) & (rows[:, 3] <= np.pi))


def test_response_table_empty(first_order):
    ds = sample_frequency_response(first_order, [])
    assert response_table(ds, first_order).to_csv() == "omega,|H|,|G|,argH,argG\n"


def test_response_table_mimo_blocks():
    sys = generate_modal_system(3, m=3, p=3, seed=0)
    ds = sample_frequency_response(sys, [0.5, 1.0])
    t = response_table(ds, sys)
    assert t.header[:3] == ("omega", "out", "in")
    assert len(t.rows) == 2 * 9
    assert [(r[1], r[2]) for r in t.rows[:9]] == [(q, k) for q in range(3) for k in range(3)]


def test_phase_minus_pi_mapped_to_pi():
    sys = DescriptorSystem([[1.0]], [[-1.0]], [[1.0]], [[-1.0]])
    ds = sample_frequency_response(sys, [0.0])
    (row,) = response_table(ds, sys).rows
    assert row[3] == math.pi


def test_singular_value_csv(order20):
    *_, svd = order20
    text = singular_value_table(svd).to_csv()
    rows = list(csv.reader(io.StringIO(text)))
    assert rows[0] == ["k", "sigma"]
    assert rows[1][0] == "1"
    assert float(rows[1][1]) == svd.sigma[0]
    assert len(rows) == svd.sigma.size + 1
