from datetime import date

import numpy as np
import pytest

from substrace.attributes import (
    ATTRIBUTE_REGISTRY,
    DEFAULT_ATTRIBUTES,
    attribute_matrix,
    attribute_vectors,
    register_attribute,
)
from substrace.core import TimeWindow
from substrace.errors import NoAttributes, UnknownAttribute

from conftest import dataset_from_events
from test_mechanisms import migration_fixture

WINDOW = TimeWindow(date(2022, 1, 1), date(2022, 1, 15))


@pytest.fixture(scope="module")
def ds():
    events, _ = migration_fixture()
    return dataset_from_events(events)


class TestRegistry:
    def test_twelve_default_attributes(self):
        assert len(DEFAULT_ATTRIBUTES) == 12
        assert set(DEFAULT_ATTRIBUTES) == set(ATTRIBUTE_REGISTRY) | set()

    def test_matrix_shape_and_range(self, ds):
        pids = ds.project_ids
        m = attribute_matrix(ds, WINDOW, DEFAULT_ATTRIBUTES, pids)
        assert m.shape == (len(pids), 12)
        assert np.all(m >= 0.0) and np.all(m <= 1.0)

    def test_each_column_spans_unit_interval_or_half(self, ds):
        pids = ds.project_ids
        m = attribute_matrix(ds, WINDOW, DEFAULT_ATTRIBUTES, pids)
        for col in range(m.shape[1]):
            values = m[:, col]
            if np.ptp(values) > 0:
                assert values.min() == 0.0 and values.max() == 1.0
            else:
                assert np.all(values == 0.5)  # constant column convention

    def test_unknown_attribute_rejected(self, ds):
        with pytest.raises(UnknownAttribute):
            attribute_matrix(ds, WINDOW, ["not_real"], ds.project_ids)

    def test_empty_selection_rejected(self, ds):
        with pytest.raises(NoAttributes):
            attribute_matrix(ds, WINDOW, [], ds.project_ids)

    def test_vectors_carry_names(self, ds):
        vecs = attribute_vectors(ds, WINDOW, ["popularity_mean", "sentiment_mean"],
                                 ds.project_ids)
        assert all(v.attribute_names == ("popularity_mean", "sentiment_mean")
                   for v in vecs)
        assert [v.project for v in vecs] == ds.project_ids

    def test_registry_extensible(self, ds):
        register_attribute("answer", lambda ctx: np.full(len(ctx.idx), 42.0))
        try:
            m = attribute_matrix(ds, WINDOW, ["answer"], ds.project_ids)
            assert np.all(m == 0.5)  # constant column
        finally:
            del ATTRIBUTE_REGISTRY["answer"]

    def test_days_since_launch_ordering(self, ds):
        # later launches have smaller values after normalization flips nothing
        m = attribute_matrix(ds, WINDOW, ["days_since_launch"], ds.project_ids)
        raw = [(WINDOW.end - p.launch_date).days + 1 for p in ds.projects]
        order = np.argsort(raw)
        normalized = m[:, 0]
        assert np.all(np.diff(normalized[order]) >= -1e-12)
