import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from roughness.core import (FEATURES, Dataset, PredictionRecord, PrintSample, Provenance,
                            check_vector, encode)
from roughness.errors import SchemaError


def table2_sample1(**overrides):
    fields = dict(layer_height=0.15, printing_speed=60, printing_temperature=200,
                  wall_thickness=2, infill_density=20, nozzle_diameter=0.4, shape=0)
    fields.update(overrides)
    return PrintSample(**fields)


def test_encode_first_plan_row():
    assert encode(table2_sample1()).tolist() == [0.15, 60, 200, 2, 20, 0.4, 0]


def test_encode_is_deterministic():
    assert np.array_equal(encode(table2_sample1()), encode(table2_sample1()))


def test_encode_shape_code_is_last_component():
    assert encode(table2_sample1(shape=3))[-1] == 3


def test_encode_missing_field_names_it():
    s = table2_sample1()
    object.__setattr__(s, "wall_thickness", None)
    with pytest.raises(SchemaError, match="wall_thickness"):
        encode(s)


@pytest.mark.parametrize("field,value", [
    ("layer_height", 0), ("printing_speed", -1), ("wall_thickness", 0),
    ("nozzle_diameter", -0.4), ("infill_density", 101), ("infill_density", -1),
    ("ra", 0), ("ra", -2.0), ("shape", 1.5), ("layer_height", float("nan")),
])
def test_invariants_rejected(field, value):
    with pytest.raises(SchemaError, match=field):
        table2_sample1(**{field: value})


positive = st.floats(0.01, 1000, allow_nan=False)


@given(a=st.tuples(positive, positive, st.floats(-50, 400), positive, st.floats(0, 100),
                   positive, st.integers(0, 9)),
       b=st.tuples(positive, positive, st.floats(-50, 400), positive, st.floats(0, 100),
                   positive, st.integers(0, 9)))
def test_encode_injective(a, b):
    sa, sb = PrintSample(*a), PrintSample(*b)
    assert (sa == sb) == np.array_equal(encode(sa), encode(sb))


def test_dataset_rejects_mixed_target_presence():
    with pytest.raises(SchemaError):
        Dataset.from_samples([table2_sample1(ra=1.0), table2_sample1()], "literature")


def test_dataset_order_is_stable():
    samples = [table2_sample1(ra=float(i + 1)) for i in range(5)]
    ds = Dataset.from_samples(samples, Provenance.EXPERIMENTAL, "lab")
    assert ds.target().tolist() == [1, 2, 3, 4, 5]
    assert ds.subset([3, 1]).target().tolist() == [4, 2]
    assert ds.features().shape == (5, len(FEATURES))


def test_check_vector_arity():
    with pytest.raises(SchemaError):
        check_vector([1, 2, 3])
    with pytest.raises(SchemaError):
        check_vector([1, 2, 3, 4, 5, 6, np.inf])


def test_prediction_record_invariants():
    with pytest.raises(SchemaError):
        PredictionRecord(0.0, 1.0, 0)
    with pytest.raises(SchemaError):
        PredictionRecord(1.0, float("nan"), 0)
    assert PredictionRecord(2.0, 3.5, 0).abs_error == 1.5
