import hashlib

import pytest

from roughness.core import Provenance
from roughness.errors import EmptyDatasetError, IngestIOError, SchemaError
from roughness.ingest import (EXPERIMENTAL_RA, HEADER, bundled_experimental_path,
                              build_experimental_dataset, load_csv, read_csv_text, summarize,
                              to_csv_text)

EXPERIMENTAL_SHA256 = "9c615d7f19cd5ef6f69a4b39472fb42224c62e4334b6c438c4566e16657072cc"
HEAD = ",".join(HEADER)


def test_bundled_csv_checksum():
    data = bundled_experimental_path().read_bytes()
    assert hashlib.sha256(data).hexdigest() == EXPERIMENTAL_SHA256


def test_bundled_csv_matches_embedded_tables():
    ds, report = load_csv(bundled_experimental_path(), Provenance.EXPERIMENTAL)
    assert report.accepted_rows == 128 and report.ok
    assert ds == build_experimental_dataset()


def test_experimental_first_sample_readings():
    ds = build_experimental_dataset()
    assert ds.target()[:8].tolist() == [8.64, 9.39, 9.22, 9.84, 9.70, 8.53, 8.84, 9.28]
    assert round(float(ds.target()[:8].mean()), 2) == 9.18


def test_experimental_extremes():
    y = build_experimental_dataset().target()
    assert len(y) == 128
    assert y.max() == 27.02 and int(y.argmax()) == 13 * 8 + 1  # sample 14, position 2
    assert y.min() == 8.53


def test_experimental_fixed_factors():
    s = summarize(build_experimental_dataset())
    for name, value in [("infill_density", 20), ("nozzle_diameter", 0.4), ("shape", 0)]:
        assert s.features[name].minimum == s.features[name].maximum == value
    assert s.ra_range == (8.53, 27.02)


def test_load_is_idempotent():
    a, _ = load_csv(bundled_experimental_path(), "experimental")
    b, _ = load_csv(bundled_experimental_path(), "experimental")
    assert a == b


def test_rows_without_ra_give_empty_dataset_error():
    text = HEAD + "\n" + "\n".join("0.2,50,210,1.2,20,0.4,0,,src" for _ in range(100))
    with pytest.raises(EmptyDatasetError) as info:
        read_csv_text(text, "literature")
    report = info.value.report
    assert report.accepted_rows == 0 and len(report.rejected_rows) == 100
    assert report.reason_counts() == {"missing_ra": 100}


def test_rejections_carry_reasons_and_partition():
    text = "\n".join([
        HEAD,
        "0.2,50,210,1.2,20,0.4,0,10.5,a",
        "-0.2,50,210,1.2,20,0.4,0,10.5,b",
        "0.2,,210,1.2,20,0.4,0,10.5,c",
        "0.2,fast,210,1.2,20,0.4,0,10.5,d",
        "0.2,50,210,1.2,20,0.4,0,,e",
        "0.2,50,210,1.2,120,0.4,0,9,f",
    ])
    ds, report = read_csv_text(text, "literature")
    assert len(ds) == 1
    assert [(r.row, r.reason) for r in report.rejected_rows] == [
        (3, "invalid_value"), (4, "missing_field"), (5, "non_numeric"),
        (6, "missing_ra"), (7, "invalid_value")]
    assert report.accepted_rows + len(report.rejected_rows) == report.total_rows == 6
    assert "layer_height" in report.rejected_rows[0].detail


def test_unknown_column_is_schema_error():
    text = HEAD.replace("printing_speed_mm_s", "printing_speed_mm_min") + "\n"
    with pytest.raises(SchemaError, match="printing_speed_mm_min"):
        read_csv_text(text, "literature")


def test_missing_column_is_schema_error():
    header = ",".join(h for h in HEADER if h != "shape")
    with pytest.raises(SchemaError, match="shape"):
        read_csv_text(header + "\n", "literature")


def test_decimal_comma_accepted():
    semi = ";".join(HEADER) + "\n0,2;50;210;1,2;20;0,4;0;10,5;x\n"
    ds, _ = read_csv_text(semi, "literature")
    quoted = HEAD + '\n"0,2",50,210,"1,2",20,"0,4",0,"10,5",x\n'
    ds2, _ = read_csv_text(quoted, "literature")
    assert ds.features().tolist() == ds2.features().tolist() == [[0.2, 50, 210, 1.2, 20, 0.4, 0]]
    assert ds.target().tolist() == [10.5]


def test_prediction_inputs_without_ra_column():
    header = ",".join(h for h in HEADER if h != "ra_um")
    ds, _ = read_csv_text(header + "\n0.2,50,210,1.2,20,0.4,0,x\n", "literature", require_ra=False)
    assert not ds.has_target


def test_missing_file_is_io_error(tmp_path):
    with pytest.raises(IngestIOError):
        load_csv(tmp_path / "nope.csv")


def test_roundtrip_through_csv_text():
    ds = build_experimental_dataset()
    again, _ = read_csv_text(to_csv_text(ds), "experimental")
    assert again == ds


def test_summary_singleton():
    ds = build_experimental_dataset().subset([0])
    s = summarize(ds)
    for f in s.features.values():
        assert f.minimum == f.maximum == f.mean
    assert s.ra.minimum == s.ra.maximum == s.ra.mean == 8.64


def test_summary_empty():
    with pytest.raises(EmptyDatasetError):
        summarize(build_experimental_dataset().subset([]))


def test_embedded_table_shape():
    assert len(EXPERIMENTAL_RA) == 16 and all(len(r) == 8 for r in EXPERIMENTAL_RA)
