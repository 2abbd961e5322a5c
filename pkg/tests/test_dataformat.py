import json

import jsonschema
import numpy as np
import pytest
from nexusformat.nexus import nxload

from dataformat_germstable.converter import Converter, load_schema
from dataformat_germstable.datatype import (
    AnalysisReport,
    CaptureRecord,
    ClassificationRecord,
    DirectionRecord,
    ReducedRecord,
    StableSetRecord,
    decode_complex,
    encode_complex,
)
from germstable.germstable_pipeline import run_pipeline


@pytest.fixture
def report():
    return AnalysisReport(
        settings={"order": 16},
        source="F1 = x - x^3\nF2 = y*(1 - x)\n",
        classification=ClassificationRecord(label="Parabolic", inner_eigenvalue=1, tangent_eigenvalue=1),
        reduced=ReducedRecord(k=1, p=1, mu=1, log_mu=0, a=[-1, 0], A=[-1, -0.5]),
        directions=[
            DirectionRecord(0, 1, "Node", [0.0, -1.0], None),
            DirectionRecord(1, -1, "Saddle", [0.0, 1.0], None),
        ],
        stable_sets=[
            StableSetRecord(
                type="NodeBasin",
                direction=1,
                region={"case": "GENERIC_WEDGE"},
                q=2,
                boundary=[0.1, 0.1 + 0.01j, 0.05 + 0.02j],
            )
        ],
        capture=[CaptureRecord(orbit=0, assigned=True, status="ConvergedToOrigin", set_index=0, entry_index=4)],
        excluded_orbits=[1],
    )


class TestRecords:
    def test_complex_encoding(self):
        assert encode_complex(0.5 - 2j) == [0.5, -2.0]
        assert decode_complex([0.5, -2.0]) == 0.5 - 2j
        assert encode_complex(None) is None

    def test_nested_round_trip(self, report):
        payload = report.to_dict()
        assert payload["reduced"]["mu"] == [1.0, 0.0]
        assert payload["directions"][1]["xi"] == [-1.0, 0.0]
        again = AnalysisReport.from_dict(json.loads(json.dumps(payload)))
        assert again == report

    def test_warn_keeps_reason(self, report):
        report.warn("stable-set 0", KeyError("x"))
        assert report.warnings[-1].reason == "KeyError"


class TestConverter:
    def test_schema_accepts_report(self, report):
        Converter(report).validate()

    def test_schema_rejects_bad_version(self, report):
        payload = report.to_dict()
        payload["report_version"] = 2
        with pytest.raises(jsonschema.ValidationError):
            Converter(report).validate(payload)

    def test_unknown_version(self, report):
        payload = report.to_dict()
        payload["report_version"] = 99
        with pytest.raises(ValueError):
            Converter.from_payload(payload)

    def test_json_file(self, report, tmp_path):
        path = tmp_path / "report.json"
        Converter(report).write_json(str(path))
        assert json.loads(path.read_text())["source"] == report.source
        assert Converter.read_json(str(path)).report == report

    def test_orbit_csv(self, tmp_path):
        path = tmp_path / "orbit_0.csv"
        Converter.write_orbit_csv(["j", "re_x"], [[0, 0.1], [1, 0.05]], str(path))
        lines = path.read_text().splitlines()
        assert lines[0] == "j,re_x"
        table = np.loadtxt(path, delimiter=",", skiprows=1)
        assert np.allclose(table, [[0, 0.1], [1, 0.05]])

    def test_plot_data(self, report, tmp_path):
        written = Converter(report).write_plot_data(str(tmp_path / "plots"))
        assert [p.split("/")[-1] for p in written] == ["region_0_NodeBasin.csv", "capture.csv"]
        region = np.loadtxt(written[0], delimiter=",", skiprows=1)
        assert region.shape == (3, 2)
        assert np.allclose(region[1], [0.1, 0.01])
        capture = np.loadtxt(written[1], delimiter=",", skiprows=1, ndmin=2)
        assert capture.tolist() == [[0, 1, 0, 4]]

    def test_nexus(self, report, tmp_path):
        path = tmp_path / "report.nxs"
        Converter(report).convert_to_nexus(str(path))
        root = nxload(str(path))
        metadata = root["entry/metadata"]
        assert str(metadata["classification"].nxvalue) == "Parabolic"
        assert int(metadata["p"].nxvalue) == 1
        assert np.allclose(root["entry/directions/xi_re"].nxvalue, [1, -1])
        assert np.allclose(root["entry/region0/re_x"].nxvalue, [0.1, 0.1, 0.05])
        restored = Converter.from_payload(json.loads(str(metadata["report_json"].nxvalue)))
        assert restored.report == report


def test_schema_matches_pipeline_output(node_spec):
    payload = run_pipeline(node_spec, until="directions").to_dict()
    jsonschema.validate(instance=json.loads(json.dumps(payload)), schema=load_schema())
