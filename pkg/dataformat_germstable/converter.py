import json
import logging
import os
from importlib import resources

import jsonschema
import numpy as np
from nexusformat.nexus import NXcollection, NXdata, NXentry, NXfield

import dataformat_germstable.datatype as dt

logger = logging.getLogger(__name__)

SCHEMA_NAME = "report_schema.json"


def load_schema():
    text = resources.files("dataformat_germstable").joinpath(SCHEMA_NAME).read_text(encoding="utf-8")
    return json.loads(text)


class Converter:
    """Writes analysis reports as JSON, CSV plot data and NeXus, and reads JSON reports back."""

    def __init__(self, report: dt.AnalysisReport | None = None) -> None:
        self.report = report
        self._schema = None

    @property
    def schema(self):
        if self._schema is None:
            self._schema = load_schema()
        return self._schema

    def to_json_text(self) -> str:
        return json.dumps(self.report.to_dict(), indent=2) + "\n"

    def validate(self, payload=None) -> None:
        payload = self.report.to_dict() if payload is None else payload
        jsonschema.validate(instance=payload, schema=self.schema)

    def write_json(self, filepath: str) -> None:
        self.validate()
        with open(filepath, "w", encoding="utf-8") as handle:
            handle.write(self.to_json_text())
        logger.info("report written to %s", filepath)

    @classmethod
    def read_json(cls, filepath: str) -> "Converter":
        with open(filepath, "r", encoding="utf-8") as handle:
            payload = json.load(handle)
        return cls.from_payload(payload)

    @classmethod
    def from_payload(cls, payload: dict) -> "Converter":
        version = payload.get("report_version")
        report_type = dt.report_version.get(version)
        if report_type is None:
            raise ValueError(f"Not supported report version {version}!")
        converter = cls(report_type.from_dict(payload))
        converter.validate(payload)
        return converter

    @staticmethod
    def write_orbit_csv(header, rows, filepath: str) -> None:
        """One row per iterate, columns in the order given by the header."""
        table = np.asarray(rows, dtype=float).reshape(len(rows), len(header))
        np.savetxt(filepath, table, delimiter=",", header=",".join(header), comments="", fmt="%.17g")

    def write_plot_data(self, folder: str) -> list:
        """Region boundaries of every stable set as CSV (re, im) polygons, returns the written paths."""
        os.makedirs(folder, exist_ok=True)
        written = []
        for i, stable_set in enumerate(self.report.stable_sets):
            if not stable_set.boundary:
                continue
            points = np.asarray(stable_set.boundary, dtype=np.complex128)
            table = np.stack([points.real, points.imag], axis=1)
            filepath = os.path.join(folder, f"region_{i}_{stable_set.type}.csv")
            np.savetxt(filepath, table, delimiter=",", header="re_x,im_x", comments="", fmt="%.17g")
            written.append(filepath)
        capture = [
            [c.orbit, int(c.assigned), -1 if c.set_index is None else c.set_index,
             -1 if c.entry_index is None else c.entry_index]
            for c in self.report.capture
        ]
        if capture:
            filepath = os.path.join(folder, "capture.csv")
            np.savetxt(
                filepath, np.asarray(capture, dtype=np.int64), delimiter=",",
                header="orbit,assigned,set_index,entry_index", comments="", fmt="%d",
            )
            written.append(filepath)
        return written

    def convert_to_nexus(self, nexus_filename: str, name: str = "entry") -> None:
        report = self.report
        metadata_dict = {"report_version": report.report_version, "iterate": report.iterate}
        if report.classification is not None:
            metadata_dict["classification"] = report.classification.label
        if report.reduced is not None:
            metadata_dict.update(
                {"k": report.reduced.k, "p": report.reduced.p,
                 "mu_re": report.reduced.mu.real, "mu_im": report.reduced.mu.imag}
            )
        metadata_dict["report_json"] = json.dumps(report.to_dict())
        metadata = NXcollection(entries=metadata_dict)

        entry_items = {"metadata": metadata}
        if report.directions:
            xi = np.asarray([d.xi for d in report.directions], dtype=np.complex128)
            kinds = np.asarray([1 if d.kind == "Node" else 0 for d in report.directions])
            entry_items["directions"] = NXdata(
                NXfield(kinds, name="node"),
                [NXfield(xi.real, name="xi_re")],
                xi_im=NXfield(xi.imag, name="xi_im"),
            )
        for i, stable_set in enumerate(report.stable_sets):
            if not stable_set.boundary:
                continue
            points = np.asarray(stable_set.boundary, dtype=np.complex128)
            entry_items[f"region{i}"] = NXdata(
                NXfield(points.imag, name="im_x"), [NXfield(points.real, name="re_x")]
            )
        entry = NXentry(name=name, **entry_items)
        entry.save(nexus_filename, mode="w")
        logger.info("NeXus report written to %s", nexus_filename)
