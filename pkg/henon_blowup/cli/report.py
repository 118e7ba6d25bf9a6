"""
Report aggregator: collects the JSON results of a run directory into one
reproduction report.
"""
import os
import glob
import json
import logging

import numpy as np

from henon_blowup.config import DEFAULTS
from henon_blowup.spectral import OperatorKind, limit_ladder
from henon_blowup.utils.errors import SchemaMismatch
from henon_blowup.utils.output import SCHEMA_VERSION, load_output

# Configure logging
logger = logging.getLogger(__name__)

REPORT_INPUTS = ("spectrum", "ggmt", "scan", "evolve", "profile")


class ReportAggregator:
    """
    Aggregator that synthesizes the per-command results of a directory.
    """

    def __init__(self, results_dir):
        """
        Initialize the aggregator.
        
        Args:
            results_dir: Directory holding JSON results of earlier commands
        """
        self.results_dir = results_dir

    def _documents(self):
        paths = sorted(glob.glob(os.path.join(self.results_dir, "*.json")))
        documents = []
        for path in paths:
            try:
                with open(path) as f:
                    raw = json.load(f)
            except Exception as e:
                raise SchemaMismatch(f"Unreadable JSON {path}: {str(e)}")
            if not isinstance(raw, dict) or raw.get("schema") != SCHEMA_VERSION:
                raise SchemaMismatch(f"{path} is not a schema {SCHEMA_VERSION} result file")
            schema_id = raw.get("schema_id")
            if schema_id in REPORT_INPUTS:
                documents.append((os.path.basename(path), load_output(path, schema_id)))
        if not documents:
            raise SchemaMismatch(f"no result files found in {self.results_dir}")
        logger.info(f"Aggregating {len(documents)} result files from {self.results_dir}")
        return documents

    def run(self):
        """
        Build the report.
        
        Returns:
            dict: limit_spectra, spectra, ggmt, crossings, stability, anchors
        """
        limit_spectra, spectra, ggmt_rows, crossings, stability = [], [], [], [], []
        for name, doc in self._documents():
            schema_id = doc["schema_id"]
            if schema_id == "spectrum":
                row = {
                    "source": name,
                    "kind": doc["kind"],
                    "ell": doc["ell"],
                    "c": doc.get("c"),
                    "eigenvalues": doc["eigenvalues"],
                    "errors": doc["errors"],
                }
                if doc["kind"] in (OperatorKind.Q_ELL_LIMIT.value, OperatorKind.Q_SUSY_LIMIT.value):
                    limit_spectra.append(row)
                else:
                    row["unstable_count"] = doc.get("unstable_count")
                    spectra.append(row)
            elif schema_id == "ggmt":
                ggmt_rows.append({key: doc[key] for key in ("c", "delta", "kappa", "convention", "G", "quad_error")})
            elif schema_id == "scan":
                crossings.append({key: doc[key] for key in ("ell", "c_lo", "c_hi", "status", "c_star", "counts")})
            elif schema_id == "evolve":
                entry = {"source": name, "mode": doc["mode"], "verdict": doc["verdict"]}
                for key in ("T", "T_est", "growth_rate", "decay_orders", "ell", "perturb"):
                    if key in doc:
                        entry[key] = doc[key]
                stability.append(entry)

        limit_spectra.sort(key=lambda row: (row["kind"], row["ell"], row["source"]))
        spectra.sort(key=lambda row: (row["ell"], row["c"] if row["c"] is not None else -1.0, row["source"]))
        ggmt_rows.sort(key=lambda row: (row["c"], row["delta"], row["kappa"], row["convention"]))
        crossings.sort(key=lambda row: (row["ell"], row["c_lo"], row["c_hi"]))
        stability.sort(key=lambda row: (row["mode"], row["source"]))
        return {
            "limit_spectra": limit_spectra,
            "anchors": self._anchors(limit_spectra),
            "spectra": spectra,
            "ggmt": ggmt_rows,
            "crossings": crossings,
            "stability": stability,
        }

    def _anchors(self, limit_spectra):
        """Non-positive c = 0 eigenvalues of each ℓ sector against the exact ladder."""
        anchors = []
        for row in limit_spectra:
            if row["kind"] != OperatorKind.Q_ELL_LIMIT.value:
                continue
            for n, value in enumerate(row["eigenvalues"]):
                exact = limit_ladder(row["ell"], n)
                if exact <= DEFAULTS["marginal_tol"]:
                    anchors.append({"ell": row["ell"], "n": n, "lambda_B": value, "exact": exact})
        return anchors

    @staticmethod
    def to_markdown(report):
        """Render the report as Markdown tables."""
        def fmt(value):
            if value is None:
                return "-"
            if isinstance(value, float):
                return "nan" if np.isnan(value) else f"{value:.10g}"
            if isinstance(value, list):
                return ", ".join(fmt(v) for v in value)
            return str(value)

        def table(title, rows, columns):
            lines = [f"## {title}", ""]
            if not rows:
                return lines + ["(none)", ""]
            lines.append("| " + " | ".join(columns) + " |")
            lines.append("|" + "---|" * len(columns))
            for row in rows:
                lines.append("| " + " | ".join(fmt(row.get(col)) for col in columns) + " |")
            return lines + [""]

        lines = ["# Reproduction report", ""]
        lines += table("Limiting spectra (c = 0)", report["limit_spectra"], ["kind", "ell", "eigenvalues"])
        lines += table("Unstable c = 0 anchors", report["anchors"], ["ell", "n", "lambda_B", "exact"])
        lines += table("Spectra", report["spectra"], ["kind", "ell", "c", "eigenvalues", "unstable_count"])
        lines += table("GGMT bound", report["ggmt"], ["c", "delta", "kappa", "convention", "G", "quad_error"])
        lines += table("Crossings", report["crossings"], ["ell", "c_lo", "c_hi", "status", "c_star", "counts"])
        lines += table("Stability", report["stability"], ["mode", "verdict", "T", "T_est", "growth_rate", "decay_orders"])
        return "\n".join(lines)
