"""
Result files and run manifests.
"""
import os
import sys
import json
import logging
import datetime
from dataclasses import dataclass, field, asdict

import numpy as np
import pandas as pd

from henon_blowup.utils.errors import SchemaMismatch

# Configure logging
logger = logging.getLogger(__name__)

SCHEMA_VERSION = "1"

# Required keys (JSON) or columns (CSV) per schema id
SCHEMAS = {
    "profile": {"format": "json", "fields": ["params", "constants", "residual_max", "samples"]},
    "profile_table": {"format": "csv", "fields": ["r", "phi", "V", "g", "gtilde"]},
    "spectrum": {"format": "json", "fields": ["kind", "ell", "eigenvalues", "errors", "method", "convention", "grid"]},
    "spectrum_table": {"format": "csv", "fields": ["kind", "ell", "c", "index", "lambda_B", "lambda_L", "error", "method"]},
    "ggmt": {"format": "json", "fields": ["c", "delta", "kappa", "G", "quad_error", "convention", "support"]},
    "ggmt_table": {"format": "csv", "fields": ["c", "delta", "kappa", "G", "quad_error", "convention"]},
    "scan": {"format": "json", "fields": ["ell", "c_lo", "c_hi", "status", "c_star", "counts"]},
    "scan_curve": {"format": "csv", "fields": ["c", "lambda_B", "count"]},
    "evolve": {"format": "json", "fields": ["mode", "verdict", "params", "scheme"]},
    "similarity_history": {"format": "csv", "fields": ["tau", "sup_norm", "sigma_norm", "unstable_coef"]},
    "physical_history": {"format": "csv", "fields": ["t", "sup_norm", "sigma_norm", "unstable_coef"]},
    "report": {"format": "json", "fields": ["limit_spectra", "ggmt", "crossings", "stability"]},
    "snapshot": {"format": "csv", "fields": ["r", "value"]},
    "tuning_trials": {"format": "csv", "fields": ["T", "unstable_coef"]},
    "report_markdown": {"format": "text", "fields": []},
    "manifest": {"format": "json", "fields": ["command_line", "parameters", "scheme", "tool_version", "outputs", "exit_code"]},
}


def _to_builtin(value):
    """Convert numpy containers and scalars into JSON-serialisable objects."""
    if isinstance(value, dict):
        return {str(k): _to_builtin(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_to_builtin(v) for v in value]
    if isinstance(value, np.ndarray):
        return [_to_builtin(v) for v in value.tolist()]
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, np.floating):
        value = float(value)
    if isinstance(value, float) and not np.isfinite(value):
        return repr(value)
    return value


class ResultWriter:
    """
    Writer for the JSON and CSV files produced by one run.
    
    Every written file is remembered so the manifest can list it.
    """

    def __init__(self, out_dir):
        """
        Initialize the writer.
        
        Args:
            out_dir: Directory receiving the result files (created if missing)
        """
        self.out_dir = out_dir
        os.makedirs(self.out_dir, exist_ok=True)
        self.outputs = []

    def write_json(self, name, schema_id, data):
        """
        Write a JSON document tagged with its schema.
        
        Args:
            name: File name inside the output directory
            schema_id: Key into SCHEMAS
            data: Mapping to serialise
            
        Returns:
            str: Path of the written file
        """
        document = {"schema": SCHEMA_VERSION, "schema_id": schema_id}
        document.update(_to_builtin(data))
        path = os.path.join(self.out_dir, name)
        with open(path, "w") as f:
            json.dump(document, f, indent=2, sort_keys=True)
            f.write("\n")
        self._record(path, schema_id, "json")
        return path

    def write_csv(self, name, schema_id, frame):
        """
        Write a DataFrame as CSV with 12 significant digits.
        
        Args:
            name: File name inside the output directory
            schema_id: Key into SCHEMAS
            frame: pandas.DataFrame to write
            
        Returns:
            str: Path of the written file
        """
        path = os.path.join(self.out_dir, name)
        frame.to_csv(path, index=False, float_format="%.12g")
        self._record(path, schema_id, "csv")
        return path

    def write_text(self, name, schema_id, text):
        """Write a plain text document, for example a Markdown report."""
        path = os.path.join(self.out_dir, name)
        with open(path, "w") as f:
            f.write(text)
        self._record(path, schema_id, "text")
        return path

    def _record(self, path, schema_id, fmt):
        self.outputs.append({
            "path": os.path.basename(path),
            "schema_id": schema_id,
            "format": fmt,
        })
        logger.info(f"Wrote {schema_id} output to {path}")


def load_output(path, schema_id):
    """
    Read a result file back and check it against its schema.
    
    Args:
        path: File to read
        schema_id: Expected schema id
        
    Returns:
        dict or pandas.DataFrame: Parsed content
    """
    if schema_id not in SCHEMAS:
        raise SchemaMismatch(f"Unknown schema id {schema_id!r}")
    schema = SCHEMAS[schema_id]
    if schema["format"] == "text":
        with open(path) as f:
            return f.read()
    if schema["format"] == "csv":
        try:
            frame = pd.read_csv(path)
        except Exception as e:
            raise SchemaMismatch(f"Unreadable CSV {path}: {str(e)}")
        missing = [col for col in schema["fields"] if col not in frame.columns]
        if missing:
            raise SchemaMismatch(f"{path} lacks columns {missing}", {"missing": missing})
        return frame

    try:
        with open(path) as f:
            document = json.load(f)
    except Exception as e:
        raise SchemaMismatch(f"Unreadable JSON {path}: {str(e)}")
    if not isinstance(document, dict):
        raise SchemaMismatch(f"{path} is not a JSON object")
    if document.get("schema") != SCHEMA_VERSION:
        raise SchemaMismatch(
            f"{path} has schema {document.get('schema')!r}, expected {SCHEMA_VERSION!r}",
            {"found": document.get("schema")},
        )
    if document.get("schema_id") != schema_id:
        raise SchemaMismatch(f"{path} is {document.get('schema_id')!r}, expected {schema_id!r}")
    missing = [key for key in schema["fields"] if key not in document]
    if missing:
        raise SchemaMismatch(f"{path} lacks keys {missing}", {"missing": missing})
    return document


@dataclass
class RunManifest:
    """Provenance record written next to every run's results."""

    command_line: list
    parameters: dict
    scheme: dict
    tool_version: str
    started: str = field(default_factory=lambda: datetime.datetime.now().isoformat())
    finished: str = ""
    duration_s: float = 0.0
    outputs: list = field(default_factory=list)
    exit_code: int = 0
    status: str = "ok"
    error: dict = field(default_factory=dict)

    @classmethod
    def start(cls, parameters, scheme, tool_version, argv=None):
        """Open a manifest for the current process."""
        return cls(
            command_line=list(sys.argv if argv is None else argv),
            parameters=dict(parameters),
            scheme=dict(scheme),
            tool_version=tool_version,
        )

    def finish(self, writer, exit_code, status="ok", name="manifest.json", error=None):
        """
        Close the manifest and write it through the given writer.
        
        Args:
            writer: ResultWriter of the run
            exit_code: Process exit code
            status: Short outcome label
            name: File name of the manifest
            error: Message and payload of a failed run
            
        Returns:
            str: Path of manifest.json
        """
        end = datetime.datetime.now()
        self.finished = end.isoformat()
        self.duration_s = (end - datetime.datetime.fromisoformat(self.started)).total_seconds()
        self.outputs = list(writer.outputs)
        self.exit_code = int(exit_code)
        self.status = status
        self.error = dict(error or {})
        return writer.write_json(name, "manifest", asdict(self))
