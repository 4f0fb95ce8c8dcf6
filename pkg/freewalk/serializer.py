"""
Artifact serializer for FreeWalk
Deterministic JSON envelopes with checksums, plus CSV tables
"""

import csv
import hashlib
import json
import logging
import os
from typing import Any, Dict, List, Sequence

import jsonschema

from .data_types import FORMAT_NAME, SCHEMA_VERSION, OutputFormat, SpecParseError

logger = logging.getLogger(__name__)

MAX_FILE_SIZE = 100 * 1024 * 1024  # 100MB

OUTPUT_SCHEMA: Dict[str, Any] = {
    "type": "object",
    "required": ["format", "schema_version", "command", "config", "payload", "checksum"],
    "additionalProperties": False,
    "properties": {
        "format": {"const": FORMAT_NAME},
        "schema_version": {"const": SCHEMA_VERSION},
        "command": {"type": "string", "minLength": 1},
        "config": {"type": "object"},
        "payload": {"type": ["object", "array"]},
        "checksum": {"type": "string", "pattern": "^[0-9a-f]{64}$"},
    },
}


class ArtifactEncoder:
    """Builds envelopes; no timestamps, so equal inputs give equal bytes"""

    @staticmethod
    def checksum(data: Dict[str, Any]) -> str:
        canonical = json.dumps(data, sort_keys=True, separators=(',', ':'))
        return hashlib.sha256(canonical.encode()).hexdigest()

    @staticmethod
    def envelope(command: str, config: Dict[str, Any], payload: Any) -> Dict[str, Any]:
        data = {
            'format': FORMAT_NAME,
            'schema_version': SCHEMA_VERSION,
            'command': command,
            'config': config,
            'payload': payload,
        }
        data['checksum'] = ArtifactEncoder.checksum(data)
        return data

    @staticmethod
    def dumps(envelope: Dict[str, Any]) -> str:
        return json.dumps(envelope, indent=2, sort_keys=True, ensure_ascii=False) + "\n"


class ArtifactWriter:
    """Writes JSON and/or CSV artifacts into one output directory"""

    def __init__(self, output_dir: str, output_format: OutputFormat = OutputFormat.BOTH):
        self.output_dir = output_dir
        self.output_format = output_format
        self.written: List[str] = []

    @property
    def wants_json(self) -> bool:
        return self.output_format in (OutputFormat.JSON, OutputFormat.BOTH)

    @property
    def wants_csv(self) -> bool:
        return self.output_format in (OutputFormat.CSV, OutputFormat.BOTH)

    def _path(self, name: str, extension: str) -> str:
        if not os.path.exists(self.output_dir):
            os.makedirs(self.output_dir)
        return os.path.join(self.output_dir, f"{name}.{extension}")

    def write_json(self, name: str, command: str, config: Dict[str, Any], payload: Any) -> str:
        if not self.wants_json:
            return ""
        envelope = ArtifactEncoder.envelope(command, config, payload)
        jsonschema.validate(instance=envelope, schema=OUTPUT_SCHEMA)
        path = self._path(name, "json")
        with open(path, 'w', encoding='utf-8', newline='\n') as f:
            f.write(ArtifactEncoder.dumps(envelope))
        self.written.append(path)
        logger.info(f"Artifact written: {path}")
        return path

    def write_csv(self, name: str, header: Sequence[str], rows: Sequence[Sequence[Any]]) -> str:
        if not self.wants_csv:
            return ""
        path = self._path(name, "csv")
        with open(path, 'w', encoding='utf-8', newline='') as f:
            writer = csv.writer(f, lineterminator='\n')
            writer.writerow(header)
            writer.writerows(rows)
        self.written.append(path)
        logger.info(f"Table written: {path} ({len(rows)} rows)")
        return path


class ArtifactLoader:
    """Reads envelopes back, verifying format, version and checksum"""

    @staticmethod
    def validate_artifact_file(path: str) -> bool:
        if not os.path.exists(path):
            logger.error(f"Artifact not found: {path}")
            return False
        size = os.path.getsize(path)
        if size > MAX_FILE_SIZE:
            logger.error(f"File too large: {size} > {MAX_FILE_SIZE}")
            return False
        if not path.lower().endswith('.json'):
            logger.warning(f"Unexpected file extension: {path}")
        return True

    @staticmethod
    def load(path: str) -> Dict[str, Any]:
        if not ArtifactLoader.validate_artifact_file(path):
            raise SpecParseError(f"Invalid artifact file: {path}")
        with open(path, 'r', encoding='utf-8') as f:
            try:
                data = json.load(f)
            except json.JSONDecodeError as e:
                raise SpecParseError(f"Artifact {path} is not valid JSON: {e}") from e
        try:
            jsonschema.validate(instance=data, schema=OUTPUT_SCHEMA)
        except jsonschema.ValidationError as e:
            raise SpecParseError(f"Artifact {path} does not match the output schema: {e.message}") from e
        body = dict(data)
        stored = body.pop('checksum')
        if stored != ArtifactEncoder.checksum(body):
            raise SpecParseError(f"Checksum validation failed: {path}")
        return data
