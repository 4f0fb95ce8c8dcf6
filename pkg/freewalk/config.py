"""
Experiment configuration for FreeWalk

Settings come from command-line flags, optionally overlaid on a YAML file.
The merged mapping is validated against CONFIG_SCHEMA before an
ExperimentConfig is built from it.
"""

import logging
import os
from dataclasses import asdict, dataclass, field
from typing import Any, Dict, List, Optional

import jsonschema
import yaml

from .data_types import (
    DEFAULT_ENUMERATION_BUDGET,
    DEFAULT_TRUNCATION,
    GreenVariant,
    OutputFormat,
    SpecParseError,
    parse_fraction,
)
from .green import GreenModel
from .measures import FinMeasure, uniform_generator_measure
from .words import RaySpec, ReducedWord

logger = logging.getLogger(__name__)

DEFAULT_OUTPUT_DIR = "freewalk_output"
DEFAULT_SET_RADIUS = 8

CONFIG_SCHEMA: Dict[str, Any] = {
    "type": "object",
    "additionalProperties": False,
    "properties": {
        "d": {"type": "integer", "minimum": 2, "maximum": 26},
        "model": {"enum": [variant.value for variant in GreenVariant]},
        "truncation": {"type": "integer", "minimum": 0},
        "measure": {
            "type": "object",
            "additionalProperties": {"type": "string"},
        },
        "sets": {
            "type": "object",
            "additionalProperties": {"type": "string"},
        },
        "set_radius": {"type": "integer", "minimum": 0},
        "words": {
            "type": "object",
            "additionalProperties": {"type": "string"},
        },
        "rays": {"type": "array", "items": {"type": "string"}},
        "radius": {"type": "integer", "minimum": 0},
        "steps": {"type": "integer", "minimum": 0},
        "length": {"type": "integer", "minimum": 1},
        "samples": {"type": "integer", "minimum": 1},
        "seed": {"type": ["integer", "null"]},
        "output_dir": {"type": "string"},
        "output_format": {"enum": [fmt.value for fmt in OutputFormat]},
        "budget": {"type": "integer", "minimum": 1},
        "quick": {"type": "boolean"},
    },
}


@dataclass
class ExperimentConfig:
    """
    Everything a command needs to run reproducibly

    Example:
        config = ExperimentConfig(d=2, sets={'A': 'sigma'}, radius=6)
        config.green_model().describe()    # 'closed:d=2'
    """
    d: int = 2
    model: str = GreenVariant.CLOSED_FORM_UNIFORM.value
    truncation: int = DEFAULT_TRUNCATION
    measure: Dict[str, str] = field(default_factory=dict)
    sets: Dict[str, str] = field(default_factory=dict)
    set_radius: int = DEFAULT_SET_RADIUS
    words: Dict[str, str] = field(default_factory=dict)
    rays: List[str] = field(default_factory=list)
    radius: Optional[int] = None
    steps: Optional[int] = None
    length: int = 1
    samples: int = 1
    seed: Optional[int] = None
    output_dir: str = DEFAULT_OUTPUT_DIR
    output_format: str = OutputFormat.BOTH.value
    budget: int = DEFAULT_ENUMERATION_BUDGET
    quick: bool = False

    @classmethod
    def from_mapping(cls, data: Dict[str, Any]) -> 'ExperimentConfig':
        validate_config(data)
        return cls(**data)

    def to_dict(self) -> Dict[str, Any]:
        """Envelope form; the output directory is left out so artifacts do not depend on it"""
        data = asdict(self)
        data.pop('output_dir')
        return data

    @property
    def format(self) -> OutputFormat:
        return OutputFormat(self.output_format)

    def step_measure(self) -> FinMeasure:
        if not self.measure:
            return uniform_generator_measure(self.d)
        try:
            return FinMeasure(self.d, {
                ReducedWord.parse(self.d, word): parse_fraction(mass) for word, mass in self.measure.items()
            })
        except ValueError as e:
            raise SpecParseError(f"Invalid step measure: {e}") from e

    def green_model(self) -> GreenModel:
        if GreenVariant(self.model) is GreenVariant.CLOSED_FORM_UNIFORM:
            if self.measure:
                raise SpecParseError("The closed-form model only covers the uniform generator walk")
            return GreenModel.closed_form(self.d)
        return GreenModel.truncated(self.step_measure(), self.truncation)

    def word(self, name: str, default: str = "e") -> ReducedWord:
        return ReducedWord.parse(self.d, self.words.get(name, default))

    def parsed_rays(self) -> List[RaySpec]:
        return [RaySpec.parse(self.d, text) for text in self.rays]

    def require(self, name: str):
        value = getattr(self, name)
        if value is None:
            raise SpecParseError(f"Missing required setting: {name}")
        return value


def validate_config(data: Dict[str, Any]):
    try:
        jsonschema.validate(instance=data, schema=CONFIG_SCHEMA)
    except jsonschema.ValidationError as e:
        raise SpecParseError(f"Invalid configuration: {e.message}") from e


def load_config_file(path: str) -> Dict[str, Any]:
    """Read a YAML configuration file into a plain mapping"""
    if not os.path.exists(path):
        raise SpecParseError(f"Configuration file not found: {path}")
    with open(path, 'r', encoding='utf-8') as f:
        try:
            data = yaml.safe_load(f) or {}
        except yaml.YAMLError as e:
            raise SpecParseError(f"Cannot parse {path}: {e}") from e
    if not isinstance(data, dict):
        raise SpecParseError(f"Configuration file {path} must contain a mapping")
    validate_config(data)
    logger.info(f"Loaded configuration from {path}")
    return data


def build_config(overrides: Dict[str, Any], path: Optional[str] = None) -> ExperimentConfig:
    """File values first, then every override that is not None"""
    data: Dict[str, Any] = load_config_file(path) if path else {}
    for key, value in overrides.items():
        if value is None:
            continue
        if isinstance(value, dict) and isinstance(data.get(key), dict):
            data[key] = {**data[key], **value}
        else:
            data[key] = value
    return ExperimentConfig.from_mapping(data)
