import json
import logging
from pathlib import Path
from typing import Dict, List, Optional, Union

from dotenv import dotenv_values
from pydantic import ValidationError as PydanticValidationError

from app.config.sensing_exceptions import ScenarioConfigError
from app.schemas.scenario_schema import Scenario

logger = logging.getLogger(__name__)

NUMEROLOGY_KEYS = {'fc', 'delta_f', 'nc', 'm', 'tcp'}
GEOMETRY_KEYS = {'nt', 'nr', 'dt', 'dr'}
NOISE_KEYS = {'sigma2', 'temperature_k', 'noise_figure_db'}
SCENARIO_KEYS = {'pt_dbm', 'gt_db', 'gr_db', 'seed', 'music_snapshots'}
TARGET_FIELDS = ('range_m', 'velocity_mps', 'angle_deg', 'rcs_m2')


def parse_targets(raw: str) -> List[Dict[str, float]]:
    """`range,velocity,angle,rcs;...` or a JSON list of objects / 4-tuples"""
    raw = raw.strip()
    if raw.startswith('['):
        try:
            items = json.loads(raw)
        except json.JSONDecodeError as e:
            raise ScenarioConfigError(f"targets is not valid JSON: {e}")
        return [item if isinstance(item, dict) else dict(zip(TARGET_FIELDS, item)) for item in items]

    targets = []
    for chunk in filter(None, (part.strip() for part in raw.split(';'))):
        fields = [value.strip() for value in chunk.split(',')]
        if not 1 <= len(fields) <= len(TARGET_FIELDS):
            raise ScenarioConfigError(f"Target '{chunk}' must have 1 to 4 comma-separated fields")
        try:
            targets.append({name: float(value) for name, value in zip(TARGET_FIELDS, fields)})
        except ValueError:
            raise ScenarioConfigError(f"Target '{chunk}' contains a non-numeric field")
    if not targets:
        raise ScenarioConfigError("targets is empty")
    return targets


def scenario_from_mapping(values: Dict[str, Optional[str]]) -> Scenario:
    numerology, geometry, noise, data = {}, {}, {}, {}
    for key, value in values.items():
        name = key.strip().lower()
        if value is None or value == '':
            continue
        if name in NUMEROLOGY_KEYS:
            numerology[name] = value
        elif name in GEOMETRY_KEYS:
            geometry[name] = value
        elif name in NOISE_KEYS:
            noise[name] = value
        elif name in SCENARIO_KEYS:
            data[name] = value
        elif name == 'targets':
            data['targets'] = parse_targets(value)
        else:
            raise ScenarioConfigError(f"Unknown scenario key '{key}'")

    if numerology:
        data['numerology'] = numerology
    if geometry:
        data['geometry'] = geometry
    if noise:
        data['noise'] = noise
    try:
        return Scenario.model_validate(data)
    except PydanticValidationError as e:
        raise ScenarioConfigError(f"Invalid scenario: {e.errors()[0].get('msg', str(e))}")


def load_scenario(path: Optional[Union[str, Path]] = None) -> Scenario:
    """Read a key=value scenario file; no path yields the default scenario"""
    if path is None:
        return Scenario()
    path = Path(path)
    if not path.is_file():
        raise ScenarioConfigError(f"Scenario file not found: {path}")
    scenario = scenario_from_mapping(dotenv_values(path))
    logger.info(f"Loaded scenario from {path}: {len(scenario.targets)} targets")
    return scenario
