"""csv and json modules for run artifacts"""
import csv
import json
import os
from typing import Iterable, Optional, Sequence

import numpy as np
from django.conf import settings


def _plain(value):
    """Make numpy scalars/arrays and complex numbers JSON friendly"""
    if isinstance(value, dict):
        return {str(key): _plain(item) for key, item in value.items()}
    if isinstance(value, (list, tuple, set, frozenset)):
        items = sorted(value) if isinstance(value, (set, frozenset)) else value
        return [_plain(item) for item in items]
    if isinstance(value, np.ndarray):
        return _plain(value.tolist())
    if isinstance(value, (complex, np.complexfloating)):
        return [float(value.real), float(value.imag)]
    if isinstance(value, np.bool_):
        return bool(value)
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, np.floating):
        return float(value)
    return value


def output_path(name: str, directory: Optional[str] = None) -> str:
    directory = settings.OUTPUT_DIR if directory is None else directory
    os.makedirs(directory, exist_ok=True)
    return os.path.join(directory, name)


def write_csv(csv_file, header: Sequence[str], rows: Iterable[Sequence]) -> None:
    """Write rows with a header, floats in full precision"""
    float_format = settings.CSV_FLOAT_FORMAT
    with open(csv_file, 'w', encoding='utf-8', newline='') as file:
        writer = csv.writer(file)
        writer.writerow(header)
        for row in rows:
            writer.writerow([float_format % item
                             if isinstance(item, (float, np.floating)) else item
                             for item in row])


def write_json(json_file, data) -> None:
    with open(json_file, 'w', encoding='utf-8') as file:
        json.dump(_plain(data), file, ensure_ascii=False, indent=2, sort_keys=True)


def dump_json(data) -> str:
    return json.dumps(_plain(data), ensure_ascii=False, indent=2, sort_keys=True)


def read_json(json_file) -> dict:
    with open(json_file, 'r', encoding='utf-8') as file:
        return json.load(file)


def report(command: str, config: dict, **results) -> dict:
    """Common JSON report layout: config echo, version, results"""
    return {
        'command': command,
        'config': config,
        'version': settings.VERSION,
        **results,
    }
