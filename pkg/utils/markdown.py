import dataclasses
import math

import numpy as np
from pydantic import BaseModel


def _scalar(value) -> str:
    if isinstance(value, (float, np.floating)):
        return "nan" if math.isnan(value) else f"{value:.6g}"
    return str(value)


def to_markdown(data, indent=0):
    """Render nested models, dataclasses, dicts and lists as markdown headings and bullets."""
    markdown = ""
    if isinstance(data, BaseModel):
        data = data.model_dump()
    elif dataclasses.is_dataclass(data) and not isinstance(data, type):
        data = {f.name: getattr(data, f.name) for f in dataclasses.fields(data)}
    if isinstance(data, np.ndarray):
        data = data.tolist()
    if isinstance(data, dict):
        for key, value in data.items():
            markdown += f"{'#' * (indent + 2)} {key}\n"
            if isinstance(value, (dict, list, tuple, BaseModel, np.ndarray)) or dataclasses.is_dataclass(value):
                markdown += to_markdown(value, indent + 1)
            else:
                markdown += f"{_scalar(value)}\n\n"
    elif isinstance(data, (list, tuple)):
        for item in data:
            if isinstance(item, (dict, BaseModel)) or dataclasses.is_dataclass(item):
                markdown += to_markdown(item, indent)
            elif isinstance(item, (list, tuple)):
                markdown += "- " + ", ".join(_scalar(v) for v in item) + "\n"
            else:
                markdown += f"- {_scalar(item)}\n"
        markdown += "\n"
    else:
        markdown += f"{_scalar(data)}\n\n"
    return markdown


def markdown_table(columns, rows) -> str:
    header = "| " + " | ".join(columns) + " |\n"
    rule = "|" + "|".join("---" for _ in columns) + "|\n"
    body = "".join("| " + " | ".join(_scalar(v) for v in row) + " |\n" for row in rows)
    return header + rule + body
