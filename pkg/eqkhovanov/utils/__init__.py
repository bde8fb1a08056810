"""Configuration and output rendering."""

from eqkhovanov.utils.config import Settings, load_settings
from eqkhovanov.utils.report import dump_json, json_envelope, render_homology_table

__all__ = [
    "Settings",
    "load_settings",
    "dump_json",
    "json_envelope",
    "render_homology_table",
]
