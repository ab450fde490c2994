"""Versioned JSON Schemas for every JSON document the tools emit."""

import json
from importlib import resources

NAMES = {"sema-model/1": "sema-model-1.json", "sema-findings/1": "sema-findings-1.json",
         "sema-trace/1": "sema-trace-1.json", "sema-tests/1": "sema-tests-1.json"}


def load_schema(version: str) -> dict:
    return json.loads(resources.files(__name__).joinpath(NAMES[version]).read_text("utf-8"))
