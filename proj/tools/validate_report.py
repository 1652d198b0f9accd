"""Validates augtree JSON reports against schema/report.schema.json."""
import json
import pathlib
import sys

import jsonschema

schema_path = pathlib.Path(__file__).resolve().parent.parent / "schema" / "report.schema.json"
schema = json.loads(schema_path.read_text())
validator = jsonschema.Draft202012Validator(schema)
failed = False
for path in sys.argv[1:]:
    errors = sorted(validator.iter_errors(json.loads(pathlib.Path(path).read_text())), key=str)
    for e in errors:
        print(f"{path}: {'/'.join(map(str, e.absolute_path))}: {e.message}")
    failed = failed or bool(errors)
    if not errors:
        print(f"{path}: ok")
sys.exit(1 if failed else 0)
