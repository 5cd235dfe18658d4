"""Validates the resolved CLI configuration against tools/config.schema.json."""
import json
import subprocess
import sys

import jsonschema


def resolved(exe, *flags):
    out = subprocess.run([exe, "spectrum", "--print-config", *flags], check=True, capture_output=True, text=True)
    return json.loads(out.stdout)


def main():
    exe, schema_path = sys.argv[1], sys.argv[2]
    with open(schema_path) as f:
        schema = json.load(f)
    jsonschema.Draft202012Validator.check_schema(schema)
    validator = jsonschema.Draft202012Validator(schema)

    for flags in [(), ("--omega", "9.5", "--levels", "1", "4", "--coupling", "0.2", "--cache-dir", "/tmp/c")]:
        validator.validate(resolved(exe, *flags))

    rejected = [{"colour": 1}, {"state": 0}, {"horizon": {"samples_per_period": 8}}, {"rabi": {"levels": [4]}},
                {"propagate": {"method": "magic"}}]
    for doc in rejected:
        if validator.is_valid(doc):
            print(f"schema accepts invalid document {doc}")
            return 1
    print("config schema: ok")
    return 0


if __name__ == "__main__":
    sys.exit(main())
