# Copyright 2026 The dpsos Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     https://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

import json
import os
import pathlib

import jsonschema
import pytest

SCHEMA_DIR = pathlib.Path(
    os.environ.get("DPSOS_SCHEMA_DIR", pathlib.Path(__file__).resolve().parents[2] / "schemas")
)


@pytest.fixture
def validate():
    def check(doc, name):
        schema = json.loads((SCHEMA_DIR / f"{name}.schema.json").read_text())
        jsonschema.validate(doc, schema)
        return doc

    return check
