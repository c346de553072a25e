import json
import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).resolve().parent))

from dualarm import DEFAULT_MODEL_PATH, clamp_to_limits, load_default_model


@pytest.fixture(scope="session")
def model():
    return load_default_model()


@pytest.fixture(scope="session")
def model_doc():
    return json.loads(DEFAULT_MODEL_PATH.read_text())


@pytest.fixture
def random_config(model):
    """Factory for seeded random in-limit configurations."""

    def make(rng, margin=0.0):
        lo, hi = model.limits_lower, model.limits_upper
        span = hi - lo
        raw = lo + span * (margin + (1.0 - 2.0 * margin) * rng.random(model.dof))
        return clamp_to_limits(model, raw)

    return make


SINGLE_JOINT_DOC = """
{
  "name": "one_joint",
  "joints": [
    {"name": "j1", "kind": "revolute", "axis": [0, 0, 1],
     "origin_translation": [0, 0, 0], "origin_rotation": [0, 0, 0],
     "limit_min": -3.0, "limit_max": 3.0, "parent": "base"}
  ],
  "manipulation_chain": ["j1"],
  "viewpoint_chain": [],
  "gripper_joint": null
}
"""


@pytest.fixture
def single_joint_doc():
    return SINGLE_JOINT_DOC
