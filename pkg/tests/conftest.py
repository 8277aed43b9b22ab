import copy
import json
import os
from typing import Any, Dict, List, Optional

import pytest

from ergoalloc.core import SCENARIO_DIR, load_scenario

FIXED = os.path.join(SCENARIO_DIR, "corner_joint_fixed.json")
TAKT = os.path.join(SCENARIO_DIR, "corner_joint_takt.json")


def read_json(fname: str) -> Dict[str, Any]:
    with open(fname, encoding="utf-8") as f:
        return json.load(f)


def write_scenario(tmp_path, data: Dict[str, Any], name: str = "scenario.json") -> str:
    fname = os.path.join(tmp_path, name)
    with open(fname, "w", encoding="utf-8") as f:
        json.dump(data, f)
    return fname


@pytest.fixture
def fixed_data() -> Dict[str, Any]:
    return copy.deepcopy(read_json(FIXED))


@pytest.fixture
def takt_data() -> Dict[str, Any]:
    return copy.deepcopy(read_json(TAKT))


@pytest.fixture
def fixed_scenario():
    return load_scenario(FIXED)


@pytest.fixture
def takt_scenario():
    return load_scenario(TAKT)


def chain_data(
    templates: List[Dict[str, Any]],
    *,
    human: Optional[List[float]] = None,
    robot: Optional[List[float]] = None,
    robot_cost: float = 50.0,
    **extra: Any,
) -> Dict[str, Any]:
    """A chain assembly, action `a<k>` attaches piece `p<k>` to the hub."""
    actions, operations = [], []
    for k, tpl in enumerate(templates, start=1):
        duration = tpl["duration"]
        actions.append(
            {
                "label": f"a{k}",
                "durations": {
                    "human": human[k - 1] if human else duration,
                    "robot": robot[k - 1] if robot else duration,
                },
                "trajectories": {"synthetic": tpl},
            }
        )
        operations.append(
            {
                "action": f"a{k}",
                "father": [f"p{i}" for i in range(k + 1)],
                "children": [[f"p{i}" for i in range(k)], [f"p{k}"]],
            }
        )

    data = {
        "schema": 1,
        "name": "chain",
        "pieces": [f"p{i}" for i in range(len(templates) + 1)],
        "agents": [
            {"name": "human", "kind": "human"},
            {"name": "robot", "kind": "robot", "cost": robot_cost},
        ],
        "actions": actions,
        "operations": operations,
    }
    data.update(extra)
    return data
