"""
Tests for the MCP tool functions
"""

import asyncio

from app.tools import TOOLS, register_tools
from app.tools.analysis_tools import describe_dataset, run_rank_tests
from app.tools.simulation_tools import run_simulation

DATA = """group,subject,t1,t2
a,1,1.0,2.0
a,2,1.5,NA
a,3,0.7,2.2
b,4,2.0,3.1
b,5,2.5,2.9
b,6,NA,3.3
"""


def _csv(tmp_path, text=DATA):
    path = tmp_path / "data.csv"
    path.write_text(text)
    return str(path)


class _Registry:

    def __init__(self):
        self.names = []

    def tool(self):
        def register(func):
            self.names.append(func.__name__)
            return func
        return register


def test_register_tools():
    registry = _Registry()
    assert register_tools(registry) == len(TOOLS)
    assert registry.names == ["run_rank_tests", "describe_dataset", "run_simulation"]


class TestRankTestTool:

    def test_success(self, tmp_path):
        result = asyncio.run(run_rank_tests(_csv(tmp_path), hypotheses=["group"], bootstrap_replicates=25, seed=3))
        assert result["success"] is True
        report = result["reports"][0]
        assert report["hypotheses"][0]["bootstrap_replicates"] == 25
        assert "T_W" in result["table"]

    def test_domain_error_becomes_payload(self, tmp_path):
        text = "group,subject,t1\na,1,1\na,2,NA\n"
        result = asyncio.run(run_rank_tests(_csv(tmp_path, text), bootstrap_replicates=10))
        assert result["success"] is False
        assert result["error_type"] == "empty_cell"
        assert result["suggestions"]
        assert result["details"]["cells"]
        assert result["message"] in result["error"]

    def test_unexpected_error_becomes_payload(self, tmp_path):
        result = asyncio.run(run_rank_tests(_csv(tmp_path), format="XML"))
        assert result["success"] is False
        assert result["error"].startswith("Tool execution failed")
        assert result["error_type"] == "processing_error"
        assert "XML" in result["message"]
        assert result["traceback"]


class TestDescribeTool:

    def test_counts_and_hypotheses(self, tmp_path):
        result = asyncio.run(describe_dataset(_csv(tmp_path)))
        assert result["success"] is True
        assert result["observed_counts"] == {"a": {"t1": 3, "t2": 2}, "b": {"t1": 2, "t2": 3}}
        assert result["sparse_cells"] == []
        assert result["testable_hypotheses"] == ["Group", "Time", "Group x Time"]
        assert result["summary"]["n_observations"] == 10

    def test_sparse_cells_are_listed(self, tmp_path):
        text = "group,subject,t1,t2\na,1,1,NA\na,2,2,3\n"
        result = asyncio.run(describe_dataset(_csv(tmp_path, text)))
        assert result["sparse_cells"] == [{"group": "a", "occasion": "t2", "observed": 1}]


class TestSimulationTool:

    def test_summary(self, tmp_path):
        config = {
            "generators": [{"group_sizes": [5, 5], "d": 2}],
            "methods": ["ats"],
            "nsim": 2,
            "seed": 8,
            "threads": 1,
        }
        result = asyncio.run(run_simulation(config, out_dir=str(tmp_path / "out")))
        assert result["success"] is True
        assert result["cells"] == 1
        assert len(result["summary"]) == 1
        assert set(result["files"]) == {"summary", "replications", "result"}

    def test_invalid_config(self):
        result = asyncio.run(run_simulation({"generators": []}))
        assert result["success"] is False
        assert result["error_type"] == "config_error"
