"""
Tests for CSV ingestion, report rendering and simulation result files
"""

import json

import numpy as np
import pytest

from app.io.datasets import (
    TableFormat,
    TableSchema,
    load_simulation_config,
    read_contrast,
    read_dataset,
    read_strata,
    write_dataset,
)
from app.io.reports import (
    pvalue_table,
    read_simulation,
    render_json,
    render_table,
    write_simulation,
)
from app.models.dataset import IncompleteDataset
from app.models.reports import BootstrapConfig
from app.services.ranking import midranks
from app.services.mc_harness import load_config, simulate
from app.utils.errors import ConfigError, ParseError, SchemaError
from app.workflows.factorial_analysis import FactorialAnalysis

WIDE = """group,subject,t1,t2,t3
g1,s1,2,NA,3
g1,s2,1,4,5
g1,s3,0.5,2,NA
g2,s1,6,7,8
g2,s2,NA,1.5,2
g2,s3,3,9,4
"""

LONG = """group,subject,occasion,value
g1,s1,3,3
g2,s3,2,9
g1,s2,1,1
g2,s1,1,6
g1,s3,3,NA
g1,s1,1,2
g2,s2,3,2
g1,s2,2,4
g2,s1,3,8
g1,s3,1,0.5
g2,s3,1,3
g1,s1,2,NA
g2,s2,1,NA
g1,s2,3,5
g2,s1,2,7
g1,s3,2,2
g2,s2,2,1.5
g2,s3,3,4
"""


@pytest.fixture
def wide_csv(tmp_path):
    path = tmp_path / "wide.csv"
    path.write_text(WIDE)
    return path


def _write(tmp_path, name, text):
    path = tmp_path / name
    path.write_text(text)
    return path


class TestReadWide:

    def test_values_and_mask(self, wide_csv):
        data = read_dataset(wide_csv)
        assert data.group_labels == ("g1", "g2")
        assert data.occasion_labels == ("t1", "t2", "t3")
        assert data.subject_ids[0] == ("s1", "s2", "s3")
        assert data.mask[0][0].tolist() == [True, False, True]
        assert data.values[0][0].tolist() == [2.0, 0.0, 3.0]
        assert data.n_observations == 15

    def test_selected_occasion_columns(self, wide_csv):
        data = read_dataset(wide_csv, TableSchema(occasion_columns=["t3", "t1"]))
        assert data.occasion_labels == ("t3", "t1")
        assert data.values[1][0].tolist() == [8.0, 6.0]

    def test_na_is_a_valid_group_label(self, tmp_path):
        path = _write(tmp_path, "na.csv", "group,subject,t1\nNA,a,1\nNA,b,2\nB,c,NA\nB,d,4\n")
        data = read_dataset(path)
        assert data.group_labels == ("NA", "B")
        assert data.mask[1][:, 0].tolist() == [False, True]

    def test_custom_missing_token(self, tmp_path):
        path = _write(tmp_path, "dot.csv", "group,subject,t1\ng,a,.\ng,b,2\n")
        data = read_dataset(path, TableSchema(missing_token="."))
        assert data.mask[0][:, 0].tolist() == [False, True]

    def test_parse_error_reports_row_and_column(self, tmp_path):
        path = _write(tmp_path, "bad.csv", "group,subject,t1,t2\ng,a,1,2\ng,b,1,abc\n")
        with pytest.raises(ParseError) as excinfo:
            read_dataset(path)
        assert excinfo.value.row == 3
        assert excinfo.value.column == "t2"

    def test_missing_column(self, wide_csv):
        with pytest.raises(SchemaError) as excinfo:
            read_dataset(wide_csv, TableSchema(group_column="arm"))
        assert excinfo.value.column == "arm"

    def test_duplicate_subject(self, tmp_path):
        path = _write(tmp_path, "dup.csv", "group,subject,t1\ng,a,1\ng,a,2\n")
        with pytest.raises(SchemaError):
            read_dataset(path)

    def test_missing_file(self, tmp_path):
        with pytest.raises(SchemaError):
            read_dataset(tmp_path / "absent.csv")

    def test_directory_is_not_a_table(self, tmp_path):
        with pytest.raises(SchemaError):
            read_dataset(tmp_path)

    def test_nearly_equal_values_stay_distinct(self, tmp_path):
        path = _write(tmp_path, "close.csv", "group,subject,g1\na,x,0.3\na,y,0.30000000000000004\n")
        column = read_dataset(path).values[0][:, 0]
        assert column[0] != column[1]
        assert column.tolist() == [0.3, 0.1 + 0.2]
        assert midranks(column).tolist() == [1.0, 2.0]


class TestReadLong:

    def test_shuffled_rows_match_wide(self, tmp_path, wide_csv):
        long = read_dataset(_write(tmp_path, "long.csv", LONG), TableSchema(format=TableFormat.LONG))
        wide = read_dataset(wide_csv)
        assert long.group_labels == wide.group_labels
        assert long.occasion_labels == ("1", "2", "3")
        for i in range(2):
            order = [long.subject_ids[i].index(s) for s in wide.subject_ids[i]]
            assert np.array_equal(long.mask[i][order], wide.mask[i])
            assert np.array_equal(long.values[i][order], wide.values[i])

    def test_absent_rows_are_missing(self, tmp_path):
        text = "group,subject,occasion,value\ng,a,1,1\ng,a,2,2\ng,b,1,3\n"
        data = read_dataset(_write(tmp_path, "gap.csv", text), TableSchema(format=TableFormat.LONG))
        assert data.mask[0].tolist() == [[True, True], [True, False]]

    def test_occasions_must_be_contiguous(self, tmp_path):
        text = "group,subject,occasion,value\ng,a,1,1\ng,a,3,2\n"
        with pytest.raises(SchemaError):
            read_dataset(_write(tmp_path, "gap.csv", text), TableSchema(format=TableFormat.LONG))

    def test_repeated_occasion(self, tmp_path):
        text = "group,subject,occasion,value\ng,a,1,1\ng,a,1,2\n"
        with pytest.raises(SchemaError):
            read_dataset(_write(tmp_path, "rep.csv", text), TableSchema(format=TableFormat.LONG))

    def test_non_integer_occasion(self, tmp_path):
        text = "group,subject,occasion,value\ng,a,1.5,1\n"
        with pytest.raises(ParseError) as excinfo:
            read_dataset(_write(tmp_path, "occ.csv", text), TableSchema(format=TableFormat.LONG))
        assert excinfo.value.row == 2


class TestStrataAndWriting:

    def test_read_strata(self, tmp_path):
        text = "site,group,subject,t1,t2\nA,g,a,1,2\nA,g,b,3,NA\nB,g,c,5,6\nB,h,d,7,8\n"
        strata = read_strata(_write(tmp_path, "sites.csv", text), "site")
        assert list(strata) == ["A", "B"]
        assert strata["A"].occasion_labels == ("t1", "t2")
        assert strata["B"].group_labels == ("g", "h")

    def test_subject_in_two_strata(self, tmp_path):
        text = "site,group,subject,t1\nA,g,a,1\nB,g,a,2\n"
        with pytest.raises(SchemaError):
            read_strata(_write(tmp_path, "sites.csv", text), "site")

    def test_write_then_read(self, tmp_path, small_dataset):
        path = tmp_path / "out.csv"
        write_dataset(small_dataset, path)
        assert read_dataset(path).equals(small_dataset)

    def test_write_preserves_float_text(self, tmp_path):
        data = IncompleteDataset.from_rows([[[0.1 + 0.2, None], [1e-300, 2.0]]])
        path = tmp_path / "floats.csv"
        write_dataset(data, path, missing_token="MISSING")
        assert "MISSING" in path.read_text()
        assert read_dataset(path, TableSchema(missing_token="MISSING")).equals(data)


class TestContrastAndConfigFiles:

    def test_read_contrast(self, tmp_path):
        matrix = read_contrast(_write(tmp_path, "c.csv", "1,-1,0\n0,1,-1\n"))
        assert matrix.tolist() == [[1.0, -1.0, 0.0], [0.0, 1.0, -1.0]]

    def test_contrast_parse_error(self, tmp_path):
        with pytest.raises(ParseError) as excinfo:
            read_contrast(_write(tmp_path, "c.csv", "1,x\n"))
        assert excinfo.value.row == 1
        assert excinfo.value.column == "2"

    def test_contrast_keeps_exact_decimals(self, tmp_path):
        matrix = read_contrast(_write(tmp_path, "c.csv", "0.1,0.2,-0.30000000000000004\n"))
        assert matrix[0].tolist() == [0.1, 0.2, -(0.1 + 0.2)]

    def test_contrast_path_is_a_directory(self, tmp_path):
        with pytest.raises(SchemaError):
            read_contrast(tmp_path)

    def test_simulation_config_file(self, tmp_path):
        payload = {"generators": [{"group_sizes": [5, 5], "d": 2}], "nsim": 3}
        config = load_simulation_config(_write(tmp_path, "sim.json", json.dumps(payload)))
        assert config.nsim == 3

    def test_invalid_json(self, tmp_path):
        with pytest.raises(ConfigError):
            load_simulation_config(_write(tmp_path, "sim.json", "{not json"))


class TestReports:

    def _report(self, data, **kwargs):
        config = BootstrapConfig(replicates=30, seed=5, threads=1)
        return FactorialAnalysis(config).run(data, **kwargs)

    def test_json_is_stable(self, small_dataset):
        first = render_json([self._report(small_dataset)])
        again = render_json([self._report(small_dataset)])
        assert first == again
        document = json.loads(first)
        assert document["schema_version"] == "1.0"
        assert [h["kind"] for h in document["hypotheses"]] == ["group", "time", "interaction"]

    def test_stratified_json_is_an_array(self, small_dataset):
        reports = [self._report(small_dataset, stratum="A"), self._report(small_dataset, stratum="B")]
        document = json.loads(render_json(reports))
        assert [r["stratum"] for r in document] == ["A", "B"]

    def test_pvalue_table(self, small_dataset):
        table = pvalue_table(self._report(small_dataset))
        assert list(table.columns) == ["T_W", "T_A", "T_W*", "T_A*", "T_M*"]
        assert list(table.index) == ["Group", "Time", "Group x Time"]
        assert ((table >= 0.0) & (table <= 1.0)).all().all()

    def test_render_table_headers_strata(self, small_dataset):
        text = render_table([self._report(small_dataset, stratum="site A")])
        assert text.startswith("[site A]")
        assert "T_M*" in text


class TestSimulationFiles:

    def test_write_and_read_back(self, tmp_path):
        config = load_config({
            "generators": [{"group_sizes": [5, 5], "d": 2}],
            "methods": ["wts", "ats_boot"],
            "nsim": 2,
            "bootstrap_replicates": 10,
            "seed": 1,
            "threads": 1,
        })
        result = simulate(config)
        paths = write_simulation(result, tmp_path / "results")
        assert all(p.exists() for p in paths.values())
        header = paths["replications"].read_text().splitlines()[0].split(",")
        assert "p_wts" in header and "degenerate_ats_boot" in header
        assert read_simulation(paths["result"]).model_dump() == result.model_dump()
