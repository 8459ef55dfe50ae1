"""
Comparison tables, CSV writers and diagnostic images.
"""
import csv
import math

import numpy as np

from pelflow.models.estimation import PixelStatus
from pelflow.models.frame import FlowField, Frame
from pelflow.models.report import MetricsReport
from pelflow.services.reporting import (
    compensated_frame,
    error_map,
    format_table,
    status_map_frame,
    write_per_frame_imc_csv,
    write_table_csv,
)


def report(**overrides) -> MetricsReport:
    values = dict(mean_sq_dfd=3.35, mean_sq_fd=300.0, imc_db=19.46)
    values.update(overrides)
    return MetricsReport(**values)


def with_truth(**overrides) -> MetricsReport:
    return report(mse_x=0.144, mse_y=0.0754, bias_x=0.0574, bias_y=-0.0293, **overrides)


class TestTable:
    def test_rows_with_truth(self):
        text = format_table({"Wiener": with_truth(), "LSCRV2": with_truth(imc_db=20.38)})
        lines = text.splitlines()
        assert lines[0].split() == ["Wiener", "LSCRV2"]
        assert [line.split()[0] for line in lines[1:]] == ["MSE_x", "MSE_y", "bias_x", "bias_y", "IMC(dB)", "DFD^2"]
        assert lines[5].split()[1:] == ["19.46", "20.38"]

    def test_rows_without_truth(self):
        text = format_table({"estimate": report()})
        assert [line.split()[0] for line in text.splitlines()[1:]] == ["IMC(dB)", "DFD^2"]

    def test_truth_rows_need_every_column(self):
        text = format_table({"a": with_truth(), "b": report()})
        assert "MSE_x" not in text

    def test_infinite_imc_text(self):
        text = format_table({"estimate": report(imc_db=math.inf, mean_sq_dfd=0.0)})
        assert text.splitlines()[1].split() == ["IMC(dB)", "inf"]

    def test_csv_sentinel(self, tmp_path):
        path = tmp_path / "t.csv"
        write_table_csv({"Wiener": with_truth(), "LSCRV2": with_truth(imc_db=math.inf)}, path)
        rows = list(csv.reader(path.open()))
        assert rows[0] == ["metric", "Wiener", "LSCRV2"]
        imc = next(r for r in rows if r[0] == "IMC(dB)")
        assert imc[1:] == ["19.46", "999.0"]

    def test_per_frame_csv(self, tmp_path):
        path = tmp_path / "imc.csv"
        write_per_frame_imc_csv({"Wiener": [1.5, 2.0], "LSCRV": [1.75, math.inf]}, path)
        rows = list(csv.reader(path.open()))
        assert rows == [["pair", "Wiener", "LSCRV"], ["1", "1.5", "1.75"], ["2", "2.0", "999.0"]]


class TestImages:
    def test_perfect_flow_gives_black_error_map(self):
        rng = np.random.default_rng(2)
        prev = rng.integers(0, 256, size=(5, 7))
        cur = prev.copy()
        cur[:, 1:] = prev[:, :-1]
        image = error_map(Frame(samples=cur), Frame(samples=prev), FlowField.constant(5, 7, 1.0, 0.0))
        assert not image.samples.any()

    def test_error_map_gain_and_clamp(self):
        prev = Frame(samples=np.zeros((2, 2)))
        cur = Frame(samples=[[10, 100], [0, 1]])
        image = error_map(cur, prev, FlowField.zeros(2, 2), gain=4.0)
        assert image.samples.tolist() == [[40, 255], [0, 4]]

    def test_compensated_frame_zero_flow(self):
        prev = Frame(samples=[[1, 2], [3, 4]])
        assert compensated_frame(prev, FlowField.zeros(2, 2)) == prev

    def test_status_levels(self):
        status = np.array([[PixelStatus.STATIC, PixelStatus.FALLBACK_ZERO, PixelStatus.CONVERGED]], dtype=np.uint8)
        assert status_map_frame(status).samples.tolist() == [[0, 128, 255]]
