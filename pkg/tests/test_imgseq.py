"""
PGM and .flo I/O.
"""
import numpy as np
import pytest

from pelflow.core.errors import (
    DimensionMismatchError,
    FloFormatError,
    ImageFormatError,
    TruncatedPayloadError,
    UnsupportedFormatError,
)
from pelflow.models.frame import FlowField, Frame, Sequence
from pelflow.services.imgseq import (
    load_flo,
    load_pgm,
    load_sequence,
    save_flo,
    save_flow_csv,
    save_pgm,
    save_sequence,
)


class TestPgm:
    def test_reads_two_by_two(self, tmp_path):
        path = tmp_path / "a.pgm"
        path.write_bytes(b"P5\n2 2\n255\n" + bytes([0, 10, 20, 30]))
        frame = load_pgm(path)
        assert (frame.width, frame.height) == (2, 2)
        assert frame.samples.tolist() == [[0, 10], [20, 30]]

    def test_reads_qcif_with_comment(self, tmp_path):
        payload = bytes(range(256)) * 99
        path = tmp_path / "qcif.pgm"
        path.write_bytes(b"P5\n# written by a camera\n176 144\n255\n" + payload)
        frame = load_pgm(path)
        assert frame.shape == (144, 176)
        assert frame.samples.tobytes() == payload

    def test_ascii_pgm_is_unsupported(self, tmp_path):
        path = tmp_path / "ascii.pgm"
        path.write_bytes(b"P2\n2 2\n255\n0 10 20 30\n")
        with pytest.raises(UnsupportedFormatError) as info:
            load_pgm(path)
        assert info.value.field == "magic"

    def test_maxval_other_than_255(self, tmp_path):
        path = tmp_path / "deep.pgm"
        path.write_bytes(b"P5\n2 2\n65535\n" + bytes(8))
        with pytest.raises(ImageFormatError) as info:
            load_pgm(path)
        assert info.value.field == "maxval"

    def test_bad_width(self, tmp_path):
        path = tmp_path / "bad.pgm"
        path.write_bytes(b"P5\nxx 2\n255\n" + bytes(4))
        with pytest.raises(ImageFormatError) as info:
            load_pgm(path)
        assert info.value.field == "width"

    def test_truncated_payload(self, tmp_path):
        path = tmp_path / "short.pgm"
        path.write_bytes(b"P5\n4 4\n255\n" + bytes(10))
        with pytest.raises(TruncatedPayloadError):
            load_pgm(path)

    def test_one_pixel_white(self, tmp_path):
        path = tmp_path / "one.pgm"
        save_pgm(Frame(samples=[[255]]), path)
        assert path.read_bytes().endswith(b"\n\xff")
        assert load_pgm(path).samples.tolist() == [[255]]

    def test_round_trip(self, tmp_path, rng):
        for case in range(100):
            height, width = rng.integers(1, 40, size=2)
            frame = Frame(samples=rng.integers(0, 256, size=(height, width), dtype=np.uint8))
            path = tmp_path / f"f{case}.pgm"
            save_pgm(frame, path)
            assert load_pgm(path) == frame

    def test_unwritable_path(self, tmp_path):
        with pytest.raises(OSError) as info:
            save_pgm(Frame(samples=[[1]]), tmp_path / "missing" / "x.pgm")
        assert "missing" in str(info.value)


class TestSequenceFiles:
    def test_save_and_load(self, tmp_path, rng):
        frames = [Frame(samples=rng.integers(0, 256, size=(5, 7), dtype=np.uint8)) for _ in range(3)]
        paths = save_sequence(Sequence(frames=frames), tmp_path, "clip")
        assert [p.name for p in paths] == ["clip_0001.pgm", "clip_0002.pgm", "clip_0003.pgm"]
        loaded = load_sequence(paths)
        assert loaded.frames == frames

    def test_mixed_sizes(self, tmp_path):
        save_pgm(Frame(samples=np.zeros((4, 4))), tmp_path / "a.pgm")
        save_pgm(Frame(samples=np.zeros((4, 5))), tmp_path / "b.pgm")
        with pytest.raises(DimensionMismatchError):
            load_sequence([tmp_path / "a.pgm", tmp_path / "b.pgm"])


class TestFlo:
    def test_layout(self, tmp_path):
        flow = FlowField(dx=[[1.0, 2.0]], dy=[[-0.5, 0.25]])
        path = tmp_path / "f.flo"
        save_flo(flow, path)
        data = path.read_bytes()
        assert data[:4] == b"PIEH"
        assert np.frombuffer(data[4:12], dtype="<i4").tolist() == [2, 1]
        assert np.frombuffer(data[12:], dtype="<f4").tolist() == [1.0, -0.5, 2.0, 0.25]

    def test_round_trip_float32(self, tmp_path, rng):
        for case in range(100):
            height, width = rng.integers(1, 30, size=2)
            flow = FlowField(dx=rng.normal(0, 5, (height, width)), dy=rng.normal(0, 5, (height, width)))
            path = tmp_path / f"f{case}.flo"
            save_flo(flow, path)
            loaded = load_flo(path)
            np.testing.assert_array_equal(loaded.dx, flow.dx.astype(np.float32))
            np.testing.assert_array_equal(loaded.dy, flow.dy.astype(np.float32))

    def test_bad_tag(self, tmp_path):
        path = tmp_path / "bad.flo"
        path.write_bytes(b"XXXX" + np.array([1, 1], dtype="<i4").tobytes() + bytes(8))
        with pytest.raises(FloFormatError):
            load_flo(path)

    def test_size_mismatch(self, tmp_path):
        path = tmp_path / "bad.flo"
        path.write_bytes(b"PIEH" + np.array([2, 2], dtype="<i4").tobytes() + bytes(8))
        with pytest.raises(FloFormatError):
            load_flo(path)

    def test_non_finite_payload(self, tmp_path):
        path = tmp_path / "nan.flo"
        values = np.array([[[np.nan, 0.0], [1.0, np.inf]]], dtype="<f4")
        path.write_bytes(b"PIEH" + np.array([2, 1], dtype="<i4").tobytes() + values.tobytes())
        with pytest.raises(FloFormatError):
            load_flo(path)


def test_flow_csv(tmp_path):
    flow = FlowField(dx=[[0.5, 1.0], [2.0, 3.0]], dy=[[0.0, -1.0], [0.25, 0.0]])
    path = tmp_path / "f.csv"
    save_flow_csv(flow, path)
    lines = path.read_text().splitlines()
    assert lines[0] == "x,y,dx,dy"
    assert lines[1:] == ["0,0,0.5,0.0", "1,0,1.0,-1.0", "0,1,2.0,0.25", "1,1,3.0,0.0"]
