import math

import numpy as np
import pytest

from cloudchan.cli import (
    ExperimentSpec,
    UsageError,
    main,
    parse_channel_file,
    parse_input_dist,
    parse_spec_file,
    run_sweep,
)

BSC_TEXT = "# BSC(0.2)\n0.8 0.2\n\n0.2 0.8  # second row\n"


@pytest.fixture
def bsc_file(tmp_path):
    path = tmp_path / "bsc.txt"
    path.write_text(BSC_TEXT)
    return str(path)


@pytest.fixture
def sweep_spec(tmp_path, bsc_file):
    path = tmp_path / "sweep.cfg"
    path.write_text(
        f"channel = {bsc_file}\n"
        "input_dist = 0.5,0.5\n"
        "k = 1.0\n"
        "k = 0.85\n"
        "r_start = 0.05\n"
        "r_stop = 0.15\n"
        "r_step = 0.05\n"
        "quantity = achievable\n"
        "quantity = correct\n"
        "seed = 3\n"
    )
    return str(path)


class TestChannelFile:
    def test_parses_with_comments_and_blanks(self, bsc_file):
        w = parse_channel_file(bsc_file)
        assert np.allclose(w.matrix, [[0.8, 0.2], [0.2, 0.8]])

    def test_rejects_bad_row_sum_naming_row(self, tmp_path):
        path = tmp_path / "bad.txt"
        path.write_text("0.8 0.2\n0.3 0.6\n")
        with pytest.raises(UsageError, match="row 1.*0.9"):
            parse_channel_file(str(path))

    def test_rejects_empty(self, tmp_path):
        path = tmp_path / "empty.txt"
        path.write_text("# nothing here\n")
        with pytest.raises(UsageError):
            parse_channel_file(str(path))

    def test_rejects_ragged_rows(self, tmp_path):
        path = tmp_path / "ragged.txt"
        path.write_text("0.8 0.2\n0.1 0.2 0.7\n")
        with pytest.raises(UsageError, match="lengths"):
            parse_channel_file(str(path))

    def test_tolerates_1e9_drift(self, tmp_path):
        path = tmp_path / "drift.txt"
        path.write_text("0.8000000001 0.2\n0.2 0.8\n")
        w = parse_channel_file(str(path))
        assert w.matrix.sum(axis=1) == pytest.approx([1.0, 1.0], abs=1e-15)


class TestInputDist:
    def test_optimize_sentinel(self, bsc_file):
        assert parse_input_dist("optimize", parse_channel_file(bsc_file)) is None

    def test_explicit(self, bsc_file):
        p = parse_input_dist("0.3,0.7", parse_channel_file(bsc_file))
        assert p.probs == pytest.approx([0.3, 0.7])

    def test_rejects_wrong_size(self, bsc_file):
        with pytest.raises(UsageError):
            parse_input_dist("0.2,0.3,0.5", parse_channel_file(bsc_file))


class TestSpecFile:
    def test_repeated_keys_accumulate(self, sweep_spec):
        spec = parse_spec_file(sweep_spec)
        assert spec.k_values == [1.0, 0.85]
        assert spec.quantities == ["achievable", "correct"]
        assert spec.r_values() == pytest.approx([0.05, 0.10, 0.15])

    def test_unknown_key_rejected(self, tmp_path, bsc_file):
        path = tmp_path / "bad.cfg"
        path.write_text(f"channel = {bsc_file}\nbogus = 1\n")
        with pytest.raises(UsageError, match="bogus"):
            parse_spec_file(str(path))

    def test_missing_channel_rejected(self, tmp_path):
        path = tmp_path / "bad.cfg"
        path.write_text("quantity = capacity\n")
        with pytest.raises(UsageError):
            parse_spec_file(str(path))

    def test_requires_quantity(self, tmp_path, bsc_file):
        path = tmp_path / "bad.cfg"
        path.write_text(f"channel = {bsc_file}\nk = 1\n")
        with pytest.raises(UsageError):
            parse_spec_file(str(path))


class TestSweep:
    def test_csv_shape_and_determinism(self, sweep_spec, tmp_path):
        spec = parse_spec_file(sweep_spec)
        out1, out2 = tmp_path / "a.csv", tmp_path / "b.csv"
        spec.out = str(out1)
        assert run_sweep(spec) == 0
        spec.out = str(out2)
        assert run_sweep(spec) == 0
        assert out1.read_bytes() == out2.read_bytes()
        lines = out1.read_text().strip().split("\n")
        assert lines[0] == "K,R,achievable,converse,correct_decoding,rho_star,eta_star,error"
        assert len(lines) == 1 + 2 * 3  # two K values x three rates

    def test_thread_count_does_not_change_bytes(self, sweep_spec, tmp_path, monkeypatch):
        spec = parse_spec_file(sweep_spec)
        spec.out = str(tmp_path / "a.csv")
        run_sweep(spec)
        monkeypatch.setenv("CLOUDCHAN_THREADS", "4")
        spec.out = str(tmp_path / "b.csv")
        run_sweep(spec)
        assert (tmp_path / "a.csv").read_bytes() == (tmp_path / "b.csv").read_bytes()

    def test_capacity_kind(self, tmp_path, bsc_file):
        path = tmp_path / "cap.cfg"
        path.write_text(f"channel = {bsc_file}\nquantity = capacity\nk = 0.3\nk = 1.0\n")
        spec = parse_spec_file(str(path))
        spec.out = str(tmp_path / "cap.csv")
        assert run_sweep(spec) == 0
        lines = (tmp_path / "cap.csv").read_text().strip().split("\n")
        assert lines[0] == "K,capacity"
        k, cap = lines[1].split(",")
        assert float(cap) == pytest.approx(math.log(2) - 0.3, abs=1e-6)

    def test_converse_inf_token(self, tmp_path, bsc_file):
        path = tmp_path / "inf.cfg"
        path.write_text(
            f"channel = {bsc_file}\nk = 0.85\n"
            "r_start = 0.001\nr_stop = 0.001\nr_step = 0.001\n"
            "quantity = converse\n"
        )
        spec = parse_spec_file(str(path))
        spec.out = str(tmp_path / "inf.csv")
        run_sweep(spec)
        row = (tmp_path / "inf.csv").read_text().strip().split("\n")[1]
        assert row.split(",")[3] == "inf"


class TestMain:
    def test_exponent_exit_zero(self, bsc_file, capsys):
        rc = main([
            "exponent", "--channel", bsc_file, "--input-dist", "0.5,0.5",
            "--rate", "0.05", "--cloud-k", "1.0",
        ])
        assert rc == 0
        out = capsys.readouterr().out
        assert "achievable" in out
        assert float(out.split()[1]) == pytest.approx(-math.log(0.9) - 0.05, abs=1e-6)

    def test_bits_conversion(self, bsc_file, capsys):
        main(["capacity", "--channel", bsc_file, "--cloud-k", "1.0"])
        nats = float(capsys.readouterr().out.split("\n")[0].split()[1])
        main(["capacity", "--channel", bsc_file, "--cloud-k", "1.0", "--bits"])
        bits = float(capsys.readouterr().out.split("\n")[0].split()[1])
        assert bits == pytest.approx(nats / math.log(2), abs=1e-9)

    def test_usage_error_exit_two(self, tmp_path, capsys):
        bad = tmp_path / "bad.txt"
        bad.write_text("0.8 0.1\n0.2 0.8\n")
        rc = main(["rmin", "--channel", str(bad), "--cloud-k", "1.0"])
        assert rc == 2
        assert "row 0" in capsys.readouterr().err

    def test_simulate_runs(self, bsc_file, capsys):
        rc = main([
            "simulate", "--channel", bsc_file, "--input-dist", "0.5,0.5",
            "--rate", "0.1", "--cloud-k", "1.0", "--blocklength", "6",
            "--instances", "5", "--seed", "1",
        ])
        assert rc == 0
        assert "error_probability" in capsys.readouterr().out

    def test_rmin(self, bsc_file, capsys):
        rc = main(["rmin", "--channel", bsc_file, "--cloud-k", "1.0"])
        assert rc == 0
        assert float(capsys.readouterr().out.split()[1]) == 0.0
