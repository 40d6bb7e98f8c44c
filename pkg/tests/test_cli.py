import csv

import pytest

from frkit.cli import main


def run_cli(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def parse_csv(text):
    rows = list(csv.reader(text.strip().split("\n")))
    return rows[0], rows[1:]


class TestFr:
    def test_torus_const1_certified(self, capsys):
        code, out, err = run_cli(capsys, "fr", "--setting", "torus", "--fn", "const1", "--n", "8")
        assert code == 0
        header, rows = parse_csv(out)
        assert header[:9] == ["N", "A", "B", "C", "r", "fr_measured", "slack", "certified", "provenance"]
        row = rows[0]
        assert row[0] == "8"
        assert float(row[5]) == pytest.approx(1.0, abs=1e-10)
        assert float(row[6]) >= 0.0
        assert row[7] == "true"
        assert "warning" not in err

    def test_noncertified_warns_but_exits_zero(self, capsys):
        code, out, err = run_cli(capsys, "fr", "--setting", "torus", "--fn", "cc_half", "--n", "64")
        assert code == 0
        assert "not certified" in err
        _, rows = parse_csv(out)
        assert rows[0][7] == "false"

    def test_sphere_fr(self, capsys):
        code, out, _ = run_cli(capsys, "fr", "--setting", "sphere", "--fn", "decay_e", "--l", "8")
        assert code == 0
        _, rows = parse_csv(out)
        assert float(rows[0][6]) >= 0.0  # slack

    def test_unknown_fn_is_config_error(self, capsys):
        code, _, err = run_cli(capsys, "fr", "--fn", "nope", "--n", "8")
        assert code == 1
        assert "config error" in err

    def test_missing_n_is_config_error(self, capsys):
        code, _, err = run_cli(capsys, "fr", "--setting", "torus", "--fn", "const1")
        assert code == 1


class TestRecover:
    def test_constant_exact_fit(self, capsys):
        code, out, _ = run_cli(
            capsys, "recover", "--setting", "torus", "--fn", "const1", "--n", "8",
            "--eps", "0.1", "--trials", "2", "--seed", "5", "--exact-fit",
        )
        assert code == 0
        header, rows = parse_csv(out)
        idx = header.index("rel_error")
        assert len(rows) == 2
        for row in rows:
            assert float(row[idx]) <= 1e-8

    def test_sphere_y00(self, capsys):
        code, out, _ = run_cli(
            capsys, "recover", "--setting", "sphere", "--fn", "y00", "--l", "8",
            "--eps", "0.1", "--c-univ", "0.01", "--trials", "1", "--seed", "1",
        )
        assert code == 0

    def test_bad_eps_config_error(self, capsys):
        code, _, err = run_cli(
            capsys, "recover", "--setting", "torus", "--fn", "const1", "--n", "8",
            "--eps", "0.6",
        )
        assert code == 1
        assert "eps" in err


class TestSweep:
    def test_rn_vs_logn_slope(self, capsys):
        ns = [str(2**k) for k in range(6, 14)]
        code, out, _ = run_cli(capsys, "sweep", "--mode", "rn_vs_logn", "--fn", "const1", "--n", *ns)
        assert code == 0
        header, rows = parse_csv(out)
        ratio = float(rows[0][header.index("slope_ratio")])
        # const1 has C2/L2 = 1, so the fitted slope should sit at 16 pi^2
        assert ratio == pytest.approx(1.0, abs=0.05)

    def test_empty_grid_rejected(self, capsys):
        code, _, err = run_cli(capsys, "sweep", "--mode", "rn_vs_logn", "--fn", "const1")
        assert code == 1

    def test_rn_vs_logn_sphere(self, capsys):
        code, out, _ = run_cli(
            capsys, "sweep", "--mode", "rn_vs_logn", "--setting", "sphere",
            "--fn", "decay_e", "--l", "4", "8", "16",
        )
        assert code == 0
        header, rows = parse_csv(out)
        assert len(rows) == 3
        ratio = float(rows[-1][header.index("slope_ratio")])
        # slope of r_L against ln L tracks C0 * C2/L2 once the profile saturates
        assert 0.5 <= ratio <= 1.5

    def test_recover_sweep_reproducible_bytes(self, tmp_path, capsys):
        out_a, out_b = tmp_path / "a.csv", tmp_path / "b.csv"
        args = [
            "sweep", "--mode", "recover", "--setting", "torus", "--fn", "cc_half",
            "--n", "16", "--eps", "0.1", "--c-univ", "0.05", "--trials", "2",
            "--seed", "77", "--allow-uncertified",
        ]
        code_a, _, _ = run_cli(capsys, *args, "--out", str(out_a))
        code_b, _, _ = run_cli(capsys, *args, "--out", str(out_b), "--workers", "2")
        assert code_a == code_b == 0
        assert out_a.read_bytes() == out_b.read_bytes()


class TestQuadratureCheck:
    def test_reports_small_deviations(self, capsys):
        code, out, _ = run_cli(capsys, "quadrature-check", "--l", "2", "4")
        assert code == 0
        header, rows = parse_csv(out)
        for row in rows:
            assert float(row[header.index("gram_max_dev")]) < 1e-10
            assert float(row[header.index("roundtrip_rel_err")]) < 1e-10


class TestConfigFile:
    def test_config_provides_defaults_and_flags_override(self, tmp_path, capsys):
        cfg = tmp_path / "exp.cfg"
        cfg.write_text("fn = const1\nn = 8 16\nsetting = torus\n")
        code, out, _ = run_cli(capsys, "fr", "--config", str(cfg))
        assert code == 0
        _, rows = parse_csv(out)
        assert [r[0] for r in rows] == ["8", "16"]
        # explicit flag beats the file
        code, out, _ = run_cli(capsys, "fr", "--config", str(cfg), "--n", "32")
        _, rows = parse_csv(out)
        assert [r[0] for r in rows] == ["32"]

    def test_unknown_config_key(self, tmp_path, capsys):
        cfg = tmp_path / "exp.cfg"
        cfg.write_text("bogus = 1\n")
        code, _, err = run_cli(capsys, "fr", "--config", str(cfg), "--fn", "const1", "--n", "8")
        assert code == 1
        assert "bogus" in err

    def test_identical_config_same_hash_column(self, tmp_path, capsys):
        args = ["fr", "--setting", "torus", "--fn", "const1", "--n", "8"]
        _, out_a, _ = run_cli(capsys, *args)
        _, out_b, _ = run_cli(capsys, *args)
        assert out_a == out_b
