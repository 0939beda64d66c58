import csv
import json

import numpy as np
import pytest

from tpdicke.cli import main
from tpdicke.integrable import analytic_energies_sorted
from tpdicke.model import ModelParams


def run(*args):
    return main(list(args))


def read_csv(path):
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    return rows[0], rows[1:]


class TestSpectrum:
    def test_decoupled_energies_are_analytic_diagonal(self, tmp_path):
        out = tmp_path / "o"
        assert run("spectrum", "--omega0", "0.1", "--gamma", "0", "--j", "1",
                   "--nmax", "20", "--out-dir", str(out)) == 0
        header, rows = read_csv(out / "spectrum.csv")
        assert header == ["sector", "k", "energy", "epsilon"]
        for sector, k, energy, epsilon in rows:
            assert float(epsilon) == pytest.approx(float(energy) / 1.0)
            # omega n + omega0 m_z on the decoupled diagonal
            e = float(energy)
            n = round(e)
            assert e == pytest.approx(n + 0.1 * round((e - n) / 0.1), abs=1e-9)

    def test_integrable_levels_match_ladder(self, tmp_path):
        # zero-splitting run against the analytic ladder set
        out = tmp_path / "o"
        assert run("spectrum", "--omega", "1", "--omega0", "0", "--gamma", "0.3",
                   "--j", "2.5", "--nmax", "120", "--out-dir", str(out)) == 0
        _, rows = read_csv(out / "spectrum.csv")
        per_sector = {}
        for sector, k, energy, _ in rows:
            per_sector.setdefault(sector, []).append(float(energy))
        cut = min(max(v) for v in per_sector.values())
        union = np.sort([e for v in per_sector.values() for e in v if e <= cut])
        p = ModelParams(omega=1.0, omega0=0.0, gamma=0.3, two_j=5, n_max=120)
        ana = analytic_energies_sorted(p, float(union[-1]) + 2.0)
        dev = np.abs(union - ana[: union.size]) / np.maximum(1.0, np.abs(union))
        assert dev.max() <= 1e-8

    def test_manifest_hashes_outputs(self, tmp_path):
        out = tmp_path / "o"
        run("spectrum", "--omega0", "0.5", "--gamma", "0.1", "--j", "0.5",
            "--nmax", "10", "--out-dir", str(out))
        manifest = json.loads((out / "manifest.json").read_text())
        assert manifest["command"] == "spectrum"
        assert manifest["params"]["j"] == 0.5
        from tpdicke.output import file_sha256

        for entry in manifest["outputs"]:
            assert file_sha256(entry["path"]) == entry["sha256"]


class TestConfigHandling:
    def test_flags_override_file(self, tmp_path):
        cfg = tmp_path / "run.cfg"
        cfg.write_text("omega0 = 0.5\ngamma = 0.1\nj = 0.5\nnmax = 10\ndelta = 1e-6\n")
        out = tmp_path / "o"
        assert run("spectrum", "--config", str(cfg), "--nmax", "14",
                   "--out-dir", str(out)) == 0
        manifest = json.loads((out / "manifest.json").read_text())
        assert manifest["params"]["n_max"] == 14
        assert manifest["knobs"]["delta"] == 1e-6

    def test_unknown_key_is_exit_2(self, tmp_path):
        cfg = tmp_path / "run.cfg"
        cfg.write_text("omega0 = 0.5\nbogus = 1\n")
        assert run("spectrum", "--config", str(cfg), "--gamma", "0.1",
                   "--j", "0.5", "--nmax", "10") == 2

    def test_malformed_value_names_field(self, tmp_path, capsys):
        cfg = tmp_path / "run.cfg"
        cfg.write_text("omega0 = banana\ngamma = 0.1\nj = 0.5\nnmax = 10\n")
        assert run("spectrum", "--config", str(cfg)) == 2
        assert "omega0" in capsys.readouterr().err

    def test_missing_required_field(self, capsys):
        assert run("spectrum", "--gamma", "0.1", "--j", "1", "--nmax", "10") == 2
        assert "omega0" in capsys.readouterr().err

    def test_comments_and_blank_lines(self, tmp_path):
        cfg = tmp_path / "run.cfg"
        cfg.write_text("# run settings\nomega0 = 0.5\n\ngamma = 0.1  # coupling\nj = 0.5\nnmax = 10\n")
        assert run("spectrum", "--config", str(cfg), "--out-dir",
                   str(tmp_path / "o")) == 0

    def test_bad_j_rejected(self):
        assert run("spectrum", "--omega0", "1", "--gamma", "0.1", "--j", "0.3",
                   "--nmax", "10") == 2


class TestPeres:
    def test_integrable_recipe_with_overlays(self, tmp_path):
        out = tmp_path / "o"
        assert run("peres", "--omega", "1", "--omega0", "0", "--gamma", "0.3",
                   "--j", "2.5", "--nmax", "60", "--epsilon-perturb", "0.001",
                   "--op", "cdagc,jx,jx2", "--overlay", "--ncmax", "4",
                   "--out-dir", str(out)) == 0
        header, rows = read_csv(out / "peres_jx.csv")
        assert header == ["k", "epsilon", "value", "value_over_j", "value_over_j2",
                          "dominance"]
        # perturbed zero-splitting states pin Jx near half-integers
        for row in rows:
            v = float(row[2])
            assert abs(2 * v - round(2 * v)) < 1e-4
        oh, orows = read_csv(out / "overlay_jx2.csv")
        assert oh == ["curve_id", "n_c", "m_x_or_mx2", "epsilon"]
        assert {int(r[1]) for r in orows} == {0, 1, 2, 3, 4}
        assert (out / "overlay_cdagc.csv").exists()
        assert (out / "peres_cdagc.csv").exists()

    def test_broken_integrability_recipe(self, tmp_path):
        # omega0 != 0 numerics with zero-splitting overlays
        out = tmp_path / "o"
        assert run("peres", "--omega0", "0.05", "--gamma", "0.3", "--j", "2.5",
                   "--nmax", "60", "--op", "jx2", "--overlay", "--sector", "plus1",
                   "--out-dir", str(out)) == 0
        assert (out / "overlay_jx2.csv").exists()

    def test_empty_op_list_is_error(self):
        assert run("peres", "--omega0", "0", "--gamma", "0.3", "--j", "1",
                   "--nmax", "20") == 2

    def test_unknown_op_is_error(self):
        assert run("peres", "--omega0", "0", "--gamma", "0.3", "--j", "1",
                   "--nmax", "20", "--op", "jy") == 2


class TestRatioSpacing:
    def test_four_sectors_plus_average(self, tmp_path):
        out = tmp_path / "o"
        assert run("ratio", "--omega0", "2", "--gamma", "0.3", "--j", "5",
                   "--nmax", "200", "--window", "80", "--stride", "40",
                   "--out-dir", str(out)) == 0
        _, rows = read_csv(out / "ratio.csv")
        tags = {row[3] for row in rows}
        assert tags == {"+1", "+i", "-1", "-i", "avg"}
        for row in rows:
            assert 0.0 <= float(row[1]) <= 1.0

    def test_spacing_reports_a2(self, tmp_path, capsys):
        out = tmp_path / "o"
        assert run("spacing", "--omega0", "2", "--gamma", "0.3", "--j", "5",
                   "--nmax", "200", "--energy", "8", "--window", "150",
                   "--out-dir", str(out)) == 0
        header, rows = read_csv(out / "spacing_hist.csv")
        assert header == ["bin_left", "bin_right", "density", "goe_pdf_mid",
                          "poisson_pdf_mid"]
        area = sum(
            (float(r[1]) - float(r[0])) * float(r[2]) for r in rows
        )
        assert area == pytest.approx(1.0, abs=1e-9)
        manifest = json.loads((out / "manifest.json").read_text())
        assert "A2_goe" in manifest["results"]

    def test_window_exceeding_spectrum_is_exit_4(self, tmp_path):
        assert run("spacing", "--omega0", "2", "--gamma", "0.3", "--j", "0.5",
                   "--nmax", "30", "--energy", "1", "--window", "400",
                   "--out-dir", str(tmp_path / "o")) == 4


class TestPoincare:
    def test_seeded_rerun_is_byte_identical(self, tmp_path):
        args = ("poincare", "--omega0", "2", "--gamma", "0.3", "--energy", "-1",
                "--tmax", "60", "--ntraj", "2", "--seed", "3")
        assert run(*args, "--out-dir", str(tmp_path / "a")) == 0
        assert run(*args, "--out-dir", str(tmp_path / "b")) == 0
        for name in ("section.csv", "boundary_energy.csv", "boundary_disk.csv"):
            assert (tmp_path / "a" / name).read_bytes() == (
                tmp_path / "b" / name
            ).read_bytes()

    def test_section_schema_and_boundary(self, tmp_path):
        out = tmp_path / "o"
        assert run("poincare", "--omega0", "2", "--gamma", "0.3", "--energy", "-1",
                   "--tmax", "40", "--ntraj", "2", "--seed", "1",
                   "--out-dir", str(out)) == 0
        header, rows = read_csv(out / "section.csv")
        assert header == ["trajectory_id", "crossing_index", "t", "Q", "P"]
        assert len(rows) > 4
        bh, brows = read_csv(out / "boundary_energy.csv")
        assert bh == ["theta_index", "Q", "P"]
        radii = [np.hypot(float(r[1]), float(r[2])) for r in brows]
        assert max(abs(r - 1.0) for r in radii) < 1e-6  # radius 1 at eps=-1
        manifest = json.loads((out / "manifest.json").read_text())
        assert manifest["knobs"]["surface"] == "p=0, q>0"

    def test_below_ground_shell_is_exit_4(self, tmp_path):
        assert run("poincare", "--omega0", "2", "--gamma", "0.3", "--energy", "-3",
                   "--out-dir", str(tmp_path / "o")) == 4


class TestIntegrableCheck:
    def test_integrable_deviation_small(self, tmp_path, capsys):
        out = tmp_path / "o"
        assert run("integrable-check", "--omega0", "0", "--gamma", "0.2",
                   "--j", "2.5", "--nmax", "100", "--out-dir", str(out)) == 0
        manifest = json.loads((out / "manifest.json").read_text())
        assert manifest["results"]["max_rel_dev"] <= 1e-8

    def test_broken_integrability_deviates_low_in_spectrum(self, tmp_path):
        out = tmp_path / "o"
        assert run("integrable-check", "--omega0", "0.05", "--gamma", "0.3",
                   "--j", "2.5", "--nmax", "100", "--out-dir", str(out)) == 0
        _, rows = read_csv(out / "deviations.csv")
        dev = np.array([float(r[3]) for r in rows])
        n = len(dev)
        assert dev.max() > 1e-4  # integrability is broken
        # deviations concentrate in the lower spectrum
        assert dev[: n // 4].max() > dev[-n // 4 :].max()

    def test_collapse_is_exit_4(self, tmp_path):
        assert run("integrable-check", "--omega0", "0", "--gamma", "0.5",
                   "--j", "2.5", "--nmax", "50",
                   "--out-dir", str(tmp_path / "o")) == 4


def test_seventeen_significant_digits(tmp_path):
    out = tmp_path / "o"
    run("spectrum", "--omega0", "0.333333333333", "--gamma", "0.1", "--j", "0.5",
        "--nmax", "10", "--out-dir", str(out))
    _, rows = read_csv(out / "spectrum.csv")
    mantissas = [row[2].lstrip("-0.").replace(".", "").rstrip("e+-0123456789") or
                 row[2].lstrip("-").replace(".", "").split("e")[0]
                 for row in rows]
    assert any(len(m.lstrip("0")) >= 16 for m in mantissas)
