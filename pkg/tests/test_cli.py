"""
Tests for the command line interface
"""

import numpy as np
import pytest

from cli import main
from schemas import CertificateKind, MeasurementVector
from services.serialization import artifact_serializer
from tests.conftest import sign_distance
from utils.exceptions import (EXIT_INCONSISTENT, EXIT_OK, EXIT_REFUTED, EXIT_USAGE)


@pytest.fixture
def constructed(tmp_path):
    """Family and recipe files for M=4, dims 3,2,2,1,2,2,1, seed 7"""
    family, recipe = tmp_path / "family.sff", tmp_path / "family.srp"
    code = main(["construct", "--ambient", "4", "--dims", "3,2,2,1,2,2,1", "--seed", "7",
                 "--out", str(family), "--recipe", str(recipe)])
    assert code == EXIT_OK
    return family, recipe


class TestConstruct:
    """Test construction commands"""

    @pytest.mark.integration
    def test_construct_writes_artifacts(self, constructed):
        """Test that construct writes a family and a recipe"""
        family_path, recipe_path = constructed
        family = artifact_serializer.read_family(family_path)

        assert family.dims == (3, 2, 2, 1, 2, 2, 1)
        assert artifact_serializer.read_recipe(recipe_path).ambient == 4

    @pytest.mark.integration
    def test_construct_is_reproducible(self, constructed, tmp_path):
        """Test that the same seed writes identical files"""
        family_path, _ = constructed
        again = tmp_path / "again.sff"
        main(["construct", "--ambient", "4", "--dims", "3,2,2,1,2,2,1", "--seed", "7",
              "--out", str(again), "--recipe", str(tmp_path / "again.srp")])

        assert again.read_text() == family_path.read_text()

    @pytest.mark.integration
    def test_construct_complex(self, tmp_path):
        """Test the complex construction command"""
        out = tmp_path / "complex.sff"
        code = main(["construct-complex", "--ambient", "2", "--dims", "1,1,1,1,1", "--out", str(out)])

        assert code == EXIT_OK
        assert artifact_serializer.read_family(out).count == 5

    @pytest.mark.integration
    @pytest.mark.parametrize("argv", [
        ["construct", "--ambient", "3", "--dims", "1,1,1", "--out", "f", "--recipe", "r"],
        ["construct", "--ambient", "3", "--dims", "1,a,1", "--out", "f", "--recipe", "r"],
        ["construct", "--ambient", "3", "--dims", "1,1,1,1,1", "--seed", "-4", "--out", "f",
         "--recipe", "r"],
        ["frobnicate"],
        [],
    ])
    def test_usage_errors(self, argv, tmp_path, monkeypatch):
        """Test that bad arguments exit with code 1"""
        monkeypatch.chdir(tmp_path)

        assert main(argv) == EXIT_USAGE


class TestPipeline:
    """Test measure and reconstruct through files"""

    @pytest.mark.integration
    def test_measure_and_reconstruct(self, constructed, tmp_path):
        """Test that the signal is recovered up to sign"""
        family_path, recipe_path = constructed
        signal, meas, out = tmp_path / "x.ssf", tmp_path / "x.smf", tmp_path / "y.ssf"

        assert main(["signal", "--ambient", "4", "--seed", "11", "--out", str(signal)]) == EXIT_OK
        assert main(["measure", "--family", str(family_path), "--signal-in", str(signal),
                     "--out", str(meas)]) == EXIT_OK
        assert main(["reconstruct", "--recipe", str(recipe_path), "--meas", str(meas),
                     "--out", str(out)]) == EXIT_OK
        x = artifact_serializer.read_signal(signal)
        y = artifact_serializer.read_signal(out)
        assert sign_distance(y, x) <= 1e-9

    @pytest.mark.integration
    def test_inconsistent_measurements(self, constructed, tmp_path, capsys):
        """Test that corrupted measurements exit with code 4"""
        _, recipe_path = constructed
        meas = tmp_path / "bad.smf"
        artifact_serializer.write_measurements(
            MeasurementVector(values=[1.0, 0.2, 0.3, 0.1, 0.4, 5.0, 0.2]), meas)
        code = main(["reconstruct", "--recipe", str(recipe_path), "--meas", str(meas),
                     "--out", str(tmp_path / "y.ssf")])

        assert code == EXIT_INCONSISTENT
        assert "error [InconsistencyError]" in capsys.readouterr().err

    @pytest.mark.integration
    def test_hyperplane_pipeline(self, tmp_path):
        """Test reconstruction through a hyperplane file"""
        family, planes = tmp_path / "planes.sff", tmp_path / "planes.shf"
        signal, meas, out = tmp_path / "x.ssf", tmp_path / "x.smf", tmp_path / "y.ssf"

        assert main(["construct-hyperplanes", "--ambient", "4", "--count", "7", "--seed", "3",
                     "--out", str(family), "--recipe", str(planes)]) == EXIT_OK
        main(["signal", "--ambient", "4", "--seed", "5", "--out", str(signal)])
        main(["measure", "--family", str(family), "--signal-in", str(signal), "--out", str(meas)])

        assert main(["reconstruct", "--recipe", str(planes), "--meas", str(meas),
                     "--out", str(out)]) == EXIT_OK
        assert sign_distance(artifact_serializer.read_signal(out),
                             artifact_serializer.read_signal(signal)) <= 1e-9

    @pytest.mark.integration
    def test_malformed_file(self, constructed, tmp_path, capsys):
        """Test that unreadable measurement files exit with code 1"""
        _, recipe_path = constructed
        meas = tmp_path / "bad.smf"
        meas.write_text("SMF 1\ncount 7\n1 2 3\n")
        code = main(["reconstruct", "--recipe", str(recipe_path), "--meas", str(meas),
                     "--out", str(tmp_path / "y.ssf")])

        assert code == EXIT_USAGE
        assert "error [FileFormatError]" in capsys.readouterr().err


class TestVerify:
    """Test the verify command"""

    @pytest.mark.integration
    def test_structured_certificate(self, constructed, tmp_path):
        """Test that a family with its recipe is certified"""
        family_path, recipe_path = constructed
        report = tmp_path / "report.srf"
        code = main(["verify", "--family", str(family_path), "--recipe", str(recipe_path),
                     "--report", str(report)])

        assert code == EXIT_OK
        assert artifact_serializer.read_report(report).kind == CertificateKind.STRUCTURED

    @pytest.mark.integration
    def test_refuted_complements(self, r3_families, tmp_path):
        """Test that the complements family is refuted with exit code 2"""
        _, complements = r3_families
        family_path, report = tmp_path / "complements.sff", tmp_path / "report.srf"
        artifact_serializer.write_family(complements, family_path)
        code = main(["verify", "--family", str(family_path), "--mode", "witness",
                     "--report", str(report)])
        certificate = artifact_serializer.read_report(report)

        assert code == EXIT_REFUTED
        assert certificate.kind == CertificateKind.REFUTED
        assert certificate.witness_pair.mismatch <= 1e-8

    @pytest.mark.integration
    def test_witness_mode_without_witness(self, r3_families, tmp_path):
        """Test that witness mode exits 0 when nothing is found"""
        originals, _ = r3_families
        family_path = tmp_path / "originals.sff"
        artifact_serializer.write_family(originals, family_path)

        assert main(["verify", "--family", str(family_path), "--mode", "witness",
                     "--report", str(tmp_path / "report.srf")]) == EXIT_OK


class TestDemos:
    """Test the demonstration transcripts"""

    @pytest.mark.integration
    def test_r3_example(self, capsys):
        """Test the certified R^3 example"""
        assert main(["demo", "r3-example"]) == EXIT_OK
        assert "det(A)" in capsys.readouterr().out

    @pytest.mark.integration
    def test_r3_counterexample(self, capsys):
        """Test the complements counterexample transcript"""
        assert main(["demo", "r3-counterexample"]) == EXIT_OK
        out = capsys.readouterr().out
        assert "Q1 + Q2 − Q3" in out
        assert "falla" in out

    @pytest.mark.integration
    def test_r3_counterexample_artifacts(self, tmp_path):
        """Test that the counterexample writes families, recipe and reports"""
        out = tmp_path / "r3"
        assert main(["demo", "r3-counterexample", "--out-dir", str(out)]) == EXIT_OK

        originals = artifact_serializer.read_family(out / "originals.sff")
        complements = artifact_serializer.read_family(out / "complements.sff")
        recipe = artifact_serializer.read_recipe(out / "originals.srp")
        refutation = artifact_serializer.read_report(out / "complements.srf")

        assert originals.dims == (2, 2, 1, 1, 1)
        assert complements.dims == (1, 1, 2, 2, 2)
        assert recipe.ambient == 3
        assert artifact_serializer.read_report(out / "originals.srf").kind == CertificateKind.STRUCTURED
        assert refutation.kind == CertificateKind.REFUTED
        assert refutation.witness_pair.mismatch <= 1e-8
        u, v = refutation.witness_pair.u, refutation.witness_pair.v
        assert abs(u @ v) <= 1e-10

    @pytest.mark.integration
    def test_r3_example_artifacts(self, tmp_path):
        """Test that the certified example writes a family the verify command accepts"""
        assert main(["demo", "r3-example", "--out-dir", str(tmp_path)]) == EXIT_OK

        assert main(["verify", "--family", str(tmp_path / "family.sff"),
                     "--recipe", str(tmp_path / "family.srp"),
                     "--report", str(tmp_path / "report.srf")]) == EXIT_OK

    @pytest.mark.integration
    def test_parseval_hyperplanes(self, capsys):
        """Test the Parseval hyperplane transcript"""
        assert main(["demo", "parseval-hyperplanes", "--seed", "4"]) == EXIT_OK
        assert "Parseval=True" in capsys.readouterr().out

    @pytest.mark.unit
    def test_signal_is_seeded(self, tmp_path):
        """Test that signal files depend only on the seed"""
        a, b = tmp_path / "a.ssf", tmp_path / "b.ssf"
        main(["signal", "--ambient", "5", "--seed", "9", "--out", str(a)])
        main(["signal", "--ambient", "5", "--seed", "9", "--out", str(b)])

        assert np.array_equal(artifact_serializer.read_signal(a), artifact_serializer.read_signal(b))
