"""
Interfaz de línea de comandos: construcción, verificación, medida y
reconstrucción con artefactos de texto reproducibles.

Códigos de salida: 0 certificado / sin testigo, 1 error de uso o de dominio,
2 refutado con testigo, 3 no concluyente, 4 medidas inconsistentes.
"""

import argparse
import logging
import sys
from pathlib import Path
from typing import List, Optional

import numpy as np

from config import IsolatedSettings, apply_settings, settings
from schemas import CertificateKind, Certificate, Frame
from services.family_builder import (build_complex_family, build_hyperplane_family,
                                     build_real_family, family_from_recipe,
                                     hyperplane_family_from_frame, r3_counterexample_family,
                                     r3_example_recipe, r3_parseval_example)
from services.frames import is_full_spark, is_parseval
from services.linalg_core import RngState
from services.reconstruct import reconstruct, reconstruct_hyperplanes
from services.serialization import HYPERPLANE_HEADER, RECIPE_HEADER, artifact_serializer
from services.verifier import (certify_structured, lift_matrix, lift_operator, measure,
                               random_basis_complement_check, verify_family)
from utils.exceptions import (EXIT_INCONCLUSIVE, EXIT_OK, EXIT_REFUTED, EXIT_USAGE, FileFormatError,
                              SubspaceRetrievalError, create_diagnostic, exit_code_for)
from utils.logging_config import setup_logging
from utils.validators import parse_int_list, validate_seed

logger = logging.getLogger(__name__)

DEMOS = ("r3-example", "r3-counterexample", "parseval-hyperplanes")


class _ArgumentParser(argparse.ArgumentParser):
    """Los errores de uso salen con código 1"""

    def error(self, message: str):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"error [UsageError]: {message}\n")


def _seed(text: str) -> int:
    try:
        return validate_seed(int(text))
    except (ValueError, SubspaceRetrievalError) as e:
        raise argparse.ArgumentTypeError(str(e)) from None


def build_parser() -> argparse.ArgumentParser:
    parser = _ArgumentParser(prog="subspace-retrieval",
                             description="Recuperación de fase a partir de normas de proyecciones")
    parser.add_argument("--log-level", default=None,
                        help="Nivel de logging (DEBUG, INFO, WARNING, ERROR)")
    commands = parser.add_subparsers(dest="command", required=True, parser_class=_ArgumentParser)

    construct = commands.add_parser("construct", help="Familia real certificada de 2M-1 subespacios")
    construct.add_argument("--ambient", type=int, required=True)
    construct.add_argument("--dims", required=True, help="d1,...,d_{2M-1}")
    construct.add_argument("--seed", type=_seed, default=settings.DEFAULT_SEED)
    construct.add_argument("--out", required=True)
    construct.add_argument("--recipe", required=True)

    construct_complex = commands.add_parser("construct-complex",
                                            help="Familia compleja de 4M-3 subespacios")
    construct_complex.add_argument("--ambient", type=int, required=True)
    construct_complex.add_argument("--dims", required=True, help="d1,...,d_{4M-3}")
    construct_complex.add_argument("--seed", type=_seed, default=settings.DEFAULT_SEED)
    construct_complex.add_argument("--out", required=True)

    hyperplanes = commands.add_parser("construct-hyperplanes",
                                      help="Familia de hiperplanos desde un frame de Parseval")
    hyperplanes.add_argument("--ambient", type=int, required=True)
    hyperplanes.add_argument("--count", type=int, required=True)
    hyperplanes.add_argument("--seed", type=_seed, default=settings.DEFAULT_SEED)
    hyperplanes.add_argument("--out", required=True)
    hyperplanes.add_argument("--recipe", help="Archivo SHF para la reconstrucción")

    verify = commands.add_parser("verify", help="Certificado, búsqueda de testigos o evidencia empírica")
    verify.add_argument("--family", required=True)
    verify.add_argument("--mode", choices=("certificate", "witness", "empirical"),
                        default="certificate")
    verify.add_argument("--seed", type=_seed, default=settings.DEFAULT_SEED)
    verify.add_argument("--report", required=True)
    verify.add_argument("--recipe", help="Receta SRP de la familia (certificado estructurado)")

    measure_cmd = commands.add_parser("measure", help="Medidas ‖P_n x‖² de una señal")
    measure_cmd.add_argument("--family", required=True)
    measure_cmd.add_argument("--signal-in", required=True)
    measure_cmd.add_argument("--out", required=True)

    reconstruct_cmd = commands.add_parser("reconstruct", help="Recupera la señal salvo signo")
    reconstruct_cmd.add_argument("--recipe", required=True, help="Receta SRP o archivo SHF")
    reconstruct_cmd.add_argument("--meas", required=True)
    reconstruct_cmd.add_argument("--out", required=True)

    signal = commands.add_parser("signal", help="Señal gaussiana con semilla")
    signal.add_argument("--ambient", type=int, required=True)
    signal.add_argument("--seed", type=_seed, default=settings.DEFAULT_SEED)
    signal.add_argument("--out", required=True)

    demo = commands.add_parser("demo", help="Ejemplos en R^3 con transcripción")
    demo.add_argument("name", choices=DEMOS)
    demo.add_argument("--seed", type=_seed, default=None)
    demo.add_argument("--out-dir", help="Directorio para los artefactos de la demostración")
    return parser


# ---------------------------------------------------------------------------
# Subcomandos
# ---------------------------------------------------------------------------

def _describe(certificate: Certificate) -> None:
    print(f"📋 Resultado: {certificate.kind.value}"
          + (" (heurístico)" if certificate.heuristic else ""))
    for reason in certificate.reasons:
        print(f"   • {reason}")
    if certificate.witness_pair is not None:
        print(f"🎯 Testigo ({certificate.witness_pair.source}), "
              f"discrepancia {certificate.witness_pair.mismatch:.3e}")


def _verify_exit_code(certificate: Certificate, mode: str) -> int:
    if certificate.kind == CertificateKind.STRUCTURED:
        return EXIT_OK
    if certificate.kind == CertificateKind.REFUTED:
        return EXIT_REFUTED
    if certificate.kind == CertificateKind.EMPIRICAL:
        return EXIT_OK if certificate.empirical is None or certificate.empirical.passed else EXIT_INCONCLUSIVE
    return EXIT_OK if mode == "witness" else EXIT_INCONCLUSIVE


def cmd_construct(args) -> int:
    dims = parse_int_list(args.dims, "dims")
    family, recipe = build_real_family(args.ambient, dims, RngState(args.seed))
    certificate = certify_structured(recipe)
    artifact_serializer.write_family(family, args.out)
    artifact_serializer.write_recipe(recipe, args.recipe)
    _describe(certificate)
    return EXIT_OK if certificate.kind == CertificateKind.STRUCTURED else EXIT_INCONCLUSIVE


def cmd_construct_complex(args) -> int:
    dims = parse_int_list(args.dims, "dims")
    family = build_complex_family(args.ambient, dims, RngState(args.seed))
    artifact_serializer.write_family(family, args.out)
    print(f"🏗️ Familia compleja de {family.count} subespacios en C^{family.ambient}")
    return EXIT_OK


def cmd_construct_hyperplanes(args) -> int:
    hf = build_hyperplane_family(args.ambient, args.count, RngState(args.seed))
    artifact_serializer.write_family(hf.family, args.out)
    if args.recipe:
        artifact_serializer.write_hyperplanes(hf, args.recipe)
    print(f"🏗️ {hf.family.count} hiperplanos en R^{hf.ambient}, Σa_n = {hf.weights.sum():.6f}")
    return EXIT_OK


def cmd_verify(args) -> int:
    family = artifact_serializer.read_family(args.family)
    recipe = artifact_serializer.read_recipe(args.recipe) if args.recipe else None
    certificate = verify_family(family, args.mode, RngState(args.seed), recipe=recipe)
    artifact_serializer.write_report(certificate, args.report)
    _describe(certificate)
    return _verify_exit_code(certificate, args.mode)


def cmd_measure(args) -> int:
    family = artifact_serializer.read_family(args.family)
    signal = artifact_serializer.read_signal(args.signal_in)
    artifact_serializer.write_measurements(measure(family, signal), args.out)
    return EXIT_OK


def cmd_reconstruct(args) -> int:
    meas = artifact_serializer.read_measurements(args.meas)
    header = artifact_serializer.detect_format(args.recipe)
    if header == RECIPE_HEADER:
        result = reconstruct(artifact_serializer.read_recipe(args.recipe), meas)
    elif header == HYPERPLANE_HEADER:
        result = reconstruct_hyperplanes(artifact_serializer.read_hyperplanes(args.recipe), meas)
    else:
        raise FileFormatError(f"{args.recipe}: se esperaba una receta o un archivo de hiperplanos")
    artifact_serializer.write_signal(result.signal, args.out)
    print(f"🔁 Señal reconstruida (residuo {result.residual:.3e})")
    return EXIT_OK


def cmd_signal(args) -> int:
    artifact_serializer.write_signal(RngState(args.seed).normal(args.ambient), args.out)
    return EXIT_OK


# ---------------------------------------------------------------------------
# Demostraciones
# ---------------------------------------------------------------------------

def _demo_rng(args) -> RngState:
    return RngState(settings.R3_EXAMPLE_SEED if args.seed is None else args.seed)


def _artifact_dir(args) -> Optional[Path]:
    if args.out_dir is None:
        return None
    directory = Path(args.out_dir)
    directory.mkdir(parents=True, exist_ok=True)
    return directory


def _round_trip(label: str, measure_family, solve, rng: RngState, trials: int = 20) -> float:
    worst = 0.0
    for _ in range(trials):
        x = rng.normal(measure_family.ambient)
        recovered = solve(measure(measure_family, x)).signal
        worst = max(worst, min(np.linalg.norm(recovered - x), np.linalg.norm(recovered + x))
                    / np.linalg.norm(x))
    print(f"🔁 {label}: {trials} señales reconstruidas, error relativo máximo {worst:.2e}")
    return worst


def demo_r3_example(args) -> int:
    recipe = r3_example_recipe(_demo_rng(args))
    certificate = certify_structured(recipe)
    print("📐 Ejemplo en R^3: W1=span{φ1,φ3}, W2=span{φ2,φ3}, W3=span{φ3}, W4=span{ψ1}, W5=span{ψ2}")
    print(f"   det(A) = {certificate.design_determinants[0]}, det(B) = {certificate.design_determinants[1]}")
    _describe(certificate)
    family = family_from_recipe(recipe)
    directory = _artifact_dir(args)
    if directory is not None:
        artifact_serializer.write_family(family, directory / "family.sff")
        artifact_serializer.write_recipe(recipe, directory / "family.srp")
        artifact_serializer.write_report(certificate, directory / "family.srf")
    _round_trip("Reconstrucción", family, lambda m: reconstruct(recipe, m), _demo_rng(args).child(9))
    return EXIT_OK if certificate.kind == CertificateKind.STRUCTURED else EXIT_INCONCLUSIVE


def demo_r3_counterexample(args) -> int:
    rng = _demo_rng(args)
    recipe = r3_example_recipe(rng.child(0))
    originals, complements = r3_counterexample_family(rng.child(0))
    certificate = certify_structured(recipe)
    print("📐 {W_n}: familia del ejemplo en R^3")
    _describe(certificate)

    q = complements.projections()
    gap = float(np.max(np.abs(q[0] + q[1] - q[2])))
    print(f"🧮 Q1 + Q2 − Q3: máximo {gap:.2e}")

    print("📐 {W_n^⊥}: complementos")
    refutation = verify_family(complements, "witness", rng.child(1))
    directory = _artifact_dir(args)
    if directory is not None:
        artifact_serializer.write_family(originals, directory / "originals.sff")
        artifact_serializer.write_recipe(recipe, directory / "originals.srp")
        artifact_serializer.write_report(certificate, directory / "originals.srf")
        artifact_serializer.write_family(complements, directory / "complements.sff")
        artifact_serializer.write_report(refutation, directory / "complements.srf")
        print(f"💾 Artefactos escritos en {args.out_dir}")

    pair = refutation.witness_pair
    if refutation.kind != CertificateKind.REFUTED or pair is None:
        print("⚠️ No se encontró testigo")
        return EXIT_INCONCLUSIVE
    u, v = pair.u, pair.v
    witness = refutation.witness_matrix
    if witness is not None:
        residual = float(np.linalg.norm(lift_operator(complements).matrix @ lift_matrix(witness.matrix)))
        print(f"🎯 Testigo de rango {witness.rank} ({witness.strategy}), ‖F(C)‖ = {residual:.2e}")
    print(f"   u = {np.array2string(u, precision=6)}")
    print(f"   v = {np.array2string(v, precision=6)}")
    mismatch = float(np.max(np.abs(measure(complements, u).values - measure(complements, v).values)))
    print(f"   max |‖Q_n u‖² − ‖Q_n v‖²| = {mismatch:.2e}")
    adapted_ok = random_basis_complement_check(complements, rng.child(2), trials=0, witness=(u, v))
    print(f"🧪 Bases adaptadas al testigo: propiedad del complemento "
          f"{'se conserva' if adapted_ok else 'falla'}")

    refuted = not adapted_ok and gap <= 1e-12
    return EXIT_OK if certificate.kind == CertificateKind.STRUCTURED and refuted else EXIT_INCONCLUSIVE


def demo_parseval_hyperplanes(args) -> int:
    frame: Frame = r3_parseval_example()
    parseval = is_parseval(frame, 1e-12)
    spark = is_full_spark(frame)
    print(f"📐 Frame de Parseval en R^3 con 5 vectores: Parseval={parseval}, full spark={spark}")
    hf = hyperplane_family_from_frame(frame)
    print(f"   pesos a_n = {np.array2string(hf.weights, precision=6)}, Σa_n = {hf.weights.sum():.6f}")
    worst = _round_trip("Reconstrucción desde hiperplanos", hf.family,
                        lambda m: reconstruct_hyperplanes(hf, m), _demo_rng(args).child(9))
    return EXIT_OK if parseval and spark and worst <= 1e-8 else EXIT_INCONCLUSIVE


DEMO_HANDLERS = {
    "r3-example": demo_r3_example,
    "r3-counterexample": demo_r3_counterexample,
    "parseval-hyperplanes": demo_parseval_hyperplanes,
}

COMMAND_HANDLERS = {
    "construct": cmd_construct,
    "construct-complex": cmd_construct_complex,
    "construct-hyperplanes": cmd_construct_hyperplanes,
    "verify": cmd_verify,
    "measure": cmd_measure,
    "reconstruct": cmd_reconstruct,
    "signal": cmd_signal,
    "demo": lambda args: DEMO_HANDLERS[args.name](args),
}


def main(argv: Optional[List[str]] = None) -> int:
    """Punto de entrada; devuelve el código de salida"""
    apply_settings(IsolatedSettings())
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)

    try:
        setup_logging(level=args.log_level or settings.log_level())
    except ValueError as e:
        print(create_diagnostic(e, "UsageError"), file=sys.stderr)
        return EXIT_USAGE

    try:
        return COMMAND_HANDLERS[args.command](args)
    except SubspaceRetrievalError as e:
        logger.error(f"❌ {e}")
        print(create_diagnostic(e), file=sys.stderr)
        return exit_code_for(e)
    except ValueError as e:
        print(create_diagnostic(e, "DomainError"), file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
