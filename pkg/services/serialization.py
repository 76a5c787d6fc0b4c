"""
Formatos de texto por líneas para familias, recetas, hiperplanos, medidas,
señales e informes. '#' inicia un comentario; los reales se escriben con 17
cifras significativas y los complejos intercalan parte real e imaginaria.
"""

import logging
from pathlib import Path
from typing import Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np

from schemas import (Certificate, CertificateKind, ComplementReport, EmpiricalReport,
                     FieldKind, Frame, HyperplaneFamily, MeasurementVector, Recipe, Subspace,
                     SubspaceFamily, WitnessMatrix, WitnessPair, ZeroOneDesign)
from utils.exceptions import FileFormatError

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]

FAMILY_HEADER = "SFF 1"
REPORT_HEADER = "SRF 1"
HYPERPLANE_HEADER = "SHF 1"
MEASUREMENT_HEADER = "SMF 1"
SIGNAL_HEADER = "SSF 1"
RECIPE_HEADER = "SRP 1"

KNOWN_HEADERS = (FAMILY_HEADER, REPORT_HEADER, HYPERPLANE_HEADER,
                 MEASUREMENT_HEADER, SIGNAL_HEADER, RECIPE_HEADER)


def format_number(value: float) -> str:
    return f"{float(value):.17g}"


def format_row(values: Iterable[float]) -> str:
    return " ".join(format_number(v) for v in values)


def _interleave(row: np.ndarray) -> List[float]:
    return [part for z in row for part in (z.real, z.imag)]


class _LineReader:
    """Recorre las líneas significativas de un documento con su número de línea"""

    def __init__(self, text: str, source: str):
        self.source = source
        self._lines: List[Tuple[int, List[str]]] = []
        for number, raw in enumerate(text.splitlines(), start=1):
            content = raw.split("#", 1)[0].strip()
            if content:
                self._lines.append((number, content.split()))
        self._position = 0
        self.last_number: Optional[int] = None

    def at_end(self) -> bool:
        return self._position >= len(self._lines)

    def fail(self, message: str, number: Optional[int] = None) -> FileFormatError:
        where = f"{self.source}:{number}" if number is not None else self.source
        return FileFormatError(f"{where}: {message}")

    def next(self) -> Tuple[int, List[str]]:
        if self._position >= len(self._lines):
            raise self.fail("fin de archivo inesperado")
        line = self._lines[self._position]
        self._position += 1
        self.last_number = line[0]
        return line

    def header(self, expected: str) -> None:
        number, tokens = self.next()
        if " ".join(tokens) != expected:
            raise self.fail(f"cabecera '{' '.join(tokens)}', se esperaba '{expected}'", number)

    def keyword(self, name: str, arity: int = 1) -> List[str]:
        number, tokens = self.next()
        if tokens[0] != name or len(tokens) != arity + 1:
            raise self.fail(f"se esperaba '{name}' con {arity} valor(es)", number)
        return tokens[1:]

    def integer(self, name: str, minimum: int = 0) -> int:
        token = self.keyword(name)[0]
        number = self.last_number
        try:
            value = int(token)
        except ValueError:
            raise self.fail(f"'{name}' debe ser entero, se leyó '{token}'", number) from None
        if value < minimum:
            raise self.fail(f"'{name}' debe ser >= {minimum}", number)
        return value

    def numbers(self, count: int, kind=float) -> np.ndarray:
        number, tokens = self.next()
        if len(tokens) != count:
            raise self.fail(f"se esperaban {count} números, se leyeron {len(tokens)}", number)
        try:
            return np.array([kind(t) for t in tokens])
        except ValueError:
            raise self.fail("número mal formado", number) from None

    def finish(self) -> None:
        if self._position != len(self._lines):
            raise self.fail("contenido sobrante tras el final del documento",
                            self._lines[self._position][0])


class ArtifactSerializer:
    """
    Lectura y escritura de los artefactos del pipeline
    """

    # ------------------------------------------------------------------
    # Utilidades
    # ------------------------------------------------------------------

    def detect_format(self, path: PathLike) -> str:
        """Cabecera del documento (p. ej. 'SRP 1')"""
        reader = _LineReader(self._read_text(path), str(path))
        _, tokens = reader.next()
        header = " ".join(tokens)
        if header not in KNOWN_HEADERS:
            raise reader.fail(f"cabecera desconocida '{header}'")
        return header

    def _read_text(self, path: PathLike) -> str:
        try:
            return Path(path).read_text(encoding="utf-8")
        except OSError as e:
            raise FileFormatError(f"No se pudo leer {path}: {e.strerror}") from e

    def _write_text(self, path: PathLike, lines: Sequence[str]) -> None:
        Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")
        logger.info(f"💾 Escrito {path} ({lines[0]})")

    def _validated(self, reader: _LineReader, build):
        try:
            return build()
        except FileFormatError:
            raise
        except ValueError as e:
            raise reader.fail(f"contenido inválido: {e}") from None

    # ------------------------------------------------------------------
    # Familias
    # ------------------------------------------------------------------

    def family_lines(self, family: SubspaceFamily) -> List[str]:
        complex_valued = family.field == FieldKind.COMPLEX
        lines = [FAMILY_HEADER, f"field {family.field.value}", f"ambient {family.ambient}",
                 f"count {family.count}"]
        for k, subspace in enumerate(family.subspaces):
            lines.append(f"subspace {k} dim {subspace.dimension} "
                         f"complement {int(subspace.complement_encoded)}")
            for row in subspace.basis:
                lines.append(format_row(_interleave(row) if complex_valued else row.real))
        return lines

    def write_family(self, family: SubspaceFamily, path: PathLike) -> None:
        self._write_text(path, self.family_lines(family))

    def parse_family(self, text: str, source: str = "<familia>") -> SubspaceFamily:
        reader = _LineReader(text, source)
        reader.header(FAMILY_HEADER)
        field_name = reader.keyword("field")[0]
        if field_name not in (FieldKind.REAL.value, FieldKind.COMPLEX.value):
            raise reader.fail(f"cuerpo desconocido '{field_name}'")
        field = FieldKind(field_name)
        M = reader.integer("ambient", minimum=2)
        N = reader.integer("count", minimum=1)

        subspaces = []
        for k in range(N):
            number, tokens = reader.next()
            if len(tokens) != 6 or tokens[0] != "subspace" or tokens[2] != "dim" \
                    or tokens[4] != "complement" or tokens[1] != str(k):
                raise reader.fail(f"se esperaba 'subspace {k} dim D complement 0|1'", number)
            try:
                dim, encoded = int(tokens[3]), tokens[5] == "1"
            except ValueError:
                raise reader.fail("dimensión mal formada", number) from None
            if tokens[5] not in ("0", "1"):
                raise reader.fail("la bandera complement debe ser 0 o 1", number)
            stored = 1 if encoded else dim
            rows = []
            for _ in range(stored):
                if field == FieldKind.COMPLEX:
                    parts = reader.numbers(2 * M)
                    rows.append(parts[0::2] + 1j * parts[1::2])
                else:
                    rows.append(reader.numbers(M))
            subspace = self._validated(reader, lambda: Subspace(
                ambient=M, basis=np.array(rows), complement_encoded=encoded))
            if subspace.dimension != dim:
                raise reader.fail(f"el subespacio {k} declara dim {dim} pero tiene {subspace.dimension}")
            subspaces.append(subspace)
        reader.finish()
        return self._validated(reader, lambda: SubspaceFamily(
            ambient=M, subspaces=tuple(subspaces), field=field))

    def read_family(self, path: PathLike) -> SubspaceFamily:
        return self.parse_family(self._read_text(path), str(path))

    # ------------------------------------------------------------------
    # Recetas
    # ------------------------------------------------------------------

    def recipe_lines(self, recipe: Recipe) -> List[str]:
        M = recipe.ambient
        lines = [RECIPE_HEADER, f"ambient {M}", f"base {recipe.base_frame.count}"]
        lines += [format_row(v) for v in recipe.base_frame.vectors]
        for name, design in (("design_a", recipe.design_a), ("design_b", recipe.design_b)):
            lines.append(f"{name} {design.size}")
            lines += [" ".join(str(int(a)) for a in row) for row in design.matrix]
        for k, (index_set, flag) in enumerate(zip(recipe.index_sets, recipe.complement_flags)):
            lines.append(f"set {k} complement {int(flag)} indices "
                         + " ".join(str(i) for i in index_set))
        return lines

    def write_recipe(self, recipe: Recipe, path: PathLike) -> None:
        self._write_text(path, self.recipe_lines(recipe))

    def _read_design(self, reader: _LineReader, name: str) -> ZeroOneDesign:
        size = reader.integer(name, minimum=1)
        matrix = np.array([reader.numbers(size, kind=int) for _ in range(size)], dtype=np.int64)

        def build():
            from services.binary_designs import exact_determinant
            return ZeroOneDesign(matrix=matrix, row_sums=tuple(int(s) for s in matrix.sum(axis=1)),
                                 determinant=exact_determinant(matrix))
        return self._validated(reader, build)

    def parse_recipe(self, text: str, source: str = "<receta>") -> Recipe:
        reader = _LineReader(text, source)
        reader.header(RECIPE_HEADER)
        M = reader.integer("ambient", minimum=2)
        count = reader.integer("base", minimum=1)
        if count != 2 * M - 1:
            raise reader.fail(f"el frame base debe tener {2 * M - 1} vectores")
        vectors = np.array([reader.numbers(M) for _ in range(count)])
        base = self._validated(reader, lambda: Frame(vectors=vectors, blocks=((0, M), (M, count))))
        design_a = self._read_design(reader, "design_a")
        design_b = self._read_design(reader, "design_b")

        index_sets, flags = [], []
        for k in range(count):
            number, tokens = reader.next()
            if len(tokens) < 5 or tokens[:2] != ["set", str(k)] or tokens[2] != "complement" \
                    or tokens[4] != "indices" or tokens[3] not in ("0", "1"):
                raise reader.fail(f"se esperaba 'set {k} complement 0|1 indices ...'", number)
            try:
                index_sets.append(tuple(int(t) for t in tokens[5:]))
            except ValueError:
                raise reader.fail("índice mal formado", number) from None
            flags.append(tokens[3] == "1")
        reader.finish()
        return self._validated(reader, lambda: Recipe(
            base_frame=base, index_sets=tuple(index_sets), design_a=design_a,
            design_b=design_b, complement_flags=tuple(flags)))

    def read_recipe(self, path: PathLike) -> Recipe:
        return self.parse_recipe(self._read_text(path), str(path))

    # ------------------------------------------------------------------
    # Hiperplanos
    # ------------------------------------------------------------------

    def hyperplane_lines(self, hf: HyperplaneFamily) -> List[str]:
        N, M = hf.normals.shape
        lines = [HYPERPLANE_HEADER, f"ambient {M}", f"count {N}", "weights", format_row(hf.weights),
                 "frame"]
        lines += [format_row(v) for v in hf.frame_vectors()]
        return lines

    def write_hyperplanes(self, hf: HyperplaneFamily, path: PathLike) -> None:
        self._write_text(path, self.hyperplane_lines(hf))

    def parse_hyperplanes(self, text: str, source: str = "<hiperplanos>") -> HyperplaneFamily:
        from services.family_builder import hyperplane_family_from_frame

        reader = _LineReader(text, source)
        reader.header(HYPERPLANE_HEADER)
        M = reader.integer("ambient", minimum=2)
        N = reader.integer("count", minimum=1)
        reader.keyword("weights", arity=0)
        weights = reader.numbers(N)
        reader.keyword("frame", arity=0)
        vectors = np.array([reader.numbers(M) for _ in range(N)])
        reader.finish()
        if np.max(np.abs(np.sum(vectors ** 2, axis=1) - weights)) > 1e-12 * max(1.0, weights.max()):
            raise reader.fail("los pesos no coinciden con ‖φ_n‖²")
        return self._validated(reader, lambda: hyperplane_family_from_frame(Frame(vectors=vectors)))

    def read_hyperplanes(self, path: PathLike) -> HyperplaneFamily:
        return self.parse_hyperplanes(self._read_text(path), str(path))

    # ------------------------------------------------------------------
    # Medidas y señales
    # ------------------------------------------------------------------

    def write_measurements(self, meas: MeasurementVector, path: PathLike) -> None:
        self._write_text(path, [MEASUREMENT_HEADER, f"count {len(meas)}", format_row(meas.values)])

    def parse_measurements(self, text: str, source: str = "<medidas>") -> MeasurementVector:
        reader = _LineReader(text, source)
        reader.header(MEASUREMENT_HEADER)
        N = reader.integer("count", minimum=1)
        values = reader.numbers(N)
        reader.finish()
        return self._validated(reader, lambda: MeasurementVector(values=values))

    def read_measurements(self, path: PathLike) -> MeasurementVector:
        return self.parse_measurements(self._read_text(path), str(path))

    def write_signal(self, signal, path: PathLike) -> None:
        signal = np.asarray(signal, dtype=float).reshape(-1)
        self._write_text(path, [SIGNAL_HEADER, f"ambient {signal.shape[0]}", format_row(signal)])

    def parse_signal(self, text: str, source: str = "<señal>") -> np.ndarray:
        reader = _LineReader(text, source)
        reader.header(SIGNAL_HEADER)
        M = reader.integer("ambient", minimum=1)
        values = reader.numbers(M)
        reader.finish()
        if not np.all(np.isfinite(values)):
            raise reader.fail("la señal contiene valores no finitos")
        return values

    def read_signal(self, path: PathLike) -> np.ndarray:
        return self.parse_signal(self._read_text(path), str(path))

    # ------------------------------------------------------------------
    # Informes
    # ------------------------------------------------------------------

    def report_lines(self, certificate: Certificate) -> List[str]:
        lines = [REPORT_HEADER, f"kind {certificate.kind.value}",
                 f"heuristic {int(certificate.heuristic)}"]
        lines += [f"reason {reason}" for reason in certificate.reasons]
        if certificate.design_determinants is not None:
            det_a, det_b = certificate.design_determinants
            lines.append(f"determinants {det_a} {det_b}")
        report = certificate.complement_report
        if report is not None:
            subset = " ".join(str(i) for i in report.failing_subset or ())
            lines.append(f"complement holds {int(report.holds)} margin {format_number(report.margin)} "
                         f"borderline {int(report.borderline)} method {report.method} subset {subset}".rstrip())
        witness = certificate.witness_matrix
        if witness is not None:
            lines.append(f"witness_matrix rank {witness.rank} residual {format_number(witness.residual)} "
                         f"strategy {witness.strategy} size {witness.matrix.shape[0]}")
            lines += [format_row(row) for row in witness.matrix]
            lines.append("eigenvalues " + format_row(witness.eigenvalues))
            lines += ["eigenvector " + format_row(row) for row in witness.eigenvectors]
        pair = certificate.witness_pair
        if pair is not None:
            lines.append(f"witness_pair source {pair.source} mismatch {format_number(pair.mismatch)}")
            lines.append("u " + format_row(pair.u))
            lines.append("v " + format_row(pair.v))
        empirical = certificate.empirical
        if empirical is not None:
            lines.append(f"empirical trials {empirical.trials} failures {empirical.failures} "
                         f"min_separation {format_number(empirical.min_separation)} "
                         f"passed {int(empirical.passed)}")
            lines.append(f"label {empirical.label}")
        if certificate.stability_margin is not None:
            lines.append(f"stability_margin {format_number(certificate.stability_margin)}")
        return lines

    def write_report(self, certificate: Certificate, path: PathLike) -> None:
        self._write_text(path, self.report_lines(certificate))

    def parse_report(self, text: str, source: str = "<informe>") -> Certificate:
        reader = _LineReader(text, source)
        reader.header(REPORT_HEADER)
        kind_name = reader.keyword("kind")[0]
        try:
            kind = CertificateKind(kind_name)
        except ValueError:
            raise reader.fail(f"tipo de certificado desconocido '{kind_name}'") from None
        fields = {"kind": kind, "heuristic": reader.keyword("heuristic")[0] == "1"}
        reasons: List[str] = []

        try:
            while not reader.at_end():
                number, tokens = reader.next()
                head = tokens[0]
                if head == "reason":
                    reasons.append(" ".join(tokens[1:]))
                elif head == "determinants":
                    fields["design_determinants"] = (int(tokens[1]), int(tokens[2]))
                elif head == "complement":
                    subset_at = tokens.index("subset")
                    holds = tokens[2] == "1"
                    fields["complement_report"] = ComplementReport(
                        holds=holds, margin=float(tokens[4]), borderline=tokens[6] == "1",
                        method=tokens[8],
                        failing_subset=None if holds else tuple(int(t) for t in tokens[subset_at + 1:]))
                elif head == "witness_matrix":
                    size = int(tokens[8])
                    matrix = np.array([reader.numbers(size) for _ in range(size)])
                    eigenvalues = np.array([float(t) for t in reader.next()[1][1:]])
                    eigenvectors = np.array([[float(t) for t in reader.next()[1][1:]] for _ in range(2)])
                    fields["witness_matrix"] = WitnessMatrix(
                        matrix=matrix, residual=float(tokens[4]), rank=int(tokens[2]),
                        eigenvalues=eigenvalues, eigenvectors=eigenvectors, strategy=tokens[6])
                elif head == "witness_pair":
                    u = [float(t) for t in reader.next()[1][1:]]
                    v = [float(t) for t in reader.next()[1][1:]]
                    fields["witness_pair"] = WitnessPair(u=u, v=v, mismatch=float(tokens[4]),
                                                         source=tokens[2])
                elif head == "empirical":
                    _, label_tokens = reader.next()
                    if label_tokens[0] != "label":
                        raise reader.fail("se esperaba la etiqueta de la evidencia empírica")
                    label = " ".join(label_tokens[1:])
                    fields["empirical"] = EmpiricalReport(
                        trials=int(tokens[2]), failures=int(tokens[4]),
                        min_separation=float(tokens[6]), passed=tokens[8] == "1", label=label)
                elif head == "stability_margin":
                    fields["stability_margin"] = float(tokens[1])
                else:
                    raise reader.fail(f"línea desconocida '{head}'", number)
        except (IndexError, ValueError) as e:
            raise reader.fail(f"informe mal formado: {e}") from None

        return self._validated(reader, lambda: Certificate(reasons=tuple(reasons), **fields))

    def read_report(self, path: PathLike) -> Certificate:
        return self.parse_report(self._read_text(path), str(path))


# Instancia global del serializador
artifact_serializer = ArtifactSerializer()
