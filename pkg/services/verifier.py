"""
Mapa de medidas, operador elevado F y verificación de inyectividad.

F actúa sobre las matrices simétricas M x M en la base ortonormal
E_ii, (E_ij + E_ji)/√2 (i < j), de modo que F(A)(n) = <A, P_n>_HS.
Un certificado estructurado es definitivo; las búsquedas de testigos que no
encuentran nada solo son evidencia.
"""

import logging
import math
from typing import Optional, Tuple

import numpy as np
from scipy.optimize import least_squares, minimize

from config import settings
from schemas import (Certificate, CertificateKind, ComplementReport, EmpiricalReport,
                     FieldKind, Frame, LiftOperator, MeasurementVector, Recipe, Subspace,
                     SubspaceFamily, WitnessMatrix, WitnessPair)
from services.binary_designs import exact_determinant
from services.frames import complement_failure_witness, has_complement_property, is_full_spark
from services.linalg_core import (RngState, as_vector, extend_to_orthonormal_basis,
                                  null_space, orthonormalize, random_orthonormal_basis,
                                  random_rotation)
from utils.exceptions import (DependencyError, DomainError, RankOneWitnessError,
                              ResourceLimitError)

logger = logging.getLogger(__name__)

VERIFY_MODES = ("certificate", "witness", "empirical")


# ---------------------------------------------------------------------------
# Medidas y elevación
# ---------------------------------------------------------------------------

def measure(family: SubspaceFamily, x) -> MeasurementVector:
    """values[n] = ‖P_n x‖², con ‖x‖² − |<x, φ>|² para subespacios codificados"""
    M = family.ambient
    if family.field == FieldKind.COMPLEX:
        x = as_vector(x, M, dtype=complex)
    else:
        if np.iscomplexobj(x) and np.any(np.imag(x)):
            raise DomainError("Una familia real solo mide señales reales")
        x = as_vector(np.real(x), M)

    squared_norm = float(np.vdot(x, x).real)
    values = []
    for subspace in family.subspaces:
        coefficients = subspace.basis.conj() @ x
        captured = float(np.sum(np.abs(coefficients) ** 2))
        values.append(squared_norm - captured if subspace.complement_encoded else captured)
    values = np.array(values)
    # Redondeo de ‖x‖² − |<x, φ>|² en subespacios codificados
    tolerance = settings.LINALG_TOL * max(squared_norm, 1.0)
    values[(values < 0) & (values >= -tolerance)] = 0.0
    return MeasurementVector(values=values)


def symmetric_basis(M: int) -> np.ndarray:
    """Base ortonormal (Hilbert-Schmidt) de H^{MxM}: pila (M(M+1)/2, M, M)"""
    elements = []
    for i in range(M):
        for j in range(i, M):
            element = np.zeros((M, M))
            if i == j:
                element[i, i] = 1.0
            else:
                element[i, j] = element[j, i] = 1 / math.sqrt(2)
            elements.append(element)
    return np.array(elements)


def lift_matrix(A) -> np.ndarray:
    A = np.asarray(A, dtype=float)
    symmetric = (A + A.T) / 2
    return np.einsum("kij,ij->k", symmetric_basis(A.shape[0]), symmetric)


def unlift(coordinates, M: int) -> np.ndarray:
    return np.einsum("k,kij->ij", np.asarray(coordinates, dtype=float), symmetric_basis(M))


def lift_operator(family: SubspaceFamily) -> LiftOperator:
    if family.field != FieldKind.REAL:
        raise DomainError("El operador elevado solo está definido para familias reales")
    basis = symmetric_basis(family.ambient)
    rows = np.einsum("kij,nij->nk", basis, family.projections())
    return LiftOperator(ambient=family.ambient, matrix=rows)


def pencil_determinant(A, B, t: float) -> float:
    return float(np.linalg.det(np.asarray(A) * math.cos(t) + np.asarray(B) * math.sin(t)))


# ---------------------------------------------------------------------------
# Certificado estructurado
# ---------------------------------------------------------------------------

def certify_structured(recipe: Recipe) -> Certificate:
    """Diseños A y B invertibles (determinante entero exacto) y frame base con la propiedad del complemento"""
    reasons = []
    det_a = exact_determinant(recipe.design_a.matrix)
    det_b = exact_determinant(recipe.design_b.matrix)
    if det_a == 0:
        reasons.append("el diseño A es singular")
    if det_b == 0:
        reasons.append("el diseño B es singular")

    base = recipe.base_frame
    report: Optional[ComplementReport] = None
    try:
        report = has_complement_property(base)
    except ResourceLimitError:
        try:
            if is_full_spark(base) and base.count >= 2 * base.ambient - 1:
                report = ComplementReport(holds=True, method="full-spark")
            else:
                report = ComplementReport(holds=False, failing_subset=(), method="full-spark")
                reasons.append("el frame base no es full spark y supera la cota del complemento")
        except ResourceLimitError:
            reasons.append("el frame base supera las cotas de enumeración")

    if report is not None and not report.holds:
        reasons.append(f"el frame base no tiene la propiedad del complemento (I={report.failing_subset})")
    if report is not None and report.borderline:
        reasons.append("margen de la propiedad del complemento cercano a la tolerancia")

    certified = det_a != 0 and det_b != 0 and report is not None and report.holds
    kind = CertificateKind.STRUCTURED if certified else CertificateKind.INCONCLUSIVE
    if certified:
        logger.info(f"✅ Familia certificada: det(A)={det_a}, det(B)={det_b}")
    else:
        logger.warning(f"⚠️ Receta no certificada: {'; '.join(reasons)}")
    return Certificate(kind=kind, reasons=tuple(reasons), complement_report=report,
                       design_determinants=(det_a, det_b))


# ---------------------------------------------------------------------------
# Testigos de rango <= 2 en Null(F)
# ---------------------------------------------------------------------------

def _spectral(C: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """Autovalores y autovectores (filas) ordenados por módulo decreciente"""
    eigenvalues, eigenvectors = np.linalg.eigh((C + C.T) / 2)
    order = np.argsort(-np.abs(eigenvalues), kind="stable")
    return eigenvalues[order], eigenvectors[:, order].T


def _has_rank_at_most_two(magnitudes: np.ndarray) -> bool:
    if magnitudes.size <= 2:
        return True
    top, second, third = magnitudes[0], magnitudes[1], magnitudes[2]
    if top == 0:
        return False
    if third <= settings.LINALG_TOL * top:
        return True
    return second / third >= settings.WITNESS_RANK_GAP


def _truncate(eigenvalues: np.ndarray, eigenvectors: np.ndarray, rank: int) -> np.ndarray:
    return np.einsum("k,ki,kj->ij", eigenvalues[:rank], eigenvectors[:rank], eigenvectors[:rank])


def _accept_witness(C: np.ndarray, F: np.ndarray, strategy: str) -> Optional[WitnessMatrix]:
    norm = np.linalg.norm(C)
    if norm == 0:
        return None
    C = C / norm
    eigenvalues, eigenvectors = _spectral(C)
    magnitudes = np.abs(eigenvalues)
    if not _has_rank_at_most_two(magnitudes):
        return None

    rank = 1 if magnitudes[1] <= settings.LINALG_TOL * magnitudes[0] else 2
    F_norm = max(float(np.linalg.norm(F, 2)), np.finfo(float).tiny) if F.size else 1.0
    threshold = settings.WITNESS_RESIDUAL_TOL * F_norm

    for candidate in (_truncate(eigenvalues, eigenvectors, rank), C):
        residual = float(np.linalg.norm(F @ lift_matrix(candidate))) if F.size else 0.0
        if residual <= threshold:
            values, vectors = _spectral(candidate)
            return WitnessMatrix(
                matrix=candidate,
                residual=residual,
                rank=rank,
                eigenvalues=values[:2],
                eigenvectors=vectors[:2],
                strategy=strategy,
            )
    return None


def _pencil_root(A: np.ndarray, B: np.ndarray) -> float:
    """Raíz de t -> det(A cos t + B sin t) en [0, π]; f(π) = -f(0) para M impar"""
    low, high = 0.0, math.pi
    sign_low = np.sign(np.linalg.det(A))
    while high - low > settings.BISECTION_TOL * math.pi:
        middle = (low + high) / 2
        value = pencil_determinant(A, B, middle)
        if value == 0:
            return middle
        if np.sign(value) == sign_low:
            low = middle
        else:
            high = middle
    return (low + high) / 2


def _alternating_polish(coefficients: np.ndarray, kernel: np.ndarray, M: int,
                        steps: int = 200) -> np.ndarray:
    """Proyecciones alternadas entre rango <= 2 y Null(F)"""
    c = coefficients / np.linalg.norm(coefficients)
    for _ in range(steps):
        eigenvalues, eigenvectors = _spectral(unlift(c @ kernel, M))
        projected = kernel @ lift_matrix(_truncate(eigenvalues, eigenvectors, 2))
        norm = np.linalg.norm(projected)
        if norm == 0:
            break
        c = projected / norm
    return c


def rank12_witness_search(family: SubspaceFamily,
                          rng: Optional[RngState] = None) -> Optional[WitnessMatrix]:
    """
    Busca C != 0 de rango <= 2 con F(C) = 0.

    Estrategias: (i) rango de cada elemento de la base del núcleo; (ii) para
    M = 3 y núcleo de dimensión >= 2, bisección sobre det(A cos t + B sin t);
    (iii) minimización con reinicios del peso espectral fuera de los dos
    mayores autovalores sobre la esfera unidad del núcleo. None no certifica nada.
    """
    rng = rng if rng is not None else RngState()
    F = lift_operator(family).matrix
    M = family.ambient
    kernel = null_space(F, settings.LINALG_TOL)
    if kernel.shape[0] == 0:
        logger.info("🔒 Null(F) trivial: no hay testigos")
        return None

    for row in kernel:
        witness = _accept_witness(unlift(row, M), F, "kernel-basis")
        if witness is not None:
            logger.info(f"🎯 Testigo de rango {witness.rank} en la base del núcleo")
            return witness

    if M == 3 and kernel.shape[0] >= 2:
        A, B = unlift(kernel[0], M), unlift(kernel[1], M)
        t0 = _pencil_root(A, B)
        witness = _accept_witness(A * math.cos(t0) + B * math.sin(t0), F, "pencil")
        if witness is not None:
            logger.info(f"🎯 Testigo por el haz det(A cos t + B sin t) en t={t0:.6f}")
            return witness

    if kernel.shape[0] >= 2:
        def objective(c):
            norm = np.linalg.norm(c)
            if norm == 0:
                return 1.0
            squares = np.sort(np.linalg.eigvalsh(unlift(c @ kernel, M)) ** 2)[::-1]
            return float(squares[2:].sum() / squares.sum())

        for restart in range(settings.WITNESS_RESTARTS):
            start = rng.child(restart).normal(kernel.shape[0])
            result = minimize(objective, start, method="BFGS")
            c = _alternating_polish(result.x, kernel, M)
            witness = _accept_witness(unlift(c @ kernel, M), F, "sphere-search")
            if witness is not None:
                logger.info(f"🎯 Testigo por búsqueda en la esfera (reinicio {restart})")
                return witness

    logger.info("🔍 Ninguna estrategia encontró testigo (resultado no concluyente)")
    return None


def witness_to_pair(w: WitnessMatrix) -> Tuple[np.ndarray, np.ndarray]:
    """(√|λ1| u, √|λ2| v) con u ⊥ v y ‖P_n u'‖ = ‖P_n v'‖ para todo n"""
    if w.rank == 1:
        raise RankOneWitnessError(
            "Testigo de rango 1: un vector no nulo tiene todas sus medidas nulas",
            kernel_vector=np.array(w.eigenvectors[0]))
    lambda_1, lambda_2 = w.eigenvalues[:2]
    if lambda_1 * lambda_2 >= 0:
        raise RankOneWitnessError(
            "Autovalores del mismo signo: ambos autovectores tienen medidas nulas",
            kernel_vector=np.array(w.eigenvectors[0]))
    u, v = w.eigenvectors[0], w.eigenvectors[1]
    return math.sqrt(abs(lambda_1)) * u, math.sqrt(abs(lambda_2)) * v


# ---------------------------------------------------------------------------
# Búsqueda heurística de pares ortogonales
# ---------------------------------------------------------------------------

def _pair_from_parameters(p: np.ndarray, M: int) -> Tuple[np.ndarray, np.ndarray]:
    """u = a/‖a‖ y v ⊥ u con ‖v‖ = 1/(1+s²) en (0, 1]"""
    a, b, s = p[:M], p[M:2 * M], p[2 * M]
    u = a / max(np.linalg.norm(a), np.finfo(float).tiny)
    w = b - (b @ u) * u
    v = w / max(np.linalg.norm(w), np.finfo(float).tiny)
    return u, v / (1 + s * s)


def _measure_matrix(projections: np.ndarray, x: np.ndarray) -> np.ndarray:
    return np.einsum("i,nij,j->n", x, projections, x)


def _pair_mismatch(family: SubspaceFamily, u: np.ndarray, v: np.ndarray) -> float:
    scale = max(float(u @ u), float(v @ v), np.finfo(float).tiny)
    return float(np.max(np.abs(measure(family, u).values - measure(family, v).values)) / scale)


def orthogonal_pair_search(family: SubspaceFamily, rng: RngState,
                           restarts: Optional[int] = None) -> Optional[Tuple[np.ndarray, np.ndarray]]:
    """
    Minimiza Σ_n (‖P_n u‖² − ‖P_n v‖²)² con u ⊥ v, ‖u‖ = 1, ‖v‖ ∈ (0, 1].
    Solo devuelve un par si el objetivo queda bajo el umbral (testigo genuino).
    """
    if family.field != FieldKind.REAL:
        raise DomainError("La búsqueda de pares solo está definida en el caso real")
    restarts = settings.PAIR_SEARCH_RESTARTS if restarts is None else restarts
    M = family.ambient
    projections = family.projections().real

    def residuals(p):
        u, v = _pair_from_parameters(p, M)
        return _measure_matrix(projections, u) - _measure_matrix(projections, v)

    best = math.inf
    for restart in range(restarts):
        start = rng.child(restart).normal(2 * M + 1)
        result = least_squares(residuals, start, method="trf", xtol=1e-15, ftol=1e-15, gtol=1e-15)
        objective = float(np.sum(result.fun ** 2))
        best = min(best, objective)
        u, v = _pair_from_parameters(result.x, M)
        if objective < settings.PAIR_SEARCH_OBJECTIVE_TOL and np.linalg.norm(v) >= settings.MIN_PAIR_NORM:
            logger.info(f"🎯 Par ortogonal con medidas iguales (reinicio {restart}, objetivo {objective:.2e})")
            return u, v

    logger.info(f"🔍 Sin par ortogonal tras {restarts} reinicios (mejor objetivo {best:.2e})")
    return None


# ---------------------------------------------------------------------------
# Bases adaptadas, estabilidad y perturbaciones
# ---------------------------------------------------------------------------

def adapted_basis(W: Subspace, x, y, tol: Optional[float] = None) -> np.ndarray:
    """Base ortonormal de W con φ1 ∝ Px+Py y φ2 ∝ Px−Py: |<x,φ>| = |<y,φ>| en cada vector"""
    tol = settings.RECOVERY_TOL if tol is None else tol
    M = W.ambient
    x, y = as_vector(x, M), as_vector(y, M)
    basis = W.decoded_basis().real
    a, b = basis @ x, basis @ y
    scale = max(np.linalg.norm(x), np.linalg.norm(y), 1.0)
    if abs(np.linalg.norm(a) - np.linalg.norm(b)) > tol * scale:
        raise DomainError("‖Px‖ y ‖Py‖ difieren: no existe base adaptada")

    directions = sorted([a + b, a - b], key=lambda d: -np.linalg.norm(d))
    size = max(np.linalg.norm(a), np.linalg.norm(b))
    seeds = [directions[0]] if np.linalg.norm(directions[0]) > 0 else []
    if seeds and np.linalg.norm(directions[1]) > 1e-4 * size:
        seeds.append(directions[1])
    try:
        leading = orthonormalize(seeds) if seeds else np.zeros((0, basis.shape[0]))
    except DependencyError:
        leading = orthonormalize(seeds[:1])
    coordinates = extend_to_orthonormal_basis(leading, basis.shape[0])
    return coordinates @ basis


def stability_margin(family: SubspaceFamily, rng: RngState,
                     samples: Optional[int] = None) -> float:
    """
    Estimación superior de δ = min sobre pares admisibles (x ⊥ y, 1 = ‖x‖ >= ‖y‖ > 0)
    de max_n |‖P_n x‖ − ‖P_n y‖|, por muestreo y minimización local.
    """
    if family.field != FieldKind.REAL:
        raise DomainError("El margen de estabilidad solo está definido en el caso real")
    samples = settings.STABILITY_SAMPLES if samples is None else samples
    M = family.ambient
    projections = family.projections().real

    def gaps(p):
        x, y = _pair_from_parameters(p, M)
        return (np.sqrt(np.maximum(_measure_matrix(projections, x), 0))
                - np.sqrt(np.maximum(_measure_matrix(projections, y), 0)))

    estimate = math.inf
    for sample in range(samples):
        start = rng.child(sample).normal(2 * M + 1)
        estimate = min(estimate, float(np.max(np.abs(gaps(start)))))
        result = least_squares(gaps, start, method="trf", xtol=1e-15, ftol=1e-15, gtol=1e-15)
        estimate = min(estimate, float(np.max(np.abs(gaps(result.x)))))
        if estimate <= settings.STABILITY_ZERO_TOL:
            # par admisible con módulos iguales: la familia no es inyectiva
            logger.info(f"📏 Par con módulos iguales en la muestra {sample}: margen nulo")
            return 0.0

    logger.info(f"📏 Margen de estabilidad estimado (cota superior): {estimate:.3e}")
    return estimate


def perturb_family(family: SubspaceFamily, eps: float, rng: RngState) -> SubspaceFamily:
    """Rota cada subespacio con ‖P_n − Q_n‖ < eps (norma de operador comprobada)"""
    if not eps > 0:
        raise DomainError("eps debe ser positivo")
    M = family.ambient
    perturbed = []
    for subspace in family.subspaces:
        angle = eps / 4
        original = subspace.projection()
        while True:
            rotation = random_rotation(M, angle, rng)
            candidate = Subspace(ambient=M, basis=subspace.basis @ rotation.T,
                                 complement_encoded=subspace.complement_encoded)
            if np.linalg.norm(original - candidate.projection(), 2) < eps:
                break
            angle /= 2
        perturbed.append(candidate)
    return SubspaceFamily(ambient=M, subspaces=tuple(perturbed), field=family.field)


def _pooled_frame(family: SubspaceFamily, rng: RngState, witness=None) -> Frame:
    rows = []
    for subspace in family.subspaces:
        basis = subspace.decoded_basis().real
        if witness is not None:
            rows.append(adapted_basis(subspace, *witness))
        else:
            rows.append(random_orthonormal_basis(basis.shape[0], rng) @ basis
                        if basis.shape[0] > 1 else basis)
    return Frame(vectors=np.vstack(rows))


def _random_basis_trials(family: SubspaceFamily, rng: RngState, trials: int,
                         witness=None) -> Optional[Tuple[Frame, ComplementReport]]:
    if family.field != FieldKind.REAL:
        raise DomainError("La comprobación por bases aleatorias solo está definida en el caso real")
    total = sum(family.dims)
    if total > settings.COMPLEMENT_PROPERTY_MAX_VECTORS:
        raise ResourceLimitError(
            f"Σ D_n = {total} supera la cota de la propiedad del complemento")

    schedule = ([witness] if witness is not None else []) + [None] * trials
    for trial, adapted in enumerate(schedule):
        frame = _pooled_frame(family, rng, adapted)
        report = has_complement_property(frame)
        if not report.holds:
            logger.info(f"❌ Bases {'adaptadas' if adapted is not None else 'aleatorias'} "
                        f"sin la propiedad del complemento (ensayo {trial})")
            return frame, report
    return None


def random_basis_complement_check(family: SubspaceFamily, rng: RngState,
                                  trials: Optional[int] = None, witness=None) -> bool:
    """
    False si algún conjunto de bases ortonormales de los W_n pierde la propiedad
    del complemento (refutación genuina); True solo es evidencia.
    Con `witness` = (x, y) se prueban primero las bases adaptadas al par.
    """
    trials = settings.RANDOM_BASIS_TRIALS if trials is None else trials
    return _random_basis_trials(family, rng, trials, witness) is None


def _random_signal(M: int, rng: RngState, complex_valued: bool) -> np.ndarray:
    x = rng.complex_normal(M) if complex_valued else rng.normal(M)
    return x / np.linalg.norm(x)


def empirical_distinguishability(family: SubspaceFamily, rng: RngState,
                                 pairs: Optional[int] = None) -> EmpiricalReport:
    """Pares aleatorios (x, y) no equivalentes por fase deben dar medidas distintas"""
    pairs = settings.EMPIRICAL_PAIRS if pairs is None else pairs
    complex_valued = family.field == FieldKind.COMPLEX
    M = family.ambient
    failures, min_separation = 0, math.inf
    for _ in range(pairs):
        x = _random_signal(M, rng, complex_valued)
        y = _random_signal(M, rng, complex_valued)
        overlap = np.vdot(x, y)
        phase = overlap / abs(overlap) if abs(overlap) > 0 else 1.0
        if np.linalg.norm(y - phase * x) <= settings.EMPIRICAL_SEPARATION:
            continue
        separation = float(np.max(np.abs(measure(family, x).values - measure(family, y).values)))
        min_separation = min(min_separation, separation)
        if separation <= settings.EMPIRICAL_SEPARATION:
            failures += 1

    report = EmpiricalReport(trials=pairs, failures=failures,
                             min_separation=0.0 if math.isinf(min_separation) else min_separation,
                             passed=failures == 0)
    logger.info(f"🧪 Distinguibilidad empírica: {pairs - failures}/{pairs} pares separados "
                f"(mínima separación {report.min_separation:.3e})")
    return report


# ---------------------------------------------------------------------------
# Orquestación
# ---------------------------------------------------------------------------

def _witness_pair(family: SubspaceFamily, u, v, source: str) -> WitnessPair:
    return WitnessPair(u=u, v=v, mismatch=_pair_mismatch(family, np.asarray(u), np.asarray(v)),
                       source=source)


def _matches_recipe(family: SubspaceFamily, recipe: Recipe) -> bool:
    from services.family_builder import family_from_recipe
    expected = family_from_recipe(recipe)
    if expected.count != family.count or expected.ambient != family.ambient:
        return False
    return bool(np.max(np.abs(expected.projections() - family.projections())) <= settings.ORTHONORMAL_TOL)


def _search_witnesses(family: SubspaceFamily, rng: RngState) -> Certificate:
    heuristic = not (family.ambient == 3 and family.count <= 4)
    witness = rank12_witness_search(family, rng.child(0))
    if witness is not None:
        try:
            u, v = witness_to_pair(witness)
        except RankOneWitnessError as e:
            return Certificate(kind=CertificateKind.REFUTED, reasons=(str(e),),
                               witness_matrix=witness)
        return Certificate(kind=CertificateKind.REFUTED, reasons=("testigo de rango 2 en Null(F)",),
                           witness_matrix=witness,
                           witness_pair=_witness_pair(family, u, v, witness.strategy))

    pair = orthogonal_pair_search(family, rng.child(1))
    if pair is not None:
        return Certificate(kind=CertificateKind.REFUTED, reasons=("par ortogonal con medidas iguales",),
                           witness_pair=_witness_pair(family, *pair, "pair-search"))

    return Certificate(kind=CertificateKind.INCONCLUSIVE, heuristic=heuristic,
                       reasons=("no se encontró testigo (evidencia heurística)",))


def verify_family(family: SubspaceFamily, mode: str = "certificate",
                  rng: Optional[RngState] = None, recipe: Optional[Recipe] = None) -> Certificate:
    """
    certificate: certificado estructurado si hay receta compatible, si no búsqueda de testigos.
    witness: búsqueda de testigos. empirical: bases aleatorias, distinguibilidad y margen.
    Las familias complejas solo admiten la suite empírica.
    """
    if mode not in VERIFY_MODES:
        raise DomainError(f"Modo desconocido '{mode}', se esperaba uno de {VERIFY_MODES}")
    rng = rng if rng is not None else RngState()

    if family.field == FieldKind.COMPLEX:
        if mode != "empirical":
            logger.warning("⚠️ Familia compleja: solo se dispone de evidencia empírica")
        report = empirical_distinguishability(family, rng.child(2))
        return Certificate(kind=CertificateKind.EMPIRICAL, heuristic=True, empirical=report,
                           reasons=("familia compleja: evidencia empírica únicamente",))

    if mode == "certificate":
        if recipe is not None:
            if not _matches_recipe(family, recipe):
                raise DomainError("La receta no describe la familia dada")
            certificate = certify_structured(recipe)
            if certificate.kind == CertificateKind.STRUCTURED:
                return certificate
        return _search_witnesses(family, rng)

    if mode == "witness":
        return _search_witnesses(family, rng)

    failure = None
    if sum(family.dims) <= settings.COMPLEMENT_PROPERTY_MAX_VECTORS:
        failure = _random_basis_trials(family, rng.child(3), settings.RANDOM_BASIS_TRIALS)
    else:
        logger.warning("⚠️ Σ D_n supera la cota: se omite la comprobación por bases aleatorias")
    if failure is not None:
        frame, report = failure
        a, b = complement_failure_witness(frame, report.failing_subset)
        return Certificate(kind=CertificateKind.REFUTED, complement_report=report,
                           reasons=("bases ortonormales sin la propiedad del complemento",),
                           witness_pair=_witness_pair(family, a, b, "random-bases"))

    empirical = empirical_distinguishability(family, rng.child(2))
    margin = stability_margin(family, rng.child(4))
    return Certificate(kind=CertificateKind.EMPIRICAL, heuristic=True, empirical=empirical,
                       stability_margin=margin,
                       reasons=("evidencia empírica: bases aleatorias con la propiedad del complemento",))
