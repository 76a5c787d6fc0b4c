"""
Herramientas clásicas de recuperación de fase con vectores: frames full spark,
propiedad del complemento, testigos de fallo y recuperación de signos.
"""

import itertools
import logging
import math
from typing import Iterator, List, Optional, Sequence, Tuple

import numpy as np

from config import settings
from schemas import ComplementReport, Frame
from services.linalg_core import (RngState, as_vector, null_space, numeric_rank,
                                  random_orthonormal_basis)
from utils.exceptions import (AmbiguityError, ConstructionError, DependencyError,
                              DomainError, InconsistencyError, ResourceLimitError,
                              WitnessError)
from utils.validators import ProfileValidator, validate_index_set, validate_tolerance

logger = logging.getLogger(__name__)

__all__ = [
    "classical_sign_recovery",
    "complement_failure_witness",
    "ensure_full_spark",
    "has_complement_property",
    "is_full_spark",
    "is_parseval",
    "recover_signs",
    "stacked_orthobases",
]


def _chunks(iterable, size: int) -> Iterator[list]:
    iterator = iter(iterable)
    while True:
        chunk = list(itertools.islice(iterator, size))
        if not chunk:
            return
        yield chunk


def _relative_min_singular(stack: np.ndarray, M: int) -> np.ndarray:
    """σ_M / σ_1 para cada matriz de la pila (0 si hay menos de M filas)"""
    count, rows = stack.shape[0], stack.shape[1]
    if rows < M:
        return np.zeros(count)
    s = np.linalg.svd(stack, compute_uv=False)
    top = s[:, 0]
    ratio = np.zeros(count)
    nonzero = top > 0
    ratio[nonzero] = s[nonzero, M - 1] / top[nonzero]
    return ratio


def stacked_orthobases(M: int, count: int, rng: RngState) -> Frame:
    """
    `count` bases ortonormales apiladas, cada una muestreada vector a vector en
    el complemento de los anteriores; se exige full spark (exhaustivo si cabe
    en la cota, por muestreo en otro caso).
    """
    M = ProfileValidator.validate_ambient(M)
    count = ProfileValidator.validate_count(count, "count")
    blocks = tuple((k * M, (k + 1) * M) for k in range(count))

    for attempt in range(1, settings.CONSTRUCTION_RETRIES + 1):
        try:
            vectors = np.vstack([random_orthonormal_basis(M, rng) for _ in range(count)])
        except DependencyError as e:
            logger.warning(f"⚠️ Intento {attempt}: base dependiente ({e}), reintentando")
            continue
        frame = Frame(vectors=vectors, blocks=blocks)
        if count == 1 or ensure_full_spark(frame, rng):
            logger.debug(f"🧱 {count} bases ortonormales apiladas en R^{M} (intento {attempt})")
            return frame
        logger.warning(f"⚠️ Intento {attempt}: el frame apilado no es full spark, reintentando")

    raise ConstructionError(
        f"No se obtuvo un frame full spark tras {settings.CONSTRUCTION_RETRIES} intentos")


def is_full_spark(f: Frame, tol: Optional[float] = None) -> bool:
    tol = validate_tolerance(settings.LINALG_TOL if tol is None else tol, "tol")
    N, M = f.count, f.ambient
    if N < M:
        raise DomainError(f"Full spark requiere N >= M (N={N}, M={M})")
    total = math.comb(N, M)
    if total > settings.FULL_SPARK_MAX_SUBSETS:
        raise ResourceLimitError(
            f"C({N},{M}) = {total} supera la cota {settings.FULL_SPARK_MAX_SUBSETS}")

    for chunk in _chunks(itertools.combinations(range(N), M), settings.SPARK_CHUNK_SIZE):
        minors = f.vectors[np.array(chunk)]
        if np.any(_relative_min_singular(minors, M) <= tol):
            return False
    return True


def ensure_full_spark(f: Frame, rng: RngState, tol: Optional[float] = None) -> bool:
    """Full spark exhaustivo dentro de la cota; por muestreo con semilla por encima"""
    tol = validate_tolerance(settings.LINALG_TOL if tol is None else tol, "tol")
    N, M = f.count, f.ambient
    if math.comb(N, M) <= settings.FULL_SPARK_MAX_SUBSETS:
        return is_full_spark(f, tol)

    logger.info(f"🎲 C({N},{M}) supera la cota: comprobación por muestreo "
                f"({settings.SPARK_SPOT_CHECKS} subconjuntos)")
    subsets = np.array([np.sort(rng.choice(N, M)) for _ in range(settings.SPARK_SPOT_CHECKS)])
    return bool(np.all(_relative_min_singular(f.vectors[subsets], M) > tol))


def has_complement_property(f: Frame, tol: Optional[float] = None) -> ComplementReport:
    """
    Oráculo exhaustivo: para todo I, {φ_n}_{n∈I} o su complemento genera R^M.

    Recorre |I| = 0, 1, ..., N//2 en orden, de modo que el primer fallo es de
    tamaño mínimo.
    """
    tol = validate_tolerance(settings.LINALG_TOL if tol is None else tol, "tol")
    N, M = f.count, f.ambient
    if N > settings.COMPLEMENT_PROPERTY_MAX_VECTORS:
        raise ResourceLimitError(
            f"N={N} supera la cota de la propiedad del complemento "
            f"({settings.COMPLEMENT_PROPERTY_MAX_VECTORS})")

    everything = np.arange(N)
    margin = math.inf
    for size in range(0, N // 2 + 1):
        for chunk in _chunks(itertools.combinations(range(N), size), settings.SPARK_CHUNK_SIZE):
            inside = np.array(chunk, dtype=int).reshape(len(chunk), size)
            mask = np.ones((len(chunk), N), dtype=bool)
            mask[np.arange(len(chunk))[:, None], inside] = False
            outside = np.broadcast_to(everything, (len(chunk), N))[mask].reshape(len(chunk), N - size)

            strength = np.maximum(_relative_min_singular(f.vectors[inside], M),
                                  _relative_min_singular(f.vectors[outside], M))
            margin = min(margin, float(strength.min()))
            failing = np.flatnonzero(strength <= tol)
            if failing.size:
                subset = tuple(int(i) for i in inside[failing[0]])
                logger.debug(f"❌ Propiedad del complemento falla en I={subset}")
                return ComplementReport(holds=False, failing_subset=subset, margin=margin,
                                        borderline=tol / 10 < margin <= 10 * tol)

    margin = 0.0 if math.isinf(margin) else margin
    return ComplementReport(holds=True, margin=margin, borderline=margin <= 10 * tol)


def complement_failure_witness(f: Frame, I: Sequence[int],
                               tol: Optional[float] = None) -> Tuple[np.ndarray, np.ndarray]:
    """(x+y, x−y) con x ⊥ span_I, y ⊥ span_{I^c}"""
    tol = validate_tolerance(settings.LINALG_TOL if tol is None else tol, "tol")
    N, M = f.count, f.ambient
    inside = validate_index_set(I, N, "I")
    outside = [n for n in range(N) if n not in set(inside)]

    span_in, span_out = f.vectors[inside], f.vectors[outside]
    if numeric_rank(span_in, tol) == M or numeric_rank(span_out, tol) == M:
        raise WitnessError(f"El subconjunto {inside} no falla: uno de los lados genera R^{M}")

    x = null_space(span_in.reshape(-1, M), tol)[0]
    y_candidates = null_space(span_out.reshape(-1, M), tol)
    # y menos alineado con x para evitar x ± y = 0
    y = y_candidates[int(np.argmin(np.abs(y_candidates @ x)))]
    if min(np.linalg.norm(x + y), np.linalg.norm(x - y)) <= tol:
        # x es ortogonal a todo el frame: x y 2x tienen módulos nulos
        return x, 2 * x
    return x + y, x - y


def is_parseval(f: Frame, tol: Optional[float] = None) -> bool:
    tol = settings.ORTHONORMAL_TOL if tol is None else tol
    frame_operator = f.vectors.T @ f.vectors
    return bool(np.max(np.abs(frame_operator - np.eye(f.ambient))) <= tol)


def _leading_inverse(f: Frame) -> np.ndarray:
    M = f.ambient
    if (0, M) in f.blocks:
        return f.vectors[:M].T
    lead = f.subframe(range(M)).vectors
    if numeric_rank(lead) < M:
        raise DomainError("Los primeros M vectores del frame no son linealmente independientes")
    return np.linalg.inv(lead)


def recover_signs(f: Frame, moduli, tol: Optional[float] = None) -> Tuple[np.ndarray, float]:
    """
    Recuperación de signos con residuo: enumera los patrones de signo del
    bloque inicial y devuelve (x, residuo relativo en el dominio cuadrático).
    """
    tol = validate_tolerance(settings.RECOVERY_TOL if tol is None else tol, "tol")
    N, M = f.count, f.ambient
    c = as_vector(moduli, N)
    if np.any(c < 0):
        raise DomainError("Los módulos deben ser no negativos")
    if N < M:
        raise DomainError(f"Se necesitan al menos M={M} medidas")

    scale = float(np.max(c) ** 2)
    if scale == 0:
        return np.zeros(M), 0.0

    inverse = _leading_inverse(f)
    lead, rest = c[:M], c[M:]
    rest_vectors = f.vectors[M:]

    pivot = int(np.argmax(lead))
    free = [k for k in range(M)
            if k != pivot and lead[k] > settings.ZERO_MODULUS_TOL * lead[pivot]]
    bits = len(free)
    if bits > settings.MAX_SIGN_BITS:
        raise ResourceLimitError(f"2^{bits} patrones de signo superan la cota")

    best_x, best_residual = None, math.inf
    near: List[np.ndarray] = []
    total = 1 << bits
    chunk = 1 << 14
    for start in range(0, total, chunk):
        index = np.arange(start, min(total, start + chunk), dtype=np.int64)
        signs = np.ones((index.size, M))
        if bits:
            flips = (index[:, None] >> np.arange(bits)) & 1
            signs[:, free] = 1 - 2 * flips
        candidates = (signs * lead) @ inverse.T
        if rest.size:
            predicted = (candidates @ rest_vectors.T) ** 2
            residuals = np.max(np.abs(predicted - rest ** 2), axis=1) / scale
        else:
            residuals = np.zeros(index.size)

        winner = int(np.argmin(residuals))
        if residuals[winner] < best_residual:
            best_x, best_residual = candidates[winner], float(residuals[winner])
        for k in np.flatnonzero(residuals <= tol)[:64 - len(near)]:
            near.append(candidates[k])

    if best_residual > tol:
        raise InconsistencyError(
            f"Ningún patrón de signos es consistente (residuo {best_residual:.3e} > {tol:.1e})")

    norm = max(np.linalg.norm(best_x), np.finfo(float).tiny)
    for other in near:
        gap = min(np.linalg.norm(other - best_x), np.linalg.norm(other + best_x)) / norm
        if gap > settings.AMBIGUITY_SEPARATION:
            raise AmbiguityError(
                f"Dos patrones de signo no equivalentes explican las medidas (separación {gap:.3e})")

    # Pulido por mínimos cuadrados con los signos del mejor patrón
    predicted = f.vectors @ best_x
    signs = np.where(predicted < 0, -1.0, 1.0)
    refined, *_ = np.linalg.lstsq(f.vectors, signs * c, rcond=None)
    refined_residual = float(np.max(np.abs((f.vectors @ refined) ** 2 - c ** 2)) / scale)
    if refined_residual <= best_residual:
        best_x, best_residual = refined, refined_residual

    logger.debug(f"🔎 Signos recuperados: {bits} bits libres, residuo {best_residual:.3e}")
    return best_x, best_residual


def classical_sign_recovery(f: Frame, moduli, tol: Optional[float] = None) -> np.ndarray:
    """x con |<x, φ_n>| = moduli[n], salvo signo global"""
    x, _ = recover_signs(f, moduli, tol)
    return x
