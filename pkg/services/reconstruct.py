"""
Reconstrucción de la señal (salvo signo global) a partir de ‖P_n x‖².
"""

import logging

import numpy as np
import scipy.linalg

from config import settings
from schemas import Frame, HyperplaneFamily, MeasurementVector, ReconstructionResult, Recipe, SubspaceFamily
from services.binary_designs import exact_solve
from services.family_builder import family_from_recipe
from services.frames import recover_signs
from services.linalg_core import canonical_sign
from services.verifier import measure
from utils.exceptions import DomainError, InconsistencyError

logger = logging.getLogger(__name__)


def _check_length(meas: MeasurementVector, expected: int) -> np.ndarray:
    if len(meas) != expected:
        raise DomainError(f"Se esperaban {expected} medidas, se recibieron {len(meas)}")
    return np.asarray(meas.values, dtype=float)


def _clamp_squares(squares: np.ndarray, squared_norm: float) -> np.ndarray:
    """Cuadrados negativos dentro de −tol·‖x‖² se anulan; por debajo son inconsistentes"""
    threshold = settings.LINALG_TOL * max(squared_norm, 0.0)
    worst = float(squares.min()) if squares.size else 0.0
    if worst < -threshold:
        raise InconsistencyError(
            f"Módulo al cuadrado negativo ({worst:.3e}) por debajo de −{threshold:.1e}")
    return np.clip(squares, 0.0, None)


def _finish(family: SubspaceFamily, x: np.ndarray, values: np.ndarray) -> ReconstructionResult:
    """Vuelve a medir, exige consistencia y fija el signo global"""
    scale = max(float(values.max()), np.finfo(float).tiny)
    residual = float(np.max(np.abs(measure(family, x).values - values)) / scale)
    if residual > settings.RECOVERY_TOL:
        raise InconsistencyError(
            f"Las medidas no son consistentes (residuo {residual:.3e} > {settings.RECOVERY_TOL:.1e})")
    return ReconstructionResult(signal=canonical_sign(x), residual=residual)


def reconstruct(recipe: Recipe, meas: MeasurementVector) -> ReconstructionResult:
    """
    Inversión de la construcción 2M-1.

    Resuelve exactamente el sistema del diseño A para |<x, φ_n>|², obtiene
    ‖x‖², traduce las entradas codificadas por complemento, resuelve el
    diseño B y termina con la recuperación de signos sobre el frame base.
    """
    M = recipe.ambient
    values = _check_length(meas, 2 * M - 1)
    if not np.any(values):
        return ReconstructionResult(signal=np.zeros(M), residual=0.0)

    leading = exact_solve(recipe.design_a, values[:M])
    squared_norm = float(leading.sum())
    if squared_norm <= 0:
        raise InconsistencyError(f"‖x‖² no positivo ({squared_norm:.3e}) con medidas no nulas")

    flags = np.array(recipe.complement_flags[M:], dtype=bool)
    second = np.where(flags, squared_norm - values[M:], values[M:])
    trailing = exact_solve(recipe.design_b, second)

    squares = _clamp_squares(np.concatenate([leading, trailing]), squared_norm)
    x, _ = recover_signs(recipe.base_frame, np.sqrt(squares))
    result = _finish(family_from_recipe(recipe), x, values)
    logger.debug(f"🔁 Señal reconstruida en R^{M} (residuo {result.residual:.3e})")
    return result


def _leading_order(normals: np.ndarray) -> np.ndarray:
    """Permutación cuyas M primeras normales forman la submatriz mejor condicionada (QR con pivoteo)"""
    _, _, pivots = scipy.linalg.qr(normals.T, pivoting=True, mode="economic")
    M = normals.shape[1]
    leading = list(pivots[:M])
    return np.array(leading + [n for n in range(normals.shape[0]) if n not in set(leading)])


def reconstruct_hyperplanes(hf: HyperplaneFamily, meas: MeasurementVector) -> ReconstructionResult:
    """
    Con b = Σa_n − 1: ‖x‖² = Σ (a_n/b)·meas[n] y |<x, φ_n>|² = ‖x‖² − meas[n];
    los signos se recuperan sobre las normales unitarias.
    """
    N, M = hf.normals.shape
    values = _check_length(meas, N)
    if not np.any(values):
        return ReconstructionResult(signal=np.zeros(M), residual=0.0)

    b = float(hf.weights.sum()) - 1.0
    squared_norm = float(np.sum(hf.weights / b * values))
    if squared_norm <= 0:
        raise InconsistencyError(f"‖x‖² no positivo ({squared_norm:.3e}) con medidas no nulas")

    moduli = np.sqrt(_clamp_squares(squared_norm - values, squared_norm))
    order = _leading_order(hf.normals)
    x, _ = recover_signs(Frame(vectors=hf.normals[order]), moduli[order])
    result = _finish(hf.family, x, values)
    logger.debug(f"🔁 Señal reconstruida desde {N} hiperplanos (residuo {result.residual:.3e})")
    return result
