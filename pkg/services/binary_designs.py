"""
Matrices 0-1 invertibles con sumas por fila prescritas.

La construcción es inductiva: el caso 2x2 es la identidad y cada paso añade
una fila y una columna a partir de la matriz de tamaño anterior, reparando la
última fila si la matriz resultante es singular.
"""

import logging
from functools import lru_cache
from typing import List, Sequence, Tuple

import numpy as np
import sympy

from schemas import ZeroOneDesign
from utils.exceptions import ConstructionError, DomainError

logger = logging.getLogger(__name__)


def exact_determinant(matrix) -> int:
    """Determinante entero exacto (Bareiss)"""
    rows = np.asarray(matrix, dtype=np.int64).tolist()
    return int(sympy.Matrix(rows).det(method="bareiss"))


def _build_sorted(sums: Tuple[int, ...]) -> np.ndarray:
    n = len(sums)
    if n == 2:
        return np.eye(2, dtype=np.int64)

    top = n - 1
    reduced = tuple(s - 1 if s == top else s for s in sums[:-1])
    inner = _build_sorted(reduced)

    matrix = np.zeros((n, n), dtype=np.int64)
    matrix[:top, :top] = inner
    matrix[:top, top] = [1 if s == top else 0 for s in sums[:-1]]
    last = sums[-1]
    matrix[top, :last] = 1

    if exact_determinant(matrix) != 0:
        return matrix

    # Reparación: intercambiar el cero de la última columna con un uno de la última fila
    for ell in range(last):
        candidate = matrix.copy()
        candidate[top, ell], candidate[top, top] = 0, 1
        if exact_determinant(candidate) != 0:
            logger.debug(f"🔧 Fila {top} reparada en la columna {ell} (n={n})")
            return candidate

    raise ConstructionError(f"No se encontró reparación invertible para las sumas {sums}")


def zero_one_invertible(row_sums: Sequence[int]) -> ZeroOneDesign:
    """
    Matriz 0-1 invertible cuya fila k tiene exactamente row_sums[k] unos.

    Las sumas se ordenan de forma estable no creciente, se construye la
    matriz ordenada y se deshace la permutación de filas.
    """
    sums = [int(s) for s in row_sums]
    M = len(sums)
    if M < 2:
        raise DomainError(f"Se necesitan al menos 2 filas, se recibieron {M}")
    bad = [s for s in sums if not 1 <= s <= M - 1]
    if bad:
        raise DomainError(f"Las sumas por fila deben estar en [1, {M - 1}], fuera de rango: {bad}")

    order = np.argsort([-s for s in sums], kind="stable")
    sorted_matrix = _build_sorted(tuple(sums[i] for i in order))

    matrix = np.empty_like(sorted_matrix)
    matrix[order] = sorted_matrix
    determinant = exact_determinant(matrix)

    logger.debug(f"🧮 Diseño 0-1 de tamaño {M} con sumas {sums}, det = {determinant}")
    return ZeroOneDesign(matrix=matrix, row_sums=tuple(sums), determinant=determinant)


def trivial_design() -> ZeroOneDesign:
    """Diseño 1x1 [1]"""
    return ZeroOneDesign(matrix=[[1]], row_sums=(1,), determinant=1)


def row_sums_of(design: ZeroOneDesign) -> List[int]:
    return [int(s) for s in np.asarray(design.matrix).sum(axis=1)]


@lru_cache(maxsize=128)
def _rational_inverse(rows: Tuple[Tuple[int, ...], ...]) -> sympy.Matrix:
    return sympy.Matrix(rows).inv(method="LU")


def exact_solve(design: ZeroOneDesign, values) -> np.ndarray:
    """
    Resuelve design @ z = values con la inversa racional exacta.

    Los valores de punto flotante se convierten exactamente a racionales, de
    modo que el único redondeo es la conversión final a float.
    """
    matrix = np.asarray(design.matrix, dtype=np.int64)
    values = np.asarray(values, dtype=float).reshape(-1)
    if values.shape[0] != matrix.shape[0]:
        raise DomainError(
            f"Se esperaban {matrix.shape[0]} valores, se recibieron {values.shape[0]}")
    try:
        inverse = _rational_inverse(tuple(tuple(int(a) for a in row) for row in matrix))
    except ValueError:
        raise DomainError("El diseño es singular") from None
    rhs = [sympy.Rational(float(v)) for v in values]
    size = matrix.shape[0]
    return np.array([
        float(sum((inverse[i, j] * rhs[j] for j in range(size)), sympy.Integer(0)))
        for i in range(size)
    ])
