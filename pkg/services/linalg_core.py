"""
Núcleo de álgebra lineal densa y aleatoriedad con semilla.

Todas las decisiones de rango se toman con valores singulares, con tolerancia
relativa al mayor de ellos.
"""

import logging
from typing import List, Optional

import numpy as np
import scipy.linalg

from config import settings
from utils.exceptions import DependencyError, DomainError
from utils.validators import validate_seed, validate_tolerance

logger = logging.getLogger(__name__)

__all__ = [
    "RngState",
    "as_matrix",
    "as_vector",
    "canonical_sign",
    "extend_to_orthonormal_basis",
    "null_space",
    "numeric_rank",
    "orthonormalize",
    "projection_from_basis",
    "random_orthonormal_basis",
    "random_rotation",
    "random_unit_in_complement",
    "random_unitary",
]


class RngState:
    """
    Generador determinista basado en contador (Philox) con semilla de 64 bits.

    Cada muestra avanza `counter`; `child(i)` deriva un flujo independiente
    y reproducible para reinicios y ensayos.
    """

    def __init__(self, seed: Optional[int] = None):
        self.seed = validate_seed(settings.DEFAULT_SEED if seed is None else seed)
        self.counter = 0
        self._generator = np.random.Generator(np.random.Philox(key=self.seed))

    def __repr__(self) -> str:
        return f"RngState(seed={self.seed}, counter={self.counter})"

    def normal(self, size) -> np.ndarray:
        self.counter += 1
        return self._generator.standard_normal(size)

    def complex_normal(self, size) -> np.ndarray:
        return self.normal(size) + 1j * self.normal(size)

    def uniform(self, low: float = 0.0, high: float = 1.0, size=None):
        self.counter += 1
        return self._generator.uniform(low, high, size)

    def integers(self, low: int, high: int, size=None):
        self.counter += 1
        return self._generator.integers(low, high, size)

    def choice(self, n: int, size: int, replace: bool = False) -> np.ndarray:
        self.counter += 1
        return self._generator.choice(n, size=size, replace=replace)

    def child(self, index: int) -> "RngState":
        sequence = np.random.SeedSequence([self.seed, int(index)])
        sub_seed = int(sequence.generate_state(1, dtype=np.uint64)[0])
        return RngState(sub_seed)


def as_vector(x, M: Optional[int] = None, dtype=float) -> np.ndarray:
    vector = np.asarray(x, dtype=dtype).reshape(-1)
    if vector.size < 1:
        raise DomainError("El vector debe tener al menos una entrada")
    if M is not None and vector.shape[0] != M:
        raise DomainError(f"El vector tiene longitud {vector.shape[0]}, se esperaba {M}")
    if not np.all(np.isfinite(vector)):
        raise DomainError("El vector contiene valores no finitos")
    return vector


def as_matrix(vs, M: Optional[int] = None) -> np.ndarray:
    """Apila una lista de vectores como filas; admite lista vacía si se da M"""
    if isinstance(vs, np.ndarray):
        matrix = vs
    elif len(vs) == 0:
        if M is None:
            raise DomainError("Lista vacía sin dimensión ambiente")
        return np.zeros((0, M))
    else:
        matrix = np.array([np.asarray(v) for v in vs])
    if not np.iscomplexobj(matrix):
        matrix = matrix.astype(float)
    matrix = np.atleast_2d(matrix)
    if M is not None and matrix.shape[1] != M:
        raise DomainError(f"Los vectores deben tener longitud {M}")
    if not np.all(np.isfinite(matrix)):
        raise DomainError("La matriz contiene valores no finitos")
    return matrix


def orthonormalize(vs, tol: Optional[float] = None) -> np.ndarray:
    """
    Gram-Schmidt modificado con reortogonalización; respeta el orden de entrada.

    Devuelve las filas ortonormales. Lanza DependencyError si algún vector es
    numéricamente dependiente de los anteriores (residuo <= tol * su norma).
    """
    tol = validate_tolerance(settings.LINALG_TOL if tol is None else tol, "tol")
    vectors = as_matrix(vs)
    basis: List[np.ndarray] = []
    for k, v in enumerate(vectors):
        original = np.linalg.norm(v)
        w = v.copy()
        for _ in range(2):
            for q in basis:
                w = w - np.vdot(q, w) * q
        residual = np.linalg.norm(w)
        if original == 0 or residual <= tol * original:
            raise DependencyError(
                f"El vector {k} es linealmente dependiente de los anteriores "
                f"(residuo relativo {residual / original if original else 0.0:.3e})")
        basis.append(w / residual)
    return np.array(basis)


def numeric_rank(m, tol: Optional[float] = None) -> int:
    tol = validate_tolerance(settings.LINALG_TOL if tol is None else tol, "tol")
    matrix = np.atleast_2d(np.asarray(m))
    if matrix.size == 0:
        return 0
    s = np.linalg.svd(matrix, compute_uv=False)
    if s[0] == 0:
        return 0
    return int(np.sum(s > tol * s[0]))


def null_space(m, tol: Optional[float] = None) -> np.ndarray:
    """Base ortonormal (filas) del núcleo numérico por la derecha"""
    tol = validate_tolerance(settings.LINALG_TOL if tol is None else tol, "tol")
    matrix = np.atleast_2d(np.asarray(m))
    if matrix.shape[0] == 0:
        return np.eye(matrix.shape[1], dtype=matrix.dtype)
    return scipy.linalg.null_space(matrix, rcond=tol).T


def random_unit_in_complement(span, M: int, rng: RngState,
                              tol: Optional[float] = None) -> np.ndarray:
    """Vector unitario uniforme en la esfera de [span]^⊥"""
    span = as_matrix(span, M)
    k = span.shape[0]
    if k >= M:
        raise DomainError(f"El complemento de {k} vectores en R^{M} es trivial")
    if k and numeric_rank(span, tol) < k:
        raise DependencyError("Los vectores generadores no son linealmente independientes")
    complement = null_space(span, tol) if k else np.eye(M)
    if complement.shape[0] != M - k:
        raise DependencyError("Dimensión numérica del complemento inesperada")
    coefficients = rng.normal(complement.shape[0])
    while not np.any(coefficients):
        coefficients = rng.normal(complement.shape[0])
    w = coefficients @ complement
    # Proyección final para absorber el redondeo del núcleo
    if k:
        q = orthonormalize(span)
        w = w - (w @ q.T) @ q
    return w / np.linalg.norm(w)


def random_orthonormal_basis(M: int, rng: RngState) -> np.ndarray:
    """Base ortonormal por muestreo sucesivo en complementos"""
    rows: List[np.ndarray] = []
    for _ in range(M):
        rows.append(random_unit_in_complement(rows, M, rng))
    return orthonormalize(rows)


def random_unitary(M: int, rng: RngState) -> np.ndarray:
    """Unitaria aleatoria a partir de gaussianas complejas ortonormalizadas"""
    return orthonormalize(rng.complex_normal((M, M)))


def random_rotation(M: int, angle: float, rng: RngState) -> np.ndarray:
    """Rotación exp(S) con S antisimétrica de norma espectral `angle`"""
    g = rng.normal((M, M))
    skew = g - g.T
    norm = np.linalg.norm(skew, 2)
    if norm == 0:
        return np.eye(M)
    return scipy.linalg.expm(skew * (angle / norm))


def extend_to_orthonormal_basis(rows, M: int, tol: Optional[float] = None) -> np.ndarray:
    """Completa filas ortonormales hasta una base de R^M (o C^M)"""
    rows = as_matrix(rows, M)
    if rows.shape[0] == 0:
        return np.eye(M)
    completion = null_space(rows.conj(), tol)
    return np.vstack([rows, completion])


def projection_from_basis(rows) -> np.ndarray:
    rows = np.atleast_2d(np.asarray(rows))
    return rows.T @ rows.conj()


def canonical_sign(x, tol: Optional[float] = None) -> np.ndarray:
    """Fija el signo global: primera coordenada no nula >= 0"""
    x = np.asarray(x, dtype=float)
    scale = np.max(np.abs(x)) if x.size else 0.0
    if scale == 0:
        return np.zeros_like(x)
    tol = settings.ZERO_MODULUS_TOL if tol is None else tol
    first = np.flatnonzero(np.abs(x) > tol * scale)[0]
    return -x if x[first] < 0 else x.copy()

