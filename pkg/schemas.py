from enum import Enum
from typing import Optional, Tuple

import numpy as np
import sympy
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator
from scipy.linalg import null_space

from config import settings


def _frozen_array(value, dtype=None, ndim: Optional[int] = None) -> np.ndarray:
    """Copia `value` a un ndarray de solo lectura"""
    array = np.array(value, dtype=dtype, copy=True)
    if ndim is not None and array.ndim != ndim:
        raise ValueError(f"Se esperaba un arreglo de {ndim} dimensiones, forma {array.shape}")
    if array.dtype.kind in "fc" and not np.all(np.isfinite(array)):
        raise ValueError("El arreglo contiene valores no finitos")
    array.setflags(write=False)
    return array


def _numeric_dtype(value):
    return complex if np.iscomplexobj(value) else float


class FieldKind(str, Enum):
    """
    Cuerpo de escalares de una familia
    """
    REAL = "real"
    COMPLEX = "complex"


class CertificateKind(str, Enum):
    """
    Resultados posibles de la verificación de una familia
    """
    STRUCTURED = "structured"
    REFUTED = "refuted"
    EMPIRICAL = "empirical"
    INCONCLUSIVE = "inconclusive"


class _ArrayModel(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)


class Frame(_ArrayModel):
    """
    Familia ordenada de vectores con bloques ortonormales marcados
    """
    vectors: np.ndarray
    blocks: Tuple[Tuple[int, int], ...] = ()

    @field_validator('vectors', mode='before')
    @classmethod
    def validate_vectors(cls, v):
        array = _frozen_array(v, dtype=float, ndim=2)
        if array.shape[0] < 1 or array.shape[1] < 1:
            raise ValueError('Un frame necesita al menos un vector de longitud positiva')
        return array

    @model_validator(mode='after')
    def validate_blocks(self):
        N = self.vectors.shape[0]
        for start, stop in self.blocks:
            if not 0 <= start < stop <= N:
                raise ValueError(f'Bloque ({start}, {stop}) fuera de rango para N={N}')
            block = self.vectors[start:stop]
            gram = block @ block.T
            if np.max(np.abs(gram - np.eye(stop - start))) > settings.ORTHONORMAL_TOL:
                raise ValueError(f'El bloque ({start}, {stop}) no es ortonormal')
        return self

    @property
    def ambient(self) -> int:
        return self.vectors.shape[1]

    @property
    def count(self) -> int:
        return self.vectors.shape[0]

    def subframe(self, indices) -> "Frame":
        return Frame(vectors=self.vectors[list(indices)])


class ComplementReport(_ArrayModel):
    """
    Veredicto de la propiedad del complemento
    """
    holds: bool
    failing_subset: Optional[Tuple[int, ...]] = None
    margin: float = Field(default=0.0, ge=0)
    borderline: bool = False
    method: str = "exhaustive"

    @model_validator(mode='after')
    def validate_failure(self):
        if not self.holds and self.failing_subset is None:
            raise ValueError('Un reporte negativo debe incluir el subconjunto que falla')
        if self.holds and self.failing_subset is not None:
            raise ValueError('Un reporte positivo no lleva subconjunto que falla')
        return self


class ZeroOneDesign(_ArrayModel):
    """
    Matriz 0-1 invertible con sumas por fila prescritas
    """
    matrix: np.ndarray
    row_sums: Tuple[int, ...]
    determinant: int

    @field_validator('matrix', mode='before')
    @classmethod
    def validate_matrix(cls, v):
        array = np.array(v)
        if array.ndim != 2 or array.shape[0] != array.shape[1] or array.shape[0] < 1:
            raise ValueError('El diseño debe ser una matriz cuadrada')
        if not np.all((array == 0) | (array == 1)):
            raise ValueError('El diseño solo admite entradas 0 y 1')
        return _frozen_array(array, dtype=np.int64)

    @model_validator(mode='after')
    def validate_design(self):
        if tuple(int(s) for s in self.matrix.sum(axis=1)) != tuple(self.row_sums):
            raise ValueError('Las sumas por fila no coinciden con la matriz')
        if self.determinant == 0:
            raise ValueError('El diseño es singular')
        exact = int(sympy.Matrix(self.matrix.tolist()).det(method="bareiss"))
        if exact != self.determinant:
            raise ValueError(f'Determinante declarado {self.determinant} distinto del exacto {exact}')
        return self

    @property
    def size(self) -> int:
        return self.matrix.shape[0]


class Subspace(_ArrayModel):
    """
    Subespacio W dado por filas ortonormales, o por su normal si complement_encoded
    """
    ambient: int = Field(..., ge=2)
    basis: np.ndarray
    complement_encoded: bool = False

    @field_validator('basis', mode='before')
    @classmethod
    def validate_basis(cls, v):
        array = np.atleast_2d(np.array(v))
        return _frozen_array(array, dtype=_numeric_dtype(array), ndim=2)

    @model_validator(mode='after')
    def validate_subspace(self):
        rows, cols = self.basis.shape
        if cols != self.ambient:
            raise ValueError(f'Las filas deben tener longitud {self.ambient}')
        if self.complement_encoded and rows != 1:
            raise ValueError('Un subespacio codificado por complemento guarda una sola normal')
        gram = self.basis.conj() @ self.basis.T
        if np.max(np.abs(gram - np.eye(rows))) > settings.ORTHONORMAL_TOL:
            raise ValueError('La base del subespacio no es ortonormal')
        if not 1 <= self.dimension <= self.ambient - 1:
            raise ValueError(
                f'La dimensión {self.dimension} debe estar en [1, {self.ambient - 1}]')
        return self

    @property
    def dimension(self) -> int:
        if self.complement_encoded:
            return self.ambient - 1
        return self.basis.shape[0]

    @property
    def is_complex(self) -> bool:
        return np.iscomplexobj(self.basis)

    def projection(self) -> np.ndarray:
        """Proyección ortogonal P sobre W (matriz M x M)"""
        outer = self.basis.T @ self.basis.conj()
        if self.complement_encoded:
            return np.eye(self.ambient) - outer
        return outer

    def decoded_basis(self) -> np.ndarray:
        """Filas ortonormales que generan W"""
        if not self.complement_encoded:
            return self.basis
        return null_space(self.basis.conj()).T


class SubspaceFamily(_ArrayModel):
    """
    Diseño de medida {W_n} sobre un mismo espacio ambiente
    """
    ambient: int = Field(..., ge=2)
    subspaces: Tuple[Subspace, ...]
    field: FieldKind = FieldKind.REAL

    @model_validator(mode='after')
    def validate_family(self):
        if not self.subspaces:
            raise ValueError('La familia necesita al menos un subespacio')
        for k, subspace in enumerate(self.subspaces):
            if subspace.ambient != self.ambient:
                raise ValueError(f'El subespacio {k} no comparte la dimensión ambiente')
            if self.field == FieldKind.REAL and subspace.is_complex:
                raise ValueError(f'El subespacio {k} es complejo en una familia real')
        return self

    @property
    def count(self) -> int:
        return len(self.subspaces)

    @property
    def dims(self) -> Tuple[int, ...]:
        return tuple(s.dimension for s in self.subspaces)

    def projections(self) -> np.ndarray:
        """Pila (N, M, M) de proyecciones"""
        return np.stack([s.projection() for s in self.subspaces])


class Recipe(_ArrayModel):
    """
    Procedencia de una familia 2M-1: frame base, conjuntos de índices y diseños
    """
    base_frame: Frame
    index_sets: Tuple[Tuple[int, ...], ...]
    design_a: ZeroOneDesign
    design_b: ZeroOneDesign
    complement_flags: Tuple[bool, ...]

    @model_validator(mode='after')
    def validate_recipe(self):
        M = self.base_frame.ambient
        if self.base_frame.count != 2 * M - 1:
            raise ValueError(f'El frame base debe tener {2 * M - 1} vectores')
        if self.design_a.size != M or self.design_b.size != M - 1:
            raise ValueError('Los diseños no tienen el tamaño adecuado')
        if len(self.index_sets) != 2 * M - 1 or len(self.complement_flags) != 2 * M - 1:
            raise ValueError('Se esperan 2M-1 conjuntos de índices y banderas')
        for k in range(M):
            expected = tuple(int(z) for z in np.flatnonzero(self.design_a.matrix[k]))
            if tuple(self.index_sets[k]) != expected or self.complement_flags[k]:
                raise ValueError(f'El conjunto de índices {k} no coincide con el diseño A')
        for k in range(M - 1):
            expected = tuple(M + int(z) for z in np.flatnonzero(self.design_b.matrix[k]))
            if tuple(self.index_sets[M + k]) != expected:
                raise ValueError(f'El conjunto de índices {M + k} no coincide con el diseño B')
            if self.complement_flags[M + k] and len(expected) != 1:
                raise ValueError('Un subespacio codificado por complemento usa un único vector')
        return self

    @property
    def ambient(self) -> int:
        return self.base_frame.ambient

    def dims(self) -> Tuple[int, ...]:
        """Dimensiones decodificadas de cada subespacio"""
        M = self.ambient
        return tuple(M - 1 if flag else len(index_set)
                     for index_set, flag in zip(self.index_sets, self.complement_flags))


class HyperplaneFamily(_ArrayModel):
    """
    Familia de hiperplanos W_n = (span φ_n)^⊥ con I = Σ a_n φ_n φ_n^T
    """
    family: SubspaceFamily
    normals: np.ndarray
    weights: np.ndarray

    @field_validator('normals', mode='before')
    @classmethod
    def validate_normals(cls, v):
        return _frozen_array(v, dtype=float, ndim=2)

    @field_validator('weights', mode='before')
    @classmethod
    def validate_weights(cls, v):
        return _frozen_array(v, dtype=float, ndim=1)

    @model_validator(mode='after')
    def validate_hyperplanes(self):
        N, M = self.normals.shape
        tol = settings.ORTHONORMAL_TOL
        if self.family.count != N or self.weights.shape[0] != N or self.family.ambient != M:
            raise ValueError('Normales, pesos y subespacios deben tener la misma longitud')
        if np.max(np.abs(np.linalg.norm(self.normals, axis=1) - 1.0)) > tol:
            raise ValueError('Las normales deben ser unitarias')
        for n, subspace in enumerate(self.family.subspaces):
            expected = np.eye(M) - np.outer(self.normals[n], self.normals[n])
            if subspace.dimension != M - 1 or np.max(np.abs(subspace.projection() - expected)) > tol:
                raise ValueError(f'El subespacio {n} no es el hiperplano de su normal')
        resolution = np.einsum('n,ni,nj->ij', self.weights, self.normals, self.normals)
        if np.max(np.abs(resolution - np.eye(M))) > tol:
            raise ValueError('Σ a_n φ_n φ_n^T no es la identidad')
        if abs(self.weights.sum() - 1.0) <= settings.HYPERPLANE_WEIGHT_MARGIN:
            raise ValueError('La suma de los pesos no puede ser 1')
        return self

    @property
    def ambient(self) -> int:
        return self.family.ambient

    def frame_vectors(self) -> np.ndarray:
        """Vectores de Parseval φ_n √a_n"""
        return self.normals * np.sqrt(self.weights)[:, None]


class MeasurementVector(_ArrayModel):
    """
    Normas al cuadrado de las proyecciones, una por subespacio
    """
    values: np.ndarray

    @field_validator('values', mode='before')
    @classmethod
    def validate_values(cls, v):
        array = np.array(v, dtype=float).reshape(-1)
        if not np.all(np.isfinite(array)):
            raise ValueError('Las medidas deben ser finitas')
        scale = max(1.0, float(np.max(np.abs(array)))) if array.size else 1.0
        if np.any(array < -settings.LINALG_TOL * scale):
            raise ValueError('Las medidas no pueden ser negativas')
        return _frozen_array(np.clip(array, 0.0, None))

    def __len__(self) -> int:
        return self.values.shape[0]


class LiftOperator(_ArrayModel):
    """
    Matriz de F: H^{MxM} -> R^N en la base ortonormal simétrica
    """
    ambient: int
    matrix: np.ndarray

    @field_validator('matrix', mode='before')
    @classmethod
    def validate_matrix(cls, v):
        return _frozen_array(v, dtype=float, ndim=2)

    @model_validator(mode='after')
    def validate_shape(self):
        if self.matrix.shape[1] != self.ambient * (self.ambient + 1) // 2:
            raise ValueError('El número de columnas no es M(M+1)/2')
        return self

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.matrix, 2)) if self.matrix.size else 0.0


class WitnessMatrix(_ArrayModel):
    """
    C simétrica no nula de rango <= 2 con F(C) = 0
    """
    matrix: np.ndarray
    residual: float = Field(..., ge=0)
    rank: int = Field(..., ge=1, le=2)
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    strategy: str

    @field_validator('matrix', mode='before')
    @classmethod
    def validate_matrix(cls, v):
        array = np.array(v, dtype=float)
        if array.ndim != 2 or array.shape[0] != array.shape[1]:
            raise ValueError('El testigo debe ser una matriz cuadrada')
        if not np.any(array):
            raise ValueError('El testigo no puede ser nulo')
        return _frozen_array((array + array.T) / 2)

    @field_validator('eigenvalues', mode='before')
    @classmethod
    def validate_eigenvalues(cls, v):
        return _frozen_array(v, dtype=float, ndim=1)

    @field_validator('eigenvectors', mode='before')
    @classmethod
    def validate_eigenvectors(cls, v):
        return _frozen_array(v, dtype=float, ndim=2)


class WitnessPair(_ArrayModel):
    """
    Par (u, v) no equivalente por signo con medidas iguales
    """
    u: np.ndarray
    v: np.ndarray
    mismatch: float = Field(..., ge=0)
    source: str

    @field_validator('u', 'v', mode='before')
    @classmethod
    def validate_vector(cls, value):
        return _frozen_array(value, dtype=float, ndim=1)


class EmpiricalReport(_ArrayModel):
    """
    Evidencia empírica (no certificado)
    """
    trials: int = Field(..., ge=0)
    failures: int = Field(..., ge=0)
    min_separation: float
    passed: bool
    label: str = "empirical evidence only"


class Certificate(_ArrayModel):
    """
    Resultado de verificar una familia
    """
    kind: CertificateKind
    heuristic: bool = False
    reasons: Tuple[str, ...] = ()
    complement_report: Optional[ComplementReport] = None
    design_determinants: Optional[Tuple[int, int]] = None
    witness_matrix: Optional[WitnessMatrix] = None
    witness_pair: Optional[WitnessPair] = None
    empirical: Optional[EmpiricalReport] = None
    stability_margin: Optional[float] = None

    @model_validator(mode='after')
    def validate_certificate(self):
        if self.kind == CertificateKind.STRUCTURED:
            if self.design_determinants is None or 0 in self.design_determinants:
                raise ValueError('Un certificado estructurado requiere diseños invertibles')
            if self.complement_report is None or not self.complement_report.holds:
                raise ValueError('Un certificado estructurado requiere la propiedad del complemento')
        if self.kind == CertificateKind.REFUTED:
            if self.witness_matrix is None and self.witness_pair is None:
                raise ValueError('Una refutación requiere un testigo')
        return self


class ReconstructionResult(_ArrayModel):
    """
    Señal recuperada salvo signo global
    """
    signal: np.ndarray
    residual: float = Field(..., ge=0)
    sign_convention: str = "first-nonzero-nonnegative"

    @field_validator('signal', mode='before')
    @classmethod
    def validate_signal(cls, v):
        return _frozen_array(v, dtype=float, ndim=1)
