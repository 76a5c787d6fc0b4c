import math
from typing import Iterable, List, Sequence

from .exceptions import DomainError


class ProfileValidator:
    """
    Validador de dimensiones ambiente y perfiles de dimensiones
    """

    MIN_AMBIENT = 2
    MAX_AMBIENT = 64

    @classmethod
    def validate_ambient(cls, M: int) -> int:
        """Valida la dimensión del espacio ambiente"""
        if isinstance(M, bool) or not hasattr(M, "__index__"):
            raise DomainError(f"La dimensión ambiente debe ser un entero, se recibió {M!r}")
        M = int(M)
        if not cls.MIN_AMBIENT <= M <= cls.MAX_AMBIENT:
            raise DomainError(
                f"La dimensión ambiente debe estar entre {cls.MIN_AMBIENT} y {cls.MAX_AMBIENT}, "
                f"se recibió {M}")
        return M

    @classmethod
    def validate_dims(cls, dims: Sequence[int], M: int, expected: int) -> List[int]:
        """Valida un perfil de `expected` dimensiones en [1, M-1]"""
        dims = [int(d) for d in dims]
        if len(dims) != expected:
            raise DomainError(
                f"Se esperaban {expected} dimensiones para M={M}, se recibieron {len(dims)}")
        bad = [d for d in dims if not 1 <= d <= M - 1]
        if bad:
            raise DomainError(
                f"Las dimensiones deben estar en [1, {M - 1}], fuera de rango: {bad}")
        return dims

    @classmethod
    def validate_count(cls, value: int, field_name: str, minimum: int = 1) -> int:
        """Valida un contador entero con mínimo"""
        if isinstance(value, bool) or int(value) != value:
            raise DomainError(f"{field_name} debe ser un entero")
        value = int(value)
        if value < minimum:
            raise DomainError(f"{field_name} debe ser al menos {minimum}, se recibió {value}")
        return value


def parse_int_list(text: str, field_name: str) -> List[int]:
    """Convierte 'a,b,c' en lista de enteros"""
    if not isinstance(text, str) or not text.strip():
        raise DomainError(f"{field_name} no puede estar vacío")
    values = []
    for chunk in text.split(','):
        chunk = chunk.strip()
        if not chunk:
            raise DomainError(f"{field_name} contiene un elemento vacío")
        try:
            values.append(int(chunk))
        except ValueError:
            raise DomainError(f"{field_name}: '{chunk}' no es un entero") from None
    return values


def validate_tolerance(value: float, field_name: str) -> float:
    """Valida que una tolerancia sea finita y positiva"""
    try:
        value = float(value)
    except (TypeError, ValueError):
        raise DomainError(f"{field_name} debe ser un número") from None
    if not math.isfinite(value) or value <= 0:
        raise DomainError(f"{field_name} debe ser finita y positiva")
    return value


def validate_seed(value: int) -> int:
    """Valida una semilla entera sin signo de 64 bits"""
    if isinstance(value, bool) or int(value) != value:
        raise DomainError("La semilla debe ser un entero")
    value = int(value)
    if not 0 <= value < 2**64:
        raise DomainError("La semilla debe estar en [0, 2^64)")
    return value


def validate_index_set(indices: Iterable[int], N: int, field_name: str = "indices") -> List[int]:
    """Valida un conjunto de índices 0-based estrictamente creciente"""
    indices = [int(i) for i in indices]
    if len(set(indices)) != len(indices):
        raise DomainError(f"{field_name} contiene índices repetidos")
    if indices != sorted(indices):
        raise DomainError(f"{field_name} debe estar en orden creciente")
    if indices and not (0 <= indices[0] and indices[-1] < N):
        raise DomainError(f"{field_name} fuera de rango [0, {N})")
    return indices
