from typing import Optional


class SubspaceRetrievalError(Exception):
    """Excepción base de la librería"""
    pass


class DomainError(SubspaceRetrievalError, ValueError):
    """Argumento fuera de dominio o precondición violada"""
    pass


class DependencyError(SubspaceRetrievalError):
    """Conjunto de vectores numéricamente dependiente"""
    pass


class ResourceLimitError(SubspaceRetrievalError):
    """La enumeración exhaustiva supera la cota configurada"""
    pass


class ConstructionError(SubspaceRetrievalError):
    """Presupuesto de reintentos o remuestreos agotado"""
    pass


class WitnessError(SubspaceRetrievalError):
    """Testigo de no inyectividad no válido"""
    pass


class RankOneWitnessError(WitnessError):
    """Testigo de rango 1: algún vector no nulo tiene medidas idénticamente nulas"""

    def __init__(self, message: str, kernel_vector=None):
        super().__init__(message)
        self.kernel_vector = kernel_vector


class InconsistencyError(SubspaceRetrievalError):
    """Las medidas no corresponden a ninguna señal"""
    pass


class AmbiguityError(SubspaceRetrievalError):
    """Dos patrones de signo no equivalentes explican las medidas"""
    pass


class FileFormatError(SubspaceRetrievalError):
    """Archivo con formato inválido"""
    pass


EXIT_OK = 0
EXIT_USAGE = 1
EXIT_REFUTED = 2
EXIT_INCONCLUSIVE = 3
EXIT_INCONSISTENT = 4


def exit_code_for(exc: BaseException) -> int:
    """Código de salida de la CLI para una excepción"""
    if isinstance(exc, InconsistencyError):
        return EXIT_INCONSISTENT
    if isinstance(exc, AmbiguityError):
        return EXIT_INCONCLUSIVE
    return EXIT_USAGE


def create_diagnostic(exc: BaseException, error_type: Optional[str] = None) -> str:
    """Crear diagnóstico estandarizado de una línea"""
    kind = error_type or type(exc).__name__
    message = " ".join(str(exc).split()) or "error sin mensaje"
    return f"error [{kind}]: {message}"
