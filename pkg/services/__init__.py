"""
Servicios de la librería: construcción, verificación y reconstrucción
"""

from .family_builder import build_complex_family, build_hyperplane_family, build_real_family
from .reconstruct import reconstruct, reconstruct_hyperplanes
from .verifier import certify_structured, measure, verify_family

__all__ = [
    'build_real_family',
    'build_complex_family',
    'build_hyperplane_family',
    'certify_structured',
    'measure',
    'verify_family',
    'reconstruct',
    'reconstruct_hyperplanes',
]
