"""
Construcción de familias de subespacios: la construcción real con 2M-1
subespacios, la compleja con 4M-3, familias de hiperplanos a partir de frames
de Parseval, el ejemplo de R^3 y la extensión a hiperplanos de un par testigo.
"""

import logging
import math
from typing import List, Optional, Sequence, Tuple

import numpy as np

from config import settings
from schemas import (FieldKind, Frame, HyperplaneFamily, Recipe, Subspace,
                     SubspaceFamily, ZeroOneDesign)
from services.binary_designs import trivial_design, zero_one_invertible
from services.frames import ensure_full_spark, is_full_spark, is_parseval, stacked_orthobases
from services.linalg_core import (RngState, as_vector, null_space, orthonormalize,
                                  random_unitary)
from services.verifier import measure
from utils.exceptions import ConstructionError, DomainError, ResourceLimitError, WitnessError
from utils.validators import ProfileValidator

logger = logging.getLogger(__name__)


def _encodes_complement(d: int, M: int) -> bool:
    """Un subespacio del segundo bloque de dimensión M-1 se guarda por su normal"""
    return d > max(M - 2, 1)


def _second_block_design(dims: Sequence[int], M: int) -> Tuple[ZeroOneDesign, List[bool]]:
    flags = [_encodes_complement(d, M) for d in dims]
    if M == 2:
        return trivial_design(), flags
    effective = [1 if flag else d for d, flag in zip(dims, flags)]
    return zero_one_invertible(effective), flags


def _subspaces_from_design(vectors: np.ndarray, design: ZeroOneDesign,
                           flags: Sequence[bool], M: int) -> List[Subspace]:
    subspaces = []
    for k, flag in enumerate(flags):
        rows = vectors[np.flatnonzero(design.matrix[k])]
        subspaces.append(Subspace(ambient=M, basis=rows, complement_encoded=flag))
    return subspaces


def family_from_recipe(recipe: Recipe) -> SubspaceFamily:
    """Familia descrita por una receta"""
    M = recipe.ambient
    vectors = recipe.base_frame.vectors
    subspaces = [
        Subspace(ambient=M, basis=vectors[list(index_set)], complement_encoded=flag)
        for index_set, flag in zip(recipe.index_sets, recipe.complement_flags)
    ]
    return SubspaceFamily(ambient=M, subspaces=tuple(subspaces), field=FieldKind.REAL)


def build_real_family(M: int, dims: Sequence[int],
                      rng: RngState) -> Tuple[SubspaceFamily, Recipe]:
    """
    Familia de 2M-1 subespacios de R^M con dimensiones `dims`.

    Los M primeros son sumas de vectores del primer bloque ortonormal según el
    diseño A; los M-1 restantes usan el segundo bloque según el diseño B, y
    los de dimensión M-1 se codifican como complemento de un único vector.
    """
    M = ProfileValidator.validate_ambient(M)
    dims = ProfileValidator.validate_dims(dims, M, 2 * M - 1)

    stacked = stacked_orthobases(M, 2, rng)
    base = Frame(vectors=stacked.vectors[:2 * M - 1], blocks=((0, M), (M, 2 * M - 1)))

    design_a = zero_one_invertible(dims[:M])
    design_b, flags_b = _second_block_design(dims[M:], M)

    index_sets = [tuple(int(z) for z in np.flatnonzero(row)) for row in design_a.matrix]
    index_sets += [tuple(M + int(z) for z in np.flatnonzero(row)) for row in design_b.matrix]

    recipe = Recipe(
        base_frame=base,
        index_sets=tuple(index_sets),
        design_a=design_a,
        design_b=design_b,
        complement_flags=tuple([False] * M + flags_b),
    )
    family = family_from_recipe(recipe)
    if family.dims != tuple(dims):
        raise ConstructionError(f"Dimensiones construidas {family.dims} != pedidas {tuple(dims)}")

    logger.info(f"🏗️ Familia real de {2 * M - 1} subespacios en R^{M} con dimensiones {dims}")
    return family, recipe


def build_complex_family(M: int, dims: Sequence[int], rng: RngState) -> SubspaceFamily:
    """
    Familia de 4M-3 subespacios de C^M: todas las filas de una unitaria y M-1
    filas de otras tres, agrupadas con diseños 0-1 como en el caso real.
    Sin certificado: solo admite comprobación empírica.
    """
    M = ProfileValidator.validate_ambient(M)
    dims = ProfileValidator.validate_dims(dims, M, 4 * M - 3)

    unitaries = [random_unitary(M, rng) for _ in range(4)]

    design_a = zero_one_invertible(dims[:M])
    subspaces = _subspaces_from_design(unitaries[0], design_a, [False] * M, M)
    for block in range(3):
        chunk = dims[M + block * (M - 1): M + (block + 1) * (M - 1)]
        design, flags = _second_block_design(chunk, M)
        subspaces += _subspaces_from_design(unitaries[block + 1][:M - 1], design, flags, M)

    logger.info(f"🏗️ Familia compleja de {4 * M - 3} subespacios en C^{M} (solo evidencia empírica)")
    return SubspaceFamily(ambient=M, subspaces=tuple(subspaces), field=FieldKind.COMPLEX)


def _min_pairwise_cosine(vectors: np.ndarray) -> float:
    unit = vectors / np.linalg.norm(vectors, axis=1)[:, None]
    gram = np.abs(unit @ unit.T)
    upper = np.triu_indices(vectors.shape[0], k=1)
    return float(gram[upper].min()) if upper[0].size else math.inf


def hyperplane_family_from_frame(frame: Frame) -> HyperplaneFamily:
    """Hiperplanos W_n = φ_n^⊥ con pesos a_n = ‖φ_n‖² para un frame de Parseval"""
    N, M = frame.count, frame.ambient
    if N <= M:
        raise DomainError(f"Se necesitan más vectores que la dimensión (N={N}, M={M})")
    if not is_parseval(frame):
        raise DomainError("El frame no es de Parseval")
    if _min_pairwise_cosine(frame.vectors) <= settings.NON_ORTHOGONALITY_TOL:
        raise DomainError("El frame contiene dos vectores ortogonales")
    try:
        if not is_full_spark(frame):
            raise DomainError("El frame no es full spark")
    except ResourceLimitError:
        logger.warning("⚠️ Full spark no comprobado: supera la cota de enumeración")
    if N < 2 * M - 1:
        logger.warning(f"⚠️ Con N={N} < 2M-1={2 * M - 1} los hiperplanos no permiten recuperación")

    weights = np.sum(frame.vectors ** 2, axis=1)
    normals = frame.vectors / np.sqrt(weights)[:, None]
    subspaces = tuple(Subspace(ambient=M, basis=normal[None, :], complement_encoded=True)
                      for normal in normals)
    return HyperplaneFamily(
        family=SubspaceFamily(ambient=M, subspaces=subspaces, field=FieldKind.REAL),
        normals=normals,
        weights=weights,
    )


def build_hyperplane_family(M: int, N: int, rng: RngState) -> HyperplaneFamily:
    """Frame de Parseval full spark sin pares ortogonales, remuestreado hasta cumplirse"""
    M = ProfileValidator.validate_ambient(M)
    N = ProfileValidator.validate_count(N, "N", minimum=M + 1)

    for attempt in range(1, settings.HYPERPLANE_RESAMPLES + 1):
        gaussian = rng.normal((N, M))
        eigenvalues, eigenvectors = np.linalg.eigh(gaussian.T @ gaussian)
        if eigenvalues.min() <= 0:
            continue
        inverse_root = (eigenvectors / np.sqrt(eigenvalues)) @ eigenvectors.T
        frame = Frame(vectors=gaussian @ inverse_root)

        if _min_pairwise_cosine(frame.vectors) <= settings.NON_ORTHOGONALITY_TOL:
            logger.debug(f"🔁 Intento {attempt}: par casi ortogonal, remuestreando")
            continue
        if not ensure_full_spark(frame, rng):
            logger.debug(f"🔁 Intento {attempt}: frame no full spark, remuestreando")
            continue
        logger.info(f"🏗️ Familia de {N} hiperplanos en R^{M} (intento {attempt})")
        return hyperplane_family_from_frame(frame)

    raise ConstructionError(
        f"Presupuesto de remuestreo agotado ({settings.HYPERPLANE_RESAMPLES} intentos)")


def r3_parseval_example() -> Frame:
    """Cinco vectores equiespaciados en el círculo de radio √(2/5) a altura 1/√5"""
    radius = math.sqrt(2 / 5)
    height = 1 / math.sqrt(5)
    angles = 2 * math.pi * np.arange(5) / 5
    vectors = np.column_stack([radius * np.cos(angles), radius * np.sin(angles),
                               np.full(5, height)])
    return Frame(vectors=vectors)


def _r3_bases(rng: Optional[RngState]) -> Frame:
    rng = rng if rng is not None else RngState(settings.R3_EXAMPLE_SEED)
    return stacked_orthobases(3, 2, rng)


def r3_example_recipe(rng: Optional[RngState] = None) -> Recipe:
    """
    Receta de la familia W_1..W_5 del ejemplo de R^3:
    W_1 = span{φ1, φ3}, W_2 = span{φ2, φ3}, W_3 = span{φ3}, W_4 = span{ψ1}, W_5 = span{ψ2}.
    """
    stacked = _r3_bases(rng)
    base = Frame(vectors=stacked.vectors[:5], blocks=((0, 3), (3, 5)))
    design_a = ZeroOneDesign(matrix=[[1, 0, 1], [0, 1, 1], [0, 0, 1]],
                             row_sums=(2, 2, 1), determinant=1)
    design_b = ZeroOneDesign(matrix=[[1, 0], [0, 1]], row_sums=(1, 1), determinant=1)
    return Recipe(
        base_frame=base,
        index_sets=((0, 2), (1, 2), (2,), (3,), (4,)),
        design_a=design_a,
        design_b=design_b,
        complement_flags=(False,) * 5,
    )


def r3_counterexample_family(
        rng: Optional[RngState] = None) -> Tuple[SubspaceFamily, SubspaceFamily]:
    """({W_n}, {W_n^⊥}) del ejemplo de R^3; los complementos cumplen Q1 + Q2 = Q3"""
    stacked = _r3_bases(rng)
    phi, psi = stacked.vectors[:3], stacked.vectors[3:]

    def family(rows_list):
        return SubspaceFamily(
            ambient=3,
            subspaces=tuple(Subspace(ambient=3, basis=rows) for rows in rows_list),
            field=FieldKind.REAL,
        )

    originals = family([phi[[0, 2]], phi[[1, 2]], phi[[2]], psi[[0]], psi[[1]]])
    complements = family([phi[[1]], phi[[0]], phi[[0, 1]], psi[[1, 2]], psi[[0, 2]]])
    return originals, complements


def _equal_measurements(family: SubspaceFamily, x: np.ndarray, y: np.ndarray, tol: float) -> bool:
    gap = np.max(np.abs(measure(family, x).values - measure(family, y).values))
    return gap <= tol * max(float(x @ x), float(y @ y))


def _balanced_direction(ux: np.ndarray, vy: np.ndarray) -> np.ndarray:
    """Unitario z en el plano con |<u,z>| = |<v,z>| por bisección en el ángulo"""

    def f(theta: float) -> float:
        z = np.array([math.cos(theta), math.sin(theta)])
        return abs(ux @ z) - abs(vy @ z)

    theta_low = math.atan2(ux[1], ux[0]) + math.pi / 2   # z1 ⊥ u: f <= 0
    theta_high = math.atan2(vy[1], vy[0]) + math.pi / 2  # z2 ⊥ v: f >= 0
    if f(theta_low) == 0:
        return np.array([math.cos(theta_low), math.sin(theta_low)])

    while abs(theta_high - theta_low) > settings.BISECTION_TOL:
        middle = (theta_low + theta_high) / 2
        value = f(middle)
        if value == 0:
            theta_low = theta_high = middle
            break
        if value < 0:
            theta_low = middle
        else:
            theta_high = middle
    theta = (theta_low + theta_high) / 2
    return np.array([math.cos(theta), math.sin(theta)])


def extend_to_hyperplanes(family: SubspaceFamily, x, y,
                          tol: Optional[float] = None) -> SubspaceFamily:
    """
    Agranda cada W_n hasta dimensión M-1 conservando ‖P_n x‖ = ‖P_n y‖:
    se añade un z0 del plano Z ⊆ W_n^⊥ con |<P_Z x, z0>| = |<P_Z y, z0>|.
    """
    if family.field != FieldKind.REAL:
        raise DomainError("La extensión a hiperplanos solo está definida en el caso real")
    tol = settings.RECOVERY_TOL if tol is None else tol
    M = family.ambient
    x, y = as_vector(x, M), as_vector(y, M)

    scale = max(np.linalg.norm(x), np.linalg.norm(y))
    if np.linalg.norm(x) == 0 or np.linalg.norm(y) == 0:
        raise WitnessError("Los vectores del testigo deben ser no nulos")
    if min(np.linalg.norm(x - y), np.linalg.norm(x + y)) <= tol * scale:
        raise WitnessError("x e y son equivalentes salvo signo")
    if not _equal_measurements(family, x, y, tol):
        raise WitnessError("x e y no tienen medidas iguales: no es un testigo")

    extended = []
    for subspace in family.subspaces:
        if subspace.dimension == M - 1:
            extended.append(subspace)
            continue
        basis = subspace.decoded_basis()
        while basis.shape[0] < M - 1:
            plane = null_space(basis)[:2]
            z0 = _balanced_direction(plane @ x, plane @ y) @ plane
            basis = orthonormalize(np.vstack([basis, z0]))
        extended.append(Subspace(ambient=M, basis=basis))

    result = SubspaceFamily(ambient=M, subspaces=tuple(extended), field=FieldKind.REAL)
    if not _equal_measurements(result, x, y, tol):
        raise ConstructionError("La extensión no conservó la igualdad de medidas")
    logger.info(f"🧩 Familia extendida a {result.count} hiperplanos en R^{M}")
    return result
