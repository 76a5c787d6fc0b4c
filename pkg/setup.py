from setuptools import setup
import os

# Obtener la versión desde las variables de entorno o usar un valor por defecto
version = os.getenv('APP_VERSION', '1.0.0')

# Requirements básicos para instalación
requirements = [
    "numpy>=1.24,<3",
    "scipy>=1.10",
    "sympy>=1.12",
    "python-dotenv==1.0.0",
    "pydantic==2.8.2",
    "pydantic-settings==2.4.0",
]

# Módulos de primer nivel y paquetes definidos manualmente
py_modules = ['cli', 'config', 'schemas']
packages = [
    'services',
    'utils',
]

# Leer README.md de forma segura
try:
    with open("README.md", "r", encoding="utf-8") as fh:
        long_description = fh.read()
except OSError:
    long_description = "Recuperación de fase a partir de normas de proyecciones sobre subespacios"

setup(
    name="subspace-phase-retrieval",
    version=version,
    description="Recuperación de fase a partir de normas de proyecciones sobre subespacios",
    long_description=long_description,
    long_description_content_type="text/markdown",
    py_modules=py_modules,
    packages=packages,
    package_dir={'': '.'},
    classifiers=[
        "Development Status :: 4 - Beta",
        "Intended Audience :: Science/Research",
        "Operating System :: OS Independent",
        "Programming Language :: Python :: 3.9",
        "Programming Language :: Python :: 3.10",
        "Programming Language :: Python :: 3.11",
        "Topic :: Scientific/Engineering :: Mathematics",
    ],
    python_requires=">=3.9",
    install_requires=requirements,
    extras_require={
        "dev": [
            "pytest>=7.0.0",
            "hypothesis>=6.100",
        ],
    },
    entry_points={
        "console_scripts": [
            "subspace-retrieval=cli:main",
        ],
    },
)
