"""
Utilidades de la librería
"""

from .exceptions import SubspaceRetrievalError, create_diagnostic, exit_code_for
from .logging_config import setup_logging
from .validators import ProfileValidator, parse_int_list

__all__ = [
    'SubspaceRetrievalError',
    'create_diagnostic',
    'exit_code_for',
    'setup_logging',
    'ProfileValidator',
    'parse_int_list',
]
