import logging
import sys
from typing import Optional


class ColoredFormatter(logging.Formatter):
    """Formatter con colores para terminal"""

    COLORS = {
        'DEBUG': '\033[36m',    # Cyan
        'INFO': '\033[32m',     # Green
        'WARNING': '\033[33m',  # Yellow
        'ERROR': '\033[31m',    # Red
        'CRITICAL': '\033[35m',  # Magenta
        'ENDC': '\033[0m'       # End color
    }

    def __init__(self, fmt=None, datefmt=None, use_color: bool = True):
        super().__init__(fmt, datefmt)
        self.use_color = use_color

    def format(self, record):
        if not self.use_color:
            return super().format(record)
        original = record.levelname
        log_color = self.COLORS.get(original, self.COLORS['ENDC'])
        record.levelname = f"{log_color}{original}{self.COLORS['ENDC']}"
        try:
            return super().format(record)
        finally:
            record.levelname = original


_INSTALLED_HANDLERS = []


def setup_logging(level: str = "INFO", log_file: Optional[str] = None, stream=None):
    """Configurar logging de la librería y la CLI (consola en stderr)"""

    format_string = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"
    date_format = "%Y-%m-%d %H:%M:%S"
    numeric_level = getattr(logging, level.upper(), None)
    if not isinstance(numeric_level, int):
        raise ValueError(f"Nivel de logging desconocido: {level}")

    root_logger = logging.getLogger()
    root_logger.setLevel(numeric_level)

    # Idempotente: retirar los handlers de llamadas anteriores
    for handler in _INSTALLED_HANDLERS:
        root_logger.removeHandler(handler)
        handler.close()
    _INSTALLED_HANDLERS.clear()

    stream = stream if stream is not None else sys.stderr
    console_handler = logging.StreamHandler(stream)
    console_handler.setLevel(numeric_level)
    is_tty = bool(getattr(stream, "isatty", lambda: False)())
    console_handler.setFormatter(
        ColoredFormatter(format_string, date_format, use_color=is_tty))

    handlers = [console_handler]

    if log_file:
        file_handler = logging.FileHandler(log_file)
        file_handler.setLevel(logging.INFO)
        file_handler.setFormatter(
            logging.Formatter(format_string, date_format))
        handlers.append(file_handler)

    for handler in handlers:
        root_logger.addHandler(handler)
        _INSTALLED_HANDLERS.append(handler)

    return root_logger
