"""
Logger para WittTower.
Los mensajes van a stderr para no mezclarse con los reportes que la CLI
escribe en stdout.
"""

import logging
from typing import Set, Union

from config import settings

DEFAULT_FORMAT = "[%(asctime)s] [%(levelname)s] %(name)s: %(message)s"

# Loggers creados por setup_logger, para poder cambiar su nivel en bloque
_registered: Set[str] = set()

def setup_logger(name: str = "witttower", level: Union[int, str, None] = None):
    """
    Configura y retorna un logger básico reutilizable.

    Args:
        name (str): Nombre del logger
        level (Union[int, str, None]): Nivel de logging. Si es None se usa
            LOG_LEVEL de la configuración.

    Returns:
        logging.Logger: Logger configurado
    """
    logger = logging.getLogger(name)
    if not logger.handlers:
        handler = logging.StreamHandler()
        handler.setFormatter(logging.Formatter(DEFAULT_FORMAT))
        logger.addHandler(handler)
    if level is None:
        level = settings.LOG_LEVEL
    logger.setLevel(level.upper() if isinstance(level, str) else level)
    _registered.add(name)
    return logger

def set_global_level(level: Union[int, str]) -> None:
    """
    Cambia el nivel de todos los loggers creados con setup_logger.

    Args:
        level (Union[int, str]): Nuevo nivel (ej: "DEBUG")
    """
    for name in sorted(_registered):
        logging.getLogger(name).setLevel(
            level.upper() if isinstance(level, str) else level
        )
