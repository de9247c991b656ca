"""
Presupuesto de búsqueda thread-safe.
Limita el número de evaluaciones de candidatos por clave en las búsquedas
heurísticas (ej: seed_search).
"""

import threading
from collections import defaultdict
from typing import Dict
import logging

logger = logging.getLogger(__name__)

class SearchBudget:
    """
    Presupuesto de evaluaciones por clave.

    Attributes:
        limit (int): Número máximo de evaluaciones por clave
        storage (Dict[str, int]): Evaluaciones consumidas por clave
        lock (threading.Lock): Lock para operaciones thread-safe
    """

    def __init__(self, limit: int):
        """
        Inicializa el presupuesto.

        Args:
            limit (int): Número máximo de evaluaciones por clave

        Raises:
            ValueError: Si limit no es positivo
        """
        if limit < 1:
            raise ValueError("limit debe ser mayor que 0")
        self.limit = limit
        self.storage: Dict[str, int] = defaultdict(int)
        self.lock = threading.Lock()
        logger.debug(f"SearchBudget inicializado: {limit} evaluaciones por clave")

    def consume(self, key: str = "default", amount: int = 1) -> bool:
        """
        Intenta consumir evaluaciones del presupuesto.

        Args:
            key (str): Clave del presupuesto
            amount (int): Evaluaciones a consumir

        Returns:
            bool: True si quedaba presupuesto, False si se agotó
        """
        with self.lock:
            if self.storage[key] + amount > self.limit:
                logger.warning(f"Presupuesto agotado para {key}: {self.storage[key]} usadas")
                return False
            self.storage[key] += amount
            return True

    def used(self, key: str = "default") -> int:
        with self.lock:
            return self.storage[key]

    def remaining(self, key: str = "default") -> int:
        """
        Evaluaciones restantes para una clave.

        Args:
            key (str): Clave a verificar

        Returns:
            int: Evaluaciones restantes
        """
        with self.lock:
            return max(0, self.limit - self.storage[key])
