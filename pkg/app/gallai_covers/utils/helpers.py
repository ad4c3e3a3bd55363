# ============================================================================
# app/gallai_covers/utils/helpers.py
# ============================================================================
import json
import logging
import os
import time
from contextlib import contextmanager
from typing import Any, Dict, Iterator, List

from ..config.settings import settings


def get_logger(name: str) -> logging.Logger:
    """Get configured logger instance"""
    logger = logging.getLogger(name)
    if not logger.handlers:
        handler = logging.StreamHandler()
        handler.setFormatter(logging.Formatter(settings.LOG_FORMAT))
        logger.addHandler(handler)
        if settings.LOG_FILE:
            file_handler = logging.FileHandler(settings.LOG_FILE, encoding="utf-8")
            file_handler.setFormatter(logging.Formatter(settings.LOG_FORMAT))
            logger.addHandler(file_handler)
        logger.setLevel(getattr(logging, settings.LOG_LEVEL))
        logger.propagate = False
    return logger


def load_json_data(file_path: str) -> Dict[str, Any]:
    """Load JSON data from file"""
    with open(file_path, "r", encoding="utf-8") as f:
        return json.load(f)


def save_json_data(data: Dict[str, Any], file_path: str) -> None:
    """Save JSON data to file"""
    directory = os.path.dirname(file_path)
    if directory:
        os.makedirs(directory, exist_ok=True)
    with open(file_path, "w", encoding="utf-8") as f:
        json.dump(data, f, ensure_ascii=False)
        f.write("\n")


def ceil_half(n: int) -> int:
    """ceil(n/2) in integers"""
    return (n + 1) // 2


def ceil_third(n: int) -> int:
    """ceil(n/3) in integers"""
    return (n + 2) // 3


def canonical_edge(u: int, v: int) -> tuple:
    """Edge key with the smaller id first"""
    return (u, v) if u < v else (v, u)


def parse_sizes(text: str) -> List[int]:
    """Parse '1000,10000,100000' (also accepts 1e3 notation)"""
    sizes = []
    for part in text.split(","):
        part = part.strip()
        if part:
            sizes.append(int(float(part)))
    return sizes


@contextmanager
def stopwatch() -> Iterator[Dict[str, float]]:
    """Measure wall time in milliseconds: `with stopwatch() as t: ...; t["ms"]`"""
    timing = {"ms": 0.0}
    start = time.perf_counter()
    try:
        yield timing
    finally:
        timing["ms"] = (time.perf_counter() - start) * 1000.0
