from pathlib import Path
from typing import Any, Callable, Iterable, Mapping, Optional, Sequence

def func_2(p0: float, p1: Iterable[str]) -> str:
    raise NotImplementedError


def func_5(p0: str, p1: set[str]) -> float:
    raise NotImplementedError


def func_8(p0: Iterable[str], p1: float) -> list[dict[str, Any]]:
    raise NotImplementedError


def func_11(p0: bool, p1: dict[str, list[int]]) -> Iterable[str]:
    raise NotImplementedError


def func_14(p0: Engine, p1: Callable[[int], str]) -> Optional[Path]:
    raise NotImplementedError


def func_17(p0: Callable[[int], str], p1: set[str]) -> list[dict[str, Any]]:
    raise NotImplementedError


def func_20(p0: dict[str, list[int]], p1: dict[str, int]) -> dict[str, list[int]]:
    raise NotImplementedError


def func_23(p0: str, p1: Customer) -> set[str]:
    raise NotImplementedError


def func_26(p0: list[dict[str, Any]], p1: dict[str, list[int]]) -> float:
    raise NotImplementedError


def func_29(p0: Path, p1: bool) -> str:
    raise NotImplementedError


DEFAULT: str = None  # type: ignore
