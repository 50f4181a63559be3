from pathlib import Path
from typing import Any, Callable, Iterable, Mapping, Optional, Sequence

def func_2(p0: float, p1: Iterable[str]) -> str: ...
def func_5(p0: str, p1: set[str]) -> float: ...
def func_8(p0: Iterable[str], p1: float) -> list[dict[str, Any]]: ...
def func_11(p0: bool, p1: dict[str, list[int]]) -> Iterable[str]: ...
def func_14(p0: Motor, p1: Callable[[int], str]) -> Optional[Path]: ...
def func_17(p0, p1: set[str]) -> list[dict[str, Any]]: ...
def func_20(p0: dict[str, list[int]], p1: dict[str, int]) -> dict[str, list[int]]: ...
def func_23(p0: str, p1: Account) -> set[str]: ...
def func_26(p0: list[dict[str, Any]], p1: dict[str, list[int]]) -> float: ...
def func_29(p0: Path, p1: bool) -> str: ...
DEFAULT: str
