def numbers() -> list[int]: ...
def greet(name: str) -> str: ...

class Box:
    value: int
    def __init__(self) -> None: ...
    def get(self) -> int: ...

def maybe(flag: bool) -> str | None: ...
