from .geometry import Point, Polygon, area

__all__: list[str] = ["Point", "Polygon", "area"]
__version__: str = "1.0"
