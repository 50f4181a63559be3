from .geometry import Point, Polygon, area

__all__ = ["Point", "Polygon", "area"]
__version__ = "1.0"
