"""Dynamic Voronoi point processes, the area-interaction process, and the
spatial statistics used to compare them."""

__version__ = "0.1.0"
