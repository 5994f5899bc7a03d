"""Exception hierarchy shared by all generator stages."""


class CaveGenError(Exception):
    """Base class for every error raised by cavegen."""


class GridError(CaveGenError, ValueError):
    """A grid contract was violated (bad dims, out-of-bounds access, mismatched shapes)."""


class IsolatedCellError(CaveGenError):
    def __init__(self, level: int, x: int, y: int):
        super().__init__(f"occupied cell (x={x}, y={y}) on level {level} has no occupied neighbours")
        self.level, self.x, self.y = level, x, y


class PlacementExhausted(CaveGenError):
    """No valid start position for a constraint set after the allowed number of resamples."""


class DegeneratePair(CaveGenError, ValueError):
    pass


class CatalogIncomplete(CaveGenError):
    pass


class ParseError(CaveGenError, ValueError):
    """Malformed input document. ``location`` is a line number or a field path."""

    def __init__(self, message: str, location: str | int | None = None):
        where = f" (at {location})" if location is not None else ""
        super().__init__(f"{message}{where}")
        self.location = location


class AssetMissing(CaveGenError, KeyError):
    def __str__(self) -> str:  # KeyError would repr() the message
        return str(self.args[0]) if self.args else "asset missing"


class EmptyWorld(CaveGenError):
    pass
