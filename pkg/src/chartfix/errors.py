"""Exception hierarchy shared across the package."""


class ChartfixError(Exception):
    """Base class for all chartfix errors."""


class MalformedDocument(ChartfixError):
    """Input is not well-formed XML or lacks an <svg> root."""


class MissingGeometry(ChartfixError):
    """Element lacks the attributes needed to compute its bounds."""


class EmptyDocument(ChartfixError):
    """No visible elements to group."""


class DegenerateScale(ChartfixError):
    """Axis ticks collapse to a single position."""


class NoAnchorFound(ChartfixError):
    """No viable anchor group for reactive-geometry inference."""


class UnsupportedChart(ChartfixError):
    """Chart violates a deconstruction prerequisite (e.g. multi-view)."""


class CyclicDependency(ChartfixError):
    """Layout dependency graph contains a cycle (deconstructor bug)."""


class InvalidActionId(ChartfixError):
    """Action id outside the 0..22 catalog."""


class InvalidRecipe(ChartfixError):
    """Corpus recipe fails validation (e.g. zero data points)."""


class EmptyCorpus(ChartfixError):
    """Corpus directory holds no usable charts."""
