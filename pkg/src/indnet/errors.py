"""Exception hierarchy shared by every stage of the pipeline."""


class IndnetError(Exception):
    """Base class; the CLI reports the concrete subclass name on failure."""


class FormatError(IndnetError):
    """Malformed input text (ragged rows, duplicate ids, unparsable cells)."""


class DomainError(IndnetError, ValueError):
    """A value or argument outside its admissible domain."""


class DegenerateInputError(IndnetError):
    """Too few industries survive filtering to form a network."""


class ConnectivityError(IndnetError):
    """The finite-distance graph is disconnected."""

    def __init__(self, components):
        self.components = [sorted(c) for c in components]
        shown = "; ".join("{" + ", ".join(c) + "}" for c in self.components)
        super().__init__(f"finite-distance graph has {len(self.components)} components: {shown}")


class ConsistencyError(IndnetError):
    """A threshold or clustering result contradicts another derived quantity."""
