"""Exception hierarchy. Every error carries a short machine-readable ``code``."""


class ToolkitError(Exception):
    code = "toolkit"


class InvalidSizeError(ToolkitError, ValueError):
    code = "invalid-size"


class SizeLimitError(ToolkitError, ValueError):
    code = "size-limit"


class InvalidColourError(ToolkitError, ValueError):
    code = "invalid-colour"


class StructuralError(ToolkitError, ValueError):
    code = "structural"


class DegeneratePairError(ToolkitError, ValueError):
    code = "degenerate-pair"


class PreconditionError(ToolkitError, ValueError):
    code = "precondition"


class PartitionError(ToolkitError, ValueError):
    code = "partition"


class SliceFailureError(ToolkitError):
    code = "slice-failure"


class DivisibilityError(ToolkitError, ValueError):
    code = "divisibility"


class ParameterError(ToolkitError, ValueError):
    code = "parameter"


class NoShapeError(ToolkitError):
    code = "no-shape"


class FormatError(ToolkitError, ValueError):
    code = "format"
