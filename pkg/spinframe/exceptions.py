"""
Spinframe Errors

Exception hierarchy shared by the library and the command-line front end.
Every error carries a short machine-readable code and a details dictionary
that the report writer copies into failing check entries.
"""

from typing import Any, Dict, Optional


class SpinframeError(Exception):
    """Base class for all spinframe errors."""

    code = "error"
    # Input errors map to exit code 2, everything else to a failing check.
    input_error = False

    def __init__(self, message: str, details: Optional[Dict[str, Any]] = None):
        super().__init__(message)
        self.message = message
        self.details = details or {}

    def to_dict(self) -> Dict[str, Any]:
        """Convert the error to a dictionary for reports."""
        return {"code": self.code, "message": self.message, "details": self.details}


# Input errors


class ExpressionSyntaxError(SpinframeError):
    """Malformed expression text; carries the byte offset of the failure."""

    code = "syntax_error"
    input_error = True

    def __init__(self, message: str, offset: int, source: str = ""):
        super().__init__(f"{message} at byte {offset}", {"offset": offset, "source": source})
        self.offset = offset


class UnknownIdentifierError(ExpressionSyntaxError):
    code = "unknown_identifier"

    def __init__(self, name: str, offset: int, source: str = ""):
        super().__init__(f'unknown identifier "{name}"', offset, source)
        self.name = name


class ArityError(ExpressionSyntaxError):
    code = "arity_mismatch"


class SceneFormatError(SpinframeError):
    code = "scene_format"
    input_error = True


class ModelSpaceError(SpinframeError):
    code = "invalid_model"
    input_error = True


class ChartDomainError(SpinframeError):
    """A point lies outside the chart domain of the model space."""

    code = "chart_domain"
    input_error = True


class BaseFrameError(SpinframeError):
    """A reconstruction base frame that is not orthonormal or not adapted to (T, f)."""

    code = "base_frame"
    input_error = True


# Numerical errors


class EvaluationDomainError(SpinframeError):
    """A function was evaluated outside its domain (log, sqrt, division)."""

    code = "evaluation_domain"

    def __init__(self, message: str, expression: str = ""):
        super().__init__(f"{message} in {expression}" if expression else message,
                         {"expression": expression})
        self.expression = expression


class ImmersionDegenerate(SpinframeError):
    code = "immersion_degenerate"


class StencilError(SpinframeError):
    code = "stencil"


class SpinorVanishes(SpinframeError):
    code = "spinor_vanishes"


class HalfSpinorVanishes(SpinorVanishes):
    code = "half_spinor_vanishes"

    def __init__(self, half: str, details: Optional[Dict[str, Any]] = None):
        super().__init__(f"half spinor phi{half} vanishes", dict(details or {}, half=half))
        self.half = half


class CompatGateFailed(SpinframeError):
    code = "compat_gate_failed"


class StepUnstable(SpinframeError):
    code = "step_unstable"


class ChartExit(SpinframeError):
    code = "chart_exit"


class FrameDrift(SpinframeError):
    code = "frame_drift"


class GridMismatch(SpinframeError):
    code = "grid_mismatch"
