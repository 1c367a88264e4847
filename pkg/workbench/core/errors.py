from typing import Any, Dict, List, Optional


class WorkbenchError(Exception):
    """Base class for every error the workbench reports to its callers"""

    exit_code = 2
    kind = "error"

    def __init__(self, message: str, details: Optional[Dict[str, Any]] = None):
        super().__init__(message)
        self.message = message
        self.details = details or {}

    def to_dict(self) -> Dict[str, Any]:
        return {"error": self.kind, "message": self.message, **self.details}


class ElementNotFoundError(WorkbenchError):
    kind = "element-not-found"


class PosetError(WorkbenchError):
    kind = "poset"


class ParseError(WorkbenchError):
    kind = "parse"

    def __init__(self, message: str, position: int, text: str = ""):
        super().__init__(
            f"{message} at offset {position}", {"position": position, "text": text}
        )
        self.position = position


class DegenerateLocalizationError(WorkbenchError):
    kind = "degenerate-localization"


class RingMapError(WorkbenchError):
    kind = "ring-map"


class CertificateError(WorkbenchError):
    kind = "certificate"


class CertificateRequiredError(WorkbenchError):
    kind = "certificate-required"


class InvalidPrimeError(WorkbenchError):
    kind = "invalid-prime"


class FunctorialityError(WorkbenchError):
    kind = "functoriality"


class ConstructionError(WorkbenchError):
    kind = "construction"


class DiagramInvalidError(WorkbenchError):
    kind = "diagram-invalid"


class CorruptComplexError(WorkbenchError):
    kind = "corrupt-complex"


class DivergenceError(WorkbenchError):
    kind = "divergence"


class AffinenessUnverifiableError(WorkbenchError):
    kind = "affineness-unverifiable"


class SchematicityViolation(WorkbenchError):
    kind = "schematicity-violation"


class SaturationError(WorkbenchError):
    """Raised when a bounded search exhausts its step budget"""

    kind = "internal-error"


class DocumentError(WorkbenchError):
    kind = "document"


class ValidationFailed(WorkbenchError):
    """Aggregated construction errors of a loaded document"""

    kind = "validation"

    def __init__(self, message: str, problems: List[str]):
        super().__init__(message, {"problems": problems})
        self.problems = problems

    def __str__(self) -> str:
        return "; ".join([self.message] + self.problems)
