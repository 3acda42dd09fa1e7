"""Exception hierarchy shared by all analysis stages.

Every error carries the name of the stage that raised it and, where it
applies, the computability restriction (R1, R2 or R3) that was violated.
"""


class AnalysisError(Exception):
    """Base class for every diagnostic the analyzer can report."""

    kind = "AnalysisError"
    module = "loopm"
    restriction = None

    def __init__(self, message, *, restriction=None):
        super().__init__(message)
        if restriction is not None:
            self.restriction = restriction

    def describe(self):
        tag = f" [{self.restriction}]" if self.restriction else ""
        return f"{self.module}: {self.kind}{tag}: {self}"


class ProgramSyntaxError(AnalysisError):
    kind = "SyntaxError"
    module = "frontend"

    def __init__(self, message, line=None, column=None):
        where = f" (line {line}, column {column})" if line is not None else ""
        super().__init__(message + where)
        self.line = line
        self.column = column


class ProbabilityError(AnalysisError):
    kind = "ProbabilityError"
    module = "frontend"


class R1Violation(AnalysisError):
    kind = "R1Violation"
    module = "frontend"
    restriction = "R1"


class NormalizeError(R1Violation):
    kind = "NormalizeError"


class NotFinite(AnalysisError):
    kind = "NotFinite"
    module = "recurrences"
    restriction = "R2"


class DefectiveDependency(AnalysisError):
    kind = "DefectiveDependency"
    module = "recurrences"
    restriction = "R3"

    def __init__(self, message, variables=()):
        super().__init__(message)
        self.variables = tuple(sorted(variables))


class ResourceLimit(AnalysisError):
    kind = "ResourceLimit"
    module = "algebra"


class UnsupportedMoment(AnalysisError):
    kind = "UnsupportedMoment"
    module = "moments"


class UnsupportedEigenvalue(AnalysisError):
    kind = "UnsupportedEigenvalue"
    module = "solver"


class UnboundParameter(AnalysisError):
    kind = "UnboundParameter"
    module = "solver"


class ParamCondition(AnalysisError):
    kind = "ParamCondition"
    module = "solver"


class DivergesError(AnalysisError):
    kind = "DivergesError"
    module = "solver"


class NotUnsolvable(AnalysisError):
    kind = "NotUnsolvable"
    module = "unsolvable"


class NoSolution(AnalysisError):
    kind = "NoSolution"
    module = "algebra"
