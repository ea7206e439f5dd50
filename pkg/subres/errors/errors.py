"""
Exceptions and warnings raised across subres.
"""

class SubresError(Exception):
    pass


class ResourceLimitError(SubresError):
    pass


class GeometryError(SubresError):
    pass


class AssemblyError(SubresError):
    pass


class NumericalError(SubresError):
    pass


class DomainError(SubresError):
    pass


class DegeneracyError(SubresError):
    pass


class ConsistencyError(SubresError):
    pass


class SolverError(SubresError):
    """
    Raised when a Newton solve or a continuation cannot proceed.
    The last iterate, when there is one, is kept on the exception.
    """
    def __init__(self, message, last_iterate=None):
        super().__init__(message)
        self.last_iterate = last_iterate


class ConfigError(SubresError):
    """
    Raised for syntax, semantic and unknown-key problems in configuration files.
    """
    def __init__(self, message, path=None, line=None, field=None):
        self.path  = path
        self.line  = line
        self.field = field
        prefix = ''
        if path is not None:
            prefix = str(path)
            if line is not None:
                prefix += ':' + str(line)
            prefix += ': '
        super().__init__(prefix + message)


class AcceptanceError(SubresError):
    pass


class DegeneracyWarning(UserWarning):
    pass


class NearBifurcationWarning(UserWarning):
    pass
