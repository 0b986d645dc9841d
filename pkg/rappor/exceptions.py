class DomainError(ValueError):
    """A precondition of a pipeline operation does not hold."""


class ReportParseError(DomainError):
    """A line of an input file could not be read.

    ``line`` is 1-based and counts the header line.
    """

    def __init__(self, message, line=None, source=None):
        self.line = line
        self.source = source
        where = ''
        if source is not None:
            where = f'{source}:'
        if line is not None:
            where = f'{where}{line}: '
        elif where:
            where = f'{where} '
        super().__init__(f'{where}{message}')
