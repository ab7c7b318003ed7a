"""
Exceptions raised across the package. Every error knows the CLI exit code it maps to.
"""


class BctError(Exception):
    exit_code = 4
    kind = 'error'

    def __init__(self, message, **payload):
        super().__init__(message)
        self.message = message
        self.payload = payload

    def to_json_dict(self):
        data = {'error': self.kind, 'message': self.message}
        for k, v in self.payload.items():
            data[k] = v.to_json_dict() if hasattr(v, 'to_json_dict') else v
        return data


class ParseError(BctError):
    exit_code = 2
    kind = 'parse-error'


class ValidationError(BctError):
    exit_code = 2
    kind = 'validation-error'


class InfeasibleMarginsError(BctError):
    exit_code = 3
    kind = 'infeasible-margins'


class BudgetExceededError(BctError):
    kind = 'budget-exceeded'


class RejectionExhaustedError(BctError):
    kind = 'rejection-exhausted'

    @property
    def attempts(self):
        return self.payload.get('attempts')


class AcceptanceTooLowError(BctError):
    kind = 'acceptance-too-low'


class InstanceTooLargeError(BctError):
    kind = 'instance-too-large'


class EnumerationTooLargeError(BctError):
    kind = 'enumeration-too-large'


class GeneratorError(BctError):
    kind = 'generator-failure'


class InconclusiveVerdict(BctError):
    exit_code = 5
    kind = 'inconclusive'
