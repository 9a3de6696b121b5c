from .cosets import CosetLimitExceeded, CosetTable, coset_enumerate

__all__ = ["CosetLimitExceeded", "CosetTable", "coset_enumerate"]
