"""Exception types shared across the package.

Numerical failures carry optional context (the step index ``k`` and the
branch label) so that long propagations can report where they broke down.
"""

from __future__ import annotations


class RecurrenceError(Exception):
    """Base class for domain and numerical failures."""

    def __init__(self, message: str, k: int | None = None, branch: int | None = None):
        self.message = message
        self.k = k
        self.branch = branch
        parts = [message]
        if k is not None:
            parts.append(f"at index k={k}")
        if branch is not None:
            parts.append(f"branch {branch}")
        super().__init__(" ".join(parts))

    def with_context(self, k: int | None = None, branch: int | None = None):
        """Copy of this error with missing location context filled in."""
        return type(self)(
            self.message,
            k=self.k if self.k is not None else k,
            branch=self.branch if self.branch is not None else branch,
        )


class IndexOutOfWindow(RecurrenceError):
    """A coefficient model or trajectory was evaluated outside its window."""


class ZeroCoefficient(RecurrenceError):
    """The lowest-order coefficient vanishes inside the window.

    A zero constant coefficient makes the characteristic polynomial have a
    zero root and the decomposition matrices singular, so it is rejected up
    front instead of failing obscurely later.
    """


class SingularGauge(RecurrenceError):
    """The gauge matrix is numerically singular; the split is not unique."""


class DegenerateRoots(RecurrenceError):
    """Characteristic roots coincide or nearly coincide."""


class NoConvergence(RecurrenceError):
    """The simultaneous root iteration did not converge within its cap."""


class AmbiguousTracking(RecurrenceError):
    """Two branch assignments tie; labels cannot be carried forward reliably."""


class Breakdown(RecurrenceError):
    """A ratio recursion hit a vanishing denominator or solution value."""
