"""Exception hierarchy shared by all modules."""


class FinitaryError(Exception):
    """Base class for every error raised by this package."""


class DegenerateWindow(FinitaryError, ValueError):
    """A window with ``lo >= hi``."""


class NotContained(FinitaryError, ValueError):
    """An interval or point lies outside the window it must live in."""


class Undetermined(FinitaryError):
    """The finite window does not carry enough data to certify a result."""


class NoGroundingGap(Undetermined):
    """No globe can be certified inside the window; enlarge it on the left."""


class InsufficientCore(Undetermined):
    """Fewer than two certified special cells, so no marking core exists."""


class AlphabetMismatch(FinitaryError, ValueError):
    """A mark symbol is not part of the distribution's alphabet."""


class StructureError(FinitaryError, ValueError):
    """A marked configuration does not look like a marking output."""


class InvisibleJump(FinitaryError, ValueError):
    """Equal consecutive states: the jump cannot be read off the path."""


class EncoderCoreTooSmall(FinitaryError, ValueError):
    """The skeleton encoder determined no state for the given marks."""


class InsufficientSample(FinitaryError, ValueError):
    """A statistical test was asked to run on too little data."""
