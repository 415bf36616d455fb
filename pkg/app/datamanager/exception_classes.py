class OuterSpaceError(Exception):
    """Base class for every domain failure raised by the toolkit."""
    pass


class TrivialClassError(OuterSpaceError):
    """Exception raised when a length function is asked for the trivial conjugacy class."""
    def __init__(self, word: str = ""):
        self.word = word
        super().__init__(f"Word '{word}' reduces to the trivial class; lengths are defined for nontrivial classes only.")


class WordParseError(OuterSpaceError):
    """Exception raised by a word string outside the a..z / A..Z alphabet."""
    def __init__(self, text: str, position: int):
        self.text = text
        self.position = position
        super().__init__(f"Cannot parse word '{text}': invalid letter at position {position}.")


class RankMismatchError(OuterSpaceError):
    """Exception raised when two objects live in free groups of different rank."""
    def __init__(self, expected: int, found: int, what: str = "object"):
        self.expected = expected
        self.found = found
        self.what = what
        super().__init__(f"Rank mismatch for {what}: expected rank {expected}, found {found}.")


class InvalidRankError(OuterSpaceError):
    """Exception raised for ranks below the supported minimum."""
    def __init__(self, rank: int, minimum: int = 3):
        self.rank = rank
        self.minimum = minimum
        super().__init__(f"Rank {rank} is not supported; rank must be at least {minimum}.")


class InvalidAutomorphismError(OuterSpaceError):
    """Exception raised when a list of images is not a free basis."""
    def __init__(self, images: str):
        self.images = images
        super().__init__(f"Images ({images}) do not form a free basis.")


class NotPrimitiveError(OuterSpaceError):
    """Exception raised when a primitive class is required and the word is not primitive."""
    def __init__(self, word: str):
        self.word = word
        super().__init__(f"Class '{word}' is not primitive, so it is not a vertex of the primitive loop complex.")


class InvalidGraphError(OuterSpaceError):
    """Exception raised by a marked metric graph that fails validation."""
    def __init__(self, violations: list):
        self.violations = violations
        details = "; ".join(f"{v.code}: {v.message}" for v in violations)
        super().__init__(f"Invalid marked metric graph: {details}")


class NonEmbeddedLoopError(OuterSpaceError):
    """Exception raised when a construction needs an embedded loop and the immersed loop is not embedded."""
    def __init__(self, word: str):
        self.word = word
        super().__init__(f"The immersed loop of '{word}' is not an embedded circle.")


class VolumeError(OuterSpaceError):
    """Exception raised when edge lengths do not have volume 1 or a rescaling would exhaust the volume."""
    def __init__(self, message: str):
        super().__init__(message)


class ZeroStepError(OuterSpaceError):
    """Exception raised when consecutive orbit points coincide and path times collapse."""
    def __init__(self, automorphism: str):
        self.automorphism = automorphism
        super().__init__(f"Zero step: the orbit of {automorphism} does not move the base graph.")


class InvalidPathError(OuterSpaceError):
    """Exception raised by a sampled path with non-increasing times or mixed ranks."""
    def __init__(self, message: str):
        super().__init__(f"Invalid sampled path: {message}")


class InsufficientSamplesError(OuterSpaceError):
    """Exception raised when an experiment has too few samples to produce a value."""
    def __init__(self, what: str, needed: int, found: int):
        self.what = what
        self.needed = needed
        self.found = found
        super().__init__(f"Insufficient samples for {what}: needed at least {needed}, found {found}.")


class SamplerError(OuterSpaceError):
    """Exception raised when the random graph sampler cannot satisfy its constraints."""
    def __init__(self, message: str, diagnostics: dict | None = None):
        self.diagnostics = diagnostics or {}
        details = ", ".join(f"{key}={value}" for key, value in sorted(self.diagnostics.items()))
        super().__init__(f"{message} ({details})" if details else message)


class GraphFileError(OuterSpaceError):
    """Exception raised by a graph file that cannot be parsed or converted."""
    def __init__(self, path: str, field: str, message: str, line: int | None = None):
        self.path = path
        self.field = field
        self.line = line
        where = f"line {line}, " if line is not None else ""
        super().__init__(f"{path}: {where}field '{field}': {message}")


class MissingSymConstantError(OuterSpaceError):
    """Exception raised when a constant formula needs a symmetrization constant that was not supplied."""
    def __init__(self, name: str):
        self.name = name
        super().__init__(
            f"Missing {name}: the thick-part symmetrization constants of Lemma 2.2 have no closed formula. "
            f"Estimate it with 'estimate-sym' or pass it explicitly."
        )


class DomainError(OuterSpaceError):
    """Exception raised by a constant formula evaluated outside its domain."""
    def __init__(self, name: str, value, requirement: str):
        self.name = name
        self.value = value
        super().__init__(f"{name}={value} is outside the domain: {requirement}.")
