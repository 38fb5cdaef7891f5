class KemError(ValueError):
    pass


class DomainMismatch(KemError):
    pass


class InsufficientInput(KemError):
    pass


class MalformedKey(KemError):
    pass


class MalformedCiphertext(KemError):
    pass


class RandomnessError(KemError):
    pass


class KatError(KemError):
    pass


class KatFormatError(KatError):
    pass
