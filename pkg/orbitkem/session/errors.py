class SessionCryptoError(ValueError):
    pass


class NonceReuse(SessionCryptoError):
    pass


class AuthFail(SessionCryptoError):
    pass


class ReplayRejected(SessionCryptoError):
    pass


class BlockLengthError(SessionCryptoError):
    pass
