class HandshakeError(ValueError):
    pass
