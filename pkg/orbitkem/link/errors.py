class LinkError(ValueError):
    pass


class HeaderFieldError(LinkError):
    pass


class PayloadTooLarge(LinkError):
    pass


class MissingHmacKey(LinkError):
    pass


class EmptyPayload(LinkError):
    pass


class IntegrityConflict(LinkError):
    pass


class Truncated(LinkError):
    pass


class BadCrc(LinkError):
    pass


class BadHmac(LinkError):
    pass
