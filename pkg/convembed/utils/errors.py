from typing import Optional


class ConvEmbedError(Exception):
    """Base class of every error raised by convembed."""


class ShapeError(ConvEmbedError, ValueError):
    pass


class EmptyAttentionError(ConvEmbedError, ValueError):
    pass


class MaskError(ConvEmbedError, ValueError):
    pass


class TapeError(ConvEmbedError, RuntimeError):
    pass


class CapacityError(ConvEmbedError, ValueError):
    pass


class CorpusFormatError(ConvEmbedError, ValueError):
    def __init__(self, message: str, line_number: Optional[int] = None):
        self.line_number = line_number
        if line_number is not None:
            message = f"line {line_number}: {message}"
        super().__init__(message)


class SelectionError(ConvEmbedError, ValueError):
    pass


class CheckpointError(ConvEmbedError, ValueError):
    pass


class StatisticsError(ConvEmbedError, ValueError):
    pass


class ConfigError(ConvEmbedError, ValueError):
    pass
