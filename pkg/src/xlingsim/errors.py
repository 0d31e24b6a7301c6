"""Exception types shared across the package."""


class ParseError(ValueError):
    """A resource or data file could not be parsed."""

    def __init__(self, message, path=None, line=None):
        self.path = path
        self.line = line
        where = ""
        if path is not None:
            where = f"{path}:"
        if line is not None:
            where += f"{line}:"
        super().__init__(f"{where} {message}" if where else message)


class InvalidResource(ValueError):
    """Resources loaded fine individually but are inconsistent together."""


class TranslationMissing(LookupError):
    """The translation provider has no translation for a sentence."""

    def __init__(self, sentence):
        self.sentence = sentence
        super().__init__(f"no translation for sentence: {sentence!r}")

    def __str__(self):
        return self.args[0]
