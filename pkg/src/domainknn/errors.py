"""Exception hierarchy.

Every error carries a ``kind`` string that the CLI reports verbatim in its
error JSON, so scripts can branch on it without parsing messages.
"""


class DomainKnnError(Exception):
    kind = "Error"


class EmptyCorpus(DomainKnnError, ValueError):
    kind = "EmptyCorpus"


class AllDocumentsFiltered(DomainKnnError, ValueError):
    kind = "AllDocumentsFiltered"


class CorpusFormatError(DomainKnnError, ValueError):
    kind = "CorpusFormat"


class ResourceFormatError(DomainKnnError, ValueError):
    """Malformed stopword or lemma file, or an inconsistent lexicon."""

    kind = "ResourceFormat"


class DimensionShrink(DomainKnnError, ValueError):
    kind = "DimensionShrink"


class DimensionMismatch(DomainKnnError, ValueError):
    kind = "DimensionMismatch"


class ZeroVector(DomainKnnError, ValueError):
    kind = "ZeroVector"


class EmptyKnowledgeBase(DomainKnnError, ValueError):
    kind = "EmptyKnowledgeBase"


class ConfigInvalid(DomainKnnError, ValueError):
    kind = "ConfigInvalid"


class KTooLarge(ConfigInvalid):
    kind = "KTooLarge"


class FingerprintMismatch(DomainKnnError, ValueError):
    kind = "FingerprintMismatch"


class ProtocolInfeasible(DomainKnnError, ValueError):
    kind = "ProtocolInfeasible"


class IoFailure(DomainKnnError, OSError):
    kind = "IoFailure"


class FormatVersionMismatch(DomainKnnError, ValueError):
    kind = "FormatVersionMismatch"


class CorruptFile(DomainKnnError, ValueError):
    kind = "CorruptFile"
