"""Exception taxonomy shared across the package."""

from __future__ import annotations


class MarketError(Exception):
    """Base class for every domain error raised by this package."""


# --- scenario tree -------------------------------------------------------

class MalformedTopology(MarketError):
    pass


class NonPositiveProbability(MarketError):
    pass


class ProbabilitySumMismatch(MarketError):
    pass


# --- market model --------------------------------------------------------

class SchemaError(MarketError):
    pass


class NonPositiveNumeraire(MarketError):
    pass


class MissingNodeValue(MarketError):
    pass


class UnknownSubmarket(MarketError):
    pass


class DimensionMismatch(MarketError):
    pass


# --- LP engine -----------------------------------------------------------

class NumericBreakdown(MarketError):
    """Float-mode solve failed verification; retry in rational mode."""


class DegenerateDenominator(MarketError):
    """The fractional program's denominator vanishes on the whole cone."""


# --- arbitrage / pricing -------------------------------------------------

class ArbitrageExists(MarketError):
    def __init__(self, witness, message="arbitrage opportunity found"):
        super().__init__(message)
        self.witness = witness


class SubmarketArbitrage(ArbitrageExists):
    pass


class GlobalArbitrage(ArbitrageExists):
    pass


class InfeasiblePrice(MarketError):
    """Superreplication set empty (price +inf).  Unreachable for bounded
    claims on finite trees; kept for API symmetry."""


class CertificateViolation(MarketError):
    def __init__(self, value, message=None):
        super().__init__(message or f"dual certificate is {value}, expected 0")
        self.value = value


class ConditionNotMet(MarketError):
    """A closed-form identity's hypothesis fails on this model."""


class DimensionNotOne(MarketError):
    pass


class WrongShape(MarketError):
    pass


class NonPositiveWeight(MarketError):
    pass


# --- multicurve ----------------------------------------------------------

class BadMaturities(MarketError):
    pass


class NonPositiveBond(MarketError):
    pass


class NonPositiveAccumulation(MarketError):
    pass


class QuotesEqual(MarketError):
    pass


# --- oracle --------------------------------------------------------------

class TooLarge(MarketError):
    pass
