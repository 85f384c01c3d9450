from ris_kit.models.scenario import (
    AngleSet,
    Dimensions,
    FadingParams,
    GeometryMeta,
    LinkBudget,
    Scenario,
)
from ris_kit.models.channel import ChannelRealization, LosComponents, PhaseShifts
from ris_kit.models.rate import ArrayGains, RateBreakdown, SymmetricPair
from ris_kit.models.estimate import McEstimate, MomentReport, MomentRow
from ris_kit.models.ga import GaState, GaTrace
