from .signal_models import (
    SymbolGrid,
    TimeSignal,
    MultiAntennaSignal,
    SteeringVector,
    SeparationOperator,
    RangeDopplerMap,
    Detection,
)
