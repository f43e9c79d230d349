from enum import Enum


class ArraySide(str, Enum):
    TRANSMIT = "transmit"
    RECEIVE = "receive"


class Method(str, Enum):
    FFT2D = "fft2d"
    SEP = "sep"
    SNC = "snc"


class NaPolicy(str, Enum):
    PER_TARGET_NS = "per_target_ns"
    PER_TARGET_NE = "per_target_ne"
    FIXED = "fixed"
    OPTIMAL = "optimal"


class SweepKind(str, Enum):
    NONE = "none"
    NA = "na"
    POWER_DBM = "power_dbm"
    RANGE_M = "range_m"


class RdmSinrMethod(str, Enum):
    CC = "cc"
    CC_LARGE_NA = "cc_large_na"
    SEP = "sep"
    TRAD = "trad"


class ResultSource(str, Enum):
    SIM = "sim"
    THEORY = "theory"
