from enum import IntEnum


class ModelClass(IntEnum):
    REDUCED = 0
    CONJUGATED = 1
    TOY_FLOW = 2
    LINEAR = 3
