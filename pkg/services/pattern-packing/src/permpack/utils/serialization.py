# services/pattern-packing/src/permpack/utils/serialization.py
from fractions import Fraction
from typing import Any

import numpy as np
from pydantic import BaseModel


class RationalModel(BaseModel):
    num: int
    den: int

    @classmethod
    def from_fraction(cls, value: Fraction) -> "RationalModel":
        value = Fraction(value)
        return cls(num=value.numerator, den=value.denominator)

    def to_fraction(self) -> Fraction:
        return Fraction(self.num, self.den)

    def __str__(self) -> str:
        return str(self.to_fraction())


class DensityModel(BaseModel):
    num: int
    den: int
    float: float

    @classmethod
    def from_fraction(cls, value: Fraction) -> "DensityModel":
        value = Fraction(value)
        return cls(num=value.numerator, den=value.denominator, float=float(value))


def convert_numpy(obj: Any) -> Any:
    """Convert numpy arrays/scalars and Fractions to JSON-friendly values recursively"""
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    elif isinstance(obj, np.generic):
        return obj.item()
    elif isinstance(obj, Fraction):
        return {"num": obj.numerator, "den": obj.denominator}
    elif isinstance(obj, dict):
        return {k: convert_numpy(v) for k, v in obj.items()}
    elif isinstance(obj, (list, tuple)):
        return [convert_numpy(item) for item in obj]
    return obj
