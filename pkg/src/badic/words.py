"""
Words over the alphabet {0, ..., b-1}, the b-adic intervals they code and
the grids T_n. Endpoints are exact rationals; floats appear only when a
caller asks for an array.
"""

from fractions import Fraction
from numbers import Real
from typing import Iterator, Tuple, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

Number = Union[int, float, Fraction]


class Word(BaseModel):
    """A finite word w = w_1 ... w_n over the b-adic alphabet."""

    model_config = ConfigDict(frozen=True)

    base: int = Field(..., ge=2, description="Alphabet size b")
    digits: Tuple[int, ...] = Field(default=(), description="Digits w_1..w_n")

    @model_validator(mode="after")
    def _check_digits(self) -> "Word":
        for digit in self.digits:
            if not 0 <= digit < self.base:
                raise ValueError(f"digit {digit} outside alphabet {{0..{self.base - 1}}}")
        return self

    @property
    def length(self) -> int:
        return len(self.digits)

    def __len__(self) -> int:
        return len(self.digits)

    @property
    def index(self) -> int:
        """Rank of the word among A^|w| in lexicographic (= left-to-right) order."""
        value = 0
        for digit in self.digits:
            value = value * self.base + digit
        return value

    @property
    def left(self) -> Fraction:
        """t_w = sum_i w_i b^-i."""
        return Fraction(self.index, self.base ** self.length)

    def prefix(self, n: int) -> "Word":
        if not 0 <= n <= self.length:
            raise ValueError(f"prefix length {n} outside [0, {self.length}]")
        return Word(base=self.base, digits=self.digits[:n])

    def child(self, digit: int) -> "Word":
        return Word(base=self.base, digits=self.digits + (digit,))

    def is_prefix_of(self, other: "Word") -> bool:
        return self.base == other.base and other.digits[: self.length] == self.digits

    def __str__(self) -> str:
        return "".join(str(d) for d in self.digits) or "()"


class BadicInterval(BaseModel):
    """Half-open interval I_w = [t_w, t_w + b^-|w|)."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    left: Fraction
    width: Fraction

    @property
    def right(self) -> Fraction:
        return self.left + self.width

    @property
    def measure(self) -> Fraction:
        return self.width

    def contains(self, t: Number) -> bool:
        value = Fraction(t)
        return self.left <= value < self.right

    def is_disjoint(self, other: "BadicInterval") -> bool:
        return self.right <= other.left or other.right <= self.left


class Grid(BaseModel):
    """Sorted grid T_n = {t_w : w in A^n} U {1}."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    base: int = Field(..., ge=2)
    generation: int = Field(..., ge=0)
    points: Tuple[Fraction, ...]

    def __len__(self) -> int:
        return len(self.points)

    def as_array(self) -> np.ndarray:
        """Float copy of the points, for the simulation boundary."""
        return np.arange(len(self.points), dtype=float) / float(self.base ** self.generation)

    def issubset(self, other: "Grid") -> bool:
        return set(self.points) <= set(other.points)


def word_from_index(index: int, n: int, b: int) -> Word:
    """Inverse of Word.index for words of length n."""
    if not 0 <= index < b ** n:
        raise ValueError(f"index {index} outside [0, {b}^{n})")
    digits = []
    for _ in range(n):
        index, digit = divmod(index, b)
        digits.append(digit)
    return Word(base=b, digits=tuple(reversed(digits)))


def words(n: int, b: int) -> Iterator[Word]:
    """All words of A^n, left to right."""
    for index in range(b ** n):
        yield word_from_index(index, n, b)


def word_to_interval(w: Word) -> BadicInterval:
    """I_w with exact rational endpoints."""
    return BadicInterval(left=w.left, width=Fraction(1, w.base ** w.length))


def locate(t: Number, n: int, b: int) -> Word:
    """t|n, the unique word of A^n with t in I_{t|n}."""
    if n < 0:
        raise ValueError(f"generation must be >= 0, got {n}")
    if not isinstance(t, (Real, Fraction)):
        raise TypeError(f"t must be real, got {type(t).__name__}")
    value = Fraction(t)
    if value == 1:
        raise ValueError("t = 1 lies in no half-open b-adic interval")
    if not 0 <= value < 1:
        raise ValueError(f"t must lie in [0, 1), got {t}")
    index = (value.numerator * b ** n) // value.denominator
    return word_from_index(index, n, b)


def grid(n: int, b: int) -> Grid:
    """T_n, sorted, with b^n + 1 points and gaps b^-n."""
    if n < 1:
        raise ValueError(f"grid generation must be >= 1, got {n}")
    size = b ** n
    return Grid(base=b, generation=n, points=tuple(Fraction(j, size) for j in range(size + 1)))
