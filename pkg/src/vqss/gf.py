"""Arithmetic in the prime field GF(d), d an odd prime below 2**64."""

from __future__ import annotations

from dataclasses import dataclass

__all__ = [
    "FieldError",
    "ModulusMismatch",
    "PrimeModulus",
    "FieldElement",
    "is_prime",
    "egcd",
    "add",
    "sub",
    "neg",
    "mul",
    "inv",
    "pow_",
]

MAX_MODULUS = 1 << 64

# Deterministic for every n < 3.3e24, which covers the 64-bit range.
_MR_WITNESSES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


class FieldError(ValueError):
    pass


class ModulusMismatch(FieldError):
    pass


def is_prime(n: int) -> bool:
    """Deterministic Miller-Rabin for n < 2**64."""
    if n < 2:
        return False
    for p in _MR_WITNESSES:
        if n % p == 0:
            return n == p
    r, q = 0, n - 1
    while q % 2 == 0:
        q //= 2
        r += 1
    for a in _MR_WITNESSES:
        x = pow(a, q, n)
        if x == 1 or x == n - 1:
            continue
        for _ in range(r - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def egcd(a: int, b: int) -> tuple[int, int, int]:
    """Return (g, x, y) with a*x + b*y == g == gcd(a, b)."""
    x0, x1, y0, y1 = 1, 0, 0, 1
    while b:
        q, a, b = a // b, b, a % b
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    return a, x0, y0


@dataclass(frozen=True)
class PrimeModulus:
    d: int

    def __post_init__(self):
        d = self.d
        if not isinstance(d, int) or isinstance(d, bool):
            raise FieldError(f"modulus must be an int, got {type(d).__name__}")
        if d < 3 or d % 2 == 0:
            raise FieldError(f"modulus must be an odd prime >= 3, got {d}")
        if d >= MAX_MODULUS:
            raise FieldError(f"modulus must fit in 64 bits, got {d}")
        if not is_prime(d):
            raise FieldError(f"modulus {d} is not prime")

    def __call__(self, value: int) -> FieldElement:
        return _trusted(int(value) % self.d, self)

    def __int__(self) -> int:
        return self.d

    def elements(self):
        return [FieldElement(v, self) for v in range(self.d)]

    @property
    def zero(self) -> FieldElement:
        return FieldElement(0, self)

    @property
    def one(self) -> FieldElement:
        return FieldElement(1, self)


def _trusted(value: int, modulus: PrimeModulus) -> FieldElement:
    # internal results are already canonical; skip __post_init__ validation
    fe = object.__new__(FieldElement)
    object.__setattr__(fe, "value", value)
    object.__setattr__(fe, "modulus", modulus)
    return fe


def _as_modulus(m) -> PrimeModulus:
    return m if isinstance(m, PrimeModulus) else PrimeModulus(int(m))


@dataclass(frozen=True, order=False, slots=True)
class FieldElement:
    """A canonical residue in [0, d).

    Plain ints on the right-hand side of an operator are reduced into the
    element's field; two elements of different fields never mix.
    """

    value: int
    modulus: PrimeModulus

    def __post_init__(self):
        if not isinstance(self.modulus, PrimeModulus):
            object.__setattr__(self, "modulus", _as_modulus(self.modulus))
        if not 0 <= self.value < self.modulus.d:
            raise FieldError(
                f"value {self.value} is not a canonical residue mod {self.modulus.d}"
            )

    @property
    def d(self) -> int:
        return self.modulus.d

    def _coerce(self, other) -> int:
        if isinstance(other, FieldElement):
            if other.modulus.d != self.modulus.d:
                raise ModulusMismatch(
                    f"cannot combine GF({self.modulus.d}) with GF({other.modulus.d})"
                )
            return other.value
        if isinstance(other, int) and not isinstance(other, bool):
            return other % self.modulus.d
        return NotImplemented

    def _new(self, v: int) -> FieldElement:
        return _trusted(v % self.modulus.d, self.modulus)

    def __add__(self, other):
        o = self._coerce(other)
        return NotImplemented if o is NotImplemented else self._new(self.value + o)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        return NotImplemented if o is NotImplemented else self._new(self.value - o)

    def __rsub__(self, other):
        o = self._coerce(other)
        return NotImplemented if o is NotImplemented else self._new(o - self.value)

    def __mul__(self, other):
        o = self._coerce(other)
        return NotImplemented if o is NotImplemented else self._new(self.value * o)

    __rmul__ = __mul__

    def __neg__(self):
        return self._new(-self.value)

    def __pow__(self, e: int):
        if e < 0:
            return self.inverse() ** (-e)
        return self._new(pow(self.value, e, self.modulus.d))

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return self * self._new(o).inverse()

    def inverse(self) -> FieldElement:
        if self.value == 0:
            raise ZeroDivisionError(f"0 has no inverse in GF({self.modulus.d})")
        g, x, _ = egcd(self.value, self.modulus.d)
        assert g == 1
        return self._new(x)

    def __eq__(self, other):
        if isinstance(other, FieldElement):
            return self.value == other.value and self.modulus.d == other.modulus.d
        if isinstance(other, int) and not isinstance(other, bool):
            return self.value == other
        return NotImplemented

    def __hash__(self):
        # Consistent with int equality on the canonical value.
        return hash(self.value)

    def __int__(self):
        return self.value

    def __index__(self):
        return self.value

    def __bool__(self):
        return self.value != 0

    def __repr__(self):
        return f"GF{self.modulus.d}({self.value})"


def _check(a: FieldElement, b: FieldElement) -> None:
    if a.modulus.d != b.modulus.d:
        raise ModulusMismatch(f"cannot combine GF({a.modulus.d}) with GF({b.modulus.d})")


def add(a: FieldElement, b: FieldElement) -> FieldElement:
    _check(a, b)
    return a + b


def sub(a: FieldElement, b: FieldElement) -> FieldElement:
    _check(a, b)
    return a - b


def neg(a: FieldElement) -> FieldElement:
    return -a


def mul(a: FieldElement, b: FieldElement) -> FieldElement:
    _check(a, b)
    return a * b


def inv(a: FieldElement) -> FieldElement:
    return a.inverse()


def pow_(a: FieldElement, e: int) -> FieldElement:
    if e < 0:
        raise FieldError("exponent must be nonnegative")
    return a ** e
