"""RYGB laser diode wavelengths."""

from enum import Enum


class Wavelength(Enum):
    """The four WDMA channels of an RYGB light unit, in canonical order."""

    RED = "red"
    YELLOW = "yellow"
    GREEN = "green"
    BLUE = "blue"

    @property
    def index(self) -> int:
        return _ORDER.index(self)

    @property
    def label(self) -> str:
        return self.value.capitalize()

    @classmethod
    def parse(cls, value: "str | Wavelength") -> "Wavelength":
        if isinstance(value, Wavelength):
            return value
        key = value.strip().lower()
        for member in cls:
            if member.value == key or member.value[0] == key:
                return member
        raise ValueError(f"unknown wavelength {value!r}")


_ORDER = (Wavelength.RED, Wavelength.YELLOW, Wavelength.GREEN, Wavelength.BLUE)

ALL_WAVELENGTHS = _ORDER
