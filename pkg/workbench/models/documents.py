import re
from typing import Dict, List, Optional, Tuple, Union

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

_IDENTIFIER = re.compile(r"^[A-Za-z][A-Za-z0-9_]*$")


def _check_identifiers(names: List[str]) -> List[str]:
    for name in names:
        if not _IDENTIFIER.match(name):
            raise ValueError(
                f"invalid variable name {name!r}: use a letter followed by letters, digits or _"
            )
    if len(set(names)) != len(names):
        raise ValueError("duplicate variable names")
    return names


class StalkDocument(BaseModel):
    model_config = ConfigDict(coerce_numbers_to_str=True)

    variables: List[str] = []
    relations: List[str] = []

    @field_validator("variables")
    @classmethod
    def validate_variables(cls, v):
        return _check_identifiers(v)


class CertificateDocument(BaseModel):
    model_config = ConfigDict(coerce_numbers_to_str=True)

    witness: str
    inverse: str
    sections: Dict[str, Tuple[str, int]]

    @field_validator("sections")
    @classmethod
    def validate_sections(cls, v):
        for name, (_, k) in v.items():
            if k < 0:
                raise ValueError(f"section exponent for {name} must be non-negative")
        return v


class RingMapDocument(BaseModel):
    model_config = ConfigDict(coerce_numbers_to_str=True)

    images: Dict[str, str] = {}
    certificate: Optional[CertificateDocument] = None


class RestrictionDocument(RingMapDocument):
    model_config = ConfigDict(populate_by_name=True)

    source: str = Field(..., alias="from")
    target: str = Field(..., alias="to")


class PosetDocument(BaseModel):
    elements: List[str]
    covers: List[Tuple[str, str]] = []

    @model_validator(mode="after")
    def validate_covers(self):
        known = set(self.elements)
        for x, y in self.covers:
            if x not in known or y not in known:
                raise ValueError(f"cover ({x}, {y}) names an unknown element")
        return self


class SpaceDocument(BaseModel):
    kind: str = "space"
    name: str = "X"
    elements: Dict[str, StalkDocument]
    covers: List[Tuple[str, str]] = []
    restrictions: List[RestrictionDocument] = []
    assumed: List[Tuple[str, str]] = []

    @model_validator(mode="after")
    def validate_references(self):
        known = set(self.elements)
        for x, y in self.covers + self.assumed:
            if x not in known or y not in known:
                raise ValueError(f"pair ({x}, {y}) names an unknown element")
        for r in self.restrictions:
            if r.source not in known or r.target not in known:
                raise ValueError(f"restriction {r.source} -> {r.target} names an unknown element")
        return self


SpaceRef = Union[str, SpaceDocument]


class MorphismDocument(BaseModel):
    kind: str = "morphism"
    name: str = "f"
    source: Optional[SpaceRef] = None
    target: Optional[SpaceRef] = None
    map: Dict[str, str] = {}
    comaps: Dict[str, RingMapDocument] = {}
    open_immersion: Optional[str] = None
    to_point: bool = False

    @model_validator(mode="after")
    def validate_shape(self):
        if self.open_immersion is not None:
            if self.target is None:
                raise ValueError("an open immersion needs its target space")
        elif self.to_point:
            if self.source is None:
                raise ValueError("a structure morphism needs its source space")
        elif self.source is None or self.target is None:
            raise ValueError("a morphism needs a source and a target")
        return self


class TransitionDocument(BaseModel):
    model_config = ConfigDict(coerce_numbers_to_str=True)

    lower: str
    upper: str
    map: Dict[str, str]
    comaps: Dict[str, RingMapDocument] = {}


class DatumDocument(BaseModel):
    kind: str = "datum"
    index: PosetDocument
    spaces: Dict[str, SpaceRef]
    transitions: List[TransitionDocument] = []


class MatrixDocument(BaseModel):
    model_config = ConfigDict(populate_by_name=True)

    source: str = Field(..., alias="from")
    target: str = Field(..., alias="to")
    matrix: List[List[str]]

    @field_validator("matrix", mode="before")
    @classmethod
    def stringify(cls, v):
        return [[str(x) for x in row] for row in v]


class TwistDocument(BaseModel):
    n: int = Field(..., ge=1)
    degree: int
    floor: Optional[int] = None


class DiagramDocument(BaseModel):
    kind: str = "diagram"
    space: Optional[SpaceRef] = None
    poset: Optional[PosetDocument] = None
    dims: Dict[str, int] = {}
    maps: List[MatrixDocument] = []
    twist: Optional[TwistDocument] = None

    @model_validator(mode="after")
    def validate_shape(self):
        if self.twist is not None and (self.dims or self.maps):
            raise ValueError("a twist diagram takes no dims or maps")
        for name, d in self.dims.items():
            if d < 0:
                raise ValueError(f"dimension at {name} is negative")
        return self


class BasePointDocument(BaseModel):
    model_config = ConfigDict(coerce_numbers_to_str=True)

    carrier: str
    images: Dict[str, str] = {}


class SigmaPointDocument(BaseModel):
    model_config = ConfigDict(coerce_numbers_to_str=True)

    carrier: str
    images: Dict[str, str]
    base: Optional[BasePointDocument] = None
    label: str = ""


class RandomSuiteDocument(BaseModel):
    carrier: str
    count: int = Field(20, ge=1)
    seed: int = 0
    degree: int = Field(4, ge=0)
    free: List[str]
    inverses: Dict[str, str] = {}


class SuiteDocument(BaseModel):
    kind: str = "suite"
    variable: str = "t"
    points: List[SigmaPointDocument] = []
    random: Optional[RandomSuiteDocument] = None

    @model_validator(mode="after")
    def validate_nonempty(self):
        if not self.points and self.random is None:
            raise ValueError("a suite needs points or a random section")
        return self


class CoversDocument(BaseModel):
    model_config = ConfigDict(populate_by_name=True)

    kind: str = "covers"
    first: List[str] = Field(..., alias="U")
    second: Optional[List[Optional[List[str]]]] = Field(None, alias="V")


class SpaceRequest(BaseModel):
    """A bundled example name or an inline space document"""

    space: SpaceRef


class CentreRequest(SpaceRequest):
    at: str
    prime: List[str] = []


class DiagramRequest(SpaceRequest):
    diagram: Union[str, DiagramDocument]
