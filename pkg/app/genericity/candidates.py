import math
from typing import List, Optional

from pydantic import BaseModel

from app.exceptions import DomainError
from app.geometry.base import DampingShape
from app.geometry.shapes import inradius
from app.geometry.torus import RationalDirection, enumerate_candidate_directions


class CandidateDirectionSet(BaseModel):
    """The rational directions of period at most k/2 with k = floor(1/r) + 1.

    Every glancing direction of a shape with inradius r lies in this set, and
    the set only shrinks as r grows.
    """

    k: int
    inradius: float
    directions: List[RationalDirection]

    @classmethod
    def for_inradius(cls, r: float) -> "CandidateDirectionSet":
        if not r > 0:
            raise DomainError(f"inradius must be positive, got {r}")
        k = math.floor(1.0 / r) + 1
        return cls(k=k, inradius=r, directions=enumerate_candidate_directions(1.0 / k))

    @classmethod
    def for_shape(cls, shape: DampingShape, r: Optional[float] = None) -> "CandidateDirectionSet":
        """Uses the certified lower bound on the inradius unless r is given."""
        if r is None:
            r = inradius(shape).lower
        return cls.for_inradius(r)

    @property
    def angles(self) -> List[float]:
        """Direction angles reduced to [0, pi)."""
        return [math.atan2(v.q, v.p) % math.pi for v in self.directions]

    def __len__(self) -> int:
        return len(self.directions)
