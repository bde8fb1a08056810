"""Base change between Frobenius extensions.

Each arrow is a ring map R -> R' together with X -> X + shift. All arrows
send the source relation X^2 = hX + t onto the target relation.
"""

import logging
from dataclasses import dataclass
from typing import Callable, Dict, List

from eqkhovanov.core.coeff import RingElement
from eqkhovanov.core.frobenius import (
    ONE,
    X,
    AlgebraElement,
    Theory,
    TensorVector,
    TheoryError,
    make_theory,
    multiply,
)
from eqkhovanov.domain.models import TheoryTag, VerificationError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Arrow:
    name: str
    source: TheoryTag
    target: TheoryTag
    # target theory -> images of the source generators, in order
    images: Callable[[Theory], List[RingElement]]
    # target theory -> shift s with X -> X + s
    shift: Callable[[Theory], RingElement]


def _g(name):
    return lambda th: th.ring.gen(name)


def _no_shift(th: Theory) -> RingElement:
    return th.ring.zero


ARROWS: Dict[str, Arrow] = {}


def _register(name, source, target, images, shift=_no_shift):
    ARROWS[name] = Arrow(name, source, target, images, shift)


_register("u2_to_u1", TheoryTag.U2, TheoryTag.U1,
          lambda th: [th.ring.gen("h"), th.ring.zero])
_register("u2_to_su2", TheoryTag.U2, TheoryTag.SU2,
          lambda th: [th.ring.zero, th.ring.gen("t")])
_register("u1_to_plain", TheoryTag.U1, TheoryTag.PLAIN,
          lambda th: [th.ring.zero])
_register("su2_to_plain", TheoryTag.SU2, TheoryTag.PLAIN,
          lambda th: [th.ring.zero])
_register("su2_to_su2sqrt", TheoryTag.SU2, TheoryTag.SU2_SQRT,
          lambda th: [th.ring.gen("sqrt_t") ** 2])
_register("su2sqrt_to_plain", TheoryTag.SU2_SQRT, TheoryTag.PLAIN,
          lambda th: [th.ring.zero])
_register("u2_to_u1xu1", TheoryTag.U2, TheoryTag.U1XU1,
          lambda th: [th.h, th.t])
_register("u1xu1_to_u1", TheoryTag.U1XU1, TheoryTag.U1,
          lambda th: [th.ring.zero, th.ring.gen("h")])
_register("u1xu1_to_su2sqrt", TheoryTag.U1XU1, TheoryTag.SU2_SQRT,
          lambda th: [-th.ring.gen("sqrt_t"), th.ring.gen("sqrt_t")])
_register("u1_to_u1xu1", TheoryTag.U1, TheoryTag.U1XU1,
          lambda th: [th.ring.gen("a2") - th.ring.gen("a1")],
          lambda th: -th.ring.gen("a1"))
_register("u1_to_su2sqrt", TheoryTag.U1, TheoryTag.SU2_SQRT,
          lambda th: [th.ring(2) * th.ring.gen("sqrt_t")],
          _g("sqrt_t"))


def get_arrow(name: str) -> Arrow:
    try:
        return ARROWS[name]
    except KeyError:
        raise TheoryError(f"Unknown base change {name!r}; known: {', '.join(sorted(ARROWS))}") from None


def find_arrow(source: TheoryTag, target: TheoryTag) -> Arrow:
    for arrow in ARROWS.values():
        if arrow.source == source and arrow.target == target:
            return arrow
    raise TheoryError(f"No base change from {source.value} to {target.value}")


def target_theory(arrow: Arrow, source: Theory) -> Theory:
    if source.tag != arrow.source:
        raise TheoryError(f"{arrow.name} starts at {arrow.source.value}, not {source.tag.value}")
    return make_theory(arrow.target, source.field_spec)


def map_scalar(arrow: Arrow, source: Theory, r: RingElement) -> RingElement:
    target = target_theory(arrow, source)
    return source.ring.hom(r, arrow.images(target), target.ring)


def check_arrow(arrow: Arrow, source: Theory) -> bool:
    """img(X)^2 == img(h) img(X) + img(t) in the target algebra."""
    target = target_theory(arrow, source)
    x_img = AlgebraElement(target, arrow.shift(target), target.ring.one)
    lhs = multiply(x_img, x_img)
    h_img = map_scalar(arrow, source, source.h)
    t_img = map_scalar(arrow, source, source.t)
    rhs = x_img.scale(h_img) + AlgebraElement(target, t_img, target.ring.zero)
    ok = lhs == rhs
    if not ok:
        logger.error(f"Base change {arrow.name} does not respect the relation")
    return ok


def base_change(v: TensorVector, arrow: Arrow) -> TensorVector:
    """Apply the arrow to every coefficient and every tensor factor.

    Raises:
        TheoryError: if ``v`` does not live over the arrow's source
        VerificationError: if the arrow fails its relation check
    """
    source = v.theory
    target = target_theory(arrow, source)
    if not check_arrow(arrow, source):
        raise VerificationError(f"Base change {arrow.name} is not an algebra map")
    images = arrow.images(target)
    shift = arrow.shift(target)
    factor = {
        ONE: AlgebraElement(target, target.ring.one, target.ring.zero).to_tensor(),
        X: AlgebraElement(target, shift, target.ring.one).to_tensor(),
    }
    out = TensorVector.zero(target, v.length)
    for labels, c in v.terms.items():
        term = TensorVector(target, 0, {(): source.ring.hom(c, images, target.ring)})
        for lab in labels:
            term = term.tensor(factor[lab])
        out = out + term
    return out
