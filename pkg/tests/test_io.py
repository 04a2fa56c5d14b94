import json
import random
from fractions import Fraction

import pytest

from artifact import io as aio
from artifact import models
from artifact.fedosov import CentralSeries, SymplecticModel, WeylElement, WeylForm
from artifact.hochschild import matrix_algebra, truncated_polynomial_algebra
from artifact.sampling import (random_chain_data, random_element, random_exact_datum,
                               random_hochschild_cochain, random_stack)
from artifact.scalars import ArtinianSeries, GaussianRational
from artifact.simplicial import Nerve, SimplicialDglaSheaf, cech_complex


def roundtrip(x, context=None):
    s = aio.dumps(x)
    y = aio.loads(s, context)
    assert aio.dumps(y) == s
    return y


def test_scalars():
    for c in (0, 5, -7, Fraction(3, 4), Fraction(-1, 9), GaussianRational(1, -2), GaussianRational(0, Fraction(1, 3))):
        assert roundtrip(c) == c
    assert aio.scalar_to_json(Fraction(6, 3)) == "2"


@pytest.mark.parametrize("bad", ["2/4", "-0", "1/1", "0/3", "1.5", "+3", "03"])
def test_rejected_rationals(bad):
    with pytest.raises(aio.SchemaError):
        aio.scalar_from_json(bad)


def test_unreduced_fraction_pointer():
    obj = {"type": "ArtinianSeries", "trunc": 2, "pole": 0, "coeffs": ["1", "2/4", "0"]}
    with pytest.raises(aio.SchemaError) as e:
        aio.from_json(obj)
    assert e.value.pointer == "/coeffs/1"


def test_series():
    s = ArtinianSeries([1, Fraction(1, 2), -3], 2)
    assert roundtrip(s) == s
    p = ArtinianSeries([2, 0, 1], 1, pole=1)
    assert roundtrip(p) == p


def test_dgla_and_elements():
    for L in (models.sl2(), models.heisenberg_exterior(), models.abelian({0: 2, 1: 1}, {0: [(0, 0, 1)]})):
        L2 = roundtrip(L)
        assert aio.same_dgla(L, L2)
        x = random_element(random.Random(0), L, 2, 0 if 0 in L.dims else min(L.dims), [0, 1, 2])
        assert roundtrip(x, L) == x


def test_algebras_and_cochains():
    for A in (truncated_polynomial_algebra(3), matrix_algebra(2)):
        A2 = roundtrip(A)
        assert A2.dim == A.dim and A2.unit == A.unit
        D = random_hochschild_cochain(random.Random(1), A, 2)
        assert roundtrip(D, A) == D


def test_nerve_sheaf_and_descent():
    X = Nerve([0, 1, 2], maximal=[(0, 1), (1, 2)])
    assert roundtrip(X) == X
    S = SimplicialDglaSheaf.constant(Nerve.full(2), models.heisenberg_exterior())
    roundtrip(S)
    C = cech_complex(S, cap=4)
    D = random_exact_datum(random.Random(2), C, 2)
    D2 = roundtrip(D, C)
    assert D2.lam == D.lam and D2.x == D.x and D2.t == D.t


def test_stacks_and_chain_data():
    rng = random.Random(3)
    S, *_ = random_stack(rng, Nerve.full(3), truncated_polynomial_algebra(2))
    S2 = roundtrip(S)
    assert S2.G == S.G and S2.c == S.c
    CD = random_chain_data(rng, Nerve.full(3), truncated_polynomial_algebra(2))
    CD2 = roundtrip(CD)
    assert CD2.G == CD.G and CD2.c == CD.c


def test_weyl_types():
    M = SymplecticModel.standard(1)
    assert roundtrip(M) == M
    F = WeylElement(M, {(-1, (1, 0)): 1, (0, (0, 2)): Fraction(1, 2), (2, (1, 1), (0, 1)): GaussianRational(0, 3)})
    assert F.pole and roundtrip(F) == F
    w = WeylForm(M, 1, {(0,): F, (1,): WeylElement.y(M, 0)})
    assert roundtrip(w) == w
    th = CentralSeries.from_matrices(M, {-1: M.omega, 0: [[0, Fraction(2, 3)], [Fraction(-2, 3), 0]]})
    assert roundtrip(th) == th


def test_error_pointers():
    with pytest.raises(aio.SchemaError) as e:
        aio.loads("{not json")
    assert "line 1" in str(e.value)
    with pytest.raises(aio.SchemaError) as e:
        aio.from_json({"type": "Nope"})
    assert e.value.pointer == "/type"
    L = models.sl2()
    obj = aio.to_json(L)
    obj["dims"] = {"0": "three"}
    with pytest.raises(aio.SchemaError) as e:
        aio.from_json(obj)
    assert e.value.pointer.startswith("/dims")
    with pytest.raises(aio.SchemaError):
        aio.from_json({"type": "GradedElement"})


def test_deterministic_dump():
    L = models.heisenberg_exterior()
    assert aio.dumps(L) == aio.dumps(aio.loads(aio.dumps(L)))
    assert json.loads(aio.dumps(L))["type"] == "DglaPresentation"
