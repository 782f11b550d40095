import pytest

from dgloc.fields import GF, QQ

FIELDS = [QQ, GF(2), GF(3)]


@pytest.fixture(params=FIELDS, ids=lambda f: f.name)
def field(request):
    return request.param


@pytest.fixture(params=[GF(2), GF(3)], ids=lambda f: f.name)
def finite_field(request):
    return request.param
