import pytest

from spdcarray import LatticeSpec

# Reference parameters: 13 guides, L = 2 mm, C = 2.5 mm^-1, alpha = 0.2
NOMINAL = dict(n_guides=13, mean_coupling=2.5, pump_ratio=0.2, length=2.0)


def nominal_spec(geometry, **kw):
    base = dict(NOMINAL)
    if geometry == "ssh":
        base["dimerization"] = 0.5
    if geometry == "trivial":
        base["defect_detune"] = 2 * NOMINAL["mean_coupling"]
    base.update(kw)
    return LatticeSpec(geometry=geometry, **base)


@pytest.fixture(params=["homogeneous", "trivial", "ssh"])
def geometry(request):
    return request.param
