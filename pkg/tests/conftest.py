import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from solitonforge import closed_forms as cf  # noqa: E402
from solitonforge.fields import GridSpec  # noqa: E402


def catalog():
    """(label, bundle, sampling box) for every closed-form family."""
    out = [
        ("gaussian-expanding", cf.gaussian_bundle(cf.GaussianParams(-1.0, [0.5, -0.2], 1.0), 2, 2)),
        ("gaussian-shrinking-n3", cf.gaussian_bundle(cf.GaussianParams(1.5, None, 0.0), 3, 1)),
        ("exp-n2m2", cf.family_exp_translation(2, cf.ExpTranslationParams(1.0, 1.0, 1.0, [0.0, 0.0], 0.0, m=2))),
        ("exp-n3m3", cf.family_exp_translation(3, cf.ExpTranslationParams(0.5, 2.0, 1.0, [0.3, -0.1, -0.2], 1.5, m=3))),
        ("exp-n2m1-a2zero", cf.family_exp_translation(2, cf.ExpTranslationParams(1.0, 1.0, 0.0, [1.0, -1.0], 0.0, m=1))),
        ("ode-expanding", cf.family_ode_expanding(cf.OdeFamilyParams(1.0, 2.0, 2, -2.0)).bundle(2, 0.5, [0.3], [1.0])),
        ("ode-expanding-n3", cf.family_ode_expanding(cf.OdeFamilyParams(0.5, 0.0, 3, -1.0)).bundle(3)),
        ("ode-steady", cf.family_ode_steady(cf.OdeFamilyParams(2.0, 1.0, 3)).bundle(2)),
        ("ode-shrinking", cf.family_ode_shrinking(cf.OdeFamilyParams(0.0, 1.0, 2, 2.0)).bundle(3, 0.0, [0.1, -0.4], [0.0, 2.0])),
    ]
    return out


CATALOG = catalog()


def admissible_points(bundle, count, seed, box=(-1.0, 1.0)):
    """Seeded random points in the box where f is comfortably positive."""
    rng = np.random.default_rng(seed)
    n = bundle.spec.n
    pts = []
    while len(pts) < count:
        x = rng.uniform(box[0], box[1], n)
        if bundle.f(x) > 1e-3:
            pts.append(x)
    return np.array(pts)


@pytest.fixture(params=CATALOG, ids=[c[0] for c in CATALOG])
def bundle(request):
    return request.param[1]


@pytest.fixture
def grid2():
    return GridSpec.cube(-1.0, 1.0, 11, 2)
