"""Taylor fallbacks for the ratio-density closed forms near their removable
singularity at argument 1.

The direct formulas in :mod:`sepvol.closedforms` divide by high powers of
(x - 1) and lose all significance once x is close to 1.  Each density here
gets a degree-24 expansion in u = x - 1 whose coefficients were generated
from exact rationals, so Horner evaluation is accurate to full double
precision for |u| < SWITCH_RADIUS while the direct formula takes over
outside that disc.
"""

from __future__ import annotations

import numpy as np

SWITCH_RADIUS = 0.25

# density of the diagonal-product ratio for the fully populated real
# scenario, expanded about nu = 1
RATIO_DENSITY_REAL = [
    2.5195263290501387e-06,
    -2.5195263290501387e-06,
    1.8037518037518038e-06,
    -1.087977278453469e-06,
    5.40822713441761e-07,
    -1.6228810871668013e-07,
    -8.556602678626489e-08,
    2.406791841315651e-07,
    -3.325521072903229e-07,
    3.8224679314025207e-07,
    -4.0426300233249715e-07,
    4.0841477015845253e-07,
    -4.0128805338380984e-07,
    3.8727951304983274e-07,
    -3.693104174852382e-07,
    3.493096497720615e-07,
    -3.2853859871397217e-07,
    3.0780950716059344e-07,
    -2.8763245678420254e-07,
    2.683145840857447e-07,
    -2.5002725166264473e-07,
    2.3285164473869881e-07,
    -2.1680978007100674e-07,
    2.0188560834243887e-07,
    -1.88039361222942e-07,
]

# same density pushed through mu = sqrt(nu), expanded about mu = 1
RATIO_DENSITY_SQRT = [
    5.0390526581002774e-06,
    -5.0390526581002774e-06,
    -6.871435442864015e-07,
    6.41333974667308e-06,
    -8.175246270484366e-06,
    5.9728631157202585e-06,
    -1.9645257740495837e-06,
    -1.6914302628588343e-06,
    3.852356793533264e-06,
    -4.391292906699069e-06,
    3.7639614522999456e-06,
    -2.5757655125191615e-06,
    1.3206116700145892e-06,
    -2.915600733675332e-07,
    -4.0126715510827966e-07,
    7.700876240511775e-07,
    -8.874943013358105e-07,
    8.412042333162268e-07,
    -7.084378926174378e-07,
    5.45768076273795e-07,
    -3.885501729237977e-07,
    2.549385261095896e-07,
    -1.5117619433289373e-07,
    7.638845633781481e-08,
    -2.619461372723977e-08,
]

# density of the ratio for the two-pair scenario whose off-diagonal support
# is {(1,4), (2,3)}, expanded about nu = 1
RATIO_DENSITY_CROSS = [
    0.0011111111111111111,
    -0.0011111111111111111,
    0.0009325396825396826,
    -0.000753968253968254,
    0.0006063988095238095,
    -0.0004898313492063492,
    0.0003985117168710919,
    -0.00032668575637325635,
    0.0002697197121635598,
    -0.00022410022928821756,
    0.00018720840593551774,
    -0.00015709384598239578,
    0.00013229550703075022,
    -0.00011170934393349981,
    9.449285214760781e-05,
    -7.999661525129891e-05,
    6.771508882470509e-05,
    -5.725098075518654e-05,
    4.828925202694524e-05,
    -4.057796218928213e-05,
    3.391402225087451e-05,
    -2.8132497000703468e-05,
    2.309849821930503e-05,
    -1.8700986654055458e-05,
    1.4847993066393561e-05,
]


def horner(coeffs, u):
    """Evaluate sum(coeffs[k] * u**k) by Horner's rule; u may be an array."""
    u = np.asarray(u, dtype=np.float64)
    acc = np.full(u.shape, coeffs[-1], dtype=np.float64)
    for ck in coeffs[-2::-1]:
        acc = acc * u + ck
    return acc
