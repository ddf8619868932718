"""Random tiny instances shared by the property and acceptance tests."""

import numpy as np

from secrexp.channel import WiretapChannel
from secrexp.code import build_code, induced_joint, map_decoder


def random_channel(rng, x=2, y=2, z=2, conc=1.0):
    return WiretapChannel(rng.dirichlet(np.full(y * z, conc), size=x).reshape(x, y, z))


def random_encoder(rng, m_count, x_count, max_support=3):
    rows = []
    for _ in range(m_count):
        k = int(rng.integers(1, min(max_support, x_count) + 1))
        idx = rng.choice(x_count, size=k, replace=False)
        rows.append(list(zip(idx.tolist(), rng.dirichlet(np.ones(k)).tolist())))
    return rows


def random_instance(rng, n_max=6, m_max=4, decoder="map"):
    """Binary-alphabet channel, n <= n_max, |M| <= m_max, stochastic encoder."""
    ch = random_channel(rng)
    n = int(rng.integers(1, n_max + 1))
    m = int(rng.integers(1, m_max + 1))
    enc = random_encoder(rng, m, 2**n)
    if decoder == "map":
        dec = map_decoder(ch, n, m, enc)
    else:
        dec = rng.integers(0, m, size=2**n)
    code = build_code(n, m, enc, dec, x_size=2, y_size=2)
    return ch, code, induced_joint(ch, code)
