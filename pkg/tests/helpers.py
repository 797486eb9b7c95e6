import random

from gpdext.extension import Extension
from gpdext.groupoid import relabel


def rename_extension(ext: Extension, seed: int, prefix: str = "h") -> Extension:
    """The same extension with the arrows of G renamed at random."""
    rng = random.Random(seed)
    old = list(ext.G.arrows)
    new = [f"{prefix}{i}" for i in range(len(old))]
    rng.shuffle(new)
    m = dict(zip(old, new))
    return Extension(ext.K, relabel(ext.G, m), ext.E, {x: tuple(m[g] for g in v) for x, v in ext.j.items()},
                     {m[g]: e for g, e in ext.pi.items()})


def identity_bundle(K):
    return {x: tuple(range(K[x].order)) for x in K.base}


def singleton_basis(ext):
    return [(x,) for x in ext.objects]
