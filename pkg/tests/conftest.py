import random

import pytest

from srsat.cipher import default_params


def random_blocks(params, count, seed):
    rng = random.Random(seed)
    out = []
    seen = set()
    while len(out) < count:
        block = tuple(rng.randrange(1 << params.e) for _ in range(params.block_words))
        if block not in seen:
            seen.add(block)
            out.append(block)
    return out


def random_key(params, seed):
    rng = random.Random(seed)
    return tuple(rng.randrange(1 << params.e) for _ in range(params.block_words))


@pytest.fixture
def params_3444():
    return default_params(3, 4, 4, 4)


@pytest.fixture
def params_2224():
    return default_params(2, 2, 2, 4)


@pytest.fixture
def params_1114():
    return default_params(1, 1, 1, 4)
