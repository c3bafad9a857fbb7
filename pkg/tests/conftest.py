import pytest

from odowin import presets


@pytest.fixture(scope="session")
def ds_z_carry():
    # 2, 8, 32, 128, 512, 2048: mixed radix 2 then 4
    return presets.domains("z-carry", 6)


@pytest.fixture(scope="session")
def ds_z_pow2():
    return presets.domains("z-pow2", 6)


@pytest.fixture(scope="session")
def ds_z_dec():
    return presets.domains("z-dec", 3)


@pytest.fixture(scope="session")
def ds_z2():
    return presets.domains("z2-pow2", 6)


@pytest.fixture(scope="session")
def ds_heis():
    return presets.domains("heis-pow2", 4)


@pytest.fixture(scope="session")
def w_irr():
    return presets.build_preset_window("z-irregular")


@pytest.fixture(scope="session")
def w_fiber():
    return presets.build_preset_window("z-fiber")


@pytest.fixture(scope="session")
def w_k(w_fiber):
    from odowin.windows import build_k

    return {k: build_k(w_fiber, k, 1) for k in (1, 2, 3)}


@pytest.fixture(scope="session")
def w_kt(w_k):
    from odowin.windows import build_ktilde

    return {k: build_ktilde(w_k[k], "dovetail") for k in (1, 2, 3)}


@pytest.fixture(scope="session")
def w_z2():
    return presets.build_preset_window("z2")


@pytest.fixture(scope="session")
def w_heis():
    return presets.build_preset_window("heis")


@pytest.fixture(scope="session")
def w_heis_k2(w_heis):
    from odowin.windows import build_k

    return build_k(w_heis, 2, 1)


@pytest.fixture(scope="session")
def w_heis_kt2(w_heis_k2):
    from odowin.windows import build_ktilde

    return build_ktilde(w_heis_k2, "dovetail")
