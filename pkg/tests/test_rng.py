import numpy as np

from formlab.rng import mix, philox


def test_same_label_same_stream():
    a = philox(42, "exp", 7).integers(0, 1 << 30, size=16)
    b = philox(42, "exp", 7).integers(0, 1 << 30, size=16)
    assert (a == b).all()


def test_different_labels_differ():
    a = philox(42, "exp", 7).integers(0, 1 << 30, size=16)
    b = philox(42, "exp", 8).integers(0, 1 << 30, size=16)
    c = philox(43, "exp", 7).integers(0, 1 << 30, size=16)
    assert (a != b).any() and (a != c).any()


def test_mix_is_order_sensitive():
    assert mix(1, "a", "b") != mix(1, "b", "a")
    assert mix(1, 2) != mix(2, 1)


def test_mix_frozen_values():
    # Pinned so stored manifests stay decodable across refactors.
    assert mix(0) == 16294208416658607535
    assert mix(1, "key0", 0) == mix(1, "key0", 0)
    assert 0 <= mix(123, "x", 9) < 1 << 64


def test_draws_are_schedule_independent():
    # Drawing for index 5 never depends on whether index 4 was drawn first.
    g5 = philox(9, 5).random(4)
    _ = philox(9, 4).random(1000)
    g5_again = philox(9, 5).random(4)
    assert (g5 == g5_again).all()
    assert isinstance(philox(0), np.random.Generator)
