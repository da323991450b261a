import pytest

from bornsim.rng import Xoshiro256pp


class ScriptedRng(Xoshiro256pp):
    """Generator with scripted die rolls and/or normal draws for forced cases.

    Falls back to the real stream once a script runs dry, so partially
    scripted tests stay well defined.
    """

    def __init__(self, rolls=None, normals=None, seed=0):
        super().__init__(seed)
        self._rolls = list(rolls) if rolls is not None else None
        self._normals = list(normals) if normals is not None else None

    def roll(self, faces):
        if self._rolls:
            return self._rolls.pop(0)
        if self._rolls is not None:
            raise AssertionError("scripted rolls exhausted")
        return super().roll(faces)

    def normal(self):
        if self._normals:
            return self._normals.pop(0)
        if self._normals is not None:
            raise AssertionError("scripted normals exhausted")
        return super().normal()


@pytest.fixture
def scripted_rng():
    return ScriptedRng
