"""Test support: semi-functional oracles and a recording RNG.

Nothing here is needed to run the schemes.
"""

import random


class RecordingRandom(random.Random):
    """``random.Random`` that logs every ``randrange`` result in order."""

    def __init__(self, seed=None):
        super().__init__(seed)
        self.draws: list[int] = []

    def randrange(self, *args, **kwargs):
        v = super().randrange(*args, **kwargs)
        self.draws.append(v)
        return v
