"""Small builders shared by the test modules."""
from nsga2_approx.core import Individual, ObjectiveVector, make_genome


def omm(values, n=None, start_id=0):
    """OneMinMax individuals with the given f1 values, ids in order."""
    n = max(values) if n is None else n
    return [Individual(start_id + i, make_genome([1] * (n - k) + [0] * k), ObjectiveVector(k, n - k))
            for i, k in enumerate(values)]


def points(pairs):
    """Individuals with arbitrary objective vectors and a dummy genome."""
    return [Individual(i, make_genome("0"), ObjectiveVector(a, b)) for i, (a, b) in enumerate(pairs)]
