"""Generators for randomized test instances, shared across test modules.

Everything takes an explicit random.Random so suites are reproducible and
instance counts are exact (the acceptance gate promises minimum counts).
"""

from fractions import Fraction
import itertools

from pgflift import EXACT, TransformMatrix, TruncatedSeries, enumerate_fiber


def random_fraction(rng, lo=-5, hi=5, max_den=6):
    return Fraction(rng.randint(lo, hi), rng.randint(1, max_den))


def random_matrix(rng, num_targets, num_sources, entries=(0, 1, 2), allow_zero_columns=False):
    while True:
        rows = [
            [rng.choice(entries) for _ in range(num_sources)]
            for _ in range(num_targets)
        ]
        if allow_zero_columns or all(
            any(row[r] for row in rows) for r in range(num_sources)
        ):
            return TransformMatrix(rows)


def random_terms(rng, num_vars, degree, max_terms=6):
    terms = {}
    for _ in range(rng.randint(1, max_terms)):
        e = tuple(rng.randint(0, degree) for _ in range(num_vars))
        terms[e] = random_fraction(rng)
    return terms


def random_series(rng, num_vars=None, degree=6, max_terms=6):
    if num_vars is None:
        num_vars = rng.randint(1, 3)
    bounds = tuple(rng.randint(1, degree) for _ in range(num_vars))
    terms = {}
    for _ in range(rng.randint(1, max_terms)):
        e = tuple(rng.randint(0, b) for b in bounds)
        terms[e] = random_fraction(rng)
    return TruncatedSeries(bounds, EXACT, terms)


def pushforward_case(rng, degree=6):
    """One randomized instance for the substitution-vs-fiber-sum comparison.

    Returns (series, matrix, target_bounds): an exact finite-support series
    whose box is wide enough that the coverage check passes, a matrix with no
    zero columns, and a target box to aggregate into.
    """
    d = rng.randint(1, 3)
    m = rng.randint(1, 2)
    matrix = random_matrix(rng, m, d)
    terms = random_terms(rng, d, degree)
    corner = tuple(
        sum(a * degree for a in row) for row in matrix.rows
    )
    target_bounds = tuple(rng.randint(0, min(c, 12)) for c in corner)
    from pgflift import fiber_degree_bounds

    needed = fiber_degree_bounds(matrix, target_bounds)
    bounds = tuple(max(degree, b) for b in needed)
    series = TruncatedSeries(bounds, EXACT, terms)
    return series, matrix, target_bounds


def fiber_sum_series(series, matrix, target_bounds):
    """The aggregate built the slow way: enumerate every fiber and add.

    Uses the brute-force enumerator (a code path disjoint from the series
    pipeline) plus direct dict lookups into the input's terms.
    """
    expected = {}
    for target in itertools.product(*(range(b + 1) for b in target_bounds)):
        total = Fraction(0)
        for j in enumerate_fiber(matrix, target, series.bounds):
            total += series.terms.get(j, Fraction(0))
        if total != 0:
            expected[target] = total
    return TruncatedSeries(target_bounds, EXACT, expected)


def random_probabilities(rng, dim, allow_zero=True):
    lo = 0 if allow_zero else 1
    weights = [rng.randint(lo, 5) for _ in range(dim)]
    if sum(weights) == 0:
        weights[rng.randrange(dim)] = 1
    total = sum(weights)
    return tuple(Fraction(w, total) for w in weights)


def attainable_targets(dist, matrix):
    """Images of every positive-mass outcome of a finite-support distribution."""
    support = []
    caps = dist.support_bound()
    for j in itertools.product(*(range(c + 1) for c in caps)):
        if dist.pmf(j) > 0:
            support.append(j)
    return sorted({matrix.image(j) for j in support})
