"""Direct high-precision summation of series specs, with tail extrapolation.

The nested sum is swept over the outer index once, keeping one incremental
cumulative sum per inner level (cost O(N * depth)).  Arithmetic is fixed-point
over Python integers scaled by 2^F with F ~ (digits + 15) * log2(10) bits;
each operation's truncation error is below 2^-F.

The tail beyond the cutoff decays like N^(1-alpha) * ln(N)^j with the known
exponent alpha = s_1 + binom_power/2 and j < depth, so the extrapolation
fits partial sums at N, 2N, ..., 2^L N against the basis
{1} + {N^(1-alpha-k) * ln(N)^j}; the error estimate is the change from the
previous extrapolation level.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import mpmath
from mpmath import mpf, workdps

from .series import HarmonicSpec, Parity, Relation, SeriesSpec


class ConfigTooSmallError(ValueError):
    """The tail estimate is not credible at the requested precision."""


@dataclass
class OracleConfig:
    cutoff: int = 200_000
    extrapolation_levels: int = 4
    precision_digits: int = 40

    def __post_init__(self):
        if self.cutoff < 100:
            raise ValueError("cutoff must be >= 100")
        if self.precision_digits < 15:
            raise ValueError("precision_digits must be >= 15")
        if self.extrapolation_levels < 0:
            raise ValueError("extrapolation_levels must be >= 0")


@dataclass
class OracleResult:
    value: mpf
    error_estimate: mpf
    terms_used: int


def _scale_bits(digits: int) -> int:
    return int(math.ceil((digits + 15) * math.log2(10))) + 16


def _checkpoints(cfg: OracleConfig) -> list[int]:
    """Sample points N * 2^(i/2), i = 0..2L: one sweep, 2L+1 samples.

    The half-steps cost nothing (the sweep reaches 2^L N anyway) and buy
    enough samples to fit the log-corrected tail basis at full depth.
    """
    if cfg.extrapolation_levels == 0:
        return [cfg.cutoff // 2, cfg.cutoff]
    out = []
    for i in range(2 * cfg.extrapolation_levels + 1):
        out.append(int(round(cfg.cutoff * 2 ** (i / 2))))
    return sorted(set(out))


def central_ratio(n: int, x: Fraction | float = Fraction(1), digits: int = 40):
    """a_n(x) = binom(2n, n) x^(2n) / 4^n by the ratio recurrence."""
    if n < 0:
        raise ValueError("n must be >= 0")
    x = Fraction(x)
    F = _scale_bits(digits)
    one = 1 << F
    x2 = (x.numerator * x.numerator << F) // (x.denominator * x.denominator)
    a = one
    for k in range(1, n + 1):
        a = a * (2 * k - 1) // (2 * k)
        if x2 != one:
            a = (a * x2) >> F
    with workdps(digits + 15):
        return mpf(a) / mpf(one)


def _index_value(parity: Parity, n: int) -> int:
    return parity.index_value(n)


def _partial_sums(
    spec: SeriesSpec, checkpoints: list[int], digits: int = 60
) -> tuple[list[int], int, int]:
    """Fixed-point partial sums of the outer sweep at the given checkpoints.

    Returns (scaled sums, scale bits F, terms swept).
    """
    F = _scale_bits(max(digits, 40))
    one = 1 << F
    d = spec.depth
    terms = spec.terms
    rels = spec.relations
    x = spec.argument
    x2 = (x.numerator * x.numerator << F) // (x.denominator * x.denominator)
    x_is_one = x == 1
    p = spec.binom_power
    n_max = max(checkpoints)
    tail = spec.tail_bound
    bottom_start = tail + (1 if rels[-1] is Relation.STRICT else 0)

    cum = [0] * (d + 1)  # cum[j]: cumulative sum for level j (1-based), cum[d] unused
    prev = [0] * (d + 1)
    a = one  # a_0 = 1
    sums: list[int] = []
    points = sorted(set(checkpoints))
    next_point = 0
    s_total = 0
    swept = 0

    for n in range(0, n_max + 1):
        if n > 0:
            a = a * (2 * n - 1) // (2 * n)
            if not x_is_one:
                a = (a * x2) >> F
        prev[1:d] = cum[1:d]
        for j in range(d - 1, 0, -1):
            if j == d - 1:
                t_next = one if n >= bottom_start else 0
            else:
                t_next = cum[j + 1] if rels[j] is Relation.WEAK else prev[j + 1]
            if t_next:
                l = _index_value(terms[j].parity, n)
                if l != 0:
                    cum[j] += t_next // (l ** terms[j].exponent)
        if d == 1:
            t1 = one if n >= bottom_start else 0
        else:
            t1 = cum[1] if rels[0] is Relation.WEAK else prev[1]
        if t1:
            l0 = _index_value(terms[0].parity, n)
            if l0 != 0:
                ap = a if p == 1 else (a * a) >> F
                s_total += (ap * t1) // (l0 ** terms[0].exponent << F)
        swept += 1
        while next_point < len(points) and n == points[next_point]:
            sums.append(s_total)
            next_point += 1
    ordered = {pt: sums[i] for i, pt in enumerate(points)}
    return [ordered[pt] for pt in checkpoints], F, swept


def _extrapolate(
    points: list[int],
    values: list[mpf],
    alpha: Fraction,
    log_degree: int,
    levels: int,
):
    """Fit {1} + {N^(1-alpha-k) ln(N)^j, j = log_degree..0} to the samples."""
    basis = []
    k = 0
    while len(basis) < levels:
        for j in range(log_degree, -1, -1):
            basis.append((1 - alpha - k, j))
            if len(basis) == levels:
                break
        k += 1

    def phi(expo, j, big_n):
        return big_n ** mpf(float(expo)) * mpmath.log(big_n) ** j

    def solve(m: int):
        # columns scaled to 1 at the first sample to keep the LU well posed
        offset = len(points) - (m + 1)
        with mpmath.extradps(25):
            mat = mpmath.matrix(m + 1, m + 1)
            rhs = mpmath.matrix(m + 1, 1)
            for i in range(m + 1):
                big_n = mpf(points[offset + i])
                mat[i, 0] = mpf(1)
                for b, (expo, j) in enumerate(basis[:m]):
                    mat[i, b + 1] = phi(expo, j, big_n) / phi(expo, j, mpf(points[offset]))
                rhs[i] = values[offset + i]
            return mpmath.lu_solve(mat, rhs)[0]

    last = solve(levels)
    previous = solve(max(levels - 2, 0)) if levels >= 1 else values[-1]
    return last, abs(last - previous)


def direct_sum(spec: SeriesSpec, cfg: OracleConfig | None = None) -> OracleResult:
    """Sum the nested series; the outer tail is removed by extrapolation."""
    cfg = cfg or OracleConfig()
    with workdps(cfg.precision_digits + 15):
        if spec.tail_bound >= cfg.cutoff:
            return OracleResult(mpf(0), mpf(0), 0)
        points = _checkpoints(cfg)
        sums, F, swept = _partial_sums(spec, points, cfg.precision_digits)
        one = mpf(1 << F)
        values = [mpf(s) / one for s in sums]
        if spec.argument != 1 or cfg.extrapolation_levels == 0:
            # geometric decay in x^(2n): the partial sum is already converged
            value, err = values[-1], abs(values[-1] - values[-2])
        else:
            # outer terms decay like n^-(s_1 + p/2) times polylog: inner sums
            # only grow logarithmically, and their deficits shift the exponent
            # by integers
            alpha = Fraction(spec.terms[0].exponent) + Fraction(spec.binom_power, 2)
            value, err = _extrapolate(points, values, alpha, spec.depth - 1, len(points) - 1)
        if err > mpf(10) ** (-cfg.precision_digits / 2):
            raise ConfigTooSmallError(
                f"tail error estimate {mpmath.nstr(err, 5)} exceeds the "
                f"10^-{cfg.precision_digits / 2:g} budget; raise cutoff or levels"
            )
        return OracleResult(value, err, swept)


def gamma_tail_check(n: int, d: int, cfg: OracleConfig | None = None):
    """Tail sum over n_1 > ... > n_d > n of a_{n_1}/((2n_1-1)...(2n_d-1)).

    Compare against central_ratio(n, 1): the two agree exactly.
    """
    from .series import IndexTerm

    spec = SeriesSpec(
        1,
        tuple(IndexTerm(Parity.ODD_LOW, 1) for _ in range(d)),
        tuple(Relation.STRICT for _ in range(d)),
        tail_bound=n,
    )
    return direct_sum(spec, cfg).value


def direct_harmonic_sum(h: HarmonicSpec, cfg: OracleConfig | None = None) -> OracleResult:
    """Directly sum a harmonic-weighted series (independent of expand_harmonic)."""
    cfg = cfg or OracleConfig()
    with workdps(cfg.precision_digits + 15):
        points = _checkpoints(cfg) if cfg.extrapolation_levels else _checkpoints(
            OracleConfig(cfg.cutoff, 1, cfg.precision_digits)
        )
        F = _scale_bits(max(cfg.precision_digits, 40))
        one = 1 << F
        n_max = points[-1]
        e, f = len(h.k_vec), len(h.l_vec)
        z = [0] * (e + 1)
        z[e] = one
        t = [0] * (f + 1)
        t[f] = one
        a = one
        p = h.binom_power
        s_total = 0
        sums_at = {}
        point_set = set(points)
        for n in range(0, n_max + 1):
            if n > 0:
                a = a * (2 * n - 1) // (2 * n)
                # z_j(n) = z_j(n-1) + n^-k_j * z_{j+1}(n-1), ascending j keeps
                # the j+1 value from the previous round
                for j in range(e):
                    z[j] += z[j + 1] // n ** h.k_vec[j]
                for j in range(f):
                    t[j] += t[j + 1] // (2 * n - 1) ** h.l_vec[j]
                # EVEN heads divide by n^q (expand_harmonic's 2^q factor is the
                # rewrite to (2n)^q); odd heads divide by 2n+1 or 2n-1
                head = n if h.head_parity is Parity.EVEN else _index_value(h.head_parity, n)
                ap = a if p == 1 else (a * a) >> F
                weighted = (ap * z[0]) >> F
                weighted = (weighted * t[0]) >> F
                s_total += weighted // head**h.head_exponent
            elif h.head_parity is Parity.ODD_HIGH and e == 0 and f == 0:
                s_total += one  # n = 0 term: a_0^p / 1
            if n in point_set:
                sums_at[n] = s_total
        values = [mpf(sums_at[pt]) / mpf(one) for pt in points]
        alpha = Fraction(h.head_exponent) + Fraction(p, 2)
        value, err = _extrapolate(points, values, alpha, e + f, len(points) - 1)
        if err > mpf(10) ** (-cfg.precision_digits / 2):
            raise ConfigTooSmallError("harmonic tail estimate too large for the precision budget")
        return OracleResult(value, err, n_max + 1)
