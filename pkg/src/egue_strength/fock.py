"""Monte Carlo oracle: explicit EGUE ensembles in fermionic Fock space.

Many-particle states are bit masks over N orbitals.  An operator of the form
sum_{i,j} C_ij A_i^dag(c) A_j(a) is stored as a fixed sparse "embedding" map
that sends the flattened coefficient array C to the flattened dense operator.
The map depends only on (N, particle numbers, ranks); every ensemble member
then costs a single sparse mat-vec plus dense linear algebra.

Phase convention: A_i^dag creates the orbitals of i from the highest to the
lowest, so each created orbital q contributes (-1)^(occupied orbitals below q)
counted in the state it acts on.  A_j is the adjoint of A_j^dag, which makes
A_i^dag A_i a positive operator.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations
from typing import IO, Union

import numpy as np
from scipy import sparse

from .combinatorics import binom
from .errors import ArgumentOutOfRange, DimensionTooLarge, ShapeMismatch
from .removal import RemovalParams
from .spinless import SpinlessParams
from .two_species import TwoSpeciesParams

__all__ = [
    "DENSE_LIMIT",
    "ManyBodyBasis",
    "enumerate_basis",
    "sample_gue",
    "sample_complex",
    "embed_k_body",
    "embed_beta_type",
    "embed_removal",
    "mc_moment_table",
    "mc_moments",
    "StrengthHistogram",
    "mc_strength_histogram",
]

DENSE_LIMIT = 20000
MAX_ORBITALS = 28

Scenario = Union[SpinlessParams, TwoSpeciesParams, RemovalParams]


# -- basis -------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class ManyBodyBasis:
    """m-particle configurations over N orbitals in increasing mask order."""

    N: int
    m: int
    masks: np.ndarray  # int64, sorted

    def __len__(self) -> int:
        return len(self.masks)

    def __getitem__(self, idx: int) -> frozenset[int]:
        mask = int(self.masks[idx])
        return frozenset(q for q in range(self.N) if mask >> q & 1)

    def index(self, config) -> int:
        """Position of a configuration given as a mask or an orbital set."""
        mask = config if isinstance(config, (int, np.integer)) else sum(1 << q for q in config)
        pos = int(np.searchsorted(self.masks, mask))
        if pos == len(self.masks) or self.masks[pos] != mask:
            raise KeyError(f"configuration {config!r} is not in this basis")
        return pos

    def lookup(self, masks: np.ndarray) -> np.ndarray:
        return np.searchsorted(self.masks, masks)


@lru_cache(maxsize=64)
def _masks(N: int, m: int) -> np.ndarray:
    masks = np.fromiter((sum(1 << q for q in c) for c in combinations(range(N), m)),
                        dtype=np.int64, count=binom(N, m))
    masks.sort()
    masks.setflags(write=False)
    return masks


def enumerate_basis(N: int, m: int, max_states: int | None = None) -> ManyBodyBasis:
    """All binom(N, m) configurations, sorted by bit mask.

    ``max_states`` caps the dimension (``DimensionTooLarge`` above it); the
    default is no cap, because enumeration itself is cheap.  Dense operator
    builders apply :data:`DENSE_LIMIT`.
    """
    if not (0 <= m <= N <= MAX_ORBITALS):
        raise ArgumentOutOfRange(f"need 0 <= m <= N <= {MAX_ORBITALS}, got N={N}, m={m}")
    dim = binom(N, m)
    if max_states is not None and dim > max_states:
        raise DimensionTooLarge(f"binom({N},{m}) = {dim} exceeds the limit {max_states}")
    return ManyBodyBasis(N, m, _masks(N, m))


# -- random coefficients -----------------------------------------------------

def _rng(seed) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def sample_gue(dim: int, v2: float = 1.0, rng_seed=None) -> np.ndarray:
    """Hermitian matrix with E[V_ab V_cd] = v2 delta_ad delta_bc.

    Diagonal entries are real with variance v2; off-diagonal real and
    imaginary parts are independent with variance v2/2 each.
    """
    if dim < 1:
        raise ArgumentOutOfRange(f"dim must be >= 1, got {dim}")
    rng = _rng(rng_seed)
    v2 = float(v2)
    a = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    h = (a + a.conj().T) * (math.sqrt(v2) / 2)
    h[np.diag_indices(dim)] = h.diagonal().real
    return h


def sample_complex(shape, v2: float = 1.0, rng_seed=None) -> np.ndarray:
    """Independent complex Gaussians with E|z|^2 = v2."""
    rng = _rng(rng_seed)
    s = math.sqrt(float(v2) / 2)
    return s * (rng.standard_normal(shape) + 1j * rng.standard_normal(shape))


# -- embedding maps ----------------------------------------------------------

def _parity(rest: np.ndarray, mask: int) -> np.ndarray:
    """(-1)^sum_{q in mask} popcount(rest below q) as +-1 integers."""
    total = np.zeros(rest.shape, dtype=np.int64)
    q = 0
    while mask >> q:
        if mask >> q & 1:
            total += np.bitwise_count(rest & ((1 << q) - 1))
        q += 1
    return 1 - 2 * (total & 1)


@dataclass(frozen=True, eq=False)
class _Transitions:
    """Nonzero <dst|A_i^dag(c) A_j(a)|src> elements, one entry per (i, j, src)."""

    rows: np.ndarray
    cols: np.ndarray
    ci: np.ndarray  # index of the created subset
    ai: np.ndarray  # index of the annihilated subset
    sign: np.ndarray
    shape: tuple[int, int]
    coeff_shape: tuple[int, int]

    def outer(self, other: "_Transitions") -> "_Transitions":
        """Species product: the first factor is the slow index everywhere."""
        n1, n2 = len(self.rows), len(other.rows)
        a = np.repeat(np.arange(n1), n2)
        b = np.tile(np.arange(n2), n1)
        d2r, d2c = other.shape
        c2c, c2a = other.coeff_shape
        return _Transitions(
            rows=self.rows[a] * d2r + other.rows[b],
            cols=self.cols[a] * d2c + other.cols[b],
            ci=self.ci[a] * c2c + other.ci[b],
            ai=self.ai[a] * c2a + other.ai[b],
            sign=self.sign[a] * other.sign[b],
            shape=(self.shape[0] * d2r, self.shape[1] * d2c),
            coeff_shape=(self.coeff_shape[0] * c2c, self.coeff_shape[1] * c2a),
        )

    def matrix(self) -> sparse.csc_matrix:
        """Sparse map from coefficients (row-major, flattened) to the operator.

        Column-compressed: the index array scales with the number of
        coefficients, not with the d_f * d_i rows.
        """
        dr, dc = self.shape
        nc = self.coeff_shape[1]
        out = sparse.coo_matrix(
            (self.sign.astype(np.int64), (self.rows * dc + self.cols, self.ci * nc + self.ai)),
            shape=(dr * dc, self.coeff_shape[0] * nc))
        return out.tocsc()

    def operator(self, coeffs: np.ndarray) -> sparse.csr_matrix:
        vals = self.sign * coeffs.reshape(-1)[self.ci * self.coeff_shape[1] + self.ai]
        return sparse.coo_matrix((vals, (self.rows, self.cols)), shape=self.shape).tocsr()


@lru_cache(maxsize=32)
def _transitions(N: int, m_src: int, c: int, a: int) -> _Transitions:
    """Elements of A_i^dag(c) A_j(a) from m_src to m_src - a + c particles.

    Work is organized over annihilated subsets j (vectorized over source
    states containing j) and then over created subsets i.
    """
    m_dst = m_src - a + c
    src = enumerate_basis(N, m_src)
    dst = enumerate_basis(N, m_dst)
    sub_a = _masks(N, a)
    sub_c = _masks(N, c)
    # pairs (source state, annihilated subset)
    p_col, p_ai, p_rest, p_sign = [], [], [], []
    for j, jm in enumerate(sub_a.tolist()):
        sel = np.nonzero((src.masks & jm) == jm)[0]
        if sel.size == 0:
            continue
        rest = src.masks[sel] ^ jm
        p_col.append(sel)
        p_ai.append(np.full(sel.size, j))
        p_rest.append(rest)
        p_sign.append(_parity(rest, jm))
    if not p_col:
        empty = np.zeros(0, dtype=np.int64)
        return _Transitions(empty, empty, empty, empty, empty, (len(dst), len(src)),
                            (len(sub_c), len(sub_a)))
    col = np.concatenate(p_col)
    ai = np.concatenate(p_ai)
    rest = np.concatenate(p_rest)
    sgn = np.concatenate(p_sign)
    rows, cols, cis, ais, signs = [], [], [], [], []
    for i, im in enumerate(sub_c.tolist()):
        ok = np.nonzero((rest & im) == 0)[0]
        if ok.size == 0:
            continue
        r = rest[ok]
        rows.append(dst.lookup(r | im))
        cols.append(col[ok])
        cis.append(np.full(ok.size, i))
        ais.append(ai[ok])
        signs.append(sgn[ok] * _parity(r, im))
    return _Transitions(np.concatenate(rows), np.concatenate(cols), np.concatenate(cis),
                        np.concatenate(ais), np.concatenate(signs),
                        (len(dst), len(src)), (len(sub_c), len(sub_a)))


@lru_cache(maxsize=32)
def _table(key: tuple) -> _Transitions:
    """Transitions for a tuple of (N, m_src, c, a) species factors."""
    t = _transitions(*key[0])
    for part in key[1:]:
        t = t.outer(_transitions(*part))
    return t


@lru_cache(maxsize=32)
def _embedding(key: tuple) -> tuple[sparse.csc_matrix, tuple[int, int], tuple[int, int]]:
    """Cached sparse embedding map for a species-factor key."""
    t = _table(key)
    return t.matrix(), t.shape, t.coeff_shape


def _key_shapes(key: tuple) -> tuple[tuple[int, int], tuple[int, int]]:
    """(operator shape, coefficient shape) without building anything."""
    shape, cshape = (1, 1), (1, 1)
    for N, m_src, c, a in key:
        shape = (shape[0] * binom(N, m_src - a + c), shape[1] * binom(N, m_src))
        cshape = (cshape[0] * binom(N, c), cshape[1] * binom(N, a))
    return shape, cshape


def _check_dense(shape: tuple[int, int], limit: int | None) -> None:
    limit = DENSE_LIMIT if limit is None else limit
    if max(shape) > limit:
        raise DimensionTooLarge(f"operator shape {shape} exceeds the dense limit {limit}")


def _apply(key: tuple, coeffs: np.ndarray, dense_limit: int | None, as_sparse: bool):
    shape, cshape = _key_shapes(key)
    coeffs = np.asarray(coeffs)
    if coeffs.size != cshape[0] * cshape[1]:
        raise ShapeMismatch(f"expected {cshape[0]}x{cshape[1]} coefficients, got shape {coeffs.shape}")
    if as_sparse:
        return _table(key).operator(coeffs)
    _check_dense(shape, dense_limit)
    e, _, _ = _embedding(key)
    return (e @ coeffs.reshape(-1)).reshape(shape)


def embed_k_body(coeffs: np.ndarray, basis: ManyBodyBasis, k: int,
                 dense_limit: int | None = None) -> np.ndarray:
    """Dense m-particle matrix of sum_ij V_ij A_i^dag(k) A_j(k).

    Integer coefficients give an integer matrix, so identities such as
    ``embed(I) == binom(m, k) I`` hold exactly.
    """
    side = binom(basis.N, k)
    coeffs = np.asarray(coeffs)
    if coeffs.shape != (side, side):
        raise ShapeMismatch(f"k-body coefficients must be {side}x{side}, got {coeffs.shape}")
    _check_dense((len(basis), len(basis)), dense_limit)
    return _apply(((basis.N, basis.m, k, k),), coeffs, dense_limit, False)


def embed_two_species(coeffs: np.ndarray, N1: int, m1: int, N2: int, m2: int,
                      i: int, j: int, dense_limit: int | None = None) -> np.ndarray:
    """One partition (i, j) of a two-species H on the (m1, m2) product space.

    Coefficients are indexed by pairs (alpha, a) of species-1 i-subsets and
    species-2 j-subsets, species 1 being the slow index.
    """
    side = binom(N1, i) * binom(N2, j)
    coeffs = np.asarray(coeffs)
    if coeffs.shape != (side, side):
        raise ShapeMismatch(f"partition ({i},{j}) coefficients must be {side}x{side}")
    return _apply(((N1, m1, i, i), (N2, m2, j, j)), coeffs, dense_limit, False)


def embed_beta_type(coeffs: np.ndarray, initial: tuple[ManyBodyBasis, ManyBodyBasis],
                    final: tuple[ManyBodyBasis, ManyBodyBasis], k0: int,
                    dense_limit: int | None = None) -> np.ndarray:
    """O = sum O_{alpha a} A_alpha^dag(k0) A_a(k0), species 2 -> species 1.

    ``initial`` and ``final`` are (species-1, species-2) bases; product states
    are ordered with species 1 as the slow index.
    """
    b1, b2 = initial
    f1, f2 = final
    if f1.N != b1.N or f2.N != b2.N or f1.m != b1.m + k0 or f2.m != b2.m - k0:
        raise ShapeMismatch("final bases must be (m1 + k0, m2 - k0) over the same orbitals")
    shape = (binom(b1.N, k0), binom(b2.N, k0))
    coeffs = np.asarray(coeffs)
    if coeffs.shape != shape:
        raise ShapeMismatch(f"transfer coefficients must be {shape[0]}x{shape[1]}, got {coeffs.shape}")
    return _apply(((b1.N, b1.m, k0, 0), (b2.N, b2.m, 0, k0)), coeffs, dense_limit, False)


def embed_removal(coeffs: np.ndarray, initial: ManyBodyBasis, final: ManyBodyBasis,
                  k0: int, dense_limit: int | None = None, as_sparse: bool = False):
    """O = sum_alpha V_alpha A_alpha(k0) from m to m - k0 particles.

    With ``as_sparse=True`` a CSR matrix is returned and the dense limit does
    not apply.
    """
    if initial.m < k0 or final.m != initial.m - k0 or final.N != initial.N:
        raise ShapeMismatch("final basis must hold m - k0 particles over the same orbitals")
    coeffs = np.asarray(coeffs)
    if coeffs.shape != (binom(initial.N, k0),):
        raise ShapeMismatch(f"removal coefficients must have length binom(N, k0), got {coeffs.shape}")
    return _apply(((initial.N, initial.m, 0, k0),), coeffs, dense_limit, as_sparse)


# -- ensemble members --------------------------------------------------------

def _member_rng(master_seed: int, r: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([int(master_seed), int(r)]))


class _Sampler:
    """Draws (H_i, H_f, O) for one scenario; H_f is H_i when spaces coincide."""

    def __init__(self, sc: Scenario, dense_limit: int | None = None):
        self.sc = sc
        if isinstance(sc, SpinlessParams):
            if sc.statistics != "fermion":
                raise ArgumentOutOfRange("the Fock-space simulator covers fermions only")
            if sc.k > sc.m or sc.t > sc.m:
                raise ArgumentOutOfRange("k and t must not exceed m for the simulator")
            self.h_i = [(((sc.N, sc.m, sc.k, sc.k),), binom(sc.N, sc.k), float(sc.v2_h))]
            self.h_f = None
            self.o_key = ((sc.N, sc.m, sc.t, sc.t),)
            self.o_shape = (binom(sc.N, sc.t), binom(sc.N, sc.t))
        elif isinstance(sc, TwoSpeciesParams):
            (f1, f2) = sc.final
            self.h_i, self.h_f = [], []
            for (i, j), v in sorted(sc.v2_h.items()):
                side = binom(sc.N1, i) * binom(sc.N2, j)
                self.h_i.append((((sc.N1, sc.m1, i, i), (sc.N2, sc.m2, j, j)), side, float(v)))
                self.h_f.append((((sc.N1, f1, i, i), (sc.N2, f2, j, j)), side, float(v)))
            self.o_key = ((sc.N1, sc.m1, sc.k0, 0), (sc.N2, sc.m2, 0, sc.k0))
            self.o_shape = (binom(sc.N1, sc.k0), binom(sc.N2, sc.k0))
        elif isinstance(sc, RemovalParams):
            side = binom(sc.N, sc.k)
            self.h_i = [(((sc.N, sc.m, sc.k, sc.k),), side, float(sc.v2_h))]
            self.h_f = [(((sc.N, sc.m - sc.k0, sc.k, sc.k),), side, float(sc.v2_h))]
            self.o_key = ((sc.N, sc.m, 0, sc.k0),)
            self.o_shape = (1, binom(sc.N, sc.k0))
        else:
            raise ArgumentOutOfRange(f"unsupported scenario {type(sc).__name__}")
        self.dense_limit = dense_limit
        for key in [self.o_key] + [k for k, _, _ in self.h_i + (self.h_f or [])]:
            _check_dense(_key_shapes(key)[0], dense_limit)
        self.shape = _key_shapes(self.o_key)[0]

    def draw(self, rng: np.random.Generator):
        sc = self.sc
        v_list = [sample_gue(side, v, rng) for _, side, v in self.h_i]
        h_i = sum(_apply(key, vv, self.dense_limit, False)
                  for (key, _, _), vv in zip(self.h_i, v_list))
        if self.h_f is None:
            h_f = h_i
        else:
            h_f = sum(_apply(key, vv, self.dense_limit, False)
                      for (key, _, _), vv in zip(self.h_f, v_list))
        if isinstance(sc, SpinlessParams):
            coeff = sample_gue(self.o_shape[0], float(sc.v2_o), rng)
        else:
            coeff = sample_complex(self.o_shape, float(sc.v2_o), rng)
        o = _apply(self.o_key, coeff, self.dense_limit, False)
        return h_i, h_f, o


def _powers(h: np.ndarray, n: int) -> list[np.ndarray]:
    out = [np.eye(h.shape[0], dtype=h.dtype)]
    for _ in range(n):
        out.append(out[-1] @ h)
    return out


def _member_moments(sampler: _Sampler, master_seed: int, r: int, order: int) -> np.ndarray:
    h_i, h_f, o = sampler.draw(_member_rng(master_seed, r))
    d_i = h_i.shape[0]
    hp = _powers(h_i, order)
    hq = hp if h_f is h_i else _powers(h_f, order)
    o_dag = o.conj().T
    out = np.zeros((order + 1, order + 1))
    for p in range(order + 1):
        g = o @ hp[p] @ o_dag  # lives in the final space
        for q in range(order + 1 - p):
            # Tr[O^dag H_f^q O H_i^p] = Tr[H_f^q G_p]
            out[p, q] = np.einsum("ij,ji->", hq[q], g).real / d_i
    return out


def _run_members(fn, members: int, threads: int) -> list:
    if threads <= 1:
        return [fn(r) for r in range(members)]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, range(members)))


def mc_moment_table(scenario: Scenario, members: int, master_seed: int = 0,
                    threads: int = 1, order: int = 4,
                    dense_limit: int | None = None) -> dict[tuple[int, int], tuple[float, float]]:
    """Sample mean and standard error of M_PQ for every P + Q <= ``order``.

    Member r draws from a generator seeded by (master_seed, r) and results
    are reduced in member order, so the output does not depend on
    ``threads``.
    """
    if members < 2:
        raise ArgumentOutOfRange("need at least two members for a standard error")
    sampler = _Sampler(scenario, dense_limit)
    per = np.stack(_run_members(lambda r: _member_moments(sampler, master_seed, r, order),
                                members, threads))
    mean = per.mean(axis=0)
    se = per.std(axis=0, ddof=1) / math.sqrt(members)
    return {(p, q): (float(mean[p, q]), float(se[p, q]))
            for p in range(order + 1) for q in range(order + 1 - p)}


def mc_moments(scenario: Scenario, P: int, Q: int, members: int, master_seed: int = 0,
               threads: int = 1) -> tuple[float, float]:
    """(mean, standard error) of Tr[O^dag H_f^Q O H_i^P] / d_i over the ensemble."""
    if P < 0 or Q < 0 or P + Q > 4:
        raise ArgumentOutOfRange(f"need P, Q >= 0 and P + Q <= 4, got ({P}, {Q})")
    return mc_moment_table(scenario, members, master_seed, threads, order=P + Q)[P, Q]


# -- strength histogram ------------------------------------------------------

@dataclass(frozen=True)
class StrengthHistogram:
    """Binned strength density over standardized (E_i, E_f); ``mass`` sums to 1."""

    edges_i: np.ndarray
    edges_f: np.ndarray
    mass: np.ndarray  # mass[a, b] for E_i bin a, E_f bin b
    outside: float  # fraction of strength beyond the binned window

    @property
    def centers_i(self) -> np.ndarray:
        return 0.5 * (self.edges_i[1:] + self.edges_i[:-1])

    @property
    def centers_f(self) -> np.ndarray:
        return 0.5 * (self.edges_f[1:] + self.edges_f[:-1])

    def correlation(self) -> float:
        x, y = np.meshgrid(self.centers_i, self.centers_f, indexing="ij")
        w = self.mass
        mx, my = (w * x).sum(), (w * y).sum()
        cxy = (w * (x - mx) * (y - my)).sum()
        return float(cxy / math.sqrt((w * (x - mx) ** 2).sum() * (w * (y - my) ** 2).sum()))

    def write_csv(self, fh: IO[str]) -> None:
        fh.write("e_i,e_f,mass\n")
        for a, ci in enumerate(self.centers_i):
            fh.writelines(f"{ci:.9g},{cf:.9g},{self.mass[a, b]:.9g}\n"
                          for b, cf in enumerate(self.centers_f))


def _standardize(e: np.ndarray, w: np.ndarray) -> np.ndarray:
    mu = (w * e).sum() / w.sum()
    sigma = math.sqrt((w * (e - mu) ** 2).sum() / w.sum())
    return (e - mu) / sigma


def _member_histogram(sampler: _Sampler, master_seed: int, r: int, edges: np.ndarray):
    h_i, h_f, o = sampler.draw(_member_rng(master_seed, r))
    e_i, u_i = np.linalg.eigh(h_i)
    if h_f is h_i:
        e_f, u_f = e_i, u_i
    else:
        e_f, u_f = np.linalg.eigh(h_f)
    s = np.abs(u_f.conj().T @ o @ u_i) ** 2  # s[f, i]
    x = _standardize(e_i, s.sum(axis=0))
    y = _standardize(e_f, s.sum(axis=1))
    xx = np.broadcast_to(x[None, :], s.shape).ravel()
    yy = np.broadcast_to(y[:, None], s.shape).ravel()
    hist, _, _ = np.histogram2d(xx, yy, bins=(edges, edges), weights=s.ravel())
    return hist, float(s.sum())


def mc_strength_histogram(scenario: Scenario, members: int, bins: int = 40,
                          master_seed: int = 0, half_range: float = 4.0,
                          threads: int = 1) -> StrengthHistogram:
    """Ensemble histogram of |<E_f|O|E_i>|^2 over standardized energies.

    Energies of each member are standardized with the centroid and width of
    the strength-weighted marginal, so the correlation of the histogram
    estimates xi.  Requires a full eigendecomposition per member.
    """
    sampler = _Sampler(scenario, dense_limit=5000)
    edges = np.linspace(-half_range, half_range, bins + 1)
    parts = _run_members(lambda r: _member_histogram(sampler, master_seed, r, edges),
                         members, threads)
    total = sum(h for h, _ in parts)
    strength = sum(s for _, s in parts)
    binned = float(total.sum())
    return StrengthHistogram(edges, edges.copy(), total / binned,
                             max(0.0, 1.0 - binned / strength))
