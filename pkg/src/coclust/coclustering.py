"""FCC_STF: fuzzy co-clustering of documents and words with a single-term fuzzifier.

Memberships live in two matrices:

* ``U`` (C x N), document memberships. Every column sums to 1.
* ``V`` (C x K), word memberships. Every row sums to 1.

Both are updated in closed form, alternating V then U, with the Lagrange
multipliers of the two sum-to-one constraints already eliminated into the
``A1/B1`` and ``A2/B2`` terms. The closed forms can go negative; an offending
column of U (row of V) is clipped at zero and renormalized.

A bare fuzziness weight ``T`` appears in every formula. The document update
and its ``A1, B1`` use ``Tu``; the word update and ``A2, B2`` use ``Tv``; the
logged objective uses ``Tu``.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from .corpus import CorrelationMatrix
from .errors import AllClipped, DegenerateCluster, DimensionMismatch, NonFinite

log = logging.getLogger(__name__)

DEFAULT_DENOM_GUARD = 1e-12


@dataclass(frozen=True)
class FccStfConfig:
    """Run parameters.

    Parameters
    ----------
    C : int
        Number of co-clusters.
    Tu, Tv : float
        Fuzziness weights for the document and word memberships.
    E : float
        Stop when ``max |U(t+1) - U(t)| < E``.
    max_iters : int
        Hard cap on the number of V/U sweeps.
    seed : int
        Seed for the random initial U.
    denom_guard : float
        Closed-form denominators smaller than this in magnitude raise
        DegenerateCluster.
    tracked : sequence of (c, j) pairs, optional
        Word memberships snapshotted in the trace; all of V when None.
    """

    C: int
    Tu: float = 1.0
    Tv: float = 1.0
    E: float = 1e-6
    max_iters: int = 100
    seed: int = 0
    denom_guard: float = DEFAULT_DENOM_GUARD
    tracked: Optional[tuple[tuple[int, int], ...]] = None

    def __post_init__(self):
        if int(self.C) != self.C or self.C < 1:
            raise ValueError(f"C must be a positive integer, got {self.C!r}")
        if not self.Tu > 0 or not self.Tv > 0:
            raise ValueError("Tu and Tv must be > 0")
        if not self.E > 0:
            raise ValueError("E must be > 0")
        if int(self.max_iters) != self.max_iters or self.max_iters < 1:
            raise ValueError("max_iters must be a positive integer")
        if not self.denom_guard > 0:
            raise ValueError("denom_guard must be > 0")
        if not -(2**63) <= self.seed < 2**64:
            raise ValueError("seed must fit in 64 bits")
        if self.tracked is not None:
            object.__setattr__(self, "tracked", tuple((int(c), int(j)) for c, j in self.tracked))


@dataclass(frozen=True)
class IterationRecord:
    iteration: int
    J: float
    max_delta_u: float
    v_snapshot: tuple[float, ...]
    clipped_v: bool = False
    clipped_u: bool = False


@dataclass(frozen=True)
class IterationTrace:
    """Per-sweep history; ``columns`` names the (c, j) of each snapshot entry."""

    columns: tuple[tuple[int, int], ...]
    records: tuple[IterationRecord, ...] = ()

    def __len__(self):
        return len(self.records)

    def __iter__(self):
        return iter(self.records)

    def __getitem__(self, k):
        return self.records[k]

    @property
    def J(self) -> np.ndarray:
        return np.array([r.J for r in self.records])


@dataclass(frozen=True, eq=False)
class CoClusterResult:
    U: np.ndarray
    V: np.ndarray
    trace: IterationTrace
    converged: bool
    iterations_run: int
    doc_residual: float = field(default=0.0)
    word_residual: float = field(default=0.0)

    @property
    def J(self) -> float:
        return self.trace.records[-1].J

    def doc_clusters(self) -> np.ndarray:
        """Hard assignment of each document (argmax over clusters)."""
        return np.argmax(self.U, axis=0)

    def summary(self) -> dict:
        C, N = self.U.shape
        return {
            "C": C,
            "N": N,
            "K": self.V.shape[1],
            "converged": self.converged,
            "iterations_run": self.iterations_run,
            "J": self.J,
            "max_delta_u": self.trace.records[-1].max_delta_u,
            "doc_residual": self.doc_residual,
            "word_residual": self.word_residual,
            "doc_clusters": [int(c) for c in self.doc_clusters()],
        }


def _as_array(D) -> np.ndarray:
    if isinstance(D, CorrelationMatrix):
        return D.values
    return np.asarray(D, dtype=float)


def _frozen(a: np.ndarray) -> np.ndarray:
    a.flags.writeable = False
    return a


def init_memberships(C: int, N: int, seed: int) -> np.ndarray:
    """Random column-stochastic C x N document memberships."""
    if C < 1 or N < 1:
        raise ValueError("C and N must be >= 1")
    rng = np.random.default_rng(seed)
    U = rng.uniform(0.0, 1.0, size=(C, N))
    # uniform() is half-open at 0; keep entries strictly positive
    U[U == 0.0] = np.nextafter(0.0, 1.0)
    return U / U.sum(axis=0, keepdims=True)


def clip_renormalize(row) -> np.ndarray:
    """Zero the negative entries, then rescale to sum to 1.

    Raises AllClipped when nothing positive is left.
    """
    x = np.asarray(row, dtype=float)
    x = np.where(x < 0.0, 0.0, x)
    total = x.sum()
    if not total > 0.0:
        raise AllClipped("every membership entry was clipped to zero")
    return x / total


def _doc_denominators(V: np.ndarray, Tu: float, guard: float) -> np.ndarray:
    den = 2.0 * Tu * (np.sum(V * V, axis=1) - 1.0)
    bad = np.flatnonzero(np.abs(den) < guard)
    if bad.size:
        raise DegenerateCluster(int(bad[0]), "document")
    return den


def _word_denominators(U: np.ndarray, Tv: float, guard: float) -> np.ndarray:
    su = U.sum(axis=1)
    den = 2.0 * Tv * (1.0 - 2.0 * su + np.sum(U * U, axis=1))
    bad = np.flatnonzero(np.abs(den) < guard)
    if bad.size:
        raise DegenerateCluster(int(bad[0]), "word")
    return den


def _check_shapes(n_rows_mem, D, axis_name):
    if n_rows_mem != D.shape[axis_name]:
        raise DimensionMismatch(
            f"membership matrix has {n_rows_mem} columns but D has {D.shape[axis_name]} along axis {axis_name}"
        )


def compute_doc_update_terms(i, V, D, Tu, denom_guard=DEFAULT_DENOM_GUARD):
    """Return ``(A1, B1)`` for document ``i``.

    With ``den_d = 2 Tu (sum_j v_dj^2 - 1)`` and
    ``num_d = den_d - sum_j v_dj d_ij``::

        A1 = 1 - sum_d num_d / den_d
        B1 = sum_d 1 / den_d

    ``A1 / B1`` is the eliminated multiplier that makes column i of U sum to 1.
    """
    V = np.asarray(V, dtype=float)
    D = _as_array(D)
    _check_shapes(V.shape[1], D, 1)
    den = _doc_denominators(V, Tu, denom_guard)
    num = den - V @ D[i]
    return 1.0 - float(np.sum(num / den)), float(np.sum(1.0 / den))


def compute_word_update_terms(c, U, D, Tv, denom_guard=DEFAULT_DENOM_GUARD):
    """Return ``(A2, B2)`` for cluster ``c``.

    With ``den = 2 Tv (1 - 2 sum_i u_ci + sum_i u_ci^2)`` and
    ``num_q = 2 Tv (sum_i u_ci^2 - sum_i u_ci) - sum_i u_ci d_iq``::

        A2 = 1 - sum_q num_q / den
        B2 = K / den
    """
    U = np.asarray(U, dtype=float)
    D = _as_array(D)
    _check_shapes(U.shape[1], D, 0)
    u = U[c]
    su, su2 = u.sum(), np.dot(u, u)
    den = 2.0 * Tv * (1.0 - 2.0 * su + su2)
    if abs(den) < denom_guard:
        raise DegenerateCluster(int(c), "word")
    num = 2.0 * Tv * (su2 - su) - u @ D
    K = D.shape[1]
    return 1.0 - float(np.sum(num / den)), K / den


# overflow surfaces as NonFinite below
@np.errstate(over="ignore", invalid="ignore")
def _update_doc(V, D, Tu, guard):
    C = V.shape[0]
    if C == 1:
        return np.ones((1, D.shape[0])), False
    den = _doc_denominators(V, Tu, guard)          # (C,)
    num = den[:, None] - V @ D.T                   # (C, N)
    A1 = 1.0 - np.sum(num / den[:, None], axis=0)  # (N,)
    B1 = np.sum(1.0 / den)
    U = (num + A1 / B1) / den[:, None]
    if not np.all(np.isfinite(U)):
        raise NonFinite("document update produced a non-finite membership")
    clipped = False
    for i in np.flatnonzero(np.any(U < 0.0, axis=0)):
        U[:, i] = clip_renormalize(U[:, i])
        clipped = True
    return U, clipped


@np.errstate(over="ignore", invalid="ignore")
def _update_word(U, D, Tv, guard):
    C, K = U.shape[0], D.shape[1]
    if K == 1:
        return np.ones((C, 1)), False
    den = _word_denominators(U, Tv, guard)                               # (C,)
    su, su2 = U.sum(axis=1), np.sum(U * U, axis=1)
    num = (2.0 * Tv * (su2 - su))[:, None] - U @ D                       # (C, K)
    A2 = 1.0 - np.sum(num / den[:, None], axis=1)
    B2 = K / den
    V = (num + (A2 / B2)[:, None]) / den[:, None]
    if not np.all(np.isfinite(V)):
        raise NonFinite("word update produced a non-finite membership")
    clipped = False
    for c in np.flatnonzero(np.any(V < 0.0, axis=1)):
        V[c] = clip_renormalize(V[c])
        clipped = True
    return V, clipped


def update_doc_memberships(V, D, Tu, denom_guard=DEFAULT_DENOM_GUARD) -> np.ndarray:
    """Closed-form U given V.

    ``u_ci = (den_c - sum_j v_cj d_ij + A1_i / B1) / den_c`` with
    ``den_c = 2 Tu (sum_j v_cj^2 - 1)``. Columns holding a negative entry are
    clip-renormalized. A single cluster gets all-ones exactly.
    """
    V = np.asarray(V, dtype=float)
    D = _as_array(D)
    _check_shapes(V.shape[1], D, 1)
    return _update_doc(V, D, Tu, denom_guard)[0]


def update_word_memberships(U, D, Tv, denom_guard=DEFAULT_DENOM_GUARD) -> np.ndarray:
    """Closed-form V given U.

    ``v_cj = (2 Tv (S2_c - S1_c) - sum_i u_ci d_ij + A2_c / B2_c) / den_c`` with
    ``S1_c = sum_i u_ci``, ``S2_c = sum_i u_ci^2`` and
    ``den_c = 2 Tv (1 - 2 S1_c + S2_c)``. Rows holding a negative entry are
    clip-renormalized. A single word gets all-ones exactly.
    """
    U = np.asarray(U, dtype=float)
    D = _as_array(D)
    _check_shapes(U.shape[1], D, 0)
    return _update_word(U, D, Tv, denom_guard)[0]


def objective(U, V, D, T: float) -> float:
    """Aggregation plus single-term fuzzifier.

    ``J = sum_{c,i,j} u_ci v_cj d_ij + T sum_{c,i,j} (u_ci + v_cj - u_ci v_cj)^2``

    The constraint terms vanish on feasible memberships and are left out.
    """
    U = np.asarray(U, dtype=float)
    V = np.asarray(V, dtype=float)
    D = _as_array(D)
    if U.shape[0] != V.shape[0] or U.shape[1] != D.shape[0] or V.shape[1] != D.shape[1]:
        raise DimensionMismatch(f"shapes U{U.shape}, V{V.shape}, D{D.shape} are inconsistent")
    aggregation = np.einsum("ci,ij,cj->", U, D, V)
    # u + v - uv = u (1 - v) + v, expanded and summed over (i, j) per cluster
    N = U.shape[1]
    w = 1.0 - V
    fuzz = (
        np.sum(U * U, axis=1) * np.sum(w * w, axis=1)
        + 2.0 * U.sum(axis=1) * np.sum(V * w, axis=1)
        + N * np.sum(V * V, axis=1)
    )
    return float(aggregation + T * fuzz.sum())


def run_fcc_stf(
    config: FccStfConfig,
    D,
    callback: Optional[Callable[[int, np.ndarray, np.ndarray], None]] = None,
) -> CoClusterResult:
    """Alternate word and document updates until U stops moving.

    Each sweep updates V from U, then U from V, records the objective, the
    largest change in U and the tracked word memberships, and stops once that
    change drops below ``config.E``. ``callback(iteration, U, V)`` is invoked
    after every sweep with read-only views.

    With a single word (K = 1) every feasible U gives the same objective, so
    U is carried over unchanged instead of hitting the singular document
    update.
    """
    D = _as_array(D)
    if D.ndim != 2 or D.shape[0] < 1 or D.shape[1] < 1:
        raise DimensionMismatch(f"D must be a non-empty 2-D matrix, got shape {D.shape}")
    if np.any(D < 0) or not np.all(np.isfinite(D)):
        raise ValueError("D must be finite and nonnegative")
    N, K = D.shape
    C = config.C
    if C > N:
        raise ValueError(f"C={C} exceeds the number of documents N={N}")

    if config.tracked is None:
        columns = tuple((c, j) for c in range(C) for j in range(K))
    else:
        columns = config.tracked
        for c, j in columns:
            if not (0 <= c < C and 0 <= j < K):
                raise ValueError(f"tracked entry ({c}, {j}) outside V of shape ({C}, {K})")
    rows = np.array([c for c, _ in columns], dtype=int)
    cols = np.array([j for _, j in columns], dtype=int)

    U = init_memberships(C, N, config.seed)
    records = []
    converged = False
    V = None
    for t in range(1, config.max_iters + 1):
        try:
            V, clipped_v = _update_word(U, D, config.Tv, config.denom_guard)
            if K == 1:
                U_new, clipped_u = U.copy(), False
            else:
                U_new, clipped_u = _update_doc(V, D, config.Tu, config.denom_guard)
        except DegenerateCluster as exc:
            raise exc.at_iteration(t) from None
        except NonFinite as exc:
            raise NonFinite(f"{exc} (iteration {t})") from None

        delta = float(np.max(np.abs(U_new - U)))
        U = U_new
        J = objective(U, V, D, config.Tu)
        if not np.isfinite(J):
            raise NonFinite(f"non-finite objective at iteration {t}")
        records.append(
            IterationRecord(
                iteration=t,
                J=J,
                max_delta_u=delta,
                v_snapshot=tuple(float(x) for x in V[rows, cols]),
                clipped_v=clipped_v,
                clipped_u=clipped_u,
            )
        )
        if callback is not None:
            callback(t, _frozen(U.copy()), _frozen(V.copy()))
        log.debug("iteration %d: J=%.6f max|dU|=%.3e", t, J, delta)
        if delta < config.E:
            converged = True
            break

    return CoClusterResult(
        U=_frozen(U),
        V=_frozen(V),
        trace=IterationTrace(columns=columns, records=tuple(records)),
        converged=converged,
        iterations_run=len(records),
        doc_residual=float(np.max(np.abs(U.sum(axis=0) - 1.0))),
        word_residual=float(np.max(np.abs(V.sum(axis=1) - 1.0))),
    )


def _fmt(x: float) -> str:
    return np.format_float_positional(float(x), unique=True, trim="k", min_digits=6)


def export_trace(result) -> bytes:
    """Render the iteration trace as CSV.

    Header ``iteration,J,max_delta_u,v_<c>_<j>,...`` (0-based c, j), then one
    row per sweep. Reals are written in positional notation with at least six
    fractional digits (``0.000000``) and as many more as needed to round-trip
    exactly.
    """
    trace = result.trace if isinstance(result, CoClusterResult) else result
    if not len(trace):
        raise ValueError("trace is empty")
    header = ["iteration", "J", "max_delta_u"] + [f"v_{c}_{j}" for c, j in trace.columns]
    lines = [",".join(header)]
    for rec in trace.records:
        lines.append(",".join([str(rec.iteration), _fmt(rec.J), _fmt(rec.max_delta_u)] + [_fmt(v) for v in rec.v_snapshot]))
    return ("\n".join(lines) + "\n").encode("ascii")


def parse_trace(data: bytes) -> IterationTrace:
    """Inverse of :func:`export_trace` (clipping flags are not stored)."""
    lines = data.decode("ascii").strip().splitlines()
    header = lines[0].split(",")
    if header[:3] != ["iteration", "J", "max_delta_u"]:
        raise ValueError(f"unexpected trace header {lines[0]!r}")
    columns = []
    for name in header[3:]:
        _, c, j = name.split("_")
        columns.append((int(c), int(j)))
    records = []
    for line in lines[1:]:
        parts = line.split(",")
        records.append(
            IterationRecord(
                iteration=int(parts[0]),
                J=float(parts[1]),
                max_delta_u=float(parts[2]),
                v_snapshot=tuple(float(p) for p in parts[3:]),
            )
        )
    return IterationTrace(columns=tuple(columns), records=tuple(records))
