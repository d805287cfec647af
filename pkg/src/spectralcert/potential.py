"""Matrix-valued potentials, pointwise operator norms, and polar factorization.

The preset catalogue covers the hypotheses of the stability theorems:

* ``inverse-square``       c (1+|x|)^-2 I_N             (complex c allowed)
* ``bump``                 smooth, compactly supported in |x| < R, height c
* ``dyadic-decay``         c |x|^-1 (1+|log|x||)^-sigma I_N
* ``matrix-mix``           c (1+|x|)^-2 (alpha_1 + i I_N), non-Hermitian

All presets have radial pointwise operator norm, exposed exactly through
:meth:`PotentialSpec.radial_opnorm`; the dyadic norm engine uses that as an
analytic envelope for tail bounds.  Grid-sampled potentials evaluate by
nearest-sample lookup (no interpolation) and carry no envelope.
"""

from dataclasses import dataclass, field
import hashlib
import struct

import numpy as np

from .clifford import build_clifford

_PRESETS = ("inverse-square", "complex-inverse-square", "bump", "dyadic-decay", "matrix-mix")


@dataclass(frozen=True)
class PotentialSpec:
    """A potential V: R^n -> C^{NxN}, analytic preset or grid-sampled."""

    n: int
    N: int
    kind: str
    c: complex = 1.0
    R: float = 1.0
    sigma: float = 2.0
    label: str = ""
    # grid-sampled data: samples on the half-cell-offset lattice of a box [-L, L)^n
    grid_L: float = 0.0
    grid_M: int = 0
    values: np.ndarray = field(default=None, repr=False, compare=False)

    @classmethod
    def preset(cls, kind, n, N, c=1.0, R=1.0, sigma=2.0, label=""):
        if kind == "complex-inverse-square":
            kind = "inverse-square"
        if kind not in _PRESETS:
            raise ValueError(f"unknown preset {kind!r}, expected one of {_PRESETS}")
        if kind == "matrix-mix" and N < 2:
            raise ValueError("matrix-mix needs a spinor dimension N >= 2")
        return cls(n=n, N=N, kind=kind, c=complex(c), R=float(R), sigma=float(sigma),
                   label=label or kind)

    @classmethod
    def from_samples(cls, n, N, L, M, values, label="grid-sampled"):
        values = np.asarray(values, dtype=complex)
        if values.shape != (M ** n, N, N):
            raise ValueError(f"values shape {values.shape} != {(M ** n, N, N)}")
        return cls(n=n, N=N, kind="grid-sampled", grid_L=float(L), grid_M=int(M),
                   values=values, label=label)

    # -- evaluation -----------------------------------------------------

    def scalar_profile(self, r):
        """Scalar radial factor of the preset at radius r (complex, includes c)."""
        r = np.asarray(r, dtype=float)
        if self.kind == "inverse-square":
            return self.c / (1.0 + r) ** 2
        if self.kind == "bump":
            out = np.zeros(r.shape, dtype=complex)
            inside = r < self.R
            s = (r[inside] / self.R) ** 2
            out[inside] = self.c * np.exp(1.0 - 1.0 / (1.0 - s))
            return out
        if self.kind == "dyadic-decay":
            with np.errstate(divide="ignore"):
                lg = np.abs(np.log(r))
            return self.c / (r * (1.0 + lg) ** self.sigma)
        if self.kind == "matrix-mix":
            return self.c / (1.0 + r) ** 2
        raise ValueError(f"no scalar profile for kind {self.kind!r}")

    def evaluate(self, x):
        """V at points x of shape (n,) or (k, n); returns (N, N) or (k, N, N)."""
        x = np.atleast_2d(np.asarray(x, dtype=float))
        if x.shape[-1] != self.n:
            raise ValueError(f"points have dimension {x.shape[-1]}, expected {self.n}")
        squeeze = x.shape[0] == 1 and np.asarray(x).ndim == 2
        if self.kind == "grid-sampled":
            out = self._lookup(x)
        else:
            r = np.linalg.norm(x, axis=-1)
            s = self.scalar_profile(r)
            if self.kind == "matrix-mix":
                rep = build_clifford(self.n)
                if rep.N != self.N:
                    raise ValueError(f"matrix-mix needs N = {rep.N} in dimension {self.n}")
                base = rep.alphas[1] + 1j * np.eye(self.N)
                out = s[:, None, None] * base[None]
            else:
                out = s[:, None, None] * np.eye(self.N)[None]
        return out[0] if squeeze and out.shape[0] == 1 else out

    def _lookup(self, x):
        L, M = self.grid_L, self.grid_M
        h = 2.0 * L / M
        if np.any(np.abs(x) > L):
            bad = x[np.any(np.abs(x) > L, axis=-1)][0]
            raise ValueError(f"point {bad} outside sampled box [-{L}, {L})^{self.n}")
        idx = np.clip(np.round((x + L) / h - 0.5).astype(int), 0, M - 1)
        flat = np.zeros(x.shape[0], dtype=int)
        for d in range(self.n):
            flat = flat * M + idx[:, d]
        return self.values[flat]

    def radial_opnorm(self, r):
        """Exact pointwise operator norm |V(x)| as a function of r = |x| (presets only)."""
        if self.kind == "grid-sampled":
            raise ValueError("grid-sampled potentials have no analytic radial profile")
        mag = np.abs(self.scalar_profile(r))
        if self.kind == "matrix-mix":
            # alpha_1 has eigenvalues +-1, so |alpha_1 + iI| = sqrt(2)
            mag = mag * np.sqrt(2.0)
        return mag

    def content_hash(self):
        """Stable hash of the defining data, recorded in certificates."""
        h = hashlib.sha256()
        h.update(repr((self.n, self.N, self.kind, self.c, self.R, self.sigma,
                       self.grid_L, self.grid_M)).encode())
        if self.values is not None:
            h.update(np.ascontiguousarray(self.values).tobytes())
        return h.hexdigest()[:16]


def eval_potential(V: PotentialSpec, x):
    """Pointwise value of the potential; see :meth:`PotentialSpec.evaluate`."""
    return V.evaluate(x)


def pointwise_opnorm(V, x=None):
    """Largest singular value of V(x).

    V may be a PotentialSpec (evaluated at x) or an explicit matrix/stack of
    matrices of shape (..., N, N).
    """
    if isinstance(V, PotentialSpec):
        V = V.evaluate(x)
    V = np.asarray(V, dtype=complex)
    s = np.linalg.svd(V, compute_uv=False)
    return s[..., 0] if V.ndim > 2 else float(s[0])


@dataclass(frozen=True)
class Factorization:
    """Pointwise maps A, B with B(x)* A(x) = V(x) and |A| = |B| = |V|^(1/2).

    Built from the singular value decomposition V = P S Q*:
    A = Q sqrt(S) Q* (= sqrt(W) with W = sqrt(V*V)) and B = Q sqrt(S) P*
    (= sqrt(W) U* with the partial isometry U = P Q*, completed by the
    identity on the kernel of W).
    """

    potential: PotentialSpec

    def _factors(self, V):
        P, s, Qh = np.linalg.svd(V)
        rs = np.sqrt(s)
        Q = np.swapaxes(Qh.conj(), -1, -2)
        A = np.einsum("...ik,...k,...jk->...ij", Q, rs, Q.conj())
        B = np.einsum("...ik,...k,...jk->...ij", Q, rs, P.conj())
        return A, B

    def A(self, x):
        return self._factors(self.potential.evaluate(x))[0]

    def B(self, x):
        return self._factors(self.potential.evaluate(x))[1]

    def AB(self, x):
        """Both factors at once (single SVD per point)."""
        return self._factors(self.potential.evaluate(x))


def polar_factorize(V: PotentialSpec) -> Factorization:
    """Polar factorization V = B* A with |A(x)| = |B(x)| = |V(x)|^(1/2)."""
    return Factorization(potential=V)


# -- grid-sampled potential files --------------------------------------
#
# Text format: first line "n N M L", then one row per lattice site in
# C-order (last index fastest): the n integer indices followed by the N*N
# matrix entries in row-major order, each as "re im".
#
# Binary format: ASCII magic "SCPT1\n", then little-endian int64 n, N, M,
# float64 L, then M^n * N * N little-endian complex128 values in the same
# C-order (indices are implicit).

_MAGIC = b"SCPT1\n"


def save_potential_text(V: PotentialSpec, path):
    if V.kind != "grid-sampled":
        raise ValueError("only grid-sampled potentials are serializable")
    n, N, M = V.n, V.N, V.grid_M
    with open(path, "w") as fh:
        fh.write(f"{n} {N} {M} {float(V.grid_L)!r}\n")
        for flat in range(M ** n):
            idx, rem = [], flat
            for _ in range(n):
                idx.append(rem % M)
                rem //= M
            idx = idx[::-1]
            row = " ".join(str(i) for i in idx)
            for v in V.values[flat].ravel():
                row += f" {float(v.real)!r} {float(v.imag)!r}"
            fh.write(row + "\n")


def load_potential_text(path) -> PotentialSpec:
    with open(path) as fh:
        n, N, M, L = fh.readline().split()
        n, N, M, L = int(n), int(N), int(M), float(L)
        values = np.zeros((M ** n, N, N), dtype=complex)
        for line in fh:
            parts = line.split()
            idx = [int(p) for p in parts[:n]]
            flat = 0
            for i in idx:
                flat = flat * M + i
            nums = [float(p) for p in parts[n:]]
            mat = np.array(nums).reshape(N * N, 2)
            values[flat] = (mat[:, 0] + 1j * mat[:, 1]).reshape(N, N)
    return PotentialSpec.from_samples(n, N, L, M, values)


def save_potential_binary(V: PotentialSpec, path):
    if V.kind != "grid-sampled":
        raise ValueError("only grid-sampled potentials are serializable")
    with open(path, "wb") as fh:
        fh.write(_MAGIC)
        fh.write(struct.pack("<qqqd", V.n, V.N, V.grid_M, V.grid_L))
        fh.write(np.ascontiguousarray(V.values, dtype="<c16").tobytes())


def load_potential_binary(path) -> PotentialSpec:
    with open(path, "rb") as fh:
        magic = fh.read(len(_MAGIC))
        if magic != _MAGIC:
            raise ValueError(f"{path}: not a potential file (bad magic {magic!r})")
        n, N, M, L = struct.unpack("<qqqd", fh.read(32))
        count = M ** n * N * N
        values = np.frombuffer(fh.read(count * 16), dtype="<c16").reshape(M ** n, N, N)
    return PotentialSpec.from_samples(n, N, L, M, values.astype(complex))
