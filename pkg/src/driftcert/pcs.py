"""Bivariate polynomial commitments.

The rank protocol needs commitments to bivariate polynomials (the weight
grids) and univariate factors, opened at one random point each.  Two
schemes implement the same surface:

- ``kzg``: a two-variable pairing commitment with structured setup.  The
  reference string holds the generator multiplied by all monomials in two
  secret points, plus a parallel grid scaled by a third secret used for a
  random mask polynomial, so commitments hide the coefficients.  Openings
  are two group elements regardless of degree; verification is one pairing
  product.
- ``merkle``: a transparent hash commitment over salted coefficients.  An
  opening reveals the whole polynomial, so it is compact-commitment but
  not succinct and not hiding once opened.  It exists to cross-check the
  rank protocol without a structured setup; do not use it where the factor
  polynomials must stay secret.

Coefficient grids are lists of rows: ``coeffs[i][j]`` multiplies X^i Y^j.
Both schemes expose ``commit``, ``open_at``, ``verify_at`` with byte-string
commitments and proofs; verifiers return False on malformed bytes.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass

from .errors import DegreeExceeded, SrsBackendMismatch, WireFormatError
from .field import PrimeField
from .groups import GroupBackend, get_backend
from .prf import PrfStream
from .wire import Reader

SRS_MAGIC = b"FTIS"
SRS_VERSION = 1


# -- polynomial helpers --------------------------------------------------------

def poly_eval(coeffs: list[int], x: int, field: PrimeField) -> int:
    """Horner evaluation of sum coeffs[i] X^i at x."""
    q = field.q
    acc = 0
    for c in reversed(coeffs):
        acc = (acc * x + c) % q
    return acc


def bipoly_eval(coeffs: list[list[int]], x: int, y: int,
                field: PrimeField) -> int:
    """Evaluate sum coeffs[i][j] X^i Y^j at (x, y)."""
    q = field.q
    acc = 0
    for row in reversed(coeffs):
        acc = (acc * x + poly_eval(row, y, field)) % q
    return acc


def poly_divide_linear(coeffs: list[int], point: int,
                       field: PrimeField) -> tuple[list[int], int]:
    """Quotient and remainder of sum coeffs[i] X^i by (X - point)."""
    q = field.q
    quotient = [0] * max(len(coeffs) - 1, 0)
    acc = 0
    for i in range(len(coeffs) - 1, 0, -1):
        acc = (acc * point + coeffs[i]) % q
        quotient[i - 1] = acc
    remainder = (acc * point + (coeffs[0] if coeffs else 0)) % q
    return quotient, remainder


def _check_grid(coeffs: list[list[int]], deg_x: int, deg_y: int) -> None:
    if not coeffs or not all(coeffs) or any(
            len(row) != len(coeffs[0]) for row in coeffs):
        raise DegreeExceeded("coefficient grid must be rectangular, nonempty")
    if len(coeffs) - 1 > deg_x or len(coeffs[0]) - 1 > deg_y:
        raise DegreeExceeded(
            f"grid degrees ({len(coeffs) - 1}, {len(coeffs[0]) - 1}) exceed "
            f"scheme bounds ({deg_x}, {deg_y})")


# -- structured reference string ----------------------------------------------

@dataclass
class KzgSrs:
    """Monomial grid in G1 (plain and mask-scaled) plus the G2 shifts."""

    backend: GroupBackend
    deg_x: int
    deg_y: int
    g_grid: list[list]
    mask_grid: list[list]
    h2: object
    t1: object
    t2: object

    @property
    def base(self):
        return self.g_grid[0][0]

    @property
    def mask_base(self):
        return self.mask_grid[0][0]


def setup_kzg(backend: GroupBackend, deg_x: int, deg_y: int,
              seed: bytes) -> KzgSrs:
    """Sample a reference string from a seed.

    The seed stands in for a setup ceremony: whoever knows it can equivocate
    commitments, so production use wants a seed produced by a multi-party
    ritual and then destroyed.  Determinism from the seed is what the tests
    and the CLI rely on.
    """
    if deg_x < 0 or deg_y < 0:
        raise DegreeExceeded("degree bounds must be nonnegative")
    field = backend.field
    prf = PrfStream(seed, "srs-trapdoor")
    tau1 = 1 + prf.scalar(0, field) % (field.q - 1)
    tau2 = 1 + prf.scalar(1, field) % (field.q - 1)
    eta = 1 + prf.scalar(2, field) % (field.q - 1)
    base = backend.hash_to_group("SRS/G", 0)
    q = field.q
    x_pows = [pow(tau1, i, q) for i in range(deg_x + 1)]
    y_pows = [pow(tau2, j, q) for j in range(deg_y + 1)]
    g_grid = []
    mask_grid = []
    for i in range(deg_x + 1):
        g_row = []
        m_row = []
        for j in range(deg_y + 1):
            s = (x_pows[i] * y_pows[j]) % q
            g_row.append(backend.mul(base, s))
            m_row.append(backend.mul(base, (s * eta) % q))
        g_grid.append(g_row)
        mask_grid.append(m_row)
    h2 = backend.g2_generator()
    return KzgSrs(backend, deg_x, deg_y, g_grid, mask_grid, h2,
                  backend.g2_mul(h2, tau1), backend.g2_mul(h2, tau2))


def save_srs(srs: KzgSrs, path: str | None = None) -> bytes:
    be = srs.backend
    buf = bytearray()
    buf.extend(SRS_MAGIC)
    buf.append(SRS_VERSION)
    name = be.name.encode("ascii")
    buf.append(len(name))
    buf.extend(name)
    buf.extend(srs.deg_x.to_bytes(4, "little"))
    buf.extend(srs.deg_y.to_bytes(4, "little"))
    for grid in (srs.g_grid, srs.mask_grid):
        for row in grid:
            for pt in row:
                buf.extend(be.serialize(pt))
    for pt in (srs.h2, srs.t1, srs.t2):
        buf.extend(be.g2_serialize(pt))
    blob = bytes(buf)
    if path is not None:
        with open(path, "wb") as fh:
            fh.write(blob)
    return blob


def load_srs(source: str | bytes, backend: GroupBackend | None = None) -> KzgSrs:
    if isinstance(source, (bytes, bytearray)):
        blob = bytes(source)
    else:
        with open(source, "rb") as fh:
            blob = fh.read()
    reader = Reader(blob)
    if reader.take(4) != SRS_MAGIC:
        raise WireFormatError("bad magic; not a reference string file")
    if reader.u8() != SRS_VERSION:
        raise WireFormatError("unsupported reference string version")
    name = reader.take(reader.u8()).decode("ascii")
    if backend is None:
        backend = get_backend(name)
    elif backend.name != name:
        raise SrsBackendMismatch(
            f"reference string was built for {name!r}, not {backend.name!r}")
    deg_x = reader.u32()
    deg_y = reader.u32()
    grids = []
    for _ in range(2):
        grid = []
        for _ in range(deg_x + 1):
            row = [
                backend.deserialize(reader.take(backend.element_bytes))
                for _ in range(deg_y + 1)
            ]
            grid.append(row)
        grids.append(grid)
    g2s = [
        backend.g2_deserialize(reader.take(backend.g2_element_bytes))
        for _ in range(3)
    ]
    reader.expect_end()
    return KzgSrs(backend, deg_x, deg_y, grids[0], grids[1], *g2s)


# -- commitment scheme surface -------------------------------------------------

class Pcs:
    """Commit to a coefficient grid; later open its value at one point."""

    scheme_id: str
    hiding: bool
    deg_x: int
    deg_y: int
    field: PrimeField

    def commit(self, coeffs: list[list[int]],
               rand: PrfStream) -> tuple[bytes, object]:
        """Returns (commitment bytes, secret needed for opening)."""
        raise NotImplementedError

    def open_at(self, coeffs: list[list[int]], secret, x: int,
                y: int) -> tuple[int, bytes]:
        """Returns (value at (x, y), opening proof bytes)."""
        raise NotImplementedError

    def verify_at(self, commitment: bytes, x: int, y: int, value: int,
                  proof: bytes) -> bool:
        raise NotImplementedError


class KzgPcs(Pcs):

    scheme_id = "kzg"
    hiding = True

    def __init__(self, srs: KzgSrs):
        self.srs = srs
        self.backend = srs.backend
        self.field = srs.backend.field
        self.deg_x = srs.deg_x
        self.deg_y = srs.deg_y

    def _grid_msm(self, coeffs, mask):
        points = []
        scalars = []
        for grid, cs in ((self.srs.g_grid, coeffs), (self.srs.mask_grid, mask)):
            for i, row in enumerate(cs):
                for j, c in enumerate(row):
                    if c:
                        points.append(grid[i][j])
                        scalars.append(c)
        return self.backend.msm(points, scalars)

    def commit(self, coeffs, rand):
        _check_grid(coeffs, self.deg_x, self.deg_y)
        q = self.field.q
        coeffs = [[c % q for c in row] for row in coeffs]
        rows, cols = len(coeffs), len(coeffs[0])
        flat = rand.scalars(rows * cols, self.field)
        mask = [flat[i * cols:(i + 1) * cols] for i in range(rows)]
        commitment = self.backend.serialize(self._grid_msm(coeffs, mask))
        return commitment, mask

    def open_at(self, coeffs, secret, x, y):
        _check_grid(coeffs, self.deg_x, self.deg_y)
        field = self.field
        q = field.q
        coeffs = [[c % q for c in row] for row in coeffs]
        mask = secret
        value = bipoly_eval(coeffs, x, y, field)
        masked = bipoly_eval(mask, x, y, field)

        wx_pair = []
        wy_pair = []
        for grid in (coeffs, mask):
            cols = len(grid[0])
            # Divide along X per Y-column: P - P(x, Y) = (X - x) Wx.
            wx = [[0] * cols for _ in range(max(len(grid) - 1, 0))] or [[0] * cols]
            at_x = []
            for j in range(cols):
                column = [grid[i][j] for i in range(len(grid))]
                quotient, rem = poly_divide_linear(column, x, field)
                for i, qc in enumerate(quotient):
                    wx[i][j] = qc
                at_x.append(rem)
            # Then along Y: P(x, Y) - P(x, y) = (Y - y) Wy.
            wy, _ = poly_divide_linear(at_x, y, field)
            wx_pair.append(wx)
            wy_pair.append([wy or [0]])
        w_x = self._grid_msm(wx_pair[0], wx_pair[1])
        w_y = self._grid_msm(wy_pair[0], wy_pair[1])
        proof = (masked.to_bytes(32, "little")
                 + self.backend.serialize(w_x)
                 + self.backend.serialize(w_y))
        return value, proof

    def verify_at(self, commitment, x, y, value, proof):
        be = self.backend
        try:
            reader = Reader(proof)
            masked = reader.scalar()
            w_x = be.deserialize(reader.take(be.element_bytes))
            w_y = be.deserialize(reader.take(be.element_bytes))
            reader.expect_end()
            c_pt = be.deserialize(commitment)
        except WireFormatError:
            return False
        q = self.field.q
        srs = self.srs
        adjusted = be.sub(
            be.sub(c_pt, be.mul(srs.base, value % q)),
            be.mul(srs.mask_base, masked))
        shift_x = be.g2_add(srs.t1, be.g2_neg(be.g2_mul(srs.h2, x % q)))
        shift_y = be.g2_add(srs.t2, be.g2_neg(be.g2_mul(srs.h2, y % q)))
        return be.pairing_check(
            [(adjusted, srs.h2)],
            [(w_x, shift_x), (w_y, shift_y)])


class MerklePcs(Pcs):
    """Transparent scheme: hash of salted coefficients, openings reveal all."""

    scheme_id = "merkle"
    hiding = False

    def __init__(self, field: PrimeField, deg_x: int, deg_y: int):
        if deg_x < 0 or deg_y < 0:
            raise DegreeExceeded("degree bounds must be nonnegative")
        self.field = field
        self.deg_x = deg_x
        self.deg_y = deg_y

    def _digest(self, coeffs, salt: bytes) -> bytes:
        h = hashlib.sha256(b"driftcert-pcs-merkle-v1")
        h.update(salt)
        h.update(len(coeffs).to_bytes(4, "little"))
        h.update(len(coeffs[0]).to_bytes(4, "little"))
        for row in coeffs:
            for c in row:
                h.update(c.to_bytes(32, "little"))
        return h.digest()

    def commit(self, coeffs, rand):
        _check_grid(coeffs, self.deg_x, self.deg_y)
        q = self.field.q
        coeffs = [[c % q for c in row] for row in coeffs]
        salt = rand.child_seed("pcs-salt")
        return self._digest(coeffs, salt), salt

    def open_at(self, coeffs, secret, x, y):
        _check_grid(coeffs, self.deg_x, self.deg_y)
        q = self.field.q
        coeffs = [[c % q for c in row] for row in coeffs]
        value = bipoly_eval(coeffs, x, y, self.field)
        buf = bytearray()
        buf.extend(secret)
        buf.extend(len(coeffs).to_bytes(4, "little"))
        buf.extend(len(coeffs[0]).to_bytes(4, "little"))
        for row in coeffs:
            for c in row:
                buf.extend(c.to_bytes(32, "little"))
        return value, bytes(buf)

    def verify_at(self, commitment, x, y, value, proof):
        try:
            reader = Reader(proof)
            salt = reader.take(32)
            rows = reader.u32()
            cols = reader.u32()
            if not 1 <= rows <= self.deg_x + 1 or not 1 <= cols <= self.deg_y + 1:
                return False
            coeffs = []
            q = self.field.q
            for _ in range(rows):
                row = [reader.scalar() for _ in range(cols)]
                if any(c >= q for c in row):
                    return False
                coeffs.append(row)
            reader.expect_end()
        except WireFormatError:
            return False
        if self._digest(coeffs, salt) != commitment:
            return False
        return bipoly_eval(coeffs, x, y, self.field) == value % self.field.q
