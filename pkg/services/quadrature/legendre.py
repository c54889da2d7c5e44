"""
Gauss-Legendre rules without iteration

n <= 80 comes from a lookup table of the nonnegative nodes. Larger n use a
Bessel-type expansion for the 35 largest positive nodes and an expansion in
elementary functions for the others; the negative half is the mirror image.
"""
from typing import Dict, Tuple
from functools import lru_cache
from pathlib import Path
import logging
import math
import threading

import numpy as np
from numpy.polynomial import polynomial as P

from .config import get_settings
from .core import Backend, Family, FamilySpec, Normalization, QuadratureRule
from .errors import InvalidParameter
from .specfun import BESSEL_TABLE_SIZE, zero_table

logger = logging.getLogger(__name__)

TABLE_MAX_N = 80
TABLE_HEADER = "legendre-table v1"
BESSEL_NODES = BESSEL_TABLE_SIZE

_table_lock = threading.Lock()

# Chebyshev interpolants in y = θ² of the node and weight correction functions,
# coefficients in ascending powers
_NODE_F1 = np.array([
    -0.416666666666662959639712457549e-01, 0.416666666665193394525296923981e-02,
    -0.148809523713909147898955880165e-03, 0.275573168962061235623801563453e-05,
    -3.13148654635992041468855740012e-08, 2.40724685864330121825976175184e-10,
    -1.29052996274280508473467968379e-12,
])
_NODE_F2 = np.array([
    0.815972221772932265640401128517e-02, -0.209022248387852902722635654229e-02,
    0.282116886057560434805998583817e-03, -0.253300326008232025914059965302e-04,
    0.161969259453836261731700382098e-05, -7.53036771373769326811030753538e-08,
    2.20639421781871003734786884322e-09,
])
_NODE_F3 = np.array([
    -0.416012165620204364833694266818e-02, 0.128654198542845137196151147483e-02,
    -0.251395293283965914823026348764e-03, 0.418498100329504574443885193835e-04,
    -0.567797841356833081642185432056e-05, 5.55845330223796209655886325712e-07,
    -2.97058225375526229899781956673e-08,
])
_WEIGHT_F1 = np.array([
    0.833333333333333302184063103900e-01, -0.305555555555553028279487898503e-01,
    0.436507936507598105249726413120e-02, -0.326278659594412170300449074873e-03,
    0.149644593625028648361395938176e-04, -4.63968647553221331251529631098e-07,
    1.03756066927916795821098009353e-08, -1.75257700735423807659851042318e-10,
    2.30365726860377376873232578871e-12, -2.20902861044616638398573427475e-14,
])
_WEIGHT_F2 = np.array([
    -0.111111111111214923138249347172e-01, 0.268959435694729660779984493795e-02,
    -0.407297185611335764191683161117e-03, 0.465969530694968391417927388162e-04,
    -0.381817918680045468483009307090e-05, 2.11483880685947151466370130277e-07,
    -7.12912857233642220650643150625e-09, 7.67643545069893130779501844323e-11,
    3.63117412152654783455929483029e-12,
])
_WEIGHT_F3 = np.array([
    0.656966489926484797412985260842e-02, -0.947969308958577323145923317955e-04,
    -0.105646050254076140548678457002e-03, -0.422888059282921161626339411388e-04,
    0.200559326396458326778521795392e-04, -0.397933316519135275712977531366e-05,
    5.08898347288671653137451093208e-07, -4.38647122520206649251063212545e-08,
    2.01826791256703301806643264922e-09,
])

LegendreTable = Dict[int, Tuple[np.ndarray, np.ndarray]]


def format_table(table: LegendreTable) -> str:
    """Serialize a table: header, then `n k x w` per nonnegative node"""
    lines = [TABLE_HEADER]
    for n in sorted(table):
        nodes, weights = table[n]
        first = n - len(nodes) + 1
        for offset, (x, w) in enumerate(zip(nodes, weights)):
            lines.append(f"{n} {first + offset} {float(x):.17g} {float(w):.17g}")
    return "\n".join(lines) + "\n"


def parse_table(text: str) -> LegendreTable:
    lines = text.splitlines()
    if not lines or lines[0].strip() != TABLE_HEADER:
        raise ValueError(f"not a Legendre table: expected header {TABLE_HEADER!r}")
    rows: Dict[int, list] = {}
    for line in lines[1:]:
        if not line.strip():
            continue
        n, k, x, w = line.split()
        rows.setdefault(int(n), []).append((int(k), float(x), float(w)))
    table: LegendreTable = {}
    for n, entries in rows.items():
        entries.sort()
        table[n] = (np.array([e[1] for e in entries]), np.array([e[2] for e in entries]))
    return table


def generate_table(n_max: int = TABLE_MAX_N) -> LegendreTable:
    """Nonnegative nodes and natural weights for n = 1..n_max from the extended-precision reference"""
    from .oracle import reference_rule_highprec

    table: LegendreTable = {}
    for n in range(1, n_max + 1):
        rule = reference_rule_highprec(FamilySpec(Family.JACOBI, n, 0.0, 0.0)).rounded()
        half = n // 2
        table[n] = (rule.nodes[half:].copy(), rule.weights[half:].copy())
    return table


def write_table(path: Path, n_max: int = TABLE_MAX_N) -> LegendreTable:
    table = generate_table(n_max)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(format_table(table))
    logger.info(f"Wrote Legendre table for n <= {n_max} to {path}")
    return table


@lru_cache(maxsize=1)
def load_table() -> LegendreTable:
    """
    Table from the configured path, generated and stored on first use when missing

    The generated table is kept in memory when the file cannot be written.
    """
    path = get_settings().table_path
    with _table_lock:
        if path.exists():
            return parse_table(path.read_text())
        logger.warning(f"Legendre table not found at {path}, generating it")
        try:
            return write_table(path)
        except OSError as e:
            logger.warning(f"Could not store Legendre table: {e}")
            return generate_table()


def _from_half(n: int, nodes: np.ndarray, weights: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """Full ascending rule from its nonnegative half"""
    mirror = n // 2
    tail = nodes[len(nodes) - mirror:]
    tail_w = weights[len(weights) - mirror:]
    full_x = np.concatenate([-tail[::-1], nodes])
    full_w = np.concatenate([tail_w[::-1], weights])
    return full_x, full_w


def bessel_type_nodes(n: int, count: int) -> Tuple[np.ndarray, np.ndarray]:
    """
    The count largest nodes, largest first, with their weights

    Args:
        n: Degree, large enough for the expansion (n > 80)
        count: How many nodes, at most 35

    Returns:
        (nodes, weights) in descending node order
    """
    table = zero_table()
    j = np.array(table.bessel_j0_zeros[:count])
    b = np.array(table.bessel_j1_values[:count]) ** 2
    w = 1.0 / (n + 0.5)
    theta = w * j
    y = theta * theta

    nuosin = j / np.sin(theta)
    winvsinc = w * w * nuosin
    wis2 = winvsinc * winvsinc
    correction = P.polyval(y, _NODE_F1) + wis2 * (P.polyval(y, _NODE_F2) + wis2 * P.polyval(y, _NODE_F3))
    theta = w * (j + theta * winvsinc * correction)
    denominator = b * nuosin * (1.0 + wis2 * (P.polyval(y, _WEIGHT_F1)
                                              + wis2 * (P.polyval(y, _WEIGHT_F2) + wis2 * P.polyval(y, _WEIGHT_F3))))
    return np.cos(theta), 2.0 * w / denominator


def elementary_nodes(n: int, k: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """Nodes and weights of index k (1 = smallest node) from the expansion in powers of κ^-2"""
    kappa = n + 0.5
    arg = (2.0 * k - n - 1.0) * math.pi / (2.0 * kappa)
    c = np.sin(arg)
    s = np.cos(arg)
    r2 = (c / s) ** 2
    k2 = kappa ** -2.0
    x = c * (1.0 - k2 / 8.0 + (33.0 + 28.0 * r2) * k2 ** 2 / 384.0
             - (865.0 + 2060.0 * r2 + 1208.0 * r2 ** 2) * k2 ** 3 / 5120.0)
    w = (math.pi / kappa) * s * (1.0 - k2 / 8.0 + (33.0 + 84.0 * r2 + 56.0 * r2 ** 2) * k2 ** 2 / 384.0
                                 - (865.0 + 6180.0 * r2 + 10160.0 * r2 ** 2 + 4832.0 * r2 ** 3) * k2 ** 3 / 5120.0)
    return x, w


def _expansion_half(n: int) -> Tuple[np.ndarray, np.ndarray]:
    """Nonnegative nodes, ascending, for n > 80"""
    first = n // 2 + 1
    upper = n - BESSEL_NODES
    k = np.arange(first, upper + 1, dtype=float)
    x, w = elementary_nodes(n, k)
    if n % 2:
        x[0] = 0.0
    bx, bw = bessel_type_nodes(n, BESSEL_NODES)
    return np.concatenate([x, bx[::-1]]), np.concatenate([w, bw[::-1]])


def legendre_rule(n: int, normalization: Normalization = Normalization.NATURAL) -> QuadratureRule:
    """
    Gauss-Legendre rule of degree n

    Args:
        n: Number of nodes
        normalization: NATURAL (weights sum to 2) or UNIT

    Returns:
        QuadratureRule, exactly symmetric
    """
    spec = FamilySpec(Family.JACOBI, n, 0.0, 0.0).validate()
    if n <= TABLE_MAX_N:
        table = load_table()
        if n not in table:
            raise InvalidParameter(f"Legendre table has no entry for n={n}")
        half_x, half_w = table[n]
        backend = Backend.LOOKUP
    else:
        half_x, half_w = _expansion_half(n)
        backend = Backend.ASYMPTOTIC

    nodes, weights = _from_half(n, half_x, half_w)
    if normalization is Normalization.UNIT:
        weights = weights / 2.0
    return QuadratureRule(spec=spec, nodes=nodes, weights=weights, normalization=normalization, backend=backend)
