"""
Figure grids, parameter sweeps, verification suites and CSV output.

Everything here is deterministic for a fixed seed: grid points may be
evaluated on several threads but rows are always emitted in grid order,
and floats are written with a fixed format so CSV files are byte-stable.
"""

import io
import math
from dataclasses import dataclass, field, replace

import numpy as np

from . import __version__, coding, core, mimo, multihop, schemes
from ._parallel import ordered_map
from .exceptions import InfeasibleConfigurationError, RatekitError

__all__ = [
    "FIGURES",
    "SWEEP_AXES",
    "VERIFY_SUITES",
    "FigureSpec",
    "Table",
    "VerifyResult",
    "format_value",
    "write_csv",
    "format_table",
    "figure_table",
    "compute_table",
    "sweep_table",
    "run_verify",
]

FIGURES = ("fig2", "fig3", "fig5", "fig7", "fig8", "fig9", "fig10")
SWEEP_AXES = ("n", "L", "snr", "alpha", "t", "q")
VERIFY_SUITES = ("rmt", "submodular", "concavity", "pi-bound", "traffic",
                 "ft-oracle", "lemma1", "ordering")

RATE_COLUMNS = ("coding_rate", "packet_throughput", "sum_rate", "t", "q", "L", "snr")


@dataclass(frozen=True)
class FigureSpec:
    """Parameter grid behind one figure."""

    figure_id: str
    alpha: float
    x_name: str
    x_values: tuple
    description: str


@dataclass
class Table:
    """Columns, rows and the metadata written as ``#`` header lines."""

    columns: list
    rows: list
    meta: dict = field(default_factory=dict)


@dataclass
class VerifyResult:
    suite: str
    passed: bool
    lines: list = field(default_factory=list)


def _int_logspace(lo, hi, num):
    return tuple(int(v) for v in np.unique(np.round(np.logspace(lo, hi, num))))


FIGURE_SPECS = {
    "fig2": FigureSpec("fig2", 3.0, "L", tuple(range(2, 13)),
                       "single-stage sum rate vs reuse factor, n=1e4"),
    "fig3": FigureSpec("fig3", 7.0, "L", tuple(range(2, 13)),
                       "single-stage sum rate vs reuse factor, n=1e4"),
    "fig5": FigureSpec("fig5", 7.0, "n", _int_logspace(2, 7, 26),
                       "optimal stage count vs network size (q=2)"),
    "fig7": FigureSpec("fig7", 3.0, "t", tuple(range(1, 11)),
                       "coding rate R(t) vs stage"),
    "fig8": FigureSpec("fig8", float("nan"), "alpha", tuple(np.round(np.arange(3.0, 11.0001, 0.25), 2)),
                       "limit coding rate R*(alpha, 2) vs pathloss exponent"),
    "fig9": FigureSpec("fig9", 7.0, "n", _int_logspace(2, 5, 31),
                       "hierarchical cooperation vs multihop"),
    "fig10": FigureSpec("fig10", 4.0, "n", _int_logspace(2, 5, 31),
                        "hierarchical cooperation vs multihop"),
}

# SNR curves of the reuse-factor figures, in dB
REUSE_FIGURE_SNR_DB = (20, 40, 60, 80, 100, 120)
SNR_GRID_LOG2 = np.arange(1.0, 80.0001, 0.25)


# ---------------------------------------------------------------------------
# CSV
# ---------------------------------------------------------------------------
def format_value(v):
    """Fixed textual form: ``%.10g`` floats, ``NaN`` for missing or infeasible."""
    if v is None:
        return "NaN"
    if isinstance(v, (bool, np.bool_)):
        return str(bool(v)).lower()
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        if not math.isfinite(v):
            return "NaN" if math.isnan(v) else ("inf" if v > 0 else "-inf")
        return "%.10g" % v
    return str(v)


def write_csv(table, stream=None):
    """Write ``table`` as CSV with ``#`` metadata lines; returns the text."""
    buf = io.StringIO()
    for key, val in table.meta.items():
        buf.write(f"# {key}: {format_value(val)}\n")
    buf.write(",".join(table.columns) + "\n")
    for row in table.rows:
        buf.write(",".join(format_value(v) for v in row) + "\n")
    text = buf.getvalue()
    if stream is not None:
        stream.write(text)
    return text


def format_table(table):
    """Aligned plain-text rendering for terminals."""
    cells = [list(table.columns)] + [[format_value(v) for v in r] for r in table.rows]
    widths = [max(len(row[i]) for row in cells) for i in range(len(table.columns))]
    lines = ["  ".join(c.rjust(w) for c, w in zip(row, widths)) for row in cells]
    lines.insert(1, "  ".join("-" * w for w in widths))
    return "\n".join(lines) + "\n"


def _meta(command, constants="derivation", seed=None, **extra):
    meta = {"ratekit": __version__, "command": command, "constants": constants,
            "seed": "none" if seed is None else seed}
    meta.update(extra)
    return meta


def _safe_rate(fn, *args, **kwargs):
    try:
        return fn(*args, **kwargs)
    except InfeasibleConfigurationError:
        return None


def _sum(b):
    return math.nan if b is None else b.sum_rate


def _rate_fields(b):
    if b is None:
        return [math.nan] * len(RATE_COLUMNS)
    return [b.coding_rate, b.packet_throughput, b.sum_rate, b.t_used, b.q_used, b.L, b.snr]


# ---------------------------------------------------------------------------
# Figures
# ---------------------------------------------------------------------------
def _reuse_figure(spec, n=10 ** 4):
    snrs = [10 ** (d / 10) for d in REUSE_FIGURE_SNR_DB]
    snr_opt = core.optimal_snr_single_stage(spec.alpha)
    grid = 2.0 ** SNR_GRID_LOG2
    cols = ["L"] + [f"snr_db={d}" for d in REUSE_FIGURE_SNR_DB] + ["snr_opt", "max_over_snr"]

    def row(L):
        vals = [_sum(_safe_rate(schemes.single_stage_sum_rate, n, spec.alpha, s, L)) for s in snrs]
        vals.append(_sum(_safe_rate(schemes.single_stage_sum_rate, n, spec.alpha, snr_opt, L)))
        vals.append(max(_sum(_safe_rate(schemes.single_stage_sum_rate, n, spec.alpha, s, L)) for s in grid))
        return [L] + vals

    rows = ordered_map(row, spec.x_values)
    tin_L = core.reuse_factor(snr_opt, spec.alpha)
    return cols, rows, {"alpha": spec.alpha, "n": n, "tin_L": tin_L, "tin_snr": snr_opt}


def _stage_figure(spec):
    cols = ["n", "m1", "m2", "m3", "m4", "closed_form_real", "closed_form_int"]
    L = core.reuse_factor(core.optimal_snr_single_stage(spec.alpha), spec.alpha)

    def row(n):
        ts = []
        for m in schemes.HIER_METHODS:
            try:
                ts.append(schemes.optimal_stage_count_search(m, n, spec.alpha, q=2))
            except InfeasibleConfigurationError:
                ts.append(None)
        t_real, t_int = schemes.optimal_stage_count_method2(n, L)
        return [n] + ts + [t_real, t_int]

    return cols, ordered_map(row, spec.x_values), {"alpha": spec.alpha, "q": 2, "L": L}


def _coding_stage_figure(spec):
    combos = [(s, q) for s in coding.RELAY_SCHEMES for q in (1, 2, 3)]
    t_max = max(spec.x_values)
    seqs = {c: coding.rate_sequence(spec.alpha, c[1], c[0], t_max) for c in combos}
    cols = ["t"] + [f"{s}-q{q}" for s, q in combos]
    rows = [[t] + [seqs[c][t] for c in combos] for t in spec.x_values]
    return cols, rows, {"alpha": spec.alpha}


def _coding_alpha_figure(spec):
    names = coding.CHAIN_SCHEMES

    def row(a):
        seqs = [coding.rate_sequence(a, 2, s, 60) for s in names]
        return [a] + [s.r_star for s in seqs] + [seqs[0].L]

    return ["alpha"] + list(names) + ["L"], ordered_map(row, spec.x_values), {"q": 2}


def _comparison_figure(spec, constants):
    cols = ["n", "m1", "m2", "m3", "m4", "m4-qf", "original-hc", "multihop-lower", "multihop-avg"]
    a = spec.alpha

    def row(n):
        vals = [_sum(_safe_rate(schemes.best_sum_rate, m, n, a, constants=constants))
                for m in schemes.HIER_METHODS]
        vals.append(_sum(_safe_rate(schemes.best_sum_rate, "m4", n, a, "qf", constants=constants)))
        vals.append(_sum(_safe_rate(schemes.original_hc_baseline, n, a)))
        vals.append(multihop.multihop_sum_rate_lower(n, a).sum_rate)
        vals.append(multihop.multihop_sum_rate_avg(n, a).sum_rate)
        return [n] + vals

    return cols, ordered_map(row, spec.x_values), {"alpha": a, "qs": "1;2", "t_max": 8}


def figure_table(figure_id, constants="derivation", seed=None):
    """Data behind one figure as a ``Table``."""
    if figure_id not in FIGURE_SPECS:
        raise RatekitError(f"unknown figure {figure_id!r}; choose from {FIGURES}")
    spec = FIGURE_SPECS[figure_id]
    if figure_id in ("fig2", "fig3"):
        cols, rows, extra = _reuse_figure(spec)
    elif figure_id == "fig5":
        cols, rows, extra = _stage_figure(spec)
    elif figure_id == "fig7":
        cols, rows, extra = _coding_stage_figure(spec)
    elif figure_id == "fig8":
        cols, rows, extra = _coding_alpha_figure(spec)
    else:
        cols, rows, extra = _comparison_figure(spec, constants)
    meta = _meta(f"figure {figure_id}", constants, seed, description=spec.description, **extra)
    return Table(cols, rows, meta)


# ---------------------------------------------------------------------------
# compute / sweep
# ---------------------------------------------------------------------------
def _evaluate_row(config):
    try:
        b = schemes.evaluate(config)
        return _rate_fields(b) + ["ok"]
    except InfeasibleConfigurationError:
        return _rate_fields(None) + ["infeasible"]


def compute_table(configs, constants="derivation", seed=None):
    """One row per ``SchemeConfig``; infeasible points become ``NaN`` rows."""
    cols = ["method", "n", "alpha"] + list(RATE_COLUMNS) + ["status"]
    rows = ordered_map(lambda c: [c.method, c.n, c.alpha] + _evaluate_row(c), configs)
    return Table(cols, rows, _meta("compute", constants, seed))


def sweep_values(axis, base, n_range=None):
    """Default grid along ``axis`` around the ``base`` configuration."""
    if axis == "n":
        lo, hi, num = n_range or (1e2, 1e5, 31)
        return _int_logspace(math.log10(lo), math.log10(hi), int(num))
    if axis == "L":
        return tuple(range(2, 13))
    if axis == "snr":
        return tuple(2.0 ** np.arange(1, 81))
    if axis == "alpha":
        return tuple(np.round(np.arange(3.0, 11.0001, 0.25), 2))
    if axis == "t":
        return tuple(range(1, base.t_max + 1))
    if axis == "q":
        return (1, 2, 3, 4)
    raise RatekitError(f"unknown sweep axis {axis!r}; choose from {SWEEP_AXES}")


def sweep_table(axis, base, values=None, n_range=None, seed=None):
    """Vary one field of ``base`` over ``values`` (default grid per axis)."""
    values = sweep_values(axis, base, n_range) if values is None else values
    key = {"n": "n", "L": "L", "snr": "snr", "alpha": "alpha", "t": "t", "q": "q"}[axis]
    if axis == "t" and base.method not in schemes.HIER_METHODS:
        raise RatekitError("sweep over t needs a hierarchical method (m1..m4)")
    configs = [replace(base, **{key: v}) for v in values]
    cols = [f"swept_{axis}"] + list(RATE_COLUMNS) + ["status"]
    rows = ordered_map(lambda cv: [cv[1]] + _evaluate_row(cv[0]), list(zip(configs, values)))
    meta = _meta(f"sweep {axis}", base.constants, seed, method=base.method, n=base.n,
                 alpha=base.alpha, relay_scheme=base.relay_scheme)
    return Table(cols, rows, meta)


# ---------------------------------------------------------------------------
# Verification suites
# ---------------------------------------------------------------------------
def _verify_rmt(seed):
    lines, ok = [], True
    for ens in ("uniform-phase", "complex-gaussian"):
        for x in (1.0, 10.0, 100.0):
            mc = mimo.logdet_montecarlo(256, x, ens, trials=100, seed=seed)
            ref = mimo.c_of_x(x)
            rel = abs(mc / ref - 1)
            ok &= rel <= 0.02
            lines.append(f"{ens} x={x:g}: mc={mc:.6f} C(x)={ref:.6f} rel={rel:.2e}")
    return ok, lines


def _verify_submodular(seed):
    lines, ok = [], True
    for ens in ("uniform-phase", "complex-gaussian"):
        h = mimo.FiniteChannelMatrix.sample(10, ens, seed)
        for snr in (1.0, 100.0):
            res = mimo.submodularity_check(h, snr, trials=1000, seed=seed)
            ok &= res
            lines.append(f"{ens} m=10 snr={snr:g}: {'pass' if res else 'FAIL'}")
    return ok, lines


def _verify_concavity(seed):
    lines, ok = [], True
    for snr in (0.1, 1.0, 10.0, 100.0, 1e4):
        res = mimo.beta_concavity_check(snr)
        ok &= res
        lines.append(f"snr={snr:g}: {'pass' if res else 'FAIL'}")
    return ok, lines


def _verify_pi_bound(seed):
    lines, ok = [], True
    grid = core.GridNetwork(60 * 60)
    worst = 0.0
    for alpha in (3.0, 4.0, 7.0):
        for L in range(2, 9):
            for c in (1, 2, 3, 4, 5, 6):
                exact = core.interference_power_exact(grid, L, alpha, 1e4, c).p_i
                bound = core.interference_power_bound(grid.n, 1e4, L, alpha).p_i
                ok &= exact <= bound
                worst = max(worst, exact / bound)
    lines.append(f"exact <= ring bound on 3x7x6 grid: max ratio {worst:.4f}")
    for alpha in (5.0, 6.0, 7.0, 9.0, 11.0):
        snr = core.optimal_snr_single_stage(alpha)
        L = core.reuse_factor(snr, alpha)
        full = core.interference_power_bound(10 ** 6, snr, L, alpha).p_i
        dom = core.interference_power_dominant(snr, L, alpha).p_i
        rel = abs(dom / full - 1)
        ok &= rel <= 0.10
        lines.append(f"alpha={alpha:g} L={L}: dominant/full - 1 = {rel:.3e}")
    return ok, lines


def _verify_traffic(seed):
    n = 4096
    stats = multihop.relay_traffic_montecarlo(n, trials=100, seed=seed)
    root = math.sqrt(n)
    peak = int(stats.center_traffic.max())
    rel = abs(stats.mean_center_traffic / root - 1)
    ok = peak <= 2 * root and rel <= 0.05
    return ok, [f"n={n} trials=100: center max={peak} (bound {2 * root:g}), "
                f"mean={stats.mean_center_traffic:.3f} (sqrt n={root:g}, rel {rel:.3e})"]


def _verify_ft_oracle(seed):
    worst = 0.0
    for method in ("m2", "m3", "m4"):
        for t in range(2, 6):
            for q in (1, 2):
                for L in range(3, 8):
                    a = schemes.slot_budget(method, 1e4, t, L, q).f_t
                    b = schemes.slot_budget_recursive(method, 1e4, t, L, q).f_t
                    worst = max(worst, abs(b / a - 1))
    return worst <= 1e-6, [f"max relative gap closed form vs recursion: {worst:.3e}"]


def _verify_lemma1(seed):
    lines, ok = [], True
    for alpha in np.arange(2.5, 11.0001, 0.5):
        res, margins = coding.lemma1_bound_check(float(alpha))
        ok &= res
        lines.append(f"alpha={alpha:g}: min margin {min(margins.values()):.4f} bits")
    return ok, lines


def _verify_ordering(seed):
    lines, ok = [], True
    for fig in ("fig9", "fig10"):
        spec = FIGURE_SPECS[fig]
        bad = 0
        for n in spec.x_values:
            r = [schemes.best_sum_rate(m, n, spec.alpha).sum_rate for m in ("m4", "m2", "m3", "m1")]
            bad += not (r[0] >= r[1] >= r[2] >= r[3])
        ok &= bad == 0
        lines.append(f"{fig} (alpha={spec.alpha:g}): m4>=m2>=m3>=m1 violated at {bad} of {len(spec.x_values)} n")
    return ok, lines


_SUITES = {
    "rmt": _verify_rmt,
    "submodular": _verify_submodular,
    "concavity": _verify_concavity,
    "pi-bound": _verify_pi_bound,
    "traffic": _verify_traffic,
    "ft-oracle": _verify_ft_oracle,
    "lemma1": _verify_lemma1,
    "ordering": _verify_ordering,
}


def run_verify(suite, seed=0):
    """Run one verification suite; ``suite='all'`` runs every suite in order."""
    if suite == "all":
        return [run_verify(s, seed)[0] for s in VERIFY_SUITES]
    if suite not in _SUITES:
        raise RatekitError(f"unknown verify suite {suite!r}; choose from {VERIFY_SUITES}")
    ok, lines = _SUITES[suite](seed)
    return [VerifyResult(suite, bool(ok), lines)]
