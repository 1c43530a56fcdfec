"""Command-line driver: finite-size solves, series, trajectories, excitations and figure data.

Every command writes a CSV (one header line, 17 significant digits). Output
is built fully in memory and moved into place atomically, so a failed run
never leaves a partial file.
"""

from __future__ import annotations

import argparse
import csv
import io
import logging
import os
import sys
import tempfile
from concurrent.futures import ThreadPoolExecutor
from functools import lru_cache

import numpy as np

from . import excitations as EX
from . import largephi as LP
from . import moments as MO
from . import pseudovacuum as PV
from . import solver as SO
from . import trajectory as TR

log = logging.getLogger("bethecont")

CONFIGS = {"standard": MO.standard, "edgesplit": MO.edge_split, "threeblock": MO.three_block}
THREADS_ENV = "BETHECONT_THREADS"


class Table:
    """A named CSV table."""

    def __init__(self, name: str, header: list[str]):
        self.name = name
        self.header = header
        self.rows: list[list] = []

    def add(self, *row):
        if len(row) != len(self.header):
            raise ValueError(f"row width {len(row)} != header width {len(self.header)}")
        self.rows.append(list(row))

    def render(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(self.header)
        for r in self.rows:
            w.writerow([_fmt(v) for v in r])
        return buf.getvalue()


def _fmt(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return str(int(v))
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        v = float(v)
        if v == 0.0:
            return "0"  # drop the sign of -0.0 so reruns diff cleanly
        return format(v, ".17g")
    if v is None:
        return ""
    return str(v)


def _atomic_write(path: str, text: str):
    d = os.path.dirname(os.path.abspath(path))
    os.makedirs(d, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=d, prefix=".tmp-", suffix=".csv")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _emit(tables: list[Table], out: str | None, directory: bool = False):
    if directory:
        if out is None:
            raise ValueError("figure presets need --out DIR")
        texts = [(os.path.join(out, t.name + ".csv"), t.render()) for t in tables]
        for path, text in texts:
            _atomic_write(path, text)
        return
    (table,) = tables
    if out is None:
        sys.stdout.write(table.render())
    else:
        _atomic_write(out, table.render())


def _threads(args) -> int:
    if args.threads is not None:
        n = args.threads
    else:
        env = os.environ.get(THREADS_ENV)
        n = int(env) if env else 1
    if n < 1:
        raise ValueError("thread count must be positive")
    return n


def _pmap(fn, items, threads: int):
    items = list(items)
    if threads <= 1 or len(items) <= 1:
        return [fn(i) for i in items]
    with ThreadPoolExecutor(max_workers=threads) as ex:
        return list(ex.map(fn, items))  # map keeps input order


def _phi_grid(args) -> np.ndarray:
    if args.phi_steps < 1:
        raise ValueError("--phi-steps must be at least 1")
    if args.phi_min < 0 or args.phi_max < args.phi_min:
        raise ValueError("need 0 <= phi-min <= phi-max")
    if args.phi_steps == 1:
        return np.array([args.phi_min])
    return np.linspace(args.phi_min, args.phi_max, args.phi_steps)


def _z_grid(args) -> np.ndarray:
    if args.z_steps < 1:
        raise ValueError("--z-steps must be at least 1")
    if not -0.5 < args.z_min <= args.z_max <= 0.5:
        raise ValueError("need -1/2 < z-min <= z-max <= 1/2")
    return np.linspace(args.z_min, args.z_max, args.z_steps)


# ----------------------------------------------------------------------------
# data builders (pure: they return tables and never touch the filesystem)


def solve_table(config: str, m: float, L: int, phis, threads: int = 1, name: str = "solve") -> Table:
    if L <= 0:
        raise ValueError("L must be positive")
    g = 1
    if m < 0:
        if config != "standard":
            raise ValueError("negative m is only supported for the standard filling")
        g = -1
    nums = MO.bethe_numbers_for(CONFIGS[config](abs(m)), L)
    t = Table(name, ["phi", "x", "energy_re", "energy_im", "max_residual"])
    phis = np.atleast_1d(np.asarray(phis, dtype=float))
    if nums.size == 0:
        t.add(phis[0], np.exp(-2 * phis[0]), 0.0, 0.0, 0.0)
        return t
    states = SO.solve_twisted(L, nums, phis, g=g)
    for phi, st in zip(phis, states):
        e = complex(st.energy)
        t.add(phi, np.exp(-2 * phi), e.real, e.imag, st.residual)
    return t


def series_table(config: str, m: float, M: int, phis, name: str = "series") -> Table:
    if M < 8:
        raise ValueError("--order must be at least 8 for a radius estimate")
    s = LP.expand_coefficients(CONFIGS[config](m), M)
    radius = LP.estimate_radius(s)
    t = Table(name, ["kind", "b", "phi", "x", "re", "im"])
    for b, f in zip(s.orders, s.f):
        t.add("coeff", b, None, None, f.real, f.imag)
    t.add("radius", None, None, radius, None, None)
    for phi in np.atleast_1d(phis):
        x = float(np.exp(-2 * phi))
        v = complex(LP.evaluate(s, x))
        t.add("value" if x < radius else "value_outside_radius", None, phi, x, v.real, v.imag)
    return t


def pseudovacuum_table(phis, P: int, threads: int = 1, name: str = "pseudovacuum") -> Table:
    if P < 1:
        raise ValueError("--order must be at least 1")
    phis = np.atleast_1d(np.asarray(phis, dtype=float))
    series = _pmap(lambda p: PV.derivatives_at_pseudovacuum(float(np.exp(-2 * p)), P), phis, threads)
    t = Table(name, ["phi", "x", "order", "coeff_re", "coeff_im", "closed_form_order1"])
    for phi, s in zip(phis, series):
        cf = float(PV.first_derivative_closed_form(phi))
        for k, c in enumerate(s.coeffs):
            t.add(phi, np.exp(-2 * phi), k, c.real, c.imag, cf)
    return t


def trajectory_table(
    name: str, phi: float, P: int | None, xis, kmins, name_out: str = "trajectory"
) -> Table:
    spec = TR.get_trajectory(name)
    s = TR.trajectory_energy(spec, float(np.exp(-2 * phi)), P)
    t = Table(name_out, ["kind", "index", "xi", "value_re", "value_im", "fit_residual"])
    for p, c in enumerate(s.coeffs):
        t.add("coeff", p, None, c.real, c.imag, None)
    for xi in xis:
        for k, v in enumerate(s.partial_sums(xi), start=1):
            t.add("partial_sum", k, xi, v.real, v.imag, None)
        for km in kmins:
            a, r = TR.extrapolate(s, xi, km)
            t.add("fit_kmin", km, xi, a, None, r)
    return t


def _largephi_curve(state: str, phi: float, M: int):
    base = _state(state)
    x = float(np.exp(-2 * phi))

    @lru_cache(maxsize=None)
    def curve(z):
        return complex(LP.evaluate(EX.eta_derivative_largephi(base, z, M), x, M))

    return curve


def _state(state: str):
    if state == "ground":
        return MO.ground_state()
    if state == "pseudovacuum":
        return lambda a: np.where(np.asarray(a) == 0, -1.0, 0.0) + 0j
    raise ValueError(f"unknown state {state!r}; choose ground or pseudovacuum")


def _trajectory_series(traj: str, phi: float, P: int):
    x = float(np.exp(-2 * phi))

    @lru_cache(maxsize=None)
    def series(z):
        return EX.eta_derivative_along_trajectory(traj, z, x, P)

    return series


def excitations_tables(
    state: str,
    phi: float,
    zs,
    terms_list,
    method: str,
    traj: str = "traj1",
    xi: float = 0.5,
    pair_grid: int = 40,
    partner_points: int = 121,
    threads: int = 1,
    name: str = "excitations",
) -> Table:
    """dF/deta over z and the real pairs, for each truncation in terms_list."""
    t = Table(name, ["kind", "terms", "z", "z_partner", "re", "im"])
    zs = np.atleast_1d(np.asarray(zs, dtype=float))
    if method == "largephi":
        if phi <= 0:
            raise ValueError("the large-phi method needs phi > 0")
        curves = {n: _largephi_curve(state, phi, n) for n in terms_list}
    elif method == "trajectory":
        if state != "ground":
            raise ValueError("the trajectory method reaches the ground state only")
        P = max(terms_list) - 1
        ser = _trajectory_series(traj, phi, P)

        def make(n):
            return lambda z: complex(ser(z)(xi, n))

        curves = {n: make(n) for n in terms_list}
    else:
        raise ValueError(f"unknown method {method!r}")

    def safe(c, z):
        try:
            return c(z)
        except ValueError:
            return complex(np.nan, np.nan)

    for n in terms_list:
        vals = _pmap(lambda z: safe(curves[n], z), zs, threads)
        for z, v in zip(zs, vals):
            t.add("curve", n, z, None, v.real, v.imag)
    (lo, hi), = EX.windows()[0]
    grid = np.linspace(lo, hi, pair_grid)
    for n in terms_list:
        for p in EX.pair_real(grid, curves[n], partner_points):
            t.add("pair", n, p.z_p, p.z_h, p.delta, p.imag)
    return t


# ----------------------------------------------------------------------------
# figure presets

FIG_CONFIG = {1: ("standard", [(0.25, 200), (0.75, 100)]),
              2: ("edgesplit", [(0.25, 240), (0.5, 144)]),
              3: ("threeblock", [(0.25, 240), (0.5, 144)])}


def _fig_configs(n: int, threads: int) -> list[Table]:
    config, pairs = FIG_CONFIG[n]
    out = []
    for m, L in pairs:
        s = LP.expand_coefficients(CONFIGS[config](m), 20)
        uc = LP.estimate_radius(s)
        xs = np.linspace(0.1, 0.9, 17) * min(uc, 1.0)  # inner 80% of the window
        phis = -0.5 * np.log(xs)
        tag = f"fig{n}_{config}_m{m:g}"
        out.append(series_table(config, m, 20, phis, name=f"{tag}_series"))
        out.append(solve_table(config, m, L, phis, threads, name=f"{tag}_L{L}_solve"))
    return out


def _fig_intervals(name: str, fillings) -> Table:
    t = Table(name, ["label", "param", "block", "lo", "hi", "weight"])
    for label, f in fillings:
        for i, (lo, hi, w) in enumerate(f.intervals()):
            t.add(label, f.param, i, lo, hi, w)
    return t


def _fig6() -> list[Table]:
    t = Table("fig6_series_m-1", ["config", "x", "energy_re", "energy_im"])
    xs = np.linspace(0.01, 0.25, 25)
    for config in ("standard", "edgesplit", "threeblock"):
        s = LP.expand_coefficients(CONFIGS[config](-1.0), 20)
        for x in xs:
            v = complex(LP.evaluate(s, x))
            t.add(config, x, v.real, v.imag)
    return [t]


def _fig7() -> list[Table]:
    t = Table("fig7_mirror", ["phi", "x", "F", "dF_dm_series", "dF_dm_closed_form"])
    for phi in np.linspace(PV.PHI_CRIT + 0.02, 4.0, 30):
        x = float(np.exp(-2 * phi))
        s = PV.mirror_derivatives_at_m1(x, 2)
        t.add(phi, x, s.coeffs[0].real, s.coeffs[1].real, float(PV.mirror_first_derivative(phi)))
    return [t]


FIG_PHIS = (0.0, 0.5, 0.75, 1.0, 1.25)
FIG_M_SOLVE = ((-0.4, 200), (-0.25, 320), (-0.2, 400), (-0.1, 800))


def _solver_vs_m(name: str, ms, threads: int) -> Table:
    t = Table(name, ["m", "L", "phi", "energy_re", "energy_im", "max_residual"])

    def one(mL):
        m, L = mL
        return solve_table("standard", m, L, FIG_PHIS)

    for (m, L), tab in zip(ms, _pmap(one, ms, threads)):
        for phi, _, er, ei, res in tab.rows:
            t.add(m, L, phi, er, ei, res)
    return t


def _fig8(threads: int) -> list[Table]:
    ser = Table("fig8_series_m0", ["phi", "m", "energy"])
    for phi in FIG_PHIS:
        g = [0.0, 2 * np.cosh(phi) ** 2, 0.0, -np.pi**2 / 6 * np.cosh(2 * phi),
             np.pi**2 / 3 * (1 + np.tanh(phi) ** 2)]
        for m in np.linspace(-0.5, 0.5, 41):
            ser.add(phi, m, float(np.polyval(g[::-1], m)))
    ms = FIG_M_SOLVE + ((0.1, 800), (0.2, 400), (0.25, 320), (0.4, 200))
    return [ser, _solver_vs_m("fig8_solve_N80", ms, threads)]


def _fig11(threads: int) -> list[Table]:
    ser = Table("fig11_series_m-1", ["phi", "m", "energy"])
    for phi in FIG_PHIS:
        s = PV.derivatives_at_pseudovacuum(float(np.exp(-2 * phi)), 22)
        for m in np.linspace(-1.0, -0.3, 36):
            ser.add(phi, m, float(s(m + 1.0).real))
    right = Table("fig11_inverse_energy_m-0.5", ["phi", "x", "inv_series", "inv_solver", "max_residual"])
    xs = np.linspace(0.02, 0.6, 30)
    phis = -0.5 * np.log(xs)
    st = solve_table("standard", -0.5, 200, phis)
    for x, phi, row in zip(xs, phis, st.rows):
        s = PV.derivatives_at_pseudovacuum(float(x), 22)
        right.add(phi, x, 1.0 / float(s(0.5).real), 1.0 / row[2], row[4])
    return [ser, _solver_vs_m("fig11_solve_N80", FIG_M_SOLVE + ((-0.5, 160),), threads), right]


def _fig_traj(n: int, traj: str, truncations, xis, kmins) -> list[Table]:
    spec = TR.get_trajectory(traj)
    s = TR.trajectory_energy(spec, 1.0)
    poly = Table(f"fig{n}_{traj}_energy", ["terms", "xi", "energy"])
    for k in truncations:
        for xi in np.linspace(-0.5, 0.5, 41):
            poly.add(k, xi, float(s(xi, k).real))
    return [trajectory_table(traj, 0.0, None, xis, kmins, name_out=f"fig{n}_{traj}_coeffs"), poly]


def _fig10() -> list[Table]:
    f = TR.TRAJ1.filling
    return [_fig_intervals("fig10_traj1_blocks", [(f"xi={xi:g}", f.at(xi)) for xi in np.linspace(0, 0.5, 6)])]


def _fig13(threads: int) -> list[Table]:
    zs = np.linspace(-0.5, 0.5, 101)[1:]
    return [excitations_tables("ground", 1.5, zs, [13], "largephi", threads=threads,
                               name="fig13_excitations_phi1.5")]


def _fig14(threads: int) -> list[Table]:
    zs = np.linspace(-0.5, 0.5, 101)[1:]
    return [excitations_tables("ground", 0.0, zs, [3, 4, 5], "trajectory", pair_grid=24,
                               partner_points=61, threads=threads, name="fig14_excitations_phi0")]


def figure_tables(n: int, threads: int = 1) -> list[Table]:
    if n in FIG_CONFIG:
        return _fig_configs(n, threads)
    if n == 5:
        return [_fig_intervals("fig5_m-1_states", [("pseudovacuum", MO.standard(-1.0)),
                                                   ("ground", MO.ground_state())])]
    if n == 6:
        return _fig6()
    if n == 7:
        return _fig7()
    if n == 8:
        return _fig8(threads)
    if n == 9:
        return _fig_traj(9, "traj1", (5, 10, 15), (0.5, -0.5), (5, 6))
    if n == 10:
        return _fig10()
    if n == 11:
        return _fig11(threads)
    if n == 12:
        return _fig_traj(12, "traj2", (4, 6, 8), (0.5,), (4,))
    if n == 13:
        return _fig13(threads)
    if n == 14:
        return _fig14(threads)
    raise ValueError(f"no preset for figure {n}; available: 1-3, 5-14")


# ----------------------------------------------------------------------------
# argument parsing


def _add_phi(p, lo=0.0, hi=2.0, steps=21):
    p.add_argument("--phi-min", type=float, default=lo)
    p.add_argument("--phi-max", type=float, default=hi)
    p.add_argument("--phi-steps", type=int, default=steps)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="bethecont", description=__doc__.splitlines()[0])
    ap.add_argument("--threads", type=int, default=None,
                    help=f"worker threads for sweeps (default: ${THREADS_ENV} or 1)")
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="finite-size energies over a phi grid")
    p.add_argument("--L", type=int, required=True)
    p.add_argument("--m", type=float, required=True)
    p.add_argument("--config", choices=sorted(CONFIGS), default="standard")
    _add_phi(p)
    p.add_argument("--out")

    p = sub.add_parser("series", help="large-phi coefficients and evaluated energy")
    p.add_argument("--m", type=float, required=True)
    p.add_argument("--config", choices=sorted(CONFIGS), default="standard")
    p.add_argument("--order", type=int, default=20)
    _add_phi(p, 0.5, 3.0, 26)
    p.add_argument("--out")

    p = sub.add_parser("pseudovacuum", help="(m+1)-series coefficients around m = -1")
    p.add_argument("--order", type=int, default=22)
    _add_phi(p, 0.0, 2.0, 5)
    p.add_argument("--out")

    p = sub.add_parser("trajectory", help="energy along a path from the pseudo-vacuum")
    p.add_argument("--trajectory", choices=["traj1", "traj2"], default="traj1")
    p.add_argument("--phi", type=float, default=0.0)
    p.add_argument("--order", type=int, default=None)
    p.add_argument("--xi", type=float, nargs="+", default=[0.5])
    p.add_argument("--kmin", type=int, nargs="+", default=[5, 6])
    p.add_argument("--out")

    p = sub.add_parser("excitations", help="particle-hole excitation energies and pairs")
    p.add_argument("--state", choices=["ground", "pseudovacuum"], default="ground")
    p.add_argument("--method", choices=["largephi", "trajectory"], default=None,
                   help="default: largephi for phi > 0, trajectory at phi = 0")
    p.add_argument("--phi", type=float, default=1.5)
    p.add_argument("--order", type=int, nargs="+", default=None,
                   help="number of series terms (default 13 large-phi, 5 trajectory)")
    p.add_argument("--trajectory", choices=["traj1", "traj2"], default="traj1")
    p.add_argument("--xi", type=float, default=0.5)
    p.add_argument("--z-min", type=float, default=-0.49)
    p.add_argument("--z-max", type=float, default=0.49)
    p.add_argument("--z-steps", type=int, default=99)
    p.add_argument("--pair-grid", type=int, default=40)
    p.add_argument("--out")

    p = sub.add_parser("figure", help="preset data for a figure, written into --out DIR")
    p.add_argument("n", type=int)
    p.add_argument("--out", required=True)
    return ap


def run(args) -> None:
    threads = _threads(args)
    c = args.command
    if c == "solve":
        _emit([solve_table(args.config, args.m, args.L, _phi_grid(args), threads)], args.out)
    elif c == "series":
        _emit([series_table(args.config, args.m, args.order, _phi_grid(args))], args.out)
    elif c == "pseudovacuum":
        _emit([pseudovacuum_table(_phi_grid(args), args.order, threads)], args.out)
    elif c == "trajectory":
        _emit([trajectory_table(args.trajectory, args.phi, args.order, args.xi, args.kmin)], args.out)
    elif c == "excitations":
        method = args.method or ("largephi" if args.phi > 0 else "trajectory")
        terms = args.order or ([13] if method == "largephi" else [5])
        if min(terms) < 1:
            raise ValueError("--order must be positive")
        tab = excitations_tables(args.state, args.phi, _z_grid(args), terms, method,
                                 traj=args.trajectory, xi=args.xi, pair_grid=args.pair_grid,
                                 threads=threads)
        _emit([tab], args.out)
    elif c == "figure":
        _emit(figure_tables(args.n, threads), args.out, directory=True)


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        run(args)
    except (ValueError, RuntimeError, ArithmeticError, KeyError) as exc:
        print(f"bethecont: error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
