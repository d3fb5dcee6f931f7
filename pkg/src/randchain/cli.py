"""Command-line front end: reproducible experiments with CSV/JSON output.

Every run writes the requested curves as CSV (comma separated, header
row naming the physical quantity) plus a JSON manifest recording the
command, parameters, seed, tool version and output files.  Identical
arguments and seed produce byte-identical CSV files.

Exit codes: 0 success, 2 usage error, 3 numeric failure, 4 I/O failure.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__, betaens, chain, exact, lyapunov, schmidt, tridiag
from .specfun import scaling_dos, scaling_dos_rotated, scaling_f, scaling_f_rotated

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_NUMERIC = 3
EXIT_IO = 4


@dataclasses.dataclass
class RunManifest:
    command: str
    parameters: dict
    seed: int
    tool_version: str
    timestamp: str
    output_files: list
    parallelism: int = 1  # module work runs sequentially in this front end


def parse_grid(spec: str) -> np.ndarray:
    """Grid syntax lo:hi:n (linear); prefix 'g' for geometric spacing."""
    geometric = spec.startswith("g")
    body = spec[1:] if geometric else spec
    parts = body.split(":")
    if len(parts) != 3:
        raise ValueError(f"grid must be lo:hi:n or glo:hi:n, got {spec!r}")
    lo, hi, n = float(parts[0]), float(parts[1]), int(parts[2])
    if n < 1 or hi <= lo:
        raise ValueError(f"bad grid {spec!r}")
    if geometric:
        if lo <= 0:
            raise ValueError("geometric grid needs lo > 0")
        return np.geomspace(lo, hi, n)
    return np.linspace(lo, hi, n)


def parse_law(text: str) -> chain.DisorderLaw:
    """Disorder law syntax: const:v | gamma:alpha:rate | twopoint:m:M:p | gauss:var."""
    parts = text.split(":")
    kind = parts[0]
    try:
        if kind == "const":
            return chain.Constant(float(parts[1]))
        if kind == "gamma":
            return chain.Gamma(float(parts[1]), float(parts[2]))
        if kind == "twopoint":
            return chain.TwoPoint(float(parts[1]), float(parts[2]), float(parts[3]))
        if kind == "gauss":
            return chain.GaussianPotential(float(parts[1]))
    except (IndexError, ValueError) as exc:
        raise ValueError(f"bad disorder law {text!r}: {exc}") from exc
    raise ValueError(f"unknown disorder law kind {kind!r}")


def write_csv(path: Path, header: list[str], columns: list[np.ndarray]) -> None:
    rows = len(columns[0])
    with path.open("w", encoding="utf-8") as fh:
        fh.write(",".join(header) + "\n")
        for i in range(rows):
            fh.write(",".join(f"{col[i]:.12g}" for col in columns) + "\n")


class _Outputs:
    """Collects CSV files for one run and writes the manifest at the end."""

    def __init__(self, args, command: str):
        self.dir = Path(getattr(args, "out", ".") or ".")
        self.prefix = getattr(args, "prefix", command) or command
        self.command = command
        self.seed = int(getattr(args, "seed", 0) or 0)
        self.params = {
            k: (str(v) if not isinstance(v, (int, float, str, bool, type(None))) else v)
            for k, v in vars(args).items()
            if k != "func"
        }
        self.files: list[str] = []

    def csv(self, name: str, header: list[str], columns: list[np.ndarray]) -> Path:
        self.dir.mkdir(parents=True, exist_ok=True)
        path = self.dir / f"{self.prefix}_{name}.csv"
        write_csv(path, header, columns)
        self.files.append(str(path))
        return path

    def finish(self) -> None:
        if not self.files:
            return
        manifest = RunManifest(
            command=self.command,
            parameters=self.params,
            seed=self.seed,
            tool_version=__version__,
            timestamp=time.strftime("%Y-%m-%dT%H:%M:%S"),
            output_files=self.files,
        )
        path = self.dir / f"{self.prefix}_manifest.json"
        path.write_text(json.dumps(dataclasses.asdict(manifest), indent=2) + "\n", encoding="utf-8")


# ----------------------------------------------------------------------
# subcommands
# ----------------------------------------------------------------------


def cmd_pure(args) -> int:
    what = args.what
    if args.x is not None:
        v = exact.pure_chain(args.x)
        value = {"xi": v.xi, "omega": v.omega, "dos": v.dos, "idos": v.idos}[what]
        print(f"{value:.12g}")
        return EXIT_OK
    if args.grid is None:
        print("pure needs --x or --grid", file=sys.stderr)
        return EXIT_USAGE
    xs = parse_grid(args.grid)
    vals = [exact.pure_chain(float(x)) for x in xs]
    out = _Outputs(args, "pure")
    col = {"xi": [v.xi for v in vals], "omega": [v.omega for v in vals],
           "dos": [v.dos for v in vals], "idos": [v.idos for v in vals]}[what]
    name = {"xi": "xi", "omega": "Omega", "dos": "D", "idos": "M"}[what]
    out.csv(what, ["x", name], [xs, np.asarray(col)])
    out.finish()
    return EXIT_OK


def cmd_exact(args) -> int:
    p = exact.GammaChainParams(args.alpha, args.kappa)
    xs = parse_grid(args.grid)
    out = _Outputs(args, "exact")
    if args.what == "omega":
        vals = np.array([exact.omega_exact(p, float(x)) for x in xs])
        out.csv("omega", ["x", "Omega"], [xs, vals])
    elif args.what == "dos":
        table = exact.tabulate_dos(p, xs)
        out.csv("dos", ["mu", "D"], [table[:, 0], table[:, 1]])
    else:
        table = exact.tabulate_idos(p, xs)
        out.csv("idos", ["x", "M"], [table[:, 0], table[:, 1]])
    out.finish()
    return EXIT_OK


def cmd_schmidt(args) -> int:
    law = parse_law(args.law)
    out = _Outputs(args, "schmidt")
    if args.op == "omega":
        val = schmidt.omega_mc(schmidt.XiTypeI(args.x), law, args.samples, seed=args.seed, burn_in=args.burn_in)
        print(f"{val:.12g}")
    elif args.op == "omega2":
        val = schmidt.omega_type2_mc(law, args.spring_k, args.x, args.samples, seed=args.seed, burn_in=args.burn_in)
        print(f"{val:.12g}")
    elif args.op == "nodefrac":
        grid = parse_grid(args.grid) if args.grid else np.array([args.x])
        vals = np.array(
            [schmidt.idos_node_fraction(law, args.spring_k, float(w2), args.samples, seed=args.seed) for w2 in grid]
        )
        if grid.size == 1:
            print(f"{vals[0]:.12g}")
        else:
            out.csv("idos", ["omega_sq", "M"], [grid, vals])
    elif args.op == "density":
        pts = parse_grid(args.grid)
        start = schmidt.DensityGrid(pts, np.full(pts.size, 1.0 / pts.size))
        kind = schmidt.XiTypeI(args.x) if args.kind == "xi" else schmidt.RatioTypeII(args.x, args.spring_k)
        grid_out, residuals = schmidt.density_iteration(kind, law, start, args.iters)
        out.csv("density", ["point", "weight"], [grid_out.points, grid_out.weights])
        print(f"final L1 residual {residuals[-1]:.3g}")
    out.finish()
    return EXIT_OK


def cmd_lyapunov(args) -> int:
    law = parse_law(args.law)
    kind = {"type1": chain.TYPE_I, "type2": chain.TYPE_II, "anderson": chain.ANDERSON}[args.model]
    spec = chain.ChainSpec(kind, 1, law, spring_k=args.spring_k, seed=args.seed)
    grid = parse_grid(args.grid)
    gam = np.empty(grid.size)
    err = np.empty(grid.size)
    for i, v in enumerate(grid):
        est = lyapunov.transfer_lyapunov(spec, float(v), args.steps, seed=(args.seed, i))
        gam[i] = est.gamma
        err[i] = est.stderr
    out = _Outputs(args, "lyapunov")
    label = "E" if kind == chain.ANDERSON else "omega_sq"
    out.csv("gamma", [label, "gamma", "stderr"], [grid, gam, err])
    out.finish()
    return EXIT_OK


def cmd_scaling(args) -> int:
    xs = parse_grid(args.grid)
    f = np.array([scaling_f(float(x)) for x in xs])
    fr = np.array([scaling_f_rotated(float(x)) for x in xs])
    d = np.array([scaling_dos(float(x)) for x in xs])
    dr = np.array([scaling_dos_rotated(float(x)) for x in xs])
    out = _Outputs(args, "scaling")
    out.csv("scaling", ["x", "F", "F_rotated", "dos_scale", "dos_scale_rotated"], [xs, f, fr, d, dr])
    out.finish()
    return EXIT_OK


def cmd_betaens(args) -> int:
    if args.c_over_n is not None:
        spec = betaens.BetaEnsembleSpec(args.pairs, regime=betaens.C_OVER_N, c=args.c_over_n, seed=args.seed)
    else:
        spec = betaens.BetaEnsembleSpec(args.pairs, beta=args.beta, seed=args.seed)
    ys = []
    for s in range(args.samples):
        m = betaens.sample_matrix(spec, seed=(args.seed, s))
        ys.append(betaens.squared_spectrum(m).values)
    ys = np.sort(np.concatenate(ys))
    out = _Outputs(args, "betaens")
    emp = np.arange(1, ys.size + 1) / ys.size
    out.csv("spectrum", ["y", "cdf"], [ys, emp])
    if args.c_over_n is None:
        scaled = np.sort(ys / (2.0 * spec.n_pairs * spec.effective_beta()))
        inside = scaled[(scaled > 0) & (scaled < 1)]
        dens = np.array([betaens.mp_density(float(u)) for u in inside])
        out.csv("mp_target", ["mu", "D"], [inside, dens])
    else:
        mus = np.geomspace(max(1e-6, float(ys[ys > 0].min())), float(ys.max()), 40)
        dens = np.array([betaens.con_density(args.c_over_n, float(m)) for m in mus])
        out.csv("whittaker_target", ["mu", "D"], [mus, dens])
    out.finish()
    return EXIT_OK


def cmd_dos(args) -> int:
    law = parse_law(args.law)
    n_masses = (args.size + 1) // 2
    edges = parse_grid(args.grid)
    centers = 0.5 * (edges[1:] + edges[:-1])
    acc = np.zeros(centers.size)
    for s in range(args.realizations):
        h = chain.anderson_hopping(chain.ChainSpec(chain.TYPE_I, n_masses, law, seed=(args.seed, s)))
        m = chain.empirical_idos(h, edges)
        acc += np.diff(m) / np.diff(edges)
    dens = acc / args.realizations
    out = _Outputs(args, "dos")
    cols = [centers, dens]
    header = ["mu", "D_empirical"]
    if isinstance(law, chain.Gamma) and abs(law.alpha - round(law.alpha)) < 1e-12:
        p = exact.GammaChainParams(law.alpha, law.rate)
        header.append("D_exact")
        cols.append(np.array([exact.dos_exact(p, float(c)) for c in centers]))
    out.csv("dos", header, cols)
    out.finish()
    return EXIT_OK


def _selftest_checks():
    import math

    rng = np.random.default_rng(42)

    def airy_wronskian():
        from .specfun import airy_eval

        worst = max(
            abs(airy_eval(float(x)).wronskian() - 1.0 / math.pi) * math.pi
            for x in rng.uniform(-30, 30, 200)
        )
        return worst < 1e-10, f"worst rel {worst:.2e}"

    def scaling_duals():
        xs = np.linspace(-6, 6, 61)
        d1 = max(abs(scaling_f(float(x)) - scaling_f_rotated(float(x))) for x in xs)
        d2 = max(abs(scaling_dos(float(x)) - scaling_dos_rotated(float(x))) for x in xs)
        return max(d1, d2) < 1e-8, f"max diff {max(d1, d2):.2e}"

    def pure_values():
        v = exact.pure_chain(2.0)
        ok = (
            abs(v.idos - 0.5) < 1e-15
            and abs(v.omega - 2 * math.log(2)) < 1e-15
            and abs(v.dos - 1 / (2 * math.pi)) < 1e-15
        )
        return ok, "M(2), Omega(2), D(2)"

    def sturm_exact():
        t = tridiag.SymTridiag(rng.normal(size=60), rng.uniform(0.2, 1.5, 59))
        ev = np.linalg.eigvalsh(t.to_dense())
        ok = all(tridiag.count_below(t, float(x)) == int(np.sum(ev < x)) for x in rng.uniform(-3, 3, 12))
        return ok, "counts vs dense eigensolver"

    def zero_mode():
        r = chain.realize(chain.ChainSpec(chain.TYPE_II, 40, chain.TwoPoint(1, 2, 0.3), seed=5))
        fm = chain.frequency_matrix(r)
        lo = tridiag.eigenvalues(fm).values[0]
        return abs(lo) < 1e-9, f"zero mode at {lo:.1e}"

    def trace_log():
        lam = tridiag.AntisymTridiag(np.array([1.0, 1.0]))
        s, d = tridiag.tracelog_check(lam, 0.1, 40)
        return abs(s - d) < 1e-10, f"|series-direct| {abs(s - d):.1e}"

    def node_duality():
        masses = np.where(rng.random(400) < 0.3, 1.0, 2.0)
        nc = schmidt.node_count(masses, 1.0, 1.37)
        t = tridiag.SymTridiag(2.0 / masses, -1.0 / np.sqrt(masses[:-1] * masses[1:]))
        return nc == tridiag.count_below(t, 1.37), f"count {nc}"

    def letac_quick():
        r = schmidt.letac_check(1.0, 1.0, 1.0, 20000, seed=11)
        return r.statistic < 0.02, f"KS {r.statistic:.4f}"

    def gamma_sampler():
        from .specfun import sample_gamma

        x = sample_gamma(2.0, 1.0, 13, 200000)
        z = (x.mean() - 2.0) / (x.std() / math.sqrt(x.size))
        return abs(z) < 4.0, f"mean z-score {z:.2f}"

    def mp_quick():
        spec = betaens.BetaEnsembleSpec(60, beta=2.0)
        mus = np.concatenate([betaens.scaled_squared_spectrum(spec, seed=(3, s)) for s in range(10)])
        mus.sort()
        ks = float(np.max(np.abs(np.arange(1, mus.size + 1) / mus.size - betaens.mp_cdf(mus))))
        return ks < 0.06, f"KS {ks:.4f}"

    def lyapunov_pure():
        est = lyapunov.transfer_lyapunov(chain.ChainSpec(chain.TYPE_II, 1, chain.Constant(1.0)), 6.0, 100000, seed=2)
        return abs(est.gamma - math.log(2 + math.sqrt(3))) < 1e-5, f"gamma {est.gamma:.8f}"

    return [
        ("airy-wronskian", airy_wronskian),
        ("scaling-dual-representations", scaling_duals),
        ("pure-chain-closed-forms", pure_values),
        ("sturm-count-exactness", sturm_exact),
        ("free-boundary-zero-mode", zero_mode),
        ("trace-log-identity", trace_log),
        ("node-count-duality", node_duality),
        ("letac-identity", letac_quick),
        ("gamma-sampler-mean", gamma_sampler),
        ("marchenko-pastur", mp_quick),
        ("pure-chain-lyapunov", lyapunov_pure),
    ]


def cmd_selftest(args) -> int:
    failures = 0
    for name, check in _selftest_checks():
        try:
            ok, detail = check()
        except Exception as exc:  # a crash is a failure, not a usage error
            ok, detail = False, f"exception {type(exc).__name__}: {exc}"
        print(f"{'PASS' if ok else 'FAIL'} {name}: {detail}")
        failures += 0 if ok else 1
    return EXIT_OK if failures == 0 else EXIT_NUMERIC


# ----------------------------------------------------------------------
# parser
# ----------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="randchain",
        description="Disordered-chain spectra: exact formulas, Monte Carlo, and beta-ensembles.",
    )
    ap.add_argument("--config", default=None, help="flat key=value file; flags override")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--out", default=".", help="output directory")
        p.add_argument("--prefix", default=None, help="output file prefix")

    p = sub.add_parser("pure", help="closed forms of the chain without disorder")
    p.add_argument("--what", choices=["xi", "omega", "dos", "idos"], default="idos")
    p.add_argument("--x", type=float, default=None)
    p.add_argument("--grid", default=None)
    common(p)
    p.set_defaults(func=cmd_pure)

    p = sub.add_parser("exact", help="solvable gamma-coupling chain")
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--kappa", type=float, required=True)
    p.add_argument("--what", choices=["idos", "dos", "omega"], default="idos")
    p.add_argument("--grid", required=True, help="lo:hi:n or glo:hi:n")
    common(p)
    p.set_defaults(func=cmd_exact)

    p = sub.add_parser("schmidt", help="stationary recursions and node counting")
    p.add_argument("--op", choices=["omega", "omega2", "nodefrac", "density"], required=True)
    p.add_argument("--law", required=True, help="const:v | gamma:a:k | twopoint:m:M:p")
    p.add_argument("--x", type=float, default=1.0, help="argument x or omega_sq")
    p.add_argument("--spring-k", type=float, default=1.0)
    p.add_argument("--samples", type=int, default=100000)
    p.add_argument("--burn-in", type=int, default=schmidt.DEFAULT_BURN_IN)
    p.add_argument("--iters", type=int, default=50)
    p.add_argument("--kind", choices=["xi", "ratio2"], default="xi")
    p.add_argument("--grid", default=None)
    common(p)
    p.set_defaults(func=cmd_schmidt)

    p = sub.add_parser("lyapunov", help="transfer-matrix Lyapunov exponents")
    p.add_argument("--model", choices=["type1", "type2", "anderson"], required=True)
    p.add_argument("--law", required=True)
    p.add_argument("--spring-k", type=float, default=1.0)
    p.add_argument("--grid", required=True, help="omega_sq or E grid")
    p.add_argument("--steps", type=int, default=1000000)
    common(p)
    p.set_defaults(func=cmd_lyapunov)

    p = sub.add_parser("scaling", help="band-edge scaling functions")
    p.add_argument("--grid", required=True)
    common(p)
    p.set_defaults(func=cmd_scaling)

    p = sub.add_parser("betaens", help="anti-symmetric beta-ensemble spectra")
    p.add_argument("--pairs", type=int, required=True)
    p.add_argument("--beta", type=float, default=None)
    p.add_argument("--c-over-n", type=float, default=None)
    p.add_argument("--samples", type=int, default=50)
    common(p)
    p.set_defaults(func=cmd_betaens)

    p = sub.add_parser("dos", help="empirical density of states of a chain")
    p.add_argument("--law", required=True)
    p.add_argument("--size", type=int, default=2001, help="lattice size 2N-1")
    p.add_argument("--realizations", type=int, default=10)
    p.add_argument("--grid", required=True, help="bin edges lo:hi:n")
    common(p)
    p.set_defaults(func=cmd_dos)

    p = sub.add_parser("selftest", help="run the quick invariant suite")
    common(p)
    p.set_defaults(func=cmd_selftest)
    return ap


def _apply_config(ap: argparse.ArgumentParser, argv: list[str]) -> list[str]:
    """Prepend defaults from a flat key=value config file; flags override."""
    if "--config" not in argv:
        return argv
    idx = argv.index("--config")
    path = Path(argv[idx + 1])
    pairs = []
    for line in path.read_text(encoding="utf-8").splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        key, _, value = line.partition("=")
        pairs.extend([f"--{key.strip()}", value.strip()])
    # Insert config pairs right after the subcommand so explicit flags win.
    head = argv[: idx] + argv[idx + 2 :]
    for i, tok in enumerate(head):
        if not tok.startswith("-"):
            return head[: i + 1] + pairs + head[i + 1 :]
    return head + pairs


def run(argv: list[str]) -> int:
    ap = build_parser()
    try:
        argv = _apply_config(ap, list(argv))
    except OSError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_IO
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else EXIT_OK
    try:
        return args.func(args)
    except (ValueError, ArithmeticError) as exc:
        print(f"numeric error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_IO


def main() -> None:
    sys.exit(run(sys.argv[1:]))


if __name__ == "__main__":
    main()
