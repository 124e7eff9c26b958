"""Scenario runner: spectrum | figure1 | evolve | oracle-compare.

Configuration is a flat ``key=value`` text file plus command-line overrides
(last one wins). Every CSV is schema-stable: '#'-prefixed header comments,
fixed column order, 17-significant-digit numbers, no locale dependence,
byte-for-byte reproducible on identical configuration. Exit codes: 0
success, 1 numerical/validation failure, 2 usage or configuration error.

All outputs use hbar = 1.
"""

from __future__ import annotations

import argparse
import os
import sys
from dataclasses import dataclass, replace

import numpy as np

from . import dephasing, oracle, pt_core
from .errors import PtDecoError

USAGE_EXIT = 2
FAILURE_EXIT = 1


def _fmt(x: float) -> str:
    """17-significant-digit, locale-independent float formatting."""
    return f"{float(x):.17g}"


def _label(x: float) -> str:
    """Shortest round-trip form, for header labels."""
    return repr(float(x))


class ConfigError(Exception):
    pass


@dataclass(frozen=True)
class ScenarioConfig:
    alphas: tuple[float, ...] = (0.0, 0.5, 0.9, 1.0)
    j0: float = 1.0
    mu: float = -0.5
    omega_c: float = 1.0
    beta: float = 0.5
    t_start: float = 0.0
    t_end: float = 20.0
    n_points: int = 200
    tol: float = 1e-10
    modes: int = 3
    fock_dim: int = 5
    omega_max: float = 15.0
    compare_tol: float = 1e-2
    state_r11: float = 0.5
    state_re12: float = 0.0
    state_im12: float = 0.5
    representation: str = "hermitian"
    out: str = ""

    def times(self) -> np.ndarray:
        if self.n_points < 2:
            raise ConfigError("n_points must be >= 2")
        if not (self.t_end > self.t_start >= 0.0):
            raise ConfigError("need t_end > t_start >= 0")
        return np.linspace(self.t_start, self.t_end, self.n_points)

    def spectral(self) -> dephasing.SpectralDensity:
        return dephasing.SpectralDensity(j0=self.j0, mu=self.mu, omega_c=self.omega_c)


def _parse_alpha_list(text: str) -> tuple[float, ...]:
    items = [s for s in (p.strip() for p in text.split(",")) if s]
    if not items:
        raise ConfigError("empty alpha list")
    try:
        return tuple(float(s) for s in items)
    except ValueError as exc:
        raise ConfigError(f"bad alpha list {text!r}") from exc


_CONFIG_PARSERS = {
    "alpha": ("alphas", _parse_alpha_list),
    "j0": ("j0", float),
    "mu": ("mu", float),
    "omega_c": ("omega_c", float),
    "beta": ("beta", float),
    "t_start": ("t_start", float),
    "t_end": ("t_end", float),
    "n_points": ("n_points", int),
    "tol": ("tol", float),
    "modes": ("modes", int),
    "fock_dim": ("fock_dim", int),
    "omega_max": ("omega_max", float),
    "compare_tol": ("compare_tol", float),
    "state_r11": ("state_r11", float),
    "state_re12": ("state_re12", float),
    "state_im12": ("state_im12", float),
    "representation": ("representation", str),
    "out": ("out", str),
}


def load_config_file(path: str, base: ScenarioConfig) -> ScenarioConfig:
    updates = {}
    try:
        with open(path, "r", encoding="utf-8") as fh:
            for lineno, raw in enumerate(fh, 1):
                line = raw.split("#", 1)[0].strip()
                if not line:
                    continue
                if "=" not in line:
                    raise ConfigError(f"{path}:{lineno}: expected key=value, got {raw!r}")
                key, _, value = line.partition("=")
                key = key.strip()
                if key not in _CONFIG_PARSERS:
                    raise ConfigError(f"{path}:{lineno}: unknown key {key!r}")
                field_name, parser = _CONFIG_PARSERS[key]
                try:
                    updates[field_name] = parser(value.strip())
                except (ValueError, ConfigError) as exc:
                    raise ConfigError(f"{path}:{lineno}: bad value for {key}: {exc}")
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}")
    return replace(base, **updates)


def _add_common_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", metavar="PATH", help="key=value configuration file")
    p.add_argument("--out", metavar="PATH", help="output CSV path")
    p.add_argument("--alpha", metavar="LIST", help="comma-separated alpha values")
    p.add_argument("--beta", type=float)
    p.add_argument("--mu", type=float)
    p.add_argument("--j0", type=float)
    p.add_argument("--omega-c", dest="omega_c", type=float)
    p.add_argument("--t-end", dest="t_end", type=float)
    p.add_argument("--n-points", dest="n_points", type=int)
    p.add_argument("--tol", type=float)
    p.add_argument("--modes", type=int)
    p.add_argument("--fock-dim", dest="fock_dim", type=int)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ptdeco",
        description="Dephasing dynamics of PT-symmetric qubits (hbar = 1).",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, helptext in [
        ("spectrum", "eigenvalues and phase classification over an alpha grid"),
        ("figure1", "decoherence-function family D(t; alpha) as CSV"),
        ("evolve", "exact reduced qubit trajectory as CSV"),
        ("oracle-compare", "brute-force bath validation report as CSV"),
    ]:
        p = sub.add_parser(name, help=helptext)
        _add_common_flags(p)
        if name == "evolve":
            p.add_argument(
                "--state",
                metavar="R11,RE12,IM12",
                help="initial state entries r11, Re r12, Im r12 (r22 = 1 - r11)",
            )
            p.add_argument(
                "--representation", choices=["hermitian", "pt"], default=None
            )
        if name == "oracle-compare":
            p.add_argument("--omega-max", dest="omega_max", type=float)
            p.add_argument("--compare-tol", dest="compare_tol", type=float)
    return parser


def build_config(args: argparse.Namespace, base: ScenarioConfig) -> ScenarioConfig:
    cfg = base
    if args.config:
        cfg = load_config_file(args.config, cfg)
    updates = {}
    for name in (
        "out",
        "beta",
        "mu",
        "j0",
        "omega_c",
        "t_end",
        "n_points",
        "tol",
        "modes",
        "fock_dim",
        "omega_max",
        "compare_tol",
        "representation",
    ):
        value = getattr(args, name, None)
        if value is not None:
            updates[name] = value
    if getattr(args, "alpha", None) is not None:
        updates["alphas"] = _parse_alpha_list(args.alpha)
    if getattr(args, "state", None) is not None:
        parts = [s.strip() for s in args.state.split(",")]
        if len(parts) != 3:
            raise ConfigError("--state expects three numbers: r11,re12,im12")
        try:
            r11, re12, im12 = (float(s) for s in parts)
        except ValueError as exc:
            raise ConfigError(f"bad --state {args.state!r}") from exc
        updates.update(state_r11=r11, state_re12=re12, state_im12=im12)
    return replace(cfg, **updates)


def _max_workers() -> int:
    raw = os.environ.get("PTDECO_THREADS", "")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def _write_atomic(path: str, text: str) -> None:
    tmp = path + ".tmp"
    try:
        with open(tmp, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.remove(tmp)
        raise


def _require_unbroken_alphas(cfg: ScenarioConfig) -> None:
    bad = [a for a in cfg.alphas if abs(a) > 1.0]
    if bad:
        raise ConfigError(f"|alpha| <= 1 required here, got {bad}")


def cmd_spectrum(cfg: ScenarioConfig) -> int:
    if not cfg.alphas:
        raise ConfigError("empty alpha grid")
    for a in cfg.alphas:
        ham = dephasing.qubit_hamiltonian(a)
        report = pt_core.spectrum(ham)
        vals = ",".join(
            f"{_fmt(v.real)}{v.imag:+.17g}j" if abs(v.imag) > 1e-12 else _fmt(v.real)
            for v in report.eigenvalues
        )
        print(
            f"alpha={_fmt(a)} classification={report.classification.value} "
            f"eigenvalues={vals}"
        )
    return 0


def _header(cmd: str, cfg: ScenarioConfig, extra: list[str] | None = None) -> list[str]:
    lines = [
        f"# ptdeco {cmd}",
        "# hbar = 1",
        f"# j0 = {_fmt(cfg.j0)} mu = {_fmt(cfg.mu)} omega_c = {_fmt(cfg.omega_c)} "
        f"beta = {_fmt(cfg.beta)}",
        f"# alphas = {','.join(_label(a) for a in cfg.alphas)}",
        f"# t_start = {_fmt(cfg.t_start)} t_end = {_fmt(cfg.t_end)} "
        f"n_points = {cfg.n_points} tol = {_fmt(cfg.tol)}",
    ]
    if extra:
        lines.extend(extra)
    return lines


def cmd_figure1(cfg: ScenarioConfig) -> int:
    _require_unbroken_alphas(cfg)
    table = dephasing.sweep_alpha(
        cfg.alphas,
        cfg.times(),
        cfg.spectral(),
        cfg.beta,
        tol=cfg.tol,
        max_workers=_max_workers(),
    )
    lines = _header("figure1", cfg)
    lines.append("t," + ",".join(f"D_alpha={_label(a)}" for a in cfg.alphas))
    for i, t in enumerate(table.times):
        row = [_fmt(t)] + [_fmt(d) for d in table.decoherence[i]]
        lines.append(",".join(row))
    out = cfg.out or "figure1.csv"
    _write_atomic(out, "\n".join(lines) + "\n")
    print(f"wrote {out}")
    return 0


def cmd_evolve(cfg: ScenarioConfig) -> int:
    _require_unbroken_alphas(cfg)
    if len(cfg.alphas) != 1:
        raise ConfigError("evolve expects exactly one alpha")
    if cfg.representation not in ("hermitian", "pt"):
        raise ConfigError(f"unknown representation {cfg.representation!r}")
    alpha = cfg.alphas[0]
    r12 = cfg.state_re12 + 1j * cfg.state_im12
    rho0 = np.array(
        [[cfg.state_r11, r12], [np.conj(r12), 1.0 - cfg.state_r11]], dtype=complex
    )
    model = dephasing.DephasingModel(alpha=alpha, beta=cfg.beta, spectral=cfg.spectral())
    cmap = None
    if cfg.representation == "pt":
        cmap = dephasing.qubit_transform(alpha)

    rows = []
    for t in cfg.times():
        rho = dephasing.evolve_exact(model, rho0, t, tol=cfg.tol)
        if cmap is not None:
            rho = pt_core.map_state_back(rho, cmap)
        rows.append(
            [t]
            + [f(rho[i, j]) for i in range(2) for j in range(2) for f in (np.real, np.imag)]
        )
    lines = _header("evolve", cfg, [f"# representation = {cfg.representation}"])
    lines.append(
        "t,"
        + ",".join(
            f"rho{i}{j}_{part}" for i in (1, 2) for j in (1, 2) for part in ("re", "im")
        )
    )
    for row in rows:
        lines.append(",".join(_fmt(v) for v in row))
    out = cfg.out or "evolve.csv"
    _write_atomic(out, "\n".join(lines) + "\n")
    print(f"wrote {out}")
    return 0


def cmd_oracle_compare(cfg: ScenarioConfig) -> int:
    _require_unbroken_alphas(cfg)
    bath = oracle.discretize_bath(
        cfg.spectral(), n_modes=cfg.modes, omega_max=cfg.omega_max, fock_dim=cfg.fock_dim
    )
    times = cfg.times()

    reports = [oracle.run_comparison(a, bath, cfg.beta, times) for a in cfg.alphas]
    pooled_c, pooled_resid = oracle.fit_decay_constant(
        np.concatenate([r.exponents for r in reports]),
        np.concatenate([r.brute_decoherence for r in reports]),
    )

    extra = [
        f"# modes = {cfg.modes} fock_dim = {cfg.fock_dim} omega_max = {_fmt(cfg.omega_max)}",
        f"# pooled fitted c = {_fmt(pooled_c)} pooled residual = {_fmt(pooled_resid)}",
    ]
    lines = _header("oracle-compare", cfg, extra)
    lines.append("alpha,t,exponent,D_analytic,D_brute,dev_D,dev_rho")
    for a, rep in zip(cfg.alphas, reports):
        for i, t in enumerate(rep.times):
            lines.append(
                ",".join(
                    [
                        _fmt(a),
                        _fmt(t),
                        _fmt(rep.exponents[i]),
                        _fmt(rep.analytic_decoherence[i]),
                        _fmt(rep.brute_decoherence[i]),
                        _fmt(rep.dev_decoherence[i]),
                        _fmt(rep.dev_rho[i]) if rep.dev_rho is not None else "",
                    ]
                )
            )
    out = cfg.out or "oracle_compare.csv"
    _write_atomic(out, "\n".join(lines) + "\n")

    ok = pooled_resid <= cfg.compare_tol
    status = "PASS" if ok else "FAIL"
    print(
        f"{status} fitted_c={_fmt(pooled_c)} residual={_fmt(pooled_resid)} "
        f"tolerance={_fmt(cfg.compare_tol)} max_abs_dev={_fmt(max(r.max_abs_dev for r in reports))} "
        f"fock_tail={_fmt(max(r.fock_tail for r in reports))}"
    )
    print(f"wrote {out}")
    return 0 if ok else FAILURE_EXIT


_COMMAND_DEFAULTS = {
    "spectrum": ScenarioConfig(alphas=(0.0, 0.5, 0.9, 1.0, 1.1, 1.5)),
    "figure1": ScenarioConfig(),
    "evolve": ScenarioConfig(alphas=(0.6,)),
    "oracle-compare": ScenarioConfig(
        alphas=(0.0, 0.6),
        j0=0.2,
        t_end=5.0,
        n_points=21,
    ),
}

_COMMANDS = {
    "spectrum": cmd_spectrum,
    "figure1": cmd_figure1,
    "evolve": cmd_evolve,
    "oracle-compare": cmd_oracle_compare,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = build_config(args, _COMMAND_DEFAULTS[args.command])
        return _COMMANDS[args.command](cfg)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return USAGE_EXIT
    except PtDecoError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return FAILURE_EXIT


if __name__ == "__main__":
    sys.exit(main())
