"""Command-line front end: worked-example reports, data synthesis, and the
HTTP service launcher.

Subcommands: ed-visits | facebook | storms | elicit-beta | synthesize-storms
| serve.  All reports are JSON and byte-identical across runs for a fixed
--seed.
"""
from __future__ import annotations

import argparse
import csv
import json
import math
import sys
from typing import Optional, Sequence

import numpy as np

from . import __version__
from .conjugate import (QuantileAssessment, beta_from_quantiles,
                        conjugate_predictive_pmf, gamma_poisson_update,
                        posterior_mean_decomposition)
from .discrete import credible_set, predictive_mass, update_table
from .distributions import Beta, Gamma, Normal, Poisson, RngStream, log_density, \
    mvn_sample, quantile
from .exceptions import PosteriorLabError
from .laplace import TwoGroupData, grid_marginal, laplace_fit, marginal, \
    transform_draws, two_group_log_posterior
from .mcmc import ChainConfig, ChangePointSpec, diagnostics, gibbs_changepoint, \
    mwg_changepoint
from .summaries import mc_expectation_of, mc_summary, ppc_mean_check

SCHEMA_VERSION = 1

# ED example data: n = 10 evening periods, total 31 visits, mean 3.1
DEFAULT_ED_COUNTS = (2, 4, 3, 4, 2, 3, 3, 4, 3, 3)
TABLE2_VALUES = (3.0, 3.5, 4.0, 4.5, 5.0)
TABLE2_PRIOR = (0.1, 0.2, 0.4, 0.2, 0.1)


class InputError(Exception):
    """Malformed command input; maps to exit code 2."""


# ---------------------------------------------------------------------------
# report builders (pure; also used by tests)


def ed_visits_report(alpha: float, beta: float, counts: Sequence[int],
                     draws: int, seed: int, levels: Sequence[float],
                     discrete: bool = False) -> dict:
    counts = list(counts)
    if not counts:
        raise InputError("counts: no data given")
    if any(c < 0 or int(c) != c for c in counts):
        raise InputError("counts: entries must be nonnegative integers")
    cp = gamma_poisson_update(alpha, beta, counts)
    post = cp.posterior_dist()
    exact = [round(quantile(post, p), 6) for p in levels]
    rng = RngStream(seed)
    lam = rng.generator.gamma(post.shape, 1.0 / post.rate, size=draws)
    summ = mc_summary(lam, levels)
    h = lambda x: math.exp(-x) * (1 + x + x * x / 2)  # Pr(y <= 2 | lambda)
    ppc = ppc_mean_check(post, n=len(counts), reps=1000,
                         observed_mean=float(np.mean(counts)),
                         rng=rng.substream(1))
    report = {
        "schema_version": SCHEMA_VERSION,
        "command": "ed-visits",
        "seed": seed,
        "data": {"n": len(counts), "sum_y": int(sum(counts)),
                 "mean": round(float(np.mean(counts)), 6)},
        "posterior": cp.to_json(),
        "posterior_mean": posterior_mean_decomposition(cp),
        "exact_interval": exact,
        "mc_interval": [round(summ.quantiles[levels[0]], 6),
                        round(summ.quantiles[levels[1]], 6)],
        "mc_mean": round(summ.mean, 6),
        "prob_at_most_two_visits": round(mc_expectation_of(h, lam), 6),
        "predictive_f0": round(conjugate_predictive_pmf(cp, 0), 6),
        "ppc": {"observed_mean": round(float(np.mean(counts)), 6),
                "tail_area": round(ppc.tail_area, 6)},
    }
    if discrete:
        n, sum_y = len(counts), sum(counts)
        table = update_table(TABLE2_VALUES, TABLE2_PRIOR,
                             lambda lam: -n * lam + sum_y * math.log(lam))
        vals95, cov95 = credible_set(table, 0.95)
        f0 = predictive_mass(
            table, lambda y, lam: math.exp(log_density(Poisson(lam), y)), 0)
        report["discrete"] = {
            "table": table.to_json(),
            "credible_set_95": {"values": vals95, "coverage": round(cov95, 6)},
            "predictive_f0": round(f0, 6),
        }
        report["predictive_f0"] = round(f0, 6)
    return report


def facebook_report(ym: int, nm: int, yw: int, nw: int, method: str,
                    seed: int, draws: int = 100_000) -> dict:
    try:
        data = TwoGroupData(ym, nm, yw, nw)
    except ValueError as e:
        raise InputError(str(e)) from e
    if method not in ("laplace", "grid", "both"):
        raise InputError(f"method must be laplace|grid|both, got {method}")
    lp = two_group_log_posterior(data)
    fit = laplace_fit(lp, [0.0, 0.0])
    beta1 = marginal(fit, [0.0, 1.0])
    rng = RngStream(seed)
    b = mvn_sample(fit.mode, fit.cov, rng, draws)
    pw = transform_draws(b, lambda t: 1.0 / (1.0 + math.exp(-(t[0] + t[1]))))
    pw_sum = mc_summary(pw, [0.05, 0.95])
    report = {
        "schema_version": SCHEMA_VERSION,
        "command": "facebook",
        "seed": seed,
        "data": {"y_m": ym, "n_m": nm, "y_w": yw, "n_w": nw},
        "laplace": {
            "mode": [round(v, 6) for v in fit.mode],
            "cov": [[round(v, 6) for v in row] for row in fit.cov],
        },
        "beta1_marginal": {"mean": round(beta1.mean, 6), "sd": round(beta1.sd, 6)},
        "p_w": {"mean": round(pw_sum.mean, 6), "sd": round(pw_sum.sd, 6),
                "interval90": [round(pw_sum.quantiles[0.05], 6),
                               round(pw_sum.quantiles[0.95], 6)]},
    }
    if method in ("grid", "both"):
        gm = grid_marginal(lp, [(-3.0, 2.0), (-2.0, 3.0)], steps=400, coord=1)
        mean = float(gm.probs @ gm.grid)
        third = float(gm.probs @ (gm.grid - mean) ** 3)
        report["grid_marginal_beta1"] = {
            "mean": round(mean, 6),
            "mode_at": round(float(gm.grid[int(np.argmax(gm.probs))]), 6),
            "third_central_moment": round(third, 8),
            "right_skewed": third > 0,
        }
    return report


def read_count_series(path: str) -> tuple[list[Optional[int]], list[int]]:
    """Parse a `year,count` CSV (UTF-8, LF, header required)."""
    years: list[Optional[int]] = []
    counts: list[int] = []
    try:
        with open(path, newline="", encoding="utf-8") as fh:
            reader = csv.DictReader(fh)
            if reader.fieldnames is None or "count" not in reader.fieldnames:
                raise InputError(f"{path}: expected a header with a 'count' column")
            for row in reader:
                try:
                    counts.append(int(row["count"]))
                except (TypeError, ValueError):
                    raise InputError(f"{path}: count: bad value {row.get('count')!r}")
                if counts[-1] < 0:
                    raise InputError(f"{path}: count: negative value {counts[-1]}")
                if "year" in row and row["year"] not in (None, ""):
                    years.append(int(row["year"]))
                else:
                    years.append(None)
    except OSError as e:
        raise InputError(f"input: {e}") from e
    return years, counts


def storms_report(years: Sequence[Optional[int]], counts: Sequence[int],
                  sampler: str, hyper: dict, C: float,
                  cfg: ChainConfig) -> dict:
    if len(counts) < 2:
        raise InputError("counts: need at least 2 observations")
    y = np.asarray(counts)
    if sampler == "gibbs":
        spec = ChangePointSpec(y=y, prior1=Gamma(hyper["alpha1"], hyper["beta1"]),
                               prior2=Gamma(hyper["alpha2"], hyper["beta2"]))
        chain = gibbs_changepoint(spec, cfg, RngStream(cfg.seed))
    elif sampler == "mwg":
        spec = ChangePointSpec(y=y, prior1=Normal(hyper["mu"], hyper["sigma"]),
                               prior2=Gamma(hyper["alpha2"], hyper["beta2"]))
        chain = mwg_changepoint(spec, C, cfg, RngStream(cfg.seed))
    else:
        raise InputError(f"sampler must be gibbs|mwg, got {sampler}")
    params = {}
    for name in chain.param_names:
        col = chain.column(name)
        s = mc_summary(col, [0.05, 0.95])
        diag = diagnostics(chain, name, max_lag=min(50, cfg.iter // 10))
        params[name] = {
            "mean": round(s.mean, 6), "sd": round(s.sd, 6),
            "interval90": [round(s.quantiles[0.05], 6), round(s.quantiles[0.95], 6)],
            "ess": round(diag["ess"], 2),
            "acceptance_rate": (round(diag["acceptance_rate"], 6)
                                if diag["acceptance_rate"] is not None else None),
        }
    m_draws = chain.column("M").astype(int)
    m_mode = int(np.bincount(m_draws).argmax())
    report = {
        "schema_version": SCHEMA_VERSION,
        "command": "storms",
        "seed": cfg.seed,
        "sampler": sampler,
        "n": int(y.size),
        "params": params,
        "M_mode": m_mode,
    }
    if years and years[0] is not None:
        report["M_mode_year"] = int(years[m_mode - 1])
    if sampler == "mwg":
        report["accept_rate_lambda1"] = params["lambda1"]["acceptance_rate"]
    return report


def elicit_beta_report(median: float, p90: float) -> dict:
    if not (0.0 < median < p90 < 1.0):
        raise InputError(f"need 0 < median < p90 < 1, got ({median}, {p90})")
    try:
        a, b = beta_from_quantiles(QuantileAssessment(0.5, median, 0.9, p90))
    except (ValueError, PosteriorLabError) as e:
        raise InputError(str(e)) from e
    d = Beta(a, b)
    return {
        "schema_version": SCHEMA_VERSION,
        "command": "elicit-beta",
        "a": round(a, 6),
        "b": round(b, 6),
        "intervals": {
            "central50": [round(quantile(d, 0.25), 6), round(quantile(d, 0.75), 6)],
            "central90": [round(quantile(d, 0.05), 6), round(quantile(d, 0.95), 6)],
        },
    }


def synthesize_storms(n: int, change_at: int, rate1: float, rate2: float,
                      seed: int, start_year: int = 1851) -> list[tuple[int, int]]:
    if not (1 <= change_at < n):
        raise InputError(f"change_at must be in 1..{n - 1}")
    g = RngStream(seed).generator
    counts = np.concatenate([g.poisson(rate1, change_at),
                             g.poisson(rate2, n - change_at)])
    return [(start_year + i, int(c)) for i, c in enumerate(counts)]


# ---------------------------------------------------------------------------
# argparse wiring


def _emit(report: dict, output: Optional[str]) -> None:
    text = json.dumps(report, sort_keys=True, indent=2) + "\n"
    if output:
        with open(output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _parse_counts(s: str) -> list[int]:
    try:
        return [int(tok) for tok in s.replace(",", " ").split()]
    except ValueError:
        raise InputError(f"counts: could not parse {s!r}")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=42)
    common.add_argument("--output", type=str, default=None)
    common.add_argument("--format", choices=["json"], default="json")

    p = argparse.ArgumentParser(prog="posteriorlab",
                                description="Bayesian computation toolkit")
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="cmd", required=True)

    ed = sub.add_parser("ed-visits", parents=[common],
                        help="gamma-Poisson analysis of emergency-department visit counts")
    ed.add_argument("--alpha", type=float, default=80.0)
    ed.add_argument("--beta", type=float, default=20.0)
    ed.add_argument("--counts", type=str, default=None,
                    help="inline comma- or space-separated counts")
    ed.add_argument("--data-file", type=str, default=None,
                    help="CSV with a count column")
    ed.add_argument("--draws", type=int, default=100_000)
    ed.add_argument("--levels", type=str, default="0.05,0.95")
    ed.add_argument("--discrete", action="store_true",
                    help="add the five-point discrete-prior analysis")

    fb = sub.add_parser("facebook", parents=[common],
                        help="two-group logistic model via Laplace and/or grid")
    fb.add_argument("--ym", type=int, default=8)
    fb.add_argument("--nm", type=int, default=30)
    fb.add_argument("--yw", type=int, default=15)
    fb.add_argument("--nw", type=int, default=30)
    fb.add_argument("--method", choices=["laplace", "grid", "both"],
                    default="laplace")

    st = sub.add_parser("storms", parents=[common],
                        help="change-point analysis of yearly storm counts")
    st.add_argument("--input", type=str, required=True)
    st.add_argument("--sampler", choices=["gibbs", "mwg"], default="gibbs")
    st.add_argument("--alpha1", type=float, default=1.0)
    st.add_argument("--beta1", type=float, default=1.0)
    st.add_argument("--alpha2", type=float, default=1.0)
    st.add_argument("--beta2", type=float, default=1.0)
    st.add_argument("--mu", type=float, default=4.0)
    st.add_argument("--sigma", type=float, default=2.0)
    st.add_argument("--C", type=float, default=2.0)
    st.add_argument("--iter", type=int, default=2000)
    st.add_argument("--burnin", type=int, default=1000)
    st.add_argument("--thin", type=int, default=1)
    st.add_argument("--chains", type=int, default=1)

    el = sub.add_parser("elicit-beta", parents=[common],
                        help="beta prior from a stated median and 90th percentile")
    el.add_argument("--median", type=float, required=True)
    el.add_argument("--p90", type=float, required=True)

    sy = sub.add_parser("synthesize-storms", parents=[common],
                        help="generate Poisson change-point demo data as CSV")
    sy.add_argument("--n", type=int, default=165)
    sy.add_argument("--change-at", type=int, default=40)
    sy.add_argument("--rate1", type=float, default=4.0)
    sy.add_argument("--rate2", type=float, default=8.0)
    sy.add_argument("--start-year", type=int, default=1851)

    sv = sub.add_parser("serve", parents=[common], help="run the HTTP service")
    sv.add_argument("--port", type=int, default=None)
    sv.add_argument("--bind", type=str, default=None)
    return p


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.cmd == "ed-visits":
            if args.counts:
                counts = _parse_counts(args.counts)
            elif args.data_file:
                _, counts = read_count_series(args.data_file)
            else:
                counts = list(DEFAULT_ED_COUNTS)
            levels = [float(t) for t in args.levels.split(",")]
            if len(levels) != 2 or not all(0 < p < 1 for p in levels):
                raise InputError(f"levels: expected two probabilities, got {args.levels}")
            report = ed_visits_report(args.alpha, args.beta, counts, args.draws,
                                      args.seed, levels, discrete=args.discrete)
            _emit(report, args.output)
        elif args.cmd == "facebook":
            report = facebook_report(args.ym, args.nm, args.yw, args.nw,
                                     args.method, args.seed)
            _emit(report, args.output)
        elif args.cmd == "storms":
            years, counts = read_count_series(args.input)
            cfg = ChainConfig(iter=args.iter, burnin=args.burnin, thin=args.thin,
                              n_chains=args.chains, seed=args.seed)
            hyper = {"alpha1": args.alpha1, "beta1": args.beta1,
                     "alpha2": args.alpha2, "beta2": args.beta2,
                     "mu": args.mu, "sigma": args.sigma}
            report = storms_report(years, counts, args.sampler, hyper, args.C, cfg)
            _emit(report, args.output)
        elif args.cmd == "elicit-beta":
            _emit(elicit_beta_report(args.median, args.p90), args.output)
        elif args.cmd == "synthesize-storms":
            rows = synthesize_storms(args.n, args.change_at, args.rate1,
                                     args.rate2, args.seed, args.start_year)
            lines = ["year,count"] + [f"{y},{c}" for y, c in rows]
            text = "\n".join(lines) + "\n"
            if args.output:
                with open(args.output, "w", encoding="utf-8") as fh:
                    fh.write(text)
            else:
                sys.stdout.write(text)
        elif args.cmd == "serve":
            from .service import run_server
            return run_server(port=args.port, bind=args.bind)
    except InputError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except ValueError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
