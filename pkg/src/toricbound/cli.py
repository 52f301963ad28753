"""Command-line front end.

Settings come from built-in defaults, then an optional JSON config file,
then the ``TORICBOUND_RESOURCE_CAP`` environment variable, then flags; later
sources win. Every command prints sorted-key JSON and exits with the code of
the error family that stopped it (0 on success).
"""

from __future__ import annotations

import argparse
import json
import os
import random
import sys
from dataclasses import dataclass, replace
from fractions import Fraction
from typing import Optional

from toricbound.cones import (
    DEFAULT_HILBERT_CAP,
    DEFAULT_MAX_CANDIDATES,
    SHAPES,
    compute_bounds,
    default_D,
    format_rational,
    lower_bounds,
    parse_rational,
    sq_norm,
)
from toricbound.decompose import (
    DEFAULT_MAX_DEPTH,
    certificate_from_json,
    certificate_to_json,
    decompose,
    dumps,
    verify_certificate,
)
from toricbound.errors import BoundExceeded, ConfigError, DecompositionError, ToricError
from toricbound.monomials import (
    DEFAULT_ENUM_LIMIT,
    enumerate_pn_variables,
    format_monomial,
    parse_binomial,
    parse_monomial,
    random_invariant_monomial,
    weight_matrix,
)
from toricbound.oracle import DEFAULT_PRODUCT_LIMIT, markov_degree_upper
from toricbound.rearrange import apply_permutations, column_sums, steinitz_rearrange
from toricbound.repspec import TorusRep, rep_from_json

RESOURCE_ENV = "TORICBOUND_RESOURCE_CAP"


@dataclass(frozen=True)
class RunConfig:
    rep: Optional[TorusRep] = None
    D: Optional[Fraction] = None
    shape: str = "pairs"
    hilbert_cap: int = DEFAULT_HILBERT_CAP
    max_candidates: int = DEFAULT_MAX_CANDIDATES
    enum_limit: int = DEFAULT_ENUM_LIMIT
    product_limit: int = DEFAULT_PRODUCT_LIMIT
    max_depth: int = DEFAULT_MAX_DEPTH
    output: Optional[str] = None

    def validate(self) -> "RunConfig":
        for name in ("hilbert_cap", "max_candidates", "enum_limit", "product_limit", "max_depth"):
            value = getattr(self, name)
            if isinstance(value, bool) or not isinstance(value, int) or value < 1:
                raise ConfigError(f"{name} must be a positive integer")
        if self.D is not None and self.D <= 0:
            raise ConfigError("D must be positive")
        if self.shape not in SHAPES:
            raise ConfigError(f"shape must be one of {', '.join(SHAPES)}")
        return self

    def need_rep(self) -> TorusRep:
        if self.rep is None:
            raise ConfigError("no representation given (use --rep or a config file)")
        return self.rep

    @property
    def effective_D(self) -> Fraction:
        return self.D if self.D is not None else default_D(self.need_rep())


def _read_json(path):
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read {path}: {exc}") from exc


def _resource_override(config: RunConfig, value) -> RunConfig:
    try:
        cap = int(value)
    except (TypeError, ValueError):
        raise ConfigError(f"resource cap must be an integer, got {value!r}") from None
    return replace(config, max_candidates=cap, enum_limit=cap, product_limit=cap)


def load_config(args, environ=None) -> RunConfig:
    environ = os.environ if environ is None else environ
    config = RunConfig()
    if args.config:
        data = _read_json(args.config)
        if not isinstance(data, dict):
            raise ConfigError("config file must hold a JSON object")
        caps = data.get("caps", {})
        if not isinstance(caps, dict):
            raise ConfigError("'caps' must be an object")
        config = replace(
            config,
            rep=rep_from_json(data["rep"]) if "rep" in data else None,
            D=parse_rational(data["D"]) if data.get("D") is not None else None,
            shape=data.get("shape", config.shape),
            hilbert_cap=caps.get("hilbert", config.hilbert_cap),
            max_candidates=caps.get("candidates", config.max_candidates),
            enum_limit=caps.get("enumeration", config.enum_limit),
            product_limit=caps.get("products", config.product_limit),
            max_depth=caps.get("recursion", config.max_depth),
            output=data.get("output"),
        )
    if environ.get(RESOURCE_ENV):
        config = _resource_override(config, environ[RESOURCE_ENV])
    if args.rep:
        data = _read_json(args.rep)
        config = replace(config, rep=rep_from_json(data.get("rep", data) if isinstance(data, dict) else data))
    flags = {"D": args.D and parse_rational(args.D), "shape": args.shape,
             "hilbert_cap": args.hilbert_cap, "max_candidates": args.max_candidates,
             "enum_limit": args.enum_limit, "max_depth": args.max_depth,
             "output": getattr(args, "output", None)}
    config = replace(config, **{k: v for k, v in flags.items() if v is not None})
    return config.validate()


def _bounds(config: RunConfig):
    return compute_bounds(config.need_rep(), config.D, config.hilbert_cap,
                          config.shape, config.max_candidates)


# ------------------------------------------------------------------ commands

def cmd_bounds(config: RunConfig, lower: bool = False) -> dict:
    rep = config.need_rep()
    if lower:
        return lower_bounds(rep, config.D, shape=config.shape,
                            max_candidates=config.max_candidates).to_json()
    return _bounds(config).to_json()


def cmd_generators(config: RunConfig, n: int, dcap: int) -> list:
    if n < 1 or dcap < 1:
        raise ConfigError("n and dcap must be positive")
    return [format_monomial(f) for f in
            enumerate_pn_variables(config.need_rep(), n, dcap, config.enum_limit)]


def cmd_decompose(config: RunConfig, text: str, base_degree=None, fast_path=True):
    rep = config.need_rep()
    b = parse_binomial(rep, text)
    cert = decompose(b, _bounds(config), base_degree=base_degree, fast_path=fast_path,
                     max_depth=config.max_depth)
    summary = {"steps": len(cert.steps), "max_step_degree": cert.max_step_degree,
               "bound": cert.bound, "verified": bool(verify_certificate(cert))}
    return cert, summary


def cmd_verify(path: str) -> dict:
    cert = certificate_from_json(_read_json(path))
    verdict = verify_certificate(cert)
    return {"ok": verdict.ok, "reason": verdict.reason, "detail": verdict.detail}


def cmd_rearrange_check(config: RunConfig, samples: int, seed: int,
                        max_n: int, max_d: int) -> dict:
    rep = config.need_rep()
    D = config.effective_D
    rng = random.Random(seed)
    worst, failures, done = 0, 0, 0
    while done < samples:
        f = random_invariant_monomial(rep, rng.randint(1, max_n), rng.randint(1, max_d), rng)
        if f is None:
            continue
        done += 1
        W = weight_matrix(f)
        try:
            arranged = apply_permutations(W, steinitz_rearrange(W, D))
            worst = max(worst, max(sq_norm(c) for c in column_sums(arranged)))
        except BoundExceeded as exc:
            failures += 1
            worst = max(worst, exc.best_sq_norm)
    return {"D": format_rational(D), "samples": samples, "seed": seed,
            "max_sq_norm": worst, "D_squared": format_rational(D * D),
            "failures": failures, "ok": failures == 0 and worst <= D * D}


def cmd_rearrange_one(config: RunConfig, text: str) -> dict:
    f = parse_monomial(config.need_rep(), text)
    W = weight_matrix(f)
    perms = steinitz_rearrange(W, config.effective_D)
    arranged = apply_permutations(W, perms)
    names = config.rep.names
    rows = [" ".join(names[f.rows[i][p]] for p in perm) for i, perm in enumerate(perms)]
    return {"D": format_rational(config.effective_D), "rows": rows,
            "column_sums": [list(c) for c in column_sums(arranged)],
            "max_sq_norm": max((sq_norm(c) for c in column_sums(arranged)), default=0)}


def cmd_oracle_check(config: RunConfig, n: int, caps, lower: bool = False) -> dict:
    rep = config.need_rep()
    if n < 1 or min(caps) < 1:
        raise ConfigError("n and caps must be positive")
    if lower:
        bound = lower_bounds(rep, config.D, shape=config.shape,
                             max_candidates=config.max_candidates).d1
    else:
        bound = _bounds(config).d1
    s = markov_degree_upper(rep, n, tuple(caps), limit=config.product_limit)
    return {"n": n, "caps": list(caps), "markov_degree": s, "bound_d1": bound,
            "bound_is_lower": lower, "ok": s <= bound}


# ----------------------------------------------------------------- plumbing

def _common() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--config", help="JSON run configuration")
    p.add_argument("--rep", help="JSON representation file")
    p.add_argument("--D", help="column-sum bound, e.g. 3/2")
    p.add_argument("--shape", choices=SHAPES, help="column cone generator shape")
    p.add_argument("--hilbert-cap", type=int, help="coordinate-sum cap for Hilbert bases")
    p.add_argument("--max-candidates", type=int, help="candidate cap for Hilbert completion")
    p.add_argument("--enum-limit", type=int, help="cap on enumerated variables")
    p.add_argument("--max-depth", type=int, help="recursion cap for decompose")
    return p


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    parser = argparse.ArgumentParser(prog="toricbound", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("bounds", parents=[common], help="compute D, d0, n0, d1")
    p.add_argument("--lower", action="store_true", help="certified lower bounds only")

    p = sub.add_parser("generators", parents=[common], help="list P_n variables")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--dcap", type=int, required=True)

    p = sub.add_parser("decompose", parents=[common], help="certificate for a relation")
    p.add_argument("binomial", help="relation text, e.g. '(x|y)(y|x) = (x*y|x*y)'")
    p.add_argument("--output", "-o", help="write the certificate here")
    p.add_argument("--base-degree", type=int, help="stop recursing at this degree (default d1)")
    p.add_argument("--no-fast-path", action="store_true")

    p = sub.add_parser("verify", help="replay a certificate file")
    p.add_argument("certificate")

    p = sub.add_parser("rearrange", parents=[common], help="bounded column-sum rearrangement")
    p.add_argument("monomial", nargs="?", help="monomial text to rearrange")
    p.add_argument("--check", action="store_true", help="stress-test D on random matrices")
    p.add_argument("--samples", type=int, default=200)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--max-n", type=int, default=5)
    p.add_argument("--max-d", type=int, default=10)

    p = sub.add_parser("oracle-check", parents=[common], help="Markov degree vs d1")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--caps", type=int, nargs=2, required=True, metavar=("FACTORS", "DCAP"))
    p.add_argument("--lower", action="store_true", help="compare against certified lower d1")
    return parser


def _emit(obj, out=None):
    out = out or sys.stdout
    out.write(dumps(obj))


def run(argv=None, environ=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "verify":
            report = cmd_verify(args.certificate)
            _emit(report)
            return 0 if report["ok"] else DecompositionError.exit_code
        config = load_config(args, environ)
        if args.command == "bounds":
            _emit(cmd_bounds(config, args.lower))
        elif args.command == "generators":
            _emit(cmd_generators(config, args.n, args.dcap))
        elif args.command == "decompose":
            cert, summary = cmd_decompose(config, args.binomial, args.base_degree,
                                          not args.no_fast_path)
            payload = certificate_to_json(cert)
            if config.output:
                with open(config.output, "w", encoding="utf-8") as fh:
                    fh.write(dumps(payload))
                _emit(summary)
            else:
                _emit(payload)
                _emit(summary, sys.stderr)
        elif args.command == "rearrange":
            if args.check:
                report = cmd_rearrange_check(config, args.samples, args.seed,
                                             args.max_n, args.max_d)
                _emit(report)
                return 0 if report["ok"] else BoundExceeded.exit_code
            if not args.monomial:
                raise ConfigError("give a monomial or --check")
            _emit(cmd_rearrange_one(config, args.monomial))
        elif args.command == "oracle-check":
            _emit(cmd_oracle_check(config, args.n, args.caps, args.lower))
    except ToricError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


def main(argv=None):
    sys.exit(run(argv))


if __name__ == "__main__":
    main()
