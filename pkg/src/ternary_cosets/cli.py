"""Command line interface.

Exit codes: 0 success, 1 identity violation, 2 bad input, 3 conductor
mismatch, 4 invalid prime, 5 disagreement between spinor validation runs.
"""

from __future__ import annotations

import argparse
import json
import sys

from .cache import ClassListCache
from .cosets import ConductorMismatch, Coset, SchemaError, coset_from_json
from .decomposition import decompose, verify_eichler, verify_genus_eigen
from .enumeration import default_precision, short_vectors, theta_series
from .isometry import ClassIndex
from .neighbors import (
    InvalidPrime,
    check_prime,
    enumerate_classes,
    enumerate_genus,
    neighbors,
    pi_closed_form,
    pi_count,
    validate,
)

EXIT_OK, EXIT_VIOLATION, EXIT_SCHEMA, EXIT_CONDUCTOR, EXIT_PRIME, EXIT_DISAGREE = 0, 1, 2, 3, 4, 5


class ValidationDisagreement(Exception):
    def __init__(self, payload):
        self.payload = payload
        super().__init__("spinor class lists disagree between primes")


def good_primes(c: Coset, count: int, one_mod_a: bool = False) -> list[int]:
    out = []
    p = 2
    while len(out) < count:
        if c.is_good_prime(p) and (not one_mod_a or p % c.a == 1 % c.a):
            out.append(p)
        p += 1
    return out


def default_spinor_primes(c: Coset) -> tuple[int, int]:
    p, q = good_primes(c, 2, one_mod_a=True)
    return p, q


def default_genus_primes(c: Coset) -> list[int]:
    p, q = default_spinor_primes(c)
    out = [p, q]
    for r in good_primes(c, 4):
        if r not in out:
            out.append(r)
    return out


def load_coset(path: str) -> Coset:
    try:
        if path == "-":
            data = json.load(sys.stdin)
        else:
            with open(path) as fh:
                data = json.load(fh)
    except OSError as e:
        raise SchemaError(f"cannot read {path}: {e}") from None
    except json.JSONDecodeError as e:
        raise SchemaError(f"invalid JSON: {e}") from None
    return coset_from_json(data)


def _emit(obj) -> None:
    sys.stdout.write(json.dumps(obj, indent=2, sort_keys=True) + "\n")


def _genus(c: Coset, primes, cache: ClassListCache, index: ClassIndex):
    cl = cache.get(c, "genus", primes)
    if cl is None:
        cl = enumerate_genus(c, primes, index)
        cache.put(c, "genus", primes, cl)
    return cl


def _spinor(c: Coset, prime: int, val_primes, cache: ClassListCache, index: ClassIndex):
    tag = [prime] + list(val_primes)
    cl = cache.get(c, "spinor-candidate", tag)
    if cl is not None:
        return cl
    if val_primes:
        res = validate(c, tag, index)
        if not res.agree:
            raise ValidationDisagreement({str(p): r.to_json() for p, r in res.runs.items()})
        cl = res.runs[prime]
        cl.validated_with = list(val_primes)
    else:
        cl = enumerate_classes(c, prime, index)
    cache.put(c, "spinor-candidate", tag, cl)
    return cl


def cmd_theta(args) -> int:
    c = load_coset(args.coset)
    B = args.precision if args.precision is not None else default_precision(c)
    _emit(theta_series(c, B).to_json())
    return EXIT_OK


def _spinor_args(c: Coset, args) -> tuple[int, list[int]]:
    if args.primes:
        prime = args.primes[0]
        vals = list(args.primes[1:]) + list(args.validate or [])
    else:
        p, q = default_spinor_primes(c)
        prime = p
        vals = list(args.validate) if args.validate is not None else [q]
    return prime, vals


def cmd_genus(args) -> int:
    c = load_coset(args.coset)
    primes = args.primes or default_genus_primes(c)
    for p in primes:
        check_prime(c, p)
    cl = _genus(c, primes, ClassListCache(enabled=not args.no_cache), ClassIndex())
    _emit(cl.to_json())
    return EXIT_OK


def cmd_spinor(args) -> int:
    c = load_coset(args.coset)
    prime, vals = _spinor_args(c, args)
    for p in [prime] + vals:
        check_prime(c, p)
    cl = _spinor(c, prime, vals, ClassListCache(enabled=not args.no_cache), ClassIndex())
    _emit(cl.to_json())
    return EXIT_OK


def cmd_decompose(args) -> int:
    c = load_coset(args.coset)
    B = args.precision if args.precision is not None else default_precision(c)
    gprimes = args.genus_primes or default_genus_primes(c)
    prime, vals = _spinor_args(c, args)
    for p in gprimes + [prime] + vals:
        check_prime(c, p)
    cache = ClassListCache(enabled=not args.no_cache)
    index = ClassIndex()
    genus = _genus(c, gprimes, cache, index)
    spinor = _spinor(c, prime, vals, cache, index)
    rep = decompose(c, genus, spinor, B, fit=args.fit_unary, index=index)
    out = rep.to_json()
    out["passed"] = rep.passed
    _emit(out)
    return EXIT_OK if rep.passed else EXIT_VIOLATION


def _verify_prime(c: Coset, args) -> int:
    if args.prime is not None:
        return args.prime
    return good_primes(c, 1)[0]


def cmd_verify(args) -> int:
    c = load_coset(args.coset)
    p = _verify_prime(c, args)
    check_prime(c, p)
    if args.check == "eichler":
        B = args.precision if args.precision is not None else default_precision(c)
        rep = verify_eichler(c, p, B)
        out, ok = rep.to_json(), rep.passed
    elif args.check == "genus-eigen":
        B = args.precision if args.precision is not None else default_precision(c)
        primes = args.primes or default_genus_primes(c)
        for q in primes:
            check_prime(c, q)
        cl = _genus(c, primes, ClassListCache(enabled=not args.no_cache), ClassIndex())
        rep = verify_genus_eigen(cl, p, B)
        out, ok = rep.to_json(), rep.passed
    elif args.check == "neighbor-count":
        ns = neighbors(c, p)
        ok = len(ns) == p + 1 and len({m.key for m in ns}) == p + 1
        out = {"check": "neighbor-count", "prime": p, "count": len(ns), "expected": p + 1, "passed": ok}
    else:  # pi-counts
        nmax = args.precision if args.precision is not None else 10
        ns = neighbors(c, p)
        rows, ok = [], True
        for x in short_vectors(c, p * p * nmax):
            q = c.Q(x)
            if q % (p * p):
                continue
            got, want = pi_count(x, c, p, ns), pi_closed_form(x, c, p)
            ok = ok and got == want
            rows.append({"x": list(x), "n": q // (p * p), "count": got, "closed_form": want})
        bad = [r for r in rows if r["count"] != r["closed_form"]]
        out = {"check": "pi-counts", "prime": p, "max_n": nmax, "vectors": len(rows), "violations": bad, "passed": ok}
    _emit(out)
    return EXIT_OK if ok else EXIT_VIOLATION


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ternary-cosets", description="Theta series and classes of ternary lattice cosets.")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_coset(sp):
        sp.add_argument("coset", help='JSON file {"gram": [[...]], "a": int, "nu": [...]}, or - for stdin')

    sp = sub.add_parser("theta", help="theta series of a coset")
    add_coset(sp)
    sp.add_argument("--precision", "-B", type=int)
    sp.set_defaults(func=cmd_theta)

    sp = sub.add_parser("genus", help="proper classes in the genus")
    add_coset(sp)
    sp.add_argument("--primes", type=int, nargs="+")
    sp.add_argument("--no-cache", action="store_true")
    sp.set_defaults(func=cmd_genus)

    sp = sub.add_parser("spinor", help="proper classes in the spinor genus")
    add_coset(sp)
    sp.add_argument("--primes", type=int, nargs="+", help="neighbor prime(s), 1 mod a; extra primes validate")
    sp.add_argument("--validate", type=int, nargs="*")
    sp.add_argument("--no-cache", action="store_true")
    sp.set_defaults(func=cmd_spinor)

    sp = sub.add_parser("decompose", help="theta = E + U + f")
    add_coset(sp)
    sp.add_argument("--precision", "-B", type=int)
    sp.add_argument("--fit-unary", action="store_true")
    sp.add_argument("--genus-primes", type=int, nargs="+")
    sp.add_argument("--primes", type=int, nargs="+", help="spinor neighbor prime(s)")
    sp.add_argument("--validate", type=int, nargs="*")
    sp.add_argument("--no-cache", action="store_true")
    sp.set_defaults(func=cmd_decompose)

    sp = sub.add_parser("verify", help="check an identity")
    add_coset(sp)
    sp.add_argument("--check", required=True, choices=["eichler", "genus-eigen", "pi-counts", "neighbor-count"])
    sp.add_argument("--prime", "-p", type=int)
    sp.add_argument("--precision", "-B", type=int)
    sp.add_argument("--primes", type=int, nargs="+", help="genus enumeration primes (genus-eigen)")
    sp.add_argument("--no-cache", action="store_true")
    sp.set_defaults(func=cmd_verify)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except SchemaError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_SCHEMA
    except ConductorMismatch as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_CONDUCTOR
    except InvalidPrime as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_PRIME
    except ValidationDisagreement as e:
        _emit({"error": str(e), "runs": e.payload})
        return EXIT_DISAGREE


if __name__ == "__main__":
    sys.exit(main())
