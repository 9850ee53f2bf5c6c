"""Command-line entry point.

    qdrin [--bits N] [--seed N] [--cap-*] <group> <command> [options]

Every command is also available as a pipeline step ``"group.command"``; a
pipeline spec is JSON of the form

    {"seed": 0, "precision_bits": 128, "caps": {...},
     "steps": [{"command": "drinfeld.torsion", "args": {...}}, ...]}

Inside ``args`` a value ``{"$step": i, "path": "image"}`` is replaced by the
named part of the output of step ``i``.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
import time
from contextlib import contextmanager
from fractions import Fraction
from pathlib import Path

import mpmath

from . import __version__, algebraic
from .drinfeld import DEFAULT_FIELD_CAP, DrinfeldModule, find_isogeny, galois_image, torsion
from .errors import CapExceeded, QdrinError, ValidationError
from .functor_f import (
    DEFAULT_CONVENTION,
    IsogenyTuple,
    RMTorusImage,
    f_object,
    isogeny_act,
    verify_substitution,
)
from .nctorus import K0Lattice, ThetaMatrix, endomorphism_order, morita_search, quadratic_class
from .quadorders import (
    DEFAULT_BOUND,
    DEFAULT_CONDUCTOR_BOUND,
    QuadOrder,
    class_group,
    fundamental_unit,
    match_conductor,
)
from .quantum import VarietyDescriptor, k_generators, min_poly_guess, q_invariant

EXIT_OK, EXIT_ERROR, EXIT_VALIDATION, EXIT_CAP, EXIT_INCONCLUSIVE = 0, 1, 2, 3, 4
DEFAULT_BITS = 128


class Context:
    def __init__(self, bits=None, seed=0, caps=None):
        env = os.environ.get("QDRIN_PRECISION_BITS")
        if bits is None:
            bits = int(env) if env else DEFAULT_BITS
        self.bits = int(bits)
        self.seed = int(seed)
        self.caps = {"field": DEFAULT_FIELD_CAP, "degree": algebraic.DEGREE_CAP,
                     "bound": DEFAULT_BOUND, "conductor": DEFAULT_CONDUCTOR_BOUND}
        self.caps.update({k: int(v) for k, v in (caps or {}).items() if v is not None})
        unknown = set(self.caps) - {"field", "degree", "bound", "conductor"}
        if unknown:
            raise ValidationError(f"unknown caps {sorted(unknown)}")
        self.inconclusive = False

    @contextmanager
    def applied(self):
        old = algebraic.DEGREE_CAP
        algebraic.DEGREE_CAP = self.caps["degree"]
        try:
            yield self
        finally:
            algebraic.DEGREE_CAP = old


# ---------------------------------------------------------------------------
# JSON helpers


def _load(value):
    """A JSON object given inline, as a JSON string, or as a path to a file."""
    if isinstance(value, (dict, list)):
        return value
    if not isinstance(value, str):
        raise ValidationError(f"expected a JSON object or file, got {value!r}")
    text = value.strip()
    if text.startswith("{") or text.startswith("["):
        src = text
    else:
        try:
            src = Path(value).read_text()
        except OSError as exc:
            raise ValidationError(f"cannot read {value}: {exc}") from None
    try:
        return json.loads(src)
    except json.JSONDecodeError as exc:
        raise ValidationError(f"invalid JSON in {value}: {exc}") from None


def _num(x, bits: int):
    digits = max(15, int(bits * 0.30103))
    if isinstance(x, mpmath.mpc):
        return {"re": mpmath.nstr(x.real, digits), "im": mpmath.nstr(x.imag, digits), "bits": bits}
    return {"value": mpmath.nstr(x, digits), "bits": bits}


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items() if not str(k).startswith("_")}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, Fraction):
        return str(obj)
    if isinstance(obj, (mpmath.mpf, mpmath.mpc)):
        return _num(obj, mpmath.mp.prec)
    if hasattr(obj, "to_json"):
        return _jsonable(obj.to_json())
    return obj


def _module(args) -> DrinfeldModule:
    return DrinfeldModule.from_json(_load(_get(args, "module")))


def _get(args: dict, key: str, default=...):
    if key in args and args[key] is not None:
        return args[key]
    if default is ...:
        raise ValidationError(f"missing argument {key!r}")
    return default


def _tuple(value) -> IsogenyTuple:
    if isinstance(value, (list, tuple)):
        return IsogenyTuple(tuple(value))
    if isinstance(value, dict):
        return IsogenyTuple(tuple(value["m"]))
    return IsogenyTuple.parse(str(value))


def _image(value) -> RMTorusImage:
    obj = _load(value)
    if "image" in obj and "lattice" not in obj:
        obj = obj["image"]
    return RMTorusImage.from_json(obj)


# ---------------------------------------------------------------------------
# commands: each takes (args, ctx) and returns a JSON-ready dict


def cmd_drinfeld_torsion(args, ctx):
    D = _module(args)
    a = D.A(str(_get(args, "a")))
    tm = torsion(D, a, cap=ctx.caps["field"], seed=ctx.seed)
    out = tm.to_json(with_points=bool(_get(args, "points", True)))
    out["module"] = D.to_json()
    return out


def cmd_drinfeld_galois(args, ctx):
    D = _module(args)
    a = D.A(str(_get(args, "a")))
    g = galois_image(D, a, cap=ctx.caps["field"], seed=ctx.seed)
    out = g.to_json()
    out["module"] = D.to_json()
    return out


def cmd_drinfeld_isogeny(args, ctx):
    D = DrinfeldModule.from_json(_load(_get(args, "from")))
    E = DrinfeldModule.from_json(_load(_get(args, "to")))
    iso = find_isogeny(D, E, int(_get(args, "max_deg", 4)))
    if iso is None:
        return {"found": False, "max_deg": int(_get(args, "max_deg", 4))}
    out = iso.to_json()
    out["found"] = True
    return out


def cmd_functor_apply(args, ctx):
    D = _module(args)
    img = f_object(D, _get(args, "convention", DEFAULT_CONVENTION), _get(args, "epsilon", "auto"))
    return {"image": img.to_json()}


def cmd_functor_act(args, ctx):
    img = isogeny_act(_image(_get(args, "image")), _tuple(_get(args, "tuple")))
    return {"image": img.to_json()}


def cmd_functor_verify(args, ctx):
    bits = int(_get(args, "bits", ctx.bits))
    rep = verify_substitution(_image(_get(args, "image")), _tuple(_get(args, "tuple")), bits)
    return {
        "ok": bool(rep["ok"]),
        "max_deviation": mpmath.nstr(rep["max_deviation"], 10),
        "tolerance": mpmath.nstr(rep["tolerance"], 10),
        "precision_bits": bits,
        "per_index": [{"m": r["m"], "deviation": mpmath.nstr(r["deviation"], 10),
                       "raw_deviation": mpmath.nstr(r["raw_deviation"], 10),
                       "branch_shift": r["branch_shift"]} for r in rep["per_index"]],
    }


def _lattice(value) -> K0Lattice:
    obj = _load(value)
    if "image" in obj:
        obj = obj["image"]
    if "lattice" in obj:
        obj = obj["lattice"]
    return K0Lattice.from_json(obj)


def cmd_nctorus_order(args, ctx):
    T = endomorphism_order(_lattice(_get(args, "lattice")))
    out = {"triple": T.to_json(), "order_is_ring": T.is_order()}
    if T.degree == 2 and T.full:
        out["quadratic_class"] = quadratic_class(T)
    return out


def cmd_nctorus_morita(args, ctx):
    t1 = ThetaMatrix.from_json(_load(_get(args, "theta1")))
    t2 = ThetaMatrix.from_json(_load(_get(args, "theta2")))
    res = morita_search(t1, t2, int(_get(args, "entry_bound", 1)), int(_get(args, "depth", 2)))
    if res.word is None:
        ctx.inconclusive = True
    return res.to_json()


def _variety(args) -> VarietyDescriptor:
    if args.get("variety") is not None:
        return VarietyDescriptor.from_json(_load(args["variety"]))
    if args.get("image") is not None:
        return VarietyDescriptor.from_image(_image(args["image"]), bool(args.get("k_is_real", False)))
    raise ValidationError("need a variety descriptor or an image")


def cmd_quantum_invariant(args, ctx):
    v = _variety(args)
    return q_invariant(v, int(_get(args, "bits", ctx.bits)))


def cmd_quantum_generators(args, ctx):
    v = _variety(args)
    bits = int(_get(args, "bits", ctx.bits))
    vals = k_generators(v, bits)
    return {"branch": v.branch, "values": [_num(x, bits) for x in vals]}


def cmd_quantum_guess(args, ctx):
    bits = int(_get(args, "bits", ctx.bits))
    with mpmath.workprec(bits + 32):
        res = min_poly_guess(str(_get(args, "value")), int(_get(args, "deg", 4)),
                             int(_get(args, "height", 100)), bits)
    if res is None:
        return {"found": False, "heuristic": True, "precision_bits": bits}
    res["found"] = True
    return res


def cmd_orders_class_group(args, ctx):
    o = QuadOrder(int(_get(args, "d")), int(_get(args, "f", 1)))
    cg = class_group(o, bool(_get(args, "narrow", False)), bound=ctx.caps["bound"])
    return cg.to_json()


def cmd_orders_match(args, ctx):
    d, f = int(_get(args, "d")), int(_get(args, "f", 1))
    bound = int(_get(args, "bound", ctx.caps["conductor"]))
    fp, inv, tried = match_conductor(d, f, bound, bool(_get(args, "narrow", False)))
    return {"d": d, "f": f, "d_real": -d, "f_prime": fp, "invariant_factors": inv,
            "search_trace_length": tried, "bound": bound}


def cmd_orders_unit(args, ctx):
    return fundamental_unit(int(_get(args, "d"))).to_json()


COMMANDS = {
    "drinfeld.torsion": cmd_drinfeld_torsion,
    "drinfeld.galois": cmd_drinfeld_galois,
    "drinfeld.isogeny": cmd_drinfeld_isogeny,
    "functor.apply": cmd_functor_apply,
    "functor.act": cmd_functor_act,
    "functor.verify-substitution": cmd_functor_verify,
    "nctorus.order": cmd_nctorus_order,
    "nctorus.morita": cmd_nctorus_morita,
    "quantum.invariant": cmd_quantum_invariant,
    "quantum.generators": cmd_quantum_generators,
    "quantum.guess": cmd_quantum_guess,
    "orders.class-group": cmd_orders_class_group,
    "orders.match-conductor": cmd_orders_match,
    "orders.fundamental-unit": cmd_orders_unit,
}


def run_command(name: str, args: dict, ctx: Context | None = None) -> dict:
    ctx = ctx or Context()
    if name not in COMMANDS:
        raise ValidationError(f"unknown command {name!r}")
    with ctx.applied():
        return _jsonable(COMMANDS[name](args, ctx))


# ---------------------------------------------------------------------------
# pipelines


def _canonical(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), ensure_ascii=False)


def _dig(obj, path: str | None):
    if not path:
        return obj
    for part in path.split("."):
        if isinstance(obj, list):
            obj = obj[int(part)]
        else:
            obj = obj[part]
    return obj


def _resolve(value, outputs: list, index: int):
    if isinstance(value, dict):
        if "$step" in value:
            j = value["$step"]
            if not isinstance(j, int) or not 0 <= j < index:
                raise ValidationError(f"reference to step {j!r} is not an earlier step", step=index)
            try:
                return _dig(outputs[j], value.get("path"))
            except (KeyError, IndexError, ValueError, TypeError):
                raise ValidationError(f"step {j} has no output {value.get('path')!r}", step=index) from None
        return {k: _resolve(v, outputs, index) for k, v in value.items()}
    if isinstance(value, list):
        return [_resolve(v, outputs, index) for v in value]
    return value


def validate_pipeline(spec) -> list:
    if not isinstance(spec, dict):
        raise ValidationError("pipeline spec must be a JSON object")
    steps = spec.get("steps", [])
    if not isinstance(steps, list):
        raise ValidationError("steps must be a list")
    for i, s in enumerate(steps):
        if not isinstance(s, dict) or "command" not in s:
            raise ValidationError("each step needs a command", step=i)
        if s["command"] not in COMMANDS:
            raise ValidationError(f"unknown command {s['command']!r}", step=i)
        if not isinstance(s.get("args", {}), dict):
            raise ValidationError("args must be an object", step=i)
    return steps


def run_pipeline(spec: dict, ctx: Context | None = None) -> dict:
    """Run the steps in order; the timing block is the only nondeterministic part."""
    steps = validate_pipeline(spec)
    if ctx is None:
        ctx = Context(spec.get("precision_bits"), spec.get("seed", 0), spec.get("caps"))
    outputs, records, timing = [], [], []
    for i, step in enumerate(steps):
        args = _resolve(step.get("args", {}), outputs, i)
        t0 = time.perf_counter()
        try:
            out = run_command(step["command"], args, ctx)
        except ValidationError as exc:
            if exc.step is None:
                raise ValidationError(str(exc), step=i) from exc
            raise
        except QdrinError as exc:
            exc.step = i
            raise
        timing.append({"step": i, "seconds": round(time.perf_counter() - t0, 6)})
        outputs.append(out)
        records.append({
            "index": i,
            "command": step["command"],
            "provenance": {"inputs_sha256": hashlib.sha256(_canonical(args).encode()).hexdigest(),
                           "version": __version__},
            "output": out,
        })
    return {
        "version": __version__,
        "seed": ctx.seed,
        "precision_bits": ctx.bits,
        "steps": records,
        "timing": timing,
    }


# ---------------------------------------------------------------------------
# argument parsing


def _build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="qdrin", description="Drinfeld modules, torus lattices and quadratic orders.")
    ap.add_argument("--version", action="version", version=f"qdrin {__version__}")
    ap.add_argument("--bits", type=int, default=None, help="working precision (default $QDRIN_PRECISION_BITS or 128)")
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--cap-field", type=int, default=None, help="largest splitting field searched for torsion")
    ap.add_argument("--cap-degree", type=int, default=None, help="largest number field degree")
    ap.add_argument("--cap-bound", type=int, default=None, help="largest |D| for class groups")
    ap.add_argument("--cap-conductor", type=int, default=None, help="default conductor search bound")
    ap.add_argument("--compact", action="store_true", help="print JSON on one line")
    groups = ap.add_subparsers(dest="group", required=True)
    sub_bits = argparse.ArgumentParser(add_help=False)
    sub_bits.add_argument("--bits", type=int, default=argparse.SUPPRESS,
                          help="working precision for this command")

    g = groups.add_parser("drinfeld").add_subparsers(dest="command", required=True)
    p = g.add_parser("torsion", parents=[sub_bits])
    p.add_argument("--module", required=True)
    p.add_argument("--a", required=True)
    p.add_argument("--no-points", dest="points", action="store_false")
    p = g.add_parser("galois", parents=[sub_bits])
    p.add_argument("--module", required=True)
    p.add_argument("--a", required=True)
    p = g.add_parser("isogeny", parents=[sub_bits])
    p.add_argument("--from", dest="from", required=True)
    p.add_argument("--to", required=True)
    p.add_argument("--max-deg", type=int, default=4)

    g = groups.add_parser("functor").add_subparsers(dest="command", required=True)
    p = g.add_parser("apply", parents=[sub_bits])
    p.add_argument("--module", required=True)
    p.add_argument("--convention", default=DEFAULT_CONVENTION)
    p.add_argument("--epsilon", default="auto")
    p = g.add_parser("act", parents=[sub_bits])
    p.add_argument("--image", required=True)
    p.add_argument("--tuple", required=True)
    p = g.add_parser("verify-substitution", parents=[sub_bits])
    p.add_argument("--image", required=True)
    p.add_argument("--tuple", required=True)

    g = groups.add_parser("nctorus").add_subparsers(dest="command", required=True)
    p = g.add_parser("order", parents=[sub_bits])
    p.add_argument("--lattice", required=True)
    p = g.add_parser("morita", parents=[sub_bits])
    p.add_argument("--theta1", required=True)
    p.add_argument("--theta2", required=True)
    p.add_argument("--depth", type=int, default=2)
    p.add_argument("--entry-bound", type=int, default=1)

    g = groups.add_parser("quantum").add_subparsers(dest="command", required=True)
    for name in ("invariant", "generators"):
        p = g.add_parser(name, parents=[sub_bits])
        p.add_argument("--variety")
        p.add_argument("--image")
        p.add_argument("--k-is-real", action="store_true")
    p = g.add_parser("guess", parents=[sub_bits])
    p.add_argument("--value", required=True)
    p.add_argument("--deg", type=int, default=4)
    p.add_argument("--height", type=int, default=100)

    g = groups.add_parser("orders").add_subparsers(dest="command", required=True)
    p = g.add_parser("class-group", parents=[sub_bits])
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--f", type=int, default=1)
    p.add_argument("--narrow", action="store_true")
    p = g.add_parser("match-conductor", parents=[sub_bits])
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--f", type=int, default=1)
    p.add_argument("--bound", type=int, default=None)
    p.add_argument("--narrow", action="store_true")
    p = g.add_parser("fundamental-unit", parents=[sub_bits])
    p.add_argument("--d", type=int, required=True)

    p = groups.add_parser("pipeline", parents=[sub_bits])
    p.add_argument("--spec", required=True)
    p.add_argument("--no-timing", action="store_true", help="drop the timing block")
    return ap


_GLOBAL = {"group", "command", "bits", "seed", "cap_field", "cap_degree", "cap_bound", "cap_conductor", "compact"}


def main(argv=None) -> int:
    ap = _build_parser()
    ns = ap.parse_args(argv)
    caps = {"field": ns.cap_field, "degree": ns.cap_degree, "bound": ns.cap_bound, "conductor": ns.cap_conductor}
    try:
        if ns.group == "pipeline":
            spec = _load(ns.spec)
            if ns.bits is not None:
                spec = dict(spec, precision_bits=ns.bits)
            ctx = Context(spec.get("precision_bits"), spec.get("seed", ns.seed),
                          {**(spec.get("caps") or {}), **{k: v for k, v in caps.items() if v is not None}})
            out = run_pipeline(spec, ctx)
            if ns.no_timing:
                out.pop("timing")
        else:
            ctx = Context(ns.bits, ns.seed, caps)
            args = {k: v for k, v in vars(ns).items() if k not in _GLOBAL}
            args.setdefault("bits", ctx.bits)
            out = run_command(f"{ns.group}.{ns.command}", args, ctx)
    except ValidationError as exc:
        _fail(exc)
        return EXIT_VALIDATION
    except CapExceeded as exc:
        _fail(exc)
        return EXIT_CAP
    except (ValueError, TypeError) as exc:
        _fail(exc)
        return EXIT_VALIDATION
    except (QdrinError, ArithmeticError, ZeroDivisionError) as exc:
        _fail(exc)
        return EXIT_ERROR
    print(json.dumps(out, indent=None if ns.compact else 2, sort_keys=True, ensure_ascii=False))
    return EXIT_INCONCLUSIVE if ctx.inconclusive else EXIT_OK


def _fail(exc: Exception):
    err = {"error": type(exc).__name__, "message": str(exc)}
    step = getattr(exc, "step", None)
    if step is not None:
        err["step"] = step
    print(json.dumps(err), file=sys.stderr)


if __name__ == "__main__":
    sys.exit(main())
