"""Command line front end.

Every subcommand prints one JSON report (keys sorted, so a fixed seed gives
byte-identical output) and exits 0 when all checks pass, 1 when a
mathematical check fails (the report carries a witness) and 2 on bad input.
Inputs are JSON files in the formats of :mod:`artifact.io`; most commands can
also generate a seeded random instance when no file is given.
"""

from __future__ import annotations

import argparse
import json
import random
import sys
from fractions import Fraction

from . import io as aio
from . import models
from .deligne import gauge_apply, gauge_apply_closed_form, mc_defect
from .dgla import GradedElement, report_ok, validate_dgla
from .fedosov import (CentralSeries, SymplecticModel, WeylElement, WeylForm,
                      characteristic_class, fedosov_solve, flatness_residual, gauge_move,
                      exact_term, nabla_c_residual, omega_pairing, rw_form)
from .gerbe import (barycentric_reconstruct, chain_data_from_stack, stack_iso_verify,
                    twisted_matrix_build, validate_chain_data, validate_stack)
from .hochschild import (deformation_bridge, hochschild_dgla, matrix_algebra,
                         triangular_algebra, truncated_polynomial_algebra)
from .sampling import (near_descent, near_iso, near_two_iso, perturb_stack, random_chain_data,
                       random_first_order_deformation,
                       random_exact_datum, random_stack, rand_scalar)
from .simplicial import (Nerve, SimplicialDglaSheaf, cech_complex, constant_cosimplicial,
                         descent_verify, deviation_cocycle, iso_deviation, totalize)

EXIT_OK, EXIT_FAIL, EXIT_INPUT = 0, 1, 2


class InputError(Exception):
    pass


# -- registries -------------------------------------------------------------------------

def _hochschild_qx3():
    return hochschild_dgla(truncated_polynomial_algebra(3)).presentation


DGLA_MODELS = {
    "abelian": lambda: models.abelian({0: 1, 1: 1}),
    "sl2": models.sl2,
    "heisenberg": models.heisenberg,
    "heisenberg_dga": models.heisenberg_dga,
    "abelian_dga": models.abelian_dga,
    "heisenberg_ext": models.heisenberg_exterior,
    "abelian_ext": models.abelian_exterior,
    "hochschild_qx3": _hochschild_qx3,
}

ALGEBRAS = {
    "qx2": lambda: truncated_polynomial_algebra(2),
    "qx3": lambda: truncated_polynomial_algebra(3),
    "m2": lambda: matrix_algebra(2),
    "t2": lambda: triangular_algebra(2),
}


def _model(name):
    if name not in DGLA_MODELS:
        raise InputError(f"unknown model {name!r}; choose from {sorted(DGLA_MODELS)}")
    return DGLA_MODELS[name]()


def _algebra(name):
    if name not in ALGEBRAS:
        raise InputError(f"unknown algebra {name!r}; choose from {sorted(ALGEBRAS)}")
    return ALGEBRAS[name]()


def _load(path):
    try:
        with open(path) as fh:
            text = fh.read()
    except OSError as e:
        raise InputError(f"cannot read {path}: {e.strerror}") from None
    try:
        return json.loads(text)
    except json.JSONDecodeError as e:
        raise aio.SchemaError("", f"invalid JSON at line {e.lineno} column {e.colno}: {e.msg}") from None


def _dgla_ref(obj, path):
    """A DGLA given inline or as {"model": name}."""
    if isinstance(obj, dict) and set(obj) == {"model"}:
        try:
            return _model(obj["model"])
        except InputError as e:
            raise aio.SchemaError(aio._ptr(path, "model"), str(e)) from None
    return aio.dgla_from_json(obj, path)


def _field(obj, key, path=()):
    if not isinstance(obj, dict):
        raise aio.SchemaError(aio._ptr(path), "expected an object")
    if key not in obj:
        raise aio.SchemaError(aio._ptr(path, key), "missing required field")
    return obj[key]


def _witness(x):
    """Make report witnesses JSON friendly."""
    if isinstance(x, dict):
        return {str(k): _witness(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_witness(v) for v in x]
    if isinstance(x, (Fraction,)) or type(x).__name__ == "GaussianRational":
        return aio.scalar_to_json(x)
    return x


# -- subcommands ------------------------------------------------------------------------

def _corrupt(rng, L):
    """Bump one bracket structure constant (breaking antisymmetry)."""
    ents = list(L.bracket_entries())
    p, a, q, b, k, c = rng.choice(ents)
    ents = [e for e in ents if e[:5] != (p, a, q, b, k)] + [(p, a, q, b, k, c + 1)]
    diff = {d: [(r, col, v) for dd, r, col, v in L.differential_entries() if dd == d] for d in L.dims}
    return type(L)(L.dims, diff, ents, name=L.name + "_corrupted")


def cmd_validate_dgla(args, rng):
    if args.sweep:
        fixtures = {name: DGLA_MODELS[name]() for name in sorted(DGLA_MODELS)}
        fixtures["hochschild_m2"] = hochschild_dgla(matrix_algebra(2)).presentation
        models_ok = {name: report_ok(validate_dgla(L)) for name, L in fixtures.items()}
        detected = 0
        for _ in range(args.sweep):
            L = fixtures[rng.choice(["sl2", "heisenberg_ext", "hochschild_qx3"])]
            detected += not report_ok(validate_dgla(_corrupt(rng, L)))
        # [m, m] = 0 iff the table is associative, on random tables of dim <= 3
        from .hochschild import gerstenhaber
        from .sampling import random_table
        mm_agree = 0
        n_assoc = 0
        for _ in range(args.sweep):
            A, _ = random_table(rng)
            m = A.multiplication_cochain()
            assoc = A.is_associative()
            n_assoc += assoc
            mm_agree += gerstenhaber(m, m).is_zero() == assoc
        ok = all(models_ok.values()) and detected == args.sweep and mm_agree == args.sweep
        return {"command": "validate-dgla", "fixtures": models_ok, "corruptions": args.sweep,
                "corruptions_detected": detected, "tables": args.sweep,
                "tables_associative": n_assoc, "mm_zero_iff_associative": mm_agree, "pass": ok}, ok
    if args.file:
        L = _dgla_ref(_load(args.file), ())
    else:
        L = _model(args.model)
    rep = validate_dgla(L)
    ok = report_ok(rep)
    return {"command": "validate-dgla", "dgla": L.name, "dims": {str(k): v for k, v in L.dims.items()},
            "axioms": _witness(rep), "pass": ok}, ok


def cmd_mc_check(args, rng):
    if args.sweep:
        A = truncated_polynomial_algebra(3)
        h = hochschild_dgla(A)
        agree = 0
        mc_count = 0
        rows = []
        for _ in range(args.sweep):
            lam = random_first_order_deformation(rng, h, 1)
            mc = mc_defect(lam).is_zero()
            assoc = deformation_bridge(lam, "from_mc", h).is_associative()
            agree += mc == assoc
            mc_count += mc
            if mc != assoc:
                rows.append(aio.element_to_json(lam))
        ok = agree == args.sweep
        return {"command": "mc-check", "samples": args.sweep, "mc_elements": mc_count,
                "agreements": agree, "disagreements": rows, "pass": ok}, ok
    if not args.file:
        raise InputError("mc-check needs an input file (or --sweep K)")
    obj = _load(args.file)
    L = _dgla_ref(_field(obj, "dgla"), ["dgla"])
    lam = aio.element_from_json(_field(obj, "element"), L, ["element"])
    _degree_check(lam, 1, ["element"])
    D = mc_defect(lam)
    ok = D.is_zero()
    return {"command": "mc-check", "dgla": L.name,
            "defect": "0" if ok else aio.element_to_json(D),
            "first_failing_order": None if ok else D.valuation(), "pass": ok}, ok


def _degree_check(x, p, path):
    if not x.is_homogeneous(p):
        raise aio.SchemaError(aio._ptr(path), f"element must be homogeneous of degree {p}")
    if not x.in_maximal_ideal():
        raise aio.SchemaError(aio._ptr(path), "element must vanish at hbar^0")


def cmd_gauge(args, rng):
    if args.file:
        obj = _load(args.file)
        L = _dgla_ref(_field(obj, "dgla"), ["dgla"])
        lam = aio.element_from_json(_field(obj, "element"), L, ["element"])
        X = aio.element_from_json(_field(obj, "gauge"), L, ["gauge"])
        _degree_check(lam, 1, ["element"])
        _degree_check(X, 0, ["gauge"])
        if X.trunc != lam.trunc:
            raise aio.SchemaError("/gauge/trunc", "truncation differs from the element's")
    else:
        from .sampling import random_element
        L = _model(args.model)
        N = args.trunc_hbar or 2
        lam = GradedElement.zero(L, N)
        X = random_element(rng, L, N, 0, range(1, N + 1))
    mu = gauge_apply(X, lam)
    checks = {
        "source_mc": mc_defect(lam).is_zero(),
        "target_mc": mc_defect(mu).is_zero(),
        "closed_form_agrees": (gauge_apply_closed_form(X, lam) - mu).is_zero(),
    }
    ok = all(checks.values())
    return {"command": "gauge", "dgla": L.name, "result": aio.element_to_json(mu),
            "checks": checks, "pass": ok}, ok


def _sheaf_ref(obj, path):
    if isinstance(obj, dict) and obj.get("type") == "SimplicialDglaSheaf":
        return aio.sheaf_from_json(obj, path)
    if isinstance(obj, dict) and set(obj) <= {"model", "nerve"} and "model" in obj:
        L = _dgla_ref({"model": obj["model"]}, path)
        X = aio.nerve_from_json(obj["nerve"], list(path) + ["nerve"]) if "nerve" in obj else Nerve.full(2)
        return SimplicialDglaSheaf.constant(X, L)
    raise aio.SchemaError(aio._ptr(path), "expected a SimplicialDglaSheaf or {model, nerve}")


def _descent_input(args, rng):
    if args.file:
        obj = _load(args.file)
        sheaf = _sheaf_ref(_field(obj, "sheaf"), ["sheaf"])
        C = cech_complex(sheaf, cap=4)
        return C, aio.descent_from_json(_field(obj, "datum"), C, ["datum"])
    L = _model(args.model)
    C = cech_complex(SimplicialDglaSheaf.constant(Nerve.full(args.vertices), L), cap=4)
    N = args.trunc_hbar or 2
    D = random_exact_datum(rng, C, N)
    if args.perturb is not None:
        from .sampling import perturb_datum
        D = perturb_datum(rng, D, args.perturb)
    return C, D


def cmd_descent_check(args, rng):
    if args.sweep:
        C = cech_complex(SimplicialDglaSheaf.constant(Nerve.full(2), _model(args.model)), cap=4)
        ok_count = sum(descent_verify(random_exact_datum(rng, C, 2))["pass"] for _ in range(args.sweep))
        ok = ok_count == args.sweep
        return {"command": "descent-check", "samples": args.sweep, "certified": ok_count, "pass": ok}, ok
    C, D = _descent_input(args, rng)
    rep = descent_verify(D)
    return {"command": "descent-check", "report": rep, "datum": aio.descent_to_json(D),
            "pass": rep["pass"]}, rep["pass"]


def cmd_deviation(args, rng):
    if args.sweep:
        rows = []
        for model in ("heisenberg_ext", "abelian_ext"):
            C = cech_complex(SimplicialDglaSheaf.constant(Nerve.full(2), _model(model)), cap=4)
            for _ in range(args.sweep):
                n = rng.choice([0, 1])
                kind = rng.choice(["descent", "iso", "two_iso"])
                res = _deviation_of(kind, C, rng, n)
                rows.append({"model": model, "kind": kind, "n": n, "closed": res.closed})
        ok = all(r["closed"] for r in rows)
        return {"command": "deviation", "samples": len(rows),
                "closed": sum(r["closed"] for r in rows), "pass": ok}, ok
    if args.file:
        C, D = _descent_input(args, rng)
        res = deviation_cocycle(D)
    else:
        C = cech_complex(SimplicialDglaSheaf.constant(Nerve.full(args.vertices), _model(args.model)), cap=4)
        res = _deviation_of(args.kind, C, rng, args.order)
    rep = res.as_dict()
    rep["components"] = [aio.cech_cochain_to_json(x) for x in res.components]
    ok = bool(res.closed) or (res.precondition_ok and res.closed is None)
    return {"command": "deviation", "deviation": rep, "pass": ok}, ok


def _deviation_of(kind, C, rng, n):
    if kind == "descent":
        return deviation_cocycle(near_descent(rng, C, n), order=n + 1)
    if kind == "iso":
        D, Dp, h, s = near_iso(rng, C, n)
        return iso_deviation(D, Dp, h, s, level="iso", order=n + 1)
    if kind == "two_iso":
        D, Dp, h, s, h2, s2, r = near_two_iso(rng, C, n)
        return iso_deviation(D, Dp, h, s, level="two_iso", order=n + 1, h2=h2, s2=s2, r=r)
    raise InputError(f"unknown deviation kind {kind!r}")


def _random_sullivan(rng, p, max_poly=3):
    from .sullivan import SullivanForm, monomials
    terms = {}
    for j in range(p + 1):
        for mono in monomials(p, max_poly, j):
            if rng.random() < 0.2:
                terms[mono] = rand_scalar(rng)
    return SullivanForm(p, terms)


def _totalize_sweep(args, rng):
    from .hochschild import truncated_polynomial_algebra as tpa
    from .sampling import random_drs_collection
    from .simplicial import drs_differential, drs_validate
    from .sullivan import cohomology_dims, face_vertices, pullback_degeneracy, restrict, sullivan_d
    d2 = faces = degs = 0
    for _ in range(args.sweep):
        p = rng.randint(1, 3)
        w = _random_sullivan(rng, p)
        d2 += sullivan_d(sullivan_d(w)).is_zero()
        i = rng.randint(0, p)
        f = face_vertices(p - 1, i)
        faces += (restrict(sullivan_d(w), f) - sullivan_d(restrict(w, f))).is_zero()
        j = rng.randint(0, p)
        degs += (pullback_degeneracy(sullivan_d(w), j) - sullivan_d(pullback_degeneracy(w, j))).is_zero()
    acyclic = all(cohomology_dims(p, 3) == [1] + [0] * p for p in (1, 2, 3))
    tot = {}
    for name in ("abelian_dga", "heisenberg_dga", "abelian_ext"):
        L = _model(name)
        T = totalize(constant_cosimplicial(L, cap=3), p_max=2, D_t=3)
        tot[name] = _kernel_dim(T, 0) == _kernel_dim(L, 0)
    A = tpa(3)
    m = A.multiplication_cochain()
    nerve = Nerve.full(4)
    drs = 0
    for _ in range(args.sweep):
        coll, R = random_drs_collection(rng, nerve, A)
        D1 = drs_differential(coll, m, R)
        drs += drs_validate(coll)["pass"] and drs_differential(D1, m, R).is_zero()
    K = args.sweep
    ok = d2 == K and faces == K and degs == K and acyclic and all(tot.values()) and drs == K
    return {"command": "totalize", "samples": K, "sullivan_d_squared": d2, "face_compatible": faces,
            "degeneracy_compatible": degs, "polynomial_poincare": acyclic, "tot_kernel_matches": tot,
            "drs_d_squared": drs, "pass": ok}, ok


def cmd_totalize(args, rng):
    if args.sweep:
        return _totalize_sweep(args, rng)
    if args.file:
        L = _dgla_ref(_load(args.file), ())
    else:
        L = _model(args.model)
    p_max = args.p_max
    D_t = args.trunc_degree or 3
    C = constant_cosimplicial(L, cap=p_max + 1)
    T = totalize(C, p_max=p_max, D_t=D_t)
    rep = validate_dgla(T)
    ok = report_ok(rep)
    kernel0 = _kernel_dim(L, 0)
    flat0 = _kernel_dim(T, 0)
    return {"command": "totalize", "dgla": L.name, "p_max": p_max, "D_t": D_t,
            "tot_dims": {str(k): v for k, v in T.dims.items()},
            "input_degree0_kernel": kernel0, "tot_degree0_kernel": flat0,
            "axioms": _witness(rep), "pass": ok and kernel0 == flat0}, ok and kernel0 == flat0


def _kernel_dim(L, p):
    from .linalg import rank
    n = L.dims.get(p, 0)
    m = L.dims.get(p + 1, 0)
    if not n:
        return 0
    if not m:
        return n
    M = [[0] * n for _ in range(m)]
    for q, r, a, c in L.differential_entries():
        if q == p:
            M[r][a] = c
    return n - rank(M)


def _stack_input(args, rng):
    if args.file:
        return aio.stack_from_json(_load(args.file))
    S, _, _, _ = random_stack(rng, Nerve.full(args.vertices), _algebra(args.algebra))
    if args.perturb_stack:
        S, _ = perturb_stack(rng, S, central=True)
    return S


def cmd_stack_check(args, rng):
    if args.sweep:
        ok_count = 0
        for _ in range(args.sweep):
            S, H, b, triv = random_stack(rng, Nerve.full(3), _algebra(args.algebra))
            ok_count += validate_stack(S)["pass"] and stack_iso_verify(H, b, triv, S)
        ok = ok_count == args.sweep
        return {"command": "stack-check", "samples": args.sweep, "valid": ok_count, "pass": ok}, ok
    S = _stack_input(args, rng)
    rep = validate_stack(S)
    return {"command": "stack-check", "report": _witness(rep), "pass": rep["pass"]}, rep["pass"]


def cmd_twisted_matrix(args, rng):
    if args.sweep:
        agree = 0
        for _ in range(args.sweep):
            S, _, _, _ = random_stack(rng, Nerve.full(3), _algebra(args.algebra))
            if rng.random() < 0.5:
                S, _ = perturb_stack(rng, S, central=rng.random() < 0.7)
            T = twisted_matrix_build(S, S.nerve.index_set)
            agree += T.is_associative() == validate_stack(S)["cocycle2"]["pass"]
        # local cochains are closed under delta and the Gerstenhaber bracket
        from .gerbe import local_cochain_check
        from .hochschild import gerstenhaber, hochschild_delta
        from .sampling import random_local_cochain
        S, _, _, _ = random_stack(rng, Nerve.full(3), _algebra(args.algebra))
        M = twisted_matrix_build(S, (0, 1, 2))
        m = M.multiplication_cochain()
        local_ok = 0
        for _ in range(args.sweep):
            D = random_local_cochain(rng, M, rng.choice([0, 1, 2]))
            E = random_local_cochain(rng, M, rng.choice([0, 1, 2]))
            good = local_cochain_check(hochschild_delta(D, m))
            if D.degree + E.degree > 0:
                good = good and local_cochain_check(gerstenhaber(D, E))
            local_ok += good
        ok = agree == args.sweep and local_ok == args.sweep
        return {"command": "twisted-matrix", "samples": args.sweep, "agreements": agree,
                "local_cochains": args.sweep, "local_closed": local_ok, "pass": ok}, ok
    S = _stack_input(args, rng)
    sigma = tuple(args.sigma) if args.sigma else tuple(S.nerve.index_set)
    try:
        T = twisted_matrix_build(S, sigma)
    except (ValueError, KeyError) as e:
        raise InputError(f"cannot build the twisted algebra on {sigma}: {e}") from None
    wit = T.associator_witness()
    rep = {"dim": T.dim, "sigma": list(sigma), "associative": wit is None,
           "cocycle2": _witness(validate_stack(S)["cocycle2"]),
           "associator_witness": None if wit is None else [list(T.slots[i]) for i in wit]}
    return {"command": "twisted-matrix", "report": rep, "pass": wit is None}, wit is None


def _round_trip(S):
    """Stack -> chain data -> reconstruction is isomorphic to S via H = id and
    b_ij = c_iji^{-1} (i < j), b_ij = 1 otherwise."""
    R = barycentric_reconstruct(chain_data_from_stack(S))
    H = {}
    b = {}
    for i in S.nerve.index_set:
        n = S.algebras[i].dim
        H[i] = [[int(r == c) for c in range(n)] for r in range(n)]
    for i, j in S.pairs():
        A = S.algebras[i]
        b[(i, j)] = A.inverse(S.c[(i, j, i)]) if i < j else list(A.unit)
    return stack_iso_verify(H, b, S, R)


def cmd_barycentric(args, rng):
    if args.sweep:
        ok_count = 0
        for _ in range(args.sweep):
            CD = random_chain_data(rng, Nerve.full(4), _algebra("qx2"))
            ok_count += validate_stack(barycentric_reconstruct(CD))["pass"]
        trips = 0
        for _ in range(args.sweep):
            S, _, _, _ = random_stack(rng, Nerve.full(4), _algebra("t2"))
            trips += _round_trip(S)
        ok = ok_count == args.sweep and trips == args.sweep
        return {"command": "barycentric", "samples": args.sweep, "valid": ok_count,
                "round_trips": trips, "pass": ok}, ok
    if args.file:
        CD = aio.chain_data_from_json(_load(args.file))
    else:
        CD = random_chain_data(rng, Nerve.full(args.vertices), _algebra(args.algebra))
    crep = validate_chain_data(CD)
    if not crep["pass"]:
        return {"command": "barycentric", "chain_data": _witness(crep), "pass": False}, False
    S = barycentric_reconstruct(CD, check=False)
    rep = validate_stack(S)
    return {"command": "barycentric", "chain_data": _witness(crep), "stack": _witness(rep),
            "reconstructed": aio.stack_to_json(S), "pass": rep["pass"]}, rep["pass"]


def _theta_file(path, model):
    obj = _load(path)
    if isinstance(obj, dict) and obj.get("type") == "CentralSeries":
        th = aio.central_from_json(obj)
        if th.model != model:
            raise aio.SchemaError("/omega", "theta is written for a different symplectic form")
        return th
    if not isinstance(obj, list):
        raise aio.SchemaError("", "expected a CentralSeries or a list of {order, matrix}")
    mats = {}
    for i, e in enumerate(obj):
        aio._keys(e, {"order", "matrix"}, [i], {"order", "matrix"})
        m = aio._int(e["order"], [i, "order"], -1)
        M = aio._matrix_from(e["matrix"], [i, "matrix"], model.dim, model.dim)
        for r in range(model.dim):
            for c in range(model.dim):
                if M[r][c] != -M[c][r]:
                    raise aio.SchemaError(aio._ptr([i, "matrix", r, c]), "matrix is not antisymmetric")
        if m in mats:
            raise aio.SchemaError(aio._ptr([i, "order"]), f"order {m} given twice")
        mats[m] = M
    # the leading term is fixed; a list may leave it out
    mats.setdefault(-1, model.omega)
    try:
        return CentralSeries.from_matrices(model, mats)
    except ValueError as e:
        raise aio.SchemaError("", str(e)) from None


def cmd_fedosov(args, rng):
    model = SymplecticModel.standard(args.n)
    N = args.trunc_hbar if args.trunc_hbar is not None else 3
    D = args.trunc_degree if args.trunc_degree is not None else 6
    theta = _theta_file(args.theta, model) if args.theta else None
    try:
        pair = fedosov_solve(model, theta, (N, D), absorb=args.absorb)
    except ValueError as e:
        raise InputError(str(e)) from None
    th = characteristic_class(pair)
    target = theta if theta is not None else CentralSeries.from_matrices(model, {-1: model.omega})
    checks = {
        "flatness": not flatness_residual(pair),
        "nabla_c": nabla_c_residual(pair).is_zero(),
        "theta_matches_target": th == target.truncate(N - 1),
        "theta_closed": th.is_closed(),
        "leading_is_omega": th.matrix(-1) == model.omega,
    }
    checks["moyal_normalization"] = _moyal_normalization(model, N, D)
    if args.sweep:
        checks["moyal_associative"] = _moyal_assoc_sample(rng, model, N, D, args.sweep)
    moves = []
    for _ in range(args.sweep or 0):
        X = _random_x(rng, model, N, D + 4)
        p2, alpha = gauge_move(pair, X)
        th2 = characteristic_class(p2)
        moves.append(th2 == th + exact_term(alpha, pair.window))
    if moves:
        checks["equivalence_moves"] = all(moves)
    ok = all(checks.values())
    return {"command": "fedosov", "n": args.n, "truncation": {"hbar": N, "filtration": D},
            "iterations": pair.iterations, "theta": aio.theta_report(th),
            "checks": checks, "pass": ok}, ok


def _moyal_normalization(model, N, D):
    """y^a * y^b - y^b * y^a = i hbar w^{ab} for all generator pairs."""
    from .scalars import I
    ys = [WeylElement.y(model, a, N, D) for a in range(model.dim)]
    for a in range(model.dim):
        for b in range(model.dim):
            lhs = ys[a] * ys[b] - ys[b] * ys[a]
            rhs = WeylElement.hbar(model, 1, N, D).scale(I * model.poisson[a][b])
            if lhs != rhs:
                return False
    return True


def _moyal_assoc_sample(rng, model, N, D, k):
    from .fedosov import weyl_basis
    basis = weyl_basis(model, N, D)
    for _ in range(k):
        f, g, h = (rng.choice(basis) for _ in range(3))
        if (f * g) * h != f * (g * h):
            return False
    return True


def _random_x(rng, model, N, D):
    terms = {}
    for _ in range(3):
        k = rng.randint(1, max(1, N - 1))
        y = [0] * model.dim
        y[rng.randrange(model.dim)] += rng.randint(1, 2)
        x = [0] * model.dim
        x[rng.randrange(model.dim)] += rng.randint(0, 1)
        terms[(k, tuple(y), tuple(x))] = rand_scalar(rng)
    return WeylElement(model, terms, N, D)


def cmd_char_class(args, rng):
    if args.file:
        obj = _load(args.file)
        A = aio.weyl_form_from_json(_field(obj, "A"), ["A"])
        c = aio.weyl_form_from_json(_field(obj, "c"), ["c"])
        if A.degree != 1 or c.degree != 2:
            raise InputError("A must be a 1-form and c a 2-form")
        if A.model != c.model or (A.N, A.D) != (c.N, c.D):
            raise InputError("A and c must share model and truncation")
        window = aio._int(obj.get("window", A.D), ["window"], 0)
    else:
        model = SymplecticModel.standard(args.n)
        N = args.trunc_hbar if args.trunc_hbar is not None else 3
        D = args.trunc_degree if args.trunc_degree is not None else 6
        A = WeylForm.zero(model, 1, N, D + 4)
        c = WeylForm.zero(model, 2, N, D + 4)
        window = D
    try:
        th = characteristic_class(A, c, window)
    except ValueError as e:
        return {"command": "char-class", "central": False, "witness": str(e), "pass": False}, False
    closed = th.is_closed()
    rep = {"command": "char-class", "central": True, "closed": closed,
           "theta_series": aio.central_to_json(th), "pass": closed}
    if th.is_constant():
        rep["theta"] = aio.theta_report(th)
    return rep, closed


def cmd_rw(args, rng):
    if args.sweep:
        model = SymplecticModel.standard(args.n)
        m = model.dim
        zero = [[[[0] * m for _ in range(m)] for _ in range(m)] for _ in range(m)]
        zero_ok = all(v == 0 for row in rw_form(zero, model) for v in row)
        quad = anti = 0
        for _ in range(args.sweep):
            R = _random_R(rng, m)
            X = rw_form(R, model)
            t = rand_scalar(rng, 1, 3)
            Rt = [[[[t * v for v in r3] for r3 in r2] for r2 in r1] for r1 in R]
            quad += rw_form(Rt, model) == [[t * t * v for v in row] for row in X]
            anti += all(X[j][l] == -X[l][j] for j in range(m) for l in range(m))
        ok = zero_ok and quad == args.sweep and anti == args.sweep
        return {"command": "rw", "samples": args.sweep, "rw_zero": zero_ok, "quadratic": quad,
                "antisymmetric": anti, "pass": ok}, ok
    if args.file:
        obj = _load(args.file)
        model = aio.model_from_json({"type": "SymplecticModel", "omega": _field(obj, "omega")}, [])
        m = model.dim
        R = _tensor(_field(obj, "R"), m, ["R"])
        alpha = aio._matrix_from(obj["alpha"], ["alpha"], m, m) if "alpha" in obj else None
        beta = aio._matrix_from(obj["beta"], ["beta"], m, m) if "beta" in obj else None
    else:
        model = SymplecticModel.standard(args.n)
        m = model.dim
        R = _random_R(rng, m)
        alpha = [[rand_scalar(rng) for _ in range(m)] for _ in range(m)]
        beta = [[rand_scalar(rng) for _ in range(m)] for _ in range(m)]
    try:
        rw = rw_form(R, model)
    except ValueError as e:
        raise InputError(str(e)) from None
    rep = {"command": "rw", "rw": aio._matrix_to(rw)}
    if alpha is not None and beta is not None:
        rep["omega_pairing"] = aio._matrix_to(omega_pairing(alpha, beta, model))
    rep["pass"] = True
    return rep, True


def _random_R(rng, m):
    R = [[[[0] * m for _ in range(m)] for _ in range(m)] for _ in range(m)]
    for a in range(m):
        for b in range(a, m):
            for i in range(m):
                for j in range(m):
                    if rng.random() < 0.5:
                        v = rand_scalar(rng)
                        R[a][b][i][j] = v
                        R[b][a][i][j] = v
    return R


def _tensor(v, m, path):
    aio._list(v, path, m)
    return [[[[aio.scalar_from_json(c, path + [a, b, i, j]) for j, c in enumerate(aio._list(r3, path + [a, b, i], m))]
              for i, r3 in enumerate(aio._list(r2, path + [a, b], m))]
             for b, r2 in enumerate(aio._list(r1, path + [a], m))]
            for a, r1 in enumerate(v)]


COMMANDS = {
    "validate-dgla": cmd_validate_dgla, "mc-check": cmd_mc_check, "gauge": cmd_gauge,
    "descent-check": cmd_descent_check, "deviation": cmd_deviation, "totalize": cmd_totalize,
    "stack-check": cmd_stack_check, "twisted-matrix": cmd_twisted_matrix,
    "barycentric": cmd_barycentric, "fedosov": cmd_fedosov, "char-class": cmd_char_class,
    "rw": cmd_rw,
}


def _nonneg(v):
    try:
        k = int(v)
    except ValueError:
        raise argparse.ArgumentTypeError(f"{v!r} is not an integer") from None
    if k < 0:
        raise argparse.ArgumentTypeError("must be non-negative")
    return k


def _positive(v):
    k = _nonneg(v)
    if k == 0:
        raise argparse.ArgumentTypeError("must be positive")
    return k


HELP = {
    "validate-dgla": "check d^2 = 0, antisymmetry, Jacobi and Leibniz on a DGLA",
    "mc-check": "Maurer-Cartan defect of a degree-1 element",
    "gauge": "apply a gauge transformation and certify the result",
    "totalize": "Sullivan-form totalization of a constant cosimplicial DGLA",
    "descent-check": "verify a descent datum on a Cech cosimplicial DGLA",
    "deviation": "deviation cocycle of a near-descent datum or near-isomorphism",
    "stack-check": "cocycle conditions of a stack datum",
    "twisted-matrix": "build a twisted matrix algebra and test associativity",
    "barycentric": "reconstruct a stack datum from chain data",
    "fedosov": "solve for a flat Fedosov pair and report its class",
    "char-class": "characteristic class of a given pair (A, c)",
    "rw": "RW form of a curvature-like tensor",
}


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0, help="seed for generated data")
    common.add_argument("--trunc-hbar", "--hbar-order", dest="trunc_hbar", type=_positive,
                        help="truncation order in hbar")
    common.add_argument("--trunc-degree", "--y-degree", dest="trunc_degree", type=_positive,
                        help="degree bound (Weyl filtration, or polynomial degree in Tot)")
    common.add_argument("--format", choices=("json", "text"), default="json")
    common.add_argument("--sweep", type=_positive, default=0, metavar="K",
                        help="run K randomized property checks instead of one input")

    p = argparse.ArgumentParser(prog="artifact", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    def add(name, file=True, **extra):
        sp = sub.add_parser(name, parents=[common], help=HELP[name])
        if file:
            sp.add_argument("file", nargs="?", help="JSON input")
        return sp

    for name in ("validate-dgla", "mc-check", "gauge", "totalize"):
        sp = add(name)
        sp.add_argument("--model", default="heisenberg_ext", choices=sorted(DGLA_MODELS))
        if name == "totalize":
            sp.add_argument("--p-max", type=_positive, default=2)
    for name in ("descent-check", "deviation"):
        sp = add(name)
        sp.add_argument("--model", default="heisenberg_ext", choices=sorted(DGLA_MODELS))
        sp.add_argument("--vertices", type=_positive, default=2)
        sp.add_argument("--perturb", type=_positive, default=None,
                        help="perturb the generated datum at this order")
        if name == "deviation":
            sp.add_argument("--kind", choices=("descent", "iso", "two_iso"), default="descent")
            sp.add_argument("--order", type=_nonneg, default=0,
                            help="n: generated data are exact modulo hbar^(n+1)")
    for name in ("stack-check", "twisted-matrix", "barycentric"):
        sp = add(name)
        sp.add_argument("--algebra", default="m2" if name != "barycentric" else "qx2",
                        choices=sorted(ALGEBRAS))
        sp.add_argument("--vertices", type=_positive, default=3 if name != "barycentric" else 4)
        if name != "barycentric":
            sp.add_argument("--perturb-stack", action="store_true",
                            help="multiply one c_ijk by a central unit")
        if name == "twisted-matrix":
            sp.add_argument("--sigma", type=int, nargs="+", help="simplex (default: all indices)")
    sp = add("fedosov", file=False)
    sp.add_argument("--n", type=_positive, default=1)
    sp.add_argument("--theta", help="target class: CentralSeries JSON or [{order, matrix}] "
                                    "(order -1 defaults to omega)")
    sp.add_argument("--absorb", choices=("c", "A"), default="c")
    sp = add("char-class")
    sp.add_argument("--n", type=_positive, default=1)
    sp = add("rw")
    sp.add_argument("--n", type=_positive, default=1)
    return p


def _text(obj, prefix=""):
    lines = []
    if isinstance(obj, dict):
        for k in sorted(obj):
            lines += _text(obj[k], f"{prefix}{k}.")
    elif isinstance(obj, list) and obj and all(isinstance(v, (dict, list)) for v in obj):
        for i, v in enumerate(obj):
            lines += _text(v, f"{prefix}{i}.")
    else:
        lines.append(f"{prefix[:-1]}: {json.dumps(obj, sort_keys=True)}")
    return lines


def emit(report, fmt, stream):
    if fmt == "text":
        stream.write("\n".join(_text(report)) + "\n")
    else:
        stream.write(json.dumps(report, indent=2, sort_keys=True) + "\n")


def main(argv=None, stdout=None, stderr=None):
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code) if e.code is not None else EXIT_OK
    rng = random.Random(args.seed)
    try:
        report, ok = COMMANDS[args.command](args, rng)
    except aio.SchemaError as e:
        emit({"command": args.command, "error": str(e), "pointer": e.pointer}, args.format, stdout)
        stderr.write(f"input error: {e}\n")
        return EXIT_INPUT
    except InputError as e:
        emit({"command": args.command, "error": str(e)}, args.format, stdout)
        stderr.write(f"input error: {e}\n")
        return EXIT_INPUT
    emit(report, args.format, stdout)
    return EXIT_OK if ok else EXIT_FAIL


def run():
    sys.exit(main())


if __name__ == "__main__":
    run()
