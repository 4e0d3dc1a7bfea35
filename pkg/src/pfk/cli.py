"""Batch front end: schema-validated loading, command dispatch, JSON reports.

Exit codes: 0 all property verdicts pass, 1 some verdict failed,
2 invalid input or unknown command.  Reports are single JSON documents,
byte-identical across runs on identical inputs; timing is opt-in because
it would break that.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time

from . import __version__
from .bitsets import bit_indices
from .bundle import (BundleRejected, InternalCheckError, MorphismRejected,
                     build_bundle, classify_bundle, check_morphism,
                     enumerate_kernel_maps, spectral_kernel, total_space,
                     verify_sigma_gamma)
from .caps import CapExceeded, resolve_cap
from .dot import bundle_dot, lattice_dot, space_dot
from .frame import (FrameError, make_locale, primes, spatialization,
                    spectrum_join_law_full, spectrum_space)
from .hyper import max_subspaces, restrict_to_max, spectrum_topology, topology_compare
from .linfq import enumerate_subspaces, subspace_intersect, subspace_sum
from .linloc import (LinLocaleRejected, adjunction_census, adjunction_transpose,
                     max_variant_check, omega_linloc, spec_bundle, unit_sob)
from .order import PreservationError, StructureError, validate_lattice
from .schemas import (SchemaError, load_bundle, load_fq, load_lattice,
                      load_linloc, load_morphism_data, load_space, read_json)
from .space import separation_report, soberify

COMMANDS = ("lattice-check", "primes", "spectrum", "soberify", "subspaces",
            "spec-topology", "bundle-build", "bundle-classify", "bundle-enumerate",
            "morphism-check", "linloc-check", "spec", "omega", "transpose",
            "adjunction-census", "dot")


class _Exit2(Exception):
    def __init__(self, payload):
        self.payload = payload


def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="pfk", description=__doc__)
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command")

    def cmd(name, *flags):
        sp = sub.add_parser(name)
        for f in flags:
            sp.add_argument(f)
        sp.add_argument("--in", dest="generic_in", default=None)
        sp.add_argument("--out", default=None)
        sp.add_argument("--cap", type=int, default=None)
        sp.add_argument("--timing", action="store_true")
        return sp

    cmd("lattice-check", "--lattice").add_argument(
        "--level", choices=("poset", "suplattice", "frame"), default="suplattice")
    cmd("primes", "--lattice")
    cmd("spectrum", "--lattice")
    cmd("soberify", "--space")
    cmd("subspaces", "--fq")
    cmd("spec-topology", "--fq").add_argument(
        "--topology", choices=("vietoris", "open-support", "fell"), default="vietoris")
    cmd("bundle-build", "--bundle")
    cmd("bundle-classify", "--bundle")
    cmd("bundle-enumerate", "--space", "--fq").add_argument(
        "--filter", dest="filt",
        choices=("continuous", "open-support", "spectral", "sober"),
        default="continuous")
    cmd("morphism-check", "--src", "--dst", "--morphism")
    cmd("linloc-check", "--linloc")
    cmd("spec", "--linloc")
    cmd("omega", "--bundle")
    cmd("transpose", "--bundle", "--linloc", "--morphism")
    cmd("adjunction-census", "--bundle", "--linloc")
    cmd("dot", "--lattice", "--space", "--bundle").add_argument("--dot", default=None)
    return p


def _input_path(args, flag):
    path = getattr(args, flag, None) or args.generic_in
    if not path:
        raise _Exit2({"errors": [{"path": f"--{flag}", "message": "input file required"}]})
    return path


def _load(loader, path, *extra):
    try:
        return loader(read_json(path), *extra)
    except SchemaError as e:
        raise _Exit2({"errors": [{"path": p, "message": m} for p, m in e.errors]})


def _verdict(name, status, witness=None):
    v = {"check": name, "status": status}
    if witness is not None:
        v["witness"] = witness
    return v


def run_command(argv) -> tuple[int, dict | None]:
    """Dispatch one command; returns (exit code, report document)."""
    parser = _parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        if not e.code:
            return 0, None  # --help / --version already printed
        return 2, {"errors": [{"path": "argv", "message": "invalid arguments"}]}
    if not args.command:
        parser.print_usage(sys.stderr)
        return 2, {"errors": [{"path": "argv", "message": "missing command"}]}
    started = time.perf_counter()
    report = {"command": args.command, "verdicts": []}
    code = 0
    try:
        _HANDLERS[args.command](args, report)
        failed = any(v["status"] == "fail" for v in report["verdicts"])
        report["ok"] = not failed
        code = 1 if failed else 0
    except _Exit2 as e:
        report.update(e.payload)
        report["ok"] = False
        code = 2
    except (BundleRejected, MorphismRejected, LinLocaleRejected,
            FrameError, PreservationError) as e:
        report["verdicts"].append(_verdict("input rejected", "fail", str(e)))
        report["ok"] = False
        code = 1
    except CapExceeded as e:
        report["errors"] = [{"path": "cap", "message": str(e)}]
        report["ok"] = False
        code = 2
    except (StructureError, ValueError) as e:
        report["errors"] = [{"path": "input", "message": str(e)}]
        report["ok"] = False
        code = 2
    if args.timing:
        report["timing_ms"] = round((time.perf_counter() - started) * 1000, 3)
    if getattr(args, "out", None) and args.command != "dot":
        with open(args.out, "w") as fh:
            fh.write(json.dumps(report, indent=2) + "\n")
    return code, report


def main(argv=None) -> int:
    code, report = run_command(sys.argv[1:] if argv is None else argv)
    if report is not None:
        print(json.dumps(report, indent=2))
    return code


# --- handlers -----------------------------------------------------------------


def _h_lattice_check(args, report):
    lat = _load(load_lattice, _input_path(args, "lattice"))
    rep = validate_lattice(lat.value, args.level, args.cap)
    report["normalization"] = lat.notes
    report["level"] = args.level
    report["verdicts"].extend(c.to_json() for c in rep.checks)


def _h_primes(args, report):
    lat = _load(load_lattice, _input_path(args, "lattice"))
    loc = make_locale(lat.value, args.cap)
    report["normalization"] = lat.notes
    report["primes"] = primes(loc)
    report["count"] = len(loc.primes)


def _h_spectrum(args, report):
    lat = _load(load_lattice, _input_path(args, "lattice"))
    loc = make_locale(lat.value, args.cap)
    sp = spectrum_space(loc)
    report["normalization"] = lat.notes
    report["points"] = list(sp.points)
    report["opens"] = [sp.names(o) for o in sp.opens]
    report["verdicts"].append(_verdict("spectrum laws (top, binary meet/join, empty)", "pass"))
    report["verdicts"].append(spectrum_join_law_full(loc, args.cap).to_json())
    spz = spatialization(loc)
    report["verdicts"].append(_verdict("spatialization is a frame homomorphism", "pass"))
    report["is_spatial"] = spz.is_spatial


def _h_soberify(args, report):
    sp = _load(load_space, _input_path(args, "space"), args.cap)
    space = sp.value
    sob, surjective, open_map = soberify(space)
    sep = separation_report(space)
    report["normalization"] = sp.notes
    report["sob"] = sob.to_json()
    report["surjective"] = surjective
    report["open_map"] = open_map
    report["separation"] = sep.to_json(space)
    report["verdicts"].append(_verdict("soberification continuous", "pass"))
    if surjective:
        report["verdicts"].append(
            _verdict("surjective soberification is open", "pass" if open_map else "fail"))


def _h_subspaces(args, report):
    fq = _load(load_fq, _input_path(args, "fq"))
    sl = enumerate_subspaces(fq.value, args.cap)
    report["count"] = sl.n
    report["subspaces"] = [s.key for s in sl.subspaces]
    ok = True
    for i, a in enumerate(sl.subspaces):
        for j, b in enumerate(sl.subspaces):
            if sl.lattice.join_table[i][j] != sl.index_of[subspace_sum(a, b).key]:
                ok = False
            if sl.lattice.meet_table[i][j] != sl.index_of[subspace_intersect(a, b).key]:
                ok = False
    report["verdicts"].append(
        _verdict("lattice joins/meets agree with span-of-union/intersection",
                 "pass" if ok else "fail"))
    dist = validate_lattice(sl.lattice, "frame", args.cap)
    report["distributive"] = dist.ok
    if not dist.ok:
        report["distributivity_witness"] = dist.failed[0].witness


def _h_spec_topology(args, report):
    fq = _load(load_fq, _input_path(args, "fq"))
    kind = args.topology.replace("-", "_")
    top = spectrum_topology(fq.value, kind, args.cap)
    report["kind"] = args.topology
    report["points"] = list(top.space.points)
    report["open_count"] = len(top.space.opens)
    report["subbasis_count"] = len(top.space.subbasis or ())
    chain = {k: spectrum_topology(fq.value, k, args.cap) for k in
             ("vietoris", "open_support", "fell")}
    for a, b in (("vietoris", "open_support"), ("open_support", "fell")):
        cmpr = topology_compare(chain[a].space, chain[b].space)
        report["verdicts"].append(_verdict(
            f"{a} opens contained in {b} opens",
            "pass" if cmpr.verdict in ("equal", "first_strictly_coarser") else "fail"))
        report[f"{a}_vs_{b}"] = cmpr.verdict
    try:
        mx = max_subspaces(fq.value)
        restricted = restrict_to_max(top, mx)
        t1 = all(restricted.min_nbhd[x] == 1 << x for x in range(restricted.n))
        report["max_restriction_T1"] = t1
        if kind in ("open_support", "fell"):
            report["verdicts"].append(
                _verdict("open support topology T1 on closed subspaces",
                         "pass" if t1 else "fail"))
    except Exception as e:  # UnsupportedCarrier keeps the command usable
        report["max_restriction_T1"] = f"unsupported carrier: {e}"


def _h_bundle_build(args, report):
    loaded = _load(load_bundle, _input_path(args, "bundle"), args.cap)
    b = loaded.value
    rep = build_bundle(b.base, b.carrier, b.kappa, args.cap)
    ts = rep.total
    report["normalization"] = loaded.notes
    report["total_points"] = len(ts.points)
    report["fiber_sizes"] = {b.base.points[x]: len(f.reps)
                             for x, f in enumerate(b.fibers)}
    report["verdicts"].extend(c.to_json() for c in rep.checks)
    report["linearity"] = rep.linearity.to_json()
    if not b.carrier.carrier_is_discrete:
        report["carrier_note"] = ("non-discrete carrier: vector-topology axioms "
                                  "not enforced; linearity reported above")
    sg = verify_sigma_gamma(b)
    report["verdicts"].append(_verdict(
        "support left adjoint to restriction", "pass" if sg.adjunction_ok else "fail",
        sg.witness))
    report["restriction_sets_were_subspaces"] = sg.gamma_sets_were_subspaces


def _h_bundle_classify(args, report):
    loaded = _load(load_bundle, _input_path(args, "bundle"), args.cap)
    b = loaded.value
    cls = classify_bundle(b)
    sk = spectral_kernel(b)
    report["normalization"] = loaded.notes
    report.update(cls.to_json())
    report["kernel"] = {sk.sigma_space.points[k]: b.sub_lattice.subspaces[i].key
                        for k, i in enumerate(sk.table)}
    report["verdicts"].extend(c.to_json() for c in cls.checks)
    report["verdicts"].append(_verdict("three open-support criteria agree", "pass"))


def _h_bundle_enumerate(args, report):
    sp = _load(load_space, _input_path(args, "space"), args.cap)
    fq = _load(load_fq, _input_path(args, "fq"))
    filt = args.filt.replace("-", "_")
    maps = enumerate_kernel_maps(sp.value, fq.value, filt, args.cap)
    report["filter"] = args.filt
    report["count"] = len(maps)
    report["kernel_maps"] = [{sp.value.points[x]: k.key for x, k in enumerate(kap)}
                             for kap in maps]


def _h_morphism_check(args, report):
    src = _load(load_bundle, _input_path(args, "src"), args.cap).value
    dst = _load(load_bundle, _input_path(args, "dst"), args.cap).value
    data = _load(load_morphism_data, _input_path(args, "morphism"),
                 src.base, dst.base, src.carrier.q,
                 dst.carrier.dim, src.carrier.dim)
    flat, star = data.value
    mor = check_morphism(src, dst, flat, star)
    report["accepted"] = True
    report["strict"] = mor.strict
    if mor.strict_witness is not None:
        report["strict_witness"] = mor.strict_witness
    report["verdicts"].append(_verdict("vanishing implication (lax law)", "pass"))
    report["verdicts"].append(_verdict("fiber map well defined, continuous, linear", "pass"))
    report["verdicts"].append(_verdict("radical condition", "pass"))


def _h_linloc_check(args, report):
    loaded = _load(load_linloc, _input_path(args, "linloc"), args.cap)
    ll = loaded.value
    report["normalization"] = loaded.notes
    report["verdicts"].append(_verdict("support map preserves all joins", "pass"))
    report["verdicts"].append(_verdict("kernel continuous into lower Vietoris", "pass"))
    report["verdicts"].append(_verdict("comparable primes have equivalent values", "pass"))
    lat = ll.frame.lattice
    report["restriction"] = {lat.elements[i]: ll.sub_lattice.subspaces[v].key
                             for i, v in enumerate(ll.restriction_map.table)}
    report["kernel"] = {lat.elements[p]: ll.sub_lattice.subspaces[v].key
                        for p, v in zip(ll.frame.primes, ll.kernel_table)}
    try:
        report["max_variant"] = max_variant_check(ll).to_json()
    except Exception as e:
        report["max_variant"] = f"unsupported carrier: {e}"


def _h_spec(args, report):
    ll = _load(load_linloc, _input_path(args, "linloc"), args.cap).value
    b = spec_bundle(ll)
    cls = classify_bundle(b)
    report["base_points"] = list(b.base.points)
    report["kappa"] = b.kappa_json()
    report["classification"] = cls.to_json()
    report["verdicts"].append(_verdict(
        "spectrum bundle is spectral and sober",
        "pass" if cls.spectral and cls.sober else "fail"))
    report["verdicts"].append(_verdict(
        "line-support opens match kernel membership", "pass"))


def _h_omega(args, report):
    loaded = _load(load_bundle, _input_path(args, "bundle"), args.cap)
    ll = omega_linloc(loaded.value)
    report["normalization"] = loaded.notes
    report["frame_elements"] = list(ll.frame.lattice.elements)
    report["sigma"] = ll.support_json()
    report["verdicts"].append(_verdict("packaged support table validates", "pass"))


def _h_transpose(args, report):
    b = _load(load_bundle, _input_path(args, "bundle"), args.cap).value
    ll = _load(load_linloc, _input_path(args, "linloc"), args.cap).value
    target = spec_bundle(ll)
    data = _load(load_morphism_data, _input_path(args, "morphism"),
                 b.base, target.base, b.carrier.q,
                 target.carrier.dim, b.carrier.dim)
    flat, star = data.value
    mor = check_morphism(b, target, flat, star)
    rep = adjunction_transpose(mor, ll, args.cap)
    report["inverse_image"] = rep.morphism.underline.inverse_image.to_json()
    report["overline"] = rep.morphism.overline.to_json()
    report["strict"] = rep.morphism.strict
    report["verdicts"].append(_verdict("round trip Spec(transpose) o sob = f",
                                       "pass" if rep.round_trip_ok else "fail"))
    status = "pass" if rep.uniqueness == "unique" else "unverified"
    report["verdicts"].append(_verdict("transpose unique", status,
                                       None if status == "pass" else rep.uniqueness))
    report["candidates_checked"] = rep.candidates_checked


def _h_adjunction_census(args, report):
    b = _load(load_bundle, _input_path(args, "bundle"), args.cap).value
    ll = _load(load_linloc, _input_path(args, "linloc"), args.cap).value
    cen = adjunction_census(b, ll, args.cap)
    report.update(cen.to_json())
    report["verdicts"].append(_verdict("hom-set bijection", "pass" if cen.bijection else "fail"))
    report["verdicts"].append(_verdict("strict hom-set bijection",
                                       "pass" if cen.strict_bijection else "fail"))
    report["verdicts"].append(_verdict("triangle identities",
                                       "pass" if cen.triangles_ok else "fail"))
    report["verdicts"].append(_verdict("transposes unique",
                                       "pass" if cen.all_unique else "fail"))


def _h_dot(args, report):
    given = [f for f in ("lattice", "space", "bundle") if getattr(args, f)]
    if len(given) != 1:
        raise _Exit2({"errors": [{"path": "dot",
                                  "message": "exactly one of --lattice/--space/--bundle"}]})
    kind = given[0]
    if kind == "lattice":
        text = lattice_dot(_load(load_lattice, args.lattice).value)
    elif kind == "space":
        text = space_dot(_load(load_space, args.space).value)
    else:
        text = bundle_dot(_load(load_bundle, args.bundle).value)
    report["kind"] = kind
    report["nodes"] = sum(1 for line in text.splitlines()
                          if line.startswith("  ") and "->" not in line)
    report["edges"] = sum(1 for line in text.splitlines() if "->" in line)
    target = args.dot or args.out
    if target:
        with open(target, "w") as fh:
            fh.write(text)
        report["dot_file"] = target
    else:
        report["dot"] = text


_HANDLERS = {
    "lattice-check": _h_lattice_check,
    "primes": _h_primes,
    "spectrum": _h_spectrum,
    "soberify": _h_soberify,
    "subspaces": _h_subspaces,
    "spec-topology": _h_spec_topology,
    "bundle-build": _h_bundle_build,
    "bundle-classify": _h_bundle_classify,
    "bundle-enumerate": _h_bundle_enumerate,
    "morphism-check": _h_morphism_check,
    "linloc-check": _h_linloc_check,
    "spec": _h_spec,
    "omega": _h_omega,
    "transpose": _h_transpose,
    "adjunction-census": _h_adjunction_census,
    "dot": _h_dot,
}


if __name__ == "__main__":
    sys.exit(main())
