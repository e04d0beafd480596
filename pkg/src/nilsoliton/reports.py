"""Analysis report assembly: plain JSON-able dicts shared by the HTTP
service and the command-line client, plus the text rendering."""

from __future__ import annotations

from typing import Any

import numpy as np

from . import flow as flow_mod
from . import soliton as soliton_mod
from . import stratify as stratify_mod
from .brackets import Bracket, validate
from .curvature import ricci, ricci_diagonal_sufficient
from .documents import BracketDocument, bracket_to_document, graph_to_document
from .graphs import Graph, graph_einstein_nilradical, payne_graph_matrix

DEFAULT_ANALYSES = ("validate", "ricci", "einstein", "stratum")


def _vector(v) -> list:
    return [float(x) for x in np.asarray(v).reshape(-1)]


def _matrix(m) -> list[list[float]]:
    return [[float(x) for x in row] for row in np.asarray(m)]


def validation_section(b: Bracket, tol: float) -> dict[str, Any]:
    rep = validate(b, tol=tol)
    return {
        "jacobi_ok": rep.jacobi_ok,
        "jacobi_residual": rep.jacobi_residual,
        "nilpotent": rep.nilpotent,
        "nilpotency_step": rep.nilpotency_step,
        "series_dims": list(rep.series_dims),
    }


def ricci_section(b: Bracket) -> dict[str, Any]:
    data = ricci(b)
    return {
        "scalar_curvature": data.scalar_curv,
        "F_value": data.F_value,
        "ricci_diagonal": _vector(np.diag(data.ric)),
        "ricci_is_diagonal": ricci_diagonal_sufficient(b),
        "moment_diagonal": _vector(np.diag(data.moment)),
        "ricci_eigenvalues": _vector(np.linalg.eigvalsh(data.ric)),
    }


def soliton_section(b: Bracket, tol: float) -> dict[str, Any]:
    rep = soliton_mod.is_einstein(b, tol=tol)
    out: dict[str, Any] = {
        "is_einstein": rep.is_einstein,
        "c_mu": rep.c_mu,
        "residual": rep.residual,
    }
    if rep.eigenvalue_type is not None:
        out["eigenvalue_type"] = {
            "values": list(rep.eigenvalue_type.values),
            "multiplicities": list(rep.eigenvalue_type.multiplicities),
            "display": str(rep.eigenvalue_type),
        }
    if rep.eigenvalue_type_error:
        out["eigenvalue_type_error"] = rep.eigenvalue_type_error
    try:
        payne = soliton_mod.payne_test(b, tol=tol)
        out["payne"] = {
            "is_einstein": payne.is_einstein,
            "nu": payne.nu,
            "residual": payne.residual,
        }
    except soliton_mod.NotDiagonalRicciError:
        out["payne"] = None
    return out


def stratum_section(b: Bracket, tol: float) -> dict[str, Any]:
    rep = stratify_mod.certify_stratum(b, tol=max(tol, 1e-9))
    return {
        "status": rep.status,
        "certificate": rep.certificate,
        "beta_plus": _vector(rep.beta_plus),
        "permutation": list(rep.permutation),
        "F_lower_bound": rep.F_lower_bound,
        "coefficients": _vector(rep.beta.coefficients),
        "active_set": list(rep.beta.active_set),
    }


def analyze_document(
    doc: BracketDocument,
    analyses=DEFAULT_ANALYSES,
    tol: float = 1e-8,
    seed: int = 0,
) -> dict[str, Any]:
    unknown = set(analyses) - set(DEFAULT_ANALYSES)
    if unknown:
        raise ValueError(f"unknown analyses: {sorted(unknown)}")
    b = doc.to_bracket()
    report: dict[str, Any] = {
        "name": doc.name or "bracket",
        "dim": b.dim,
        "norm": b.norm(),
        "seed": seed,
    }
    valid = True
    if "validate" in analyses:
        section = validation_section(b, tol)
        report["validation"] = section
        valid = section["jacobi_ok"] and section["nilpotent"]
    report["valid"] = valid
    if not valid:
        return report
    if "ricci" in analyses and not b.is_zero:
        report["ricci"] = ricci_section(b)
    if "einstein" in analyses and not b.is_zero:
        report["einstein"] = soliton_section(b, tol)
    if "stratum" in analyses and not b.is_zero:
        report["stratum"] = stratum_section(b, tol)
    return report


def flow_document(doc: BracketDocument, options: dict | None = None) -> dict[str, Any]:
    opts_in = dict(options or {})
    known = {f.name for f in flow_mod.FlowOptions.__dataclass_fields__.values()}
    unknown = set(opts_in) - known
    if unknown:
        raise ValueError(f"unknown flow options: {sorted(unknown)}")
    opts = flow_mod.FlowOptions(**opts_in)
    b = doc.to_bracket()
    traj = flow_mod.integrate(b, opts)
    classification = flow_mod.classify_limit(
        b, traj.limit, structural_zero_tol=opts.structural_zero_tol
    )
    return {
        "name": doc.name or "bracket",
        "converged": traj.converged,
        "steps": traj.steps,
        "stop_reason": traj.stop_reason,
        "final_time": traj.final_time,
        "final_grad_norm": traj.final_grad_norm,
        "final_F": traj.samples[-1].F_value,
        "limit": bracket_to_document(traj.limit, name=f"{doc.name or 'bracket'}-limit").emit(),
        "structural_zeros": [list(k) for k in traj.structural_zeros],
        "classification": {
            "proper_degeneration": classification.proper_degeneration,
            "evidence": classification.evidence,
            "start_invariants": _invariants_dict(classification.start_invariants),
            "limit_invariants": _invariants_dict(classification.limit_invariants),
        },
        "csv": flow_mod.trajectory_csv(traj),
    }


def _invariants_dict(inv: dict) -> dict:
    return {
        "central_series": list(inv["central_series"]),
        "center_dim": inv["center_dim"],
        "derived_dim": inv["derived_dim"],
    }


def _weighting_dict(w) -> dict[str, Any]:
    return {
        "values": [str(v) for v in w.values],
        "nu": str(w.nu),
        "normalization": w.normalization,
    }


def graph_report(g: Graph, subcommand: str, tol: float = 1e-8) -> dict[str, Any]:
    report: dict[str, Any] = {
        "name": g.name or "graph",
        "vertices": g.vertex_count,
        "edges": [list(e) for e in g.edges],
        "subcommand": subcommand,
    }
    if subcommand == "grst":
        report["document"] = graph_to_document(g).emit()
        return report
    nil = graph_einstein_nilradical(g)
    report["positive"] = nil.positive
    if subcommand in ("positivity", "weighting", "soliton"):
        report["weighting"] = _weighting_dict(nil.weighting)
        report["integer_weighting"] = _weighting_dict(nil.integer_weighting)
        report["nonpositive_edges"] = [
            i + 1 for i in nil.integer_weighting.nonpositive_indices()
        ]
    if subcommand == "soliton":
        if nil.soliton_bracket is not None:
            payne = soliton_mod.payne_test(nil.soliton_bracket, tol=tol)
            report["soliton_document"] = bracket_to_document(
                nil.soliton_bracket, name=f"{g.name or 'graph'}-soliton"
            ).emit()
            report["payne"] = {
                "is_einstein": payne.is_einstein,
                "nu": payne.nu,
                "residual": payne.residual,
            }
        else:
            report["soliton_document"] = None
    if subcommand in ("witness", "positivity"):
        wit = nil.witness if not nil.positive else None
        report["witness"] = (
            {
                "configuration": list(wit.configuration),
                "central_edge": list(wit.central_edge),
                "pendants_at_v": list(wit.pendants_at_v),
                "pendants_at_w": list(wit.pendants_at_w),
                "apexes": list(wit.apexes),
            }
            if wit
            else None
        )
    if subcommand == "matrix":
        report["payne_matrix"] = [[int(x) for x in row] for row in payne_graph_matrix(g)]
    return report


# -- text rendering -------------------------------------------------------------


def _fmt(x) -> str:
    if isinstance(x, float):
        return f"{x:.12g}"
    return str(x)


def render_analyze_text(report: dict[str, Any]) -> str:
    lines = [f"[{report['name']}] dim={report['dim']} norm={_fmt(report['norm'])}"]
    if "validation" in report:
        v = report["validation"]
        step = v["nilpotency_step"]
        lines.append(
            f"  validation: jacobi_ok={v['jacobi_ok']} nilpotent={v['nilpotent']}"
            + (f" step={step}" if step is not None else "")
            + f" series={tuple(v['series_dims'])}"
        )
    if not report.get("valid", True):
        lines.append("  INVALID: not a nilpotent Lie bracket")
        return "\n".join(lines) + "\n"
    if "ricci" in report:
        r = report["ricci"]
        lines.append(
            f"  curvature: scalar={_fmt(r['scalar_curvature'])} F={_fmt(r['F_value'])}"
        )
    if "einstein" in report:
        e = report["einstein"]
        if e["is_einstein"]:
            t = e.get("eigenvalue_type")
            display = t["display"] if t else "unavailable"
            lines.append(f"  Einstein: yes, eigenvalue type {display}")
        else:
            lines.append(f"  Einstein: no (residual {_fmt(e['residual'])})")
        if e.get("payne"):
            p = e["payne"]
            lines.append(
                f"  linear test: pass={p['is_einstein']} nu={_fmt(p['nu'])}"
            )
    if "stratum" in report:
        s = report["stratum"]
        beta = ", ".join(_fmt(x) for x in s["beta_plus"])
        cert = f" via {s['certificate']}" if s["certificate"] else ""
        lines.append(f"  stratum: {s['status']}{cert}; beta+=({beta})")
        lines.append(f"  F lower bound: {_fmt(s['F_lower_bound'])}")
    return "\n".join(lines) + "\n"


def render_flow_text(report: dict[str, Any]) -> str:
    lines = [
        f"[{report['name']}] flow: steps={report['steps']} stop={report['stop_reason']}",
        f"  converged={report['converged']} t={_fmt(report['final_time'])}"
        f" F={_fmt(report['final_F'])} grad={_fmt(report['final_grad_norm'])}",
    ]
    zeros = report["structural_zeros"]
    if zeros:
        keys = ", ".join(str(tuple(k)) for k in zeros)
        lines.append(f"  structural zeros in limit: {keys}")
    limit_entries = report["limit"]["entries"]
    shown = ", ".join(
        f"({e['i']},{e['j']},{e['k']})={_fmt(e['c'])}" for e in limit_entries
    )
    lines.append(f"  limit: {shown}")
    cls = report["classification"]
    lines.append(f"  classification: {cls['evidence']}")
    if cls["proper_degeneration"]:
        lines.append(
            "    derived dim "
            f"{cls['start_invariants']['derived_dim']} -> {cls['limit_invariants']['derived_dim']}"
        )
    return "\n".join(lines) + "\n"


def render_graph_text(report: dict[str, Any]) -> str:
    lines = [
        f"[{report['name']}] graph: p={report['vertices']} q={len(report['edges'])}"
    ]
    if report["subcommand"] == "grst":
        lines.append(f"  edges: {report['edges']}")
        return "\n".join(lines) + "\n"
    lines.append(f"  positive: {report['positive']}")
    if "payne_matrix" in report:
        for row in report["payne_matrix"]:
            lines.append("    " + " ".join(f"{x:3d}" for x in row))
    if "integer_weighting" in report:
        w = report["integer_weighting"]
        lines.append(f"  weighting (integer): ({', '.join(w['values'])}), nu={w['nu']}")
        wq = report["weighting"]
        lines.append(f"  weighting (nu=1): ({', '.join(wq['values'])})")
        if report.get("nonpositive_edges"):
            lines.append(f"  nonpositive edges: {report['nonpositive_edges']}")
    if report.get("witness"):
        wit = report["witness"]
        lines.append(
            f"  witness: configuration {tuple(wit['configuration'])} at central edge "
            f"{tuple(wit['central_edge'])}"
        )
    elif report["subcommand"] == "witness":
        lines.append("  witness: none found")
    if report.get("payne"):
        p = report["payne"]
        lines.append(f"  soliton linear test: pass={p['is_einstein']} nu={_fmt(p['nu'])}")
    return "\n".join(lines) + "\n"
