//! Human-readable rendering for `--format text`.

use serde::Serialize;

use morsecert_core::autf::{
    FreenessChain, InnerVerdict, IntMatrix, PingPongCertificate, RelationReport,
};
use morsecert_core::complex::{HomologyProfile, LinkComplex, Polarity};
use morsecert_core::curvature::CurvatureCertificate;
use morsecert_core::group::{ConjugacyVerdict, DoubledFreeElement};
use morsecert_core::morse::{FinitenessConclusion, FinitenessReport};
use morsecert_core::symmetry::ModelSituationCertificate;

#[derive(Serialize)]
pub struct LinkVertexView {
    pub label: String,
    pub polarity: Polarity,
}

#[derive(Serialize)]
pub struct LinkView {
    pub vertices: Vec<LinkVertexView>,
    /// Edges of the underlying simplicial complex, by label.
    pub edges: Vec<[String; 2]>,
    pub simplex_count: usize,
    pub dimension: Option<usize>,
}

pub fn link_view(link: &LinkComplex) -> LinkView {
    let vertices = link
        .labels()
        .iter()
        .zip(link.polarity())
        .map(|(label, &polarity)| LinkVertexView {
            label: label.clone(),
            polarity,
        })
        .collect();
    let edges = link
        .base()
        .simplices_of_dim(1)
        .into_iter()
        .map(|e| {
            [
                link.base().label(e[0]).to_string(),
                link.base().label(e[1]).to_string(),
            ]
        })
        .collect();
    LinkView {
        vertices,
        edges,
        simplex_count: link.base().simplex_count(),
        dimension: link.base().dim(),
    }
}

pub fn link_text(view: &LinkView) -> String {
    let mut out = vec![format!(
        "{} vertices, {} edges, {} simplices, dimension {:?}",
        view.vertices.len(),
        view.edges.len(),
        view.simplex_count,
        view.dimension
    )];
    let verts: Vec<String> = view
        .vertices
        .iter()
        .map(|v| match v.polarity {
            Polarity::Ascending => format!("{}(asc)", v.label),
            Polarity::Descending => format!("{}(desc)", v.label),
            Polarity::None => v.label.clone(),
        })
        .collect();
    out.push(format!("vertices: {}", verts.join(" ")));
    let edges: Vec<String> = view.edges.iter().map(|[a, b]| format!("{a}~{b}")).collect();
    out.push(format!("edges: {}", edges.join(" ")));
    out.join("\n")
}

pub fn homology(profile: &HomologyProfile) -> String {
    if profile.reduced.is_empty() {
        return "empty complex".to_string();
    }
    profile
        .reduced
        .iter()
        .enumerate()
        .map(|(d, g)| {
            let mut parts = Vec::new();
            if g.betti > 0 {
                parts.push(if g.betti == 1 {
                    "Z".to_string()
                } else {
                    format!("Z^{}", g.betti)
                });
            }
            for t in &g.torsion {
                parts.push(format!("Z/{t}"));
            }
            if parts.is_empty() {
                parts.push("0".to_string());
            }
            format!("H~_{d} = {}", parts.join(" + "))
        })
        .collect::<Vec<_>>()
        .join("\n")
}

pub fn curvature(cert: &CurvatureCertificate) -> String {
    let verdict = serde_json::to_value(cert.verdict)
        .ok()
        .and_then(|v| v.as_str().map(str::to_string))
        .unwrap_or_default();
    let mut out = vec![format!("verdict: {verdict}")];
    if let Some(a) = &cert.min_cycle_angle {
        out.push(format!("minimum link cycle angle: {a}π"));
    }
    if let Some(w) = &cert.witness {
        out.push(format!(
            "short cycle at vertex {} through {} (total {}π)",
            w.vertex,
            w.cycle.join("-"),
            w.total_angle
        ));
    }
    out.join("\n")
}

pub fn finiteness(report: &FinitenessReport) -> String {
    let mut out = Vec::new();
    let side = |name: &str, a: &morsecert_core::morse::LinkAnalysis| {
        format!(
            "{name} link: {} vertices, connected: {}, simply connected: {}",
            a.vertex_count,
            a.connected,
            serde_json::to_value(a.simply_connected)
                .ok()
                .and_then(|v| v.as_str().map(str::to_string))
                .unwrap_or_default(),
        )
    };
    out.push(side("ascending", &report.ascending));
    out.push(side("descending", &report.descending));
    let verified = match &report.conclusion {
        FinitenessConclusion::ExactlyF { .. } => "mechanically verified link topology; conclusion contingent on the cited finiteness criterion",
        FinitenessConclusion::AtLeastF { .. } => "mechanically verified lower bound",
        FinitenessConclusion::Inconclusive => "no conclusion",
    };
    out.push(format!("{} [{verified}]", report.statement));
    out.join("\n")
}

pub fn certificate(name: &str, cert: &ModelSituationCertificate) -> String {
    let mut out = vec![format!("model situation for {name}:")];
    let mark = |b: bool| if b { "ok" } else { "FAIL" };
    out.push(format!(
        "  nonpositively curved:        {}",
        mark(cert.checks.npc)
    ));
    out.push(format!(
        "  Morse weighting valid:       {}",
        mark(cert.checks.morse_valid)
    ));
    out.push(format!(
        "  epimorphism onto Z:          {}",
        mark(cert.checks.epi_onto_z)
    ));
    out.push(format!(
        "  weight-equivariant symmetry: {}",
        mark(cert.checks.equivariant)
    ));
    out.push(format!(
        "  fixes the base vertex:       {}",
        mark(cert.checks.fixes_v)
    ));
    out.push(format!(
        "  free on the link:            {}",
        mark(cert.checks.free_on_link)
    ));
    out.push(format!(
        "  finite order:                {}",
        mark(cert.checks.finite_order)
    ));
    for d in &cert.morse_diagnostics {
        out.push(format!("  note: {d}"));
    }
    match (&cert.conclusion, &cert.chosen_t) {
        (Some(conclusion), Some(t)) => {
            let word: Vec<String> = t
                .word
                .iter()
                .map(|s| format!("{}{}", s.edge(), s.dir()))
                .collect();
            out.push(format!(
                "  chosen t: factor {}, loop {}",
                t.factor,
                word.join(" ")
            ));
            out.push(format!("  conclusion: {conclusion}"));
            out.push(
                "  (link topology, heights, and equivariance are mechanically verified; the \
                 conclusion uses the height-separation argument)"
                    .to_string(),
            );
        }
        _ => {
            out.push(format!(
                "  conclusion withheld; failed checks: {}",
                cert.failed.join(", ")
            ));
        }
    }
    out.join("\n")
}

pub fn conjugacy(
    g: &DoubledFreeElement,
    h: &DoubledFreeElement,
    verdict: &ConjugacyVerdict,
) -> String {
    match verdict {
        ConjugacyVerdict::Conjugate { witness } => {
            format!("{g} and {h} are conjugate: c = {witness}")
        }
        ConjugacyVerdict::NoConjugator {
            bound,
            restricted_to_kernel,
            tested,
        } => format!(
            "no conjugator of total length <= {bound}{} carries {g} to {h} ({tested} candidates exhausted)",
            if *restricted_to_kernel {
                " in the kernel"
            } else {
                ""
            }
        ),
    }
}

pub fn relations(report: &RelationReport) -> String {
    let mut out = vec![format!("relations at rank {}:", report.rank)];
    for c in &report.checks {
        out.push(format!(
            "  {} ... {}",
            c.name,
            if c.holds { "ok" } else { "FAIL" }
        ));
        if let Some(d) = &c.detail {
            out.push(format!("    {d}"));
        }
    }
    out.join("\n")
}

pub fn matrix(m: &IntMatrix) -> String {
    m.rows
        .iter()
        .map(|r| {
            r.iter()
                .map(|x| x.to_string())
                .collect::<Vec<_>>()
                .join(" ")
        })
        .collect::<Vec<_>>()
        .join("\n")
}

pub fn pingpong(cert: &PingPongCertificate, chain: &FreenessChain) -> String {
    let iv = |i: &morsecert_core::autf::ProjInterval| serde_json::to_string(i).unwrap_or_default();
    let mut out = vec![format!("ping-pong certificate at N = {}", cert.n)];
    out.push(format!(
        "  X_A = {} ∪ {}",
        iv(&cert.domain_a.attracting),
        iv(&cert.domain_a.repelling)
    ));
    out.push(format!(
        "  X_B = {} ∪ {}",
        iv(&cert.domain_b.attracting),
        iv(&cert.domain_b.repelling)
    ));
    for c in &cert.inclusions {
        out.push(format!(
            "  {}({}) ⊆ {} ... {}",
            c.map,
            c.from,
            c.into,
            if c.holds { "ok" } else { "FAIL" }
        ));
    }
    out.push("deduction:".to_string());
    for s in &chain.steps {
        out.push(format!("  - {s}"));
    }
    out.join("\n")
}

pub fn inner(verdict: &InnerVerdict) -> String {
    match verdict {
        InnerVerdict::Inner { .. } => {
            let json = serde_json::to_value(verdict).unwrap_or_default();
            format!(
                "inner: conjugation by {}",
                json.get("conjugator")
                    .and_then(|v| v.as_str())
                    .unwrap_or("?")
            )
        }
        InnerVerdict::NotInner => "not inner".to_string(),
    }
}
