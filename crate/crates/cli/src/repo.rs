//! Classification with per-class metadata and the on-disk class repository:
//! one `.ineq` plus one `.meta` sidecar per class, named by a content hash of
//! the canonical form. Plain diff-able files.

use std::path::Path;

use anyhow::{Context, Result};
use sha2::{Digest, Sha256};

use smells_core::bounds::signaling_bound;
use smells_core::geometry::{facetness, standard_facet_report};
use smells_core::strategies::VertexSet;
use smells_core::symmetry::{classify_vertex_set, SymmetryGroup};
use smells_core::{InequalityFunctional, Rat, ResourceCaps};

pub struct ClassMeta {
    pub representative: InequalityFunctional,
    pub hash: String,
    pub is_positivity: bool,
    pub is_ppi: bool,
    /// Facetness against the classified polytope (1 for every enumerated
    /// facet; kept as a sanity value).
    pub own_facetness: Rat,
    /// Facetness of the lifted inequality against the standard local
    /// polytope, when computed.
    pub standard_facetness: Option<Rat>,
    pub is_standard_local_facet: Option<bool>,
    pub signaling: Rat,
}

pub struct ClassReport {
    pub scenario: smells_core::Scenario,
    pub polytope_dim: usize,
    pub vertex_count: usize,
    pub classes: Vec<ClassMeta>,
}

impl ClassReport {
    pub fn class_count(&self) -> usize {
        self.classes.iter().filter(|c| !c.is_positivity).count()
    }

    pub fn ppi_count(&self) -> usize {
        self.classes
            .iter()
            .filter(|c| !c.is_positivity && c.is_ppi)
            .count()
    }

    pub fn standard_facet_count(&self) -> Option<usize> {
        if self.classes.iter().any(|c| c.is_standard_local_facet.is_none()) {
            return None;
        }
        Some(
            self.classes
                .iter()
                .filter(|c| !c.is_positivity && c.is_standard_local_facet == Some(true))
                .count(),
        )
    }

    pub fn max_standard_facetness(&self) -> Option<Rat> {
        self.classes
            .iter()
            .filter(|c| !c.is_positivity)
            .filter_map(|c| c.standard_facetness.clone())
            .max()
    }

    pub fn summary(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("scenario: {}\n", self.scenario));
        out.push_str(&format!(
            "vertices: {}  polytope dimension: {}\n",
            self.vertex_count, self.polytope_dim
        ));
        out.push_str(&format!(
            "classes: {} (positivity excluded; {} total)\n",
            self.class_count(),
            self.classes.len()
        ));
        out.push_str(&format!("PPI classes: {}\n", self.ppi_count()));
        if let Some(lf) = self.standard_facet_count() {
            out.push_str(&format!("standard-local facet classes: {lf}\n"));
        }
        if let Some(mf) = self.max_standard_facetness() {
            out.push_str(&format!("max standard facetness: {mf}\n"));
        }
        for c in &self.classes {
            out.push_str(&format!(
                "[{}] pos={} ppi={}{}{} :: {}\n",
                &c.hash[..12],
                c.is_positivity,
                c.is_ppi,
                match &c.standard_facetness {
                    Some(f) => format!(" std-facetness={f}"),
                    None => String::new(),
                },
                match c.is_standard_local_facet {
                    Some(b) => format!(" l-facet={b}"),
                    None => String::new(),
                },
                c.representative.dump_line()
            ));
        }
        out
    }
}

pub fn content_hash(ineq: &InequalityFunctional) -> String {
    let mut hasher = Sha256::new();
    hasher.update(ineq.to_ineq().as_bytes());
    let digest = hasher.finalize();
    digest.iter().map(|b| format!("{b:02x}")).collect()
}

/// Classifies a vertex set and decorates every class with PPI, facetness, and
/// (optionally) standard-polytope facet data.
pub fn classify_with_meta(
    vertices: &VertexSet,
    caps: &ResourceCaps,
    standard_checks: bool,
) -> Result<ClassReport> {
    let sc = vertices.scenario().clone();
    let classification = classify_vertex_set(vertices, caps)?;
    let group = SymmetryGroup::new(&sc);
    let points = vertices.rational_points();
    // standard checks walk k^(sum m) deterministic strategies per class
    let standard_feasible = standard_checks
        && (sc.outcomes() as u64)
            .checked_pow(sc.node_count() as u32)
            .is_some_and(|c| c <= 1_000_000);

    let classes: Vec<ClassMeta> = classification
        .classes
        .iter()
        .map(|class| -> Result<ClassMeta> {
            let rep = &class.representative;
            let values: Vec<Rat> = points.iter().map(|p| rep.evaluate_point(p)).collect();
            let own = facetness(&values, rep.bound(), &points)?;
            let (std_facetness, std_facet) = if standard_feasible {
                let report = standard_facet_report(rep, caps.max_vertices)?;
                let denom = (report.polytope_dim - 1) as u64;
                (
                    Some(Rat::new(
                        (report.saturating_dim as u64).into(),
                        denom.into(),
                    )),
                    Some(report.is_facet),
                )
            } else {
                (None, None)
            };
            Ok(ClassMeta {
                hash: content_hash(rep),
                is_ppi: group.is_ppi(rep),
                is_positivity: class.is_positivity,
                own_facetness: own,
                standard_facetness: std_facetness,
                is_standard_local_facet: std_facet,
                signaling: signaling_bound(rep),
                representative: rep.clone(),
            })
        })
        .collect::<Result<Vec<_>>>()?;

    Ok(ClassReport {
        scenario: sc,
        polytope_dim: classification.polytope_dim,
        vertex_count: classification.vertex_count,
        classes,
    })
}

fn scenario_dir_name(sc: &smells_core::Scenario) -> String {
    sc.to_string().replace(' ', "_").replace('=', "")
}

/// Writes one `.ineq` + `.meta` pair per class; returns the class count.
pub fn write_repository(root: &Path, report: &ClassReport) -> Result<usize> {
    let dir = root.join(scenario_dir_name(&report.scenario));
    std::fs::create_dir_all(&dir)
        .with_context(|| format!("creating {}", dir.display()))?;
    for class in &report.classes {
        let stem = &class.hash[..16];
        std::fs::write(
            dir.join(format!("{stem}.ineq")),
            class.representative.to_ineq(),
        )?;
        let mut meta = String::new();
        meta.push_str(&format!("scenario = {}\n", report.scenario));
        meta.push_str(&format!("positivity = {}\n", class.is_positivity));
        meta.push_str(&format!("ppi = {}\n", class.is_ppi));
        meta.push_str(&format!("facetness = {}\n", class.own_facetness));
        if let Some(f) = &class.standard_facetness {
            meta.push_str(&format!("standard_facetness = {f}\n"));
        }
        if let Some(b) = class.is_standard_local_facet {
            meta.push_str(&format!("standard_local_facet = {b}\n"));
        }
        meta.push_str(&format!("signaling_bound = {}\n", class.signaling));
        meta.push_str(&format!("local_bound = {}\n", class.representative.bound()));
        std::fs::write(dir.join(format!("{stem}.meta")), meta)?;
    }
    Ok(report.classes.len())
}

