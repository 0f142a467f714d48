//! Verification suites: the reference facet tables and the catalog's expected
//! values. Every check prints one PASS/FAIL/SKIP line; exact values compare
//! exactly, tolerances apply only to the floating-point quantum checks.

use anyhow::{bail, Result};

use smells_core::bounds::{bilocal_ns_bound, local_bound, ns_bound, signaling_bound};
use smells_core::catalog::{catalog_entries, catalog_get, CatalogEntry, ExpectedValue, Provenance};
use smells_core::geometry::{facetness, standard_facet_report};
use smells_core::strategies::{enumerate_vertices, EnumOptions, Scenario};
use smells_core::symmetry::SymmetryGroup;
use smells_core::{Rat, ResourceCaps};
use smells_quantum::{seesaw_at_k, SeesawOptions};

struct Reporter {
    passed: usize,
    failed: usize,
    skipped: usize,
}

impl Reporter {
    fn new() -> Self {
        Reporter { passed: 0, failed: 0, skipped: 0 }
    }

    fn check(&mut self, name: &str, expected: &str, got: &str, ok: bool) {
        if ok {
            self.passed += 1;
            println!("PASS {name}: {got}");
        } else {
            self.failed += 1;
            println!("FAIL {name}: expected {expected}, got {got}");
        }
    }

    fn skip(&mut self, name: &str, why: &str) {
        self.skipped += 1;
        println!("SKIP {name}: {why}");
    }

    fn finish(self) -> Result<()> {
        println!(
            "summary: {} passed, {} failed, {} skipped",
            self.passed, self.failed, self.skipped
        );
        if self.failed > 0 {
            bail!("{} verification checks failed", self.failed);
        }
        Ok(())
    }
}

pub fn run_suite(
    suite: &str,
    max_scenario: &str,
    seed: u64,
    skip_quantum: bool,
    caps: &ResourceCaps,
) -> Result<()> {
    match suite {
        "paper-tables" => paper_tables(max_scenario, caps),
        "catalog" => catalog_suite(seed, skip_quantum, caps),
        other => bail!("unknown suite {other}"),
    }
}

struct TableRow {
    scenario: &'static str,
    classes: usize,
    ppi: Option<usize>,
    standard_facets: Option<usize>,
}

fn paper_tables(max_scenario: &str, caps: &ResourceCaps) -> Result<()> {
    let mut rows = vec![
        TableRow { scenario: "n=2 m=2,2 k=2 mode=smells", classes: 1, ppi: Some(1), standard_facets: Some(1) },
        TableRow { scenario: "n=2 m=2,2 k=3 mode=smells", classes: 1, ppi: Some(1), standard_facets: Some(0) },
        TableRow { scenario: "n=2 m=3,3 k=2 mode=smells", classes: 1, ppi: Some(1), standard_facets: Some(1) },
        TableRow { scenario: "n=2 m=3,3 k=3 mode=smells", classes: 4, ppi: Some(2), standard_facets: Some(0) },
        TableRow { scenario: "n=2 m=3,3 k=4 mode=smells", classes: 3, ppi: Some(2), standard_facets: Some(0) },
        TableRow { scenario: "n=3 m=2,2,2 k=2 mode=smells", classes: 3, ppi: Some(0), standard_facets: Some(0) },
        TableRow { scenario: "n=3 m=2,2,2 k=2 mode=unanimous", classes: 3, ppi: Some(1), standard_facets: Some(0) },
        TableRow { scenario: "n=3 m=2,2,2 k=3 mode=unanimous", classes: 7, ppi: Some(2), standard_facets: Some(0) },
    ];
    if max_scenario == "full" {
        rows.push(TableRow {
            scenario: "n=4 m=2,2,2,2 k=2 mode=unanimous",
            classes: 371,
            ppi: Some(12),
            standard_facets: Some(3),
        });
    }

    let mut rep = Reporter::new();
    for row in rows {
        let sc: Scenario = row.scenario.parse()?;
        let opts = EnumOptions { cap_k_at_saturation: true, caps: caps.clone() };
        let vs = enumerate_vertices(&sc, &opts)?;
        let report = crate::repo::classify_with_meta(&vs, caps, true)?;
        rep.check(
            &format!("classes[{}]", row.scenario),
            &row.classes.to_string(),
            &report.class_count().to_string(),
            report.class_count() == row.classes,
        );
        if let Some(want) = row.ppi {
            let got = report.ppi_count();
            rep.check(
                &format!("ppi[{}]", row.scenario),
                &want.to_string(),
                &got.to_string(),
                got == want,
            );
        }
        if let Some(want) = row.standard_facets {
            match report.standard_facet_count() {
                Some(got) => rep.check(
                    &format!("standard-facets[{}]", row.scenario),
                    &want.to_string(),
                    &got.to_string(),
                    got == want,
                ),
                None => rep.skip(
                    &format!("standard-facets[{}]", row.scenario),
                    "standard polytope too large",
                ),
            }
        }
        // the three CHSH scenarios: the single class is CHSH itself,
        // embedded on the inputs {0,1} of each party
        if row.classes == 1 && sc.parties() == 2 {
            let group = SymmetryGroup::new(&sc);
            let chsh = &catalog_get("chsh-smells")?.ineq;
            let mut dense = vec![Rat::from_integer(0.into()); sc.coord_count()];
            for (x, sigma, coeff) in chsh.terms() {
                let ti = sc.tuple_index(&x);
                let si = sc
                    .sigma_list()
                    .iter()
                    .position(|s| *s == sigma)
                    .expect("ALL exists in every scenario");
                dense[sc.coord_index(ti, si)] = coeff;
            }
            let chsh_here = smells_core::InequalityFunctional::from_dense(
                sc.clone(),
                &dense,
                chsh.bound().clone(),
            );
            let rep_class = report
                .classes
                .iter()
                .find(|c| !c.is_positivity)
                .expect("one class");
            let same = group.canonical_key(&rep_class.representative)
                == group.canonical_key(&chsh_here);
            rep.check(
                &format!("chsh-class[{}]", row.scenario),
                "CHSH canonical form",
                if same { "CHSH canonical form" } else { "different class" },
                same,
            );
        }
    }
    rep.finish()
}

fn check_rat(rep: &mut Reporter, name: &str, want: &Rat, got: &Rat) {
    rep.check(name, &want.to_string(), &got.to_string(), want == got);
}

/// Recomputes every computable expected value of one entry.
fn verify_entry_inner(
    rep: &mut Reporter,
    entry: &CatalogEntry,
    seed: u64,
    skip_quantum: bool,
    caps: &ResourceCaps,
) -> Result<()> {
    let name = entry.name;
    let ineq = &entry.ineq;
    let opts = EnumOptions { cap_k_at_saturation: true, caps: caps.clone() };
    for expected in &entry.expected {
        let tag = match expected.provenance {
            Provenance::Reported => "reported",
            Provenance::Derived => "derived",
        };
        match &expected.check {
            ExpectedValue::Local { k, value } => {
                let (got, _) = local_bound(ineq, *k, &opts)?;
                check_rat(rep, &format!("{name}.local(k={k})[{tag}]"), value, &got);
            }
            ExpectedValue::Signaling { value } => {
                let got = signaling_bound(ineq);
                check_rat(rep, &format!("{name}.signaling[{tag}]"), value, &got);
            }
            ExpectedValue::NoSignaling { k, value } => {
                let vars = k.pow(ineq.scenario().parties() as u32) as u64
                    * ineq.scenario().tuple_count() as u64;
                if vars > 4096 {
                    rep.skip(&format!("{name}.ns(k={k})"), "LP too large");
                    continue;
                }
                let (got, _) = ns_bound(ineq, *k)?;
                check_rat(rep, &format!("{name}.ns(k={k})[{tag}]"), value, &got);
            }
            ExpectedValue::BilocalNs { k, value } => {
                let got = bilocal_ns_bound(ineq, *k, caps)?;
                check_rat(rep, &format!("{name}.bilocal-ns(k={k})[{tag}]"), value, &got);
            }
            ExpectedValue::Facetness { value } => {
                let vs = enumerate_vertices(ineq.scenario(), &opts)?;
                let points = vs.rational_points();
                let values: Vec<Rat> =
                    points.iter().map(|p| ineq.evaluate_point(p)).collect();
                let got = facetness(&values, ineq.bound(), &points)?;
                check_rat(rep, &format!("{name}.facetness[{tag}]"), value, &got);
            }
            ExpectedValue::StandardLocalFacet { value } => {
                let count = (ineq.scenario().outcomes() as u64)
                    .checked_pow(ineq.scenario().node_count() as u32);
                if count.is_none_or(|c| c > 1_000_000) {
                    rep.skip(&format!("{name}.standard-local-facet"), "standard polytope too large");
                    continue;
                }
                let report = standard_facet_report(ineq, caps.max_vertices)?;
                rep.check(
                    &format!("{name}.standard-local-facet[{tag}]"),
                    &value.to_string(),
                    &report.is_facet.to_string(),
                    report.is_facet == *value,
                );
            }
            ExpectedValue::Ppi { value } => {
                let group = SymmetryGroup::new(ineq.scenario());
                let got = group.is_ppi(ineq);
                rep.check(
                    &format!("{name}.ppi[{tag}]"),
                    &value.to_string(),
                    &got.to_string(),
                    got == *value,
                );
            }
            ExpectedValue::SeesawAtLeast { dim, value, slack, best_effort } => {
                if skip_quantum {
                    rep.skip(&format!("{name}.seesaw(d={dim})"), "quantum checks disabled");
                    continue;
                }
                let sopts = SeesawOptions {
                    restarts: 50,
                    seed,
                    max_hilbert_dim: caps.max_hilbert_dim,
                    ..Default::default()
                };
                let k = ineq.scenario().outcomes();
                match seesaw_at_k(ineq, k, *dim, &sopts) {
                    Ok(out) => {
                        let target = value - slack;
                        let label = if *best_effort { "best-effort " } else { "" };
                        rep.check(
                            &format!("{name}.seesaw(d={dim})[{label}{tag}]"),
                            &format!(">= {target}"),
                            &format!("{:.6}", out.value),
                            out.value >= target,
                        );
                    }
                    Err(e) => rep.skip(&format!("{name}.seesaw(d={dim})"), &e.to_string()),
                }
            }
        }
    }
    Ok(())
}

pub fn verify_entry(name: &str, skip_quantum: bool, seed: u64, caps: &ResourceCaps) -> Result<()> {
    let entry = catalog_get(name)?;
    let mut rep = Reporter::new();
    verify_entry_inner(&mut rep, entry, seed, skip_quantum, caps)?;
    rep.finish()
}

fn catalog_suite(seed: u64, skip_quantum: bool, caps: &ResourceCaps) -> Result<()> {
    let mut rep = Reporter::new();
    for entry in catalog_entries() {
        verify_entry_inner(&mut rep, entry, seed, skip_quantum, caps)?;
    }
    // chain property: local <= bilocal-NS <= NS <= signaling on every entry
    for entry in catalog_entries() {
        let ineq = &entry.ineq;
        let sc = ineq.scenario();
        let k = sc.outcomes();
        let opts = EnumOptions { cap_k_at_saturation: true, caps: caps.clone() };
        let (local, _) = local_bound(ineq, k, &opts)?;
        let s = signaling_bound(ineq);
        let vars = k.pow(sc.parties() as u32) as u64 * sc.tuple_count() as u64;
        if vars > 4096 {
            rep.skip(&format!("{}.chain", entry.name), "NS LP too large");
            continue;
        }
        let (ns, _) = ns_bound(ineq, k)?;
        let mut ok = local <= ns && ns <= s;
        let mut detail = format!("local {local} <= ns {ns} <= signaling {s}");
        if sc.parties() >= 3 {
            let bl = bilocal_ns_bound(ineq, k, caps)?;
            ok = ok && local <= bl && bl <= ns;
            detail = format!("local {local} <= bilocal {bl} <= ns {ns} <= signaling {s}");
        }
        rep.check(&format!("{}.chain", entry.name), "monotone chain", &detail, ok);
    }
    rep.finish()
}
