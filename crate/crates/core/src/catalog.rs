//! Built-in library of the named inequalities, with expected bounds as
//! metadata for the verification suite.
//!
//! Coefficients live in `.ineq` source files under `catalog/`, embedded at
//! compile time, so they can be audited and round-tripped through the parser.
//! Expected values are tagged with their provenance: `Reported` values come
//! from the literature the inequality was taken from, `Derived` values were
//! recomputed here and frozen.

use std::collections::BTreeMap;
use std::sync::OnceLock;

use thiserror::Error;

use crate::games::family_f_n2;
use crate::geometry::ineq::InequalityFunctional;
use crate::{rat, Rat};

#[derive(Clone, Debug, Error, PartialEq)]
pub enum CatalogError {
    #[error("unknown catalog entry {name:?}; available: {available}")]
    Unknown { name: String, available: String },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Provenance {
    /// Value quoted from the source the inequality was transcribed from.
    Reported,
    /// Value computed by this crate and frozen as a regression anchor.
    Derived,
}

/// One expected value attached to a catalog entry.
#[derive(Clone, Debug, PartialEq)]
pub enum ExpectedValue {
    Local { k: usize, value: Rat },
    Signaling { value: Rat },
    NoSignaling { k: usize, value: Rat },
    BilocalNs { k: usize, value: Rat },
    /// Heuristic quantum lower bound: seesaw at this dimension should reach
    /// at least `value - slack`.
    SeesawAtLeast { dim: usize, value: f64, slack: f64, best_effort: bool },
    /// Facetness against the entry's own scenario vertex set.
    Facetness { value: Rat },
    StandardLocalFacet { value: bool },
    Ppi { value: bool },
}

#[derive(Clone, Debug)]
pub struct Expected {
    pub check: ExpectedValue,
    pub provenance: Provenance,
}

#[derive(Clone, Debug)]
pub struct CatalogEntry {
    pub name: &'static str,
    pub ineq: InequalityFunctional,
    pub expected: Vec<Expected>,
}

fn reported(check: ExpectedValue) -> Expected {
    Expected { check, provenance: Provenance::Reported }
}

fn derived(check: ExpectedValue) -> Expected {
    Expected { check, provenance: Provenance::Derived }
}

fn parse_embedded(name: &'static str, text: &'static str) -> InequalityFunctional {
    InequalityFunctional::parse_ineq(text)
        .unwrap_or_else(|e| panic!("embedded catalog entry {name} must parse: {e}"))
        .with_name(name)
}

fn build_catalog() -> BTreeMap<&'static str, CatalogEntry> {
    use ExpectedValue::*;
    let mut entries: Vec<CatalogEntry> = Vec::new();

    entries.push(CatalogEntry {
        name: "chsh-smells",
        ineq: parse_embedded("chsh-smells", include_str!("../catalog/chsh-smells.ineq")),
        expected: vec![
            reported(Local { k: 2, value: rat(2) }),
            derived(Signaling { value: rat(3) }),
            derived(NoSignaling { k: 2, value: rat(3) }),
            derived(SeesawAtLeast { dim: 2, value: 2.414_213_56, slack: 1e-4, best_effort: false }),
            reported(StandardLocalFacet { value: true }),
            reported(Ppi { value: true }),
        ],
    });

    entries.push(CatalogEntry {
        name: "s33",
        ineq: parse_embedded("s33", include_str!("../catalog/s33.ineq")),
        expected: vec![
            reported(Local { k: 2, value: rat(3) }),
            reported(Local { k: 4, value: rat(3) }),
            derived(Signaling { value: rat(5) }),
            derived(NoSignaling { k: 2, value: rat(5) }),
            reported(SeesawAtLeast { dim: 2, value: 3.5, slack: 1e-3, best_effort: false }),
            reported(SeesawAtLeast { dim: 3, value: 3.6325, slack: 0.0125, best_effort: true }),
            reported(Ppi { value: false }),
        ],
    });

    entries.push(CatalogEntry {
        name: "s4455",
        ineq: parse_embedded("s4455", include_str!("../catalog/s4455.ineq")),
        expected: vec![
            reported(Local { k: 2, value: rat(12) }),
            reported(Local { k: 5, value: rat(12) }),
            derived(Signaling { value: rat(21) }),
            reported(SeesawAtLeast { dim: 2, value: 13.08, slack: 0.08, best_effort: true }),
            reported(StandardLocalFacet { value: true }),
            reported(Ppi { value: true }),
            reported(Facetness { value: rat(1) }),
        ],
    });

    entries.push(CatalogEntry {
        name: "s222",
        ineq: parse_embedded("s222", include_str!("../catalog/s222.ineq")),
        expected: vec![
            reported(Local { k: 2, value: rat(1) }),
            reported(Local { k: 3, value: rat(2) }),
            reported(Local { k: 4, value: rat(2) }),
            reported(BilocalNs { k: 3, value: rat(2) }),
            derived(Signaling { value: rat(5) }),
            reported(SeesawAtLeast { dim: 3, value: 2.0007, slack: 1e-4, best_effort: false }),
            reported(Ppi { value: false }),
        ],
    });

    entries.push(CatalogEntry {
        name: "s222-333",
        ineq: parse_embedded("s222-333", include_str!("../catalog/s222-333.ineq")),
        expected: vec![
            reported(Local { k: 3, value: rat(0) }),
            reported(NoSignaling { k: 3, value: rat(1) }),
            // the closed-form signaling maximum of this facet is 2; the
            // reported signaling value of 1 is kept as stated and flagged by
            // the verifier
            reported(Signaling { value: rat(1) }),
            reported(StandardLocalFacet { value: true }),
            reported(Ppi { value: false }),
            derived(Facetness { value: rat(1) }),
        ],
    });

    entries.push(CatalogEntry {
        name: "u4",
        ineq: parse_embedded("u4", include_str!("../catalog/u4.ineq")),
        expected: vec![
            reported(Local { k: 2, value: rat(1) }),
            reported(Local { k: 3, value: rat(1) }),
            reported(BilocalNs { k: 2, value: rat(1) }),
            derived(Signaling { value: rat(3) }),
            reported(SeesawAtLeast { dim: 2, value: 1.25, slack: 1e-3, best_effort: false }),
            derived(Facetness { value: rat(1) }),
        ],
    });

    entries.push(CatalogEntry {
        name: "ppi-233",
        ineq: parse_embedded("ppi-233", include_str!("../catalog/ppi-233.ineq")),
        expected: vec![
            derived(Local { k: 3, value: rat(1) }),
            reported(Signaling { value: rat(2) }),
            reported(NoSignaling { k: 2, value: rat(2) }),
            reported(SeesawAtLeast { dim: 2, value: 1.24, slack: 0.01, best_effort: true }),
            reported(Ppi { value: true }),
        ],
    });

    entries.push(CatalogEntry {
        name: "ppi-243",
        ineq: parse_embedded("ppi-243", include_str!("../catalog/ppi-243.ineq")),
        expected: vec![
            derived(Local { k: 3, value: rat(4) }),
            reported(Signaling { value: rat(8) }),
            reported(NoSignaling { k: 2, value: rat(8) }),
            reported(SeesawAtLeast { dim: 2, value: 4.8284, slack: 0.01, best_effort: true }),
            reported(Ppi { value: true }),
        ],
    });

    let table2_bounds: [i64; 10] = [9, 8, 7, 16, 8, 16, 14, 16, 12, 16];
    let table2_sources: [(&'static str, &'static str); 10] = [
        ("ppi-245-01", include_str!("../catalog/ppi-245-01.ineq")),
        ("ppi-245-02", include_str!("../catalog/ppi-245-02.ineq")),
        ("ppi-245-03", include_str!("../catalog/ppi-245-03.ineq")),
        ("ppi-245-04", include_str!("../catalog/ppi-245-04.ineq")),
        ("ppi-245-05", include_str!("../catalog/ppi-245-05.ineq")),
        ("ppi-245-06", include_str!("../catalog/ppi-245-06.ineq")),
        ("ppi-245-07", include_str!("../catalog/ppi-245-07.ineq")),
        ("ppi-245-08", include_str!("../catalog/ppi-245-08.ineq")),
        ("ppi-245-09", include_str!("../catalog/ppi-245-09.ineq")),
        ("ppi-245-10", include_str!("../catalog/ppi-245-10.ineq")),
    ];
    for ((name, text), bound) in table2_sources.into_iter().zip(table2_bounds) {
        entries.push(CatalogEntry {
            name,
            ineq: parse_embedded(name, text),
            expected: vec![
                derived(Local { k: 5, value: rat(bound) }),
                derived(Facetness { value: rat(1) }),
                reported(Ppi { value: true }),
            ],
        });
    }

    let u422_sources: [(&'static str, &'static str); 3] = [
        ("u422-1", include_str!("../catalog/u422-1.ineq")),
        ("u422-2", include_str!("../catalog/u422-2.ineq")),
        ("u422-3", include_str!("../catalog/u422-3.ineq")),
    ];
    for (name, text) in u422_sources {
        entries.push(CatalogEntry {
            name,
            ineq: parse_embedded(name, text),
            expected: vec![
                derived(Local { k: 2, value: rat(0) }),
                derived(Facetness { value: rat(1) }),
                reported(StandardLocalFacet { value: true }),
                reported(Ppi { value: false }),
            ],
        });
    }

    entries.push(CatalogEntry {
        name: "f-32",
        ineq: family_f_n2(3),
        expected: vec![
            reported(Local { k: 3, value: rat(1) }),
            derived(Signaling { value: rat(4) }),
            reported(SeesawAtLeast { dim: 2, value: 1.0688, slack: 8e-4, best_effort: false }),
            reported(SeesawAtLeast { dim: 3, value: 1.2568, slack: 7e-3, best_effort: false }),
            reported(Ppi { value: true }),
        ],
    });
    entries.push(CatalogEntry {
        name: "f-42",
        ineq: family_f_n2(4),
        expected: vec![
            reported(Local { k: 3, value: rat(2) }),
            // no quantum violation is possible: local equals no-signaling
            reported(NoSignaling { k: 3, value: rat(2) }),
            reported(Ppi { value: true }),
        ],
    });
    entries.push(CatalogEntry {
        name: "f-52",
        ineq: family_f_n2(5),
        expected: vec![
            reported(Local { k: 3, value: rat(1) }),
            reported(SeesawAtLeast { dim: 2, value: 1.0016, slack: 1e-3, best_effort: true }),
            reported(Ppi { value: true }),
        ],
    });

    entries.into_iter().map(|e| (e.name, e)).collect()
}

fn catalog() -> &'static BTreeMap<&'static str, CatalogEntry> {
    static CATALOG: OnceLock<BTreeMap<&'static str, CatalogEntry>> = OnceLock::new();
    CATALOG.get_or_init(build_catalog)
}

/// All entry names, sorted.
pub fn catalog_names() -> Vec<&'static str> {
    catalog().keys().copied().collect()
}

/// Looks an entry up by name.
pub fn catalog_get(name: &str) -> Result<&'static CatalogEntry, CatalogError> {
    catalog().get(name).ok_or_else(|| CatalogError::Unknown {
        name: name.to_string(),
        available: catalog_names().join(", "),
    })
}

pub fn catalog_entries() -> impl Iterator<Item = &'static CatalogEntry> {
    catalog().values()
}

/// Expected quantum thresholds of an entry, as (dimension, value, slack,
/// best-effort flag).
pub fn seesaw_targets(entry: &CatalogEntry) -> Vec<(usize, f64, f64, bool)> {
    entry
        .expected
        .iter()
        .filter_map(|e| match e.check {
            ExpectedValue::SeesawAtLeast { dim, value, slack, best_effort } => {
                Some((dim, value, slack, best_effort))
            }
            _ => None,
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn entries_parse_and_round_trip() {
        for entry in catalog_entries() {
            let text = entry.ineq.to_ineq();
            let back = InequalityFunctional::parse_ineq(&text).unwrap();
            assert_eq!(back.dense(), entry.ineq.dense(), "{}", entry.name);
            assert_eq!(back.bound(), entry.ineq.bound(), "{}", entry.name);
        }
    }

    #[test]
    fn named_shapes() {
        let chsh = catalog_get("chsh-smells").unwrap();
        assert_eq!(chsh.ineq.term_count(), 4);
        assert_eq!(*chsh.ineq.bound(), rat(2));
        let s33 = catalog_get("s33").unwrap();
        assert_eq!(s33.ineq.term_count(), 8);
        assert_eq!(*s33.ineq.bound(), rat(3));
        let u4 = catalog_get("u4").unwrap();
        assert_eq!(u4.ineq.term_count(), 5);
        assert_eq!(*u4.ineq.bound(), rat(1));
    }

    #[test]
    fn unknown_name_lists_entries() {
        let err = catalog_get("nope").unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("chsh-smells") && msg.contains("u4"));
    }

    #[test]
    fn every_entry_is_tight_on_its_local_bound() {
        use crate::bounds::local_bound;
        use crate::strategies::EnumOptions;
        for entry in catalog_entries() {
            // the stored bound is the local bound at the native outcome count
            let k = entry.ineq.scenario().outcomes();
            let (l, _) = local_bound(&entry.ineq, k, &EnumOptions::default()).unwrap();
            assert_eq!(
                l,
                *entry.ineq.bound(),
                "{} must be tight at its native k",
                entry.name
            );
        }
    }
}
