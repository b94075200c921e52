//! Reference instances shipped with the crate as election documents.

use crate::election::{ElectionDoc, LoadedElection};
use crate::error::{Error, Result};

/// Every embedded document, by name.
pub const ALL: &[(&str, &str)] = &[
    ("example10", include_str!("../fixtures/example10.json")),
    ("example12", include_str!("../fixtures/example12.json")),
    ("example2", include_str!("../fixtures/example2.json")),
    ("example8", include_str!("../fixtures/example8.json")),
    ("example7", include_str!("../fixtures/example7.json")),
    ("laminar_mixed", include_str!("../fixtures/laminar_mixed.json")),
    ("laminar_party", include_str!("../fixtures/laminar_party.json")),
    ("table1", include_str!("../fixtures/table1.json")),
    ("table11", include_str!("../fixtures/table11.json")),
    ("table11_profile", include_str!("../fixtures/table11_profile.json")),
    ("table2", include_str!("../fixtures/table2.json")),
    ("table3_left", include_str!("../fixtures/table3_left.json")),
    ("table3_right", include_str!("../fixtures/table3_right.json")),
    ("table4a", include_str!("../fixtures/table4a.json")),
    ("table4b", include_str!("../fixtures/table4b.json")),
    ("table5", include_str!("../fixtures/table5.json")),
    ("table6", include_str!("../fixtures/table6.json")),
    ("table7", include_str!("../fixtures/table7.json")),
    ("table8", include_str!("../fixtures/table8.json")),
    ("table9", include_str!("../fixtures/table9.json")),
];

pub fn text(name: &str) -> Result<&'static str> {
    ALL.iter()
        .find(|(n, _)| *n == name)
        .map(|(_, t)| *t)
        .ok_or_else(|| Error::invalid(format!("no fixture named {name:?}")))
}

/// Parses an embedded election document.
pub fn load(name: &str) -> Result<LoadedElection> {
    ElectionDoc::parse(text(name)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_election_fixture_loads() {
        for (name, _) in ALL.iter().filter(|(n, _)| !n.ends_with("_profile")) {
            let loaded = load(name).unwrap_or_else(|e| panic!("{name}: {e}"));
            assert!(loaded.election().unwrap().validate().is_valid(), "{name}");
        }
        assert!(load("missing").is_err());
    }
}
