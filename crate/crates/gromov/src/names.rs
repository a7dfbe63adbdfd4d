//! Published names (X4, X5A..X5C, I1..I17, R1..R9) keyed by canonical form.

use std::collections::BTreeMap;

use gromov_core::{canonical_form, CanonicalCode};

use crate::fixture::{self, Fixture};

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct NameMap {
    names: BTreeMap<(usize, CanonicalCode), String>,
}

impl NameMap {
    pub fn bundled() -> Self {
        let mut map = NameMap::default();
        for entry in fixture::named_entries(fixture::NAMED_SMALL).expect("bundled names parse") {
            let s = entry.structure.expect("bundled names are valid");
            map.insert(s.n(), canonical_form(&s).code, entry.name);
        }
        let six = Fixture::parse_tabulated(fixture::TABLE_SIX).expect("bundled table parses");
        for (_, row) in six.rows() {
            let s = row.structure.as_ref().expect("bundled table rows are valid");
            map.insert(6, canonical_form(s).code, row.name.clone().expect("tabulated rows are named"));
        }
        map
    }

    pub fn insert(&mut self, n: usize, code: CanonicalCode, name: String) {
        self.names.insert((n, code), name);
    }

    pub fn get(&self, n: usize, code: CanonicalCode) -> Option<&str> {
        self.names.get(&(n, code)).map(String::as_str)
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn thirty_names() {
        let map = NameMap::bundled();
        assert_eq!(map.len(), 1 + 3 + 26);
        let x4 = canonical_form(&"124,213,324,413".parse().unwrap()).code;
        assert_eq!(map.get(4, x4), Some("X4"));
        let r1 = canonical_form(&"124,213,324,413,513,613".parse().unwrap()).code;
        assert_eq!(map.get(6, r1), Some("R1"));
    }
}
