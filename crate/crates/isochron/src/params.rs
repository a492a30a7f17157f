//! Parameter sets: the declared symbols everything symbolic is built over.
//!
//! Declaration order is fixed at creation and defines the canonical
//! monomial ordering used for printing and leading-term rules.

use std::fmt;
use std::sync::Arc;

use crate::error::UsageError;

/// One declared parameter.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParamDescriptor {
    pub name: String,
    /// Declared to take only real values.
    pub declared_real: bool,
    /// Declared to never vanish (may appear in denominators).
    pub declared_nonzero: bool,
}

impl ParamDescriptor {
    pub fn new(name: &str, declared_real: bool, declared_nonzero: bool) -> Self {
        ParamDescriptor {
            name: name.to_string(),
            declared_real,
            declared_nonzero,
        }
    }

    /// Shorthand for a real, nonzero parameter.
    pub fn real_nonzero(name: &str) -> Self {
        Self::new(name, true, true)
    }

    /// Shorthand for a real parameter with no nonzero declaration.
    pub fn real(name: &str) -> Self {
        Self::new(name, true, false)
    }

    /// Shorthand for a general complex parameter.
    pub fn complex(name: &str) -> Self {
        Self::new(name, false, false)
    }
}

/// Ordered, immutable list of parameter descriptors.
///
/// Cheap to clone; compared by content, not identity.
#[derive(Debug, Clone)]
pub struct ParamSet(Arc<Vec<ParamDescriptor>>);

fn valid_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

impl ParamSet {
    pub fn new(descriptors: Vec<ParamDescriptor>) -> Result<Self, UsageError> {
        for (idx, d) in descriptors.iter().enumerate() {
            if !valid_identifier(&d.name) {
                return Err(UsageError::new(format!(
                    "invalid parameter name `{}`",
                    d.name
                )));
            }
            if d.name == "i" {
                return Err(UsageError::new(
                    "`i` is reserved for the imaginary unit".to_string(),
                ));
            }
            if descriptors[..idx].iter().any(|e| e.name == d.name) {
                return Err(UsageError::new(format!(
                    "duplicate parameter name `{}`",
                    d.name
                )));
            }
        }
        Ok(ParamSet(Arc::new(descriptors)))
    }

    /// The empty parameter set (purely numeric coefficients).
    pub fn empty() -> Self {
        ParamSet(Arc::new(Vec::new()))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn descriptor(&self, index: usize) -> &ParamDescriptor {
        &self.0[index]
    }

    pub fn descriptors(&self) -> &[ParamDescriptor] {
        &self.0
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.0.iter().position(|d| d.name == name)
    }

    pub fn name(&self, index: usize) -> &str {
        &self.0[index].name
    }

    pub fn all_real(&self) -> bool {
        self.0.iter().all(|d| d.declared_real)
    }

    /// The set with the named parameters removed, order otherwise preserved.
    pub fn without(&self, names: &[&str]) -> Result<ParamSet, UsageError> {
        for n in names {
            if self.index_of(n).is_none() {
                return Err(UsageError::new(format!("unknown parameter `{n}`")));
            }
        }
        let kept = self
            .0
            .iter()
            .filter(|d| !names.contains(&d.name.as_str()))
            .cloned()
            .collect();
        ParamSet::new(kept)
    }
}

impl PartialEq for ParamSet {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || self.0 == other.0
    }
}

impl Eq for ParamSet {}

impl fmt::Display for ParamSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<&str> = self.0.iter().map(|d| d.name.as_str()).collect();
        write!(f, "[{}]", names.join(", "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_duplicates_and_reserved() {
        assert!(ParamSet::new(vec![
            ParamDescriptor::real("a"),
            ParamDescriptor::real("a")
        ])
        .is_err());
        assert!(ParamSet::new(vec![ParamDescriptor::real("i")]).is_err());
        assert!(ParamSet::new(vec![ParamDescriptor::real("2x")]).is_err());
    }

    #[test]
    fn lookup_respects_declaration_order() {
        let ps = ParamSet::new(vec![
            ParamDescriptor::real_nonzero("c0"),
            ParamDescriptor::real("c1"),
        ])
        .unwrap();
        assert_eq!(ps.index_of("c1"), Some(1));
        assert_eq!(ps.name(0), "c0");
        assert!(ps.descriptor(0).declared_nonzero);
    }
}
