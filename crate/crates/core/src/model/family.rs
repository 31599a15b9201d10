//! Ergodic families: one coefficient source per phase, plus the
//! phase-averaged quantities the Thouless formula needs. Families are
//! registered by name so front ends can pick one from configuration.

use std::collections::BTreeMap;

use super::jensen::jensen_log_integral_closed;
use super::source::{CoefficientSource, ConstantModel};
use super::{Coupling, HarperModel, ModelError};

pub trait ErgodicFamily: Send + Sync {
    /// The registry name of this kind of family.
    fn kind(&self) -> &'static str;

    /// Member of the family at phase `theta` in `[0, 1)`.
    fn member(&self, theta: f64) -> Box<dyn CoefficientSource>;

    /// Phase average of `log |a_0|`.
    fn mean_log_offdiag(&self) -> f64;

    /// Bound on `||H||` valid for every member.
    fn norm_bound(&self) -> f64;
}

/// Extended Harper family at fixed coupling and frequency.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HarperFamily {
    pub coupling: Coupling,
    pub alpha: f64,
}

impl HarperFamily {
    pub fn new(coupling: Coupling, alpha: f64) -> Result<Self, ModelError> {
        HarperModel::new(coupling, alpha, 0.0)?;
        Ok(Self { coupling, alpha })
    }

    pub fn model(&self, theta: f64) -> HarperModel {
        HarperModel { coupling: self.coupling, alpha: self.alpha, theta: theta.rem_euclid(1.0) }
    }
}

impl ErgodicFamily for HarperFamily {
    fn kind(&self) -> &'static str {
        "harper"
    }

    fn member(&self, theta: f64) -> Box<dyn CoefficientSource> {
        Box::new(self.model(theta))
    }

    fn mean_log_offdiag(&self) -> f64 {
        jensen_log_integral_closed(&self.coupling)
    }

    fn norm_bound(&self) -> f64 {
        self.coupling.norm_bound()
    }
}

/// A constant model seen as a (trivially) ergodic family.
impl ErgodicFamily for ConstantModel {
    fn kind(&self) -> &'static str {
        "constant"
    }

    fn member(&self, _theta: f64) -> Box<dyn CoefficientSource> {
        Box::new(*self)
    }

    fn mean_log_offdiag(&self) -> f64 {
        self.a.norm().ln()
    }

    fn norm_bound(&self) -> f64 {
        2.0 * self.a.norm() + self.b.abs()
    }
}

/// Parameters a family constructor may draw from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FamilyParams {
    pub lambda: (f64, f64, f64),
    pub alpha: f64,
}

pub type FamilyBuilder = fn(&FamilyParams) -> Result<Box<dyn ErgodicFamily>, ModelError>;

/// Name -> constructor table for ergodic families.
#[derive(Clone)]
pub struct FamilyRegistry {
    builders: BTreeMap<&'static str, FamilyBuilder>,
}

impl FamilyRegistry {
    pub fn empty() -> Self {
        Self { builders: BTreeMap::new() }
    }

    /// `harper` (extended Harper model) and `free` (`a = 1`, `b = 0`).
    pub fn with_builtins() -> Self {
        let mut reg = Self::empty();
        reg.register("harper", |p| {
            let (l1, l2, l3) = p.lambda;
            let family = HarperFamily::new(Coupling::new(l1, l2, l3)?, p.alpha)?;
            Ok(Box::new(family))
        });
        reg.register("free", |_| Ok(Box::new(ConstantModel::free())));
        reg
    }

    pub fn register(&mut self, name: &'static str, builder: FamilyBuilder) {
        self.builders.insert(name, builder);
    }

    pub fn names(&self) -> impl Iterator<Item = &'static str> + '_ {
        self.builders.keys().copied()
    }

    pub fn build(&self, name: &str, params: &FamilyParams) -> Result<Box<dyn ErgodicFamily>, ModelError> {
        let builder = self
            .builders
            .get(name)
            .ok_or_else(|| ModelError::UnknownFamily(name.to_string()))?;
        builder(params)
    }
}

impl Default for FamilyRegistry {
    fn default() -> Self {
        Self::with_builtins()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn registry_builds_builtins() {
        let reg = FamilyRegistry::default();
        let p = FamilyParams { lambda: (0.0, 0.5, 0.0), alpha: 0.3 };
        assert_eq!(reg.build("harper", &p).unwrap().kind(), "harper");
        assert_eq!(reg.build("free", &p).unwrap().kind(), "constant");
        assert!(matches!(reg.build("nope", &p), Err(ModelError::UnknownFamily(_))));
        let bad = FamilyParams { lambda: (0.0, 0.0, 0.0), alpha: 0.3 };
        assert!(reg.build("harper", &bad).is_err());
        assert_eq!(reg.names().collect::<Vec<_>>(), vec!["free", "harper"]);
    }

    #[test]
    fn harper_mean_log_matches_constant_case() {
        let f = HarperFamily::new(Coupling::new(0.0, 0.5, 0.0).unwrap(), 0.3).unwrap();
        assert!((f.mean_log_offdiag() - 0.5f64.ln()).abs() < 1e-15);
    }
}
