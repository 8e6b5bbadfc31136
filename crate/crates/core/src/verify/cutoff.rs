use std::collections::BTreeSet;

use serde::Serialize;

use super::check::split_invariants;
use crate::ltl::{Formula, LtlError, ParamSpec, Shape};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Indexing {
    One,
    Two,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum AssumptionClass {
    None,
    BooleanInvariant,
    Liveness,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SpecShape {
    pub indexing: Indexing,
    pub assumptions: AssumptionClass,
    pub uses_global_inputs: bool,
    /// The token-arrival premise is present, so liveness assumptions only
    /// constrain a process while it waits for or holds the token.
    pub localized: bool,
}

impl SpecShape {
    pub fn of(spec: &ParamSpec) -> Result<Self, LtlError> {
        let indexing = match spec.shape() {
            Shape::OneIndexed => Indexing::One,
            Shape::TwoIndexed => Indexing::Two,
            Shape::Mixed => {
                return Err(LtlError::UnsupportedShape(
                    "formulas mention concrete process indices".into(),
                ))
            }
        };
        let inputs: BTreeSet<String> = spec.inputs().into_iter().collect();
        let ass: Vec<Formula> = spec.assumptions.iter().map(|c| c.formula.clone()).collect();
        let (inv, rest) = split_invariants(&ass, &inputs);
        let assumptions = if !rest.is_empty() {
            AssumptionClass::Liveness
        } else if !inv.is_empty() {
            AssumptionClass::BooleanInvariant
        } else {
            AssumptionClass::None
        };
        let uses_global_inputs = spec
            .all_clauses()
            .flat_map(|c| c.formula.signal_names())
            .any(|n| spec.global_inputs.contains(&n));
        Ok(SpecShape {
            indexing,
            assumptions,
            uses_global_inputs,
            localized: spec.is_localized(),
        })
    }
}

/// Smallest ring size whose correctness carries over to all larger rings.
pub fn cutoff_for(shape: &SpecShape) -> Result<usize, LtlError> {
    if shape.assumptions == AssumptionClass::Liveness && !shape.localized {
        return Err(LtlError::UnsupportedShape(
            "liveness assumptions over inputs must be localized before verification".into(),
        ));
    }
    Ok(match shape.indexing {
        Indexing::One => 2,
        Indexing::Two => 4,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ltl::parse_spec;

    fn shape(text: &str) -> SpecShape {
        SpecShape::of(&parse_spec(text).unwrap()).unwrap()
    }

    #[test]
    fn cutoff_values() {
        let one = shape("[INPUTS]\nr\n[OUTPUTS]\ng\n[ASSUME]\nG !r_i\n[GUARANTEE]\nG(r_i -> F g_i)\n");
        assert_eq!(one.assumptions, AssumptionClass::BooleanInvariant);
        assert_eq!(cutoff_for(&one), Ok(2));
        let two = shape("[INPUTS]\nr\n[OUTPUTS]\ng\n[ASSUME]\nG !r_i\n[GUARANTEE]\nG !(g_i & g_j)\n");
        assert_eq!(two.indexing, Indexing::Two);
        assert_eq!(cutoff_for(&two), Ok(4));
    }

    #[test]
    fn unlocalized_liveness_rejected() {
        let s = shape("[INPUTS]\nr\n[OUTPUTS]\ng\n[ASSUME]\nG F !r_i\n[GUARANTEE]\nG F g_i\n");
        assert_eq!(s.assumptions, AssumptionClass::Liveness);
        assert!(matches!(cutoff_for(&s), Err(LtlError::UnsupportedShape(_))));
        let s = SpecShape { localized: true, ..s };
        assert_eq!(cutoff_for(&s), Ok(2));
    }

    #[test]
    fn global_input_flag() {
        let s = shape("[INPUTS]\nlocal: r\nglobal: h\n[OUTPUTS]\ng\n[GUARANTEE]\nG(h -> g_i)\n");
        assert!(s.uses_global_inputs);
        assert_eq!(s.assumptions, AssumptionClass::None);
    }
}
