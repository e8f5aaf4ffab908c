//! Data migration along a mapping `F: C -> D`: pullback (delta), its left
//! adjoint (sigma, by chase) and its right adjoint (pi, by limits over
//! comma categories).

mod pi;
mod sigma;

use std::sync::Arc;

use serde::Serialize;
use thiserror::Error;

use crate::instance::{count_homs, HomEnumeration, HomError, Instance, InstanceMorphism};
use crate::mapping::{FunctorialityVerdict, Mapping};
use crate::presentation::Budget;

pub use sigma::{ProvenanceEntry, SigmaOutput};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct MigrationLimits {
    pub max_chase_rounds: usize,
    pub max_elements: usize,
    pub comma_path_bound: usize,
    pub budget: Budget,
}

impl Default for MigrationLimits {
    fn default() -> Self {
        MigrationLimits {
            max_chase_rounds: 1000,
            max_elements: 100_000,
            comma_path_bound: 12,
            budget: Budget::default(),
        }
    }
}

impl MigrationLimits {
    /// Returns `None` unless every bound is strictly positive.
    pub fn new(max_chase_rounds: usize, max_elements: usize, comma_path_bound: usize, budget: Budget) -> Option<Self> {
        (max_chase_rounds > 0 && max_elements > 0 && comma_path_bound > 0).then_some(MigrationLimits {
            max_chase_rounds,
            max_elements,
            comma_path_bound,
            budget,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MigrateError {
    #[error("mapping `{mapping}` is not known to be functorial: {verdict}")]
    NonFunctorialMapping { mapping: String, verdict: String },
    #[error("instance lives on schema `{found}`, expected `{expected}`")]
    SchemaMismatch { expected: String, found: String },
    #[error("input instance violates {count} constraint(s); first: {first}")]
    InputViolatesConstraints { count: usize, first: String },
    #[error("chase did not converge: {reason}")]
    SigmaDivergence { reason: String },
    #[error("chase identifies distinct literals {left} and {right} at `{node}`")]
    LiteralCollision { node: String, left: String, right: String },
    #[error("no literal is determined for `{edge}` at element `{element}`")]
    SigmaUnconstrainedAttribute { edge: String, element: String },
    #[error("comma category at `{node}` is not finite within path length {bound}")]
    PiInfinite { node: String, bound: usize },
    #[error("value of `{edge}` is not determined by the input, so the result would be infinite")]
    PiUnconstrainedAttribute { edge: String },
    #[error("more than {limit} elements at `{node}`")]
    ElementLimitExceeded { node: String, limit: usize },
    #[error("hom enumeration capped at {0}")]
    Capped(usize),
    #[error(transparent)]
    Hom(#[from] HomError),
}

/// A mapping whose functoriality has been checked once, ready to migrate.
#[derive(Debug, Clone)]
pub struct Migration {
    mapping: Mapping,
    verdict: FunctorialityVerdict,
}

impl Migration {
    /// Refuses `NotFunctorial` mappings, and `Undetermined` ones unless
    /// `allow_undetermined` is set.
    pub fn new(mapping: Mapping, budget: &Budget, allow_undetermined: bool) -> Result<Migration, MigrateError> {
        let verdict = mapping.check_functoriality(budget);
        match &verdict {
            FunctorialityVerdict::Functorial(_) => {}
            FunctorialityVerdict::Undetermined(_) if allow_undetermined => {}
            v => {
                return Err(MigrateError::NonFunctorialMapping {
                    mapping: mapping.name().to_owned(),
                    verdict: v.to_string(),
                })
            }
        }
        Ok(Migration { mapping, verdict })
    }

    pub fn mapping(&self) -> &Mapping {
        &self.mapping
    }

    pub fn verdict(&self) -> &FunctorialityVerdict {
        &self.verdict
    }

    /// Pulls `j` back along the mapping: `c` gets the carrier of `F(c)`,
    /// and edge `e` acts as the path `F(e)`.
    pub fn delta(&self, j: &Instance) -> Result<Instance, MigrateError> {
        let f = &self.mapping;
        expect_schema(j, f.target().name(), f.target())?;
        expect_constraints(j)?;
        let (c, d) = (f.source().graph(), f.target().graph());
        let carriers = (0..c.nodes().len())
            .map(|n| j.carrier_at(f.node_at(n)).iter().cloned().collect())
            .collect();
        let maps = (0..c.edges().len())
            .map(|e| {
                let path = f.edge_at(e);
                let ids = d.resolve(path).expect("validated mapping");
                let len = j.carrier_at(d.node_id(&path.start).unwrap()).len();
                (0..len).map(|x| j.eval_edges(x, &ids)).collect()
            })
            .collect();
        Ok(Instance::from_parts(f.source().clone(), carriers, maps).expect("pullback of a valid instance"))
    }

    /// Pulls a homomorphism back; its source and target are the pullbacks.
    pub fn delta_hom(&self, h: &InstanceMorphism) -> Result<InstanceMorphism, MigrateError> {
        let source = Arc::new(self.delta(h.source())?);
        let target = Arc::new(self.delta(h.target())?);
        let n = self.mapping.source().graph().nodes().len();
        let components = (0..n).map(|c| h.components()[self.mapping.node_at(c)].clone()).collect();
        Ok(InstanceMorphism::new(source, target, components)?)
    }

    /// Left adjoint of delta, computed by a chase with labeled nulls.
    pub fn sigma(&self, i: &Instance, limits: &MigrationLimits) -> Result<SigmaOutput, MigrateError> {
        let f = &self.mapping;
        expect_schema(i, f.source().name(), f.source())?;
        expect_constraints(i)?;
        sigma::run(f, i, limits)
    }

    /// Right adjoint of delta: compatible families over comma categories.
    pub fn pi(&self, i: &Instance, limits: &MigrationLimits) -> Result<Instance, MigrateError> {
        let f = &self.mapping;
        expect_schema(i, f.source().name(), f.source())?;
        expect_constraints(i)?;
        pi::run(f, i, limits)
    }
}

fn expect_schema(i: &Instance, name: &str, schema: &Arc<crate::schema::Schema>) -> Result<(), MigrateError> {
    if Arc::ptr_eq(i.schema(), schema) || i.schema() == schema {
        Ok(())
    } else {
        Err(MigrateError::SchemaMismatch {
            expected: name.to_owned(),
            found: i.schema().name().to_owned(),
        })
    }
}

fn expect_constraints(i: &Instance) -> Result<(), MigrateError> {
    let report = i.check_constraints();
    match report.violations.first() {
        None => Ok(()),
        Some(v) => Err(MigrateError::InputViolatesConstraints {
            count: report.len(),
            first: v.to_string(),
        }),
    }
}

/// Sizes of the two hom-sets an adjunction puts in bijection.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct AdjointCounts {
    /// Homs on the target schema `D`.
    pub on_target: usize,
    /// Homs on the source schema `C`.
    pub on_source: usize,
}

impl AdjointCounts {
    pub fn equal(&self) -> bool {
        self.on_target == self.on_source
    }
}

fn counted(r: (usize, HomEnumeration), cap: usize) -> Result<usize, MigrateError> {
    match r {
        (n, HomEnumeration::Complete) => Ok(n),
        (_, HomEnumeration::Capped) => Err(MigrateError::Capped(cap)),
    }
}

/// `|Hom_D(sigma I, J)|` against `|Hom_C(I, delta J)|`.
pub fn adjointness_check_sigma(
    m: &Migration,
    i: &Instance,
    j: &Instance,
    limits: &MigrationLimits,
    cap: usize,
) -> Result<AdjointCounts, MigrateError> {
    let s = m.sigma(i, limits)?.instance;
    let dj = m.delta(j)?;
    Ok(AdjointCounts {
        on_target: counted(count_homs(&s, j, cap)?, cap)?,
        on_source: counted(count_homs(i, &dj, cap)?, cap)?,
    })
}

/// `|Hom_D(J, pi I)|` against `|Hom_C(delta J, I)|`.
pub fn adjointness_check_pi(
    m: &Migration,
    i: &Instance,
    j: &Instance,
    limits: &MigrationLimits,
    cap: usize,
) -> Result<AdjointCounts, MigrateError> {
    let p = m.pi(i, limits)?;
    let dj = m.delta(j)?;
    Ok(AdjointCounts {
        on_target: counted(count_homs(j, &p, cap)?, cap)?,
        on_source: counted(count_homs(&dj, i, cap)?, cap)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::fixtures::paper_instance;
    use crate::instance::{iso_check, Value};
    use crate::mapping::fixtures::loop_schema;
    use crate::presentation::Path;
    use crate::schema::Schema;

    fn discrete(name: &str, nodes: &[&str]) -> Arc<Schema> {
        Arc::new(Schema::build(name, nodes, &[], &[], vec![], &Budget::default()).unwrap())
    }

    fn ids(n: usize, prefix: &str) -> Vec<String> {
        (0..n).map(|k| format!("{prefix}{k}")).collect()
    }

    #[test]
    fn delta_identity_is_identity() {
        let i = paper_instance(true);
        let m = Migration::new(Mapping::identity(i.schema().clone()), &Budget::default(), false).unwrap();
        assert_eq!(m.delta(&i).unwrap(), i);
    }

    #[test]
    fn delta_single_node_copies_emp() {
        let j = paper_instance(true);
        let c = discrete("V", &["V"]);
        let f = Mapping::build("F", c, j.schema().clone(), &[("V", "Emp")], &[]).unwrap();
        let m = Migration::new(f, &Budget::default(), false).unwrap();
        let out = m.delta(&j).unwrap();
        let got: Vec<&str> = out.carrier("V").unwrap().iter().map(String::as_str).collect();
        assert_eq!(got, ["101", "102", "103"]);
    }

    #[test]
    fn verbatim_input_is_refused() {
        let i = paper_instance(false);
        let m = Migration::new(Mapping::identity(i.schema().clone()), &Budget::default(), false).unwrap();
        assert!(matches!(m.delta(&i), Err(MigrateError::InputViolatesConstraints { count: 2, .. })));
    }

    #[test]
    fn non_functorial_mapping_is_refused() {
        let c = loop_schema("C", "V", "e", true);
        let d = loop_schema("D", "W", "f", false);
        let f = Mapping::build("F", c, d, &[("V", "W")], &[("V", "e", Path::parse_dotted("W", "f"))]).unwrap();
        assert!(matches!(
            Migration::new(f, &Budget::default(), true),
            Err(MigrateError::NonFunctorialMapping { .. })
        ));
    }

    #[test]
    fn sigma_idempotent_loop() {
        let c = discrete("C", &["A"]);
        let d = loop_schema("D", "B", "nxt", true);
        let f = Mapping::build("F", c.clone(), d, &[("A", "B")], &[]).unwrap();
        let m = Migration::new(f, &Budget::default(), false).unwrap();
        let i = Instance::from_parts(c, vec![vec!["a".into()]], vec![]).unwrap();
        let out = m.sigma(&i, &MigrationLimits::default()).unwrap();
        let j = &out.instance;
        let carrier: Vec<&str> = j.carrier("B").unwrap().iter().map(String::as_str).collect();
        assert_eq!(carrier, ["a", "!0"]);
        assert_eq!(j.map("B", "nxt").unwrap(), [Value::Elem(1), Value::Elem(1)]);
        assert!(j.check_constraints().is_empty());
        assert_eq!(out.provenance.len(), 1);
        assert_eq!(out.provenance[0].output, "a");
    }

    #[test]
    fn sigma_free_loop_diverges() {
        let c = discrete("C", &["A"]);
        let d = loop_schema("D", "B", "nxt", false);
        let f = Mapping::build("F", c.clone(), d, &[("A", "B")], &[]).unwrap();
        let m = Migration::new(f, &Budget::default(), false).unwrap();
        let i = Instance::from_parts(c, vec![vec!["a".into()]], vec![]).unwrap();
        let limits = MigrationLimits {
            max_chase_rounds: 50,
            ..Default::default()
        };
        let err = m.sigma(&i, &limits).unwrap_err();
        assert!(matches!(err, MigrateError::SigmaDivergence { .. }), "{err}");
    }

    #[test]
    fn sigma_and_pi_identity_are_isomorphic() {
        let i = Arc::new(paper_instance(true));
        let m = Migration::new(Mapping::identity(i.schema().clone()), &Budget::default(), false).unwrap();
        let limits = MigrationLimits::default();
        let s = Arc::new(m.sigma(&i, &limits).unwrap().instance);
        assert!(iso_check(&s, &i).is_some());
        assert_eq!(*s, *i);
    }

    #[test]
    fn pi_identity_on_acyclic_schema() {
        let s = Arc::new(
            Schema::build(
                "T",
                &["A", "B"],
                &[crate::schema::BuiltinType::String],
                &[("f", "A", "B"), ("n", "B", "String")],
                vec![],
                &Budget::default(),
            )
            .unwrap(),
        );
        let lit = |s: &str| Value::Lit(crate::schema::Literal::Str(s.into()));
        let i = Arc::new(
            Instance::from_parts(
                s.clone(),
                vec![ids(3, "a"), ids(2, "b"), vec![]],
                vec![vec![Value::Elem(0), Value::Elem(1), Value::Elem(1)], vec![lit("x"), lit("y")]],
            )
            .unwrap(),
        );
        let m = Migration::new(Mapping::identity(s), &Budget::default(), false).unwrap();
        let p = Arc::new(m.pi(&i, &MigrationLimits::default()).unwrap());
        assert_eq!(*p, *i);
    }

    #[test]
    fn pi_discrete_product() {
        let c = discrete("C", &["A", "B"]);
        let d = discrete("D", &["X"]);
        let f = Mapping::build("F", c.clone(), d.clone(), &[("A", "X"), ("B", "X")], &[]).unwrap();
        let m = Migration::new(f, &Budget::default(), false).unwrap();
        let i = Instance::from_parts(c, vec![ids(2, "a"), ids(3, "b")], vec![]).unwrap();
        let p = m.pi(&i, &MigrationLimits::default()).unwrap();
        assert_eq!(p.carrier("X").unwrap().len(), 6);

        let j = Instance::from_parts(d, vec![vec!["x".into()]], vec![]).unwrap();
        let counts = adjointness_check_pi(&m, &i, &j, &MigrationLimits::default(), 10_000).unwrap();
        assert_eq!((counts.on_target, counts.on_source), (6, 6));
    }

    #[test]
    fn pi_over_free_loop_is_infinite() {
        let c = discrete("C", &["A"]);
        let d = loop_schema("D", "B", "nxt", false);
        let f = Mapping::build("F", c.clone(), d, &[("A", "B")], &[]).unwrap();
        let m = Migration::new(f, &Budget::default(), false).unwrap();
        let i = Instance::from_parts(c, vec![vec!["a".into()]], vec![]).unwrap();
        assert!(matches!(
            m.pi(&i, &MigrationLimits::default()),
            Err(MigrateError::PiInfinite { .. })
        ));
    }

    #[test]
    fn sigma_adjointness_on_idempotent_loop() {
        let c = discrete("C", &["A"]);
        let d = loop_schema("D", "B", "nxt", true);
        let f = Mapping::build("F", c.clone(), d.clone(), &[("A", "B")], &[]).unwrap();
        let m = Migration::new(f, &Budget::default(), false).unwrap();
        let i = Instance::from_parts(c, vec![vec!["a".into()]], vec![]).unwrap();
        let j = Instance::from_parts(d, vec![vec!["z".into()]], vec![vec![Value::Elem(0)]]).unwrap();
        let counts = adjointness_check_sigma(&m, &i, &j, &MigrationLimits::default(), 1000).unwrap();
        assert_eq!((counts.on_target, counts.on_source), (1, 1));
    }

    #[test]
    fn delta_hom_of_identity() {
        let i = Arc::new(paper_instance(true));
        let c = discrete("V", &["V"]);
        let f = Mapping::build("F", c, i.schema().clone(), &[("V", "Dept")], &[]).unwrap();
        let m = Migration::new(f, &Budget::default(), false).unwrap();
        let h = m.delta_hom(&InstanceMorphism::identity(i)).unwrap();
        assert_eq!(h, InstanceMorphism::identity(h.source().clone()));
        assert!(h.check().is_empty());
    }
}
