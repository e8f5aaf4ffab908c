use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use super::trace::{Justification, Step, Trace};
use super::{occurs_at, splice, Budget, Graph, Path, PathEquation, PathError, Theory};

/// Why `lhs > rhs` holds in the length-lexicographic order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Orientation {
    /// `lhs` has more edges.
    Longer,
    /// Same length, `lhs` is lexicographically greater on edge names.
    LexGreater,
}

/// An oriented equation `lhs => rhs` with `lhs` strictly greater.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RewriteRule {
    /// Creation index within its theory.
    pub id: usize,
    pub lhs: Path,
    pub rhs: Path,
    pub orientation: Orientation,
    /// A chain of steps from `lhs` to `rhs` using stated equations and
    /// older rules.
    pub derivation: Trace,
}

impl RewriteRule {
    /// Orients the two ends of `proof` into a rule, keeping the proof as its
    /// derivation (reversed if needed).
    pub(crate) fn from_proof(id: usize, proof: Trace) -> Result<RewriteRule, PathError> {
        let (start, end) = (&proof.start, proof.end());
        let (derivation, orientation) = match start.term_cmp(end) {
            Ordering::Equal => return Err(PathError::Unorientable(start.clone())),
            Ordering::Greater => {
                let o = orientation_of(start, end);
                (proof, o)
            }
            Ordering::Less => {
                let o = orientation_of(end, start);
                (proof.reversed(), o)
            }
        };
        Ok(RewriteRule {
            id,
            lhs: derivation.start.clone(),
            rhs: derivation.end().clone(),
            orientation,
            derivation,
        })
    }
}

fn orientation_of(big: &Path, small: &Path) -> Orientation {
    if big.len() > small.len() {
        Orientation::Longer
    } else {
        Orientation::LexGreater
    }
}

/// Orients a single equation. The derivation cites the equation as index 0.
pub fn orient(eq: &PathEquation) -> Result<RewriteRule, PathError> {
    let proof = Trace {
        start: eq.lhs.clone(),
        steps: vec![Step {
            by: Justification::Equation(0),
            reversed: false,
            position: 0,
            result: eq.rhs.clone(),
        }],
    };
    RewriteRule::from_proof(0, proof)
}

/// Rewrites `p` to normal form under the theory's rules.
pub fn normalize(theory: &Theory, p: &Path, budget: &Budget) -> Result<Path, PathError> {
    normalize_traced(theory, p, budget).map(|t| t.end().clone())
}

/// Like [`normalize`], returning every step taken.
pub fn normalize_traced(theory: &Theory, p: &Path, budget: &Budget) -> Result<Trace, PathError> {
    theory.graph().resolve(p)?;
    rewrite_to_normal(
        theory.graph(),
        theory.active_rules(),
        p,
        budget.max_rewrite_steps,
    )
}

/// Leftmost redex first; at a given position, the lowest rule index wins.
pub(crate) fn rewrite_to_normal<'r>(
    graph: &Graph,
    rules: impl Iterator<Item = &'r RewriteRule> + Clone,
    p: &Path,
    limit: usize,
) -> Result<Trace, PathError> {
    let mut trace = Trace::trivial(p.clone());
    let mut current = p.clone();
    loop {
        let Some((pos, rule)) = find_redex(graph, rules.clone(), &current)? else {
            return Ok(trace);
        };
        if trace.steps.len() >= limit {
            return Err(PathError::BudgetExceeded(limit));
        }
        current = splice(&current, pos, rule.lhs.len(), &rule.rhs.edges);
        trace.steps.push(Step {
            by: Justification::Rule(rule.id),
            reversed: false,
            position: pos,
            result: current.clone(),
        });
    }
}

pub(crate) fn find_redex<'r>(
    graph: &Graph,
    rules: impl Iterator<Item = &'r RewriteRule> + Clone,
    word: &Path,
) -> Result<Option<(usize, &'r RewriteRule)>, PathError> {
    let nodes = graph.visited_nodes(word)?;
    for pos in 0..word.len() {
        if let Some(rule) = rules.clone().find(|r| occurs_at(&word.edges, &nodes, &r.lhs, pos)) {
            return Ok(Some((pos, rule)));
        }
    }
    Ok(None)
}

/// True if some rule's left side is a suffix of `word`.
pub(crate) fn has_suffix_redex<'r>(
    mut rules: impl Iterator<Item = &'r RewriteRule>,
    word: &Path,
    nodes: &[&str],
) -> bool {
    rules.any(|r| {
        r.lhs.len() <= word.len() && occurs_at(&word.edges, nodes, &r.lhs, word.len() - r.lhs.len())
    })
}
