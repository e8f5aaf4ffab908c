//! Proof traces and their independent checker.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{Graph, Path, Theory};

/// What licenses a single rewrite step.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Justification {
    /// The stated equation with this index.
    Equation(usize),
    /// The derived rule with this creation index.
    Rule(usize),
}

/// One replacement of a rule or equation side at `position`.
///
/// A forward step replaces the left side with the right side; a reversed
/// step goes the other way.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Step {
    pub by: Justification,
    pub reversed: bool,
    pub position: usize,
    pub result: Path,
}

/// A chain of steps starting at `start`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Trace {
    pub start: Path,
    pub steps: Vec<Step>,
}

impl Trace {
    pub fn trivial(start: Path) -> Self {
        Trace {
            start,
            steps: Vec::new(),
        }
    }

    pub fn end(&self) -> &Path {
        self.steps.last().map(|s| &s.result).unwrap_or(&self.start)
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    /// The same chain walked backwards, from `end()` to `start`.
    pub fn reversed(&self) -> Trace {
        let mut states: Vec<&Path> = Vec::with_capacity(self.steps.len() + 1);
        states.push(&self.start);
        states.extend(self.steps.iter().map(|s| &s.result));
        let steps = self
            .steps
            .iter()
            .enumerate()
            .rev()
            .map(|(k, s)| Step {
                by: s.by,
                reversed: !s.reversed,
                position: s.position,
                result: states[k].clone(),
            })
            .collect();
        Trace {
            start: self.end().clone(),
            steps,
        }
    }

    /// Appends `next`, which must start where `self` ends.
    pub fn then(mut self, next: Trace) -> Trace {
        debug_assert_eq!(self.end(), &next.start);
        self.steps.extend(next.steps);
        self
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TraceError {
    #[error("step {index}: {reason}")]
    BadStep { index: usize, reason: String },
    #[error("no equation with index {0}")]
    UnknownEquation(usize),
    #[error("no rule with index {0}")]
    UnknownRule(usize),
    #[error("rule {rule}: derivation runs {found}, expected {expected}")]
    WrongEndpoints {
        rule: usize,
        expected: String,
        found: String,
    },
    #[error("rule {rule} is justified by rule {uses}, which is not older")]
    IllFounded { rule: usize, uses: usize },
    #[error("rule {0} does not decrease in the term order")]
    NotDecreasing(usize),
}

/// Checks every step of `trace` as a literal instance of a stated equation
/// or derived rule, and recursively checks the derivation of every rule used.
pub fn verify_trace(theory: &Theory, trace: &Trace) -> Result<(), TraceError> {
    let mut checked = HashSet::new();
    check_chain(theory, trace, None, &mut checked)
}

/// Checks the derivation of every rule the theory has produced.
pub fn verify_theory(theory: &Theory) -> Result<(), TraceError> {
    let mut checked = HashSet::new();
    for rule in theory.all_rules() {
        check_rule(theory, rule.id, &mut checked)?;
    }
    Ok(())
}

fn check_rule(theory: &Theory, id: usize, checked: &mut HashSet<usize>) -> Result<(), TraceError> {
    if checked.contains(&id) {
        return Ok(());
    }
    let rule = theory.all_rules().get(id).ok_or(TraceError::UnknownRule(id))?;
    if rule.lhs.term_cmp(&rule.rhs) != std::cmp::Ordering::Greater {
        return Err(TraceError::NotDecreasing(id));
    }
    let d = &rule.derivation;
    if d.start != rule.lhs || d.end() != &rule.rhs {
        return Err(TraceError::WrongEndpoints {
            rule: id,
            expected: format!("{} => {}", rule.lhs, rule.rhs),
            found: format!("{} => {}", d.start, d.end()),
        });
    }
    check_chain(theory, d, Some(id), checked)?;
    checked.insert(id);
    Ok(())
}

fn check_chain(
    theory: &Theory,
    trace: &Trace,
    owner: Option<usize>,
    checked: &mut HashSet<usize>,
) -> Result<(), TraceError> {
    let mut current = trace.start.clone();
    for (index, step) in trace.steps.iter().enumerate() {
        let (from, to) = match step.by {
            Justification::Equation(k) => {
                let eq = theory.equations().get(k).ok_or(TraceError::UnknownEquation(k))?;
                (&eq.lhs, &eq.rhs)
            }
            Justification::Rule(k) => {
                if let Some(owner) = owner {
                    if k >= owner {
                        return Err(TraceError::IllFounded { rule: owner, uses: k });
                    }
                }
                check_rule(theory, k, checked)?;
                let r = &theory.all_rules()[k];
                (&r.lhs, &r.rhs)
            }
        };
        let (from, to) = if step.reversed { (to, from) } else { (from, to) };
        let next = replay(theory.graph(), &current, from, to, step.position)
            .map_err(|reason| TraceError::BadStep { index, reason })?;
        if next != step.result {
            return Err(TraceError::BadStep {
                index,
                reason: format!("recorded result {} but replay gives {}", step.result, next),
            });
        }
        current = next;
    }
    Ok(())
}

/// Replaces `from` by `to` in `word` at `pos`, checking typing as it goes.
fn replay(graph: &Graph, word: &Path, from: &Path, to: &Path, pos: usize) -> Result<Path, String> {
    let mut at = word.start.as_str();
    for (k, name) in word.edges.iter().enumerate() {
        if k == pos {
            break;
        }
        at = &graph
            .edge(at, name)
            .ok_or_else(|| format!("ill-typed word {}", word.qualified()))?
            .target;
    }
    if pos > word.edges.len() {
        return Err(format!("position {pos} beyond word {}", word.qualified()));
    }
    if at != from.start {
        return Err(format!("node at position {pos} is {at}, pattern starts at {}", from.start));
    }
    let end = pos + from.edges.len();
    if end > word.edges.len() || word.edges[pos..end] != from.edges[..] {
        return Err(format!("{} does not occur at position {pos} of {}", from, word));
    }
    let mut edges = word.edges[..pos].to_vec();
    edges.extend(to.edges.iter().cloned());
    edges.extend(word.edges[end..].iter().cloned());
    let out = Path::new(word.start.clone(), edges);
    graph.resolve(&out).map_err(|e| e.to_string())?;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> Path {
        Path::parse_dotted("X", s)
    }

    #[test]
    fn reversal_round_trips() {
        let t = Trace {
            start: p("a.b"),
            steps: vec![
                Step {
                    by: Justification::Rule(0),
                    reversed: false,
                    position: 0,
                    result: p("c"),
                },
                Step {
                    by: Justification::Equation(1),
                    reversed: true,
                    position: 1,
                    result: p("c.d"),
                },
            ],
        };
        let r = t.reversed();
        assert_eq!(r.start, p("c.d"));
        assert_eq!(r.end(), &p("a.b"));
        assert_eq!(r.steps[0].result, p("c"));
        assert_eq!((r.steps[0].by, r.steps[0].reversed), (Justification::Equation(1), false));
        assert_eq!((r.steps[1].by, r.steps[1].reversed), (Justification::Rule(0), true));
        assert_eq!(r.reversed(), t);
    }
}
