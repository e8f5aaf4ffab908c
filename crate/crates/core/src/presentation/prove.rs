use std::collections::{HashMap, VecDeque};

use serde::Serialize;

use super::rewrite::{has_suffix_redex, normalize_traced};
use super::trace::{Justification, Step, Trace};
use super::{occurs_at, splice, Budget, Path, PathError, Theory};

/// Which resource ran out before a proof was found.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Exhaustion {
    Normalization,
    Search,
}

/// Verdict of the equality prover.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum ProofOutcome {
    Proven(Trace),
    /// Distinct normal forms in a convergent system.
    Refuted,
    Unknown(Exhaustion),
}

impl ProofOutcome {
    pub fn label(&self) -> &'static str {
        match self {
            ProofOutcome::Proven(_) => "Proven",
            ProofOutcome::Refuted => "Refuted",
            ProofOutcome::Unknown(_) => "Unknown",
        }
    }

    pub fn is_proven(&self) -> bool {
        matches!(self, ProofOutcome::Proven(_))
    }
}

/// Whether a bounded enumeration saw everything there is.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Enumeration {
    Complete,
    Truncated,
}

/// Decides `p = q` where possible.
///
/// Equal normal forms give a proof. Distinct normal forms refute only when
/// the system is convergent; otherwise a breadth-first search over
/// equation and rule applications in both directions is tried.
pub fn prove_equal(
    theory: &Theory,
    p: &Path,
    q: &Path,
    budget: &Budget,
) -> Result<ProofOutcome, PathError> {
    let g = theory.graph();
    let (p_end, q_end) = (g.end(p)?, g.end(q)?);
    if p.start != q.start || p_end != q_end {
        return Err(PathError::EndpointMismatch {
            expected: format!("{} -> {}", p.start, p_end),
            found: format!("{} -> {}", q.start, q_end),
        });
    }
    if p == q {
        return Ok(ProofOutcome::Proven(Trace::trivial(p.clone())));
    }
    let left = match normalize_traced(theory, p, budget) {
        Ok(t) => t,
        Err(PathError::BudgetExceeded(_)) => return Ok(ProofOutcome::Unknown(Exhaustion::Normalization)),
        Err(e) => return Err(e),
    };
    let right = match normalize_traced(theory, q, budget) {
        Ok(t) => t,
        Err(PathError::BudgetExceeded(_)) => return Ok(ProofOutcome::Unknown(Exhaustion::Normalization)),
        Err(e) => return Err(e),
    };
    if left.end() == right.end() {
        return Ok(ProofOutcome::Proven(left.then(right.reversed())));
    }
    if theory.is_convergent() {
        return Ok(ProofOutcome::Refuted);
    }
    let max_len = budget.max_path_len.max(p.len()).max(q.len());
    Ok(match search(theory, left.end(), right.end(), max_len, budget.max_rewrite_steps) {
        Some(bridge) => ProofOutcome::Proven(left.then(bridge).then(right.reversed())),
        None => ProofOutcome::Unknown(Exhaustion::Search),
    })
}

fn search(theory: &Theory, from: &Path, to: &Path, max_len: usize, max_expansions: usize) -> Option<Trace> {
    let mut sides: Vec<(Justification, &Path, &Path)> = Vec::new();
    for (k, eq) in theory.equations().iter().enumerate() {
        sides.push((Justification::Equation(k), &eq.lhs, &eq.rhs));
    }
    for r in theory.active_rules() {
        sides.push((Justification::Rule(r.id), &r.lhs, &r.rhs));
    }

    let mut parent: HashMap<Path, Option<(Path, Step)>> = HashMap::new();
    parent.insert(from.clone(), None);
    let mut queue = VecDeque::from([from.clone()]);
    let mut expansions = 0;
    while let Some(word) = queue.pop_front() {
        if expansions >= max_expansions {
            return None;
        }
        expansions += 1;
        let nodes = theory.graph().visited_nodes(&word).ok()?;
        for &(by, lhs, rhs) in &sides {
            for (reversed, a, b) in [(false, lhs, rhs), (true, rhs, lhs)] {
                if word.len() - a.len().min(word.len()) + b.len() > max_len {
                    continue;
                }
                for pos in 0..=word.len() {
                    if !occurs_at(&word.edges, &nodes, a, pos) {
                        continue;
                    }
                    let next = splice(&word, pos, a.len(), &b.edges);
                    if parent.contains_key(&next) {
                        continue;
                    }
                    let step = Step {
                        by,
                        reversed,
                        position: pos,
                        result: next.clone(),
                    };
                    parent.insert(next.clone(), Some((word.clone(), step)));
                    if &next == to {
                        return Some(rebuild(&parent, from, to));
                    }
                    queue.push_back(next);
                }
            }
        }
    }
    None
}

fn rebuild(parent: &HashMap<Path, Option<(Path, Step)>>, from: &Path, to: &Path) -> Trace {
    let mut steps = Vec::new();
    let mut at = to.clone();
    while let Some(Some((prev, step))) = parent.get(&at) {
        steps.push(step.clone());
        at = prev.clone();
    }
    steps.reverse();
    Trace {
        start: from.clone(),
        steps,
    }
}

/// All normal-form paths out of `a` of length at most `max_path_len`, in
/// term order.
///
/// The result is `Complete` only if the system is convergent and no normal
/// form reaches the length bound; normal forms are prefix-closed, so that
/// witnesses there are no longer ones.
pub fn enumerate_paths_from(
    theory: &Theory,
    a: &str,
    budget: &Budget,
) -> Result<(Vec<Path>, Enumeration), PathError> {
    let g = theory.graph();
    if !g.has_node(a) {
        return Err(PathError::UnknownNode(a.to_owned()));
    }
    let bound = budget.max_path_len;
    let mut all = vec![Path::identity(a)];
    let mut frontier: Vec<(Path, Vec<&str>)> = vec![(Path::identity(a), vec![g.nodes()[g.node_id(a).unwrap()].as_str()])];
    for _ in 0..bound {
        let mut next = Vec::new();
        for (p, nodes) in &frontier {
            let end = g.node_id(nodes.last().unwrap()).unwrap();
            for &e in g.out_edges(end) {
                let edge = &g.edges()[e];
                let mut q = p.clone();
                q.edges.push(edge.name.clone());
                let mut qn = nodes.clone();
                qn.push(edge.target.as_str());
                if !has_suffix_redex(theory.active_rules(), &q, &qn) {
                    all.push(q.clone());
                    next.push((q, qn));
                }
            }
        }
        frontier = next;
        if frontier.is_empty() {
            break;
        }
    }
    let status = if frontier.is_empty() && theory.is_convergent() {
        Enumeration::Complete
    } else {
        Enumeration::Truncated
    };
    all.sort_by(|x, y| x.term_cmp(y));
    Ok((all, status))
}

/// The normal-form paths `a -> b`; see [`enumerate_paths_from`] for the
/// completeness criterion, which looks at paths from `a` to any node.
pub fn enumerate_paths(
    theory: &Theory,
    a: &str,
    b: &str,
    budget: &Budget,
) -> Result<(Vec<Path>, Enumeration), PathError> {
    if !theory.graph().has_node(b) {
        return Err(PathError::UnknownNode(b.to_owned()));
    }
    let (all, status) = enumerate_paths_from(theory, a, budget)?;
    let g = theory.graph();
    let paths = all
        .into_iter()
        .filter(|p| g.end(p).map(|e| e == b).unwrap_or(false))
        .collect();
    Ok((paths, status))
}
