//! Knuth-Bendix style completion on typed words.

use std::collections::{BTreeSet, HashSet, VecDeque};
use std::sync::Arc;

use serde::Serialize;

use super::rewrite::{find_redex, rewrite_to_normal, RewriteRule};
use super::trace::{Justification, Step, Trace};
use super::{occurs_at, splice, Budget, Graph, PathEquation, PathError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum CompletionStatus {
    /// Every critical pair joins: normal forms decide equality.
    Convergent,
    /// Completion stopped on its budget; rules are sound but may not be confluent.
    Partial,
}

/// Equations over a graph together with the rules completion derived from them.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Theory {
    graph: Arc<Graph>,
    equations: Vec<PathEquation>,
    /// Every rule ever created, indexed by creation order. Retired rules stay
    /// here because later derivations may cite them.
    rules: Vec<RewriteRule>,
    active: Vec<usize>,
    status: CompletionStatus,
    iterations: usize,
}

impl Theory {
    /// An uncompleted theory. Every equation must be well typed in `graph`.
    pub fn new(graph: Arc<Graph>, equations: Vec<PathEquation>) -> Result<Theory, PathError> {
        for eq in &equations {
            graph.check_equation(eq)?;
        }
        Ok(Theory {
            graph,
            equations,
            rules: Vec::new(),
            active: Vec::new(),
            status: CompletionStatus::Partial,
            iterations: 0,
        })
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn shared_graph(&self) -> &Arc<Graph> {
        &self.graph
    }

    pub fn equations(&self) -> &[PathEquation] {
        &self.equations
    }

    /// All rules, including ones retired by inter-reduction.
    pub fn all_rules(&self) -> &[RewriteRule] {
        &self.rules
    }

    /// The current rewrite system, in creation order.
    pub fn active_rules(&self) -> impl Iterator<Item = &RewriteRule> + Clone {
        self.active.iter().map(|&i| &self.rules[i])
    }

    pub fn rule_count(&self) -> usize {
        self.active.len()
    }

    pub fn status(&self) -> CompletionStatus {
        self.status
    }

    pub fn is_convergent(&self) -> bool {
        self.status == CompletionStatus::Convergent
    }

    /// Completion iterations spent (oriented equations plus examined rule pairs).
    pub fn iterations(&self) -> usize {
        self.iterations
    }
}

/// Runs completion on the theory's equations from scratch.
///
/// Rule pairs are examined oldest first, ordered by the larger creation
/// index, then the smaller, then the direction of the overlap.
pub fn complete(theory: &Theory, budget: &Budget) -> Theory {
    let mut kb = Completion {
        graph: theory.graph.clone(),
        rules: Vec::new(),
        active: BTreeSet::new(),
        pending: VecDeque::new(),
        processed: HashSet::new(),
        iterations: 0,
        budget: *budget,
    };
    for (k, eq) in theory.equations.iter().enumerate() {
        if eq.lhs == eq.rhs {
            continue;
        }
        kb.pending.push_back(Trace {
            start: eq.lhs.clone(),
            steps: vec![Step {
                by: Justification::Equation(k),
                reversed: false,
                position: 0,
                result: eq.rhs.clone(),
            }],
        });
    }
    let status = kb.run();
    Theory {
        graph: theory.graph.clone(),
        equations: theory.equations.clone(),
        rules: kb.rules,
        active: kb.active.into_iter().collect(),
        status,
        iterations: kb.iterations,
    }
}

struct Completion {
    graph: Arc<Graph>,
    rules: Vec<RewriteRule>,
    active: BTreeSet<usize>,
    /// Proven equalities waiting to be oriented; each trace runs from one side to the other.
    pending: VecDeque<Trace>,
    processed: HashSet<(usize, usize)>,
    iterations: usize,
    budget: Budget,
}

impl Completion {
    fn run(&mut self) -> CompletionStatus {
        loop {
            while let Some(proof) = self.pending.pop_front() {
                if !self.tick() || self.add_equality(proof).is_err() {
                    return CompletionStatus::Partial;
                }
            }
            let Some((i, j)) = self.next_pair() else {
                return CompletionStatus::Convergent;
            };
            if !self.tick() {
                return CompletionStatus::Partial;
            }
            self.processed.insert((i, j));
            let pairs = self.critical_pairs(i, j);
            self.pending.extend(pairs);
        }
    }

    fn tick(&mut self) -> bool {
        self.iterations += 1;
        self.iterations <= self.budget.max_completion_iterations
    }

    fn normal_form(&self, trace_start: &super::Path) -> Result<Trace, PathError> {
        rewrite_to_normal(
            &self.graph,
            self.active.iter().map(|&i| &self.rules[i]),
            trace_start,
            self.budget.max_rewrite_steps,
        )
    }

    fn add_equality(&mut self, proof: Trace) -> Result<(), PathError> {
        let left = self.normal_form(&proof.start)?;
        let right = self.normal_form(proof.end())?;
        if left.end() == right.end() {
            return Ok(());
        }
        let joined = left.reversed().then(proof).then(right);
        let id = self.rules.len();
        let rule = RewriteRule::from_proof(id, joined)?;
        self.rules.push(rule);
        self.active.insert(id);

        // Rules whose left side the new rule rewrites go back to the queue.
        let others: Vec<usize> = self.active.iter().copied().filter(|&r| r != id).collect();
        for r in others {
            let lhs = &self.rules[r].lhs;
            if find_redex(&self.graph, std::iter::once(&self.rules[id]), lhs)?.is_some() {
                self.active.remove(&r);
                self.pending.push_back(self.rule_as_trace(r));
            }
        }
        // Right sides are kept in normal form.
        let survivors: Vec<usize> = self.active.iter().copied().filter(|&r| r != id).collect();
        for r in survivors {
            let rhs_nf = self.normal_form(&self.rules[r].rhs)?;
            if rhs_nf.is_empty() {
                continue;
            }
            let proof = self.rule_as_trace(r).then(rhs_nf);
            self.active.remove(&r);
            let fresh = self.rules.len();
            self.rules.push(RewriteRule::from_proof(fresh, proof)?);
            self.active.insert(fresh);
        }
        Ok(())
    }

    fn rule_as_trace(&self, r: usize) -> Trace {
        let rule = &self.rules[r];
        Trace {
            start: rule.lhs.clone(),
            steps: vec![Step {
                by: Justification::Rule(r),
                reversed: false,
                position: 0,
                result: rule.rhs.clone(),
            }],
        }
    }

    fn next_pair(&self) -> Option<(usize, usize)> {
        let ids: Vec<usize> = self.active.iter().copied().collect();
        ids.iter()
            .flat_map(|&i| ids.iter().map(move |&j| (i, j)))
            .filter(|p| !self.processed.contains(p))
            .min_by_key(|&(i, j)| (i.max(j), i.min(j), i))
    }

    /// Overlaps of the left side of rule `i` with the left side of rule `j`:
    /// a proper suffix of one equal to a proper prefix of the other, or `j`
    /// occurring inside `i`. Each is returned as a trace between the two
    /// one-step reducts of the overlapped word.
    fn critical_pairs(&self, i: usize, j: usize) -> Vec<Trace> {
        let (r1, r2) = (&self.rules[i], &self.rules[j]);
        let (l1, l2) = (&r1.lhs, &r2.lhs);
        let nodes1 = self
            .graph
            .visited_nodes(l1)
            .expect("rule sides are well typed");
        let mut out = Vec::new();

        for k in 1..l1.len().min(l2.len()) {
            let at = l1.len() - k;
            if nodes1[at] != l2.start || l1.edges[at..] != l2.edges[..k] {
                continue;
            }
            let mut word = l1.clone();
            word.edges.extend_from_slice(&l2.edges[k..]);
            let s = splice(&word, 0, l1.len(), &r1.rhs.edges);
            let t = splice(&word, at, l2.len(), &r2.rhs.edges);
            out.push(overlap_trace(s, word, t, i, j, at));
        }

        if i != j && l2.len() <= l1.len() {
            for at in 0..=(l1.len() - l2.len()) {
                if !occurs_at(&l1.edges, &nodes1, l2, at) {
                    continue;
                }
                let s = r1.rhs.clone();
                let t = splice(l1, at, l2.len(), &r2.rhs.edges);
                out.push(overlap_trace(s, l1.clone(), t, i, j, at));
            }
        }
        out
    }
}

fn overlap_trace(
    s: super::Path,
    word: super::Path,
    t: super::Path,
    i: usize,
    j: usize,
    at: usize,
) -> Trace {
    Trace {
        start: s,
        steps: vec![
            Step {
                by: Justification::Rule(i),
                reversed: true,
                position: 0,
                result: word,
            },
            Step {
                by: Justification::Rule(j),
                reversed: false,
                position: at,
                result: t,
            },
        ],
    }
}

#[cfg(test)]
mod tests {
    use super::super::fixtures::*;
    use super::super::{verify_theory, Path};
    use super::*;

    fn run(g: Graph, eqs: Vec<PathEquation>) -> Theory {
        complete(&Theory::new(Arc::new(g), eqs).unwrap(), &Budget::default())
    }

    #[test]
    fn emp_dept_has_one_rule() {
        let t = run(emp_dept_graph(), vec![admin_works_eq()]);
        assert!(t.is_convergent());
        assert_eq!(t.rule_count(), 1);
        let r = t.active_rules().next().unwrap();
        assert_eq!(r.lhs, Path::parse_dotted("Dept", "admin.works"));
        verify_theory(&t).unwrap();
    }

    #[test]
    fn empty_theory_is_convergent() {
        let t = run(emp_dept_graph(), vec![]);
        assert!(t.is_convergent());
        assert_eq!(t.rule_count(), 0);
    }

    #[test]
    fn idempotent_loop() {
        let eq = PathEquation::new(Path::parse_dotted("A", "e.e"), Path::parse_dotted("A", "e"));
        let t = run(loop_graph("A", "e"), vec![eq]);
        assert!(t.is_convergent());
        assert_eq!(t.rule_count(), 1);
        let r = t.active_rules().next().unwrap();
        assert_eq!((r.lhs.len(), r.rhs.len()), (2, 1));
    }

    #[test]
    fn degenerate_equations_are_dropped() {
        let p = Path::parse_dotted("Emp", "mgr");
        let t = run(emp_dept_graph(), vec![PathEquation::new(p.clone(), p)]);
        assert!(t.is_convergent());
        assert_eq!(t.rule_count(), 0);
    }

    #[test]
    fn ill_typed_equations_are_rejected() {
        let eq = PathEquation::new(Path::parse_dotted("Emp", "mgr"), Path::identity("Dept"));
        assert!(Theory::new(Arc::new(emp_dept_graph()), vec![eq]).is_err());
    }

    #[test]
    fn completion_adds_critical_pair_rules() {
        // ab = c and bd = e overlap on b: a.e and c.d must be joined.
        let mut g = Graph::new();
        for n in ["P", "Q", "R", "S"] {
            g.add_node(n);
        }
        g.add_edge("a", "P", "Q").unwrap();
        g.add_edge("b", "Q", "R").unwrap();
        g.add_edge("c", "P", "R").unwrap();
        g.add_edge("d", "R", "S").unwrap();
        g.add_edge("e", "Q", "S").unwrap();
        let eqs = vec![
            PathEquation::new(Path::parse_dotted("P", "a.b"), Path::parse_dotted("P", "c")),
            PathEquation::new(Path::parse_dotted("Q", "b.d"), Path::parse_dotted("Q", "e")),
        ];
        let t = run(g, eqs);
        assert!(t.is_convergent());
        assert_eq!(t.rule_count(), 3);
        let third = t.active_rules().nth(2).unwrap();
        assert_eq!(third.lhs, Path::parse_dotted("P", "c.d"));
        assert_eq!(third.rhs, Path::parse_dotted("P", "a.e"));
        verify_theory(&t).unwrap();
    }

    #[test]
    fn tiny_budget_gives_partial() {
        let eq = PathEquation::new(Path::parse_dotted("A", "e.e"), Path::parse_dotted("A", "e"));
        let t = complete(
            &Theory::new(Arc::new(loop_graph("A", "e")), vec![eq]).unwrap(),
            &Budget::new(1, 10, 5).unwrap(),
        );
        assert_eq!(t.status(), CompletionStatus::Partial);
        assert_eq!(t.rule_count(), 1);
    }
}
