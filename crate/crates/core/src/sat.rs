//! 3-CNF formulas and their compilation into connection instances.
//!
//! The compiled instance has a feasible solution with `alpha = 12m + 4n`
//! auxiliary points exactly when the formula is satisfiable. The layout is
//! fixed by two global orders (left to right and bottom to top); the point
//! at rank `k` of an order gets coordinate `k` on that axis.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::bounds::vs_certificate_for;
use crate::error::{GmcError, Result};
use crate::model::{Demand, Instance, Point, Pt, Solution};
use crate::verify::{Connectivity, VsCertificate};

/// A 3-CNF formula; literal `+i` is variable `i`, `-i` its negation (1-based).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CnfFormula {
    pub n: usize,
    pub clauses: Vec<[i32; 3]>,
}

impl CnfFormula {
    pub fn new(n: usize, clauses: Vec<[i32; 3]>) -> Result<Self> {
        for (j, c) in clauses.iter().enumerate() {
            for &l in c {
                if l == 0 || l.unsigned_abs() as usize > n {
                    return Err(GmcError::Cnf {
                        line: 0,
                        message: format!("clause {} has literal {l} outside 1..={n}", j + 1),
                    });
                }
            }
        }
        Ok(CnfFormula { n, clauses })
    }

    pub fn m(&self) -> usize {
        self.clauses.len()
    }

    /// Whether some clause repeats a variable.
    pub fn has_repeated_literals(&self) -> bool {
        self.clauses.iter().any(|c| {
            let vars: BTreeSet<u32> = c.iter().map(|l| l.unsigned_abs()).collect();
            vars.len() < 3
        })
    }

    fn literal_true(l: i32, assignment: &[bool]) -> bool {
        assignment[l.unsigned_abs() as usize - 1] == (l > 0)
    }

    /// Indices of the clauses satisfied by `assignment`.
    pub fn satisfied_clauses(&self, assignment: &[bool]) -> BTreeSet<usize> {
        self.clauses
            .iter()
            .enumerate()
            .filter(|(_, c)| c.iter().any(|&l| Self::literal_true(l, assignment)))
            .map(|(j, _)| j)
            .collect()
    }

    pub fn evaluate(&self, assignment: &[bool]) -> bool {
        self.satisfied_clauses(assignment).len() == self.m()
    }

    /// First satisfying assignment in binary counting order, by exhaustion.
    pub fn solve_brute_force(&self) -> Option<Vec<bool>> {
        assert!(self.n < 32, "exhaustive search over {} variables", self.n);
        (0u64..1 << self.n)
            .map(|bits| assignment_from_bits(bits, self.n))
            .find(|a| self.evaluate(a))
    }

    pub fn to_dimacs(&self) -> String {
        let mut out = format!("p cnf {} {}\n", self.n, self.m());
        for c in &self.clauses {
            out.push_str(&format!("{} {} {} 0\n", c[0], c[1], c[2]));
        }
        out
    }

    /// Parses DIMACS CNF. Comment lines start with `c`; a `%` line ends input.
    pub fn parse_dimacs(text: &str) -> Result<Self> {
        let err = |line: usize, message: String| GmcError::Cnf { line, message };
        let mut header: Option<(usize, usize)> = None;
        let mut clauses = Vec::new();
        let mut current: Vec<(i32, usize)> = Vec::new();
        for (k, raw) in text.lines().enumerate() {
            let line_no = k + 1;
            let line = raw.trim();
            if line.is_empty() || line.starts_with('c') {
                continue;
            }
            if line.starts_with('%') {
                break;
            }
            if line.starts_with('p') {
                let parts: Vec<&str> = line.split_whitespace().collect();
                if header.is_some() {
                    return Err(err(line_no, "second header line".into()));
                }
                if parts.len() != 4 || parts[0] != "p" || parts[1] != "cnf" {
                    return Err(err(line_no, "expected `p cnf <vars> <clauses>`".into()));
                }
                let n = parts[2]
                    .parse()
                    .map_err(|_| err(line_no, format!("bad variable count `{}`", parts[2])))?;
                let m = parts[3]
                    .parse()
                    .map_err(|_| err(line_no, format!("bad clause count `{}`", parts[3])))?;
                header = Some((n, m));
                continue;
            }
            let Some((n, _)) = header else {
                return Err(err(line_no, "clause before header".into()));
            };
            for tok in line.split_whitespace() {
                let l: i32 = tok
                    .parse()
                    .map_err(|_| err(line_no, format!("bad literal `{tok}`")))?;
                if l == 0 {
                    if current.len() != 3 {
                        return Err(err(
                            line_no,
                            format!("clause has {} literals, need 3", current.len()),
                        ));
                    }
                    clauses.push([current[0].0, current[1].0, current[2].0]);
                    current.clear();
                } else if l.unsigned_abs() as usize > n {
                    return Err(err(line_no, format!("literal {l} exceeds {n} variables")));
                } else {
                    current.push((l, line_no));
                }
            }
        }
        let Some((n, m)) = header else {
            return Err(err(0, "missing `p cnf` header".into()));
        };
        if let Some(&(_, line)) = current.first() {
            return Err(err(line, "last clause is not terminated by 0".into()));
        }
        if clauses.len() != m {
            return Err(err(
                0,
                format!("header announces {m} clauses, found {}", clauses.len()),
            ));
        }
        CnfFormula::new(n, clauses)
    }
}

/// Assignment whose variable `i` (0-based) is bit `i` of `bits`.
pub fn assignment_from_bits(bits: u64, n: usize) -> Vec<bool> {
    (0..n).map(|i| bits >> i & 1 == 1).collect()
}

/// What a gadget point stands for. Indices are 1-based like the formula.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Role {
    Start,
    /// Clause point `c_j`.
    Clause(usize),
    /// Literal point for slot `k` of clause `j`.
    ClauseLiteral(usize, usize),
    /// Variable point `x_i`.
    Variable(usize),
    /// Literal point `x_i^+` or `x_i^-`.
    VariableLiteral(usize, bool),
    /// Demand point `d_i`.
    DemandPoint(usize),
    /// `k`-th positive or negative literal connector of variable `i`.
    Connector(usize, usize, bool),
    /// Connection point for slot `k` of clause `j` (variable `i`).
    Connection { i: usize, j: usize, k: usize, positive: bool },
}

fn sign(positive: bool) -> char {
    if positive {
        '+'
    } else {
        '-'
    }
}

impl fmt::Display for Role {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Role::Start => write!(f, "S"),
            Role::Clause(j) => write!(f, "c{j}"),
            Role::ClauseLiteral(j, k) => write!(f, "l{j}_{k}"),
            Role::Variable(i) => write!(f, "x{i}"),
            Role::VariableLiteral(i, s) => write!(f, "x{i}{}", sign(s)),
            Role::DemandPoint(i) => write!(f, "d{i}"),
            Role::Connector(i, k, s) => write!(f, "x{i}_{k}{}", sign(s)),
            Role::Connection { i, j, k, positive } => write!(f, "p{i}_{j}_{k}{}", sign(positive)),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum DemandRole {
    /// Start to clause point.
    Sc,
    /// Start to variable point.
    Sx,
    /// Variable point to demand point.
    Xd,
    /// Clause literal to clause point.
    Clause,
    /// Either half of a variable-clause path.
    Connection,
    /// Literal point to connector or to demand point.
    VariableInternal,
}

impl DemandRole {
    pub fn name(&self) -> &'static str {
        match self {
            DemandRole::Sc => "SC",
            DemandRole::Sx => "SX",
            DemandRole::Xd => "XD",
            DemandRole::Clause => "clause",
            DemandRole::Connection => "connection",
            DemandRole::VariableInternal => "variable-internal",
        }
    }
}

#[derive(Clone, Debug)]
pub struct GadgetInstance {
    pub formula: CnfFormula,
    pub instance: Instance,
    pub alpha: usize,
    /// Role of each point, by point index.
    pub roles: Vec<Role>,
    pub demand_roles: BTreeMap<Demand, DemandRole>,
    /// Certificate covering every non-SC demand.
    pub certificate: VsCertificate,
}

struct Builder {
    roles: Vec<Role>,
    index: BTreeMap<Role, usize>,
    demands: Vec<(Role, Role, DemandRole)>,
}

impl Builder {
    fn add(&mut self, r: Role) {
        self.index.insert(r, self.roles.len());
        self.roles.push(r);
    }

    fn demand(&mut self, a: Role, b: Role, role: DemandRole) {
        self.demands.push((a, b, role));
    }
}

/// One clause slot: the literal's variable, sign and its connector index.
struct Occurrence {
    i: usize,
    j: usize,
    k: usize,
    positive: bool,
    connector: usize,
}

/// Clause slots ordered as they appear on the clause diagonal: positive
/// literals first (upper left), then negative ones.
fn slot_order(clause: &[i32; 3]) -> Vec<usize> {
    let mut ks: Vec<usize> = (0..3).collect();
    ks.sort_by_key(|&k| (clause[k] < 0, k));
    ks
}

/// Compiles `formula` into its gadget instance.
pub fn sat_reduce(formula: &CnfFormula) -> Result<GadgetInstance> {
    let formula = CnfFormula::new(formula.n, formula.clauses.clone())?;
    let (n, m) = (formula.n, formula.m());
    // Occurrences, with connectors numbered per variable and sign in clause order.
    let mut occ: Vec<Occurrence> = Vec::new();
    let mut counters: BTreeMap<(usize, bool), usize> = BTreeMap::new();
    for (j0, c) in formula.clauses.iter().enumerate() {
        for (k0, &l) in c.iter().enumerate() {
            let (i, positive) = (l.unsigned_abs() as usize, l > 0);
            let counter = counters.entry((i, positive)).or_insert(0);
            *counter += 1;
            occ.push(Occurrence {
                i,
                j: j0 + 1,
                k: k0 + 1,
                positive,
                connector: *counter,
            });
        }
    }
    let connection = |o: &Occurrence| Role::Connection {
        i: o.i,
        j: o.j,
        k: o.k,
        positive: o.positive,
    };
    let occurrence = |j: usize, k: usize| &occ[(j - 1) * 3 + (k - 1)];
    let by_var = |i: usize, positive: bool| -> Vec<&Occurrence> {
        occ.iter().filter(|o| o.i == i && o.positive == positive).collect()
    };

    let mut xs: Vec<Role> = vec![Role::Start];
    let mut ys: Vec<Role> = vec![Role::Start];

    // Variable gadgets on a descending diagonal.
    for i in 1..=n {
        xs.push(Role::Variable(i));
        xs.push(Role::VariableLiteral(i, true));
        for o in by_var(i, true) {
            xs.push(Role::Connector(i, o.connector, true));
            xs.push(connection(o));
        }
        xs.push(Role::VariableLiteral(i, false));
        xs.push(Role::DemandPoint(i));
        for o in by_var(i, false) {
            xs.push(Role::Connector(i, o.connector, false));
        }
    }
    for i in (1..=n).rev() {
        ys.push(Role::Variable(i));
        ys.push(Role::VariableLiteral(i, false));
        for o in by_var(i, false).into_iter().rev() {
            ys.push(Role::Connector(i, o.connector, false));
            ys.push(connection(o));
        }
        ys.push(Role::VariableLiteral(i, true));
        ys.push(Role::DemandPoint(i));
        for o in by_var(i, true).into_iter().rev() {
            ys.push(Role::Connector(i, o.connector, true));
        }
    }

    // Clause gadgets on a descending diagonal above and right of all variables.
    for j in 1..=m {
        for k in slot_order(&formula.clauses[j - 1]) {
            let o = occurrence(j, k + 1);
            if !o.positive {
                xs.push(connection(o));
            }
            xs.push(Role::ClauseLiteral(j, k + 1));
        }
        xs.push(Role::Clause(j));
    }
    for j in (1..=m).rev() {
        for k in slot_order(&formula.clauses[j - 1]).into_iter().rev() {
            let o = occurrence(j, k + 1);
            if o.positive {
                ys.push(connection(o));
            }
            ys.push(Role::ClauseLiteral(j, k + 1));
        }
        ys.push(Role::Clause(j));
    }

    let mut b = Builder {
        roles: Vec::new(),
        index: BTreeMap::new(),
        demands: Vec::new(),
    };
    for r in &xs {
        b.add(*r);
    }
    debug_assert_eq!(xs.len(), ys.len());

    for j in 1..=m {
        b.demand(Role::Start, Role::Clause(j), DemandRole::Sc);
    }
    for i in 1..=n {
        b.demand(Role::Start, Role::Variable(i), DemandRole::Sx);
        b.demand(Role::Variable(i), Role::DemandPoint(i), DemandRole::Xd);
        for s in [true, false] {
            b.demand(
                Role::VariableLiteral(i, s),
                Role::DemandPoint(i),
                DemandRole::VariableInternal,
            );
        }
    }
    for o in &occ {
        let lit = Role::VariableLiteral(o.i, o.positive);
        let conn = Role::Connector(o.i, o.connector, o.positive);
        let l = Role::ClauseLiteral(o.j, o.k);
        b.demand(lit, conn, DemandRole::VariableInternal);
        b.demand(conn, connection(o), DemandRole::Connection);
        b.demand(connection(o), l, DemandRole::Connection);
        b.demand(l, Role::Clause(o.j), DemandRole::Clause);
    }

    let x_rank: BTreeMap<Role, usize> = xs.iter().enumerate().map(|(k, r)| (*r, k)).collect();
    let y_rank: BTreeMap<Role, usize> = ys.iter().enumerate().map(|(k, r)| (*r, k)).collect();
    let points: Vec<Point> = b
        .roles
        .iter()
        .map(|r| {
            let pos = Pt::from_input(x_rank[r] as i64, y_rank[r] as i64)?;
            Ok(Point::new(r.to_string(), pos))
        })
        .collect::<Result<_>>()?;
    let pairs: Vec<(usize, usize)> = b
        .demands
        .iter()
        .map(|(a, c, _)| (b.index[a], b.index[c]))
        .collect();
    let instance = Instance::explicit(points, pairs)?;
    // Every demand ascends, so normalization keeps the given orientation.
    let demand_roles: BTreeMap<Demand, DemandRole> = b
        .demands
        .iter()
        .map(|(a, c, role)| (Demand::new(b.index[a], b.index[c]), *role))
        .collect();
    if instance.demands.len() != demand_roles.len()
        || instance.demands.iter().any(|d| !demand_roles.contains_key(d))
    {
        return Err(GmcError::InvalidArgument(
            "gadget layout produced a non-ascending demand".into(),
        ));
    }

    let non_sc: Vec<Demand> = instance
        .demands
        .iter()
        .copied()
        .filter(|d| demand_roles[d] != DemandRole::Sc)
        .collect();
    let certificate = vs_certificate_for(&instance, &non_sc).ok_or_else(|| {
        GmcError::InvalidArgument("gadget demands are not vertically separable".into())
    })?;
    Ok(GadgetInstance {
        alpha: 12 * m + 4 * n,
        roles: b.roles,
        demand_roles,
        certificate,
        instance,
        formula,
    })
}

impl GadgetInstance {
    pub fn point_of(&self, role: Role) -> usize {
        self.roles
            .iter()
            .position(|r| *r == role)
            .expect("role present in gadget")
    }

    pub fn pos_of(&self, role: Role) -> Pt {
        self.instance.pos(self.point_of(role))
    }

    pub fn demands_with(&self, role: DemandRole) -> Vec<Demand> {
        self.demand_roles
            .iter()
            .filter(|(_, r)| **r == role)
            .map(|(d, _)| *d)
            .collect()
    }

    pub fn non_sc_demands(&self) -> Vec<Demand> {
        self.demand_roles
            .iter()
            .filter(|(_, r)| **r != DemandRole::Sc)
            .map(|(d, _)| *d)
            .collect()
    }

    /// Checks the layout rules: strictness, ascending non-SC demands, gadget
    /// diagonals and placement. Returns the first broken rule.
    pub fn validate(&self) -> std::result::Result<(), String> {
        let inst = &self.instance;
        if !inst.is_strict() {
            return Err("points share a row or column".into());
        }
        if self.non_sc_demands().len() != self.alpha {
            return Err(format!(
                "{} non-SC demands, alpha is {}",
                self.non_sc_demands().len(),
                self.alpha
            ));
        }
        for d in self.non_sc_demands() {
            let (p, q) = inst.ends(&d);
            if !(p.x < q.x && p.y < q.y) {
                return Err(format!(
                    "demand {} -> {} does not ascend",
                    self.roles[d.a], self.roles[d.b]
                ));
            }
        }
        let at = |r: Role| self.pos_of(r);
        let below_left = |a: Pt, b: Pt| a.x < b.x && a.y < b.y;
        let descending = |seq: &[Pt]| seq.windows(2).all(|w| w[0].x < w[1].x && w[0].y > w[1].y);
        let (n, m) = (self.formula.n, self.formula.m());
        let s = at(Role::Start);
        if inst.points.iter().any(|p| p.pos != s && !below_left(s, p.pos)) {
            return Err("start point is not below and left of everything".into());
        }
        let xi: Vec<Pt> = (1..=n).map(|i| at(Role::Variable(i))).collect();
        let cj: Vec<Pt> = (1..=m).map(|j| at(Role::Clause(j))).collect();
        if !descending(&xi) || !descending(&cj) {
            return Err("gadgets are not on descending diagonals".into());
        }
        for i in 1..=n {
            let (x, d) = (at(Role::Variable(i)), at(Role::DemandPoint(i)));
            let (lp, ln) = (
                at(Role::VariableLiteral(i, true)),
                at(Role::VariableLiteral(i, false)),
            );
            if !(below_left(x, lp) && below_left(lp, d) && below_left(x, ln) && below_left(ln, d)) {
                return Err(format!("literal points of x{i} are not inside R(x{i}, d{i})"));
            }
            if !(lp.x < ln.x && lp.y > ln.y) {
                return Err(format!("x{i}+ is not upper left of x{i}-"));
            }
            let mut diag: Vec<Pt> = Vec::new();
            for positive in [true, false] {
                if !positive {
                    diag.push(d);
                }
                let cnt = self
                    .roles
                    .iter()
                    .filter(|r| matches!(r, Role::Connector(ii, _, s) if *ii == i && *s == positive))
                    .count();
                diag.extend((1..=cnt).map(|k| at(Role::Connector(i, k, positive))));
            }
            if !descending(&diag) {
                return Err(format!("connectors of x{i} are not a descending diagonal"));
            }
            for c in &cj {
                if !below_left(d, *c) {
                    return Err(format!("gadget of x{i} is not below left of the clauses"));
                }
            }
        }
        for j in 1..=m {
            let c = at(Role::Clause(j));
            let order = slot_order(&self.formula.clauses[j - 1]);
            let lits: Vec<Pt> = order.iter().map(|&k| at(Role::ClauseLiteral(j, k + 1))).collect();
            if !descending(&lits) {
                return Err(format!("literals of c{j} are not a descending diagonal"));
            }
            if lits.iter().any(|l| !below_left(*l, c)) {
                return Err(format!("c{j} is not upper right of its literals"));
            }
        }
        Ok(())
    }

    /// Top-left corners of all non-SC demands except XD, plus one corner per
    /// variable choosing its positive or negative literal point. Returns the
    /// solution and the satisfied SC demands as 0-based clause indices.
    pub fn boolean_solution(&self, assignment: &[bool]) -> Result<(Solution, BTreeSet<usize>)> {
        if assignment.len() != self.formula.n {
            return Err(GmcError::InvalidArgument(format!(
                "assignment covers {} of {} variables",
                assignment.len(),
                self.formula.n
            )));
        }
        let inst = &self.instance;
        let mut aux: Vec<Pt> = Vec::with_capacity(self.alpha);
        for (d, role) in &self.demand_roles {
            if matches!(role, DemandRole::Sc | DemandRole::Xd) {
                continue;
            }
            let (p, q) = inst.ends(d);
            aux.push(Pt::new(p.x, q.y));
        }
        for (i, &value) in assignment.iter().enumerate() {
            let x = self.pos_of(Role::Variable(i + 1));
            let lit = self.pos_of(Role::VariableLiteral(i + 1, value));
            aux.push(Pt::new(x.x, lit.y));
        }
        let sol = Solution::for_instance(inst, aux);
        let conn = Connectivity::new(inst.positions().into_iter().chain(sol.aux.iter().copied()));
        let s = self.pos_of(Role::Start);
        let satisfied = (1..=self.formula.m())
            .filter(|&j| conn.connected(s, self.pos_of(Role::Clause(j))))
            .map(|j| j - 1)
            .collect();
        Ok((sol, satisfied))
    }
}
