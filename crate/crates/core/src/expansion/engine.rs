//! Coefficient extraction by direct expansion of every atom.
//!
//! A term is expanded by choosing, for each tail entry of each atom, a nonnegative
//! power. Variables are visited children-first along head -> tail edges, so by the
//! time a variable is reached every atom it heads has a known total tail degree and
//! the only freedom left is how the variable's residual exponent is split among the
//! tail slots it occupies. Acyclicity of that graph is the summability certificate.

use std::collections::{BTreeMap, HashMap};

use num_bigint::BigInt;
use rayon::prelude::*;

use super::expr::{DeltaExpr, Term};
use super::var::{Monomial, Var};
use super::ExprError;
use crate::scalars::{binom_i128, binom_int, Coefficient, Rational};

/// Axis-aligned box of exponents, one closed interval per variable.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Window {
    vars: Vec<Var>,
    lo: Vec<i64>,
    hi: Vec<i64>,
}

impl Window {
    pub fn new(ranges: impl IntoIterator<Item = (Var, i64, i64)>) -> Self {
        let mut sorted: Vec<(Var, i64, i64)> = ranges.into_iter().collect();
        sorted.sort_by_key(|r| r.0);
        sorted.dedup_by_key(|r| r.0);
        Window {
            vars: sorted.iter().map(|r| r.0).collect(),
            lo: sorted.iter().map(|r| r.1).collect(),
            hi: sorted.iter().map(|r| r.2).collect(),
        }
    }

    /// `[-n, n]` in every listed variable.
    pub fn cube(vars: impl IntoIterator<Item = Var>, n: i64) -> Self {
        Window::new(vars.into_iter().map(|v| (v, -n, n)))
    }

    pub fn point(vars: impl IntoIterator<Item = Var>, m: &Monomial) -> Self {
        Window::new(vars.into_iter().map(|v| (v, m.exp(v), m.exp(v))))
    }

    pub fn vars(&self) -> &[Var] {
        &self.vars
    }

    pub fn range(&self, v: Var) -> Option<(i64, i64)> {
        let i = self.vars.iter().position(|&w| w == v)?;
        Some((self.lo[i], self.hi[i]))
    }

    pub fn contains(&self, m: &Monomial) -> bool {
        m.vars().all(|v| self.vars.contains(&v))
            && self.vars.iter().enumerate().all(|(i, &v)| {
                let e = m.exp(v);
                self.lo[i] <= e && e <= self.hi[i]
            })
    }

    /// Number of lattice points.
    pub fn size(&self) -> u64 {
        self.lo
            .iter()
            .zip(&self.hi)
            .map(|(l, h)| if h < l { 0 } else { (h - l + 1) as u64 })
            .product()
    }

    /// Every monomial in the box, in lexicographic exponent order.
    pub fn points(&self) -> Vec<Monomial> {
        let mut out = Vec::with_capacity(self.size() as usize);
        if self.lo.iter().zip(&self.hi).any(|(l, h)| h < l) {
            return out;
        }
        let mut cur = self.lo.clone();
        loop {
            out.push(Monomial::from_pairs(self.vars.iter().copied().zip(cur.iter().copied())));
            let mut i = self.vars.len();
            loop {
                if i == 0 {
                    return out;
                }
                i -= 1;
                if cur[i] < self.hi[i] {
                    cur[i] += 1;
                    break;
                }
                cur[i] = self.lo[i];
            }
        }
    }
}

#[derive(Clone, Debug)]
struct Node {
    head: usize,
    head_neg: bool,
    slots: Vec<(usize, bool)>,
    exp: i64,
}

/// A term prepared for enumeration over a fixed variable indexing.
#[derive(Clone, Debug)]
struct Plan {
    nodes: Vec<Node>,
    /// (node index, denominator variable index)
    delta: Option<(usize, usize)>,
    order: Vec<usize>,
    heads_of: Vec<Vec<usize>>,
    slots_of: Vec<Vec<(usize, usize)>>,
    /// Polynomial prefactor from atoms with nonnegative exponent: (factor, exponents).
    bases: Vec<(Rational, Vec<i64>)>,
}

fn index_of(vars: &[Var], v: Var) -> Result<usize, ExprError> {
    vars.iter().position(|&w| w == v).ok_or_else(|| ExprError::UnknownVariable(v.to_string()))
}

/// Multinomial expansion of `(h + t1 + ...)^n` for `n >= 0`, as (factor, exponent delta) pairs.
fn expand_finite(
    vars: &[Var],
    atom: &super::atom::ExpansionAtom,
) -> Result<Vec<(Rational, Vec<i64>)>, ExprError> {
    let mut entries: Vec<(usize, bool)> = vec![(index_of(vars, atom.head.var)?, atom.head.negative)];
    for t in &atom.tail {
        entries.push((index_of(vars, t.var)?, t.negative));
    }
    let n = atom.exp as u64;
    let mut out = Vec::new();
    let mut ks = vec![0u64; entries.len()];
    compositions(n, entries.len(), &mut ks, 0, &mut |ks| {
        let mut factor = Rational::from_bigint(multinomial(ks));
        let mut exps = vec![0i64; vars.len()];
        for (&(vi, neg), &k) in entries.iter().zip(ks) {
            exps[vi] += k as i64;
            if neg && k % 2 == 1 {
                factor = -factor;
            }
        }
        out.push((factor, exps));
    });
    Ok(out)
}

fn compositions(total: u64, parts: usize, ks: &mut [u64], at: usize, f: &mut dyn FnMut(&[u64])) {
    if parts == 0 {
        if total == 0 {
            f(ks);
        }
        return;
    }
    if at + 1 == parts {
        ks[at] = total;
        f(ks);
        return;
    }
    for k in 0..=total {
        ks[at] = k;
        compositions(total - k, parts, ks, at + 1, f);
    }
}

fn multinomial(ks: &[u64]) -> BigInt {
    let mut acc = BigInt::from(1);
    let mut running = 0u64;
    for &k in ks {
        running += k;
        acc *= binom_int(running as i64, k);
    }
    acc
}

fn compile<C: Coefficient>(vars: &[Var], term: &Term<C>) -> Result<Plan, ExprError> {
    let nv = vars.len();
    let mut base = vec![0i64; nv];
    for (v, e) in term.monomial.iter() {
        base[index_of(vars, v)?] += e;
    }
    let mut bases = vec![(Rational::one(), base)];
    let mut nodes = Vec::new();
    for atom in &term.atoms {
        if atom.exp >= 0 {
            let expansion = expand_finite(vars, atom)?;
            let mut next = Vec::with_capacity(bases.len() * expansion.len());
            for (f0, e0) in &bases {
                for (f1, e1) in &expansion {
                    let exps = e0.iter().zip(e1).map(|(a, b)| a + b).collect();
                    next.push((f0 * f1, exps));
                }
            }
            bases = next;
            continue;
        }
        if atom.is_inert() {
            return Err(ExprError::NotSummable(format!(
                "{atom} has its head variable in the tail"
            )));
        }
        nodes.push(Node {
            head: index_of(vars, atom.head.var)?,
            head_neg: atom.head.negative,
            slots: atom
                .tail
                .iter()
                .map(|t| Ok((index_of(vars, t.var)?, t.negative)))
                .collect::<Result<_, ExprError>>()?,
            exp: atom.exp,
        });
    }
    let mut delta = None;
    if let Some(d) = &term.delta {
        let di = index_of(vars, d.denom())?;
        if nodes.iter().any(|n| n.head == di || n.slots.iter().any(|s| s.0 == di)) {
            return Err(ExprError::NotSummable(format!(
                "delta denominator {} also occurs in a negative power",
                d.denom()
            )));
        }
        nodes.push(Node {
            head: index_of(vars, d.head().var)?,
            head_neg: d.head().negative,
            slots: d
                .tail()
                .iter()
                .map(|t| Ok((index_of(vars, t.var)?, t.negative)))
                .collect::<Result<_, ExprError>>()?,
            exp: 0,
        });
        delta = Some((nodes.len() - 1, di));
    }

    let mut heads_of = vec![Vec::new(); nv];
    let mut slots_of = vec![Vec::new(); nv];
    let mut children = vec![Vec::new(); nv];
    for (ni, node) in nodes.iter().enumerate() {
        heads_of[node.head].push(ni);
        for (si, &(v, _)) in node.slots.iter().enumerate() {
            slots_of[v].push((ni, si));
            children[node.head].push(v);
        }
    }
    // Children-first order; a cycle (including a self loop) means no finite expansion.
    let skip = delta.map(|(_, d)| d);
    let mut done = vec![false; nv];
    if let Some(d) = skip {
        done[d] = true;
    }
    let mut order = Vec::with_capacity(nv);
    while order.len() + usize::from(skip.is_some()) < nv {
        let next = (0..nv).find(|&v| !done[v] && children[v].iter().all(|&c| done[c] && c != v));
        match next {
            Some(v) => {
                done[v] = true;
                order.push(v);
            }
            None => {
                return Err(ExprError::NotSummable(format!(
                    "cyclic expansion directions in {}",
                    term_summary(term)
                )))
            }
        }
    }
    Ok(Plan { nodes, delta, order, heads_of, slots_of, bases })
}

fn term_summary<C: Coefficient>(term: &Term<C>) -> String {
    let mut s = String::new();
    if let Some(d) = &term.delta {
        s.push_str(&d.to_string());
    }
    for a in &term.atoms {
        if !s.is_empty() {
            s.push_str(" * ");
        }
        s.push_str(&a.to_string());
    }
    s
}

/// Weight of one node for chosen tail powers.
fn node_weight(node: &Node, exp: i64, ks: &[i64]) -> Rational {
    let total: i64 = ks.iter().sum();
    let mut negative = node.head_neg && (exp - total).rem_euclid(2) == 1;
    for (&(_, neg), &k) in node.slots.iter().zip(ks) {
        if neg && k % 2 == 1 {
            negative = !negative;
        }
    }
    let fast = (|| {
        let mut acc = binom_i128(exp, total as u64)?;
        let mut running = 0u64;
        for &k in ks {
            running += k as u64;
            acc = acc.checked_mul(binom_i128(running as i64, k as u64)?)?;
        }
        Some(acc)
    })();
    let magnitude = match fast {
        Some(v) => Rational::from_bigint(BigInt::from(v)),
        None => {
            let ku: Vec<u64> = ks.iter().map(|&k| k as u64).collect();
            Rational::from_bigint(binom_int(exp, total as u64) * multinomial(&ku))
        }
    };
    if negative {
        -magnitude
    } else {
        magnitude
    }
}

struct Walker<'a, F: FnMut(&[i64], Rational)> {
    plan: &'a Plan,
    lo: &'a [i64],
    hi: &'a [i64],
    base: &'a [i64],
    prefactor: &'a Rational,
    /// Exponent of each node; the delta node's entry is set per summation index.
    node_exp: Vec<i64>,
    ks: Vec<Vec<i64>>,
    ksum: Vec<i64>,
    exps: Vec<i64>,
    emit: F,
}

impl<F: FnMut(&[i64], Rational)> Walker<'_, F> {
    fn run(&mut self) {
        match self.plan.delta {
            None => self.visit(0),
            Some((node, d)) => {
                // the denominator's exponent is base - n - 1
                let n_lo = self.base[d] - 1 - self.hi[d];
                let n_hi = self.base[d] - 1 - self.lo[d];
                for n in n_lo..=n_hi {
                    self.exps[d] = self.base[d] - n - 1;
                    self.node_exp[node] = n;
                    self.visit(0);
                }
            }
        }
    }

    fn visit(&mut self, at: usize) {
        let plan = self.plan;
        if at == plan.order.len() {
            let mut w = self.prefactor.clone();
            for (ni, node) in plan.nodes.iter().enumerate() {
                let nw = node_weight(node, self.node_exp[ni], &self.ks[ni]);
                if nw.is_zero() {
                    return;
                }
                w = w * nw;
            }
            (self.emit)(&self.exps, w);
            return;
        }
        let v = plan.order[at];
        let mut known = self.base[v];
        for &ni in &plan.heads_of[v] {
            known += self.node_exp[ni] - self.ksum[ni];
        }
        let slots = &plan.slots_of[v];
        if slots.is_empty() {
            if self.lo[v] <= known && known <= self.hi[v] {
                self.exps[v] = known;
                self.visit(at + 1);
            }
            return;
        }
        let t_lo = (self.lo[v] - known).max(0);
        let t_hi = self.hi[v] - known;
        let mut parts = vec![0u64; slots.len()];
        for t in t_lo..=t_hi {
            self.exps[v] = known + t;
            let mut choices: Vec<Vec<u64>> = Vec::new();
            compositions(t as u64, slots.len(), &mut parts, 0, &mut |p| choices.push(p.to_vec()));
            for choice in choices {
                for (&(ni, si), &k) in slots.iter().zip(&choice) {
                    self.ks[ni][si] = k as i64;
                    self.ksum[ni] += k as i64;
                }
                self.visit(at + 1);
                for (&(ni, si), &k) in slots.iter().zip(&choice) {
                    self.ks[ni][si] = 0;
                    self.ksum[ni] -= k as i64;
                }
            }
        }
    }
}

fn walk_term<C: Coefficient>(
    vars: &[Var],
    lo: &[i64],
    hi: &[i64],
    term: &Term<C>,
    acc: &mut HashMap<Vec<i64>, C>,
) -> Result<(), ExprError> {
    let plan = compile(vars, term)?;
    for (prefactor, base) in &plan.bases {
        let mut walker = Walker {
            plan: &plan,
            lo,
            hi,
            base,
            prefactor,
            node_exp: plan.nodes.iter().map(|n| n.exp).collect(),
            ks: plan.nodes.iter().map(|n| vec![0; n.slots.len()]).collect(),
            ksum: vec![0; plan.nodes.len()],
            exps: vec![0; vars.len()],
            emit: |exps: &[i64], w: Rational| {
                acc.entry(exps.to_vec()).or_insert_with(C::zero).add_scaled(&term.coeff, &w);
            },
        };
        walker.run();
    }
    Ok(())
}

/// Syntactic certificate that every coefficient of `term` is a finite sum.
pub fn certify_term<C: Coefficient>(term: &Term<C>) -> Result<(), ExprError> {
    let vars: Vec<Var> = term.vars().into_iter().collect();
    compile(&vars, term).map(|_| ())
}

pub fn certify<C: Coefficient>(expr: &DeltaExpr<C>) -> Result<(), ExprError> {
    expr.terms().iter().try_for_each(certify_term)
}

fn window_bounds<C: Coefficient>(
    expr: &DeltaExpr<C>,
    window: &Window,
) -> Result<(Vec<Var>, Vec<i64>, Vec<i64>), ExprError> {
    let vars: Vec<Var> = expr.universe().iter().copied().collect();
    let mut lo = Vec::with_capacity(vars.len());
    let mut hi = Vec::with_capacity(vars.len());
    for &v in &vars {
        let (l, h) = window.range(v).ok_or_else(|| {
            ExprError::UnknownVariable(format!("window has no range for {v}"))
        })?;
        lo.push(l);
        hi.push(h);
    }
    Ok((vars, lo, hi))
}

/// Every nonzero coefficient of `expr` inside `window`.
pub fn expand_on_window<C: Coefficient>(
    expr: &DeltaExpr<C>,
    window: &Window,
) -> Result<BTreeMap<Monomial, C>, ExprError> {
    let (vars, lo, hi) = window_bounds(expr, window)?;
    let partials: Vec<HashMap<Vec<i64>, C>> = expr
        .terms()
        .par_iter()
        .map(|term| {
            let mut acc = HashMap::new();
            walk_term(&vars, &lo, &hi, term, &mut acc)?;
            Ok(acc)
        })
        .collect::<Result<_, ExprError>>()?;
    let mut total: HashMap<Vec<i64>, C> = HashMap::new();
    for part in partials {
        for (k, c) in part {
            total.entry(k).or_insert_with(C::zero).add_assign_ref(&c);
        }
    }
    Ok(total
        .into_iter()
        .filter(|(_, c)| !c.is_zero())
        .map(|(k, c)| (Monomial::from_pairs(vars.iter().copied().zip(k)), c))
        .collect())
}

/// Exact coefficient of one monomial.
pub fn coeff_of<C: Coefficient>(expr: &DeltaExpr<C>, monomial: &Monomial) -> Result<C, ExprError> {
    if let Some(v) = monomial.vars().find(|v| !expr.universe().contains(v)) {
        return Err(ExprError::UnknownVariable(v.to_string()));
    }
    let window = Window::point(expr.universe().iter().copied(), monomial);
    let (vars, lo, hi) = window_bounds(expr, &window)?;
    let mut acc = HashMap::new();
    for term in expr.terms() {
        walk_term(&vars, &lo, &hi, term, &mut acc)?;
    }
    Ok(acc.into_values().next().unwrap_or_else(C::zero))
}
