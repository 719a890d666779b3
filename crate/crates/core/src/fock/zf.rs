//! Symbolic normal ordering of Zamolodchikov-Faddeev words acting on `Ω`.
//!
//! Rapidities are opaque atoms: two rapidities are "equal" only when they
//! are the same `f64`, and `δ(θ−θ′)` becomes the Kronecker symbol on atoms.
//! Rewrites use
//!
//! * `z_α(θ)Ω = 0`,
//! * `z_α(θ)z†_β(θ′) = S^{αγ}_{βδ}(θ′−θ) z†_γ(θ′)z_δ(θ) + δ^{αβ}δ(θ−θ′)`,
//! * `z†_α(θ)z†_β(θ′) = S^{γδ}_{αβ}(θ−θ′) z†_γ(θ′)z†_δ(θ)` to sort creators.
//!
//! Creators with the same atom are reordered by index only when `S(0)` is a
//! signed flip, and annihilated when the exchange forces a vanishing square.

use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap};
use std::sync::Mutex;

use crate::error::{Error, Result};
use crate::linalg::{identity, max_abs, CMat};
use crate::smatrix::{comp, SMatrixModel};
use crate::C64;

/// Coefficients below this magnitude are dropped.
pub const DROP_TOL: f64 = 1e-14;

/// Grid used when printing canonical coefficients.
pub const PRINT_GRID: f64 = 1e-10;

/// Cap on the number of pending terms during a rewrite.
pub const TERM_CAP: usize = 2_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum OpKind {
    Create,
    Annihilate,
}

/// A rapidity atom, ordered by `f64::total_cmp`.
#[derive(Debug, Clone, Copy)]
pub struct Atom(pub f64);

impl PartialEq for Atom {
    fn eq(&self, other: &Self) -> bool {
        self.0.total_cmp(&other.0) == Ordering::Equal
    }
}
impl Eq for Atom {}
impl PartialOrd for Atom {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Atom {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.total_cmp(&other.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct Op {
    pub kind: OpKind,
    pub theta: Atom,
    pub index: usize,
}

impl Op {
    pub fn create(index: usize, theta: f64) -> Self {
        Op { kind: OpKind::Create, theta: Atom(theta), index }
    }

    pub fn annihilate(index: usize, theta: f64) -> Self {
        Op { kind: OpKind::Annihilate, theta: Atom(theta), index }
    }

    pub fn adjoint(self) -> Self {
        let kind = match self.kind {
            OpKind::Create => OpKind::Annihilate,
            OpKind::Annihilate => OpKind::Create,
        };
        Op { kind, ..self }
    }
}

/// A product of operators, leftmost first, applied to `Ω`.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ZfExpr {
    pub ops: Vec<Op>,
}

impl ZfExpr {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn create(mut self, index: usize, theta: f64) -> Self {
        self.ops.push(Op::create(index, theta));
        self
    }

    pub fn annihilate(mut self, index: usize, theta: f64) -> Self {
        self.ops.push(Op::annihilate(index, theta));
        self
    }

    /// `z†_{α₁}(θ₁)⋯z†_{α_n}(θ_n)` from a list of `(θ, α)`.
    pub fn creators(word: &[(f64, usize)]) -> Self {
        ZfExpr { ops: word.iter().map(|&(t, a)| Op::create(a, t)).collect() }
    }

    /// The adjoint operator word: reversed, with creators and annihilators swapped.
    pub fn adjoint(&self) -> Self {
        ZfExpr { ops: self.ops.iter().rev().map(|o| o.adjoint()).collect() }
    }

    pub fn then(&self, other: &ZfExpr) -> Self {
        let mut ops = self.ops.clone();
        ops.extend_from_slice(&other.ops);
        ZfExpr { ops }
    }
}

/// One term `c · z†_{α₁}(θ₁)⋯z†_{α_n}(θ_n)Ω`.
#[derive(Debug, Clone, PartialEq)]
pub struct WordState {
    pub coefficient: C64,
    pub word: Vec<(f64, usize)>,
}

type Key = Vec<(Atom, usize)>;

/// A finite linear combination of creator words on `Ω`, in canonical order.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct StateSum {
    terms: BTreeMap<Key, C64>,
}

impl StateSum {
    pub fn vacuum() -> Self {
        let mut terms = BTreeMap::new();
        terms.insert(Vec::new(), C64::new(1.0, 0.0));
        StateSum { terms }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> Vec<WordState> {
        self.terms
            .iter()
            .map(|(k, &c)| WordState { coefficient: c, word: k.iter().map(|&(t, a)| (t.0, a)).collect() })
            .collect()
    }

    /// Coefficient of the given creator word (in canonical order).
    pub fn coefficient(&self, word: &[(f64, usize)]) -> C64 {
        let key: Key = word.iter().map(|&(t, a)| (Atom(t), a)).collect();
        self.terms.get(&key).copied().unwrap_or_default()
    }

    pub fn vacuum_coefficient(&self) -> C64 {
        self.terms.get(&Vec::new()).copied().unwrap_or_default()
    }

    fn add(&mut self, key: Key, c: C64) {
        let e = self.terms.entry(key).or_default();
        *e += c;
    }

    fn prune(mut self) -> Self {
        self.terms.retain(|_, c| c.norm() >= DROP_TOL);
        self
    }

    pub fn scale(&self, s: C64) -> Self {
        StateSum { terms: self.terms.iter().map(|(k, c)| (k.clone(), c * s)).collect() }.prune()
    }

    pub fn plus(&self, other: &StateSum) -> Self {
        let mut out = self.clone();
        for (k, c) in &other.terms {
            out.add(k.clone(), *c);
        }
        out.prune()
    }

    /// Largest coefficient difference over the union of words.
    pub fn distance(&self, other: &StateSum) -> f64 {
        let mut d: f64 = 0.0;
        for (k, c) in &self.terms {
            d = d.max((c - other.terms.get(k).copied().unwrap_or_default()).norm());
        }
        for (k, c) in &other.terms {
            if !self.terms.contains_key(k) {
                d = d.max(c.norm());
            }
        }
        d
    }

    /// Deterministic text form: one term per line, coefficients rounded to
    /// [`PRINT_GRID`].
    pub fn canonical_string(&self) -> String {
        let round = |x: f64| {
            let r = (x / PRINT_GRID).round() * PRINT_GRID;
            if r == 0.0 {
                0.0
            } else {
                r
            }
        };
        let mut out = String::new();
        for (k, c) in &self.terms {
            let (re, im) = (round(c.re), round(c.im));
            if re == 0.0 && im == 0.0 {
                continue;
            }
            out.push_str(&format!("({re:.10}{im:+.10}i)"));
            for (t, a) in k {
                out.push_str(&format!(" z+[{}]({:e})", a + 1, t.0));
            }
            out.push('\n');
        }
        out
    }
}

#[derive(Debug, Clone)]
enum ZeroPoint {
    SignedFlip(Vec<Vec<f64>>),
    Scalar(f64),
    General,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Strategy {
    Leftmost,
    Rightmost,
}

#[derive(Debug, Clone, Copy)]
enum Redex {
    Kill,
    Mixed(usize),
    Exchange(usize),
    SignedSwap(usize, f64),
}

/// Normal-ordering engine bound to one model, with a cache of `S` values.
pub struct ZfEngine<'a> {
    model: &'a SMatrixModel,
    d: usize,
    zero: ZeroPoint,
    cache: Mutex<HashMap<u64, CMat>>,
}

impl<'a> ZfEngine<'a> {
    pub fn new(model: &'a SMatrixModel) -> Result<Self> {
        let d = model.dim_k();
        let zero = if let Some(signs) = model.zero_point_signs() {
            ZeroPoint::SignedFlip(signs)
        } else {
            let s0 = model.eval_real(0.0)?;
            let c = s0[(0, 0)].re;
            if (c.abs() - 1.0).abs() < 1e-12 && max_abs(&(&s0 - identity(d * d) * C64::new(c, 0.0))) < 1e-12 {
                ZeroPoint::Scalar(c.signum())
            } else {
                ZeroPoint::General
            }
        };
        Ok(Self { model, d, zero, cache: Mutex::new(HashMap::new()) })
    }

    pub fn model(&self) -> &SMatrixModel {
        self.model
    }

    fn s(&self, theta: f64) -> Result<CMat> {
        let key = theta.to_bits();
        if let Some(m) = self.cache.lock().unwrap().get(&key) {
            return Ok(m.clone());
        }
        let m = self.model.eval_real(theta)?;
        self.cache.lock().unwrap().insert(key, m.clone());
        Ok(m)
    }

    fn creator_redex(&self, a: &Op, b: &Op) -> Option<Redex> {
        match a.theta.cmp(&b.theta) {
            Ordering::Less => None,
            Ordering::Greater => Some(Redex::Exchange(0)),
            Ordering::Equal => match &self.zero {
                ZeroPoint::SignedFlip(signs) => {
                    // z†_α z†_β = signs[β][α] z†_β z†_α at coinciding atoms.
                    let s = signs[b.index][a.index];
                    if a.index > b.index {
                        Some(Redex::SignedSwap(0, s))
                    } else if a.index == b.index && s < 0.0 {
                        Some(Redex::Kill)
                    } else {
                        None
                    }
                }
                ZeroPoint::Scalar(c) if *c < 0.0 => Some(Redex::Kill),
                _ => None,
            },
        }
    }

    fn find_redex(&self, ops: &[Op], strategy: Strategy) -> Option<Redex> {
        let n = ops.len();
        let mut found = Vec::new();
        for i in 0..n.saturating_sub(1) {
            let (a, b) = (&ops[i], &ops[i + 1]);
            let r = match (a.kind, b.kind) {
                (OpKind::Annihilate, OpKind::Create) => Some(Redex::Mixed(i)),
                (OpKind::Create, OpKind::Create) => self.creator_redex(a, b).map(|r| match r {
                    Redex::Exchange(_) => Redex::Exchange(i),
                    Redex::SignedSwap(_, s) => Redex::SignedSwap(i, s),
                    other => other,
                }),
                _ => None,
            };
            if let Some(r) = r {
                if strategy == Strategy::Leftmost {
                    return Some(r);
                }
                found.push(r);
            }
        }
        if ops.last().is_some_and(|o| o.kind == OpKind::Annihilate) {
            found.push(Redex::Kill);
        }
        match strategy {
            Strategy::Leftmost => found.first().copied(),
            Strategy::Rightmost => found.last().copied(),
        }
    }

    fn rewrite(&self, ops: &[Op], c: C64, redex: Redex, out: &mut BTreeMap<Vec<Op>, C64>) -> Result<()> {
        let d = self.d;
        let mut push = |v: Vec<Op>, x: C64| {
            if x.norm() >= DROP_TOL {
                *out.entry(v).or_default() += x;
            }
        };
        match redex {
            Redex::Kill => {}
            Redex::SignedSwap(i, s) => {
                let mut v = ops.to_vec();
                v.swap(i, i + 1);
                push(v, c * s);
            }
            Redex::Mixed(i) => {
                let (a, b) = (ops[i], ops[i + 1]);
                let s = self.s(b.theta.0 - a.theta.0)?;
                for g in 0..d {
                    for e in 0..d {
                        let x = comp(&s, d, a.index, g, b.index, e);
                        if x.norm() == 0.0 {
                            continue;
                        }
                        let mut v = ops.to_vec();
                        v[i] = Op::create(g, b.theta.0);
                        v[i + 1] = Op::annihilate(e, a.theta.0);
                        push(v, c * x);
                    }
                }
                if a.index == b.index && a.theta == b.theta {
                    let mut v = ops[..i].to_vec();
                    v.extend_from_slice(&ops[i + 2..]);
                    push(v, c);
                }
            }
            Redex::Exchange(i) => {
                let (a, b) = (ops[i], ops[i + 1]);
                let s = self.s(a.theta.0 - b.theta.0)?;
                for g in 0..d {
                    for e in 0..d {
                        let x = comp(&s, d, g, e, a.index, b.index);
                        if x.norm() == 0.0 {
                            continue;
                        }
                        let mut v = ops.to_vec();
                        v[i] = Op::create(g, b.theta.0);
                        v[i + 1] = Op::create(e, a.theta.0);
                        push(v, c * x);
                    }
                }
            }
        }
        Ok(())
    }

    pub fn normal_order(&self, expr: &ZfExpr) -> Result<StateSum> {
        self.normal_order_with(expr, Strategy::Rightmost)
    }

    pub fn normal_order_with(&self, expr: &ZfExpr, strategy: Strategy) -> Result<StateSum> {
        if let Some(o) = expr.ops.iter().find(|o| o.index >= self.d) {
            return Err(Error::Index { index: o.index, dim: self.d });
        }
        if let Some(o) = expr.ops.iter().find(|o| !o.theta.0.is_finite()) {
            return Err(Error::Config(format!("non-finite rapidity atom {}", o.theta.0)));
        }
        let mut pending: BTreeMap<Vec<Op>, C64> = BTreeMap::new();
        pending.insert(expr.ops.clone(), C64::new(1.0, 0.0));
        let mut result = StateSum::default();
        while let Some((ops, c)) = pending.pop_first() {
            if c.norm() < DROP_TOL {
                continue;
            }
            match self.find_redex(&ops, strategy) {
                None => result.add(ops.iter().map(|o| (o.theta, o.index)).collect(), c),
                Some(r) => self.rewrite(&ops, c, r, &mut pending)?,
            }
            if pending.len() > TERM_CAP {
                return Err(Error::Cap(format!("normal ordering exceeded {TERM_CAP} pending terms")));
            }
        }
        Ok(result.prune())
    }

    /// Normal-orders `expr` applied to every word of `state`.
    pub fn apply(&self, expr: &ZfExpr, state: &StateSum) -> Result<StateSum> {
        let mut out = StateSum::default();
        for w in state.terms() {
            let full = expr.then(&ZfExpr::creators(&w.word));
            for t in self.normal_order(&full)?.terms() {
                out.add(t.word.iter().map(|&(th, a)| (Atom(th), a)).collect(), t.coefficient * w.coefficient);
            }
        }
        Ok(out.prune())
    }

    /// `⟨a, b⟩`, antilinear in `a`.
    pub fn state_inner(&self, a: &StateSum, b: &StateSum) -> Result<C64> {
        let mut acc = C64::new(0.0, 0.0);
        for wa in a.terms() {
            let adj = ZfExpr::creators(&wa.word).adjoint();
            for wb in b.terms() {
                if wa.word.len() != wb.word.len() {
                    continue;
                }
                let v = self.normal_order(&adj.then(&ZfExpr::creators(&wb.word)))?.vacuum_coefficient();
                acc += wa.coefficient.conj() * wb.coefficient * v;
            }
        }
        Ok(acc)
    }

    /// The canonical state `z†_{α₁}(θ₁)⋯z†_{α_n}(θ_n)Ω`.
    pub fn word_state(&self, word: &[(f64, usize)]) -> Result<StateSum> {
        self.normal_order(&ZfExpr::creators(word))
    }
}
