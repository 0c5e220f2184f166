//! A linear program with norm terms.
//!
//! Rows read `a·y + Σ_k β_k ‖M_k y + m_k‖_* (≤ | =) b` where `‖·‖_*` is the
//! dual of the uncertainty norm. The same object is linearized into a MILP
//! (epigraph variables) and dualized explicitly once binaries are fixed.

use std::collections::HashMap;

use crate::lp::{LpProblem, Relation, Sense};
use crate::mip::MipProblem;
use crate::norms::{norm, NormOrder};

const INF: f64 = f64::INFINITY;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VarKind {
    Free,
    NonNeg,
    Binary,
}

/// Which market participant a variable or row belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Owner {
    Market,
    Generator(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RowKind {
    /// The worst-case cost epigraph row.
    Cost,
    Other,
    /// Pure commitment logic; implied once binaries are fixed.
    Logic,
    /// `−x = −x*` added when binaries are fixed.
    Fix(usize),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Var {
    pub kind: VarKind,
    pub cost: f64,
    pub owner: Owner,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Affine {
    pub coeffs: Vec<(usize, f64)>,
    pub constant: f64,
}

impl Affine {
    pub fn eval(&self, y: &[f64]) -> f64 {
        self.constant + self.coeffs.iter().map(|&(v, a)| a * y[v]).sum::<f64>()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NormTerm {
    pub budget: f64,
    pub comps: Vec<Affine>,
}

impl NormTerm {
    pub fn eval(&self, y: &[f64]) -> Vec<f64> {
        self.comps.iter().map(|c| c.eval(y)).collect()
    }

    pub fn active(&self) -> bool {
        self.budget > 0.0 && !self.comps.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RRow {
    pub lin: Vec<(usize, f64)>,
    pub terms: Vec<NormTerm>,
    pub relation: Relation,
    pub rhs: f64,
    pub owner: Owner,
    pub kind: RowKind,
    /// Excluded from the continuous phase (implied by fixed binaries).
    pub skip: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RobustProgram {
    pub vars: Vec<Var>,
    pub rows: Vec<RRow>,
    /// Order of the uncertainty norm; terms use its dual.
    pub order: NormOrder,
}

/// Placement of program objects in a linearized LP/MILP.
#[derive(Debug, Clone)]
pub struct Linearized {
    pub mip: MipProblem,
    /// LP row of each program row (`None` when skipped or vacuous).
    pub row: Vec<Option<usize>>,
    /// Epigraph variables of each term: one for L∞ duals, one per component
    /// for L1 duals, one for L2 (cuts added separately).
    pub epigraph: Vec<Vec<Option<Vec<usize>>>>,
}

/// Dual variables of the explicit robust dual.
#[derive(Debug, Clone)]
pub struct RobustDual {
    pub lp: LpProblem,
    pub lambda: Vec<Option<usize>>,
    /// Per row and term: the multiplier vector's column indices.
    pub w: Vec<Vec<Option<Vec<SplitIndex>>>>,
}

/// Index of a multiplier component: a (plus, minus) pair for L1 balls, or a
/// single free index for L∞ balls.
pub type SplitIndex = (usize, Option<usize>);

/// Values of the robust dual variables.
#[derive(Debug, Clone, PartialEq)]
pub struct Multipliers {
    pub lambda: Vec<f64>,
    pub w: Vec<Vec<Vec<f64>>>,
}

impl RobustDual {
    pub fn read(&self, x: &[f64]) -> Multipliers {
        let lambda = self
            .lambda
            .iter()
            .map(|v| v.map_or(0.0, |k| x[k]))
            .collect();
        let w = self
            .w
            .iter()
            .map(|terms| {
                terms
                    .iter()
                    .map(|t| match t {
                        None => Vec::new(),
                        Some(ix) => ix
                            .iter()
                            .map(|&(p, m)| x[p] - m.map_or(0.0, |k| x[k]))
                            .collect(),
                    })
                    .collect()
            })
            .collect();
        Multipliers { lambda, w }
    }
}

fn term_key(t: &NormTerm) -> Vec<u64> {
    let mut key = Vec::new();
    for c in &t.comps {
        key.push(c.comps_len_tag());
        key.push(c.constant.to_bits());
        let mut cs = c.coeffs.clone();
        cs.sort_by_key(|a| a.0);
        for (v, a) in cs {
            key.push(v as u64);
            key.push(a.to_bits());
        }
    }
    key
}

impl Affine {
    fn comps_len_tag(&self) -> u64 {
        self.coeffs.len() as u64 | (1 << 63)
    }
}

impl RobustProgram {
    pub fn new(order: NormOrder) -> Self {
        RobustProgram {
            vars: Vec::new(),
            rows: Vec::new(),
            order,
        }
    }

    pub fn add_var(&mut self, kind: VarKind, cost: f64, owner: Owner) -> usize {
        self.vars.push(Var { kind, cost, owner });
        self.vars.len() - 1
    }

    pub fn add_row(&mut self, row: RRow) -> usize {
        self.rows.push(row);
        self.rows.len() - 1
    }

    pub fn objective(&self, y: &[f64]) -> f64 {
        self.vars.iter().zip(y).map(|(v, x)| v.cost * x).sum()
    }

    pub fn dual_norm(&self) -> NormOrder {
        self.order.dual()
    }

    /// `a·y + Σ β‖s‖_*` for row `r`.
    pub fn row_lhs(&self, r: usize, y: &[f64]) -> f64 {
        let row = &self.rows[r];
        let lin: f64 = row.lin.iter().map(|&(v, a)| a * y[v]).sum();
        let terms: f64 = row
            .terms
            .iter()
            .filter(|t| t.active())
            .map(|t| t.budget * norm(&t.eval(y), self.dual_norm()))
            .sum();
        lin + terms
    }

    pub fn max_violation(&self, y: &[f64]) -> f64 {
        let mut worst: f64 = 0.0;
        for (r, row) in self.rows.iter().enumerate() {
            if row.skip {
                continue;
            }
            let lhs = self.row_lhs(r, y);
            worst = worst.max(match row.relation {
                Relation::Le => lhs - row.rhs,
                Relation::Ge => row.rhs - lhs,
                Relation::Eq => (lhs - row.rhs).abs(),
            });
        }
        worst
    }

    /// Copy with binaries turned into fixed nonnegative variables via
    /// `−x = −x*` rows, and pure-logic rows skipped.
    pub fn fix_binaries(&self, y: &[f64]) -> RobustProgram {
        let mut out = self.clone();
        for row in out.rows.iter_mut() {
            if row.kind == RowKind::Logic {
                row.skip = true;
            }
        }
        for (v, var) in self.vars.iter().enumerate() {
            if var.kind == VarKind::Binary {
                out.vars[v].kind = VarKind::NonNeg;
                let x = y[v].round();
                out.rows.push(RRow {
                    lin: vec![(v, -1.0)],
                    terms: Vec::new(),
                    relation: Relation::Eq,
                    rhs: -x,
                    owner: var.owner,
                    kind: RowKind::Fix(v),
                    skip: false,
                });
            }
        }
        out
    }

    /// Epigraph reformulation. For L2 duals only the epigraph variables are
    /// created; callers add supporting cuts.
    pub fn linearize(&self) -> Linearized {
        let mut lp = LpProblem::new(Sense::Minimize);
        let mut binaries = Vec::new();
        for var in &self.vars {
            let (lo, hi) = match var.kind {
                VarKind::Free => (-INF, INF),
                VarKind::NonNeg => (0.0, INF),
                VarKind::Binary => (0.0, 1.0),
            };
            let j = lp.add_var(var.cost, lo, hi);
            if var.kind == VarKind::Binary {
                binaries.push(j);
            }
        }
        let dual = self.dual_norm();
        let mut shared: HashMap<Vec<u64>, Vec<usize>> = HashMap::new();
        let mut row_of = vec![None; self.rows.len()];
        let mut epigraph = Vec::with_capacity(self.rows.len());
        for (r, row) in self.rows.iter().enumerate() {
            let mut epis = Vec::with_capacity(row.terms.len());
            if row.skip {
                epigraph.push(vec![None; row.terms.len()]);
                continue;
            }
            let mut coeffs = row.lin.clone();
            for t in &row.terms {
                if !t.active() {
                    epis.push(None);
                    continue;
                }
                let key = term_key(t);
                let vars = if let Some(v) = shared.get(&key) {
                    v.clone()
                } else {
                    let v = match dual {
                        NormOrder::Infinity => {
                            let e = lp.add_var(0.0, 0.0, INF);
                            for c in &t.comps {
                                abs_rows(&mut lp, c, e);
                            }
                            vec![e]
                        }
                        NormOrder::One => t
                            .comps
                            .iter()
                            .map(|c| {
                                let e = lp.add_var(0.0, 0.0, INF);
                                abs_rows(&mut lp, c, e);
                                e
                            })
                            .collect(),
                        NormOrder::Two => vec![lp.add_var(0.0, 0.0, INF)],
                    };
                    shared.insert(key, v.clone());
                    v
                };
                for &e in &vars {
                    coeffs.push((e, t.budget));
                }
                epis.push(Some(vars));
            }
            epigraph.push(epis);
            if coeffs.is_empty() && row.rhs >= 0.0 && row.relation == Relation::Le {
                continue;
            }
            row_of[r] = Some(lp.add_row(coeffs, row.relation, row.rhs));
        }
        Linearized {
            mip: MipProblem { lp, binaries },
            row: row_of,
            epigraph,
        }
    }

    /// Lagrangian dual for programs without binaries.
    ///
    /// `max −Σ λ_r b_r + Σ w_k·m_k` subject to stationarity in every primal
    /// variable and `‖w_k‖ ≤ β_k λ_r` in the uncertainty norm.
    pub fn dual(&self) -> RobustDual {
        assert!(
            self.vars.iter().all(|v| v.kind != VarKind::Binary),
            "fix binaries before dualizing"
        );
        let mut lp = LpProblem::new(Sense::Maximize);
        let n = self.vars.len();
        let mut stat: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
        let mut lambda = vec![None; self.rows.len()];
        let mut w = Vec::with_capacity(self.rows.len());
        for (r, row) in self.rows.iter().enumerate() {
            let has_terms = row.terms.iter().any(NormTerm::active);
            if row.skip || (row.lin.is_empty() && !has_terms) {
                w.push(vec![None; row.terms.len()]);
                continue;
            }
            let (lo, hi) = match row.relation {
                Relation::Le => (0.0, INF),
                Relation::Eq => (-INF, INF),
                Relation::Ge => panic!("robust rows are stated as <= or ="),
            };
            let l = lp.add_var(-row.rhs, lo, hi);
            lambda[r] = Some(l);
            for &(v, a) in &row.lin {
                stat[v].push((l, a));
            }
            let mut wr = Vec::with_capacity(row.terms.len());
            for t in &row.terms {
                if !t.active() {
                    wr.push(None);
                    continue;
                }
                assert!(row.relation == Relation::Le, "norm terms need a <= row");
                let mut ix = Vec::with_capacity(t.comps.len());
                match self.order {
                    NormOrder::One => {
                        let mut cap = Vec::with_capacity(2 * t.comps.len() + 1);
                        for c in &t.comps {
                            let p = lp.add_var(c.constant, 0.0, INF);
                            let m = lp.add_var(-c.constant, 0.0, INF);
                            for &(v, a) in &c.coeffs {
                                stat[v].push((p, a));
                                stat[v].push((m, -a));
                            }
                            cap.push((p, 1.0));
                            cap.push((m, 1.0));
                            ix.push((p, Some(m)));
                        }
                        cap.push((l, -t.budget));
                        lp.add_row(cap, Relation::Le, 0.0);
                    }
                    NormOrder::Infinity => {
                        for c in &t.comps {
                            let k = lp.add_var(c.constant, -INF, INF);
                            for &(v, a) in &c.coeffs {
                                stat[v].push((k, a));
                            }
                            lp.add_row(vec![(k, 1.0), (l, -t.budget)], Relation::Le, 0.0);
                            lp.add_row(vec![(k, -1.0), (l, -t.budget)], Relation::Le, 0.0);
                            ix.push((k, None));
                        }
                    }
                    NormOrder::Two => panic!("L2 duals come from cutting planes"),
                }
                wr.push(Some(ix));
            }
            w.push(wr);
        }
        for (v, var) in self.vars.iter().enumerate() {
            let coeffs = std::mem::take(&mut stat[v]);
            let rel = match var.kind {
                VarKind::Free => Relation::Eq,
                _ => Relation::Ge,
            };
            lp.add_row(coeffs, rel, -var.cost);
        }
        RobustDual { lp, lambda, w }
    }

    /// Robust dual objective `−Σ λ_r b_r + Σ w_k·m_k`.
    pub fn dual_objective(&self, m: &Multipliers) -> f64 {
        let mut z = 0.0;
        for (r, row) in self.rows.iter().enumerate() {
            z -= m.lambda[r] * row.rhs;
            for (k, t) in row.terms.iter().enumerate() {
                if let Some(wk) = m.w[r].get(k) {
                    for (c, wj) in t.comps.iter().zip(wk) {
                        z += wj * c.constant;
                    }
                }
            }
        }
        z
    }

    /// Largest violation of the dual constraints: multiplier signs, norm caps
    /// and stationarity.
    pub fn dual_violation(&self, m: &Multipliers) -> f64 {
        let mut worst: f64 = 0.0;
        let mut stat: Vec<f64> = self.vars.iter().map(|v| v.cost).collect();
        for (r, row) in self.rows.iter().enumerate() {
            let l = m.lambda[r];
            if row.relation == Relation::Le {
                worst = worst.max(-l);
            }
            for &(v, a) in &row.lin {
                stat[v] += l * a;
            }
            for (k, t) in row.terms.iter().enumerate() {
                let Some(wk) = m.w[r].get(k).filter(|w| !w.is_empty()) else {
                    continue;
                };
                worst = worst.max(norm(wk, self.order) - t.budget * l);
                for (c, wj) in t.comps.iter().zip(wk) {
                    for &(v, a) in &c.coeffs {
                        stat[v] += wj * a;
                    }
                }
            }
        }
        for (v, var) in self.vars.iter().enumerate() {
            worst = worst.max(match var.kind {
                VarKind::Free => stat[v].abs(),
                _ => -stat[v],
            });
        }
        worst
    }
}

impl RobustProgram {
    /// Largest `|w·s − β λ ‖s‖_*|` over active norm terms: each multiplier
    /// vector must attain the dual norm of its argument.
    pub fn identity_violation(&self, y: &[f64], m: &Multipliers) -> f64 {
        let mut worst: f64 = 0.0;
        for (r, row) in self.rows.iter().enumerate() {
            if row.skip {
                continue;
            }
            for (k, t) in row.terms.iter().enumerate() {
                if !t.active() {
                    continue;
                }
                let s = t.eval(y);
                let w = m.w[r].get(k).cloned().unwrap_or_default();
                let ws: f64 = if w.is_empty() {
                    0.0
                } else {
                    crate::norms::dot(&w, &s)
                };
                let rhs = t.budget * m.lambda[r] * norm(&s, self.dual_norm());
                worst = worst.max((ws - rhs).abs());
            }
        }
        worst
    }
}

fn abs_rows(lp: &mut LpProblem, c: &Affine, e: usize) {
    // c(y) − e ≤ 0 and −c(y) − e ≤ 0
    let mut up: Vec<(usize, f64)> = c.coeffs.clone();
    up.push((e, -1.0));
    lp.add_row(up, Relation::Le, -c.constant);
    let mut down: Vec<(usize, f64)> = c.coeffs.iter().map(|&(v, a)| (v, -a)).collect();
    down.push((e, -1.0));
    lp.add_row(down, Relation::Le, c.constant);
}
