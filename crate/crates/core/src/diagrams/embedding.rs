//! Planar embeddings of a contraction and two independent evaluators.
//!
//! An embedding is an ordering of the arcs by depth. Each arc leaves its
//! right vertex downwards, runs left at its depth and climbs to its left
//! vertex. Uncontracted right lines run from the vertex down into the box,
//! uncontracted left lines from the box up to the vertex. A horizontal run
//! crosses every vertical line present at its depth.
//!
//! At a crossing of a horizontal run `h` (moving left) with a vertical `v`:
//!
//! * `v` moving down: `S^{v_above, h_right}_{h_left, v_below}(θ_h − θ_v)`,
//! * `v` moving up: `S^{h_right, v_below}_{v_above, h_left}(θ_v − θ_h)`.

use std::collections::HashMap;

use super::{check_tuple, Contraction, MatrixElementOracle};
use crate::error::{Error, Result};
use crate::linalg::CMat;
use crate::smatrix::{comp, SMatrixModel};
use crate::C64;

/// Cap on the number of summed index assignments or tensor entries.
pub const EVAL_CAP: usize = 10_000_000;

fn depth_levels(c: &Contraction, order: Option<&[usize]>) -> Result<Vec<usize>> {
    let m = c.pairs.len();
    let order: Vec<usize> = match order {
        None => (0..m).collect(),
        Some(o) => o.to_vec(),
    };
    let mut level = vec![usize::MAX; m];
    if order.len() != m {
        return Err(Error::Config(format!("depth order lists {} arcs, contraction has {m}", order.len())));
    }
    for (i, &a) in order.iter().enumerate() {
        if a >= m || level[a] != usize::MAX {
            return Err(Error::Config(format!("depth order {order:?} is not a permutation of the arcs")));
        }
        level[a] = i;
    }
    Ok(level)
}

fn arcs_matched(c: &Contraction, theta: &[f64]) -> bool {
    c.pairs.iter().all(|&(l, r)| theta[l] == theta[r])
}

fn split_words(
    c: &Contraction,
    theta: &[f64],
    labels: impl Fn(usize) -> usize,
) -> (Vec<(f64, usize)>, Vec<(f64, usize)>) {
    let mut left = Vec::new();
    let mut right = Vec::new();
    for v in c.uncontracted() {
        let entry = (theta[v], labels(v));
        if v < c.k {
            left.push(entry);
        } else {
            right.push(entry);
        }
    }
    (left, right)
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Line {
    Open(usize),
    Arc(usize),
}

struct Crossing {
    strand: Line,
    horizontal: usize,
    pos: usize,
    down: bool,
    theta_v: f64,
    theta_h: f64,
    // above, below, right, left
    vars: [usize; 4],
}

/// Sum over every labelling of the line segments, with `S` components at
/// crossings and the oracle on the labels reaching the box. `order` lists
/// arcs (indices into `c.pairs`) from deepest to shallowest.
pub fn evaluate_index_sum(
    model: &SMatrixModel,
    c: &Contraction,
    oracle: &dyn MatrixElementOracle,
    theta: &[f64],
    alpha: &[usize],
    order: Option<&[usize]>,
) -> Result<C64> {
    check_tuple(model, theta, alpha, c.n)?;
    let level = depth_levels(c, order)?;
    if !arcs_matched(c, theta) {
        return Ok(C64::new(0.0, 0.0));
    }
    let d = model.dim_k();
    let mut at_pos: Vec<Option<Line>> = vec![None; c.n];
    for v in c.uncontracted() {
        at_pos[v] = Some(Line::Open(v));
    }
    for (a, &(l, r)) in c.pairs.iter().enumerate() {
        at_pos[l] = Some(Line::Arc(a));
        at_pos[r] = Some(Line::Arc(a));
    }
    let arc_theta = |a: usize| theta[c.pairs[a].1];

    let mut crossings = Vec::new();
    for (h, &(lh, rh)) in c.pairs.iter().enumerate() {
        for p in lh + 1..rh {
            let line = at_pos[p].unwrap();
            let (present, down, theta_v) = match line {
                Line::Open(v) => (true, v >= c.k, theta[v]),
                Line::Arc(b) => (level[b] < level[h], p == c.pairs[b].1, arc_theta(b)),
            };
            if present {
                crossings.push(Crossing {
                    strand: line,
                    horizontal: h,
                    pos: p,
                    down,
                    theta_v,
                    theta_h: arc_theta(h),
                    vars: [0; 4],
                });
            }
        }
    }

    let mut n_vars = 0;
    let mut fixed: Vec<Option<usize>> = Vec::new();
    let mut box_left = Vec::new();
    let mut box_right = Vec::new();
    // Walks one line along its flow, handing out segment variables.
    // `steps` holds (crossing, role) with role 0 = vertical, 1 = horizontal.
    let mut walk = |steps: Vec<usize>, crossings: &mut Vec<Crossing>, roles: Vec<u8>| -> (usize, usize) {
        let first = n_vars;
        n_vars += 1;
        fixed.push(None);
        let mut cur = first;
        for (&i, &role) in steps.iter().zip(&roles) {
            let next = n_vars;
            n_vars += 1;
            fixed.push(None);
            let x = &mut crossings[i];
            match role {
                0 if x.down => {
                    x.vars[0] = cur;
                    x.vars[1] = next;
                }
                0 => {
                    x.vars[1] = cur;
                    x.vars[0] = next;
                }
                _ => {
                    x.vars[2] = cur;
                    x.vars[3] = next;
                }
            }
            cur = next;
        }
        (first, cur)
    };

    let mut constraints: Vec<(usize, usize)> = Vec::new();
    for v in c.uncontracted() {
        let mut steps: Vec<usize> = (0..crossings.len()).filter(|&i| crossings[i].strand == Line::Open(v)).collect();
        let down = v >= c.k;
        steps.sort_by_key(|&i| level[crossings[i].horizontal]);
        if down {
            steps.reverse();
        }
        let roles = vec![0; steps.len()];
        let (first, last) = walk(steps, &mut crossings, roles);
        if down {
            constraints.push((first, alpha[v]));
            box_right.push((v, last));
        } else {
            constraints.push((last, alpha[v]));
            box_left.push((v, first));
        }
    }
    for (a, &(l, r)) in c.pairs.iter().enumerate() {
        let on = |p: usize, crossings: &Vec<Crossing>| -> Vec<usize> {
            (0..crossings.len()).filter(|&i| crossings[i].strand == Line::Arc(a) && crossings[i].pos == p).collect()
        };
        let mut down_part = on(r, &crossings);
        down_part.sort_by_key(|&i| std::cmp::Reverse(level[crossings[i].horizontal]));
        let mut run: Vec<usize> = (0..crossings.len()).filter(|&i| crossings[i].horizontal == a).collect();
        run.sort_by_key(|&i| std::cmp::Reverse(crossings[i].pos));
        let mut up_part = on(l, &crossings);
        up_part.sort_by_key(|&i| level[crossings[i].horizontal]);
        let mut roles = vec![0u8; down_part.len()];
        roles.extend(std::iter::repeat(1u8).take(run.len()));
        roles.extend(std::iter::repeat(0u8).take(up_part.len()));
        let steps: Vec<usize> = down_part.into_iter().chain(run).chain(up_part).collect();
        let (first, last) = walk(steps, &mut crossings, roles);
        constraints.push((first, alpha[r]));
        constraints.push((last, alpha[l]));
    }
    for (var, value) in constraints {
        match fixed[var] {
            Some(v) if v != value => return Ok(C64::new(0.0, 0.0)),
            _ => fixed[var] = Some(value),
        }
    }

    let free: Vec<usize> = (0..n_vars).filter(|&v| fixed[v].is_none()).collect();
    let total = (d as f64).powi(free.len() as i32);
    if total > EVAL_CAP as f64 {
        return Err(Error::Cap(format!("{total} index assignments exceed the evaluation cap of {EVAL_CAP}")));
    }
    let smats: Vec<CMat> = crossings
        .iter()
        .map(|x| model.eval_real(if x.down { x.theta_h - x.theta_v } else { x.theta_v - x.theta_h }))
        .collect::<Result<_>>()?;

    let mut value: Vec<usize> = fixed.iter().map(|f| f.unwrap_or(0)).collect();
    let mut cache: HashMap<Vec<usize>, C64> = HashMap::new();
    let mut acc = C64::new(0.0, 0.0);
    let mut counter = vec![0usize; free.len()];
    loop {
        for (slot, &var) in free.iter().enumerate() {
            value[var] = counter[slot];
        }
        let mut prod = C64::new(1.0, 0.0);
        for (x, s) in crossings.iter().zip(&smats) {
            let [above, below, right, left] = x.vars.map(|v| value[v]);
            prod *= if x.down { comp(s, d, above, right, left, below) } else { comp(s, d, right, below, above, left) };
            if prod == C64::new(0.0, 0.0) {
                break;
            }
        }
        if prod != C64::new(0.0, 0.0) {
            let key: Vec<usize> = box_left.iter().chain(&box_right).map(|&(_, var)| value[var]).collect();
            let m = match cache.get(&key) {
                Some(m) => *m,
                None => {
                    let left: Vec<_> = box_left.iter().map(|&(v, var)| (theta[v], value[var])).collect();
                    let right: Vec<_> = box_right.iter().map(|&(v, var)| (theta[v], value[var])).collect();
                    let m = oracle.element(&left, &right)?;
                    cache.insert(key, m);
                    m
                }
            };
            acc += prod * m;
        }
        let mut slot = 0;
        loop {
            if slot == counter.len() {
                return Ok(acc);
            }
            counter[slot] += 1;
            if counter[slot] < d {
                break;
            }
            counter[slot] = 0;
            slot += 1;
        }
    }
}

/// Dense tensor over the labels of the vertical strands at one depth.
struct Level {
    d: usize,
    // (position, rapidity, moving down)
    strands: Vec<(usize, f64, bool)>,
    data: Vec<C64>,
}

impl Level {
    fn stride(&self, axis: usize, rank: usize) -> usize {
        self.d.pow((rank - 1 - axis) as u32)
    }
}

fn digits(mut i: usize, d: usize, rank: usize) -> Vec<usize> {
    let mut out = vec![0; rank];
    for slot in (0..rank).rev() {
        out[slot] = i % d;
        i /= d;
    }
    out
}

/// Transfer the tensor from the box up through one arc level at a time,
/// deepest first, then read off the external labels.
pub fn evaluate_sweep(
    model: &SMatrixModel,
    c: &Contraction,
    oracle: &dyn MatrixElementOracle,
    theta: &[f64],
    alpha: &[usize],
    order: Option<&[usize]>,
) -> Result<C64> {
    check_tuple(model, theta, alpha, c.n)?;
    let level = depth_levels(c, order)?;
    if !arcs_matched(c, theta) {
        return Ok(C64::new(0.0, 0.0));
    }
    let d = model.dim_k();
    let open = c.uncontracted();
    let rank = open.len();
    if (d as f64).powi(rank as i32 + 2) > EVAL_CAP as f64 {
        return Err(Error::Cap(format!("sweep tensor over {} strands exceeds the evaluation cap", rank + 2)));
    }
    let mut data = Vec::with_capacity(d.pow(rank as u32));
    for i in 0..d.pow(rank as u32) {
        let labs = digits(i, d, rank);
        let (left, right) = split_words(c, theta, |v| labs[open.iter().position(|&u| u == v).unwrap()]);
        data.push(oracle.element(&left, &right)?);
    }
    let mut cur = Level { d, strands: open.iter().map(|&v| (v, theta[v], v >= c.k)).collect(), data };

    let mut arcs: Vec<usize> = (0..c.pairs.len()).collect();
    arcs.sort_by_key(|&a| level[a]);
    for a in arcs {
        let (l, r) = c.pairs[a];
        let th = theta[r];
        let rank = cur.strands.len();
        if (d as f64).powi(rank as i32 + 2) > EVAL_CAP as f64 {
            return Err(Error::Cap(format!("sweep tensor over {} strands exceeds the evaluation cap", rank + 2)));
        }
        // Extended tensor with axes (strands…, corner label, running label).
        let ext = rank + 2;
        let mut w = vec![C64::new(0.0, 0.0); d.pow(ext as u32)];
        for (i, &x) in cur.data.iter().enumerate() {
            for h in 0..d {
                w[(i * d + h) * d + h] = x;
            }
        }
        let mut crossed: Vec<usize> = (0..rank).filter(|&i| cur.strands[i].0 > l && cur.strands[i].0 < r).collect();
        crossed.sort_by_key(|&i| std::cmp::Reverse(cur.strands[i].0));
        for i in crossed {
            let (_, tv, down) = cur.strands[i];
            let s = model.eval_real(if down { th - tv } else { tv - th })?;
            let sv = cur.stride(i, ext);
            let sh = 1;
            let mut next = vec![C64::new(0.0, 0.0); w.len()];
            for (idx, out) in next.iter_mut().enumerate() {
                let va = idx / sv % d;
                let hl = idx % d;
                let base = idx - va * sv - hl * sh;
                let mut acc = C64::new(0.0, 0.0);
                for vb in 0..d {
                    for hr in 0..d {
                        let f = if down { comp(&s, d, va, hr, hl, vb) } else { comp(&s, d, hr, vb, va, hl) };
                        acc += f * w[base + vb * sv + hr * sh];
                    }
                }
                *out = acc;
            }
            w = next;
        }
        // New strands: the corner at r (moving down) and the climb at l.
        let mut strands = cur.strands.clone();
        strands.push((r, th, true));
        strands.push((l, th, false));
        let mut perm: Vec<usize> = (0..ext).collect();
        perm.sort_by_key(|&i| strands[i].0);
        let mut data = vec![C64::new(0.0, 0.0); w.len()];
        for (idx, &x) in w.iter().enumerate() {
            let old = digits(idx, d, ext);
            let new_idx = perm.iter().fold(0, |acc, &ax| acc * d + old[ax]);
            data[new_idx] = x;
        }
        cur = Level { d, strands: perm.iter().map(|&i| strands[i]).collect(), data };
    }
    let idx = cur.strands.iter().fold(0, |acc, &(p, _, _)| acc * d + alpha[p]);
    Ok(cur.data[idx])
}
