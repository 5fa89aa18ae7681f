//! The polytope `{μ ≥ 0 : marginal P, μ ∘ Θ^{-1} = μ}` in exact arithmetic:
//! vertices by double description, membership by a phase-one simplex.

use num::{One, Signed, Zero};
use serde::Serialize;

use super::{invariance_defect, StateIndex};
use crate::budget::Budget;
use crate::error::{Error, Result};
use crate::measures::FiberedMeasure;
use crate::model::BundleRds;
use crate::pointset::PointSet;
use crate::rational::{format_rational, Rational};

type Vector = Vec<Rational>;
type Matrix = Vec<Vector>;

fn dot(a: &[Rational], b: &[Rational]) -> Rational {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Reduced row echelon form in place; returns the pivot column of each
/// nonzero row. Only the first `cols` columns are used as pivots.
fn rref(m: &mut Matrix, cols: usize) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut row = 0;
    for c in 0..cols {
        if row == m.len() {
            break;
        }
        let Some(p) = (row..m.len()).find(|&r| !m[r][c].is_zero()) else {
            continue;
        };
        m.swap(row, p);
        let inv = m[row][c].recip();
        for v in m[row].iter_mut() {
            *v *= &inv;
        }
        for r in 0..m.len() {
            if r != row && !m[r][c].is_zero() {
                let f = m[r][c].clone();
                let pivot_row = m[row].clone();
                for (v, pv) in m[r].iter_mut().zip(&pivot_row) {
                    *v -= &f * pv;
                }
            }
        }
        pivots.push(c);
        row += 1;
    }
    pivots
}

/// Inverse of a square nonsingular matrix.
fn inverse(a: &Matrix) -> Option<Matrix> {
    let n = a.len();
    let mut m: Matrix = a
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| if i == j { Rational::one() } else { Rational::zero() }));
            r
        })
        .collect();
    let piv = rref(&mut m, n);
    if piv.len() < n {
        return None;
    }
    Some(m.into_iter().map(|r| r[n..].to_vec()).collect())
}

fn normalize(v: &mut Vector) {
    if let Some(first) = v.iter().find(|x| !x.is_zero()).map(|x| x.abs()) {
        for x in v.iter_mut() {
            *x /= &first;
        }
    }
}

struct Ray {
    y: Vector,
    zeros: PointSet,
}

/// Extreme rays of the pointed cone `{y : H y ≥ 0}`.
fn double_description(h: &Matrix, dim: usize) -> Result<Vec<Vector>> {
    let m = h.len();
    // a nonsingular starting basis of rows
    let mut basis: Vec<usize> = Vec::new();
    let mut echelon: Matrix = Vec::new();
    for (i, row) in h.iter().enumerate() {
        let mut trial = echelon.clone();
        trial.push(row.clone());
        if rref(&mut trial, dim).len() > echelon.len() {
            echelon = trial;
            basis.push(i);
            if basis.len() == dim {
                break;
            }
        }
    }
    if basis.len() < dim {
        return Err(Error::Invalid("invariant polytope cone is not pointed".into()));
    }
    let a_b: Matrix = basis.iter().map(|&i| h[i].clone()).collect();
    let inv = inverse(&a_b).expect("basis rows are independent");
    let mut processed = PointSet::empty(m);
    for &i in &basis {
        processed.insert(i);
    }
    let mut rays: Vec<Ray> = (0..dim)
        .map(|k| {
            let mut y: Vector = (0..dim).map(|r| inv[r][k].clone()).collect();
            normalize(&mut y);
            let mut zeros = PointSet::empty(m);
            for (t, &i) in basis.iter().enumerate() {
                if t != k {
                    zeros.insert(i);
                }
            }
            Ray { y, zeros }
        })
        .collect();
    for i in 0..m {
        if processed.contains(i) {
            continue;
        }
        let vals: Vec<Rational> = rays.iter().map(|r| dot(&h[i], &r.y)).collect();
        let pos: Vec<usize> = (0..rays.len()).filter(|&k| vals[k].is_positive()).collect();
        let neg: Vec<usize> = (0..rays.len()).filter(|&k| vals[k].is_negative()).collect();
        let mut next: Vec<Ray> = Vec::new();
        for p in &pos {
            for n in &neg {
                let common = rays[*p].zeros.intersection(&rays[*n].zeros);
                if common.len() + 2 < dim {
                    continue;
                }
                let adjacent = (0..rays.len())
                    .all(|r| r == *p || r == *n || !common.is_subset(&rays[r].zeros));
                if !adjacent {
                    continue;
                }
                let mut y: Vector = rays[*n]
                    .y
                    .iter()
                    .zip(&rays[*p].y)
                    .map(|(yn, yp)| &vals[*p] * yn - &vals[*n] * yp)
                    .collect();
                normalize(&mut y);
                let mut zeros = common;
                zeros.insert(i);
                next.push(Ray { y, zeros });
            }
        }
        let mut kept: Vec<Ray> = Vec::new();
        for (k, mut r) in rays.into_iter().enumerate() {
            if vals[k].is_negative() {
                continue;
            }
            if vals[k].is_zero() {
                r.zeros.insert(i);
            }
            kept.push(r);
        }
        kept.extend(next);
        rays = kept;
        processed.insert(i);
    }
    Ok(rays.into_iter().map(|r| r.y).collect())
}

/// Invariant measures with marginal `P` as an exact polytope.
#[derive(Debug, Clone)]
pub struct InvariantPolytope {
    vertices: Vec<FiberedMeasure>,
    /// Dimension of the affine hull of the equality constraints.
    pub dimension: usize,
    pub equalities: usize,
}

/// Convex weights `λ` with `Σ λ_i v_i = μ`, verified exactly.
#[derive(Debug, Clone, Serialize)]
pub struct HullCertificate {
    pub weights: Vec<String>,
}

impl InvariantPolytope {
    pub fn vertices(&self) -> &[FiberedMeasure] {
        &self.vertices
    }

    /// Exact LP certificate that `mu` lies in the convex hull of the
    /// vertices; `None` when it does not.
    pub fn hull_certificate(&self, mu: &FiberedMeasure) -> Result<Option<HullCertificate>> {
        let k = self.vertices.len();
        let flat = |m: &FiberedMeasure| -> Vector { m.weights().iter().flatten().cloned().collect() };
        let target = flat(mu);
        let cols: Vec<Vector> = self.vertices.iter().map(flat).collect();
        if cols.iter().any(|c| c.len() != target.len()) {
            return Err(Error::Incompatible("measure lives on a different system".into()));
        }
        let mut rows: Matrix = (0..target.len())
            .map(|s| {
                let mut r: Vector = cols.iter().map(|c| c[s].clone()).collect();
                r.push(target[s].clone());
                r
            })
            .collect();
        let mut ones = vec![Rational::one(); k];
        ones.push(Rational::one());
        rows.push(ones);
        let Some(lambda) = phase_one(rows, k) else {
            return Ok(None);
        };
        let mut combo = vec![Rational::zero(); target.len()];
        for (l, c) in lambda.iter().zip(&cols) {
            for (x, v) in combo.iter_mut().zip(c) {
                *x += l * v;
            }
        }
        let sum: Rational = lambda.iter().sum();
        if combo != target || !sum.is_one() || lambda.iter().any(Signed::is_negative) {
            return Err(Error::Invalid("hull certificate failed verification".into()));
        }
        Ok(Some(HullCertificate {
            weights: lambda.iter().map(format_rational).collect(),
        }))
    }
}

/// Feasibility of `A λ = b, λ ≥ 0` (rows are `[A | b]`, `k` columns) by a
/// phase-one simplex with Bland's rule. Returns a feasible `λ`.
fn phase_one(mut rows: Matrix, k: usize) -> Option<Vector> {
    let m = rows.len();
    for r in rows.iter_mut() {
        if r[k].is_negative() {
            for v in r.iter_mut() {
                *v = -v.clone();
            }
        }
    }
    // tableau columns: λ (k), artificials (m), rhs
    let width = k + m + 1;
    let mut t: Matrix = rows
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let mut row = vec![Rational::zero(); width];
            row[..k].clone_from_slice(&r[..k]);
            row[k + i] = Rational::one();
            row[width - 1] = r[k].clone();
            row
        })
        .collect();
    let mut basis: Vec<usize> = (k..k + m).collect();
    // reduced costs of the phase-one objective Σ artificials
    let mut cost = vec![Rational::zero(); width];
    for row in &t {
        for j in 0..k {
            cost[j] -= &row[j];
        }
        cost[width - 1] -= &row[width - 1];
    }
    loop {
        let Some(enter) = (0..k + m).find(|&j| cost[j].is_negative()) else {
            break;
        };
        let mut leave: Option<(usize, Rational)> = None;
        for i in 0..m {
            if t[i][enter].is_positive() {
                let ratio = &t[i][width - 1] / &t[i][enter];
                let better = match &leave {
                    None => true,
                    Some((li, lr)) => ratio < *lr || (ratio == *lr && basis[i] < basis[*li]),
                };
                if better {
                    leave = Some((i, ratio));
                }
            }
        }
        let (li, _) = leave?;
        let inv = t[li][enter].recip();
        for v in t[li].iter_mut() {
            *v *= &inv;
        }
        let pivot = t[li].clone();
        for (i, row) in t.iter_mut().enumerate() {
            if i != li && !row[enter].is_zero() {
                let f = row[enter].clone();
                for (v, p) in row.iter_mut().zip(&pivot) {
                    *v -= &f * p;
                }
            }
        }
        let f = cost[enter].clone();
        for (v, p) in cost.iter_mut().zip(&pivot) {
            *v -= &f * p;
        }
        basis[li] = enter;
    }
    if !cost[width - 1].is_zero() {
        return None;
    }
    let mut lambda = vec![Rational::zero(); k];
    for (i, &b) in basis.iter().enumerate() {
        if b < k {
            lambda[b] = t[i][width - 1].clone();
        }
    }
    Some(lambda)
}

/// Exact vertex list of the invariant polytope of `rds`.
pub fn vertex_enumeration(rds: &BundleRds, budget: &Budget) -> Result<InvariantPolytope> {
    let idx = StateIndex::new(rds);
    let n = idx.total();
    if n > budget.vertex_max_points {
        return Err(Error::budget("points of E for vertex enumeration", budget.vertex_max_points, n));
    }
    // [A | b]: marginals, then invariance at every state
    let mut a: Matrix = Vec::new();
    for w in 0..rds.n_fibers() {
        let mut row = vec![Rational::zero(); n + 1];
        for j in 0..rds.fiber_len(w) {
            row[idx.flat(w, j)] = Rational::one();
        }
        row[n] = rds.base().prob(w).clone();
        a.push(row);
    }
    for t in 0..n {
        let mut row = vec![Rational::zero(); n + 1];
        row[t] -= Rational::one();
        for s in 0..n {
            let (w, j) = idx.split(s);
            let (w2, j2) = rds.skew(w, j);
            if idx.flat(w2, j2) == t {
                row[s] += Rational::one();
            }
        }
        a.push(row);
    }
    let equalities = a.len();
    let pivots = rref(&mut a, n);
    if a.iter().any(|r| r[..n].iter().all(Zero::is_zero) && !r[n].is_zero()) {
        return Err(Error::Invalid("invariance constraints are inconsistent".into()));
    }
    let free: Vec<usize> = (0..n).filter(|c| !pivots.contains(c)).collect();
    let mut x0 = vec![Rational::zero(); n];
    for (r, &p) in pivots.iter().enumerate() {
        x0[p] = a[r][n].clone();
    }
    // x = x0 + N z
    let null: Vec<Vector> = free
        .iter()
        .map(|&f| {
            let mut v = vec![Rational::zero(); n];
            v[f] = Rational::one();
            for (r, &p) in pivots.iter().enumerate() {
                v[p] = -a[r][f].clone();
            }
            v
        })
        .collect();
    let d = free.len();
    let points: Vec<Vector> = if d == 0 {
        vec![x0.clone()]
    } else {
        let mut h: Matrix = (0..n)
            .map(|s| {
                let mut row: Vector = null.iter().map(|v| v[s].clone()).collect();
                row.push(x0[s].clone());
                row
            })
            .collect();
        let mut t_row = vec![Rational::zero(); d + 1];
        t_row[d] = Rational::one();
        h.push(t_row);
        double_description(&h, d + 1)?
            .into_iter()
            .filter(|y| y[d].is_positive())
            .map(|y| {
                let t = &y[d];
                let mut x = x0.clone();
                for (zi, v) in y[..d].iter().zip(&null) {
                    let z = zi / t;
                    for (xs, vs) in x.iter_mut().zip(v) {
                        *xs += &z * vs;
                    }
                }
                x
            })
            .collect()
    };
    let mut vertices: Vec<FiberedMeasure> = Vec::new();
    for x in points {
        let weights = (0..rds.n_fibers())
            .map(|w| (0..rds.fiber_len(w)).map(|j| x[idx.flat(w, j)].clone()).collect())
            .collect();
        let mu = FiberedMeasure::new(rds, weights)?;
        if !invariance_defect(&mu, rds)?.is_zero() {
            return Err(Error::Invalid("vertex enumeration produced a non-invariant point".into()));
        }
        if !vertices.contains(&mu) {
            vertices.push(mu);
        }
    }
    vertices.sort_by_key(|v| v.weights().to_vec());
    Ok(InvariantPolytope {
        vertices,
        dimension: d,
        equalities,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{identity_system, sys_a, sys_b};
    use crate::invariant::cesaro_limit;
    use crate::rational::ratio;

    #[test]
    fn identity_on_two_points() {
        let id = identity_system(2);
        let p = vertex_enumeration(&id, &Budget::default()).unwrap();
        let expected = vec![
            FiberedMeasure::point_masses(&id, &[0]).unwrap(),
            FiberedMeasure::point_masses(&id, &[1]).unwrap(),
        ];
        let mut got = p.vertices().to_vec();
        got.sort_by_key(|v| v.weights().to_vec());
        let mut exp = expected;
        exp.sort_by_key(|v| v.weights().to_vec());
        assert_eq!(got, exp);
    }

    #[test]
    fn cycles_have_unique_vertex() {
        let b = sys_b();
        let p = vertex_enumeration(&b, &Budget::default()).unwrap();
        assert_eq!(p.vertices(), &[FiberedMeasure::uniform(&b)]);
        let a = sys_a();
        let p = vertex_enumeration(&a, &Budget::default()).unwrap();
        assert_eq!(p.vertices(), &[FiberedMeasure::point_masses(&a, &[0, 0]).unwrap()]);
    }

    #[test]
    fn hull_certificates() {
        let id = identity_system(3);
        let p = vertex_enumeration(&id, &Budget::default()).unwrap();
        assert_eq!(p.vertices().len(), 3);
        let mu = FiberedMeasure::new(&id, vec![vec![ratio(1, 2), ratio(1, 3), ratio(1, 6)]]).unwrap();
        let cert = p.hull_certificate(&mu).unwrap().unwrap();
        assert_eq!(cert.weights.len(), 3);
        let b = sys_b();
        let p = vertex_enumeration(&b, &Budget::default()).unwrap();
        let off = FiberedMeasure::point_masses(&b, &[0]).unwrap();
        assert!(p.hull_certificate(&off).unwrap().is_none());
        let c = cesaro_limit(&off, &b).unwrap();
        assert!(p.hull_certificate(&c).unwrap().is_some());
    }

    #[test]
    fn budget_gate() {
        let id = identity_system(5);
        let b = Budget {
            vertex_max_points: 4,
            ..Budget::default()
        };
        assert!(vertex_enumeration(&id, &b).unwrap_err().is_budget());
    }
}
