//! Exact convex-hull vertex detection through a phase-one simplex.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::lattice::LatticeVec;

/// Whether `{λ ≥ 0 : A·λ = b}` is nonempty, decided exactly with Bland's rule.
pub fn feasible(a: &[Vec<BigRational>], b: &[BigRational]) -> bool {
    let rows = a.len();
    let n = a.first().map_or(0, Vec::len);
    let width = n + rows + 1;
    let mut t: Vec<Vec<BigRational>> = Vec::with_capacity(rows + 1);
    for (i, row) in a.iter().enumerate() {
        let flip = b[i].is_negative();
        let mut r: Vec<BigRational> = row.iter().map(|x| if flip { -x } else { x.clone() }).collect();
        r.extend((0..rows).map(|j| if j == i { BigRational::one() } else { BigRational::zero() }));
        r.push(if flip { -b[i].clone() } else { b[i].clone() });
        t.push(r);
    }
    let mut obj = vec![BigRational::zero(); width];
    for r in &t {
        for j in 0..n {
            obj[j] -= &r[j];
        }
        obj[width - 1] -= &r[width - 1];
    }
    t.push(obj);
    let mut basis: Vec<usize> = (n..n + rows).collect();
    while let Some(enter) = (0..n + rows).find(|&j| t[rows][j].is_negative()) {
        let mut leave: Option<(usize, BigRational)> = None;
        for i in 0..rows {
            if t[i][enter].is_positive() {
                let ratio = &t[i][width - 1] / &t[i][enter];
                let better = match &leave {
                    None => true,
                    Some((l, best)) => ratio < *best || (ratio == *best && basis[i] < basis[*l]),
                };
                if better {
                    leave = Some((i, ratio));
                }
            }
        }
        let Some((pr, _)) = leave else { break };
        let piv = t[pr][enter].clone();
        for x in t[pr].iter_mut() {
            *x /= &piv;
        }
        let pivot_row = t[pr].clone();
        for (i, row) in t.iter_mut().enumerate() {
            if i == pr || row[enter].is_zero() {
                continue;
            }
            let f = row[enter].clone();
            for (x, p) in row.iter_mut().zip(&pivot_row) {
                *x -= &f * p;
            }
        }
        basis[pr] = enter;
    }
    t[rows][width - 1].is_zero()
}

/// Indices of the points that are vertices of their convex hull.
pub fn hull_vertices(points: &[LatticeVec]) -> Vec<usize> {
    let dim = points.first().map_or(0, Vec::len);
    let q = |x: &BigInt| BigRational::from_integer(x.clone());
    (0..points.len())
        .filter(|&i| {
            let others: Vec<&LatticeVec> = points.iter().enumerate().filter(|&(j, p)| j != i && *p != points[i]).map(|(_, p)| p).collect();
            if others.is_empty() {
                return true;
            }
            let mut a: Vec<Vec<BigRational>> = (0..dim).map(|c| others.iter().map(|p| q(&p[c])).collect()).collect();
            a.push(vec![BigRational::one(); others.len()]);
            let mut b: Vec<BigRational> = points[i].iter().map(q).collect();
            b.push(BigRational::one());
            !feasible(&a, &b)
        })
        .collect()
}
