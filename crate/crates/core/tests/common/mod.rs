//! Independent oracles shared by the integration tests.
#![allow(dead_code)]

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use cluster_theta::lattice::lvec;
use cluster_theta::series::{ExponentPair, TruncatedSeries};

/// Laurent polynomial in `x1, x2, y1, y2`.
pub type Laurent = BTreeMap<[i64; 4], BigInt>;

pub fn monomial(e: [i64; 4]) -> Laurent {
    Laurent::from([(e, BigInt::one())])
}

pub fn add(a: &Laurent, b: &Laurent) -> Laurent {
    let mut out = a.clone();
    for (e, c) in b {
        let v = out.entry(*e).or_insert_with(BigInt::zero);
        *v += c;
        if v.is_zero() {
            out.remove(e);
        }
    }
    out
}

pub fn mul(a: &Laurent, b: &Laurent) -> Laurent {
    let mut out = Laurent::new();
    for (ea, ca) in a {
        for (eb, cb) in b {
            let e = [ea[0] + eb[0], ea[1] + eb[1], ea[2] + eb[2], ea[3] + eb[3]];
            out = add(&out, &Laurent::from([(e, ca * cb)]));
        }
    }
    out
}

pub fn pow(a: &Laurent, k: u32) -> Laurent {
    (0..k).fold(monomial([0; 4]), |acc, _| mul(&acc, a))
}

fn shift(a: &Laurent, by: [i64; 4]) -> Laurent {
    a.iter().map(|(e, c)| ([e[0] + by[0], e[1] + by[1], e[2] + by[2], e[3] + by[3]], c.clone())).collect()
}

fn mins(a: &Laurent) -> [i64; 4] {
    let mut m = [i64::MAX; 4];
    for e in a.keys() {
        for i in 0..4 {
            m[i] = m[i].min(e[i]);
        }
    }
    m
}

/// `n / d` in the Laurent ring, panicking if the division is not exact.
pub fn div_exact(n: &Laurent, d: &Laurent) -> Laurent {
    let (mn, md) = (mins(n), mins(d));
    // after clearing the minimal monomials the quotient is a polynomial
    let mut rem = shift(n, mn.map(|x| -x));
    let den = shift(d, md.map(|x| -x));
    let (lead_e, lead_c) = den.iter().next_back().map(|(e, c)| (*e, c.clone())).expect("nonzero divisor");
    let mut q = Laurent::new();
    while let Some((e, c)) = rem.iter().next_back().map(|(e, c)| (*e, c.clone())) {
        let te = [e[0] - lead_e[0], e[1] - lead_e[1], e[2] - lead_e[2], e[3] - lead_e[3]];
        assert!(te.iter().all(|x| *x >= 0), "inexact division");
        let (tc, r) = c.div_rem(&lead_c);
        assert!(r.is_zero(), "inexact division");
        let t = Laurent::from([(te, tc)]);
        q = add(&q, &t);
        rem = add(&rem, &mul(&t, &den).into_iter().map(|(e, c)| (e, -c)).collect());
    }
    shift(&q, [mn[0] - md[0], mn[1] - md[1], mn[2] - md[2], mn[3] - md[3]])
}

/// Cluster variables with principal coefficients, from alternating mutations of `[P; Id]`.
pub struct ClusterOracle {
    pub p: [[i64; 2]; 2],
    pub variables: Vec<Laurent>,
    /// Index pairs of `variables` forming clusters.
    pub clusters: Vec<(usize, usize)>,
}

fn mutate_matrix(b: &mut [[i64; 2]; 4], k: usize) {
    let old = *b;
    for i in 0..4 {
        for j in 0..2 {
            b[i][j] = if i == k || j == k {
                -old[i][j]
            } else {
                let prod = old[i][k] * old[k][j];
                old[i][j] + old[i][k].signum() * prod.max(0)
            };
        }
    }
}

fn exchange(cluster: &[Laurent; 2], b: &[[i64; 2]; 4], k: usize) -> Laurent {
    let var = |i: usize| if i < 2 { cluster[i].clone() } else { monomial([0, 0, (i == 2) as i64, (i == 3) as i64]) };
    let mut plus = monomial([0; 4]);
    let mut minus = monomial([0; 4]);
    for (i, row) in b.iter().enumerate() {
        let e = row[k];
        if e > 0 {
            plus = mul(&plus, &pow(&var(i), e as u32));
        } else if e < 0 {
            minus = mul(&minus, &pow(&var(i), (-e) as u32));
        }
    }
    div_exact(&add(&plus, &minus), &cluster[k])
}

impl ClusterOracle {
    /// `steps` alternating mutations in each direction from the initial seed.
    pub fn new(p: [[i64; 2]; 2], steps: usize) -> Self {
        let mut variables = vec![monomial([1, 0, 0, 0]), monomial([0, 1, 0, 0])];
        let mut clusters = vec![(0, 1)];
        for first in 0..2 {
            let mut b = [[p[0][0], p[0][1]], [p[1][0], p[1][1]], [1, 0], [0, 1]];
            let mut cluster = [variables[0].clone(), variables[1].clone()];
            let mut ids = [0usize, 1];
            for s in 0..steps {
                let k = (first + s) % 2;
                let new = exchange(&cluster, &b, k);
                mutate_matrix(&mut b, k);
                cluster[k] = new.clone();
                ids[k] = match variables.iter().position(|v| *v == new) {
                    Some(i) => i,
                    None => {
                        variables.push(new);
                        variables.len() - 1
                    }
                };
                let pair = (ids[0].min(ids[1]), ids[0].max(ids[1]));
                if !clusters.contains(&pair) {
                    clusters.push(pair);
                }
            }
        }
        ClusterOracle { p, variables, clusters }
    }

    /// `m − P·q`, constant over the terms of a cluster monomial.
    pub fn g_vector(&self, f: &Laurent) -> [i64; 2] {
        let mut g = None;
        for e in f.keys() {
            let v = [e[0] - self.p[0][0] * e[2] - self.p[0][1] * e[3], e[1] - self.p[1][0] * e[2] - self.p[1][1] * e[3]];
            assert!(g.is_none_or(|h| h == v), "cluster monomial is not homogeneous");
            g = Some(v);
        }
        g.expect("nonzero")
    }
}

pub fn to_laurent(f: &TruncatedSeries) -> Laurent {
    f.terms()
        .iter()
        .map(|(e, c)| {
            let m: Vec<i64> = e.m.iter().map(|x| i64::try_from(x).unwrap()).collect();
            ([m[0], m[1], e.q[0] as i64, e.q[1] as i64], c.clone())
        })
        .collect()
}

pub fn truncate(f: &Laurent, order: i64) -> Laurent {
    f.iter().filter(|(e, _)| e[2] + e[3] < order).map(|(e, c)| (*e, c.clone())).collect()
}

pub fn y_degree(f: &Laurent) -> i64 {
    f.keys().map(|e| e[2] + e[3]).max().unwrap_or(0)
}

pub fn all_nonnegative(f: &Laurent) -> bool {
    f.values().all(|c| !c.is_negative())
}

pub fn index(m: [i64; 2]) -> ExponentPair {
    ExponentPair::from_m(lvec(&m), 2)
}
