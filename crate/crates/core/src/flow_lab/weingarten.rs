//! Unitary Weingarten function on `S_n`, `n <= 5`, by inverting the Gram
//! matrix `G_{ab} = N^{#(a b^{-1})}`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const MAX_ORDER: usize = 5;

/// A permutation of `{0, .., n-1}` as its image vector.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Perm(pub Vec<usize>);

impl Perm {
    pub fn identity(n: usize) -> Self {
        Perm((0..n).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// `(self o other)(k) = self(other(k))`.
    pub fn compose(&self, other: &Perm) -> Perm {
        Perm(other.0.iter().map(|&k| self.0[k]).collect())
    }

    pub fn inverse(&self) -> Perm {
        let mut inv = vec![0; self.len()];
        for (k, &v) in self.0.iter().enumerate() {
            inv[v] = k;
        }
        Perm(inv)
    }

    /// Cycles, each starting at its smallest element, including fixed points.
    pub fn cycles(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.len()];
        let mut out = Vec::new();
        for s in 0..self.len() {
            if seen[s] {
                continue;
            }
            let mut c = vec![s];
            seen[s] = true;
            let mut k = self.0[s];
            while k != s {
                seen[k] = true;
                c.push(k);
                k = self.0[k];
            }
            out.push(c);
        }
        out
    }

    pub fn cycle_count(&self) -> usize {
        self.cycles().len()
    }

    /// Cycle lengths in non-increasing order.
    pub fn cycle_type(&self) -> Vec<usize> {
        let mut t: Vec<usize> = self.cycles().iter().map(Vec::len).collect();
        t.sort_unstable_by(|a, b| b.cmp(a));
        t
    }

    /// Parse 1-based cycle notation on `{1, .., n}`: `"(1 2)(3 4 5)"`,
    /// `"(1,3)"`; `"()"`, `"id"` or `""` is the identity. Omitted points are fixed.
    pub fn parse_cycles(s: &str, n: usize) -> Result<Perm> {
        let t = s.trim();
        let mut img: Vec<Option<usize>> = vec![None; n];
        if t.is_empty() || t == "id" || t == "e" {
            return Ok(Perm::identity(n));
        }
        let bad = |m: &str| Error::validation(format!("malformed cycle notation `{s}`: {m}"));
        let mut rest = t;
        let mut used = vec![false; n];
        while !rest.is_empty() {
            let rest_trim = rest.trim_start();
            if rest_trim.is_empty() {
                break;
            }
            let body = rest_trim.strip_prefix('(').ok_or_else(|| bad("expected `(`"))?;
            let close = body.find(')').ok_or_else(|| bad("unclosed `(`"))?;
            let elems = body[..close]
                .split(|c: char| c == ',' || c.is_whitespace())
                .filter(|p| !p.is_empty())
                .map(|p| p.parse::<usize>().map_err(|_| bad(&format!("`{p}` is not a positive integer"))))
                .collect::<Result<Vec<_>>>()?;
            for &e in &elems {
                if e == 0 || e > n {
                    return Err(bad(&format!("point {e} outside 1..={n}")));
                }
                if used[e - 1] {
                    return Err(bad(&format!("point {e} repeated")));
                }
                used[e - 1] = true;
            }
            for (k, &e) in elems.iter().enumerate() {
                img[e - 1] = Some(elems[(k + 1) % elems.len()] - 1);
            }
            rest = &body[close + 1..];
        }
        Ok(Perm(img.iter().enumerate().map(|(k, v)| v.unwrap_or(k)).collect()))
    }

    /// 1-based cycle notation, fixed points omitted; `()` for the identity.
    pub fn to_cycle_string(&self) -> String {
        let s: String = self
            .cycles()
            .iter()
            .filter(|c| c.len() > 1)
            .map(|c| format!("({})", c.iter().map(|k| (k + 1).to_string()).collect::<Vec<_>>().join(" ")))
            .collect();
        if s.is_empty() {
            "()".into()
        } else {
            s
        }
    }
}

/// All of `S_n` in lexicographic order (identity first).
pub fn all_perms(n: usize) -> Vec<Perm> {
    let mut cur: Vec<usize> = (0..n).collect();
    let mut out = vec![Perm(cur.clone())];
    loop {
        // next permutation
        let Some(i) = (1..n).rev().find(|&i| cur[i - 1] < cur[i]) else { break };
        let j = (i..n).rev().find(|&j| cur[j] > cur[i - 1]).unwrap();
        cur.swap(i - 1, j);
        cur[i..].reverse();
        out.push(Perm(cur.clone()));
    }
    out
}

/// `Cat(k) = (2k)! / (k! (k+1)!)`.
pub fn catalan(k: usize) -> u64 {
    let mut c: u64 = 1;
    for i in 0..k as u64 {
        c = c * 2 * (2 * i + 1) / (i + 2);
    }
    c
}

/// `Wg(N, .)` on all of `S_n` for one `N`.
#[derive(Debug, Clone)]
pub struct WeingartenTable {
    pub n: usize,
    pub dim: usize,
    pub perms: Vec<Perm>,
    pub values: Vec<f64>,
}

impl WeingartenTable {
    pub fn new(n: usize, dim: usize) -> Result<Self> {
        if n == 0 || n > MAX_ORDER {
            return Err(Error::validation(format!("permutation order must lie in 1..={MAX_ORDER}, got {n}")));
        }
        if dim < n {
            return Err(Error::validation(format!("unitary dimension N = {dim} must be >= n = {n}")));
        }
        let perms = all_perms(n);
        let g = gram(&perms, dim);
        let m = perms.len();
        let mut rhs = vec![0.0; m];
        rhs[0] = 1.0;
        let values = solve_refined(&g, &rhs, m)?;
        Ok(WeingartenTable { n, dim, perms, values })
    }

    pub fn index(&self, p: &Perm) -> Result<usize> {
        if p.len() != self.n {
            return Err(Error::validation(format!("permutation of {} points in a table for S_{}", p.len(), self.n)));
        }
        Ok(self.perms.binary_search(p).expect("perms are sorted and complete"))
    }

    pub fn get(&self, p: &Perm) -> Result<f64> {
        Ok(self.values[self.index(p)?])
    }

    /// `max_a |sum_b G_{ab} Wg(b) - delta_{a, id}|`.
    pub fn orthogonality_residual(&self) -> f64 {
        let g = gram(&self.perms, self.dim);
        let m = self.perms.len();
        (0..m)
            .map(|a| {
                let s: f64 = (0..m).map(|b| g[a * m + b] * self.values[b]).sum();
                (s - if a == 0 { 1.0 } else { 0.0 }).abs()
            })
            .fold(0.0, f64::max)
    }
}

fn gram(perms: &[Perm], dim: usize) -> Vec<f64> {
    let m = perms.len();
    let nf = dim as f64;
    let inv: Vec<Perm> = perms.iter().map(Perm::inverse).collect();
    let mut g = vec![0.0; m * m];
    for a in 0..m {
        for b in 0..m {
            g[a * m + b] = nf.powi(perms[a].compose(&inv[b]).cycle_count() as i32);
        }
    }
    g
}

/// LU with partial pivoting plus two steps of iterative refinement.
fn solve_refined(a: &[f64], b: &[f64], m: usize) -> Result<Vec<f64>> {
    let mut lu = a.to_vec();
    let mut piv: Vec<usize> = (0..m).collect();
    for k in 0..m {
        let p = (k..m).max_by(|&i, &j| lu[i * m + k].abs().total_cmp(&lu[j * m + k].abs())).unwrap();
        if lu[p * m + k] == 0.0 {
            return Err(Error::NonConvergence("singular Weingarten Gram matrix".into()));
        }
        if p != k {
            for c in 0..m {
                lu.swap(k * m + c, p * m + c);
            }
            piv.swap(k, p);
        }
        for i in k + 1..m {
            let f = lu[i * m + k] / lu[k * m + k];
            lu[i * m + k] = f;
            for c in k + 1..m {
                lu[i * m + c] -= f * lu[k * m + c];
            }
        }
    }
    let solve = |r: &[f64]| {
        let mut y: Vec<f64> = piv.iter().map(|&p| r[p]).collect();
        for i in 0..m {
            for c in 0..i {
                y[i] -= lu[i * m + c] * y[c];
            }
        }
        for i in (0..m).rev() {
            for c in i + 1..m {
                y[i] -= lu[i * m + c] * y[c];
            }
            y[i] /= lu[i * m + i];
        }
        y
    };
    let mut x = solve(b);
    for _ in 0..2 {
        let r: Vec<f64> = (0..m).map(|i| b[i] - (0..m).map(|c| a[i * m + c] * x[c]).sum::<f64>()).collect();
        let d = solve(&r);
        for (xi, di) in x.iter_mut().zip(d) {
            *xi += di;
        }
    }
    Ok(x)
}

/// A single Weingarten evaluation request.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeingartenQuery {
    pub n: usize,
    pub dim: usize,
    /// 1-based cycle notation.
    pub gamma: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeingartenValue {
    pub n: usize,
    pub dim: usize,
    pub gamma_cycles: String,
    pub wg: f64,
    pub wg_asymptotic: f64,
    /// `Wg N^{2n - #gamma}` minus the Catalan product.
    pub scaled_gap: f64,
}

pub fn weingarten(q: &WeingartenQuery) -> Result<WeingartenValue> {
    let table = WeingartenTable::new(q.n, q.dim)?;
    let gamma = Perm::parse_cycles(&q.gamma, q.n)?;
    value_from_table(&table, &gamma)
}

pub fn value_from_table(table: &WeingartenTable, gamma: &Perm) -> Result<WeingartenValue> {
    let wg = table.get(gamma)?;
    let asym = weingarten_asymptotic(gamma, table.dim);
    let scale = (table.dim as f64).powi(2 * table.n as i32 - gamma.cycle_count() as i32);
    Ok(WeingartenValue {
        n: table.n,
        dim: table.dim,
        gamma_cycles: gamma.to_cycle_string(),
        wg,
        wg_asymptotic: asym,
        scaled_gap: wg * scale - catalan_product(gamma),
    })
}

/// `prod_c (-1)^{|c| - 1} Cat(|c| - 1)` over the cycles of `gamma`.
pub fn catalan_product(gamma: &Perm) -> f64 {
    gamma
        .cycle_type()
        .iter()
        .map(|&l| if l % 2 == 1 { 1.0 } else { -1.0 } * catalan(l - 1) as f64)
        .product()
}

/// Leading order `N^{#gamma - 2n} prod_c (-1)^{|c|-1} Cat(|c|-1)`.
pub fn weingarten_asymptotic(gamma: &Perm, dim: usize) -> f64 {
    (dim as f64).powi(gamma.cycle_count() as i32 - 2 * gamma.len() as i32) * catalan_product(gamma)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn catalan_numbers() {
        assert_eq!((0..6).map(catalan).collect::<Vec<_>>(), vec![1, 1, 2, 5, 14, 42]);
    }

    #[test]
    fn parse_and_print() {
        let p = Perm::parse_cycles("(1 3)(2,4, 5)", 5).unwrap();
        assert_eq!(p.0, vec![2, 3, 0, 4, 1]);
        assert_eq!(p.to_cycle_string(), "(1 3)(2 4 5)");
        assert_eq!(p.cycle_type(), vec![3, 2]);
        assert_eq!(Perm::parse_cycles("()", 3).unwrap(), Perm::identity(3));
        assert!(Perm::parse_cycles("(1 1)", 3).is_err());
        assert!(Perm::parse_cycles("(1 4)", 3).is_err());
        assert!(Perm::parse_cycles("(1 2", 3).is_err());
    }

    #[test]
    fn perms_enumerated() {
        let p = all_perms(4);
        assert_eq!(p.len(), 24);
        assert!(p.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn small_closed_forms() {
        let t = WeingartenTable::new(1, 7).unwrap();
        assert!((t.values[0] - 1.0 / 7.0).abs() < 1e-16);
        let n = 5.0f64;
        let t = WeingartenTable::new(2, 5).unwrap();
        assert!((t.get(&Perm::identity(2)).unwrap() - 1.0 / (n * n - 1.0)).abs() < 1e-16);
        assert!((t.get(&Perm(vec![1, 0])).unwrap() + 1.0 / (n * (n * n - 1.0))).abs() < 1e-16);
    }

    #[test]
    fn rejects_bad_queries() {
        assert!(WeingartenTable::new(6, 10).is_err());
        assert!(WeingartenTable::new(3, 2).is_err());
    }
}
