#![allow(dead_code)]

use nalgebra::{DMatrix, SymmetricEigen};

/// U_3(p) as raw integer matrices, independent of the library arithmetic.
/// State `a·p² + b·p + c` is the matrix with `e12 = a, e13 = b, e23 = c`.
pub struct RawU3 {
    pub p: i64,
}

type M3 = [[i64; 3]; 3];

impl RawU3 {
    pub fn size(&self) -> usize {
        (self.p * self.p * self.p) as usize
    }

    pub fn matrix(&self, idx: usize) -> M3 {
        let p = self.p as usize;
        let (a, b, c) = (idx / (p * p), (idx / p) % p, idx % p);
        [[1, a as i64, b as i64], [0, 1, c as i64], [0, 0, 1]]
    }

    pub fn index(&self, m: &M3) -> usize {
        let p = self.p;
        let r = |x: i64| x.rem_euclid(p) as usize;
        (r(m[0][1]) * p as usize + r(m[0][2])) * p as usize + r(m[1][2])
    }

    pub fn mul(&self, x: &M3, y: &M3) -> M3 {
        let mut out = [[0i64; 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                out[i][j] = (0..3).map(|k| x[i][k] * y[k][j]).sum::<i64>().rem_euclid(self.p);
            }
        }
        out
    }

    pub fn inv(&self, x: &M3) -> M3 {
        // (I + N)^{-1} = I − N + N² for 3×3 strictly upper N
        let (a, b, c) = (x[0][1], x[0][2], x[1][2]);
        let m = [[1, -a, a * c - b], [0, 1, -c], [0, 0, 1]];
        let mut out = m;
        for row in out.iter_mut() {
            for v in row.iter_mut() {
                *v = v.rem_euclid(self.p);
            }
        }
        out
    }

    /// `{g⁻¹ s g}` as sorted indices.
    pub fn class(&self, s: usize) -> Vec<usize> {
        let sm = self.matrix(s);
        let mut out: Vec<usize> = (0..self.size())
            .map(|g| {
                let gm = self.matrix(g);
                self.index(&self.mul(&self.mul(&self.inv(&gm), &sm), &gm))
            })
            .collect();
        out.sort_unstable();
        out.dedup();
        out
    }

    /// Jump law: each listed class gets the paired weight, spread evenly.
    pub fn law(&self, classes: &[(usize, f64)]) -> Vec<f64> {
        let mut mu = vec![0.0; self.size()];
        for &(s, w) in classes {
            let cl = self.class(s);
            for &x in &cl {
                mu[x] += w / cl.len() as f64;
            }
        }
        mu
    }

    /// `P[x][y] = μ(x⁻¹ y)`.
    pub fn transition(&self, mu: &[f64]) -> DMatrix<f64> {
        let m = self.size();
        DMatrix::from_fn(m, m, |x, y| {
            let d = self.mul(&self.inv(&self.matrix(x)), &self.matrix(y));
            mu[self.index(&d)]
        })
    }

    /// Superdiagonal state `a·p + c` of `idx`.
    pub fn abelian(&self, idx: usize) -> usize {
        let p = self.p as usize;
        (idx / (p * p)) * p + idx % p
    }

    /// Index of `I + c·E_{i,i+1}`.
    pub fn elementary(&self, i: usize, c: i64) -> usize {
        let mut m = [[1, 0, 0], [0, 1, 0], [0, 0, 1]];
        m[i][i + 1] = c;
        self.index(&m)
    }

    /// Walk (a): classes of `I ± E_12`, `I ± E_23`, weight 1/4 each.
    pub fn walk_a(&self) -> Vec<f64> {
        let cl = [
            (self.elementary(0, 1), 0.25),
            (self.elementary(0, -1), 0.25),
            (self.elementary(1, 1), 0.25),
            (self.elementary(1, -1), 0.25),
        ];
        if self.p == 2 {
            // ±1 coincide: two classes at 1/2
            return self.law(&[(cl[0].0, 0.5), (cl[2].0, 0.5)]);
        }
        self.law(&cl)
    }
}

/// `δ_0 exp(t(P − I))` by dense matrix exponential.
pub fn expm_row0(p: &DMatrix<f64>, t: f64) -> Vec<f64> {
    let n = p.nrows();
    let q = (p - DMatrix::<f64>::identity(n, n)) * t;
    let e = q.exp();
    e.row(0).iter().copied().collect()
}

/// Spectral form of a symmetric kernel: `δ_0 P_t = Σ_k e^{t(λ_k − 1)} v_k(0) v_k`.
pub struct SymmetricHeat {
    eig: SymmetricEigen<f64, nalgebra::Dyn>,
}

impl SymmetricHeat {
    pub fn new(p: &DMatrix<f64>) -> Self {
        assert!((p - p.transpose()).amax() < 1e-15, "kernel not symmetric");
        SymmetricHeat {
            eig: p.clone().symmetric_eigen(),
        }
    }

    pub fn row0(&self, t: f64) -> Vec<f64> {
        let v = &self.eig.eigenvectors;
        let n = v.nrows();
        let w: Vec<f64> = (0..n)
            .map(|k| (t * (self.eig.eigenvalues[k] - 1.0)).exp() * v[(0, k)])
            .collect();
        (0..n).map(|y| (0..n).map(|k| w[k] * v[(y, k)]).sum()).collect()
    }
}

pub fn tv_uniform(d: &[f64]) -> f64 {
    let u = 1.0 / d.len() as f64;
    0.5 * d.iter().map(|x| (x - u).abs()).sum::<f64>()
}

pub fn l2_uniform(d: &[f64]) -> f64 {
    let m = d.len() as f64;
    (d.iter().map(|x| (m * x - 1.0).powi(2)).sum::<f64>() / m).sqrt()
}

/// Circulant kernel on Z_p with the given step weights.
pub fn cycle_kernel(p: usize, steps: &[(i64, f64)]) -> DMatrix<f64> {
    let mut m = DMatrix::zeros(p, p);
    for x in 0..p {
        for &(c, w) in steps {
            let y = (x as i64 + c).rem_euclid(p as i64) as usize;
            m[(x, y)] += w;
        }
    }
    m
}
