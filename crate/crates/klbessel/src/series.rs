//! Truncated power series (scalar and square-matrix) over [`PadicNum`].
//! Arithmetic truncates consistently to the shorter operand; `delta` is the
//! logarithmic derivative `x d/dx`.

use crate::padic::{PadicCfg, PadicNum};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PSeries {
    pub coeffs: Vec<PadicNum>,
}

impl PSeries {
    pub fn new(coeffs: Vec<PadicNum>) -> PSeries {
        assert!(!coeffs.is_empty());
        PSeries { coeffs }
    }

    pub fn zero(cfg: PadicCfg, deg: usize) -> PSeries {
        PSeries { coeffs: vec![PadicNum::zero(cfg); deg + 1] }
    }

    pub fn degree_bound(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn add(&self, other: &PSeries) -> PSeries {
        let n = self.coeffs.len().min(other.coeffs.len());
        PSeries {
            coeffs: (0..n).map(|i| self.coeffs[i].add(&other.coeffs[i])).collect(),
        }
    }

    pub fn mul(&self, other: &PSeries) -> PSeries {
        let n = self.coeffs.len().min(other.coeffs.len());
        let cfg = self.coeffs[0].cfg();
        let mut out = vec![PadicNum::zero(cfg); n];
        for i in 0..n {
            if self.coeffs[i].is_zero() {
                continue;
            }
            for j in 0..n - i {
                if other.coeffs[j].is_zero() {
                    continue;
                }
                out[i + j] = out[i + j].add(&self.coeffs[i].mul(&other.coeffs[j]));
            }
        }
        PSeries { coeffs: out }
    }

    /// `f(x^p)`: coefficient at `x^{pk}` is the old coefficient at `x^k`.
    pub fn compose_xp(&self) -> PSeries {
        let cfg = self.coeffs[0].cfg();
        let p = cfg.p as usize;
        let n = self.coeffs.len();
        let mut out = vec![PadicNum::zero(cfg); n];
        for (k, c) in self.coeffs.iter().enumerate() {
            if p * k < n {
                out[p * k] = c.clone();
            }
        }
        PSeries { coeffs: out }
    }

    /// `delta = x d/dx`: multiplies the k-th coefficient by k.
    pub fn delta(&self) -> PSeries {
        PSeries {
            coeffs: self
                .coeffs
                .iter()
                .enumerate()
                .map(|(k, c)| c.mul_i64(k as i64))
                .collect(),
        }
    }

    /// Horner evaluation; the tail beyond the truncation degree is the
    /// caller's responsibility.
    pub fn eval(&self, x: &PadicNum) -> PadicNum {
        let mut acc = PadicNum::zero(self.coeffs[0].cfg());
        for c in self.coeffs.iter().rev() {
            acc = acc.mul(x).add(c);
        }
        acc
    }
}

/// Square matrix with [`PadicNum`] entries, row-major.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Mat {
    pub r: usize,
    pub e: Vec<PadicNum>,
}

impl Mat {
    pub fn zero(cfg: PadicCfg, r: usize) -> Mat {
        Mat { r, e: vec![PadicNum::zero(cfg); r * r] }
    }

    pub fn identity(cfg: PadicCfg, r: usize) -> Mat {
        let mut m = Mat::zero(cfg, r);
        for i in 0..r {
            m.e[i * r + i] = PadicNum::one(cfg);
        }
        m
    }

    #[inline]
    pub fn at(&self, i: usize, j: usize) -> &PadicNum {
        &self.e[i * self.r + j]
    }
    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: PadicNum) {
        self.e[i * self.r + j] = v;
    }

    pub fn add(&self, other: &Mat) -> Mat {
        assert_eq!(self.r, other.r);
        Mat {
            r: self.r,
            e: self.e.iter().zip(&other.e).map(|(a, b)| a.add(b)).collect(),
        }
    }

    pub fn sub(&self, other: &Mat) -> Mat {
        assert_eq!(self.r, other.r);
        Mat {
            r: self.r,
            e: self.e.iter().zip(&other.e).map(|(a, b)| a.sub(b)).collect(),
        }
    }

    pub fn mul(&self, other: &Mat) -> Mat {
        assert_eq!(self.r, other.r);
        let r = self.r;
        let cfg = self.e[0].cfg();
        let mut out = Mat::zero(cfg, r);
        for i in 0..r {
            for k in 0..r {
                if self.at(i, k).is_zero() {
                    continue;
                }
                for j in 0..r {
                    if other.at(k, j).is_zero() {
                        continue;
                    }
                    let t = out.at(i, j).add(&self.at(i, k).mul(other.at(k, j)));
                    out.set(i, j, t);
                }
            }
        }
        out
    }

    pub fn scale(&self, s: &PadicNum) -> Mat {
        Mat { r: self.r, e: self.e.iter().map(|a| a.mul(s)).collect() }
    }

    pub fn trace(&self) -> PadicNum {
        let mut acc = PadicNum::zero(self.e[0].cfg());
        for i in 0..self.r {
            acc = acc.add(self.at(i, i));
        }
        acc
    }

    pub fn is_zero(&self) -> bool {
        self.e.iter().all(|x| x.is_zero())
    }

    /// Minimum pi-adic valuation over entries; None if the matrix is 0.
    pub fn min_val(&self) -> Option<usize> {
        self.e.iter().filter_map(|x| x.val()).min()
    }
}

/// Matrix power series, one [`Mat`] per x-degree.
#[derive(Clone, Debug)]
pub struct PSeriesMat {
    pub coeffs: Vec<Mat>,
}

impl PSeriesMat {
    pub fn new(coeffs: Vec<Mat>) -> PSeriesMat {
        assert!(!coeffs.is_empty());
        PSeriesMat { coeffs }
    }

    pub fn r(&self) -> usize {
        self.coeffs[0].r
    }

    pub fn degree_bound(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn add(&self, other: &PSeriesMat) -> PSeriesMat {
        let n = self.coeffs.len().min(other.coeffs.len());
        PSeriesMat {
            coeffs: (0..n).map(|i| self.coeffs[i].add(&other.coeffs[i])).collect(),
        }
    }

    pub fn mul(&self, other: &PSeriesMat) -> PSeriesMat {
        let n = self.coeffs.len().min(other.coeffs.len());
        let cfg = self.coeffs[0].e[0].cfg();
        let r = self.r();
        let mut out = vec![Mat::zero(cfg, r); n];
        for i in 0..n {
            if self.coeffs[i].is_zero() {
                continue;
            }
            for j in 0..n - i {
                if other.coeffs[j].is_zero() {
                    continue;
                }
                out[i + j] = out[i + j].add(&self.coeffs[i].mul(&other.coeffs[j]));
            }
        }
        PSeriesMat { coeffs: out }
    }

    pub fn compose_xp(&self) -> PSeriesMat {
        let cfg = self.coeffs[0].e[0].cfg();
        let p = cfg.p as usize;
        let r = self.r();
        let n = self.coeffs.len();
        let mut out = vec![Mat::zero(cfg, r); n];
        for (k, c) in self.coeffs.iter().enumerate() {
            if p * k < n {
                out[p * k] = c.clone();
            }
        }
        PSeriesMat { coeffs: out }
    }

    pub fn delta(&self) -> PSeriesMat {
        PSeriesMat {
            coeffs: self
                .coeffs
                .iter()
                .enumerate()
                .map(|(k, c)| Mat {
                    r: c.r,
                    e: c.e.iter().map(|x| x.mul_i64(k as i64)).collect(),
                })
                .collect(),
        }
    }

    /// Series inverse; requires the constant term to be the identity.
    pub fn inverse(&self) -> PSeriesMat {
        let cfg = self.coeffs[0].e[0].cfg();
        let r = self.r();
        assert_eq!(self.coeffs[0], Mat::identity(cfg, r), "constant term must be 1");
        let n = self.coeffs.len();
        let mut inv = vec![Mat::zero(cfg, r); n];
        inv[0] = Mat::identity(cfg, r);
        for k in 1..n {
            let mut acc = Mat::zero(cfg, r);
            for j in 1..=k {
                acc = acc.add(&self.coeffs[j].mul(&inv[k - j]));
            }
            inv[k] = Mat::zero(cfg, r).sub(&acc);
        }
        PSeriesMat { coeffs: inv }
    }

    pub fn eval(&self, x: &PadicNum) -> Mat {
        let cfg = self.coeffs[0].e[0].cfg();
        let r = self.r();
        let mut acc = Mat::zero(cfg, r);
        for c in self.coeffs.iter().rev() {
            acc = acc.scale(x).add(c);
        }
        acc
    }
}
