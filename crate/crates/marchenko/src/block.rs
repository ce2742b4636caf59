//! Fixed-size 2x2 complex blocks and 2-vectors.
//!
//! Everything the Levinson recursion and the Woodbury correction touch is
//! built from these two types, so the operations are written out explicitly
//! instead of going through a general matrix library.

use num_complex::Complex64 as C64;

/// Column 2-vector, one block row of an interleaved GLME unknown.
pub type Pair = [C64; 2];

pub const ZERO_PAIR: Pair = [C64::new(0.0, 0.0), C64::new(0.0, 0.0)];

/// Dense 2x2 complex block, row-major.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Block2 {
    pub m: [[C64; 2]; 2],
}

impl Block2 {
    #[inline]
    pub fn new(a: C64, b: C64, c: C64, d: C64) -> Self {
        Self { m: [[a, b], [c, d]] }
    }

    #[inline]
    pub fn zero() -> Self {
        let z = C64::new(0.0, 0.0);
        Self::new(z, z, z, z)
    }

    #[inline]
    pub fn identity() -> Self {
        let z = C64::new(0.0, 0.0);
        let o = C64::new(1.0, 0.0);
        Self::new(o, z, z, o)
    }

    #[inline]
    pub fn mul(&self, o: &Block2) -> Block2 {
        let a = &self.m;
        let b = &o.m;
        Block2::new(
            a[0][0] * b[0][0] + a[0][1] * b[1][0],
            a[0][0] * b[0][1] + a[0][1] * b[1][1],
            a[1][0] * b[0][0] + a[1][1] * b[1][0],
            a[1][0] * b[0][1] + a[1][1] * b[1][1],
        )
    }

    #[inline]
    pub fn add(&self, o: &Block2) -> Block2 {
        Block2::new(
            self.m[0][0] + o.m[0][0],
            self.m[0][1] + o.m[0][1],
            self.m[1][0] + o.m[1][0],
            self.m[1][1] + o.m[1][1],
        )
    }

    #[inline]
    pub fn sub(&self, o: &Block2) -> Block2 {
        Block2::new(
            self.m[0][0] - o.m[0][0],
            self.m[0][1] - o.m[0][1],
            self.m[1][0] - o.m[1][0],
            self.m[1][1] - o.m[1][1],
        )
    }

    /// self += a * b, fused into the accumulator to keep the recursion hot loop tight.
    #[inline]
    pub fn acc_mul(&mut self, a: &Block2, b: &Block2) {
        let x = &a.m;
        let y = &b.m;
        self.m[0][0] += x[0][0] * y[0][0] + x[0][1] * y[1][0];
        self.m[0][1] += x[0][0] * y[0][1] + x[0][1] * y[1][1];
        self.m[1][0] += x[1][0] * y[0][0] + x[1][1] * y[1][0];
        self.m[1][1] += x[1][0] * y[0][1] + x[1][1] * y[1][1];
    }

    #[inline]
    pub fn apply(&self, v: &Pair) -> Pair {
        [
            self.m[0][0] * v[0] + self.m[0][1] * v[1],
            self.m[1][0] * v[0] + self.m[1][1] * v[1],
        ]
    }

    /// v += self * w
    #[inline]
    pub fn acc_apply(&self, v: &mut Pair, w: &Pair) {
        v[0] += self.m[0][0] * w[0] + self.m[0][1] * w[1];
        v[1] += self.m[1][0] * w[0] + self.m[1][1] * w[1];
    }

    #[inline]
    pub fn det(&self) -> C64 {
        self.m[0][0] * self.m[1][1] - self.m[0][1] * self.m[1][0]
    }

    /// Closed-form inverse. Returns `None` together with a condition estimate
    /// when the block is numerically singular.
    #[inline]
    pub fn inv(&self) -> Option<Block2> {
        let det = self.det();
        if det.norm() == 0.0 {
            return None;
        }
        let inv_det = det.inv();
        Some(Block2::new(
            self.m[1][1] * inv_det,
            -self.m[0][1] * inv_det,
            -self.m[1][0] * inv_det,
            self.m[0][0] * inv_det,
        ))
    }

    /// Max-entry norm, used for cheap condition estimates.
    #[inline]
    pub fn max_norm(&self) -> f64 {
        self.m
            .iter()
            .flatten()
            .map(|c| c.norm())
            .fold(0.0, f64::max)
    }

    /// `max_norm(K) * max_norm(K^-1)` style condition estimate; infinite when singular.
    pub fn cond_estimate(&self) -> f64 {
        match self.inv() {
            Some(inv) => self.max_norm() * inv.max_norm(),
            None => f64::INFINITY,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn inverse_roundtrip() {
        let b = Block2::new(c(1.0, 0.5), c(-0.3, 0.2), c(0.1, -0.7), c(2.0, 0.0));
        let inv = b.inv().unwrap();
        let prod = b.mul(&inv);
        let id = Block2::identity();
        for i in 0..2 {
            for j in 0..2 {
                assert!((prod.m[i][j] - id.m[i][j]).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn singular_block_has_no_inverse() {
        let b = Block2::new(c(1.0, 0.0), c(2.0, 0.0), c(2.0, 0.0), c(4.0, 0.0));
        assert!(b.inv().is_none());
        assert!(b.cond_estimate().is_infinite());
    }

    #[test]
    fn apply_matches_mul() {
        let b = Block2::new(c(1.0, 1.0), c(0.0, -2.0), c(3.0, 0.0), c(-1.0, 0.5));
        let v = [c(0.4, -0.1), c(-1.0, 2.0)];
        let got = b.apply(&v);
        assert_eq!(got[0], b.m[0][0] * v[0] + b.m[0][1] * v[1]);
        assert_eq!(got[1], b.m[1][0] * v[0] + b.m[1][1] * v[1]);
    }
}
