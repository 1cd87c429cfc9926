//! Tiny forward-mode derivative algebra (values, gradients, Hessians).
//!
//! The multiwell landscape is a composition of quadratics, smoothstep
//! weights and a log-sum-exp soft minimum. Writing its value, gradient and
//! Hessian as three hand-derived formulas invites inconsistency bugs, so
//! instead the formula is written once, generic over a scalar type, and
//! instantiated with plain `f64` (value), [`Jet1`] (value + gradient) or
//! [`Jet2`] (value + gradient + Hessian).

/// Scalar abstraction: arithmetic plus the transcendental functions the
/// landscape formulas need. `val` exposes the underlying value so formulas
/// can branch (piecewise definitions branch identically for all jet orders).
pub(crate) trait Scalar: Copy {
    fn cst(c: f64) -> Self;
    /// The coordinate variable along `axis` with value `x`.
    fn var(axis: usize, x: f64) -> Self;
    fn val(&self) -> f64;
    fn add(self, o: Self) -> Self;
    fn sub(self, o: Self) -> Self;
    fn mul(self, o: Self) -> Self;
    fn scale(self, c: f64) -> Self;
    fn add_c(self, c: f64) -> Self;
    fn exp(self) -> Self;
    fn ln(self) -> Self;

    fn sq(self) -> Self {
        self.mul(self)
    }

    fn pow4(self) -> Self {
        self.sq().sq()
    }
}

impl Scalar for f64 {
    fn cst(c: f64) -> Self {
        c
    }
    fn var(_axis: usize, x: f64) -> Self {
        x
    }
    fn val(&self) -> f64 {
        *self
    }
    fn add(self, o: Self) -> Self {
        self + o
    }
    fn sub(self, o: Self) -> Self {
        self - o
    }
    fn mul(self, o: Self) -> Self {
        self * o
    }
    fn scale(self, c: f64) -> Self {
        self * c
    }
    fn add_c(self, c: f64) -> Self {
        self + c
    }
    fn exp(self) -> Self {
        f64::exp(self)
    }
    fn ln(self) -> Self {
        f64::ln(self)
    }
}

/// First-order jet: value and gradient in `D` variables.
#[derive(Clone, Copy, Debug)]
pub(crate) struct Jet1<const D: usize> {
    pub v: f64,
    pub g: [f64; D],
}

impl<const D: usize> Scalar for Jet1<D> {
    fn cst(c: f64) -> Self {
        Jet1 { v: c, g: [0.0; D] }
    }
    fn var(axis: usize, x: f64) -> Self {
        let mut g = [0.0; D];
        g[axis] = 1.0;
        Jet1 { v: x, g }
    }
    fn val(&self) -> f64 {
        self.v
    }
    fn add(mut self, o: Self) -> Self {
        self.v += o.v;
        for k in 0..D {
            self.g[k] += o.g[k];
        }
        self
    }
    fn sub(mut self, o: Self) -> Self {
        self.v -= o.v;
        for k in 0..D {
            self.g[k] -= o.g[k];
        }
        self
    }
    fn mul(self, o: Self) -> Self {
        let mut g = [0.0; D];
        for k in 0..D {
            g[k] = self.g[k] * o.v + o.g[k] * self.v;
        }
        Jet1 { v: self.v * o.v, g }
    }
    fn scale(mut self, c: f64) -> Self {
        self.v *= c;
        for k in 0..D {
            self.g[k] *= c;
        }
        self
    }
    fn add_c(mut self, c: f64) -> Self {
        self.v += c;
        self
    }
    fn exp(self) -> Self {
        let e = self.v.exp();
        let mut g = self.g;
        for k in 0..D {
            g[k] *= e;
        }
        Jet1 { v: e, g }
    }
    fn ln(self) -> Self {
        let mut g = self.g;
        for k in 0..D {
            g[k] /= self.v;
        }
        Jet1 { v: self.v.ln(), g }
    }
}

/// Second-order jet: value, gradient and Hessian in `D` variables.
#[derive(Clone, Copy, Debug)]
pub(crate) struct Jet2<const D: usize> {
    pub v: f64,
    pub g: [f64; D],
    pub h: [[f64; D]; D],
}

impl<const D: usize> Scalar for Jet2<D> {
    fn cst(c: f64) -> Self {
        Jet2 { v: c, g: [0.0; D], h: [[0.0; D]; D] }
    }
    fn var(axis: usize, x: f64) -> Self {
        let mut g = [0.0; D];
        g[axis] = 1.0;
        Jet2 { v: x, g, h: [[0.0; D]; D] }
    }
    fn val(&self) -> f64 {
        self.v
    }
    fn add(mut self, o: Self) -> Self {
        self.v += o.v;
        for i in 0..D {
            self.g[i] += o.g[i];
            for j in 0..D {
                self.h[i][j] += o.h[i][j];
            }
        }
        self
    }
    fn sub(mut self, o: Self) -> Self {
        self.v -= o.v;
        for i in 0..D {
            self.g[i] -= o.g[i];
            for j in 0..D {
                self.h[i][j] -= o.h[i][j];
            }
        }
        self
    }
    fn mul(self, o: Self) -> Self {
        let mut g = [0.0; D];
        let mut h = [[0.0; D]; D];
        for i in 0..D {
            g[i] = self.g[i] * o.v + o.g[i] * self.v;
            for j in 0..D {
                h[i][j] = self.h[i][j] * o.v
                    + o.h[i][j] * self.v
                    + self.g[i] * o.g[j]
                    + self.g[j] * o.g[i];
            }
        }
        Jet2 { v: self.v * o.v, g, h }
    }
    fn scale(mut self, c: f64) -> Self {
        self.v *= c;
        for i in 0..D {
            self.g[i] *= c;
            for j in 0..D {
                self.h[i][j] *= c;
            }
        }
        self
    }
    fn add_c(mut self, c: f64) -> Self {
        self.v += c;
        self
    }
    fn exp(self) -> Self {
        let e = self.v.exp();
        let mut g = [0.0; D];
        let mut h = [[0.0; D]; D];
        for i in 0..D {
            g[i] = e * self.g[i];
            for j in 0..D {
                h[i][j] = e * (self.h[i][j] + self.g[i] * self.g[j]);
            }
        }
        Jet2 { v: e, g, h }
    }
    fn ln(self) -> Self {
        let mut g = [0.0; D];
        let mut h = [[0.0; D]; D];
        for i in 0..D {
            g[i] = self.g[i] / self.v;
            for j in 0..D {
                h[i][j] = self.h[i][j] / self.v - self.g[i] * self.g[j] / (self.v * self.v);
            }
        }
        Jet2 { v: self.v.ln(), g, h }
    }
}
