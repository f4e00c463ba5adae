use crate::config::Exponents;

/// `num/den` with the convention `0/0 = 0` (any zero numerator gives zero).
pub fn guarded_ratio(num: f64, den: f64) -> f64 {
    if num == 0.0 {
        0.0
    } else {
        num / den
    }
}

/// Coefficient table of the `L_ij` operators, computed once per exponent set.
///
/// With `s = p_i + p_j`:
/// `a = 1/(s+1)`, `b = p_j/s`, `c = p_i/s`, `d = p_i p_j/(s-1)`.
#[derive(Clone, Debug, PartialEq)]
pub struct Coefficients {
    p: Vec<u32>,
    a: Vec<f64>,
    b: Vec<f64>,
    c: Vec<f64>,
    d: Vec<f64>,
}

impl Coefficients {
    pub fn new(p: &Exponents) -> Self {
        let p = p.as_slice().to_vec();
        let n = p.len();
        let mut t = Coefficients {
            a: vec![0.0; n * n],
            b: vec![0.0; n * n],
            c: vec![0.0; n * n],
            d: vec![0.0; n * n],
            p,
        };
        for i in 0..n {
            for j in 0..n {
                let (pi, pj) = (t.p[i] as f64, t.p[j] as f64);
                let s = pi + pj;
                let k = i * n + j;
                t.a[k] = 1.0 / (s + 1.0);
                t.b[k] = guarded_ratio(pj, s);
                t.c[k] = guarded_ratio(pi, s);
                t.d[k] = guarded_ratio(pi * pj, s - 1.0);
            }
        }
        t
    }

    pub fn count(&self) -> usize {
        self.p.len()
    }

    pub fn exponent(&self, i: usize) -> u32 {
        self.p[i]
    }

    pub fn exponents(&self) -> &[u32] {
        &self.p
    }

    /// `p_i + p_j`
    pub fn s(&self, i: usize, j: usize) -> u32 {
        self.p[i] + self.p[j]
    }

    pub fn a(&self, i: usize, j: usize) -> f64 {
        self.a[i * self.p.len() + j]
    }

    pub fn b(&self, i: usize, j: usize) -> f64 {
        self.b[i * self.p.len() + j]
    }

    pub fn c(&self, i: usize, j: usize) -> f64 {
        self.c[i * self.p.len() + j]
    }

    pub fn d(&self, i: usize, j: usize) -> f64 {
        self.d[i * self.p.len() + j]
    }

    /// Highest power of `H` any operator needs, `2 p_N + 1`.
    pub fn max_power(&self) -> u32 {
        2 * self.p.last().copied().unwrap_or(0) + 1
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_over_zero_is_zero() {
        assert_eq!(guarded_ratio(0.0, 0.0), 0.0);
        assert_eq!(guarded_ratio(0.0, -1.0), 0.0);
        assert_eq!(guarded_ratio(2.0, 4.0), 0.5);
    }

    #[test]
    fn table_for_0_2() {
        let c = Coefficients::new(&Exponents::even(1).unwrap());
        assert_eq!(c.a(0, 0), 1.0);
        assert_eq!(c.a(1, 0), 1.0 / 3.0);
        assert_eq!(c.b(0, 0), 0.0);
        assert_eq!(c.b(0, 1), 1.0);
        assert_eq!(c.c(0, 1), 0.0);
        assert_eq!(c.c(1, 1), 0.5);
        assert_eq!(c.d(0, 1), 0.0);
        assert_eq!(c.d(1, 1), 4.0 / 3.0);
        assert_eq!(c.max_power(), 5);
    }
}
