//! Correctly rounded floating-point summation.
//!
//! Every sum that feeds an estimator goes through [`ExactSum`], so results do
//! not depend on the order in which subjects, repeats or groups are visited.
//! The algorithm keeps a list of non-overlapping partial sums (Shewchuk) and
//! rounds the exact total once at the end, with the half-way correction used
//! by Python's `math.fsum`.

#[derive(Debug, Clone, Default)]
pub struct ExactSum {
    partials: Vec<f64>,
    nonfinite: f64,
    saw_nonfinite: bool,
}

impl ExactSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, mut x: f64) {
        if !x.is_finite() {
            self.saw_nonfinite = true;
            self.nonfinite += x;
            return;
        }
        let mut i = 0;
        for j in 0..self.partials.len() {
            let mut y = self.partials[j];
            if x.abs() < y.abs() {
                std::mem::swap(&mut x, &mut y);
            }
            let hi = x + y;
            let lo = y - (hi - x);
            if lo != 0.0 {
                self.partials[i] = lo;
                i += 1;
            }
            x = hi;
        }
        self.partials.truncate(i);
        self.partials.push(x);
    }

    /// Adds `a * b` without rounding the product (barring underflow).
    pub fn add_product(&mut self, a: f64, b: f64) {
        let p = a * b;
        if !p.is_finite() {
            self.add(p);
            return;
        }
        self.add(p);
        self.add(a.mul_add(b, -p));
    }

    /// Adds `c * x` where `x` is the exact total held by another accumulator.
    pub fn add_scaled(&mut self, x: &ExactSum, c: f64) {
        if x.saw_nonfinite {
            self.add(c * x.value());
            return;
        }
        for &p in &x.partials {
            self.add_product(p, c);
        }
    }

    /// Adds `c * x * y` for the exact totals of two accumulators.
    pub fn add_product_of(&mut self, x: &ExactSum, y: &ExactSum, c: f64) {
        if x.saw_nonfinite || y.saw_nonfinite {
            self.add(c * x.value() * y.value());
            return;
        }
        for &p in &x.partials {
            for &q in &y.partials {
                let h = p * q;
                self.add_product(h, c);
                self.add_product(p.mul_add(q, -h), c);
            }
        }
    }

    pub fn value(&self) -> f64 {
        if self.saw_nonfinite {
            return self.nonfinite + self.partials.iter().sum::<f64>();
        }
        let p = &self.partials;
        let mut n = p.len();
        if n == 0 {
            return 0.0;
        }
        n -= 1;
        let mut hi = p[n];
        let mut lo = 0.0;
        while n > 0 {
            let x = hi;
            n -= 1;
            let y = p[n];
            hi = x + y;
            let yr = hi - x;
            lo = y - yr;
            if lo != 0.0 {
                break;
            }
        }
        if n > 0 && ((lo < 0.0 && p[n - 1] < 0.0) || (lo > 0.0 && p[n - 1] > 0.0)) {
            let y = lo * 2.0;
            let x = hi + y;
            let yr = x - hi;
            if y == yr {
                hi = x;
            }
        }
        hi
    }
}

impl Extend<f64> for ExactSum {
    fn extend<I: IntoIterator<Item = f64>>(&mut self, iter: I) {
        for x in iter {
            self.add(x);
        }
    }
}

/// Correctly rounded sum of `values`.
pub fn exact_sum<I: IntoIterator<Item = f64>>(values: I) -> f64 {
    let mut acc = ExactSum::new();
    acc.extend(values);
    acc.value()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn products_are_not_rounded() {
        let a = 1.0 + f64::EPSILON;
        let mut s = ExactSum::new();
        s.add_product(a, a);
        s.add(-1.0);
        s.add(-2.0 * f64::EPSILON);
        assert_eq!(s.value(), f64::EPSILON * f64::EPSILON);

        let mut x = ExactSum::new();
        x.add(1.0);
        x.add(f64::EPSILON / 4.0);
        let mut t = ExactSum::new();
        t.add_product_of(&x, &x, 3.0);
        t.add_scaled(&x, -6.0);
        t.add(3.0);
        // 3 (1 + e)^2 - 6 (1 + e) + 3 = 3 e^2
        let e = f64::EPSILON / 4.0;
        assert_eq!(t.value(), 3.0 * e * e);
    }

    #[test]
    fn cancellation() {
        assert_eq!(exact_sum([1e100, 1.0, -1e100]), 1.0);
        assert_eq!(exact_sum([0.1; 10]), 1.0);
        assert_eq!(exact_sum(std::iter::empty()), 0.0);
    }

    #[test]
    fn half_way_rounding() {
        // 1 + 2^-53 + 2^-106 rounds up, not to even.
        let v = [1.0, 2f64.powi(-53), 2f64.powi(-106)];
        assert_eq!(exact_sum(v), 1.0 + f64::EPSILON);
    }

    proptest! {
        #[test]
        fn order_independent(mut xs in proptest::collection::vec(-1e6f64..1e6, 0..60), seed in 0u64..1000) {
            let a = exact_sum(xs.iter().copied());
            // deterministic shuffle
            let n = xs.len();
            let mut s = seed;
            for i in (1..n).rev() {
                s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                let j = (s >> 33) as usize % (i + 1);
                xs.swap(i, j);
            }
            let b = exact_sum(xs.iter().copied());
            prop_assert_eq!(a.to_bits(), b.to_bits());
        }
    }
}
