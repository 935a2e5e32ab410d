//! Small numerical kernels: zeta sums, quadrature and compensated summation.

/// Bernoulli numbers B_2, B_4, ..., B_14 for the Euler-Maclaurin tail.
const BERNOULLI_EVEN: [f64; 7] = [
    1.0 / 6.0,
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2730.0,
    7.0 / 6.0,
];

/// `sum_{j >= n} j^(-s)` for `s > 1`, `n >= 1`.
///
/// Terms below a cutoff are summed directly; the remainder uses the
/// Euler-Maclaurin expansion with seven Bernoulli corrections, which is
/// accurate to roughly machine precision once the cutoff exceeds `s`.
pub fn hurwitz_tail(s: f64, n: u64) -> f64 {
    debug_assert!(s > 1.0 && n >= 1);
    let cutoff = (16.0_f64).max(s.ceil() + 8.0) as u64;
    let mut head = KahanSum::default();
    let mut start = n;
    while start < cutoff {
        head.add((start as f64).powf(-s));
        start += 1;
    }
    let big_n = start as f64;
    let mut tail = big_n.powf(1.0 - s) / (s - 1.0) + 0.5 * big_n.powf(-s);
    // rising factorial s(s+1)...(s+2j-2) and (2j)!
    let mut rising = s;
    let mut factorial = 2.0;
    let mut power = big_n.powf(-s - 1.0);
    for (j, b) in BERNOULLI_EVEN.iter().enumerate() {
        if j > 0 {
            let two_j = 2.0 * (j as f64 + 1.0);
            rising *= (s + two_j - 3.0) * (s + two_j - 2.0);
            factorial *= (two_j - 1.0) * two_j;
            power /= big_n * big_n;
        }
        tail += b / factorial * rising * power;
    }
    head.add(tail);
    head.value()
}

/// Riemann zeta function for real `s > 1`.
pub fn zeta(s: f64) -> f64 {
    hurwitz_tail(s, 1)
}

/// Adaptive Simpson quadrature of `f` over `[a, b]` to absolute tolerance `tol`.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> f64 {
    let fa = f(a);
    let fb = f(b);
    let m = 0.5 * (a + b);
    let fm = f(m);
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    simpson_step(&f, a, b, fa, fm, fb, whole, tol, 48)
}

#[allow(clippy::too_many_arguments)]
fn simpson_step<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> f64 {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        return left + right + delta / 15.0;
    }
    simpson_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
        + simpson_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
}

/// Neumaier-compensated running sum.
#[derive(Debug, Clone, Copy, Default)]
pub struct KahanSum {
    sum: f64,
    compensation: f64,
}

impl KahanSum {
    #[inline]
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.compensation += (self.sum - t) + x;
        } else {
            self.compensation += (x - t) + self.sum;
        }
        self.sum = t;
    }

    #[inline]
    pub fn value(&self) -> f64 {
        self.sum + self.compensation
    }
}

impl std::iter::FromIterator<f64> for KahanSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut acc = KahanSum::default();
        for x in iter {
            acc.add(x);
        }
        acc
    }
}
