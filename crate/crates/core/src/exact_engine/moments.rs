//! Exact propagation of the mixed moments `E[Xi_n^a Sigma_n^b]`.
//!
//! For any polynomial `f`,
//!
//! ```text
//! E[f(Xi_{n+1}, Sigma_{n+1}) | F_n]
//!     = f(Xi, Sigma) + pi_n [f(Xi + 1, Sigma + mu_{n+1}) - f(Xi, Sigma)],
//! pi_n = p(beta+1) Sigma / (n mu_{n+1}),
//! ```
//!
//! and because `pi_n` is linear in `Sigma` the moments of total degree `<= d`
//! form a closed linear system. The recursion is run on the scaled variable
//! `T_n = Sigma_n / mu_{n+1}`, for which `pi_n = p(beta+1) T_n / n` and
//! `T_{n+1} = (T_n + X_{n+1}) (n+1) / (n+1+beta)`. `T_n <= n / (beta+1)`, so
//! the scaled moments never overflow; the scale `mu_{n+1}` is reattached in
//! log space only when a table is emitted.

use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::gamma_kernel;
use crate::walkers::ModelParams;

/// Largest supported total degree.
pub const MAX_DEGREE: usize = 8;

/// Joint moments at one step `n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MomentTable {
    pub degree: usize,
    pub n: u64,
    /// `ln mu_{n+1}`.
    pub ln_scale: f64,
    /// `E[Xi^a T^b]`, dense `(d+1) x (d+1)`, entries with `a + b > d` unused.
    scaled: Vec<f64>,
}

impl MomentTable {
    fn index(degree: usize, a: usize, b: usize) -> usize {
        a * (degree + 1) + b
    }

    /// `E[Xi_n^a (Sigma_n / mu_{n+1})^b]`.
    pub fn scaled(&self, a: usize, b: usize) -> f64 {
        assert!(a + b <= self.degree, "moment ({a}, {b}) exceeds degree {}", self.degree);
        self.scaled[Self::index(self.degree, a, b)]
    }

    /// `E[Xi_n^a Sigma_n^b]`. May overflow to infinity for extreme inputs;
    /// use [`MomentTable::ln_moment`] there.
    pub fn moment(&self, a: usize, b: usize) -> f64 {
        self.ln_moment(a, b).exp()
    }

    pub fn ln_moment(&self, a: usize, b: usize) -> f64 {
        self.scaled(a, b).ln() + b as f64 * self.ln_scale
    }

    /// `(a, b, E[Xi^a Sigma^b])` for every `a + b <= degree`.
    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        let d = self.degree;
        (0..=d).flat_map(move |a| (0..=d - a).map(move |b| (a, b, self.moment(a, b))))
    }
}

struct Update {
    target: usize,
    b: usize,
    sources: Vec<(usize, f64)>,
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

fn update_plan(degree: usize) -> Vec<Update> {
    let idx = |a, b| MomentTable::index(degree, a, b);
    let mut plan = Vec::new();
    for a in 0..=degree {
        for b in 0..=degree - a {
            let mut sources = Vec::new();
            for i in 0..=a {
                for j in 0..=b {
                    if (i, j) != (a, b) {
                        sources.push((idx(i, j + 1), binomial(a, i) * binomial(b, j)));
                    }
                }
            }
            plan.push(Update { target: idx(a, b), b, sources });
        }
    }
    plan
}

/// Runs the scaled recursion from `n = 1` to `n_max`, calling `visit(n, t)`
/// at every `n` with the scaled table `t` (layout as in [`MomentTable`]).
pub fn propagate_with<F>(params: &ModelParams, n_max: u64, degree: usize, mut visit: F) -> Result<()>
where
    F: FnMut(u64, &[f64]),
{
    if !(1..=MAX_DEGREE).contains(&degree) {
        return domain(format!("degree must lie in 1..={MAX_DEGREE}, got {degree}"));
    }
    if n_max < 1 {
        return domain("n_max must be >= 1");
    }
    let beta = params.beta();
    let r = params.rate();
    let plan = update_plan(degree);
    let width = (degree + 1) * (degree + 1);

    // n = 1: Xi = 1, T = 1 / mu_2 = 1 / (1 + beta).
    let t1 = 1.0 / (1.0 + beta);
    let mut cur = vec![0.0; width];
    for a in 0..=degree {
        for b in 0..=degree - a {
            cur[MomentTable::index(degree, a, b)] = t1.powi(b as i32);
        }
    }
    let mut next = vec![0.0; width];
    let mut rho_pow = vec![1.0; degree + 1];
    visit(1, &cur);

    for n in 1..n_max {
        let nf = n as f64;
        let rn = r / nf;
        let rho = (nf + 1.0) / (nf + 1.0 + beta);
        for b in 1..=degree {
            rho_pow[b] = rho_pow[b - 1] * rho;
        }
        for u in &plan {
            let mut acc = 0.0;
            for &(src, coef) in &u.sources {
                acc += coef * cur[src];
            }
            next[u.target] = rho_pow[u.b] * (cur[u.target] + rn * acc);
        }
        std::mem::swap(&mut cur, &mut next);
        visit(n + 1, &cur);
    }
    Ok(())
}

/// Exact joint moments of total degree `<= degree` at each checkpoint
/// (strictly increasing, within `[1, n_max]`).
pub fn propagate_moments(
    params: &ModelParams,
    n_max: u64,
    degree: usize,
    checkpoints: &[u64],
) -> Result<Vec<MomentTable>> {
    if checkpoints.windows(2).any(|w| w[0] >= w[1]) {
        return domain("checkpoints must be strictly increasing");
    }
    if checkpoints.first().is_some_and(|&n| n < 1) || checkpoints.last().is_some_and(|&n| n > n_max) {
        return domain(format!("checkpoints must lie in [1, {n_max}]"));
    }
    let beta = params.beta();
    let mut out = Vec::with_capacity(checkpoints.len());
    let mut next_cp = checkpoints.iter().copied().peekable();
    propagate_with(params, n_max, degree, |n, table| {
        if next_cp.peek() == Some(&n) {
            next_cp.next();
            out.push(MomentTable {
                degree,
                n,
                ln_scale: gamma_kernel::ln_c_unchecked(n + 1, beta),
                scaled: table.to_vec(),
            });
        }
    })?;
    Ok(out)
}
