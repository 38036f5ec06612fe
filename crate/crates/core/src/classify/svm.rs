//! Soft-margin binary SVM solved by sequential minimal optimization.
//!
//! Working set of two, deterministic choice heuristics (no RNG): the
//! second multiplier maximizes |E1 - E2| with lowest-index tie-breaking,
//! and the fallback scans run from a fixed start. The solver stops when
//! a full KKT sweep changes nothing or the step budget runs out.

/// Numerical floor for a multiplier update to count as progress.
const STEP_EPS: f64 = 1e-10;

pub struct SmoSolution {
    pub alphas: Vec<f64>,
    pub b: f64,
    #[allow(dead_code)]
    pub steps: usize,
}

pub struct SmoProblem<'a> {
    /// Symmetric kernel lookup over training indices.
    pub gram: &'a dyn Fn(usize, usize) -> f64,
    /// Labels in {-1, +1}.
    pub y: &'a [f64],
    pub c: f64,
    /// KKT violation tolerance.
    pub tol: f64,
    /// Budget of successful working-set steps.
    pub max_steps: usize,
}

struct Solver<'a> {
    p: &'a SmoProblem<'a>,
    alphas: Vec<f64>,
    /// Error cache E_i = f(x_i) - y_i, maintained for every sample.
    errors: Vec<f64>,
    b: f64,
    steps: usize,
}

impl<'a> Solver<'a> {
    fn new(p: &'a SmoProblem<'a>) -> Self {
        let n = p.y.len();
        Solver {
            p,
            alphas: vec![0.0; n],
            // alpha = 0, b = 0 => f(x) = 0, E_i = -y_i.
            errors: p.y.iter().map(|&y| -y).collect(),
            b: 0.0,
            steps: 0,
        }
    }

    fn k(&self, i: usize, j: usize) -> f64 {
        (self.p.gram)(i, j)
    }

    fn non_bound(&self, i: usize) -> bool {
        self.alphas[i] > 0.0 && self.alphas[i] < self.p.c
    }

    fn take_step(&mut self, i1: usize, i2: usize) -> bool {
        if i1 == i2 || self.steps >= self.p.max_steps {
            return false;
        }
        let (a1_old, a2_old) = (self.alphas[i1], self.alphas[i2]);
        let (y1, y2) = (self.p.y[i1], self.p.y[i2]);
        let (e1, e2) = (self.errors[i1], self.errors[i2]);
        let s = y1 * y2;
        let c = self.p.c;

        let (lo, hi) = if (y1 - y2).abs() > f64::EPSILON {
            ((a2_old - a1_old).max(0.0), (c + a2_old - a1_old).min(c))
        } else {
            ((a1_old + a2_old - c).max(0.0), (a1_old + a2_old).min(c))
        };
        if hi - lo < STEP_EPS {
            return false;
        }

        let k11 = self.k(i1, i1);
        let k12 = self.k(i1, i2);
        let k22 = self.k(i2, i2);
        let eta = k11 + k22 - 2.0 * k12;

        let mut a2 = if eta > 0.0 {
            (a2_old + y2 * (e1 - e2) / eta).clamp(lo, hi)
        } else {
            // Degenerate curvature: evaluate the objective at both ends.
            let f1 = y1 * (e1 + self.b) - a1_old * k11 - s * a2_old * k12;
            let f2 = y2 * (e2 + self.b) - s * a1_old * k12 - a2_old * k22;
            let l1 = a1_old + s * (a2_old - lo);
            let h1 = a1_old + s * (a2_old - hi);
            let obj_lo =
                l1 * f1 + lo * f2 + 0.5 * l1 * l1 * k11 + 0.5 * lo * lo * k22 + s * lo * l1 * k12;
            let obj_hi =
                h1 * f1 + hi * f2 + 0.5 * h1 * h1 * k11 + 0.5 * hi * hi * k22 + s * hi * h1 * k12;
            if obj_lo < obj_hi - 1e-12 {
                lo
            } else if obj_hi < obj_lo - 1e-12 {
                hi
            } else {
                return false;
            }
        };
        if (a2 - a2_old).abs() < STEP_EPS * (a2 + a2_old + STEP_EPS) {
            return false;
        }
        // Snap to the box to keep bound checks exact.
        if a2 < 1e-12 {
            a2 = 0.0;
        } else if a2 > c - 1e-12 {
            a2 = c;
        }
        let mut a1 = a1_old + s * (a2_old - a2);
        if a1 < 1e-12 {
            a1 = 0.0;
        } else if a1 > c - 1e-12 {
            a1 = c;
        }

        let d1 = y1 * (a1 - a1_old);
        let d2 = y2 * (a2 - a2_old);
        let b1 = self.b - e1 - d1 * k11 - d2 * k12;
        let b2 = self.b - e2 - d1 * k12 - d2 * k22;
        let b_new = if a1 > 0.0 && a1 < c {
            b1
        } else if a2 > 0.0 && a2 < c {
            b2
        } else {
            0.5 * (b1 + b2)
        };
        let db = b_new - self.b;

        self.alphas[i1] = a1;
        self.alphas[i2] = a2;
        self.b = b_new;
        for i in 0..self.errors.len() {
            self.errors[i] += d1 * self.k(i1, i) + d2 * self.k(i2, i) + db;
        }
        self.steps += 1;
        true
    }

    fn examine(&mut self, i2: usize) -> bool {
        let y2 = self.p.y[i2];
        let a2 = self.alphas[i2];
        let e2 = self.errors[i2];
        let r2 = e2 * y2;
        let violates =
            (r2 < -self.p.tol && a2 < self.p.c) || (r2 > self.p.tol && a2 > 0.0);
        if !violates {
            return false;
        }
        let n = self.errors.len();

        // Heuristic: the non-bound partner with the largest |E1 - E2|.
        let mut best: Option<(usize, f64)> = None;
        for i1 in 0..n {
            if i1 != i2 && self.non_bound(i1) {
                let gap = (self.errors[i1] - e2).abs();
                if best.map_or(true, |(_, g)| gap > g) {
                    best = Some((i1, gap));
                }
            }
        }
        if let Some((i1, _)) = best {
            if self.take_step(i1, i2) {
                return true;
            }
        }
        // Fallback sweeps from a position derived from i2, not random,
        // so reruns follow the same path.
        for off in 0..n {
            let i1 = (i2 + 1 + off) % n;
            if self.non_bound(i1) && self.take_step(i1, i2) {
                return true;
            }
        }
        for off in 0..n {
            let i1 = (i2 + 1 + off) % n;
            if self.take_step(i1, i2) {
                return true;
            }
        }
        false
    }
}

pub fn solve(p: &SmoProblem<'_>) -> SmoSolution {
    let n = p.y.len();
    let mut s = Solver::new(p);
    let mut examine_all = true;
    loop {
        let mut changed = 0usize;
        for i in 0..n {
            if (examine_all || s.non_bound(i)) && s.examine(i) {
                changed += 1;
            }
        }
        if s.steps >= p.max_steps {
            break;
        }
        if examine_all {
            if changed == 0 {
                break;
            }
            examine_all = false;
        } else if changed == 0 {
            examine_all = true;
        }
    }
    SmoSolution {
        alphas: s.alphas,
        b: s.b,
        steps: s.steps,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn linear_gram(xs: &[Vec<f64>]) -> impl Fn(usize, usize) -> f64 + '_ {
        move |i, j| xs[i].iter().zip(&xs[j]).map(|(a, b)| a * b).sum()
    }

    #[test]
    fn separates_two_points() {
        let xs = vec![vec![-1.0], vec![1.0]];
        let y = [-1.0, 1.0];
        let gram = linear_gram(&xs);
        let sol = solve(&SmoProblem {
            gram: &gram,
            y: &y,
            c: 1.0,
            tol: 1e-3,
            max_steps: 1_000_000,
        });
        for (i, x) in xs.iter().enumerate() {
            let f: f64 = sol
                .alphas
                .iter()
                .zip(&y)
                .enumerate()
                .map(|(j, (a, yy))| a * yy * xs[j][0] * x[0])
                .sum::<f64>()
                + sol.b;
            assert_eq!(f.is_sign_positive(), y[i] > 0.0, "f({i}) = {f}");
        }
    }

    #[test]
    fn alphas_respect_the_box_and_balance() {
        let xs: Vec<Vec<f64>> = (0..20)
            .map(|i| {
                let base = if i % 2 == 0 { 0.0 } else { 4.0 };
                vec![base + (i as f64) * 0.01, base - (i as f64) * 0.02]
            })
            .collect();
        let y: Vec<f64> = (0..20).map(|i| if i % 2 == 0 { -1.0 } else { 1.0 }).collect();
        let gram = linear_gram(&xs);
        let sol = solve(&SmoProblem {
            gram: &gram,
            y: &y,
            c: 2.5,
            tol: 1e-3,
            max_steps: 1_000_000,
        });
        assert!(sol.alphas.iter().all(|&a| (0.0..=2.5).contains(&a)));
        let balance: f64 = sol.alphas.iter().zip(&y).map(|(a, yy)| a * yy).sum();
        assert!(balance.abs() < 1e-8, "sum alpha*y = {balance}");
    }

    #[test]
    fn solver_is_deterministic() {
        let xs: Vec<Vec<f64>> = (0..12)
            .map(|i| vec![(i % 3) as f64, (i % 4) as f64, if i < 6 { 0.2 } else { 3.0 }])
            .collect();
        let y: Vec<f64> = (0..12).map(|i| if i < 6 { -1.0 } else { 1.0 }).collect();
        let gram = linear_gram(&xs);
        let p = SmoProblem {
            gram: &gram,
            y: &y,
            c: 1.0,
            tol: 1e-3,
            max_steps: 1_000_000,
        };
        let a = solve(&p);
        let b = solve(&p);
        assert_eq!(a.alphas, b.alphas);
        assert_eq!(a.b, b.b);
    }
}
