//! Operator splitting on the homogeneous self-dual embedding.
//!
//! Iterates on `u = (x, y, τ)` and `v = (r, s, κ)`:
//!
//! ```text
//! ũ = (I + Q)⁻¹ (u + v)
//! u⁺ = Π_C(α ũ + (1 - α) u - v)
//! v⁺ = v - α ũ - (1 - α) u + u⁺
//! ```
//!
//! with `Q = [[0, Aᵀ, c], [-A, 0, b], [-cᵀ, -bᵀ, 0]]` and
//! `C = Rⁿ × K* × R₊`. The linear system is factored once (dense Cholesky of
//! `I + ÂᵀÂ`); the cone step is the closed-form projection per segment.
//! Solutions are recovered as `(x, y, s) / τ`; when `τ → 0` the iterates
//! converge to infeasibility certificates instead.

use log::{debug, info};
use nalgebra::{Cholesky, DMatrix, DVector, Dyn};

use super::cones::{Cone, ConeProjector};
use super::kkt::Residuals;
use super::{ConicProgram, SolverResult, SolverSettings, SolverStatus};
use crate::error::{Error, Result};

const RUIZ_PASSES: usize = 25;
const SCALE_MIN: f64 = 1e-4;
const SCALE_MAX: f64 = 1e4;

/// A conic solver implementation.
///
/// The built-in [`SplittingSolver`] is the default; alternative backends
/// (for cross-validation against an independent implementation) plug in
/// through this trait.
pub trait ConicBackend: Send + Sync {
    fn name(&self) -> &str;
    fn solve(&self, p: &ConicProgram, settings: &SolverSettings) -> Result<SolverResult>;
}

#[derive(Debug, Default, Clone, Copy)]
pub struct SplittingSolver;

impl ConicBackend for SplittingSolver {
    fn name(&self) -> &str {
        "splitting"
    }

    fn solve(&self, p: &ConicProgram, settings: &SolverSettings) -> Result<SolverResult> {
        solve(p, settings)
    }
}

/// Solves `p` with the built-in splitting method.
pub fn solve(p: &ConicProgram, settings: &SolverSettings) -> Result<SolverResult> {
    p.validate()?;
    settings.validate()?;
    let n = p.num_vars();
    let m = p.num_rows();
    if m == 0 || n == 0 {
        return Ok(trivial(p));
    }
    let mut ws = Workspace::new(p, settings.scaling)?;
    Ok(ws.run(p, settings))
}

/// Programs with no rows or no variables have closed-form outcomes.
fn trivial(p: &ConicProgram) -> SolverResult {
    let n = p.num_vars();
    let m = p.num_rows();
    let cn: f64 = p.c.iter().map(|v| v * v).sum::<f64>();
    if m == 0 && cn > 0.0 {
        // unbounded along -c
        let x = p.c.iter().map(|v| -v / cn).collect();
        return SolverResult {
            status: SolverStatus::DualInfeasible,
            x,
            y: vec![],
            s: vec![],
            objective: f64::NEG_INFINITY,
            residuals: Residuals::default(),
            iterations: 0,
        };
    }
    // n == 0: feasible iff b ∈ K
    let mut s = p.b.clone();
    let mut proj = ConeProjector::new(&p.cones);
    proj.project_primal(&mut s);
    let dist: f64 = s.iter().zip(&p.b).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
    if dist > 0.0 {
        // y = Π_{K*}(-b) separates b from K: bᵀy < 0 and Aᵀy = 0 trivially.
        let mut y: Vec<f64> = p.b.iter().map(|v| -v).collect();
        proj.project_dual(&mut y);
        let by: f64 = y.iter().zip(&p.b).map(|(a, b)| a * b).sum();
        let y = y.iter().map(|v| v / -by).collect();
        return SolverResult {
            status: SolverStatus::PrimalInfeasible,
            x: vec![0.0; n],
            y,
            s: vec![0.0; m],
            objective: f64::INFINITY,
            residuals: Residuals::default(),
            iterations: 0,
        };
    }
    SolverResult {
        status: SolverStatus::Optimal,
        x: vec![0.0; n],
        y: vec![0.0; m],
        s,
        objective: 0.0,
        residuals: Residuals::default(),
        iterations: 0,
    }
}

struct Workspace {
    n: usize,
    m: usize,
    a: DMatrix<f64>,
    b: DVector<f64>,
    c: DVector<f64>,
    /// row scaling `D`
    d: DVector<f64>,
    /// column scaling `E`
    e: DVector<f64>,
    sb: f64,
    sc: f64,
    chol: Cholesky<f64, Dyn>,
    /// `M⁻¹ h` with `h = (c, b)`
    g: DVector<f64>,
    hg: f64,
    projector: ConeProjector,
    norm_b: f64,
    norm_c: f64,
}

impl Workspace {
    fn new(p: &ConicProgram, scaling: bool) -> Result<Self> {
        let n = p.num_vars();
        let m = p.num_rows();
        let mut a = p.a.to_dense();
        let mut d = DVector::from_element(m, 1.0);
        let mut e = DVector::from_element(n, 1.0);
        if scaling {
            ruiz(&mut a.clone(), &mut d, &mut e, &p.cones);
            for j in 0..n {
                for i in 0..m {
                    a[(i, j)] *= d[i] * e[j];
                }
            }
        }
        let mut b = DVector::from_iterator(m, p.b.iter().zip(d.iter()).map(|(v, s)| v * s));
        let mut c = DVector::from_iterator(n, p.c.iter().zip(e.iter()).map(|(v, s)| v * s));
        let (sb, sc) = if scaling {
            let nb = b.norm();
            let nc = c.norm();
            (
                if nb > SCALE_MIN { 1.0 / nb } else { 1.0 },
                if nc > SCALE_MIN { 1.0 / nc } else { 1.0 },
            )
        } else {
            (1.0, 1.0)
        };
        b *= sb;
        c *= sc;

        let mut gram = a.tr_mul(&a);
        for i in 0..n {
            gram[(i, i)] += 1.0;
        }
        let chol = Cholesky::new(gram)
            .ok_or_else(|| Error::InvalidArgument("linear system factorization failed".into()))?;
        let mut ws = Self {
            n,
            m,
            a,
            b,
            c,
            d,
            e,
            sb,
            sc,
            chol,
            g: DVector::zeros(n + m),
            hg: 0.0,
            projector: ConeProjector::new(&p.cones),
            norm_b: norm(&p.b),
            norm_c: norm(&p.c),
        };
        let mut h = DVector::zeros(n + m);
        h.rows_mut(0, n).copy_from(&ws.c);
        h.rows_mut(n, m).copy_from(&ws.b);
        let g = ws.solve_m(&h);
        ws.hg = h.dot(&g);
        ws.g = g;
        Ok(ws)
    }

    /// Solves `[[I, Âᵀ], [-Â, I]] z = w`.
    fn solve_m(&self, w: &DVector<f64>) -> DVector<f64> {
        let (n, m) = (self.n, self.m);
        let wx = w.rows(0, n);
        let wy = w.rows(n, m);
        let rhs = wx - self.a.tr_mul(&wy);
        let zx = self.chol.solve(&rhs);
        let zy = wy + &self.a * &zx;
        let mut z = DVector::zeros(n + m);
        z.rows_mut(0, n).copy_from(&zx);
        z.rows_mut(n, m).copy_from(&zy);
        z
    }

    /// Solves `(I + Q) z = w` for the full `(x, y, τ)` vector.
    fn solve_lin(&self, w: &DVector<f64>) -> DVector<f64> {
        let (n, m) = (self.n, self.m);
        let top = w.rows(0, n + m).into_owned();
        let z = self.solve_m(&top);
        let hz = self.c.dot(&z.rows(0, n)) + self.b.dot(&z.rows(n, m));
        let zeta = (w[n + m] + hz) / (1.0 + self.hg);
        let mut out = DVector::zeros(n + m + 1);
        out.rows_mut(0, n + m).copy_from(&(z - &self.g * zeta));
        out[n + m] = zeta;
        out
    }

    fn run(&mut self, p: &ConicProgram, settings: &SolverSettings) -> SolverResult {
        let (n, m) = (self.n, self.m);
        let len = n + m + 1;
        let alpha = settings.relaxation;
        let mut u = DVector::zeros(len);
        let mut v = DVector::zeros(len);
        u[n + m] = 1.0;
        v[n + m] = 1.0;

        let mut best: Option<(f64, DVector<f64>, DVector<f64>, Residuals)> = None;
        let mut pinf_run = 0usize;
        let mut dinf_run = 0usize;

        for iter in 0..settings.max_iterations {
            let ut = self.solve_lin(&(&u + &v));
            let ubar = &ut * alpha + &u * (1.0 - alpha);
            let mut un = &ubar - &v;
            {
                let ys = &mut un.as_mut_slice()[n..n + m];
                self.projector.project_dual(ys);
            }
            if un[n + m] < 0.0 {
                un[n + m] = 0.0;
            }
            v = &v - &ubar + &un;
            u = un;

            if u.iter().chain(v.iter()).any(|x| !x.is_finite()) {
                info!("splitting solver: non-finite iterate at iteration {iter}");
                break;
            }

            let ax = &self.a * u.rows(0, n);
            let aty = self.a.tr_mul(&u.rows(n, m));
            let tau = u[n + m];
            let vs = v.rows(n, m);

            if tau > 0.0 {
                let res = self.residuals(&ax, &aty, &u, &vs, tau);
                if settings.verbose && iter % 500 == 0 {
                    debug!(
                        "iter {iter:6}  pres {:.2e}  dres {:.2e}  gap {:.2e}  tau {:.2e}",
                        res.primal, res.dual, res.gap, tau
                    );
                }
                if res.within(settings.tolerance) {
                    return self.finish(p, SolverStatus::Optimal, &u, &v, res, iter + 1);
                }
                let score = res.max();
                if best.as_ref().is_none_or(|(s, ..)| score < *s) {
                    best = Some((score, u.clone(), v.clone(), res));
                }
            }

            // primal infeasibility: y with Aᵀy = 0, bᵀy = -1, y ∈ K*
            let bty = self.b.dot(&u.rows(n, m));
            let pinf = if bty < 0.0 {
                let r: f64 = aty
                    .iter()
                    .zip(self.e.iter())
                    .map(|(v, e)| (v / e).powi(2))
                    .sum::<f64>()
                    .sqrt();
                r * self.sb / -bty
            } else {
                f64::INFINITY
            };
            pinf_run = if pinf <= settings.infeasibility_tolerance { pinf_run + 1 } else { 0 };
            if pinf_run >= settings.infeasibility_patience {
                return self.primal_certificate(&u, iter + 1);
            }

            // dual infeasibility: x with Ax + s = 0, s ∈ K, cᵀx = -1
            let ctx = self.c.dot(&u.rows(0, n));
            let dinf = if ctx < 0.0 {
                let r: f64 = ax
                    .iter()
                    .zip(vs.iter())
                    .zip(self.d.iter())
                    .map(|((a, s), d)| ((a + s) / d).powi(2))
                    .sum::<f64>()
                    .sqrt();
                r * self.sc / -ctx
            } else {
                f64::INFINITY
            };
            dinf_run = if dinf <= settings.infeasibility_tolerance { dinf_run + 1 } else { 0 };
            if dinf_run >= settings.infeasibility_patience {
                return self.dual_certificate(&u, &v, iter + 1);
            }
        }

        match best {
            Some((_, bu, bv, res)) => {
                let status = if res.within(settings.tolerance * 100.0) {
                    SolverStatus::Inaccurate
                } else {
                    SolverStatus::MaxIters
                };
                self.finish(p, status, &bu, &bv, res, settings.max_iterations)
            }
            None => SolverResult {
                status: SolverStatus::MaxIters,
                x: vec![f64::NAN; n],
                y: vec![f64::NAN; m],
                s: vec![f64::NAN; m],
                objective: f64::NAN,
                residuals: Residuals {
                    primal: f64::INFINITY,
                    dual: f64::INFINITY,
                    gap: f64::INFINITY,
                },
                iterations: settings.max_iterations,
            },
        }
    }

    fn residuals(
        &self,
        ax: &DVector<f64>,
        aty: &DVector<f64>,
        u: &DVector<f64>,
        vs: &nalgebra::DVectorView<f64>,
        tau: f64,
    ) -> Residuals {
        let (n, m) = (self.n, self.m);
        let mut pr = 0.0;
        for i in 0..m {
            let r = (ax[i] + vs[i] - self.b[i] * tau) / self.d[i];
            pr += r * r;
        }
        let primal = pr.sqrt() / (tau * self.sb) / (1.0 + self.norm_b);
        let mut dr = 0.0;
        for j in 0..n {
            let r = (aty[j] + self.c[j] * tau) / self.e[j];
            dr += r * r;
        }
        let dual = dr.sqrt() / (tau * self.sc) / (1.0 + self.norm_c);
        let scale = tau * self.sb * self.sc;
        let cx = self.c.dot(&u.rows(0, n)) / scale;
        let by = self.b.dot(&u.rows(n, m)) / scale;
        let gap = (cx + by).abs() / (1.0 + cx.abs() + by.abs());
        Residuals { primal, dual, gap }
    }

    fn finish(
        &self,
        p: &ConicProgram,
        status: SolverStatus,
        u: &DVector<f64>,
        v: &DVector<f64>,
        residuals: Residuals,
        iterations: usize,
    ) -> SolverResult {
        let (n, m) = (self.n, self.m);
        let tau = u[n + m];
        let x: Vec<f64> = (0..n).map(|j| self.e[j] * u[j] / (tau * self.sb)).collect();
        let y: Vec<f64> = (0..m).map(|i| self.d[i] * u[n + i] / (tau * self.sc)).collect();
        let s: Vec<f64> = (0..m).map(|i| v[n + i] / (self.d[i] * tau * self.sb)).collect();
        let objective = p.c.iter().zip(&x).map(|(c, x)| c * x).sum();
        SolverResult {
            status,
            x,
            y,
            s,
            objective,
            residuals,
            iterations,
        }
    }

    fn primal_certificate(&self, u: &DVector<f64>, iterations: usize) -> SolverResult {
        let (n, m) = (self.n, self.m);
        let raw: Vec<f64> = (0..m).map(|i| self.d[i] * u[n + i]).collect();
        let by = self.b.dot(&u.rows(n, m)) / self.sb;
        let y = raw.iter().map(|v| v / -by).collect();
        SolverResult {
            status: SolverStatus::PrimalInfeasible,
            x: vec![0.0; n],
            y,
            s: vec![0.0; m],
            objective: f64::INFINITY,
            residuals: Residuals::default(),
            iterations,
        }
    }

    fn dual_certificate(&self, u: &DVector<f64>, v: &DVector<f64>, iterations: usize) -> SolverResult {
        let (n, m) = (self.n, self.m);
        let cx = self.c.dot(&u.rows(0, n)) / self.sc;
        let x = (0..n).map(|j| self.e[j] * u[j] / -cx).collect();
        let s = (0..m).map(|i| v[n + i] / self.d[i] / -cx).collect();
        SolverResult {
            status: SolverStatus::DualInfeasible,
            x,
            y: vec![0.0; m],
            s,
            objective: f64::NEG_INFINITY,
            residuals: Residuals::default(),
            iterations,
        }
    }
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Ruiz equilibration with block-constant row factors on SOC/PSD segments.
fn ruiz(a: &mut DMatrix<f64>, d: &mut DVector<f64>, e: &mut DVector<f64>, cones: &[Cone]) {
    let (m, n) = a.shape();
    for _ in 0..RUIZ_PASSES {
        let mut row = vec![0.0f64; m];
        let mut col = vec![0.0f64; n];
        for j in 0..n {
            for i in 0..m {
                let v = a[(i, j)].abs();
                row[i] = row[i].max(v);
                col[j] = col[j].max(v);
            }
        }
        let mut off = 0;
        for cone in cones {
            let len = cone.len();
            if matches!(cone, Cone::Soc(_) | Cone::Psd(_)) && len > 0 {
                let mx = row[off..off + len].iter().cloned().fold(0.0, f64::max);
                row[off..off + len].iter_mut().for_each(|r| *r = mx);
            }
            off += len;
        }
        let fr: Vec<f64> = row.iter().map(|&r| factor(r)).collect();
        let fc: Vec<f64> = col.iter().map(|&c| factor(c)).collect();
        for j in 0..n {
            for i in 0..m {
                a[(i, j)] *= fr[i] * fc[j];
            }
        }
        for i in 0..m {
            d[i] = (d[i] * fr[i]).clamp(SCALE_MIN, SCALE_MAX);
        }
        for j in 0..n {
            e[j] = (e[j] * fc[j]).clamp(SCALE_MIN, SCALE_MAX);
        }
    }
}

fn factor(norm: f64) -> f64 {
    if norm > 0.0 {
        1.0 / norm.sqrt()
    } else {
        1.0
    }
}
