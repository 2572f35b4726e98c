//! Homogeneous self-dual interior-point iterations.

use super::cones::{self, circ, circ_solve, max_step, segments, set_identity, Scaling, Segment};
use super::kkt::Kkt;
use super::sparse::{dot, norm2, norm_inf, CscMatrix};
use super::{residuals, Cone, ConicProgram, ConicSolution, IterationRecord, Residuals, Settings, Status};

/// Near-optimal iterate kept for stagnation exits: `(score, x, y, z, τ, κ)`.
type Snapshot = (f64, Vec<f64>, Vec<f64>, Vec<f64>, f64, f64);

const STEP_FRACTION: f64 = 0.99;
const STALL_WINDOW: usize = 5;
/// Relative residual below which a refined KKT solve is accepted.
const KKT_ACCURACY: f64 = 1e-8;
const KKT_RETRIES: usize = 2;
const KKT_REG_GROWTH: f64 = 100.0;
const SCALE_MIN: f64 = 1e-4;
const SCALE_MAX: f64 = 1e4;

/// Solves `program`. Never panics on numerical trouble: failures are
/// reported through [`Status`].
pub fn solve(program: &ConicProgram, settings: &Settings) -> ConicSolution {
    let (m, n) = (program.num_rows(), program.num_cols());

    // Rows without entries: 0 = b_i.
    let counts = program.a.row_counts();
    if let Some(i) = (0..m).find(|&i| counts[i] == 0 && program.b[i] != 0.0) {
        let mut y = vec![0.0; m];
        y[i] = 1.0 / program.b[i];
        return ConicSolution {
            status: Status::PrimalInfeasible,
            reduced_accuracy: false,
            x: vec![0.0; n],
            y,
            z: vec![0.0; n],
            primal_objective: f64::NAN,
            dual_objective: f64::NAN,
            residuals: Residuals::default(),
            certificate_residual: Some(0.0),
            iterations: 0,
            log: Vec::new(),
        };
    }
    let kept: Vec<usize> = (0..m).filter(|&i| counts[i] > 0).collect();
    if kept.len() < m {
        let mut map = vec![usize::MAX; m];
        for (k, &i) in kept.iter().enumerate() {
            map[i] = k;
        }
        let trip: Vec<(usize, usize, f64)> = program.a.triplets().map(|(i, j, v)| (map[i], j, v)).collect();
        let reduced = ConicProgram {
            a: CscMatrix::from_triplets(kept.len(), n, &trip),
            b: kept.iter().map(|&i| program.b[i]).collect(),
            c: program.c.clone(),
            cones: program.cones.clone(),
        };
        let mut sol = solve(&reduced, settings);
        let mut y = vec![0.0; m];
        for (k, &i) in kept.iter().enumerate() {
            y[i] = sol.y[k];
        }
        sol.y = y;
        return sol;
    }

    let mut solver = Solver::new(program, settings);
    solver.run()
}

struct Solver<'a> {
    program: &'a ConicProgram,
    settings: Settings,
    segs: Vec<Segment>,
    degree: usize,
    a: CscMatrix,
    b: Vec<f64>,
    c: Vec<f64>,
    row_scale: Vec<f64>,
    col_scale: Vec<f64>,
    b_scale: f64,
    c_scale: f64,
}

struct Direction {
    dx: Vec<f64>,
    dy: Vec<f64>,
    dz: Vec<f64>,
    dtau: f64,
    dkappa: f64,
}

impl<'a> Solver<'a> {
    fn new(program: &'a ConicProgram, settings: &Settings) -> Self {
        let segs = segments(&program.cones);
        let (m, n) = (program.num_rows(), program.num_cols());
        let mut row_scale = vec![1.0; m];
        let mut col_scale = vec![1.0; n];
        let mut a = program.a.clone();
        for _ in 0..settings.equilibration_passes {
            let mut rmax = vec![0.0f64; m];
            let mut cmax = vec![0.0f64; n];
            for j in 0..n {
                for k in a.colptr[j]..a.colptr[j + 1] {
                    let v = a.nzval[k].abs();
                    rmax[a.rowval[k]] = rmax[a.rowval[k]].max(v);
                    cmax[j] = cmax[j].max(v);
                }
            }
            // Cone blocks other than the orthant must be scaled uniformly.
            for s in &segs {
                if let Cone::Soc(_) = s.cone {
                    let mx = cmax[s.range()].iter().fold(0.0f64, |a, &b| a.max(b));
                    cmax[s.range()].iter_mut().for_each(|v| *v = mx);
                }
            }
            let dr: Vec<f64> = rmax.iter().map(|&r| step_scale(r)).collect();
            let dc: Vec<f64> = cmax.iter().map(|&c| step_scale(c)).collect();
            for j in 0..n {
                for k in a.colptr[j]..a.colptr[j + 1] {
                    a.nzval[k] *= dr[a.rowval[k]] * dc[j];
                }
            }
            for i in 0..m {
                row_scale[i] *= dr[i];
            }
            for j in 0..n {
                col_scale[j] *= dc[j];
            }
        }
        let mut b: Vec<f64> = (0..m).map(|i| program.b[i] * row_scale[i]).collect();
        let mut c: Vec<f64> = (0..n).map(|j| program.c[j] * col_scale[j]).collect();
        let b_scale = 1.0 / norm_inf(&b).clamp(SCALE_MIN, SCALE_MAX);
        let c_scale = 1.0 / norm_inf(&c).clamp(SCALE_MIN, SCALE_MAX);
        b.iter_mut().for_each(|v| *v *= b_scale);
        c.iter_mut().for_each(|v| *v *= c_scale);
        Solver {
            program,
            settings: *settings,
            degree: cones::degree(&program.cones),
            segs,
            a,
            b,
            c,
            row_scale,
            col_scale,
            b_scale,
            c_scale,
        }
    }

    fn unscale(&self, x: &[f64], y: &[f64], z: &[f64], tau: f64) -> (Vec<f64>, Vec<f64>, Vec<f64>) {
        let xo = x
            .iter()
            .zip(&self.col_scale)
            .map(|(v, e)| v * e / (self.b_scale * tau))
            .collect();
        let yo = y
            .iter()
            .zip(&self.row_scale)
            .map(|(v, d)| v * d / (self.c_scale * tau))
            .collect();
        let zo = z
            .iter()
            .zip(&self.col_scale)
            .map(|(v, e)| v / (e * self.c_scale * tau))
            .collect();
        (xo, yo, zo)
    }

    fn run(&mut self) -> ConicSolution {
        let (m, n) = (self.a.nrows, self.a.ncols);
        let settings = self.settings;
        let mut x = vec![0.0; n];
        let mut z = vec![0.0; n];
        let mut y = vec![0.0; m];
        set_identity(&self.segs, &mut x);
        set_identity(&self.segs, &mut z);
        let (mut tau, mut kappa) = (1.0, 1.0);

        let mut log = Vec::new();
        let mut kkt = match Kkt::new(&self.a, &self.segs, settings.static_reg) {
            Ok(k) => k,
            Err(_) => return self.finish(Status::Numerical, &x, &y, &z, tau, kappa, 0, log, false),
        };
        debug_assert_eq!(kkt.num_primal(), n);

        let mut stall = 0usize;
        let mut last_step = 1.0;
        let mut last_sigma = 0.0;
        let mut rhs = vec![0.0; n + m];
        let mut sol1 = vec![0.0; n + m];
        let mut best: Option<Snapshot> = None;

        for iter in 0..=settings.max_iter {
            // Residuals of the embedding.
            let mut rp = vec![0.0; m];
            self.a.mul_vec(&x, &mut rp);
            for i in 0..m {
                rp[i] = self.b[i] * tau - rp[i];
            }
            let mut rd = vec![0.0; n];
            self.a.tmul_vec(&y, &mut rd);
            for j in 0..n {
                rd[j] += z[j] - self.c[j] * tau;
            }
            let cx = dot(&self.c, &x);
            let by = dot(&self.b, &y);
            let rg = kappa + cx - by;
            let mu = (cone_dot(&self.segs, &x, &z) + tau * kappa) / (self.degree as f64 + 1.0);

            let (xo, yo, zo) = self.unscale(&x, &y, &z, tau);
            let res = residuals(self.program, &xo, &yo, &zo);
            let pcost = self.program.objective(&xo);
            let dcost = dot(&self.program.b, &yo);
            log.push(IterationRecord {
                iter,
                primal_objective: pcost,
                dual_objective: dcost,
                residuals: res,
                mu,
                tau,
                kappa,
                sigma: last_sigma,
                step: last_step,
            });

            if res.primal <= settings.tol_feas && res.dual <= settings.tol_feas && res.gap <= settings.tol_gap {
                return self.finish(Status::Optimal, &x, &y, &z, tau, kappa, iter, log, false);
            }
            let near = res.primal <= 10.0 * settings.tol_feas
                && res.dual <= 10.0 * settings.tol_feas
                && res.gap <= 10.0 * settings.tol_gap;
            if near {
                let score = res.primal.max(res.dual).max(res.gap);
                if best.as_ref().is_none_or(|b| score < b.0) {
                    best = Some((score, x.clone(), y.clone(), z.clone(), tau, kappa));
                }
                stall += 1;
                if stall >= STALL_WINDOW {
                    return self.finish_best(best.take().unwrap(), iter, log);
                }
            } else {
                stall = 0;
            }
            if let Some(status) = self.infeasibility(&x, &y, &z, tau, kappa) {
                return self.finish(status, &x, &y, &z, tau, kappa, iter, log, false);
            }
            if iter == settings.max_iter {
                break;
            }
            if !(mu.is_finite() && tau.is_finite() && kappa.is_finite()) {
                return self.fail(best, &x, &y, &z, tau, kappa, iter, log);
            }

            // Scaling and factorization.
            let scalings: Vec<Scaling> = self
                .segs
                .iter()
                .map(|s| Scaling::compute(s.cone, &x[s.range()], &z[s.range()]))
                .collect();
            let mut lambda = vec![0.0; n];
            for (s, sc) in self.segs.iter().zip(&scalings) {
                sc.apply(&x[s.range()], &mut lambda[s.range()], false);
            }
            rhs[..n].copy_from_slice(&self.c);
            rhs[n..].copy_from_slice(&self.b);
            if self.factor_and_solve(&mut kkt, &scalings, &rhs, &mut sol1).is_none() {
                return self.fail(best, &x, &y, &z, tau, kappa, iter, log);
            }

            // Predictor.
            let mut ds = vec![0.0; n];
            for s in &self.segs {
                let r = s.range();
                circ(s.cone, &lambda[r.clone()], &lambda[r.clone()], &mut ds[r]);
            }
            ds.iter_mut().for_each(|v| *v = -*v);
            let dk = -tau * kappa;
            let aff = self.direction(
                &mut kkt, &scalings, &lambda, &ds, dk, &rp, &rd, rg, 1.0, &sol1, &x, tau, kappa, &mut rhs,
            );
            let alpha_aff = self.step_length(&x, &z, tau, kappa, &aff);
            let sigma = (1.0 - alpha_aff).powi(3).clamp(0.0, 1.0);

            // Corrector with second-order term.
            let mut wdx = vec![0.0; n];
            let mut wdz = vec![0.0; n];
            let mut tmp = vec![0.0; n];
            for (s, sc) in self.segs.iter().zip(&scalings) {
                let r = s.range();
                sc.apply(&aff.dx[r.clone()], &mut wdx[r.clone()], false);
                sc.apply(&aff.dz[r.clone()], &mut wdz[r.clone()], true);
                circ(s.cone, &wdz[r.clone()], &wdx[r.clone()], &mut tmp[r.clone()]);
                let mut e = vec![0.0; r.len()];
                set_identity(
                    &[Segment {
                        cone: s.cone,
                        offset: 0,
                    }],
                    &mut e,
                );
                for (k, i) in r.enumerate() {
                    ds[i] = ds[i] - tmp[i] + sigma * mu * e[k];
                }
            }
            let dk = -tau * kappa - aff.dtau * aff.dkappa + sigma * mu;
            let dir = self.direction(
                &mut kkt,
                &scalings,
                &lambda,
                &ds,
                dk,
                &rp,
                &rd,
                rg,
                1.0 - sigma,
                &sol1,
                &x,
                tau,
                kappa,
                &mut rhs,
            );
            let alpha = (STEP_FRACTION * self.step_length(&x, &z, tau, kappa, &dir)).min(1.0);
            if !(alpha.is_finite()) || alpha < 1e-10 {
                return self.fail(best, &x, &y, &z, tau, kappa, iter, log);
            }
            for j in 0..n {
                x[j] += alpha * dir.dx[j];
                z[j] += alpha * dir.dz[j];
            }
            for i in 0..m {
                y[i] += alpha * dir.dy[i];
            }
            tau += alpha * dir.dtau;
            kappa += alpha * dir.dkappa;
            last_step = alpha;
            last_sigma = sigma;
        }
        match best {
            Some(b) => {
                let iters = log.len().saturating_sub(1);
                self.finish_best(b, iters, log)
            }
            None => {
                let iters = log.len().saturating_sub(1);
                self.finish(Status::MaxIter, &x, &y, &z, tau, kappa, iters, log, false)
            }
        }
    }

    /// Factors the KKT matrix and solves for `rhs`. A factorization whose
    /// refined solve stays inaccurate is redone with a larger static
    /// regularization; the most accurate attempt is kept.
    fn factor_and_solve(&self, kkt: &mut Kkt, scalings: &[Scaling], rhs: &[f64], sol: &mut [f64]) -> Option<()> {
        let mut delta = kkt.base_delta();
        let mut best: Option<(f64, f64)> = None;
        for attempt in 0..=KKT_RETRIES {
            if attempt > 0 {
                delta *= KKT_REG_GROWTH;
            }
            if kkt.update_and_factor(&self.segs, scalings, delta).is_err() {
                continue;
            }
            let err = kkt.solve(rhs, sol);
            if err <= KKT_ACCURACY {
                return Some(());
            }
            if err.is_finite() && best.is_none_or(|b| err < b.0) {
                best = Some((err, delta));
            }
        }
        let (_, delta) = best?;
        kkt.update_and_factor(&self.segs, scalings, delta).ok()?;
        kkt.solve(rhs, sol);
        Some(())
    }

    /// Solves the Newton system for given complementarity targets `ds`
    /// (cones) and `dk` (tau-kappa), with residuals scaled by `res_scale`.
    #[allow(clippy::too_many_arguments)]
    fn direction(
        &self,
        kkt: &mut Kkt,
        scalings: &[Scaling],
        lambda: &[f64],
        ds: &[f64],
        dk: f64,
        rp: &[f64],
        rd: &[f64],
        rg: f64,
        res_scale: f64,
        sol1: &[f64],
        _x: &[f64],
        tau: f64,
        kappa: f64,
        rhs: &mut [f64],
    ) -> Direction {
        let (m, n) = (self.a.nrows, self.a.ncols);
        // q = λ \ ds ; Wq
        let mut q = vec![0.0; n];
        let mut wq = vec![0.0; n];
        for (s, sc) in self.segs.iter().zip(scalings) {
            let r = s.range();
            circ_solve(s.cone, &lambda[r.clone()], &ds[r.clone()], &mut q[r.clone()]);
            if let Cone::Free(_) = s.cone {
                continue;
            }
            sc.apply(&q[r.clone()], &mut wq[r.clone()], false);
        }
        for j in 0..n {
            rhs[j] = -(res_scale * rd[j] + wq[j]);
        }
        for i in 0..m {
            rhs[n + i] = res_scale * rp[i];
        }
        let mut sol2 = vec![0.0; n + m];
        kkt.solve(rhs, &mut sol2);
        let (x1, y1) = sol1.split_at(n);
        let (x2, y2) = sol2.split_at(n);
        let num = res_scale * rg + dk / tau - dot(&self.b, y2) + dot(&self.c, x2);
        let den = dot(&self.b, y1) - dot(&self.c, x1) + kappa / tau;
        let dtau = num / den;
        let dx: Vec<f64> = (0..n).map(|j| x2[j] + dtau * x1[j]).collect();
        let dy: Vec<f64> = (0..m).map(|i| y2[i] + dtau * y1[i]).collect();
        let mut dz = vec![0.0; n];
        let mut wdx = vec![0.0; n];
        for (s, sc) in self.segs.iter().zip(scalings) {
            if let Cone::Free(_) = s.cone {
                continue;
            }
            let r = s.range();
            // dz = W (q - W dx)
            sc.apply(&dx[r.clone()], &mut wdx[r.clone()], false);
            let diff: Vec<f64> = r.clone().map(|i| q[i] - wdx[i]).collect();
            sc.apply(&diff, &mut dz[r], false);
        }
        let dkappa = (dk - kappa * dtau) / tau;
        Direction {
            dx,
            dy,
            dz,
            dtau,
            dkappa,
        }
    }

    fn step_length(&self, x: &[f64], z: &[f64], tau: f64, kappa: f64, d: &Direction) -> f64 {
        let mut a: f64 = 1.0 / STEP_FRACTION;
        for s in &self.segs {
            let r = s.range();
            a = a.min(max_step(s.cone, &x[r.clone()], &d.dx[r.clone()], a));
            a = a.min(max_step(s.cone, &z[r.clone()], &d.dz[r], a));
        }
        if d.dtau < 0.0 {
            a = a.min(-tau / d.dtau);
        }
        if d.dkappa < 0.0 {
            a = a.min(-kappa / d.dkappa);
        }
        a.max(0.0)
    }

    /// Farkas-type certificates in original scaling.
    fn infeasibility(&self, x: &[f64], y: &[f64], z: &[f64], tau: f64, kappa: f64) -> Option<Status> {
        if kappa <= tau {
            return None;
        }
        let (xo, yo, zo) = self.unscale(x, y, z, 1.0);
        let (m, n) = (self.program.num_rows(), self.program.num_cols());
        let by = dot(&self.program.b, &yo);
        if by > 0.0 {
            let mut r = vec![0.0; n];
            self.program.a.tmul_vec(&yo, &mut r);
            for j in 0..n {
                r[j] += zo[j];
            }
            if norm2(&r) / by <= self.settings.tol_infeas {
                return Some(Status::PrimalInfeasible);
            }
        }
        let cx = dot(&self.program.c, &xo);
        if cx < 0.0 {
            let mut r = vec![0.0; m];
            self.program.a.mul_vec(&xo, &mut r);
            if norm2(&r) / (-cx) <= self.settings.tol_infeas {
                return Some(Status::DualInfeasible);
            }
        }
        None
    }

    #[allow(clippy::too_many_arguments)]
    fn fail(
        &self,
        best: Option<Snapshot>,
        x: &[f64],
        y: &[f64],
        z: &[f64],
        tau: f64,
        kappa: f64,
        iter: usize,
        log: Vec<IterationRecord>,
    ) -> ConicSolution {
        match best {
            Some(b) => self.finish_best(b, iter, log),
            None => self.finish(Status::Numerical, x, y, z, tau, kappa, iter, log, false),
        }
    }

    fn finish_best(
        &self,
        best: (f64, Vec<f64>, Vec<f64>, Vec<f64>, f64, f64),
        iter: usize,
        log: Vec<IterationRecord>,
    ) -> ConicSolution {
        let (_, x, y, z, tau, kappa) = best;
        self.finish(Status::Optimal, &x, &y, &z, tau, kappa, iter, log, true)
    }

    #[allow(clippy::too_many_arguments)]
    fn finish(
        &self,
        status: Status,
        x: &[f64],
        y: &[f64],
        z: &[f64],
        tau: f64,
        _kappa: f64,
        iterations: usize,
        log: Vec<IterationRecord>,
        reduced_accuracy: bool,
    ) -> ConicSolution {
        let program = self.program;
        match status {
            Status::PrimalInfeasible => {
                let (_, yo, zo) = self.unscale(x, y, z, 1.0);
                let by = dot(&program.b, &yo);
                let yo: Vec<f64> = yo.iter().map(|v| v / by).collect();
                let zo: Vec<f64> = zo.iter().map(|v| v / by).collect();
                let mut r = vec![0.0; program.num_cols()];
                program.a.tmul_vec(&yo, &mut r);
                for j in 0..r.len() {
                    r[j] += zo[j];
                }
                ConicSolution {
                    status,
                    reduced_accuracy,
                    x: vec![0.0; program.num_cols()],
                    y: yo,
                    z: zo,
                    primal_objective: f64::NAN,
                    dual_objective: f64::NAN,
                    residuals: Residuals::default(),
                    certificate_residual: Some(norm2(&r)),
                    iterations,
                    log,
                }
            }
            Status::DualInfeasible => {
                let (xo, _, _) = self.unscale(x, y, z, 1.0);
                let cx = dot(&program.c, &xo);
                let xo: Vec<f64> = xo.iter().map(|v| v / -cx).collect();
                let mut r = vec![0.0; program.num_rows()];
                program.a.mul_vec(&xo, &mut r);
                ConicSolution {
                    status,
                    reduced_accuracy,
                    x: xo,
                    y: vec![0.0; program.num_rows()],
                    z: vec![0.0; program.num_cols()],
                    primal_objective: f64::NAN,
                    dual_objective: f64::NAN,
                    residuals: Residuals::default(),
                    certificate_residual: Some(norm2(&r)),
                    iterations,
                    log,
                }
            }
            _ => {
                let (xo, yo, zo) = self.unscale(x, y, z, tau);
                let res = residuals(program, &xo, &yo, &zo);
                ConicSolution {
                    status,
                    reduced_accuracy,
                    primal_objective: program.objective(&xo),
                    dual_objective: dot(&program.b, &yo),
                    x: xo,
                    y: yo,
                    z: zo,
                    residuals: res,
                    certificate_residual: None,
                    iterations,
                    log,
                }
            }
        }
    }
}

fn step_scale(norm: f64) -> f64 {
    if norm > 0.0 {
        (1.0 / norm.sqrt()).clamp(SCALE_MIN, SCALE_MAX)
    } else {
        1.0
    }
}

fn cone_dot(segs: &[Segment], x: &[f64], z: &[f64]) -> f64 {
    segs.iter()
        .filter(|s| !matches!(s.cone, Cone::Free(_)))
        .map(|s| dot(&x[s.range()], &z[s.range()]))
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::conic::{cone_violation, dual_cone_violation};

    fn program(
        rows: usize,
        cols: usize,
        t: &[(usize, usize, f64)],
        b: Vec<f64>,
        c: Vec<f64>,
        cones: Vec<Cone>,
    ) -> ConicProgram {
        ConicProgram::new(CscMatrix::from_triplets(rows, cols, t), b, c, cones).unwrap()
    }

    #[test]
    fn soc_toy() {
        let p = program(
            2,
            3,
            &[(0, 1, 1.0), (1, 2, 1.0)],
            vec![3.0, 4.0],
            vec![1.0, 0.0, 0.0],
            vec![Cone::Soc(3)],
        );
        let s = solve(&p, &Settings::default());
        assert_eq!(s.status, Status::Optimal);
        assert!((s.primal_objective - 5.0).abs() < 1e-8, "{}", s.primal_objective);
        assert!(cone_violation(&p.cones, &s.x) <= 1e-9);
        assert!(dual_cone_violation(&p.cones, &s.z) <= 1e-9);
    }

    #[test]
    fn lp_toy() {
        let p = program(
            1,
            2,
            &[(0, 0, 1.0), (0, 1, 1.0)],
            vec![1.0],
            vec![1.0, 1.0],
            vec![Cone::NonNeg(2)],
        );
        let s = solve(&p, &Settings::default());
        assert_eq!(s.status, Status::Optimal);
        assert!((s.primal_objective - 1.0).abs() < 1e-8);
    }

    #[test]
    fn free_variables() {
        // min x0 + 2 x1 with x0 free, x1 >= 0, x0 - x1 = -1, x0 + x1 = 3 -> x = (1, 2), obj 5
        let p = program(
            2,
            2,
            &[(0, 0, 1.0), (0, 1, -1.0), (1, 0, 1.0), (1, 1, 1.0)],
            vec![-1.0, 3.0],
            vec![1.0, 2.0],
            vec![Cone::Free(1), Cone::NonNeg(1)],
        );
        let s = solve(&p, &Settings::default());
        assert_eq!(s.status, Status::Optimal);
        assert!((s.primal_objective - 5.0).abs() < 1e-7);
    }

    #[test]
    fn empty_row_infeasible() {
        let p = program(1, 1, &[], vec![1.0], vec![0.0], vec![Cone::NonNeg(1)]);
        let s = solve(&p, &Settings::default());
        assert_eq!(s.status, Status::PrimalInfeasible);
    }

    #[test]
    fn detects_primal_infeasibility() {
        // x >= 0, x1 + x2 = -1
        let p = program(
            1,
            2,
            &[(0, 0, 1.0), (0, 1, 1.0)],
            vec![-1.0],
            vec![1.0, 1.0],
            vec![Cone::NonNeg(2)],
        );
        let s = solve(&p, &Settings::default());
        assert_eq!(s.status, Status::PrimalInfeasible);
        assert!(s.certificate_residual.unwrap() <= 1e-8);
    }

    #[test]
    fn detects_dual_infeasibility() {
        // min -x1 s.t. x1 - x2 = 0, x >= 0 (unbounded)
        let p = program(
            1,
            2,
            &[(0, 0, 1.0), (0, 1, -1.0)],
            vec![0.0],
            vec![-1.0, 0.0],
            vec![Cone::NonNeg(2)],
        );
        let s = solve(&p, &Settings::default());
        assert_eq!(s.status, Status::DualInfeasible);
    }

    #[test]
    fn deterministic() {
        let p = program(
            2,
            3,
            &[(0, 1, 1.0), (1, 2, 1.0), (0, 0, 0.5)],
            vec![3.0, 4.0],
            vec![1.0, 0.2, 0.0],
            vec![Cone::Soc(3)],
        );
        let a = solve(&p, &Settings::default());
        let b = solve(&p, &Settings::default());
        assert_eq!(a.iterations, b.iterations);
        assert!(a.x.iter().zip(&b.x).all(|(u, v)| u.to_bits() == v.to_bits()));
    }
}
