//! Nonlinear precoder: minimum-power data precoding under per-user SINR
//! floors and an eavesdropper leakage ceiling, cast as a real-valued
//! second-order cone program.
//!
//! With the AN precoder `V` fixed, the problem over the unnormalized data
//! precoders `W~ = [w~_1 ... w~_K]` is
//!
//! ```text
//! minimize    sum_k ||w~_k||^2
//! subject to  h_k^H w~_k >= sqrt(g_k) || [h_k^H W~_{-k}, ||h_k^H V||, s] ||
//!             ||H_e^H w~_k|| <= sqrt(g_e (||H_e^H V||_F^2 + s^2))
//!             Im(h_k^H w~_k) = 0
//! ```
//!
//! where `s` is the noise standard deviation. The SINR floors `g_k` and the
//! leakage ceiling `g_e` come from the eavesdropper-aware RZF design on the
//! same channel, which makes that design a feasible point.
//!
//! The conic form follows the `A x + s = b, s in K` convention. All channel
//! quantities are divided by the noise standard deviation before assembly;
//! the constraints are homogeneous in `(H, H_e, s)` so the optimal `W~` is
//! unchanged while the solver sees O(1) data.

use clarabel::algebra::CscMatrix;
use clarabel::solver::{
    DefaultSettingsBuilder, DefaultSolver, IPSolver, SolverStatus, SupportedConeT,
};
use num_complex::Complex64;

use super::conventional::default_beta;
use super::eveaware::{dominant_eve_direction, eveaware_precoders};
use super::{check_phi, normalize, LinearVariant, PrecoderSet, Scheme};
use crate::error::{Error, Result};
use crate::metrics::{eve_sinr, user_sinr};
use crate::numerics::{ensure_finite, CMatrix};

/// Accepted constraint violation, in units of the noise standard deviation.
pub const CONSTRAINT_TOL: f64 = 1e-6;

/// Per-user SINR floors and per-user eavesdropper SINR ceilings.
#[derive(Debug, Clone, PartialEq)]
pub struct SinrTargets {
    pub users: Vec<f64>,
    pub eve: Vec<f64>,
}

impl SinrTargets {
    /// Largest eavesdropper ceiling.
    pub fn eve_max(&self) -> f64 {
        self.eve.iter().copied().fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone)]
pub struct TargetSelection {
    pub targets: SinrTargets,
    /// Normalized eavesdropper-aware RZF precoders the targets were read from.
    pub baseline: PrecoderSet,
}

/// SINR floors and Eve ceilings achieved by a baseline design: `g_k` is the
/// user SINR and `g_e,k` the Eve MMSE SINR on stream `k`.
pub fn targets_from_baseline(
    h: &CMatrix,
    h_e: &CMatrix,
    baseline: &PrecoderSet,
    rho: f64,
) -> Result<SinrTargets> {
    let k = h.ncols();
    let mut users = Vec::with_capacity(k);
    let mut eve = Vec::with_capacity(k);
    for u in 0..k {
        let g = user_sinr(u, h, baseline, rho);
        if !(g > 0.0) || !g.is_finite() {
            return Err(Error::DegenerateTarget { user: u });
        }
        users.push(g);
        eve.push(eve_sinr(u, h_e, baseline, rho)?);
    }
    Ok(SinrTargets { users, eve })
}

/// Runs the full-CSI eavesdropper-aware RZF design (`beta = K / rho`) at the
/// same `phi` and reads the targets off it.
pub fn select_targets(h: &CMatrix, h_e: &CMatrix, phi: f64, rho: f64) -> Result<TargetSelection> {
    let dir = dominant_eve_direction(h_e)?;
    let baseline = eveaware_precoders(h, &dir, LinearVariant::Rzf, default_beta(h.ncols(), rho), phi)?;
    let targets = targets_from_baseline(h, h_e, &baseline, rho)?;
    Ok(TargetSelection { targets, baseline })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConeBlock {
    Zero(usize),
    SecondOrder(usize),
}

impl ConeBlock {
    pub fn dim(self) -> usize {
        match self {
            ConeBlock::Zero(d) | ConeBlock::SecondOrder(d) => d,
        }
    }
}

/// Layout of the real decision vector: per user, `N` real parts then `N`
/// imaginary parts, followed by the epigraph variable.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct VariableMap {
    pub n_antennas: usize,
    pub n_users: usize,
}

impl VariableMap {
    pub fn re(&self, user: usize, antenna: usize) -> usize {
        2 * self.n_antennas * user + antenna
    }

    pub fn im(&self, user: usize, antenna: usize) -> usize {
        2 * self.n_antennas * user + self.n_antennas + antenna
    }

    pub fn epigraph(&self) -> usize {
        2 * self.n_antennas * self.n_users
    }

    pub fn n_vars(&self) -> usize {
        self.epigraph() + 1
    }

    pub fn to_complex(&self, x: &[f64]) -> CMatrix {
        CMatrix::from_fn(self.n_antennas, self.n_users, |i, k| {
            Complex64::new(x[self.re(k, i)], x[self.im(k, i)])
        })
    }

    /// Real coordinates of `w`, with the epigraph variable set to `||w||_F`.
    pub fn to_real(&self, w: &CMatrix) -> Vec<f64> {
        let mut x = vec![0.0; self.n_vars()];
        for k in 0..self.n_users {
            for i in 0..self.n_antennas {
                x[self.re(k, i)] = w[(i, k)].re;
                x[self.im(k, i)] = w[(i, k)].im;
            }
        }
        x[self.epigraph()] = w.norm();
        x
    }
}

/// Per-user constraint values of the complex-form problem.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UserConstraintValues {
    /// `h_k^H w~_k`.
    pub gain: Complex64,
    /// `sqrt(g_k) || [h_k^H W~_{-k}, ||h_k^H V||, s] ||`.
    pub sinr_bound: f64,
    /// `||H_e^H w~_k||`.
    pub eve_leakage: f64,
    /// `sqrt(g_e (||H_e^H V||_F^2 + s^2))`.
    pub eve_bound: f64,
}

impl UserConstraintValues {
    /// Largest violation among the SINR cone, the leakage cone and the
    /// real-gain equality.
    pub fn violation(&self) -> f64 {
        let sinr = self.sinr_bound - self.gain.re;
        let eve = self.eve_leakage - self.eve_bound;
        sinr.max(eve).max(self.gain.im.abs()).max(0.0)
    }
}

/// Evaluates every constraint directly on complex precoders.
pub fn constraint_values(
    h: &CMatrix,
    h_e: &CMatrix,
    an: &CMatrix,
    targets: &SinrTargets,
    noise_std: f64,
    w: &CMatrix,
) -> Vec<UserConstraintValues> {
    let k = h.ncols();
    let cross = h.adjoint() * w;
    let an_seen_eve = (h_e.adjoint() * an).norm_squared();
    (0..k)
        .map(|u| {
            let an_seen = (an.adjoint() * h.column(u)).norm_squared();
            let interference: f64 = (0..k).filter(|&j| j != u).map(|j| cross[(u, j)].norm_sqr()).sum();
            UserConstraintValues {
                gain: cross[(u, u)],
                sinr_bound: (targets.users[u] * (interference + an_seen + noise_std * noise_std)).sqrt(),
                eve_leakage: (h_e.adjoint() * w.column(u)).norm(),
                eve_bound: (targets.eve[u] * (an_seen_eve + noise_std * noise_std)).sqrt(),
            }
        })
        .collect()
}

#[derive(Debug, Clone)]
pub struct ConicProblem {
    pub objective: Vec<f64>,
    pub n_rows: usize,
    /// Constraint matrix entries `(row, col, value)`.
    pub a_triplets: Vec<(usize, usize, f64)>,
    pub b: Vec<f64>,
    pub cones: Vec<ConeBlock>,
    pub variable_map: VariableMap,
    /// Factor applied to the channels and the noise before assembly.
    pub channel_scale: f64,
    scaled_users: CMatrix,
    scaled_eve: CMatrix,
    an: CMatrix,
    targets: SinrTargets,
}

impl ConicProblem {
    pub fn n_vars(&self) -> usize {
        self.variable_map.n_vars()
    }

    /// `b - A x`, the conic slack at `x`.
    pub fn slacks(&self, x: &[f64]) -> Vec<f64> {
        let mut s = self.b.clone();
        for &(r, c, v) in &self.a_triplets {
            s[r] -= v * x[c];
        }
        s
    }

    /// Constraint values in noise-normalized units (noise std = 1).
    pub fn constraint_values(&self, w: &CMatrix) -> Vec<UserConstraintValues> {
        constraint_values(&self.scaled_users, &self.scaled_eve, &self.an, &self.targets, 1.0, w)
    }

    pub fn max_violation(&self, w: &CMatrix) -> f64 {
        self.constraint_values(w)
            .iter()
            .map(UserConstraintValues::violation)
            .fold(0.0, f64::max)
    }

    fn user_channel(&self, k: usize) -> nalgebra::DVectorView<'_, Complex64> {
        self.scaled_users.column(k)
    }
}

struct Assembler {
    map: VariableMap,
    rows: usize,
    a: Vec<(usize, usize, f64)>,
    b: Vec<f64>,
}

impl Assembler {
    fn push_const(&mut self, value: f64) {
        self.b.push(value);
        self.rows += 1;
    }

    /// Pushes the row `s = scale * Re(g^H w_k)` (or the imaginary part).
    fn push_inner(&mut self, g: nalgebra::DVectorView<'_, Complex64>, user: usize, scale: f64, imag: bool) {
        let row = self.rows;
        for (i, z) in g.iter().enumerate() {
            // conj(g) w = (a x + b y) + j (a y - b x)
            let (cx, cy) = if imag { (-z.im, z.re) } else { (z.re, z.im) };
            if cx != 0.0 {
                self.a.push((row, self.map.re(user, i), -scale * cx));
            }
            if cy != 0.0 {
                self.a.push((row, self.map.im(user, i), -scale * cy));
            }
        }
        self.push_const(0.0);
    }
}

/// Builds the real conic program. `noise_std` is the noise standard deviation
/// on the same scale as the channels.
pub fn assemble_socp(
    h: &CMatrix,
    h_e: &CMatrix,
    an: &CMatrix,
    targets: &SinrTargets,
    noise_std: f64,
) -> Result<ConicProblem> {
    let (n, k) = h.shape();
    if h_e.nrows() != n || (an.ncols() > 0 && an.nrows() != n) {
        return Err(Error::DimensionMismatch(format!(
            "H {:?}, H_e {:?}, V {:?}",
            h.shape(),
            h_e.shape(),
            an.shape()
        )));
    }
    if targets.users.len() != k || targets.eve.len() != k {
        return Err(Error::DimensionMismatch(format!(
            "{} user and {} eavesdropper targets for {k} users",
            targets.users.len(),
            targets.eve.len()
        )));
    }
    if targets.users.iter().chain(&targets.eve).any(|g| !(*g >= 0.0) || !g.is_finite()) {
        return Err(Error::InvalidInput("SINR targets must be finite and non-negative".into()));
    }
    if !(noise_std >= 0.0) || !noise_std.is_finite() {
        return Err(Error::InvalidInput(format!("noise std {noise_std} must be finite and >= 0")));
    }
    ensure_finite(h, "user channel")?;
    ensure_finite(h_e, "eavesdropper channel")?;
    ensure_finite(an, "AN precoder")?;

    let scale = if noise_std > 0.0 {
        noise_std.recip()
    } else {
        let m = h.column_iter().map(|c| c.norm()).fold(0.0, f64::max);
        if m > 0.0 { m.recip() } else { 1.0 }
    };
    let cs = Complex64::new(scale, 0.0);
    let hs = h * cs;
    let hes = h_e * cs;
    let sigma = noise_std * scale;

    let map = VariableMap { n_antennas: n, n_users: k };
    let mut asm = Assembler { map, rows: 0, a: Vec::new(), b: Vec::new() };
    let mut cones = Vec::with_capacity(2 * k + 2);

    // Im(h_k^H w_k) = 0
    for u in 0..k {
        asm.push_inner(hs.column(u), u, 1.0, true);
    }
    cones.push(ConeBlock::Zero(k));

    // t >= ||x||
    let t = map.epigraph();
    asm.a.push((asm.rows, t, -1.0));
    asm.push_const(0.0);
    for u in 0..k {
        for i in 0..n {
            asm.a.push((asm.rows, map.re(u, i), -1.0));
            asm.push_const(0.0);
        }
        for i in 0..n {
            asm.a.push((asm.rows, map.im(u, i), -1.0));
            asm.push_const(0.0);
        }
    }
    cones.push(ConeBlock::SecondOrder(1 + 2 * n * k));

    // SINR floors
    for u in 0..k {
        let root = targets.users[u].sqrt();
        let hu = hs.column(u);
        asm.push_inner(hu, u, 1.0, false);
        for j in (0..k).filter(|&j| j != u) {
            asm.push_inner(hu, j, root, false);
            asm.push_inner(hu, j, root, true);
        }
        let an_seen = (an.adjoint() * hu).norm();
        asm.push_const(root * an_seen);
        asm.push_const(root * sigma);
        cones.push(ConeBlock::SecondOrder(2 * k + 1));
    }

    // eavesdropper leakage ceilings
    let an_eve = (hes.adjoint() * an).norm_squared();
    for u in 0..k {
        asm.push_const((targets.eve[u] * (an_eve + sigma * sigma)).sqrt());
        for col in hes.column_iter() {
            asm.push_inner(col, u, 1.0, false);
            asm.push_inner(col, u, 1.0, true);
        }
        cones.push(ConeBlock::SecondOrder(1 + 2 * h_e.ncols()));
    }

    let mut objective = vec![0.0; map.n_vars()];
    objective[t] = 1.0;

    debug_assert_eq!(asm.rows, cones.iter().map(|c| c.dim()).sum::<usize>());
    Ok(ConicProblem {
        objective,
        n_rows: asm.rows,
        a_triplets: asm.a,
        b: asm.b,
        cones,
        variable_map: map,
        channel_scale: scale,
        scaled_users: hs,
        scaled_eve: hes,
        an: an.clone(),
        targets: targets.clone(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SocpStatus {
    Optimal,
    Infeasible,
    NumericalFailure,
}

#[derive(Debug, Clone)]
pub struct SocpSolution {
    pub precoders: CMatrix,
    /// Total unnormalized data power `sum_k ||w~_k||^2`.
    pub objective_value: f64,
    pub status: SocpStatus,
    pub iterations: u32,
}

/// Interior-point solve of the conic program.
///
/// On success each `w~_k` is rotated by a unit phase so that `h_k^H w~_k` is
/// exactly real and non-negative; the rotation changes no constraint or
/// objective value. A solution whose direct constraint check exceeds
/// [`CONSTRAINT_TOL`] is reported as a numerical failure.
pub fn solve_socp(problem: &ConicProblem) -> SocpSolution {
    let n = problem.n_vars();
    let m = problem.n_rows;
    let (mut ri, mut ci, mut vi) = (Vec::new(), Vec::new(), Vec::new());
    for &(r, c, v) in &problem.a_triplets {
        ri.push(r);
        ci.push(c);
        vi.push(v);
    }
    let a = CscMatrix::new_from_triplets(m, n, ri, ci, vi);
    let p = CscMatrix::zeros((n, n));
    let cones: Vec<SupportedConeT<f64>> = problem
        .cones
        .iter()
        .map(|c| match *c {
            ConeBlock::Zero(d) => SupportedConeT::ZeroConeT(d),
            ConeBlock::SecondOrder(d) => SupportedConeT::SecondOrderConeT(d),
        })
        .collect();
    let settings = DefaultSettingsBuilder::default()
        .verbose(false)
        .max_iter(200)
        .tol_gap_abs(1e-9)
        .tol_gap_rel(1e-9)
        .tol_feas(1e-9)
        .direct_solve_method("faer".to_string())
        .build()
        .expect("static solver settings are valid");
    let mut solver = DefaultSolver::new(&p, &problem.objective, &a, &problem.b, &cones, settings);
    solver.solve();
    let sol = &solver.solution;
    let map = problem.variable_map;

    let status = match sol.status {
        SolverStatus::Solved => SocpStatus::Optimal,
        SolverStatus::PrimalInfeasible | SolverStatus::AlmostPrimalInfeasible => SocpStatus::Infeasible,
        _ => SocpStatus::NumericalFailure,
    };
    if status != SocpStatus::Optimal {
        return SocpSolution {
            precoders: CMatrix::zeros(map.n_antennas, map.n_users),
            objective_value: f64::NAN,
            status,
            iterations: sol.iterations,
        };
    }

    let mut w = map.to_complex(&sol.x);
    for k in 0..map.n_users {
        let g = problem.user_channel(k).dotc(&w.column(k));
        if g.norm() > 0.0 {
            let rot = g.conj() / g.norm();
            let mut col = w.column_mut(k);
            col *= rot;
        }
    }
    let status = if w.iter().all(|z| z.re.is_finite() && z.im.is_finite())
        && problem.max_violation(&w) <= CONSTRAINT_TOL
    {
        SocpStatus::Optimal
    } else {
        SocpStatus::NumericalFailure
    };
    SocpSolution {
        objective_value: w.norm_squared(),
        precoders: w,
        status,
        iterations: sol.iterations,
    }
}

#[derive(Debug, Clone)]
pub struct NonlinearOutcome {
    pub precoders: PrecoderSet,
    /// `None` when no program had to be solved (`phi = 0`).
    pub status: Option<SocpStatus>,
    pub targets: Option<SinrTargets>,
}

/// The complete nonlinear scheme for one channel realization and `phi`.
///
/// AN precoder: the eavesdropper-aware RZF AN column at power `1 - phi`.
/// Data precoders: the SOCP solution, renormalized to `phi / K` per column.
/// If the program is infeasible or the solver fails, the RZF baseline is
/// returned with `fallback` set.
pub fn nonlinear_precoder(h: &CMatrix, h_e: &CMatrix, phi: f64, rho: f64) -> Result<NonlinearOutcome> {
    check_phi(phi)?;
    let dir = dominant_eve_direction(h_e)?;
    let beta = default_beta(h.ncols(), rho);
    let mut baseline = eveaware_precoders(h, &dir, LinearVariant::Rzf, beta, phi)?;
    baseline.scheme = Scheme::NonlinearSocp;
    if phi == 0.0 {
        return Ok(NonlinearOutcome { precoders: baseline, status: None, targets: None });
    }
    let targets = targets_from_baseline(h, h_e, &baseline, rho)?;
    let problem = assemble_socp(h, h_e, &baseline.an, &targets, rho.recip().sqrt())?;
    let sol = solve_socp(&problem);
    let precoders = if sol.status == SocpStatus::Optimal {
        normalize(&sol.precoders, &baseline.an, phi, Scheme::NonlinearSocp)?
    } else {
        PrecoderSet { fallback: true, ..baseline }
    };
    Ok(NonlinearOutcome { precoders, status: Some(sol.status), targets: Some(targets) })
}
