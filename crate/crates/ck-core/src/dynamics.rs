//! Dynamics of the contracted systems: harmonic oscillation on the base,
//! free motion on fibers, the trajectory families that fill a band, an
//! elliptic cylinder, or a 3D region, and a numeric check that the action
//! splits exactly into base and fiber parts at small parameter values.
//!
//! Oscillating coordinates obey `m*q'' = -2*gamma*q` (the potential is
//! `gamma*q^2`, hence the factor 2), so `omega = sqrt(2*gamma/m)`. The
//! integrator is velocity Verlet with a fixed step: symplectic, second
//! order, and stable for `h*omega < 2`.

use core::fmt;

use alloc::vec;
use alloc::vec::Vec;

use crate::expr::{plane_action, plane_embedding, Coord, EvalEnv, Symbol};

#[derive(Clone, Debug, PartialEq)]
pub enum DynamicsError {
    /// `h*omega >= 2`: velocity Verlet is unstable for the oscillator.
    InvalidStep { h_omega: f64 },
    /// A run parameter is out of range (nonpositive mass, coupling, or
    /// step; zero steps; non-finite values).
    InvalidRun(&'static str),
    /// Initial conditions do not match the system kind.
    IcDimension { expected: usize, got: usize },
    /// A family specification is out of range.
    InvalidFamily(&'static str),
}

impl fmt::Display for DynamicsError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DynamicsError::InvalidStep { h_omega } => {
                write!(f, "unstable step: h*omega = {h_omega} >= 2")
            }
            DynamicsError::InvalidRun(msg) => write!(f, "invalid run: {msg}"),
            DynamicsError::IcDimension { expected, got } => {
                write!(f, "initial conditions for {expected} coordinate(s) required, got {got}")
            }
            DynamicsError::InvalidFamily(msg) => write!(f, "invalid family: {msg}"),
        }
    }
}

impl core::error::Error for DynamicsError {}

/// Evolution parameter label. The base runs on `t`; each fiber has its own
/// independent "time". There is no conversion between clocks.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Clock {
    T,
    TTilde,
    THat,
}

impl Clock {
    pub fn label(self) -> &'static str {
        match self {
            Clock::T => "t",
            Clock::TTilde => "t_tilde",
            Clock::THat => "t_hat",
        }
    }

    pub fn from_label(s: &str) -> Option<Clock> {
        match s {
            "t" => Some(Clock::T),
            "t_tilde" => Some(Clock::TTilde),
            "t_hat" => Some(Clock::THat),
            _ => None,
        }
    }
}

impl fmt::Display for Clock {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// Which contracted system is being integrated.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Kind {
    /// One oscillating coordinate (the base of a fibered plane or space).
    Base1d,
    /// Two oscillating coordinates (isotropic plane oscillator).
    Base2d,
    /// One free coordinate on a fiber; the payload names the output column.
    FiberFree(Coord),
    /// Plane oscillator at signature -1. The equations of motion match
    /// `Base2d` (the sign flip enters kinetic and potential terms alike);
    /// only the energy bookkeeping differs, weighting the y terms by -1.
    MinkowskiPlane,
}

impl Kind {
    pub fn dim(self) -> usize {
        match self {
            Kind::Base1d | Kind::FiberFree(_) => 1,
            Kind::Base2d | Kind::MinkowskiPlane => 2,
        }
    }

    pub fn coords(self) -> Vec<Coord> {
        match self {
            Kind::Base1d => vec![Coord::X],
            Kind::Base2d | Kind::MinkowskiPlane => vec![Coord::X, Coord::Y],
            Kind::FiberFree(c) => vec![c],
        }
    }

    fn oscillating(self) -> bool {
        !matches!(self, Kind::FiberFree(_))
    }
}

/// Parameters of one integration run.
#[derive(Clone, Debug, PartialEq)]
pub struct OscillatorRun {
    pub m: f64,
    pub gamma: f64,
    pub clock: Clock,
    /// One `(q, v)` pair per coordinate of the intended kind.
    pub ic: Vec<(f64, f64)>,
    pub h: f64,
    pub n: usize,
}

impl OscillatorRun {
    pub fn new(
        m: f64,
        gamma: f64,
        clock: Clock,
        ic: Vec<(f64, f64)>,
        h: f64,
        n: usize,
    ) -> Result<OscillatorRun, DynamicsError> {
        let run = OscillatorRun {
            m,
            gamma,
            clock,
            ic,
            h,
            n,
        };
        run.validate()?;
        Ok(run)
    }

    pub fn validate(&self) -> Result<(), DynamicsError> {
        if !(self.m > 0.0 && self.m.is_finite()) {
            return Err(DynamicsError::InvalidRun("mass must be positive and finite"));
        }
        if !(self.gamma > 0.0 && self.gamma.is_finite()) {
            return Err(DynamicsError::InvalidRun("coupling must be positive and finite"));
        }
        if !(self.h > 0.0 && self.h.is_finite()) {
            return Err(DynamicsError::InvalidRun("step size must be positive and finite"));
        }
        if self.n == 0 {
            return Err(DynamicsError::InvalidRun("step count must be at least 1"));
        }
        if self
            .ic
            .iter()
            .any(|(q, v)| !q.is_finite() || !v.is_finite())
        {
            return Err(DynamicsError::InvalidRun("initial conditions must be finite"));
        }
        Ok(())
    }

    /// Angular frequency of the oscillating coordinates.
    pub fn omega(&self) -> f64 {
        libm::sqrt(2.0 * self.gamma / self.m)
    }
}

/// Uniformly sampled solution curve.
#[derive(Clone, Debug, PartialEq)]
pub struct Trajectory {
    pub clock: Clock,
    pub h: f64,
    /// Output column labels, one per coordinate.
    pub coords: Vec<Coord>,
    pub samples: Vec<Sample>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Sample {
    pub t: f64,
    pub q: Vec<f64>,
    pub v: Vec<f64>,
}

impl Trajectory {
    pub fn dim(&self) -> usize {
        self.coords.len()
    }
}

/// Closed-form solution of the 1D base oscillator for the first coordinate
/// of the run: `x(t) = x0*cos(omega*t) + (vx0/omega)*sin(omega*t)`.
pub fn base_exact(run: &OscillatorRun, tq: f64) -> (f64, f64) {
    let omega = run.omega();
    let (x0, v0) = run.ic.first().copied().unwrap_or((0.0, 0.0));
    let (s, c) = (libm::sin(omega * tq), libm::cos(omega * tq));
    (x0 * c + v0 / omega * s, -x0 * omega * s + v0 * c)
}

/// Velocity-Verlet integration of the requested system.
pub fn integrate(run: &OscillatorRun, kind: Kind) -> Result<Trajectory, DynamicsError> {
    run.validate()?;
    if run.ic.len() != kind.dim() {
        return Err(DynamicsError::IcDimension {
            expected: kind.dim(),
            got: run.ic.len(),
        });
    }
    let h_omega = run.h * run.omega();
    if h_omega >= 2.0 {
        return Err(DynamicsError::InvalidStep { h_omega });
    }
    // Per-coordinate acceleration factor: a = -omega^2 * q, or free motion.
    let osc = kind.oscillating();
    let w2 = if osc { run.omega() * run.omega() } else { 0.0 };
    let accel = |q: f64| -w2 * q;

    let dim = kind.dim();
    let h = run.h;
    let mut q: Vec<f64> = run.ic.iter().map(|&(q, _)| q).collect();
    let mut v: Vec<f64> = run.ic.iter().map(|&(_, v)| v).collect();
    let mut a: Vec<f64> = q.iter().map(|&qi| accel(qi)).collect();
    let mut samples = Vec::with_capacity(run.n + 1);
    samples.push(Sample {
        t: 0.0,
        q: q.clone(),
        v: v.clone(),
    });
    for step in 1..=run.n {
        for i in 0..dim {
            q[i] += h * v[i] + 0.5 * h * h * a[i];
        }
        for i in 0..dim {
            let a_new = accel(q[i]);
            v[i] += 0.5 * h * (a[i] + a_new);
            a[i] = a_new;
        }
        samples.push(Sample {
            t: step as f64 * h,
            q: q.clone(),
            v: v.clone(),
        });
    }
    Ok(Trajectory {
        clock: run.clock,
        h,
        coords: kind.coords(),
        samples,
    })
}

/// First integral of the motion: kinetic plus potential per oscillating
/// coordinate, kinetic only for free fibers, indefinite (y-negated) for the
/// Minkowski plane.
pub fn energy(run: &OscillatorRun, q: &[f64], v: &[f64], kind: Kind) -> f64 {
    let half_m = 0.5 * run.m;
    let pot = |qi: f64| run.gamma * qi * qi;
    match kind {
        Kind::Base1d | Kind::Base2d => {
            let mut e = 0.0;
            for i in 0..q.len() {
                e += half_m * v[i] * v[i] + pot(q[i]);
            }
            e
        }
        Kind::FiberFree(_) => half_m * v[0] * v[0],
        Kind::MinkowskiPlane => {
            half_m * v[0] * v[0] + pot(q[0]) - half_m * v[1] * v[1] - pot(q[1])
        }
    }
}

/// Angular momentum `m*(x*vy - y*vx)` of a planar state.
pub fn angular_momentum(run: &OscillatorRun, q: &[f64], v: &[f64]) -> f64 {
    run.m * (q[0] * v[1] - q[1] * v[0])
}

/// One axis of a family grid: `count` evenly spaced values from `start` to
/// `stop` inclusive (`count == 1` pins the axis at `start`).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GridAxis {
    pub start: f64,
    pub stop: f64,
    pub count: usize,
}

impl GridAxis {
    pub fn fixed(value: f64) -> GridAxis {
        GridAxis {
            start: value,
            stop: value,
            count: 1,
        }
    }

    pub fn value(&self, i: usize) -> f64 {
        if self.count <= 1 {
            self.start
        } else {
            self.start + (self.stop - self.start) * (i as f64) / ((self.count - 1) as f64)
        }
    }

    pub fn values(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.count).map(|i| self.value(i))
    }

    fn validate(&self, name: &'static str) -> Result<(), DynamicsError> {
        if self.count == 0 {
            return Err(DynamicsError::InvalidFamily("grid axis needs at least one point"));
        }
        if !self.start.is_finite() || !self.stop.is_finite() {
            return Err(DynamicsError::InvalidFamily("grid bounds must be finite"));
        }
        let _ = name;
        Ok(())
    }

    /// Spacing between neighboring grid values (0 for a fixed axis).
    pub fn resolution(&self) -> f64 {
        if self.count <= 1 {
            0.0
        } else {
            ((self.stop - self.start) / ((self.count - 1) as f64)).abs()
        }
    }
}

/// Family description: base amplitude/phase plus the fiber integration
/// constants laid out on grids, and the clock horizon to integrate over.
#[derive(Clone, Debug, PartialEq)]
pub struct FamilySpec {
    pub amplitude: f64,
    pub phase: f64,
    pub u0: GridAxis,
    pub y0: GridAxis,
    pub w0: GridAxis,
    pub z0: GridAxis,
    pub horizon: f64,
}

impl FamilySpec {
    pub fn validate(&self) -> Result<(), DynamicsError> {
        if !(self.amplitude > 0.0 && self.amplitude.is_finite()) {
            return Err(DynamicsError::InvalidFamily("amplitude must be positive"));
        }
        if !self.phase.is_finite() {
            return Err(DynamicsError::InvalidFamily("phase must be finite"));
        }
        if !(self.horizon > 0.0 && self.horizon.is_finite()) {
            return Err(DynamicsError::InvalidFamily("horizon must be positive"));
        }
        self.u0.validate("u0")?;
        self.y0.validate("y0")?;
        self.w0.validate("w0")?;
        self.z0.validate("z0")?;
        Ok(())
    }

    fn steps(&self, h: f64) -> usize {
        let n = libm::round(self.horizon / h) as i64;
        n.max(1) as usize
    }
}

/// One member of a trajectory family.
#[derive(Clone, Debug, PartialEq)]
pub struct FamilyMember {
    /// Grid indices, one per varied constant, in axis order.
    pub indices: Vec<usize>,
    /// Named integration constants for this member.
    pub constants: Vec<(&'static str, f64)>,
    pub trajectory: Trajectory,
}

fn base_run_from_amplitude(
    spec: &FamilySpec,
    run: &OscillatorRun,
    n: usize,
) -> Result<OscillatorRun, DynamicsError> {
    let omega = run.omega();
    let (s, c) = (libm::sin(spec.phase), libm::cos(spec.phase));
    OscillatorRun::new(
        run.m,
        run.gamma,
        Clock::T,
        vec![(spec.amplitude * c, -spec.amplitude * omega * s)],
        run.h,
        n,
    )
}

fn fiber_line(
    run: &OscillatorRun,
    n: usize,
    ic: (f64, f64),
    clock: Clock,
    coord: Coord,
) -> Result<Trajectory, DynamicsError> {
    let fiber_run = OscillatorRun::new(run.m, run.gamma, clock, vec![ic], run.h, n)?;
    integrate(&fiber_run, Kind::FiberFree(coord))
}

/// Joins a base trajectory with fiber lines sample-by-sample. The clocks
/// are distinct labels, but every clock is sampled at the same steps, so
/// row `k` holds the base at `t = k*h` and each fiber at the same value of
/// its own clock. The merged trajectory is labeled with the base clock.
fn merge(base: &Trajectory, fibers: &[&Trajectory]) -> Trajectory {
    let mut coords = base.coords.clone();
    for f in fibers {
        coords.extend_from_slice(&f.coords);
    }
    let samples = base
        .samples
        .iter()
        .enumerate()
        .map(|(k, s)| {
            let mut q = s.q.clone();
            let mut v = s.v.clone();
            for f in fibers {
                q.extend_from_slice(&f.samples[k].q);
                v.extend_from_slice(&f.samples[k].v);
            }
            Sample { t: s.t, q, v }
        })
        .collect();
    Trajectory {
        clock: base.clock,
        h: base.h,
        coords,
        samples,
    }
}

/// Band family: base oscillation `x(t)` with amplitude `A`, fiber lines
/// `y = u0*t + y0` over the `(u0, y0)` grid. Every sample has `|x| <= A`
/// up to roundoff when the phase is 0 (the discrete invariant of velocity
/// Verlet peaks exactly at the turning point then).
pub fn family_band(
    spec: &FamilySpec,
    run: &OscillatorRun,
) -> Result<Vec<FamilyMember>, DynamicsError> {
    spec.validate()?;
    let n = spec.steps(run.h);
    let base = integrate(&base_run_from_amplitude(spec, run, n)?, Kind::Base1d)?;
    let mut members = Vec::with_capacity(spec.u0.count * spec.y0.count);
    for (i, u0) in spec.u0.values().enumerate() {
        for (j, y0) in spec.y0.values().enumerate() {
            let fiber = fiber_line(run, n, (y0, u0), Clock::TTilde, Coord::Y)?;
            members.push(FamilyMember {
                indices: vec![i, j],
                constants: vec![("u0", u0), ("y0", y0)],
                trajectory: merge(&base, &[&fiber]),
            });
        }
    }
    Ok(members)
}

/// Cylinder family: 2D base ellipse fixed by the run's initial conditions,
/// fiber lines `z = w0*t + z0` over the `(w0, z0)` grid.
pub fn family_cylinder(
    spec: &FamilySpec,
    run: &OscillatorRun,
) -> Result<Vec<FamilyMember>, DynamicsError> {
    spec.validate()?;
    if run.ic.len() != 2 {
        return Err(DynamicsError::IcDimension {
            expected: 2,
            got: run.ic.len(),
        });
    }
    let n = spec.steps(run.h);
    let base_run = OscillatorRun::new(run.m, run.gamma, Clock::T, run.ic.clone(), run.h, n)?;
    let base = integrate(&base_run, Kind::Base2d)?;
    let mut members = Vec::with_capacity(spec.w0.count * spec.z0.count);
    for (i, w0) in spec.w0.values().enumerate() {
        for (j, z0) in spec.z0.values().enumerate() {
            let fiber = fiber_line(run, n, (z0, w0), Clock::TTilde, Coord::Z)?;
            members.push(FamilyMember {
                indices: vec![i, j],
                constants: vec![("w0", w0), ("z0", z0)],
                trajectory: merge(&base, &[&fiber]),
            });
        }
    }
    Ok(members)
}

/// Three-parameter family in the doubly fibered space: base oscillation
/// `x(t)` with amplitude `A` and phase fixed to 0, first fiber
/// `y = u0*t_tilde + y0`, second fiber `z = w0*t_hat + z0`. The three
/// indices run over `(u0, y0, w0)`; `z0` is slaved to the `y0` index (its
/// axis must be fixed or have the same count as `y0`), which is the
/// redundancy-removing convention for the four fiber constants.
pub fn family_region3(
    spec: &FamilySpec,
    run: &OscillatorRun,
) -> Result<Vec<FamilyMember>, DynamicsError> {
    spec.validate()?;
    if spec.phase != 0.0 {
        return Err(DynamicsError::InvalidFamily(
            "the three-parameter family fixes the base phase to 0",
        ));
    }
    if spec.z0.count != 1 && spec.z0.count != spec.y0.count {
        return Err(DynamicsError::InvalidFamily(
            "z0 axis must be fixed or match the y0 axis count",
        ));
    }
    let n = spec.steps(run.h);
    let base = integrate(&base_run_from_amplitude(spec, run, n)?, Kind::Base1d)?;
    let mut members = Vec::with_capacity(spec.u0.count * spec.y0.count * spec.w0.count);
    for (i, u0) in spec.u0.values().enumerate() {
        for (j, y0) in spec.y0.values().enumerate() {
            let z0 = spec.z0.value(if spec.z0.count == 1 { 0 } else { j });
            for (k, w0) in spec.w0.values().enumerate() {
                let fy = fiber_line(run, n, (y0, u0), Clock::TTilde, Coord::Y)?;
                let fz = fiber_line(run, n, (z0, w0), Clock::THat, Coord::Z)?;
                members.push(FamilyMember {
                    indices: vec![i, j, k],
                    constants: vec![("u0", u0), ("y0", y0), ("w0", w0), ("z0", z0)],
                    trajectory: merge(&base, &[&fy, &fz]),
                });
            }
        }
    }
    Ok(members)
}

/// Polynomial test path `(x(t), y(t))` on `[t0, t1]`, coefficients in
/// ascending degree order.
#[derive(Clone, Debug, PartialEq)]
pub struct PolyPath {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub t0: f64,
    pub t1: f64,
}

impl PolyPath {
    fn eval(coeffs: &[f64], t: f64) -> f64 {
        let mut acc = 0.0;
        for &c in coeffs.iter().rev() {
            acc = acc * t + c;
        }
        acc
    }

    fn eval_deriv(coeffs: &[f64], t: f64) -> f64 {
        let mut acc = 0.0;
        for (k, &c) in coeffs.iter().enumerate().skip(1).rev() {
            acc = acc * t + c * k as f64;
        }
        acc
    }
}

/// Result of the action-split check: the action of the dressed plane
/// integrand along a path equals `S0 + eps^2 * S2` exactly up to roundoff,
/// because the integrand is linear in the parameter square.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ActionSplit {
    /// Base part: integrand evaluated with the parameter square at 0.
    pub s0: f64,
    /// Fiber weight: coefficient of the parameter square.
    pub s2: f64,
    /// Action at the requested epsilon.
    pub s_eps: f64,
    /// `|s_eps - s0 - eps^2*s2|`.
    pub defect: f64,
}

/// Gauss-Legendre 4-point nodes/weights on [-1, 1]; exact through degree 7,
/// more than enough for squared cubics.
const GL4: [(f64, f64); 4] = [
    (-0.861_136_311_594_052_6, 0.347_854_845_137_453_85),
    (-0.339_981_043_584_856_3, 0.652_145_154_862_546_2),
    (0.339_981_043_584_856_3, 0.652_145_154_862_546_2),
    (0.861_136_311_594_052_6, 0.347_854_845_137_453_85),
];

/// Quadrature of the dressed plane-oscillator integrand along `path`, three
/// ways: with the parameter at 0, extracting the coefficient of its square,
/// and at `eps`, reporting how far the split `S(eps) = S0 + eps^2*S2` is
/// from exact.
pub fn contraction_action_check(m: f64, gamma: f64, path: &PolyPath, eps: f64) -> ActionSplit {
    let integrand = plane_embedding().apply(&plane_action());
    let mut env = EvalEnv::new().with(Symbol::M, m).with(Symbol::Gamma, gamma);

    let subintervals = 8;
    let width = (path.t1 - path.t0) / subintervals as f64;
    let (mut s0, mut s1, mut s_eps) = (0.0, 0.0, 0.0);
    for k in 0..subintervals {
        let mid = path.t0 + (k as f64 + 0.5) * width;
        for (node, weight) in GL4 {
            let t = mid + 0.5 * width * node;
            let w = 0.5 * width * weight;
            env.set(Symbol::X, PolyPath::eval(&path.x, t));
            env.set(Symbol::Y, PolyPath::eval(&path.y, t));
            env.set(Symbol::Vx, PolyPath::eval_deriv(&path.x, t));
            env.set(Symbol::Vy, PolyPath::eval_deriv(&path.y, t));
            env.j2 = 0.0;
            s0 += w * integrand.eval(&env);
            env.j2 = 1.0;
            s1 += w * integrand.eval(&env);
            env.j2 = eps;
            s_eps += w * integrand.eval(&env);
        }
    }
    let s2 = s1 - s0;
    ActionSplit {
        s0,
        s2,
        s_eps,
        defect: (s_eps - (s0 + eps * eps * s2)).abs(),
    }
}
