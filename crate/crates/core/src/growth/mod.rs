//! Growth distance between two posed convex bodies.
//!
//! The solver brackets `β* = 1/α*`, the largest `β` with `β·p ∈ C`, between an
//! inner polyhedral approximation of `C` (a simplex LP over stored support
//! points, giving `βˡ`) and an outer one (the best supporting half-space seen
//! so far, giving `βᵘ`). Each iteration queries the support of `C` along the
//! current inner facet normal and stops once `βᵘ/βˡ - 1 <= eps_tol`.

mod warm;

pub use warm::WarmStartData;

use thiserror::Error;

use crate::geometry::{GeometryError, Vector};
use crate::minkowski::DifferencePair;
use crate::simplex::{simplex_solve, Basis, SimplexError, StoreEntry, VertexStore};

/// Largest primal constraint residual `‖Σν z - p‖` accepted by
/// [`SolverState::check_invariants`], in meters.
pub const PRIMAL_RESIDUAL_TOL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GrowthError {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("center points coincide")]
    DegenerateCenters,
    #[error("inradius bound must be positive")]
    InvalidInradius,
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error("numerical failure: {0}")]
    NumericalFailure(#[from] SimplexError),
}

/// Solver parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Config {
    /// Relative gap `βᵘ/βˡ - 1` at which the solve stops.
    pub eps_tol: f64,
    /// Iteration limit.
    pub k_max: usize,
    /// Initialization offset `ε` as a fraction of the inradius bound.
    pub eps_init_frac: f64,
    /// Store size cap in dimensions above 3, where nonbasic points are kept.
    pub inner_cap: usize,
    /// Rescale each new normal to unit ∞-norm.
    pub normalize_normal: bool,
}

impl Default for Config {
    fn default() -> Self {
        Self {
            eps_tol: 1.49e-8,
            k_max: 100,
            eps_init_frac: 1e-3,
            inner_cap: 8,
            normalize_normal: true,
        }
    }
}

impl Config {
    pub fn validate<const L: usize>(&self) -> Result<(), GrowthError> {
        let bad = |m: String| Err(GrowthError::InvalidConfig(m));
        if !(self.eps_tol > 0.0 && self.eps_tol.is_finite()) {
            return bad(format!("eps_tol must be positive, got {}", self.eps_tol));
        }
        if self.k_max == 0 {
            return bad("k_max must be positive".into());
        }
        if !(self.eps_init_frac > 0.0 && self.eps_init_frac < 1.0) {
            return bad(format!("eps_init_frac must lie in (0, 1), got {}", self.eps_init_frac));
        }
        if self.inner_cap < L {
            return bad(format!("inner_cap {} is below the dimension {L}", self.inner_cap));
        }
        Ok(())
    }
}

/// Best outer bound so far.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OuterState<const L: usize> {
    /// Iteration whose query produced the bound; `None` while `βᵘ = ∞`.
    pub best_index: Option<i64>,
    /// Query direction of that iteration.
    pub best_normal: Vector<L>,
    pub beta_upper: f64,
    /// `s[C¹](λ)` for the best normal.
    pub support1: f64,
    /// `s[C²](-λ)` for the best normal.
    pub support2: f64,
}

impl<const L: usize> OuterState<L> {
    fn empty() -> Self {
        Self {
            best_index: None,
            best_normal: Vector::<L>::zeros(),
            beta_upper: f64::INFINITY,
            support1: f64::NAN,
            support2: f64::NAN,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Converged,
    MaxIterations,
    CentersCoincide,
    NumericalFailure,
}

/// Output of [`growth_distance`].
#[derive(Debug, Clone, PartialEq)]
pub struct GrowthResult<const L: usize> {
    /// `1/βˡ`, an upper bound on `α*` within the final gap.
    pub alpha: f64,
    /// Point of body 1 in world frame.
    pub witness1: Vector<L>,
    /// Point of body 2 in world frame.
    pub witness2: Vector<L>,
    /// Outer normal with `s[C](λ)/⟨λ, p⟩ = βᵘ`.
    pub normal: Vector<L>,
    pub status: Status,
    pub iterations: usize,
    pub gap: f64,
    pub beta_lower: f64,
    pub beta_upper: f64,
    /// Warm-start points that entered the store.
    pub warm_points_used: usize,
    pub warm_start: WarmStartData<L>,
}

impl<const L: usize> GrowthResult<L> {
    /// The touching point `α(z¹ - p¹) + p¹` of the scaled bodies.
    pub fn contact_point(&self, world_center1: &Vector<L>) -> Vector<L> {
        world_center1 + (self.witness1 - world_center1) * self.alpha
    }
}

/// Per-iteration diagnostics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IterationTrace {
    pub k: usize,
    pub beta_lower: f64,
    pub beta_upper: f64,
    pub gap: f64,
}

/// Solver state between iterations.
#[derive(Debug, Clone)]
pub struct SolverState<'a, const L: usize> {
    pair: DifferencePair<'a, L>,
    config: Config,
    store: VertexStore<L>,
    basis: Basis<L>,
    outer: OuterState<L>,
    lambda: Vector<L>,
    k: usize,
    hints: [usize; 2],
    next_warm_index: i64,
}

/// Unit vectors spanning the orthogonal complement of the unit vector `u`.
fn orthogonal_complement<const L: usize>(u: &Vector<L>) -> Vec<Vector<L>> {
    match L {
        2 => {
            let mut v = Vector::<L>::zeros();
            v[0] = -u[1];
            v[1] = u[0];
            vec![v]
        }
        3 => {
            let u3 = nalgebra::Vector3::new(u[0], u[1], u[2]);
            let axis = u3.iamin();
            let e = nalgebra::Vector3::ith(axis, 1.0);
            let a = u3.cross(&e).normalize();
            let b = u3.cross(&a);
            [a, b].iter().map(|w| Vector::<L>::from_fn(|i, _| w[i])).collect()
        }
        _ => {
            // Householder reflector mapping e_0 onto ∓u; its other columns span u⊥
            let s = if u[0] >= 0.0 { 1.0 } else { -1.0 };
            let mut v = *u;
            v[0] += s;
            let vv = v.norm_squared();
            (1..L)
                .map(|j| {
                    let mut e = Vector::<L>::zeros();
                    e[j] = 1.0;
                    e - v * (2.0 * v[j] / vv)
                })
                .collect()
        }
    }
}

fn inf_normalized<const L: usize>(v: &Vector<L>) -> Vector<L> {
    v / v.amax()
}

/// Keeps the basis and, in dimensions above 3, the newest nonbasic points up
/// to `inner_cap` entries.
pub fn prune<const L: usize>(store: &mut VertexStore<L>, basis: &mut Basis<L>, inner_cap: usize) {
    let cap = if L <= 3 { L } else { inner_cap.max(L) };
    if store.len() <= cap {
        return;
    }
    if store.len() == L + 1 && cap == L {
        let out = (0..store.len()).find(|&i| !basis.contains(i)).expect("one nonbasic entry");
        store.remove(out);
        for s in basis.slots.iter_mut() {
            if *s > out {
                *s -= 1;
            }
        }
        return;
    }
    let mut nonbasic: Vec<usize> = (0..store.len()).filter(|&i| !basis.contains(i)).collect();
    nonbasic.sort_by_key(|&i| store[i].index);
    let drop = store.len() - cap;
    let mut keep: Vec<usize> = basis
        .slots
        .iter()
        .copied()
        .chain(nonbasic.into_iter().skip(drop))
        .collect();
    keep.sort_unstable();
    let map = store.retain_positions(&keep);
    for s in basis.slots.iter_mut() {
        *s = map[*s].expect("basis positions are retained");
    }
}

impl<'a, const L: usize> SolverState<'a, L> {
    /// Builds `L` points of norm at most `r̲` around the ray along `p`, all at
    /// height `ε` along `p̂`, so that `βˡ = ε/‖p‖` and `λ ∥ p`.
    pub fn initialize(pair: DifferencePair<'a, L>, config: &Config) -> Result<Self, GrowthError> {
        config.validate::<L>()?;
        let p = *pair.p();
        let pn = p.norm();
        if !(pn > 0.0) {
            return Err(GrowthError::DegenerateCenters);
        }
        let r = pair.r_lb();
        if !(r > 0.0) {
            return Err(GrowthError::InvalidInradius);
        }
        let l = L as f64;
        let eps = config.eps_init_frac * r;
        let k_off = (r * r - eps * eps).sqrt() * (1.0 / (l - 1.0)).min(1.0);
        let ph = p / pn;
        let perp = orthogonal_complement(&ph);

        let mut points = Vec::with_capacity(L);
        let sum: Vector<L> = perp.iter().map(|u| u * k_off).sum();
        points.push(ph * eps - sum);
        points.extend(perp.iter().map(|u| u * k_off + ph * eps));

        // split each point between the two inscribed balls
        let r1 = pair.center1.inradius_lb / r;
        let r2 = pair.center2.inradius_lb / r;
        let c1 = *pair.world_center1();
        let c2 = *pair.world_center2();
        let mut store = VertexStore::new();
        for (m, z) in points.into_iter().enumerate() {
            store.push(StoreEntry {
                index: -(m as i64),
                z,
                witness1: c1 + z * r1,
                witness2: c2 - z * r2,
            });
        }
        let slots: [usize; L] = std::array::from_fn(|i| i);
        let basis = Basis::from_slots(&store, slots, &p)?;
        let lambda = if config.normalize_normal {
            inf_normalized(&p)
        } else {
            basis.normal
        };
        Ok(Self {
            pair,
            config: *config,
            store,
            basis,
            outer: OuterState::empty(),
            lambda,
            k: 0,
            hints: [0, 0],
            next_warm_index: -(L as i64),
        })
    }

    /// One support query, outer update, simplex re-solve and prune.
    pub fn iterate(&mut self) -> Result<(), GrowthError> {
        let lambda = self.lambda;
        let s = self.pair.support_diff_hinted(&lambda, &mut self.hints)?;
        self.k += 1;
        let lp = lambda.dot(self.pair.p());
        let candidate = s.value / lp;
        if candidate < self.outer.beta_upper {
            self.outer = OuterState {
                best_index: Some(self.k as i64),
                best_normal: lambda,
                beta_upper: candidate,
                support1: lambda.dot(&s.witness1),
                support2: -lambda.dot(&s.witness2),
            };
        }
        self.store.push(StoreEntry {
            index: self.k as i64,
            z: s.point,
            witness1: s.witness1,
            witness2: s.witness2,
        });
        let (basis, _) = simplex_solve(&self.store, self.basis, self.pair.p())?;
        self.basis = basis;
        prune(&mut self.store, &mut self.basis, self.config.inner_cap);
        self.update_lambda();
        Ok(())
    }

    fn update_lambda(&mut self) {
        self.lambda = if self.config.normalize_normal {
            inf_normalized(&self.basis.normal)
        } else {
            self.basis.normal
        };
    }

    /// Adds re-posed witness pairs from a previous solve to the store, one at a
    /// time, re-solving after each. Points that break the solve are dropped.
    /// Returns the number of points kept.
    pub fn inject_warm_start(&mut self, warm: &WarmStartData<L>) -> usize {
        if !warm.matches(self.pair.shape1, self.pair.shape2) {
            return 0;
        }
        let p = *self.pair.p();
        let mut used = 0;
        for (b1, b2) in &warm.pairs {
            let w1 = self.pair.pose1.transform_point(b1);
            let w2 = self.pair.pose2.transform_point(b2);
            let index = self.next_warm_index;
            self.next_warm_index -= 1;
            self.store.push(StoreEntry {
                index,
                z: w1 - w2 + p,
                witness1: w1,
                witness2: w2,
            });
            match simplex_solve(&self.store, self.basis, &p) {
                Ok((basis, stats)) if stats.pivots > 0 => {
                    self.basis = basis;
                    prune(&mut self.store, &mut self.basis, self.config.inner_cap);
                    used += 1;
                }
                _ => self.store.truncate(self.store.len() - 1),
            }
        }
        self.update_lambda();
        used
    }

    pub fn pair(&self) -> &DifferencePair<'a, L> {
        &self.pair
    }

    pub fn store(&self) -> &VertexStore<L> {
        &self.store
    }

    pub fn basis(&self) -> &Basis<L> {
        &self.basis
    }

    pub fn outer(&self) -> &OuterState<L> {
        &self.outer
    }

    /// Direction of the next support query.
    pub fn lambda(&self) -> &Vector<L> {
        &self.lambda
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn beta_lower(&self) -> f64 {
        self.basis.beta_lower
    }

    pub fn beta_upper(&self) -> f64 {
        self.outer.beta_upper
    }

    /// `βᵘ/βˡ - 1`, infinite before the first query.
    pub fn gap(&self) -> f64 {
        self.outer.beta_upper / self.basis.beta_lower - 1.0
    }

    pub fn trace(&self) -> IterationTrace {
        IterationTrace {
            k: self.k,
            beta_lower: self.beta_lower(),
            beta_upper: self.beta_upper(),
            gap: self.gap(),
        }
    }

    /// Witness points `Σ μ*_m w_m` of the current basis.
    pub fn witnesses(&self) -> (Vector<L>, Vector<L>) {
        let mut w1 = Vector::<L>::zeros();
        let mut w2 = Vector::<L>::zeros();
        for (m, &s) in self.basis.slots.iter().enumerate() {
            let mu = self.basis.mu_star[m].max(0.0);
            w1 += self.store[s].witness1 * mu;
            w2 += self.store[s].witness2 * mu;
        }
        (w1, w2)
    }

    /// Checks the iteration-boundary invariants, reporting the first violation.
    pub fn check_invariants(&self) -> Result<(), String> {
        let p = self.pair.p();
        let b = &self.basis;
        if b.beta_lower > self.outer.beta_upper * (1.0 + 1e-9) {
            return Err(format!("βˡ {} exceeds βᵘ {}", b.beta_lower, self.outer.beta_upper));
        }
        let nu = b.nu_star();
        if let Some(v) = nu.iter().find(|&&v| v < -1e-12 * nu.amax().max(1.0)) {
            return Err(format!("negative basic coefficient {v}"));
        }
        let recon: Vector<L> = (0..L).map(|m| self.store[b.slots[m]].z * nu[m]).sum();
        if (recon - p).norm() > PRIMAL_RESIDUAL_TOL {
            return Err(format!("basis reconstructs {recon:?}, p is {p:?}"));
        }
        for &s in &b.slots {
            let e = &self.store[s];
            if (b.normal.dot(&e.z) - 1.0).abs() > 1e-9 {
                return Err(format!("⟨λ, z⟩ = {} on basis point {}", b.normal.dot(&e.z), e.index));
            }
            if (e.witness1 - e.witness2 + p - e.z).norm() > 1e-9 * (1.0 + e.z.norm()) {
                return Err(format!("witness identity broken at index {}", e.index));
            }
        }
        if !(self.lambda.dot(p) > 0.0) {
            return Err("⟨λ, p⟩ is not positive".into());
        }
        let (z1, z2) = self.witnesses();
        let alpha = 1.0 / b.beta_lower;
        let c1 = self.pair.world_center1();
        let c2 = self.pair.world_center2();
        let mismatch = ((z1 - c1) * alpha + c1 - (z2 - c2) * alpha - c2).norm();
        if mismatch > PRIMAL_RESIDUAL_TOL {
            return Err(format!("scaled witnesses differ by {mismatch}"));
        }
        Ok(())
    }

    fn warm_data(&self) -> WarmStartData<L> {
        WarmStartData::from_world(
            &self.pair,
            self.basis.slots.iter().map(|&s| (self.store[s].witness1, self.store[s].witness2)),
        )
    }

    /// Packages the current state.
    pub fn result(&self, status: Status, warm_points_used: usize) -> GrowthResult<L> {
        let (witness1, witness2) = self.witnesses();
        let normal = if self.outer.best_index.is_some() {
            self.outer.best_normal
        } else {
            self.lambda
        };
        GrowthResult {
            alpha: 1.0 / self.basis.beta_lower,
            witness1,
            witness2,
            normal,
            status,
            iterations: self.k,
            gap: self.gap(),
            beta_lower: self.basis.beta_lower,
            beta_upper: self.outer.beta_upper,
            warm_points_used,
            warm_start: self.warm_data(),
        }
    }
}

fn coincident_result<const L: usize>(pair: &DifferencePair<'_, L>) -> GrowthResult<L> {
    let c1 = *pair.world_center1();
    let c2 = *pair.world_center2();
    GrowthResult {
        alpha: 0.0,
        witness1: c1,
        witness2: c2,
        normal: Vector::<L>::zeros(),
        status: Status::CentersCoincide,
        iterations: 0,
        gap: 0.0,
        beta_lower: f64::INFINITY,
        beta_upper: f64::INFINITY,
        warm_points_used: 0,
        warm_start: WarmStartData::from_world(pair, std::iter::once((c1, c2))),
    }
}

/// Growth distance `α*` of the pair, to relative tolerance `config.eps_tol`.
pub fn growth_distance<const L: usize>(
    pair: &DifferencePair<'_, L>,
    config: &Config,
    warm: Option<&WarmStartData<L>>,
) -> Result<GrowthResult<L>, GrowthError> {
    growth_distance_traced(pair, config, warm, &mut |_| {})
}

/// [`growth_distance`] reporting the state after initialization and after
/// every iteration.
pub fn growth_distance_traced<const L: usize>(
    pair: &DifferencePair<'_, L>,
    config: &Config,
    warm: Option<&WarmStartData<L>>,
    trace: &mut dyn FnMut(&IterationTrace),
) -> Result<GrowthResult<L>, GrowthError> {
    config.validate::<L>()?;
    if *pair.p() == Vector::<L>::zeros() {
        return Ok(coincident_result(pair));
    }
    let mut state = SolverState::initialize(pair.clone(), config)?;
    let used = warm.map_or(0, |w| state.inject_warm_start(w));
    trace(&state.trace());
    while state.k < config.k_max {
        if let Err(e) = state.iterate() {
            return match e {
                GrowthError::NumericalFailure(_) => Ok(state.result(Status::NumericalFailure, used)),
                other => Err(other),
            };
        }
        trace(&state.trace());
        if used > 0 && state.beta_lower() > state.beta_upper() * (1.0 + 1e-9) {
            // warm points were not inside C; start over without them
            return growth_distance_traced(pair, config, None, trace);
        }
        if state.gap() <= config.eps_tol {
            return Ok(state.result(Status::Converged, used));
        }
    }
    Ok(state.result(Status::MaxIterations, used))
}

/// Outcome of [`collide`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Verdict<const L: usize> {
    /// `common_point` lies in both bodies.
    Colliding { common_point: Vector<L> },
    /// `⟨n, x⟩ <= offset` on body 1 and `⟨n, x⟩ >= offset` on body 2, `‖n‖ = 1`.
    Separated { plane_normal: Vector<L>, plane_offset: f64 },
    /// Iteration limit reached with `βˡ < 1 <= βᵘ`.
    Undecided,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CollisionResult<const L: usize> {
    pub verdict: Verdict<L>,
    pub iterations: usize,
    pub beta_lower: f64,
    pub beta_upper: f64,
}

impl<const L: usize> CollisionResult<L> {
    pub fn is_colliding(&self) -> bool {
        matches!(self.verdict, Verdict::Colliding { .. })
    }
}

fn collision_verdict<const L: usize>(state: &SolverState<'_, L>) -> Option<Verdict<L>> {
    if state.beta_lower() >= 1.0 {
        let (z1, _) = state.witnesses();
        let c1 = state.pair.world_center1();
        let alpha = 1.0 / state.beta_lower();
        return Some(Verdict::Colliding {
            common_point: c1 + (z1 - c1) * alpha,
        });
    }
    if state.beta_upper() < 1.0 {
        let o = &state.outer;
        let n = o.best_normal.norm();
        return Some(Verdict::Separated {
            plane_normal: o.best_normal / n,
            plane_offset: 0.5 * (o.support1 - o.support2) / n,
        });
    }
    None
}

/// Boolean collision query that stops as soon as `βˡ >= 1` or `βᵘ < 1`.
pub fn collide<const L: usize>(
    pair: &DifferencePair<'_, L>,
    config: &Config,
    warm: Option<&WarmStartData<L>>,
) -> Result<CollisionResult<L>, GrowthError> {
    config.validate::<L>()?;
    if *pair.p() == Vector::<L>::zeros() {
        return Ok(CollisionResult {
            verdict: Verdict::Colliding {
                common_point: *pair.world_center1(),
            },
            iterations: 0,
            beta_lower: f64::INFINITY,
            beta_upper: f64::INFINITY,
        });
    }
    let mut state = SolverState::initialize(pair.clone(), config)?;
    if let Some(w) = warm {
        state.inject_warm_start(w);
    }
    let finish = |state: &SolverState<'_, L>, verdict| CollisionResult {
        verdict,
        iterations: state.k,
        beta_lower: state.beta_lower(),
        beta_upper: state.beta_upper(),
    };
    loop {
        if let Some(v) = collision_verdict(&state) {
            return Ok(finish(&state, v));
        }
        if state.k >= config.k_max {
            return Ok(finish(&state, Verdict::Undecided));
        }
        state.iterate()?;
    }
}
