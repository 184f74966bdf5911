//! Seeded generation of feasible outer-inverse problems and perturbations.
//!
//! All randomness comes from [`ChaCha20Rng`], which produces the same stream
//! on every platform. Subspace perturbations rotate a single basis vector,
//! so the achieved gap is exactly `sin θ` and hypotheses can be targeted as
//! a fraction of their thresholds without rejection sampling.

use std::f64::consts::FRAC_PI_2;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hypothesis::HypothesisStatus;
use crate::numlin::{condition_number, dot, inverse, op_norm, pinv, rank, vec_norm, Matrix, ToleranceProfile, C64};
use crate::outer_inverse::{compute, existence, OuterInverseProblem};
use crate::perturbation::{PerturbationScenario, Theorem, Thresholds};
use crate::subspace::Subspace;

pub type GenRng = ChaCha20Rng;

/// Identifier of the generator algorithm, recorded in report headers.
pub const RNG_ID: &str = "chacha20/rand_chacha-0.3/seed_from_u64";

pub fn rng_from_seed(seed: u64) -> GenRng {
    ChaCha20Rng::seed_from_u64(seed)
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Per-trial seed: `splitmix64(seed XOR splitmix64(stream << 32 | index))`.
/// `stream` separates independent families of trials sharing one seed.
pub fn trial_seed(seed: u64, stream: u32, index: u32) -> u64 {
    splitmix64(seed ^ splitmix64(((stream as u64) << 32) | index as u64))
}

pub fn complex_gaussian(rows: usize, cols: usize, rng: &mut GenRng) -> Matrix {
    Matrix::from_fn(rows, cols, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        C64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
    })
}

/// Orthonormalizes columns in place with two passes of modified Gram-Schmidt.
/// Returns `None` if a column is (numerically) dependent on earlier ones.
fn gram_schmidt(cols: &mut [Vec<C64>]) -> Option<()> {
    for j in 0..cols.len() {
        let (done, rest) = cols.split_at_mut(j);
        let v = &mut rest[0];
        let before = vec_norm(v);
        for _ in 0..2 {
            for q in done.iter() {
                let c = dot(q, v);
                for (x, y) in v.iter_mut().zip(q) {
                    *x -= c * y;
                }
            }
        }
        let r = vec_norm(v);
        if r.is_nan() || r <= 1e-8 * before {
            return None;
        }
        v.iter_mut().for_each(|x| *x /= r);
    }
    Some(())
}

/// Random `ambient x dim` matrix with orthonormal columns (Gram-Schmidt QR
/// of a complex Gaussian matrix).
pub fn random_orthonormal(ambient: usize, dim: usize, rng: &mut GenRng) -> Matrix {
    assert!(dim <= ambient, "dim {dim} exceeds ambient {ambient}");
    loop {
        let g = complex_gaussian(ambient, dim, rng);
        let mut cols: Vec<Vec<C64>> = (0..dim).map(|j| g.column(j)).collect();
        if gram_schmidt(&mut cols).is_some() {
            return Matrix::from_columns(ambient, &cols);
        }
    }
}

pub fn random_subspace(ambient: usize, dim: usize, rng: &mut GenRng) -> Subspace {
    Subspace::from_orthonormal(random_orthonormal(ambient, dim, rng))
}

/// `U diag(σ) V*` with exactly `r` singular values drawn from `[0.5, 2]`.
pub fn random_matrix_with_rank(m: usize, n: usize, r: usize, rng: &mut GenRng) -> Matrix {
    assert!(r <= m.min(n), "rank {r} impossible for {m}x{n}");
    let u = random_orthonormal(m, r, rng);
    let v = random_orthonormal(n, r, rng);
    let mut us = u;
    for j in 0..r {
        let s: f64 = rng.gen_range(0.5..=2.0);
        for i in 0..m {
            us[(i, j)] *= s;
        }
    }
    &us * &v.adjoint()
}

/// Unit vector orthogonal to `v`.
fn random_unit_orthogonal_to(v: &Subspace, rng: &mut GenRng) -> Vec<C64> {
    let n = v.ambient_dim();
    let basis = v.basis();
    loop {
        let mut x = complex_gaussian(n, 1, rng).column(0);
        for _ in 0..2 {
            for j in 0..basis.cols() {
                let q = basis.column(j);
                let c = dot(&q, &x);
                for (a, b) in x.iter_mut().zip(&q) {
                    *a -= c * b;
                }
            }
        }
        let r = vec_norm(&x);
        if r > 1e-6 {
            return x.into_iter().map(|z| z / r).collect();
        }
    }
}

/// Rotates one basis vector of `V` by `theta` towards a random unit vector
/// of `V⊥`. The result is at gap exactly `sin θ` from `V`.
pub fn perturb_subspace_exact_gap(v: &Subspace, theta: f64, rng: &mut GenRng) -> Result<Subspace> {
    let (dim, ambient) = (v.dim(), v.ambient_dim());
    if dim == 0 || dim == ambient {
        return Err(Error::NoRoomToRotate { dim, ambient });
    }
    if !(0.0..=FRAC_PI_2).contains(&theta) {
        return Err(Error::Config(format!("rotation angle {theta} outside [0, π/2]")));
    }
    let w = random_unit_orthogonal_to(v, rng);
    let j = rng.gen_range(0..dim);
    let mut basis = v.basis().clone();
    let (c, s) = (theta.cos(), theta.sin());
    let rotated: Vec<C64> = basis.column(j).iter().zip(&w).map(|(a, b)| a * c + b * s).collect();
    basis.set_column(j, &rotated);
    Ok(Subspace::from_orthonormal(basis))
}

/// A random `{1,2}`-inverse `V (U*AV)⁻¹ U*` of `A` with `U`, `V` random
/// subspaces of dimension `rank(A)`.
pub fn random_inner12_inverse(a: &Matrix, rng: &mut GenRng, tol: &ToleranceProfile) -> Result<Matrix> {
    let (m, n) = a.shape();
    let r = rank(a, tol)?;
    for _ in 0..50 {
        let u = random_orthonormal(m, r, rng);
        let v = random_orthonormal(n, r, rng);
        let middle = &(&u.adjoint() * a) * &v;
        if condition_number(&middle)? > 1e6 {
            continue;
        }
        return Ok(&(&v * &inverse(&middle, tol)?) * &u.adjoint());
    }
    Err(Error::RetriesExhausted { retries: 50, counts: "ill-conditioned U*AV".into() })
}

/// `dA = tXA` or `dA = tAX` scaled to `‖dA‖ = target`; `Ā` keeps the rank
/// of `A` whenever `‖A⁺‖‖dA‖ < 1`.
pub fn stable_perturbation(a: &Matrix, target: f64, rng: &mut GenRng) -> Result<Matrix> {
    let (m, n) = a.shape();
    let dir = if rng.gen_bool(0.5) { &complex_gaussian(m, m, rng) * a } else { a * &complex_gaussian(n, n, rng) };
    scale_to_norm(&dir, target)
}

/// Stable part plus a rank-one component mapping `N(A)` into `R(A)⊥`, scaled
/// to `‖dA‖ = target`. Requires `A` rank deficient in both directions.
pub fn rank_jump_perturbation(a: &Matrix, target: f64, rng: &mut GenRng, tol: &ToleranceProfile) -> Result<Matrix> {
    let range_perp = Subspace::range_of(a, tol)?.orthogonal_complement()?;
    let kernel = Subspace::kernel_of(a, tol)?;
    if range_perp.dim() == 0 || kernel.dim() == 0 {
        return Err(Error::Precondition("rank jump needs nontrivial N(A) and R(A)⊥".into()));
    }
    let pick = |s: &Subspace, rng: &mut GenRng| {
        let c = complex_gaussian(s.dim(), 1, rng);
        let v = s.basis() * &c;
        let r = vec_norm(v.as_slice());
        v.scale_real(1.0 / r)
    };
    let u = pick(&range_perp, rng);
    let v = pick(&kernel, rng);
    let jump = &u * &v.adjoint();
    let stable = stable_perturbation(a, 1.0, rng)?;
    let weight: f64 = rng.gen_range(0.2..=1.0);
    scale_to_norm(&(&stable.scale_real(1.0 - weight) + &jump.scale_real(weight)), target)
}

fn scale_to_norm(dir: &Matrix, target: f64) -> Result<Matrix> {
    let norm = op_norm(dir)?;
    if target == 0.0 || norm == 0.0 {
        return Ok(Matrix::zeros(dir.rows(), dir.cols()));
    }
    Ok(dir.scale_real(target / norm))
}

/// A dimension fixed in the configuration or drawn per instance from an
/// inclusive range.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum DimChoice {
    Fixed(usize),
    Range([usize; 2]),
}

impl DimChoice {
    fn draw(&self, rng: &mut GenRng) -> usize {
        match *self {
            DimChoice::Fixed(d) => d,
            DimChoice::Range([lo, hi]) => rng.gen_range(lo..=hi),
        }
    }

    fn bounds(&self) -> (usize, usize) {
        match *self {
            DimChoice::Fixed(d) => (d, d),
            DimChoice::Range([lo, hi]) => (lo, hi),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GenConfig {
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_dim")]
    pub m: DimChoice,
    #[serde(default = "default_dim")]
    pub n: DimChoice,
    /// `None`: drawn uniformly from `1..=min(m, n)`.
    #[serde(default)]
    pub rank_a: Option<usize>,
    /// `None`: drawn uniformly from the dimensions that leave room to
    /// perturb both `T` and `S`.
    #[serde(default)]
    pub dim_t: Option<usize>,
    /// Target `δ̂(T, T′)` as a fraction of the theorem's threshold.
    #[serde(default = "default_ratio")]
    pub target_gap_t: f64,
    #[serde(default = "default_ratio")]
    pub target_gap_s: f64,
    #[serde(default = "default_ratio")]
    pub target_norm_e_ratio: f64,
    #[serde(default = "default_retries")]
    pub max_retries: usize,
    /// Base instances with `‖A‖‖A_{T,S}^{(2)}‖` above this are redrawn.
    #[serde(default = "default_max_kappa")]
    pub max_kappa: f64,
}

fn default_dim() -> DimChoice {
    DimChoice::Range([2, 12])
}

fn default_ratio() -> f64 {
    0.5
}

fn default_retries() -> usize {
    50
}

fn default_max_kappa() -> f64 {
    1e3
}

impl Default for GenConfig {
    fn default() -> Self {
        GenConfig {
            seed: 0,
            m: default_dim(),
            n: default_dim(),
            rank_a: None,
            dim_t: None,
            target_gap_t: default_ratio(),
            target_gap_s: default_ratio(),
            target_norm_e_ratio: default_ratio(),
            max_retries: default_retries(),
            max_kappa: default_max_kappa(),
        }
    }
}

impl GenConfig {
    pub fn validate(&self) -> Result<()> {
        for (name, d) in [("m", self.m), ("n", self.n)] {
            let (lo, hi) = d.bounds();
            if lo < 2 || lo > hi {
                return Err(Error::Config(format!(
                    "{name} must be a dimension >= 2 (or a range [lo, hi] with 2 <= lo <= hi)"
                )));
            }
        }
        for (name, r) in [
            ("target_gap_t", self.target_gap_t),
            ("target_gap_s", self.target_gap_s),
            ("target_norm_e_ratio", self.target_norm_e_ratio),
        ] {
            if !(0.0..1.0).contains(&r) {
                return Err(Error::Config(format!("{name} must lie in [0, 1), got {r}")));
            }
        }
        if self.max_retries == 0 {
            return Err(Error::Config("max_retries must be positive".into()));
        }
        if let (Some(r), DimChoice::Fixed(m), DimChoice::Fixed(n)) = (self.rank_a, self.m, self.n) {
            if r == 0 || r > m.min(n) {
                return Err(Error::Config(format!("rank_a {r} impossible for {m}x{n}")));
            }
            if let Some(t) = self.dim_t {
                if t == 0 || t > r || t >= m || t >= n {
                    return Err(Error::Config(format!(
                        "dim_t {t} must satisfy 1 <= dim_t <= rank_a and dim_t < min(m, n)"
                    )));
                }
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct GeneratedInstance {
    pub theorem: Theorem,
    pub scenario: PerturbationScenario,
    pub achieved_gap_t: f64,
    pub achieved_gap_s: f64,
    pub achieved_norm_e: f64,
    /// The gap and norm values that were aimed for.
    pub target_gap_t: f64,
    pub target_gap_s: f64,
    pub target_norm_e: f64,
    pub hypothesis_statuses: Vec<HypothesisStatus>,
    pub attempts: usize,
}

/// Hypotheses of `theorem` evaluated on `scenario`.
pub fn hypothesis_statuses(
    theorem: Theorem,
    scenario: &PerturbationScenario,
    th: &Thresholds,
) -> Vec<HypothesisStatus> {
    let name = |s: &str| format!("{theorem}.{s}");
    let (gt, gs, ne) = (scenario.measured_gap_t(), scenario.measured_gap_s(), scenario.norm_e());
    match theorem {
        Theorem::Lemma21 => vec![HypothesisStatus::new(name("norm_E"), th.norm_e(theorem).unwrap(), ne)],
        Theorem::Lemma31 | Theorem::Prop31 => {
            vec![HypothesisStatus::new(name("gap_T"), th.gap_t(theorem).unwrap(), gt)]
        }
        Theorem::Prop32 => vec![HypothesisStatus::new(name("gap_S"), th.gap_s(theorem).unwrap(), gs)],
        Theorem::Thm31 => vec![HypothesisStatus::new(name("max_gap"), th.gap_t(theorem).unwrap(), gt.max(gs))],
        Theorem::Lemma32 => vec![HypothesisStatus::new(name("norm_E"), th.norm_e(theorem).unwrap(), ne)],
        Theorem::Thm32 => vec![
            HypothesisStatus::new(name("max_gap"), th.gap_t(theorem).unwrap(), gt.max(gs)),
            HypothesisStatus::new(name("norm_E"), th.norm_e(theorem).unwrap(), ne),
        ],
    }
}

#[derive(Default)]
struct RejectCounts {
    existence: usize,
    conditioning: usize,
    hypothesis: usize,
}

/// Builds a feasible base problem and a perturbation aimed at the given
/// fractions of `theorem`'s hypothesis thresholds. Deterministic in
/// `config`.
pub fn generate(config: &GenConfig, theorem: Theorem, tol: &ToleranceProfile) -> Result<GeneratedInstance> {
    config.validate()?;
    let mut rng = rng_from_seed(config.seed);
    let mut rejects = RejectCounts::default();

    for attempt in 1..=config.max_retries {
        let m = config.m.draw(&mut rng);
        let n = config.n.draw(&mut rng);
        let r = match config.rank_a {
            Some(r) => r.min(m.min(n)),
            None => rng.gen_range(1..=m.min(n)),
        };
        let t_max = r.min(m - 1).min(n - 1);
        let dt = match config.dim_t {
            Some(d) => d.min(t_max),
            None => rng.gen_range(1..=t_max),
        };

        let a = random_matrix_with_rank(m, n, r, &mut rng);
        let t = random_subspace(n, dt, &mut rng);
        let s = random_subspace(m, m - dt, &mut rng);
        let problem = OuterInverseProblem::new(a, t, s)?;
        if !existence(&problem, tol)?.exists {
            rejects.existence += 1;
            continue;
        }
        let a_norm = op_norm(problem.a())?;
        let g_norm = op_norm(&compute(&problem, tol)?.g)?;
        if a_norm * g_norm > config.max_kappa {
            rejects.conditioning += 1;
            continue;
        }
        let th = Thresholds {
            a_norm,
            g_norm: if theorem == Theorem::Lemma21 { op_norm(&pinv(problem.a(), tol)?)? } else { g_norm },
        };

        let target_gap_t = th.gap_t(theorem).map_or(0.0, |x| config.target_gap_t * x);
        let target_gap_s = th.gap_s(theorem).map_or(0.0, |x| config.target_gap_s * x);
        let target_norm_e = th.norm_e(theorem).map_or(0.0, |x| config.target_norm_e_ratio * x);

        // Rotations and the E direction are drawn whenever the theorem perturbs
        // them, so instances at different ratios share the same random stream.
        let t_prime = if theorem.perturbs_t() {
            perturb_subspace_exact_gap(problem.t(), target_gap_t.asin(), &mut rng)?
        } else {
            problem.t().clone()
        };
        let s_prime = if theorem.perturbs_s() {
            perturb_subspace_exact_gap(problem.s(), target_gap_s.asin(), &mut rng)?
        } else {
            problem.s().clone()
        };
        let e = if theorem == Theorem::Lemma21 {
            stable_perturbation(problem.a(), target_norm_e, &mut rng)?
        } else if theorem.perturbs_a() {
            scale_to_norm(&complex_gaussian(m, n, &mut rng), target_norm_e)?
        } else {
            Matrix::zeros(m, n)
        };

        let scenario = PerturbationScenario::new(problem, t_prime, s_prime, e)?;
        let statuses = hypothesis_statuses(theorem, &scenario, &th);
        if !statuses.iter().all(HypothesisStatus::clearly_satisfied) {
            rejects.hypothesis += 1;
            continue;
        }
        return Ok(GeneratedInstance {
            theorem,
            achieved_gap_t: scenario.measured_gap_t(),
            achieved_gap_s: scenario.measured_gap_s(),
            achieved_norm_e: scenario.norm_e(),
            target_gap_t,
            target_gap_s,
            target_norm_e,
            scenario,
            hypothesis_statuses: statuses,
            attempts: attempt,
        });
    }
    Err(Error::RetriesExhausted {
        retries: config.max_retries,
        counts: format!(
            "existence failures: {}, conditioning rejects: {}, hypothesis rejects: {}",
            rejects.existence, rejects.conditioning, rejects.hypothesis
        ),
    })
}
