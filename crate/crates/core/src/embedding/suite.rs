//! Randomized and exact checks of the embedding algebra, grouped by the
//! identity family they exercise. Used by the `check-algebra` command and the
//! acceptance tests.

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use serde::{Deserialize, Serialize};

use super::{
    gamma, gamma_n, inverse_gamma, pad_phase, phase_projector, phase_rep, phase_rep_closed_form,
    phase_unit, r_product, relocalise, PhaseRep, MAX_CLOSED_FORM_FOLDS,
};
use crate::error::Result;
use crate::matrix::{
    kron, permute_factors, trace_of_product, ComplexOperator, FactorShape, RealOperator,
};
use crate::random;

pub const GROUP_GAMMA: &str = "gamma homomorphism";
pub const GROUP_PHASE: &str = "phase-rep algebra";
pub const GROUP_GLOBAL: &str = "phase-rep globality";
pub const GROUP_CONTAMINATION: &str = "r-product contamination";
pub const GROUP_PROJECTOR: &str = "special-symmetric projector";
pub const GROUP_KRONECKER: &str = "r-product image";
pub const GROUP_RELOCALISE: &str = "relocalisation";

/// Deliberate corruption used to confirm that the suite catches errors.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum Fault {
    /// Adds `epsilon` to the top-right entry of `J⁽ⁿ⁾` before the
    /// phase-rep checks run.
    PerturbJ { n: usize, epsilon: f64 },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteConfig {
    /// Largest fold count for the phase-rep groups.
    pub max_fold: usize,
    /// Random complex pairs for the homomorphism group.
    pub pairs: usize,
    /// Random instances for the contamination group.
    pub instances: usize,
    pub seed: u64,
    /// Relative tolerance for randomized identities.
    pub tol: f64,
    /// Absolute tolerance for the exact phase-rep identities.
    pub exact_tol: f64,
    pub fault: Option<Fault>,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig {
            max_fold: 5,
            pairs: 50,
            instances: 100,
            seed: 0,
            tol: 1e-10,
            exact_tol: 1e-12,
            fault: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IdentityCheck {
    pub group: String,
    pub identity: String,
    /// Worst deviation seen over all instances.
    pub deviation: f64,
    pub bound: f64,
    pub instances: usize,
    pub passed: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AlgebraReport {
    pub config: SuiteConfig,
    pub checks: Vec<IdentityCheck>,
    pub passes: bool,
}

impl AlgebraReport {
    pub fn failures(&self) -> impl Iterator<Item = &IdentityCheck> {
        self.checks.iter().filter(|c| !c.passed)
    }

    pub fn group_passes(&self, group: &str) -> bool {
        self.checks
            .iter()
            .filter(|c| c.group == group)
            .all(|c| c.passed)
    }

    pub fn group_deviation(&self, group: &str) -> f64 {
        self.checks
            .iter()
            .filter(|c| c.group == group)
            .map(|c| c.deviation)
            .fold(0.0, f64::max)
    }
}

/// Accumulates worst-case deviations per identity.
struct Recorder {
    checks: Vec<IdentityCheck>,
}

impl Recorder {
    fn record(&mut self, group: &str, identity: &str, deviation: f64, bound: f64) {
        let deviation = if deviation.is_nan() {
            f64::INFINITY
        } else {
            deviation
        };
        match self
            .checks
            .iter_mut()
            .find(|c| c.group == group && c.identity == identity)
        {
            Some(c) => {
                c.deviation = c.deviation.max(deviation);
                c.instances += 1;
                c.passed = c.deviation <= c.bound;
            }
            None => self.checks.push(IdentityCheck {
                group: group.into(),
                identity: identity.into(),
                deviation,
                bound,
                instances: 1,
                passed: deviation <= bound,
            }),
        }
    }
}

/// `‖a − b‖_F / max(‖b‖_F, 1)`
fn rel(a: &RealOperator, b: &RealOperator) -> f64 {
    a.distance(b) / b.frobenius_norm().max(1.0)
}

fn rel_scalar(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1.0)
}

fn single(d: usize) -> FactorShape {
    FactorShape::new(vec![d]).expect("positive")
}

fn gamma_group(rng: &mut StdRng, cfg: &SuiteConfig, rec: &mut Recorder) -> Result<()> {
    let tol = cfg.tol;
    for _ in 0..cfg.pairs {
        let shape = single(rng.gen_range(1..=8));
        let a = random::complex_operator(rng, &shape);
        let b = random::complex_operator(rng, &shape);
        let (ga, gb) = (gamma(&a)?, gamma(&b)?);
        let (s, t) = (rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
        let lin = gamma(&(&a.scale_real(s) + &b.scale_real(t)))?;
        rec.record(
            GROUP_GAMMA,
            "real linearity",
            rel(&lin, &(&ga.scale_real(s) + &gb.scale_real(t))),
            tol,
        );
        rec.record(
            GROUP_GAMMA,
            "multiplicativity",
            rel(&gamma(&(&a * &b))?, &(&ga * &gb)),
            tol,
        );
        rec.record(
            GROUP_GAMMA,
            "adjoint to transpose",
            rel(&gamma(&a.adjoint())?, &ga.transpose()),
            tol,
        );

        let psd = &a * &a.adjoint();
        let min = gamma(&psd)?
            .hermitian_eigenvalues()
            .into_iter()
            .fold(f64::INFINITY, f64::min);
        rec.record(
            GROUP_GAMMA,
            "positivity",
            (-min).max(0.0) / psd.frobenius_norm().max(1.0),
            tol,
        );

        let (ha, hb) = (a.hermitian_part(), b.hermitian_part());
        let (gha, ghb) = (gamma(&ha)?, gamma(&hb)?);
        rec.record(
            GROUP_GAMMA,
            "trace rescaling",
            rel_scalar(ha.trace().re, 0.5 * gha.trace()),
            tol,
        );
        let lhs = trace_of_product(&ha.adjoint(), &hb).re;
        let rhs = 0.5 * trace_of_product(&gha.transpose(), &ghb);
        rec.record(
            GROUP_GAMMA,
            "isometry up to one half",
            rel_scalar(lhs, rhs),
            tol,
        );
    }
    Ok(())
}

fn perturbed(rep: &PhaseRep, fault: Option<Fault>) -> PhaseRep {
    let mut rep = rep.clone();
    if let Some(Fault::PerturbJ { n, epsilon }) = fault {
        if n == rep.n {
            let mut m = rep.j_mat.matrix().clone();
            let c = m.ncols() - 1;
            m[(0, c)] += epsilon;
            rep.j_mat = RealOperator::new(rep.j_mat.shape().clone(), m).expect("same size");
        }
    }
    rep
}

fn reps(cfg: &SuiteConfig) -> Result<Vec<PhaseRep>> {
    (1..=cfg.max_fold)
        .map(|n| -> Result<PhaseRep> { Ok(perturbed(phase_rep(n)?.as_ref(), cfg.fault)) })
        .collect()
}

fn idle(k: usize) -> Result<RealOperator> {
    RealOperator::identity(FactorShape::new(vec![2; k])?)
}

fn phase_group(
    rng: &mut StdRng,
    cfg: &SuiteConfig,
    reps: &[PhaseRep],
    rec: &mut Recorder,
) -> Result<()> {
    let tol = cfg.exact_tol;
    for rep in reps {
        let (i, j) = (&rep.i_mat, &rep.j_mat);
        rec.record(GROUP_PHASE, "I² = I", (i * i).max_abs_diff(i), tol);
        rec.record(
            GROUP_PHASE,
            "J² = −I",
            (j * j).max_abs_diff(&i.scale_real(-1.0)),
            tol,
        );
        rec.record(GROUP_PHASE, "IJ = J", (i * j).max_abs_diff(j), tol);
        rec.record(GROUP_PHASE, "JI = J", (j * i).max_abs_diff(j), tol);
        if rep.n <= MAX_CLOSED_FORM_FOLDS {
            let oracle = phase_rep_closed_form(rep.n)?;
            let dev = i
                .max_abs_diff(&oracle.i_mat)
                .max(j.max_abs_diff(&oracle.j_mat));
            rec.record(GROUP_PHASE, "recursion = closed form", dev, tol);
        }
        for _ in 0..10 {
            let p = random::permutation(rng, rep.n);
            let dev = permute_factors(i, &p)?
                .max_abs_diff(i)
                .max(permute_factors(j, &p)?.max_abs_diff(j));
            rec.record(GROUP_PHASE, "factor permutation invariance", dev, tol);
        }
        for k in 1..rep.n {
            let (a, b) = (&reps[k - 1], &reps[rep.n - k - 1]);
            let grouped = (&kron(&a.i_mat, &b.i_mat)? - &kron(&a.j_mat, &b.j_mat)?).scale_real(0.5);
            rec.record(
                GROUP_PHASE,
                "grouping I⁽ⁿ⁾ = ½(I⁽ᵏ⁾⊗I⁽ⁿ⁻ᵏ⁾ − J⁽ᵏ⁾⊗J⁽ⁿ⁻ᵏ⁾)",
                grouped.max_abs_diff(i),
                tol,
            );
        }
    }
    Ok(())
}

fn globality_group(cfg: &SuiteConfig, reps: &[PhaseRep], rec: &mut Recorder) -> Result<()> {
    let tol = cfg.exact_tol;
    for rep in reps.iter().take(4) {
        let n = rep.n;
        let (i, j) = (&rep.i_mat, &rep.j_mat);
        let minus_i = i.scale_real(-1.0);
        for k in 1..=n {
            let small = &reps[k - 1];
            let (ik, jk) = if k == n {
                (small.i_mat.clone(), small.j_mat.clone())
            } else {
                (
                    kron(&small.i_mat, &idle(n - k)?)?,
                    kron(&small.j_mat, &idle(n - k)?)?,
                )
            };
            let cases = [
                ("(I⁽ᵏ⁾⊗1)I⁽ⁿ⁾ = (I⁽ⁿ⁾)²", &ik, i, i * i),
                ("(J⁽ᵏ⁾⊗1)J⁽ⁿ⁾ = (J⁽ⁿ⁾)²", &jk, j, j * j),
                ("(I⁽ᵏ⁾⊗1)J⁽ⁿ⁾ = J⁽ⁿ⁾", &ik, j, j.clone()),
                ("(J⁽ᵏ⁾⊗1)I⁽ⁿ⁾ = J⁽ⁿ⁾", &jk, i, j.clone()),
            ];
            for (name, small, big, target) in cases {
                let dev = (small * big)
                    .max_abs_diff(&target)
                    .max((big * small).max_abs_diff(&target));
                rec.record(GROUP_GLOBAL, name, dev, tol);
            }
            rec.record(
                GROUP_GLOBAL,
                "(J⁽ⁿ⁾)² = −I⁽ⁿ⁾",
                (j * j).max_abs_diff(&minus_i),
                tol,
            );
        }
    }
    Ok(())
}

fn contamination_group(rng: &mut StdRng, cfg: &SuiteConfig, rec: &mut Recorder) -> Result<()> {
    let qubit = single(2);
    let pair = FactorShape::new(vec![2, 2])?;
    for _ in 0..cfg.instances {
        let a = gamma(&random::hermitian(rng, &qubit))?;
        let b = gamma(&random::hermitian(rng, &qubit))?;
        let l = random::real_symmetric(rng, &pair);
        let r = random::real_symmetric(rng, &pair);
        let ab_r = r_product(&a, 1, &b, 1)?;
        let ab_k = kron(&a, &b)?;
        let lr_k = kron(&l, &r)?;
        let lr_r = r_product(&l, 1, &r, 1)?;
        let reference = 0.5 * trace_of_product(&a, &l) * trace_of_product(&b, &r);
        let scale =
            a.frobenius_norm() * b.frobenius_norm() * l.frobenius_norm() * r.frobenius_norm();
        let dev = |x: f64| (x - reference).abs();
        rec.record(
            GROUP_CONTAMINATION,
            "Tr[(A⊗_R B)(L⊗_K R)] = ½Tr[AL]Tr[BR]",
            dev(trace_of_product(&ab_r, &lr_k)) / scale.max(1.0),
            cfg.tol,
        );
        rec.record(
            GROUP_CONTAMINATION,
            "Tr[(A⊗_R B)(L⊗_R R)] = ½Tr[AL]Tr[BR]",
            dev(trace_of_product(&ab_r, &lr_r)) / scale.max(1.0),
            cfg.tol,
        );
        rec.record(
            GROUP_CONTAMINATION,
            "½Tr[(A⊗_K B)(L⊗_K R)] = ½Tr[AL]Tr[BR]",
            dev(0.5 * trace_of_product(&ab_k, &lr_k)) / scale.max(1.0),
            cfg.tol,
        );
    }
    Ok(())
}

fn projector_group(rng: &mut StdRng, cfg: &SuiteConfig, rec: &mut Recorder) -> Result<()> {
    for n in 1..=cfg.max_fold.min(3) {
        let data = FactorShape::new(vec![2; n])?;
        for _ in 0..5 {
            let h = random::hermitian(rng, &data);
            let img = gamma_n(&h, n)?.op;
            let p = phase_projector(n, &data)?;
            let dev = rel(&(&p * &img), &img)
                .max(rel(&(&img * &p), &img))
                .max(rel(&(&(&p * &img) * &p), &img));
            rec.record(GROUP_PROJECTOR, "I⁽ⁿ⁾_d Ã = Ã I⁽ⁿ⁾_d = Ã", dev, cfg.tol);
            let jn = &phase_unit(n, &data)? * &img;
            for k in 1..=n {
                let jk = phase_rep(k)?.j_mat.clone();
                let padded = if k == n {
                    jk
                } else {
                    kron(&jk, &idle(n - k)?)?
                };
                let lhs = &pad_phase(&padded, n, &data)? * &img;
                rec.record(
                    GROUP_PROJECTOR,
                    "(J⁽ᵏ⁾⊗1)_d Ã = J⁽ⁿ⁾_d Ã",
                    rel(&lhs, &jn),
                    cfg.tol,
                );
            }
        }
    }
    Ok(())
}

fn kronecker_group(rng: &mut StdRng, cfg: &SuiteConfig, rec: &mut Recorder) -> Result<()> {
    for _ in 0..cfg.pairs.min(20) {
        let (da, db) = (rng.gen_range(1..=3), rng.gen_range(1..=3));
        let a = random::complex_operator(rng, &single(da));
        let b = random::complex_operator(rng, &single(db));
        let lhs = gamma_n(&kron(&a, &b)?, 2)?.op;
        let rhs = r_product(&gamma(&a)?, 1, &gamma(&b)?, 1)?;
        rec.record(
            GROUP_KRONECKER,
            "Γ̄⁽²⁾(A⊗B) = Γ(A) ⊗_R Γ(B)",
            rel(&lhs, &rhs),
            cfg.tol,
        );

        let h = random::hermitian(rng, &a.row_shape().concat(b.row_shape()));
        let back = inverse_gamma(&gamma_n(&h, 2)?.op, 2, cfg.tol)?;
        rec.record(
            GROUP_KRONECKER,
            "inverse round trip",
            rel(&back.real_part(), &h.real_part()).max(rel(&back.imag_part(), &h.imag_part())),
            cfg.tol,
        );
    }
    Ok(())
}

fn relocalise_group(rng: &mut StdRng, cfg: &SuiteConfig, rec: &mut Recorder) -> Result<()> {
    let data = FactorShape::new(vec![2, 2])?;
    let one: ComplexOperator = ComplexOperator::identity(data.clone())?;
    let id = RealOperator::identity(FactorShape::new(vec![2, 2, 2, 2])?)?;
    rec.record(
        GROUP_RELOCALISE,
        "τ∘Γ̄(1) = 1",
        rel(&relocalise(&gamma_n(&one, 2)?.op, 2, 1)?, &id),
        cfg.tol,
    );
    for _ in 0..10 {
        let a = gamma_n(&random::hermitian(rng, &data), 2)?.op;
        let b = gamma_n(&random::hermitian(rng, &data), 2)?.op;
        for slot in 1..=2 {
            let lhs = trace_of_product(&a, &b);
            let rhs = trace_of_product(&a, &relocalise(&b, 2, slot)?);
            rec.record(
                GROUP_RELOCALISE,
                "Tr[Γ̄(A)Γ̄(B)] = Tr[Γ̄(A)τ(Γ̄(B))]",
                rel_scalar(rhs, lhs),
                cfg.tol,
            );
        }
    }
    Ok(())
}

/// Runs every identity group. Errors only on internal shape problems; a
/// failing identity is reported in the returned report.
pub fn run_algebra_suite(cfg: &SuiteConfig) -> Result<AlgebraReport> {
    let mut rng = StdRng::seed_from_u64(cfg.seed);
    let mut rec = Recorder { checks: Vec::new() };
    let reps = reps(cfg)?;
    gamma_group(&mut rng, cfg, &mut rec)?;
    phase_group(&mut rng, cfg, &reps, &mut rec)?;
    globality_group(cfg, &reps, &mut rec)?;
    contamination_group(&mut rng, cfg, &mut rec)?;
    projector_group(&mut rng, cfg, &mut rec)?;
    kronecker_group(&mut rng, cfg, &mut rec)?;
    relocalise_group(&mut rng, cfg, &mut rec)?;
    let passes = rec.checks.iter().all(|c| c.passed);
    Ok(AlgebraReport {
        config: cfg.clone(),
        checks: rec.checks,
        passes,
    })
}
