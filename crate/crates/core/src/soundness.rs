//! Seeded soundness sweeps: draw parameters where a criterion's direct
//! variant holds and check the corresponding function on the disk.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::criteria::{criterion, ClassKind, CriterionId, SpiralClassParams, Variant, Verdict};
use crate::disk::{verify_on_disk, DiskGrid, DiskReport};
use crate::error::{Error, Result};
use crate::scan::{critical_q, QStarStatus, DEFAULT_TOL};
use crate::series::{
    extremal_rtau_series, hadamard_convolve, integral_transform, theta_series_adaptive, PascalParams, PowerSeries,
    RTauParams,
};

/// The function a criterion speaks about, and the class it certifies.
///
/// R^τ criteria use the extremal series (coefficients at the sharp bound),
/// which is the worst case they cover.
pub fn criterion_target(id: CriterionId, p: &PascalParams, r: Option<&RTauParams>) -> Result<(PowerSeries, ClassKind)> {
    let theta = theta_series_adaptive(p)?;
    let f = match id {
        CriterionId::ThetaInS | CriterionId::ThetaInK => theta,
        CriterionId::GInK | CriterionId::GInS => integral_transform(&theta),
        CriterionId::LambdaRtauInS | CriterionId::LambdaRtauInK => {
            let r = r.ok_or(Error::MissingRTau { criterion: id.label() })?;
            hadamard_convolve(&theta, &extremal_rtau_series(r, theta.order()))
        }
    };
    Ok((f, id.class()))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SoundnessSample {
    pub criterion: CriterionId,
    pub pascal: PascalParams,
    pub class_params: SpiralClassParams,
    pub rtau: Option<RTauParams>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SoundnessOutcome {
    pub sample: SoundnessSample,
    pub verdict: Verdict,
    pub report: DiskReport,
}

const MAX_ATTEMPTS: usize = 1000;

fn stream_seed(seed: u64, id: CriterionId) -> u64 {
    let index = CriterionId::ALL.iter().position(|c| *c == id).unwrap_or(0) as u64;
    seed.wrapping_mul(0x9E37_79B9_7F4A_7C15).wrapping_add(index)
}

fn draw_candidate(id: CriterionId, rng: &mut ChaCha8Rng) -> Result<(f64, SpiralClassParams, Option<RTauParams>)> {
    let m = rng.gen_range(1.0..6.0);
    let c = SpiralClassParams::new(rng.gen_range(-1.3..1.3), rng.gen_range(0.0..0.9), rng.gen_range(0.0..0.9))?;
    let r = if id.needs_rtau() {
        let tau = Complex64::new(rng.gen_range(0.05..1.0), 0.0);
        Some(RTauParams::new(tau, rng.gen_range(0.2..=1.0), rng.gen_range(-0.5..0.9))?)
    } else {
        None
    };
    Ok((m, c, r))
}

/// Draws `count` parameter tuples at which the direct variant of `id` holds.
///
/// `q` is drawn below the critical value, biased towards it so that tight
/// cases are well represented.
pub fn sample_satisfied(id: CriterionId, count: usize, seed: u64) -> Result<Vec<(SoundnessSample, Verdict)>> {
    let mut rng = ChaCha8Rng::seed_from_u64(stream_seed(seed, id));
    let mut out = Vec::with_capacity(count);
    let mut attempts = 0;
    while out.len() < count {
        attempts += 1;
        if attempts > MAX_ATTEMPTS * count.max(1) {
            return Err(Error::invalid("samples", format!("could not draw satisfied samples for {id}")));
        }
        let (m, c, r) = draw_candidate(id, &mut rng)?;
        let upper = match critical_q(id, Variant::Direct, m, &c, r.as_ref(), DEFAULT_TOL) {
            Ok(cq) if cq.status == QStarStatus::Interior => cq.q_star.min(0.95),
            _ => 0.9,
        };
        let u: f64 = rng.gen_range(0.0..1.0);
        let p = PascalParams::new(m, upper * u.powf(0.25))?;
        let verdict = match criterion(id, &p, &c, r.as_ref(), Variant::Direct) {
            Ok(v) => v,
            Err(Error::NonConvergence { .. }) => continue,
            Err(e) => return Err(e),
        };
        if verdict.satisfied {
            out.push((SoundnessSample { criterion: id, pascal: p, class_params: c, rtau: r }, verdict));
        }
    }
    Ok(out)
}

/// Samples `count` satisfied tuples for `id` and verifies each target on
/// `grid`.
pub fn soundness_sweep(
    id: CriterionId,
    count: usize,
    seed: u64,
    grid: &DiskGrid,
    tolerance: f64,
) -> Result<Vec<SoundnessOutcome>> {
    sample_satisfied(id, count, seed)?
        .into_par_iter()
        .map(|(sample, verdict)| {
            let (f, class) = criterion_target(id, &sample.pascal, sample.rtau.as_ref())?;
            let report = verify_on_disk(&f, &sample.class_params, class, grid, tolerance)?;
            Ok(SoundnessOutcome { sample, verdict, report })
        })
        .collect()
}
