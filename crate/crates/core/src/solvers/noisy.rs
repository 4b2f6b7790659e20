use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::model::{
    ising_to_qubo, perturb, qubo_to_ising, scale_to_device, DeviceRanges, IceNoise,
};

use super::{aggregate, solve_sa, SolveOutcome, SolveRequest, SolverKind};

/// Stream reserved for the control-error draw; reads use streams `0..num_reads`.
const NOISE_STREAM: u64 = u64::MAX;

/// Emulates an annealer: the model is mapped to Ising form, scaled into the
/// device ranges, perturbed with Gaussian control errors and sampled with
/// SA. Returned states are scored on the original, unperturbed model.
pub fn solve_noisy(
    req: &SolveRequest<'_>,
    noise: &IceNoise,
    device: &DeviceRanges,
) -> Result<SolveOutcome> {
    let scaled = scale_to_device(&qubo_to_ising(req.model), device)?;
    let mut rng = ChaCha8Rng::seed_from_u64(req.seed);
    rng.set_stream(NOISE_STREAM);
    let perturbed = perturb(&scaled.scaled(), noise, &mut rng)?;
    let device_qubo = ising_to_qubo(&perturbed);
    let raw = solve_sa(&SolveRequest {
        model: &device_qubo,
        ..*req
    })?;
    let states = raw
        .samples
        .into_iter()
        .flat_map(|s| std::iter::repeat_n(s.bits, s.multiplicity))
        .collect();
    aggregate(req.model, states, SolverKind::NoisySa)
}
