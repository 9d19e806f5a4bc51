use std::io::{self, Write};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Gamma};
use rayon::prelude::*;

use super::{alpha_terms, bracket_at, kernel_evals, KernelEval};
use crate::erlang::MixedErlang;
use crate::error::{Error, Result};
use crate::sarmanov::{validate_model, SarmanovModel, ValidationStatus};

/// Proposals per independently seeded stream.
const CHUNK: usize = 1 << 15;

/// How draws from the Sarmanov law are produced.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Scheme {
    /// Accept–reject against `Π f_i` with the corner maximum as envelope;
    /// draws are exact and unweighted. Needs an admissible bounded model.
    Rejection,
    /// Every proposal from `Π f_i` is kept with weight equal to the bracket
    /// `1 + Σ α_T Π φ_i`; estimators are self-normalized. Works for any
    /// bounded model, including signed ones.
    Weighted,
}

#[derive(Clone, Debug)]
pub struct SampleBatch {
    pub dim: usize,
    /// Row-major, `dim` entries per draw.
    pub draws: Vec<f64>,
    /// Present for [`Scheme::Weighted`].
    pub weights: Option<Vec<f64>>,
    pub seed: u64,
    pub scheme: Scheme,
    pub acceptance_rate: f64,
    /// Largest `bracket / M` seen while rejecting; at most one.
    pub max_envelope_ratio: f64,
}

impl SampleBatch {
    pub fn len(&self) -> usize {
        self.draws.len().checked_div(self.dim).unwrap_or(0)
    }

    pub fn is_empty(&self) -> bool {
        self.draws.is_empty()
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.draws[i * self.dim..(i + 1) * self.dim]
    }

    pub fn weight(&self, i: usize) -> f64 {
        self.weights.as_ref().map_or(1.0, |w| w[i])
    }
}

struct MarginalSampler {
    cum: Vec<f64>,
    shapes: Vec<Gamma<f64>>,
}

impl MarginalSampler {
    fn new(x: &MixedErlang) -> Result<Self> {
        let mut acc = 0.0;
        let mut cum: Vec<f64> = x
            .weights()
            .iter()
            .map(|w| {
                acc += w;
                acc
            })
            .collect();
        if let Some(last) = cum.last_mut() {
            *last = f64::INFINITY;
        }
        let shapes = (1..=x.weights().len())
            .map(|k| Gamma::new(k as f64, 1.0 / x.scale()).map_err(|e| Error::Domain(e.to_string())))
            .collect::<Result<_>>()?;
        Ok(Self { cum, shapes })
    }

    fn draw<R: Rng>(&self, rng: &mut R) -> f64 {
        let u: f64 = rng.random();
        let k = self.cum.partition_point(|&c| c <= u);
        self.shapes[k].sample(rng)
    }
}

struct Sampler {
    marginals: Vec<MarginalSampler>,
    kernels: Vec<KernelEval>,
    terms: Vec<(u32, f64)>,
    seed: u64,
}

struct ChunkOut {
    rows: Vec<f64>,
    weights: Vec<f64>,
    proposed: usize,
    max_ratio: f64,
}

impl Sampler {
    fn new(model: &SarmanovModel, seed: u64) -> Result<Self> {
        Ok(Self {
            marginals: model.marginals().iter().map(MarginalSampler::new).collect::<Result<_>>()?,
            kernels: kernel_evals(model),
            terms: alpha_terms(model),
            seed,
        })
    }

    fn rng(&self, chunk: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(chunk);
        rng
    }

    /// One proposal into `row`; returns the bracket value there.
    fn propose<R: Rng>(&self, rng: &mut R, row: &mut [f64], phi: &mut [f64]) -> f64 {
        for (i, m) in self.marginals.iter().enumerate() {
            row[i] = m.draw(rng);
            phi[i] = self.kernels[i].phi(row[i]);
        }
        bracket_at(&self.terms, phi)
    }

    fn rejection_chunk(&self, chunk: u64, envelope: f64) -> ChunkOut {
        let dim = self.marginals.len();
        let mut rng = self.rng(chunk);
        let mut rows = Vec::with_capacity(CHUNK * dim);
        let mut row = vec![0.0; dim];
        let mut phi = vec![0.0; dim];
        let mut max_ratio: f64 = 0.0;
        for _ in 0..CHUNK {
            let b = self.propose(&mut rng, &mut row, &mut phi);
            let ratio = b / envelope;
            max_ratio = max_ratio.max(ratio);
            let u: f64 = rng.random();
            if u < ratio {
                rows.extend_from_slice(&row);
            }
        }
        ChunkOut { rows, weights: Vec::new(), proposed: CHUNK, max_ratio }
    }

    fn weighted_chunk(&self, chunk: u64, len: usize) -> ChunkOut {
        let dim = self.marginals.len();
        let mut rng = self.rng(chunk);
        let mut rows = vec![0.0; len * dim];
        let mut weights = Vec::with_capacity(len);
        let mut phi = vec![0.0; dim];
        for row in rows.chunks_exact_mut(dim) {
            weights.push(self.propose(&mut rng, row, &mut phi));
        }
        ChunkOut { rows, weights, proposed: len, max_ratio: f64::NAN }
    }
}

/// Exact draws by rejection. The model must pass [`validate_model`] with a
/// bounded kernel.
pub fn sample(model: &SarmanovModel, count: usize, seed: u64) -> Result<SampleBatch> {
    sample_with(model, count, seed, Scheme::Rejection)
}

/// Weighted draws from the independent proposal.
pub fn sample_weighted(model: &SarmanovModel, count: usize, seed: u64) -> Result<SampleBatch> {
    sample_with(model, count, seed, Scheme::Weighted)
}

pub fn sample_with(model: &SarmanovModel, count: usize, seed: u64, scheme: Scheme) -> Result<SampleBatch> {
    if count == 0 {
        return Err(Error::EmptyBatch);
    }
    if !model.kernel().is_bounded() {
        return Err(Error::Unsupported(format!(
            "sampling needs a bounded kernel; {} has no finite envelope",
            model.kernel()
        )));
    }
    let dim = model.dim();
    let sampler = Sampler::new(model, seed)?;
    match scheme {
        Scheme::Weighted => {
            let chunks = count.div_ceil(CHUNK);
            let outs: Vec<ChunkOut> = (0..chunks)
                .into_par_iter()
                .map(|c| sampler.weighted_chunk(c as u64, CHUNK.min(count - c * CHUNK)))
                .collect();
            let mut draws = Vec::with_capacity(count * dim);
            let mut weights = Vec::with_capacity(count);
            for o in outs {
                draws.extend_from_slice(&o.rows);
                weights.extend_from_slice(&o.weights);
            }
            Ok(SampleBatch {
                dim,
                draws,
                weights: Some(weights),
                seed,
                scheme,
                acceptance_rate: 1.0,
                max_envelope_ratio: f64::NAN,
            })
        }
        Scheme::Rejection => {
            let report = validate_model(model)?;
            if report.status != ValidationStatus::Ok {
                return Err(Error::Inadmissible(format!(
                    "rejection sampling needs a non-negative density; bracket minimum {:.6} ({})",
                    report.min_bracket, report.status
                )));
            }
            let envelope = report.max_bracket;
            let group = (rayon::current_num_threads() * 2).max(2) as u64;
            let mut draws = Vec::with_capacity(count * dim);
            let (mut proposed, mut accepted, mut max_ratio) = (0usize, 0usize, 0.0f64);
            let mut next = 0u64;
            while draws.len() < count * dim {
                if proposed > 10_000 * count + (1 << 24) {
                    return Err(Error::Domain(format!(
                        "acceptance rate {:.2e} too low to finish",
                        accepted as f64 / proposed as f64
                    )));
                }
                let outs: Vec<ChunkOut> =
                    (next..next + group).into_par_iter().map(|c| sampler.rejection_chunk(c, envelope)).collect();
                next += group;
                for o in outs {
                    proposed += o.proposed;
                    accepted += o.rows.len() / dim;
                    max_ratio = max_ratio.max(o.max_ratio);
                    let room = count * dim - draws.len();
                    draws.extend_from_slice(&o.rows[..o.rows.len().min(room)]);
                }
            }
            Ok(SampleBatch {
                dim,
                draws,
                weights: None,
                seed,
                scheme,
                acceptance_rate: accepted as f64 / proposed as f64,
                max_envelope_ratio: max_ratio,
            })
        }
    }
}

/// One row per draw, header `x1,…,xn` plus `weight` for weighted batches.
pub fn write_csv<W: Write>(batch: &SampleBatch, mut out: W) -> io::Result<()> {
    let mut header: Vec<String> = (1..=batch.dim).map(|i| format!("x{i}")).collect();
    if batch.weights.is_some() {
        header.push("weight".into());
    }
    writeln!(out, "{}", header.join(","))?;
    for i in 0..batch.len() {
        let row = batch.row(i);
        let mut line = row.iter().map(|v| format!("{v:.17e}")).collect::<Vec<_>>().join(",");
        if let Some(w) = &batch.weights {
            line.push_str(&format!(",{:.17e}", w[i]));
        }
        writeln!(out, "{line}")?;
    }
    Ok(())
}
