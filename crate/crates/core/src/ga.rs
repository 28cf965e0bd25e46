//! Binary-chromosome genetic algorithm over `(x0, y0, course, speed)`.
//!
//! Each run of [`run_tmaga`] repeats, for every inner run, a narrowing epoch
//! on the full box, a shrink of the box around that epoch's best, and a
//! longer main epoch on the shrunk box re-quantized to fresh bit widths. The
//! final estimate is the fitness-weighted mean of the inner-run bests.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Result, TmaError};
use crate::objective::{BearingObjective, CandidateXY, Interval, SearchBoundsXY};

/// Smallest `m` with `2^(m-1) < (max - min) * 10^p < 2^m - 1`.
pub fn bit_width(max: f64, min: f64, p: u32) -> Result<u32> {
    if !(max.is_finite() && min.is_finite() && max > min) {
        return Err(TmaError::InvalidBounds(format!("bit width needs max > min (got [{min}, {max}])")));
    }
    let scaled = (max - min) * 10f64.powi(p as i32);
    // the double inequality pins m = ceil(log2(scaled + 1)), checked for 1..=64
    for m in 1..=64u32 {
        let upper = 2f64.powi(m as i32) - 1.0;
        if scaled < upper {
            let lower = 2f64.powi(m as i32 - 1);
            return if lower < scaled {
                Ok(m)
            } else {
                Err(TmaError::BitWidth { scaled })
            };
        }
    }
    Err(TmaError::BitWidth { scaled })
}

/// Quantization of one chromosome segment.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Segment {
    pub interval: Interval,
    pub bits: u32,
}

impl Segment {
    fn levels(&self) -> f64 {
        // bits <= 64; 2^64 - 1 rounds to 2^64 in f64, close enough for a step size
        2f64.powi(self.bits as i32) - 1.0
    }

    /// Distance between adjacent representable values.
    pub fn step(&self) -> f64 {
        self.interval.width() / self.levels()
    }

    fn max_code(&self) -> u64 {
        if self.bits == 64 {
            u64::MAX
        } else {
            (1u64 << self.bits) - 1
        }
    }
}

/// Bit layout `(x0 | y0 | course | speed)` for a given box and precision.
#[derive(Debug, Clone, PartialEq)]
pub struct ChromosomeLayout {
    pub segments: [Segment; 4],
    pub precision: u32,
    pub total_bits: usize,
}

impl ChromosomeLayout {
    pub fn new(bounds: &SearchBoundsXY, precision: u32) -> Result<Self> {
        bounds.validate()?;
        let intervals = bounds.to_array();
        let mut segments = [Segment {
            interval: intervals[0],
            bits: 0,
        }; 4];
        for (seg, iv) in segments.iter_mut().zip(intervals) {
            *seg = Segment {
                interval: iv,
                bits: bit_width(iv.max, iv.min, precision)?,
            };
        }
        let total_bits = segments.iter().map(|s| s.bits as usize).sum();
        Ok(Self {
            segments,
            precision,
            total_bits,
        })
    }

    pub fn bounds(&self) -> SearchBoundsXY {
        SearchBoundsXY::from_array(self.segments.map(|s| s.interval))
    }

    /// Quantizes `c` to the nearest representable chromosome.
    pub fn encode(&self, c: &CandidateXY) -> Result<Chromosome> {
        if !self.bounds().contains(c) {
            return Err(TmaError::InvalidBounds(format!("candidate {c:?} lies outside the layout box")));
        }
        let mut bits = Vec::with_capacity(self.total_bits);
        for (seg, v) in self.segments.iter().zip(c.to_array()) {
            let frac = (v - seg.interval.min) / seg.interval.width();
            let code = (frac * seg.levels()).round();
            let code = if code >= seg.max_code() as f64 {
                seg.max_code()
            } else {
                code as u64
            };
            for i in (0..seg.bits).rev() {
                bits.push((code >> i) & 1 == 1);
            }
        }
        Ok(Chromosome { bits })
    }

    /// All-zero segments map to `min`, all-one segments to `max`.
    pub fn decode(&self, ch: &Chromosome) -> CandidateXY {
        debug_assert_eq!(ch.bits.len(), self.total_bits);
        let mut out = [0.0; 4];
        let mut offset = 0;
        for (slot, seg) in out.iter_mut().zip(&self.segments) {
            let n = seg.bits as usize;
            let code = ch.bits[offset..offset + n]
                .iter()
                .fold(0u64, |acc, b| (acc << 1) | u64::from(*b));
            offset += n;
            *slot = if code == seg.max_code() {
                seg.interval.max
            } else {
                seg.interval.min + code as f64 * seg.step()
            };
        }
        CandidateXY::from_array(out)
    }

    pub fn random<R: Rng + ?Sized>(&self, rng: &mut R) -> Chromosome {
        Chromosome {
            bits: (0..self.total_bits).map(|_| rng.random::<bool>()).collect(),
        }
    }
}

/// Fixed-length bit string, most significant bit first in each segment.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Chromosome {
    pub bits: Vec<bool>,
}

impl Chromosome {
    pub fn zeros(len: usize) -> Self {
        Self { bits: vec![false; len] }
    }

    pub fn ones(len: usize) -> Self {
        Self { bits: vec![true; len] }
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }
}

/// Roulette-wheel fitness, `1 / (1 + cost)`.
pub fn fitness(cost: f64) -> f64 {
    1.0 / (1.0 + cost)
}

fn roulette<R: Rng + ?Sized>(cumulative: &[f64], rng: &mut R) -> usize {
    let total = *cumulative.last().expect("non-empty population");
    if total <= 0.0 {
        return rng.random_range(0..cumulative.len());
    }
    let target = rng.random::<f64>() * total;
    cumulative
        .partition_point(|c| *c <= target)
        .min(cumulative.len() - 1)
}

fn cumulative(fitnesses: &[f64]) -> Vec<f64> {
    fitnesses
        .iter()
        .scan(0.0, |acc, f| {
            *acc += f;
            Some(*acc)
        })
        .collect()
}

/// Two independent fitness-proportional draws (indices into the population).
/// Falls back to uniform draws when every fitness is zero.
pub fn select_pair<R: Rng + ?Sized>(fitnesses: &[f64], rng: &mut R) -> (usize, usize) {
    let cum = cumulative(fitnesses);
    (roulette(&cum, rng), roulette(&cum, rng))
}

/// Swaps the middle segment `[k1, k2)` between two parents.
pub fn crossover_at(a: &Chromosome, b: &Chromosome, k1: usize, k2: usize) -> (Chromosome, Chromosome) {
    debug_assert_eq!(a.len(), b.len());
    let (lo, hi) = if k1 <= k2 { (k1, k2) } else { (k2, k1) };
    let mut c1 = a.clone();
    let mut c2 = b.clone();
    c1.bits[lo..hi].copy_from_slice(&b.bits[lo..hi]);
    c2.bits[lo..hi].copy_from_slice(&a.bits[lo..hi]);
    (c1, c2)
}

/// Two-piece crossover with cut points drawn uniformly from `1..len`.
pub fn crossover_two_piece<R: Rng + ?Sized>(
    a: &Chromosome,
    b: &Chromosome,
    rng: &mut R,
) -> (Chromosome, Chromosome) {
    let n = a.len();
    if n < 2 {
        return (a.clone(), b.clone());
    }
    let k1 = rng.random_range(1..n);
    let k2 = rng.random_range(1..n);
    crossover_at(a, b, k1, k2)
}

/// Flips each bit independently with probability `rate`.
pub fn mutate_bitwise<R: Rng + ?Sized>(ch: &mut Chromosome, rate: f64, rng: &mut R) {
    if rate <= 0.0 {
        return;
    }
    for bit in ch.bits.iter_mut() {
        if rate >= 1.0 || rng.random::<f64>() < rate {
            *bit = !*bit;
        }
    }
}

/// Box of `fraction` times the original width per parameter, centered on the
/// fitness-weighted mean of `bests` and shifted back inside `bounds`.
pub fn narrow_space(bounds: &SearchBoundsXY, bests: &[(CandidateXY, f64)], fraction: f64) -> SearchBoundsXY {
    let center = weighted_mean(bests);
    let original = bounds.to_array();
    let mut out = original;
    for ((slot, iv), c) in out.iter_mut().zip(original).zip(center.to_array()) {
        let width = iv.width() * fraction;
        let mut lo = c - 0.5 * width;
        let mut hi = c + 0.5 * width;
        if lo < iv.min {
            lo = iv.min;
            hi = iv.min + width;
        }
        if hi > iv.max {
            hi = iv.max;
            lo = iv.max - width;
        }
        *slot = Interval::new(lo.max(iv.min), hi.min(iv.max));
    }
    SearchBoundsXY::from_array(out)
}

/// Fitness-weighted mean of `(candidate, cost)` pairs, weights `1/(1+cost)`.
pub fn weighted_mean(items: &[(CandidateXY, f64)]) -> CandidateXY {
    assert!(!items.is_empty(), "weighted mean of an empty set");
    let total: f64 = items.iter().map(|(_, c)| fitness(*c)).sum();
    let mut acc = [0.0; 4];
    for (cand, cost) in items {
        let w = fitness(*cost) / total;
        for (a, v) in acc.iter_mut().zip(cand.to_array()) {
            *a += w * v;
        }
    }
    CandidateXY::from_array(acc)
}

/// GA and Monte Carlo parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GaConfig {
    pub population_size: usize,
    pub narrowing_generations: usize,
    pub main_generations: usize,
    pub inner_runs: usize,
    pub outer_runs: usize,
    /// Per-bit flip probability; `None` means `1 / total_bits`.
    pub mutation_rate: Option<f64>,
    pub narrowing_fraction: f64,
    /// Decimal digits kept by the quantization.
    pub precision: u32,
    /// Carry the generation's best individual over unchanged.
    pub elitism: bool,
    pub bounds: SearchBoundsXY,
    pub seed: u64,
}

impl Default for GaConfig {
    fn default() -> Self {
        Self {
            population_size: 50,
            narrowing_generations: 200,
            main_generations: 500,
            inner_runs: 20,
            outer_runs: 20,
            mutation_rate: None,
            narrowing_fraction: 0.2,
            precision: 7,
            elitism: true,
            bounds: SearchBoundsXY::reference(),
            seed: 0,
        }
    }
}

impl GaConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(TmaError::Config(format!("ga: {m}")));
        if self.population_size < 2 {
            return bad("population_size must be >= 2");
        }
        if self.narrowing_generations == 0 || self.main_generations == 0 {
            return bad("generation counts must be positive");
        }
        if self.inner_runs == 0 || self.outer_runs == 0 {
            return bad("run counts must be positive");
        }
        if !(self.narrowing_fraction > 0.0 && self.narrowing_fraction < 1.0) {
            return bad("narrowing_fraction must lie in (0, 1)");
        }
        if let Some(r) = self.mutation_rate {
            if !(0.0..=1.0).contains(&r) {
                return bad("mutation_rate must lie in [0, 1]");
            }
        }
        self.bounds.validate()
    }

    /// Evaluations for one outer run.
    pub fn fevals_per_outer_run(&self) -> u64 {
        (self.population_size * (self.narrowing_generations + self.main_generations) * self.inner_runs) as u64
    }

    /// Evaluations for every outer run.
    pub fn fevals_total(&self) -> u64 {
        self.fevals_per_outer_run() * self.outer_runs as u64
    }
}

/// Parameters of one generational epoch.
#[derive(Debug, Clone, Copy)]
pub struct EpochParams {
    pub generations: usize,
    pub population_size: usize,
    pub mutation_rate: f64,
    pub elitism: bool,
}

/// Outcome of [`run_ga_epoch`].
#[derive(Debug, Clone)]
pub struct EpochResult {
    pub best: CandidateXY,
    pub cost: f64,
    /// Best-ever cost after each generation.
    pub history: Vec<f64>,
}

/// Generational GA: evaluate, select, cross, mutate, replace.
///
/// Consumes exactly `population_size * generations` evaluations.
pub fn run_ga_epoch<R: Rng + ?Sized>(
    objective: &BearingObjective,
    layout: &ChromosomeLayout,
    params: EpochParams,
    rng: &mut R,
) -> EpochResult {
    let pop_size = params.population_size;
    let mut population: Vec<Chromosome> = (0..pop_size).map(|_| layout.random(rng)).collect();
    let mut best = (CandidateXY::default(), f64::INFINITY);
    let mut history = Vec::with_capacity(params.generations);

    for generation in 0..params.generations {
        let decoded: Vec<CandidateXY> = population.iter().map(|ch| layout.decode(ch)).collect();
        let costs: Vec<f64> = decoded.iter().map(|c| objective.evaluate_xy(c)).collect();
        let (gen_best, gen_cost) = costs
            .iter()
            .enumerate()
            .min_by(|a, b| a.1.total_cmp(b.1))
            .map(|(i, c)| (i, *c))
            .expect("non-empty population");
        if gen_cost < best.1 {
            best = (decoded[gen_best], gen_cost);
        }
        history.push(best.1);
        if generation + 1 == params.generations {
            break;
        }

        let fitnesses: Vec<f64> = costs.iter().map(|c| fitness(*c)).collect();
        let cum = cumulative(&fitnesses);
        let mut next = Vec::with_capacity(pop_size);
        if params.elitism {
            next.push(population[gen_best].clone());
        }
        while next.len() < pop_size {
            let a = &population[roulette(&cum, rng)];
            let b = &population[roulette(&cum, rng)];
            let (mut c1, mut c2) = crossover_two_piece(a, b, rng);
            mutate_bitwise(&mut c1, params.mutation_rate, rng);
            mutate_bitwise(&mut c2, params.mutation_rate, rng);
            next.push(c1);
            if next.len() < pop_size {
                next.push(c2);
            }
        }
        population = next;
    }

    EpochResult {
        best: best.0,
        cost: best.1,
        history,
    }
}

/// One inner run's outcome.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InnerRun {
    pub narrowed: SearchBoundsXY,
    pub best: CandidateXY,
    pub cost: f64,
}

/// Outcome of one TMAGA outer run.
#[derive(Debug, Clone, PartialEq)]
pub struct GaReport {
    /// Lowest-cost inner best.
    pub best: CandidateXY,
    pub best_cost: f64,
    pub fevals: u64,
    pub inner: Vec<InnerRun>,
    /// Fitness-weighted mean of the inner bests.
    pub solution: CandidateXY,
}

/// One outer run: `inner_runs` x (narrowing epoch, narrow, main epoch), then
/// the fitness-weighted average of the inner bests.
pub fn run_tmaga<R: Rng + ?Sized>(objective: &BearingObjective, config: &GaConfig, rng: &mut R) -> Result<GaReport> {
    config.validate()?;
    let start = objective.fevals();
    let full = ChromosomeLayout::new(&config.bounds, config.precision)?;
    let rate_for = |layout: &ChromosomeLayout| config.mutation_rate.unwrap_or(1.0 / layout.total_bits as f64);
    let mut inner = Vec::with_capacity(config.inner_runs);

    for _ in 0..config.inner_runs {
        let coarse = run_ga_epoch(
            objective,
            &full,
            EpochParams {
                generations: config.narrowing_generations,
                population_size: config.population_size,
                mutation_rate: rate_for(&full),
                elitism: config.elitism,
            },
            rng,
        );
        let narrowed = narrow_space(&config.bounds, &[(coarse.best, coarse.cost)], config.narrowing_fraction);
        let layout = ChromosomeLayout::new(&narrowed, config.precision)?;
        let fine = run_ga_epoch(
            objective,
            &layout,
            EpochParams {
                generations: config.main_generations,
                population_size: config.population_size,
                mutation_rate: rate_for(&layout),
                elitism: config.elitism,
            },
            rng,
        );
        inner.push(InnerRun {
            narrowed,
            best: fine.best,
            cost: fine.cost,
        });
    }

    let fevals = objective.fevals() - start;
    let pairs: Vec<(CandidateXY, f64)> = inner.iter().map(|r| (r.best, r.cost)).collect();
    let solution = weighted_mean(&pairs);
    let best_run = inner
        .iter()
        .min_by(|a, b| a.cost.total_cmp(&b.cost))
        .expect("inner_runs >= 1");
    let (best, best_cost) = (best_run.best, best_run.cost);
    Ok(GaReport {
        best,
        best_cost,
        fevals,
        inner,
        solution,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kinematics::synthesize_bearings;
    use crate::presets;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn paper_layout() -> ChromosomeLayout {
        ChromosomeLayout::new(&SearchBoundsXY::reference(), 7).unwrap()
    }

    fn trial7_objective() -> BearingObjective {
        let s = presets::preset("trial07").unwrap();
        let o = synthesize_bearings(&s, &mut ChaCha8Rng::seed_from_u64(s.seed)).unwrap();
        BearingObjective::new(&o.noisy, &o.observer).unwrap()
    }

    #[test]
    fn bit_width_examples() {
        assert_eq!(bit_width(20_000.0, 0.0, 7).unwrap(), 38);
        assert_eq!(bit_width(360.0, 0.0, 7).unwrap(), 32);
        assert_eq!(bit_width(25.0, 0.0, 7).unwrap(), 28);
        assert_eq!(paper_layout().total_bits, 136);
    }

    #[test]
    fn bit_width_degenerate() {
        // scaled = 3 = 2^2 - 1 sits on the excluded upper edge
        assert!(matches!(bit_width(3.0, 0.0, 0), Err(TmaError::BitWidth { .. })));
        assert!(bit_width(1.0, 1.0, 3).is_err());
        assert!(bit_width(0.5, 0.0, 0).is_err());
    }

    #[test]
    fn bit_width_is_minimal() {
        for (max, p) in [(20_000.0, 7), (360.0, 7), (25.0, 7), (4000.0, 7), (72.0, 3), (5.0, 2)] {
            let m = bit_width(max, 0.0, p).unwrap() as i32;
            let scaled = max * 10f64.powi(p as i32);
            assert!(2f64.powi(m - 1) < scaled && scaled < 2f64.powi(m) - 1.0);
            // m - 1 fails the double inequality
            assert!(!(2f64.powi(m - 2) < scaled && scaled < 2f64.powi(m - 1) - 1.0));
        }
    }

    #[test]
    fn decode_extremes() {
        let l = paper_layout();
        assert_eq!(l.decode(&Chromosome::zeros(136)), CandidateXY::new(0.0, 0.0, 0.0, 0.0));
        assert_eq!(l.decode(&Chromosome::ones(136)), CandidateXY::new(20_000.0, 20_000.0, 360.0, 25.0));
        assert!(l.encode(&CandidateXY::new(-1.0, 0.0, 0.0, 0.0)).is_err());
    }

    #[test]
    fn selection_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..1000 {
            assert_eq!(select_pair(&[1.0, 0.0, 0.0], &mut rng), (0, 0));
        }
        let freq = |f: &[f64], rng: &mut ChaCha8Rng| {
            let n = 10_000;
            let hits = (0..n).filter(|_| select_pair(f, rng).0 == 0).count();
            hits as f64 / n as f64
        };
        let p = freq(&[1.0, 1.0], &mut rng);
        assert!((p - 0.5).abs() <= 0.02, "{p}");
        let p = freq(&[3.0, 1.0], &mut rng);
        assert!((p - 0.75).abs() <= 0.02, "{p}");
        let p = freq(&[0.0, 0.0], &mut rng);
        assert!((p - 0.5).abs() <= 0.02, "uniform fallback {p}");
    }

    #[test]
    fn crossover_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let a = paper_layout().random(&mut rng);
        let (c1, c2) = crossover_two_piece(&a, &a, &mut rng);
        assert_eq!((&c1, &c2), (&a, &a));
        let b = paper_layout().random(&mut rng);
        let (c1, c2) = crossover_at(&a, &b, 40, 40);
        assert_eq!((&c1, &c2), (&a, &b));

        let (c1, c2) = crossover_at(&Chromosome::zeros(8), &Chromosome::ones(8), 2, 5);
        let bits = |c: &Chromosome| c.bits.iter().map(|b| if *b { '1' } else { '0' }).collect::<String>();
        assert_eq!(bits(&c1), "00111000");
        assert_eq!(bits(&c2), "11000111");
    }

    #[test]
    fn mutation_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let orig = paper_layout().random(&mut rng);
        let mut m = orig.clone();
        mutate_bitwise(&mut m, 0.0, &mut rng);
        assert_eq!(m, orig);
        mutate_bitwise(&mut m, 1.0, &mut rng);
        assert!(m.bits.iter().zip(&orig.bits).all(|(a, b)| a != b));

        let trials = 10_000;
        let mut flips = 0usize;
        for _ in 0..trials {
            let mut m = orig.clone();
            mutate_bitwise(&mut m, 0.01, &mut rng);
            flips += m.bits.iter().zip(&orig.bits).filter(|(a, b)| a != b).count();
        }
        let mean = flips as f64 / trials as f64;
        assert!((mean - 1.36).abs() <= 0.05, "{mean}");
    }

    #[test]
    fn narrowing_examples() {
        let b = SearchBoundsXY::reference();
        let center = CandidateXY::new(10_000.0, 10_000.0, 180.0, 12.5);
        let n = narrow_space(&b, &[(center, 1.0)], 0.2);
        for (orig, new) in b.to_array().iter().zip(n.to_array()) {
            assert!((new.width() - 0.2 * orig.width()).abs() < 1e-9);
            assert!((new.center() - orig.center()).abs() < 1e-9);
        }
        let n = narrow_space(&b, &[(CandidateXY::new(0.0, 0.0, 0.0, 0.0), 0.0)], 0.2);
        assert_eq!(n.x0, Interval::new(0.0, 4000.0));
        assert_eq!(n.speed, Interval::new(0.0, 5.0));
        let n = narrow_space(&b, &[(CandidateXY::new(20_000.0, 0.0, 360.0, 25.0), 0.0)], 0.2);
        assert_eq!(n.x0, Interval::new(16_000.0, 20_000.0));
        assert_eq!(n.course.max, 360.0);
    }

    #[test]
    fn weighted_mean_of_identical() {
        let c = CandidateXY::new(12.5, 4006.0, 90.0, 10.0);
        let m = weighted_mean(&[(c, 0.1), (c, 3.0), (c, 50.0)]);
        for (a, b) in m.to_array().iter().zip(c.to_array()) {
            assert!((a - b).abs() <= 1e-12 * b.abs().max(1.0));
        }
    }

    #[test]
    fn epoch_accounting_and_monotone() {
        let f = trial7_objective();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let layout = paper_layout();
        let params = EpochParams {
            generations: 1,
            population_size: 50,
            mutation_rate: 1.0 / 136.0,
            elitism: true,
        };
        run_ga_epoch(&f, &layout, params, &mut rng);
        assert_eq!(f.fevals(), 50);
        let r = run_ga_epoch(
            &f,
            &layout,
            EpochParams {
                generations: 60,
                ..params
            },
            &mut rng,
        );
        assert_eq!(f.fevals(), 50 + 50 * 60);
        assert!(r.history.windows(2).all(|w| w[1] <= w[0]));
    }

    #[test]
    fn narrowing_epoch_window_contains_best() {
        let f = trial7_objective();
        let cfg = GaConfig::default();
        let full = ChromosomeLayout::new(&cfg.bounds, cfg.precision).unwrap();
        for seed in 0..3 {
            let mut rng = ChaCha8Rng::seed_from_u64(100 + seed);
            let r = run_ga_epoch(
                &f,
                &full,
                EpochParams {
                    generations: 200,
                    population_size: 50,
                    mutation_rate: 1.0 / 136.0,
                    elitism: true,
                },
                &mut rng,
            );
            let n = narrow_space(&cfg.bounds, &[(r.best, r.cost)], 0.2);
            assert!(n.contains(&r.best));
            for (narrow, orig) in n.to_array().iter().zip(cfg.bounds.to_array()) {
                assert!((narrow.width() - 0.2 * orig.width()).abs() < 1e-9 * orig.width());
            }
        }
    }

    #[test]
    fn tmaga_accounting_small() {
        let f = trial7_objective();
        let cfg = GaConfig {
            population_size: 10,
            narrowing_generations: 4,
            main_generations: 6,
            inner_runs: 3,
            ..GaConfig::default()
        };
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let r = run_tmaga(&f, &cfg, &mut rng).unwrap();
        assert_eq!(r.fevals, 10 * 10 * 3);
        assert_eq!(r.fevals, cfg.fevals_per_outer_run());
        assert_eq!(r.inner.len(), 3);
        assert_eq!(GaConfig::default().fevals_per_outer_run(), 700_000);
        assert_eq!(GaConfig::default().fevals_total(), 14_000_000);
    }

    #[test]
    fn tmaga_deterministic() {
        let cfg = GaConfig {
            population_size: 12,
            narrowing_generations: 5,
            main_generations: 5,
            inner_runs: 2,
            ..GaConfig::default()
        };
        let a = run_tmaga(&trial7_objective(), &cfg, &mut ChaCha8Rng::seed_from_u64(5)).unwrap();
        let b = run_tmaga(&trial7_objective(), &cfg, &mut ChaCha8Rng::seed_from_u64(5)).unwrap();
        assert_eq!(a, b);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(10_000))]

        #[test]
        fn codec_round_trip(fx in 0.0..=1.0f64, fy in 0.0..=1.0f64, fc in 0.0..=1.0f64, fs in 0.0..=1.0f64) {
            let l = paper_layout();
            let b = l.bounds().to_array();
            let c = CandidateXY::from_array([
                b[0].min + fx * b[0].width(),
                b[1].min + fy * b[1].width(),
                b[2].min + fc * b[2].width(),
                b[3].min + fs * b[3].width(),
            ]);
            let back = l.decode(&l.encode(&c).unwrap());
            for ((orig, got), seg) in c.to_array().iter().zip(back.to_array()).zip(&l.segments) {
                prop_assert!((orig - got).abs() <= 0.5 * seg.step() * (1.0 + 1e-9));
            }
        }
    }
}
