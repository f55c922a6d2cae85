use std::collections::HashSet;

use rand::Rng;
use rayon::prelude::*;

use super::surrogate::Surrogate;
use super::{ObservationHistory, Strategy, StrategyConfig, StrategyKind, Suggestion};
use crate::acquisition::{select_candidate, AcquisitionSpec, BooleanCandidates};
use crate::embedding::{rembo_recover, GenerativeMatrix, RandomEmbedding};
use crate::error::Result;
use crate::gp::{GpModel, KernelKind};
use crate::local_search::minimize_in_box;
use crate::lookup::LookupTable;
use crate::rng::{derive_seed, rng_from_seed, CboRng};
use crate::space::{BooleanVector, CategoricalSpace, Combination};

/// Spaces up to this size get the exact image bounding box for CBO-Recon;
/// larger ones fall back to the hypercube bound.
const IMAGE_BOX_CAP: u64 = 1 << 20;
const DEC_GRID_POINTS: usize = 4096;
const DEC_NEIGHBORHOOD: i64 = 2;

pub(super) fn build(
    config: &StrategyConfig,
    space: &CategoricalSpace,
    seed: u64,
) -> Result<Box<dyn Strategy>> {
    if config.kind == StrategyKind::Random {
        return Ok(Box::new(RandomSearch {
            space: space.clone(),
            rng: rng_from_seed(derive_seed(seed, "random", 0)),
        }));
    }
    Ok(Box::new(build_gp(config, space, seed)?))
}

fn build_gp(config: &StrategyConfig, space: &CategoricalSpace, seed: u64) -> Result<GpStrategy> {
    let mut warnings = Vec::new();
    let m = space.code_length();
    let repr = match config.kind {
        StrategyKind::BinAa | StrategyKind::BinRound => Repr::Bits,
        StrategyKind::DecRound => Repr::Decimal {
            scale: ((1u128 << m) - 1).max(1) as f64,
        },
        StrategyKind::Rembo => Repr::Rembo {
            g: GenerativeMatrix::new(m.max(1), config.d, derive_seed(seed, "rembo", 0))?,
        },
        StrategyKind::CboRecon | StrategyKind::CboLookup => {
            let embedding = RandomEmbedding::new(space, config.d, derive_seed(seed, "embedding", 0))?;
            if embedding.regenerations() > 0 {
                warnings.push(format!(
                    "embedding matrix redrawn {} time(s) for full column rank",
                    embedding.regenerations()
                ));
            }
            if config.kind == StrategyKind::CboLookup {
                Repr::Lookup {
                    table: LookupTable::build_with_cap(space, &embedding, config.table_cap)?,
                }
            } else {
                let (lo, hi) = if space.cardinality() <= IMAGE_BOX_CAP {
                    image_bounds(space, &embedding)
                } else {
                    embedding.hypercube_bounds()
                };
                Repr::Recon { embedding, lo, hi }
            }
        }
        StrategyKind::Random => unreachable!(),
    };
    let kernel = if config.kind == StrategyKind::BinAa {
        KernelKind::AitchisonAitken
    } else {
        KernelKind::Matern52
    };
    let spec = config
        .acquisition_spec(space.cardinality())
        .expect("GP strategies have an acquisition");
    Ok(GpStrategy {
        kind: config.kind,
        space: space.clone(),
        config: config.clone(),
        seed,
        surrogate: Surrogate::new(kernel, config.refit_every, derive_seed(seed, "surrogate", 0)),
        spec,
        repr,
        pending: None,
        observed: HashSet::new(),
        setup_warnings: warnings,
    })
}

/// Bounds of `{R b : rank(b) < N}`, streamed without storing the table.
fn image_bounds(space: &CategoricalSpace, embedding: &RandomEmbedding) -> (Vec<f64>, Vec<f64>) {
    let d = embedding.target_dim();
    let empty = || (vec![f64::INFINITY; d], vec![f64::NEG_INFINITY; d]);
    (0..space.cardinality())
        .into_par_iter()
        .fold(
            || (empty(), vec![0.0; d]),
            |((mut lo, mut hi), mut buf), rank| {
                embedding.embed_into(&space.rank_to_bits(rank), &mut buf);
                for i in 0..d {
                    lo[i] = lo[i].min(buf[i]);
                    hi[i] = hi[i].max(buf[i]);
                }
                ((lo, hi), buf)
            },
        )
        .map(|(b, _)| b)
        .reduce(empty, |(mut lo, mut hi), (l2, h2)| {
            for i in 0..d {
                lo[i] = lo[i].min(l2[i]);
                hi[i] = hi[i].max(h2[i]);
            }
            (lo, hi)
        })
}

struct RandomSearch {
    space: CategoricalSpace,
    rng: CboRng,
}

impl Strategy for RandomSearch {
    fn kind(&self) -> StrategyKind {
        StrategyKind::Random
    }

    fn space(&self) -> &CategoricalSpace {
        &self.space
    }

    fn suggest(&mut self, _history: &ObservationHistory, _t: usize) -> Result<Suggestion> {
        Ok(Suggestion {
            combination: self.space.sample(&mut self.rng),
            path: None,
            warnings: Vec::new(),
        })
    }
}

/// Where a GP strategy places its observations.
enum Repr {
    /// `{0,1}^m` bit vectors.
    Bits,
    /// The rank divided by `2^m - 1`, a point of `[0, 1]`.
    Decimal { scale: f64 },
    Rembo { g: GenerativeMatrix },
    Recon {
        embedding: RandomEmbedding,
        lo: Vec<f64>,
        hi: Vec<f64>,
    },
    Lookup { table: LookupTable },
}

struct GpStrategy {
    kind: StrategyKind,
    space: CategoricalSpace,
    config: StrategyConfig,
    seed: u64,
    surrogate: Surrogate,
    spec: AcquisitionSpec,
    repr: Repr,
    /// Continuous point behind the last proposal (REMBO trains on it).
    pending: Option<(Combination, Vec<f64>)>,
    observed: HashSet<u64>,
    setup_warnings: Vec<String>,
}

impl GpStrategy {
    fn featurize(&self, rank: u64) -> Result<Vec<f64>> {
        Ok(match &self.repr {
            Repr::Bits => self.space.rank_to_bits(rank).to_f64(),
            Repr::Decimal { scale } => vec![rank as f64 / scale],
            Repr::Rembo { g } => g.preimage(&self.space.rank_to_bits(rank)),
            Repr::Recon { embedding, .. } => embedding.embed(&self.space.rank_to_bits(rank))?,
            Repr::Lookup { table } => table.row(rank).to_vec(),
        })
    }

    /// Brings the GP training set up to date with `history`.
    fn sync(&mut self, history: &ObservationHistory) -> Result<()> {
        for i in self.surrogate.len()..history.len() {
            let c = &history.combinations()[i];
            let rank = self.space.rank(c)?;
            let x = match self.pending.take() {
                Some((pc, px)) if &pc == c => px,
                _ => self.featurize(rank)?,
            };
            self.surrogate.push(x, history.targets()[i]);
            self.observed.insert(rank);
        }
        self.pending = None;
        Ok(())
    }

    /// Start points for a continuous search: the best observation's input,
    /// then uniform draws from the box.
    fn starts(&self, history: &ObservationHistory, lo: &[f64], hi: &[f64], t: usize) -> Vec<Vec<f64>> {
        let mut rng = rng_from_seed(derive_seed(self.seed, "starts", t as u64));
        let mut starts = Vec::with_capacity(self.config.restarts);
        if let Some(i) = history.best_index() {
            starts.push(self.surrogate.inputs()[i].clone());
        }
        while starts.len() < self.config.restarts {
            starts.push(
                lo.iter()
                    .zip(hi)
                    .map(|(l, h)| if h > l { rng.random_range(*l..=*h) } else { *l })
                    .collect(),
            );
        }
        starts
    }

    fn search_box(
        &self,
        model: &GpModel,
        history: &ObservationHistory,
        lo: &[f64],
        hi: &[f64],
        t: usize,
    ) -> Vec<f64> {
        let cost = acquisition_cost(model, &self.spec, t);
        let starts = self.starts(history, lo, hi, t);
        minimize_in_box(&cost, lo, hi, &starts, self.config.steps).0
    }

    fn threshold(&self) -> f64 {
        self.config
            .threshold()
            .expect("rounding strategies always carry a threshold")
    }

    fn fold_rank(&self, bits: &BooleanVector) -> Result<u64> {
        Ok(self.space.bits_to_rank(bits)? % self.space.cardinality())
    }
}

fn acquisition_cost<'a>(
    model: &'a GpModel,
    spec: &'a AcquisitionSpec,
    t: usize,
) -> impl Fn(&[f64]) -> f64 + 'a {
    let y_best = model.targets().iter().copied().fold(f64::INFINITY, f64::min);
    move |x: &[f64]| {
        let (mu, sigma) = model.predict_unchecked(x);
        spec.cost(mu, sigma, t, y_best)
    }
}

impl Strategy for GpStrategy {
    fn kind(&self) -> StrategyKind {
        self.kind
    }

    fn space(&self) -> &CategoricalSpace {
        &self.space
    }

    fn setup_warnings(&self) -> Vec<String> {
        self.setup_warnings.clone()
    }

    fn suggest(&mut self, history: &ObservationHistory, t: usize) -> Result<Suggestion> {
        self.sync(history)?;
        let mut warnings = Vec::new();
        if self.space.cardinality() == 1 {
            return Ok(Suggestion {
                combination: self.space.unrank(0)?,
                path: None,
                warnings,
            });
        }
        let (model, fell_back) = self.surrogate.model(t)?;
        if fell_back {
            warnings.push("hyperparameter search did not beat the defaults".to_string());
        }
        let no_exclusion = HashSet::new();
        let exclude = if self.config.exclude_observed {
            &self.observed
        } else {
            &no_exclusion
        };
        let selection_config = self.config.selection_config(derive_seed(self.seed, "select", t as u64));

        let mut path = None;
        let rank = match &self.repr {
            Repr::Bits if self.kind == StrategyKind::BinAa => {
                let candidates = BooleanCandidates::new(self.space.clone());
                let s = select_candidate(&model, &self.spec, &candidates, exclude, t, &selection_config)?;
                if s.exclusion_lifted {
                    warnings.push("all candidates observed; exclusion lifted".to_string());
                }
                path = Some(s.path);
                s.rank
            }
            Repr::Lookup { table } => {
                let s = select_candidate(&model, &self.spec, table, exclude, t, &selection_config)?;
                if s.exclusion_lifted {
                    warnings.push("all candidates observed; exclusion lifted".to_string());
                }
                path = Some(s.path);
                s.rank
            }
            Repr::Bits => {
                let m = self.space.code_length();
                let x = self.search_box(&model, history, &vec![0.0; m], &vec![1.0; m], t);
                let threshold = self.threshold();
                let bits = BooleanVector(x.iter().map(|&v| u8::from(v >= threshold)).collect());
                self.fold_rank(&bits)?
            }
            Repr::Decimal { scale } => {
                let x = self.decimal_search(&model, *scale, t);
                let n = self.space.cardinality();
                ((x * scale).round().max(0.0) as u64).min(n - 1)
            }
            Repr::Rembo { g } => {
                let d = g.low_dim();
                let x = self.search_box(&model, history, &vec![-1.0; d], &vec![1.0; d], t);
                let bits = rembo_recover(g, &x, self.threshold())?;
                let rank = self.fold_rank(&bits)?;
                self.pending = Some((self.space.unrank(rank)?, x));
                rank
            }
            Repr::Recon { embedding, lo, hi } => {
                let x = self.search_box(&model, history, lo, hi, t);
                let bits = embedding.recon_recover(&x, self.threshold())?;
                self.fold_rank(&bits)?
            }
        };
        Ok(Suggestion {
            combination: self.space.unrank(rank)?,
            path,
            warnings,
        })
    }
}

impl GpStrategy {
    /// EI over a seeded grid of `[0, 1]` plus the codes next to each
    /// observation, then a 1-D refinement from the best few.
    fn decimal_search(&self, model: &GpModel, scale: f64, t: usize) -> f64 {
        let cost = acquisition_cost(model, &self.spec, t);
        let mut rng = rng_from_seed(derive_seed(self.seed, "grid", t as u64));
        let mut points: Vec<f64> = (0..DEC_GRID_POINTS).map(|_| rng.random_range(0.0..=1.0)).collect();
        for x in self.surrogate.inputs() {
            for k in -DEC_NEIGHBORHOOD..=DEC_NEIGHBORHOOD {
                if k != 0 {
                    points.push((x[0] + k as f64 / scale).clamp(0.0, 1.0));
                }
            }
        }
        let costs: Vec<f64> = points.iter().map(|&p| cost(&[p])).collect();
        let mut order: Vec<usize> = (0..points.len()).collect();
        order.sort_by(|&a, &b| costs[a].total_cmp(&costs[b]).then(a.cmp(&b)));
        let starts: Vec<Vec<f64>> = order
            .iter()
            .take(self.config.restarts)
            .map(|&i| vec![points[i]])
            .collect();
        minimize_in_box(&cost, &[0.0], &[1.0], &starts, self.config.steps).0[0]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn image_bounds_match_table_box() {
        let space = CategoricalSpace::new(vec![3, 5, 2]).unwrap();
        let e = RandomEmbedding::new(&space, 4, 9).unwrap();
        let table = LookupTable::build(&space, &e).unwrap();
        assert_eq!(image_bounds(&space, &e), table.bounding_box());
    }

    #[test]
    fn proposals_are_valid_for_mixed_arities() {
        let space = CategoricalSpace::new(vec![3, 3, 2]).unwrap();
        for kind in StrategyKind::ALL {
            let cfg = StrategyConfig::new(kind).with_d(3);
            let mut s = build(&cfg, &space, 4).unwrap();
            let mut h = ObservationHistory::new();
            h.push(Combination(vec![2, 1, 0]), 1.5);
            for t in 1..6 {
                let c = s.suggest(&h, t).unwrap().combination;
                space.validate(&c).unwrap();
                let y = c.0.iter().sum::<usize>() as f64;
                h.push(c, y);
            }
        }
    }

    #[test]
    fn rembo_trains_on_proposed_point() {
        let space = CategoricalSpace::binary(5).unwrap();
        let cfg = StrategyConfig::new(StrategyKind::Rembo).with_d(2);
        let mut s = build_gp(&cfg, &space, 1).unwrap();
        let mut h = ObservationHistory::new();
        h.push(Combination(vec![1, 0, 1, 0, 0]), 0.0);
        let c = s.suggest(&h, 1).unwrap().combination;
        let (_, x) = s.pending.clone().unwrap();
        h.push(c, 1.0);
        s.sync(&h).unwrap();
        assert_eq!(s.surrogate.inputs()[1], x);
        assert!(x.iter().all(|v| (-1.0..=1.0).contains(v)));
    }
}
