//! Experiment driver: slowdown statistics against the optimal period and
//! strategy timing profiles.

use std::collections::BTreeMap;
use std::io::{Read, Write};
use std::time::Instant;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{input, Error, Result};
use crate::model::Platform;
use crate::strategy::Strategy;
use crate::synth::{generate, GenSpec};
use crate::twocatac::DEFAULT_MAX_EXPANSIONS;
use crate::weight::{rational_to_f64, Rational};

#[derive(Clone, Debug)]
pub struct ExperimentConfig {
    pub corpus: Vec<GenSpec>,
    pub platforms: Vec<(usize, usize)>,
    pub strategies: Vec<Strategy>,
    /// Node budget handed to 2CATAC.
    pub max_expansions: u64,
}

impl ExperimentConfig {
    /// `chains` chains of `n` tasks per ratio, all platforms and strategies
    /// of the slowdown study. Seeds are `base_seed..` per ratio.
    pub fn table(chains: usize, n: usize, ratios: &[f64], platforms: &[(usize, usize)], base_seed: u64) -> Self {
        let corpus = ratios
            .iter()
            .enumerate()
            .flat_map(|(k, &sr)| {
                (0..chains as u64).map(move |i| GenSpec::new(n, sr, base_seed + k as u64 * 1_000_000 + i))
            })
            .collect();
        ExperimentConfig {
            corpus,
            platforms: platforms.to_vec(),
            strategies: Strategy::STUDY.to_vec(),
            max_expansions: DEFAULT_MAX_EXPANSIONS,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.corpus.is_empty() || self.platforms.is_empty() || self.strategies.is_empty() {
            return input("corpus, platforms and strategies must be non-empty");
        }
        if !self.strategies.contains(&Strategy::Herad) {
            return input("the slowdown study needs herad as its reference");
        }
        Ok(())
    }
}

/// One strategy run on one (chain, platform) pair.
#[derive(Clone, Debug, PartialEq)]
pub struct RunRow {
    pub chain_id: usize,
    pub seed: u64,
    pub n: usize,
    pub sr: f64,
    pub b: usize,
    pub l: usize,
    pub strategy: Strategy,
    /// `None` when the run failed or ran out of budget.
    pub period: Option<Rational>,
    pub slowdown: Option<Rational>,
    pub big_used: usize,
    pub little_used: usize,
    pub stages: usize,
    pub wall_us: u64,
}

/// CSV form of [`RunRow`]; numbers rounded to 6 significant digits.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CsvRow {
    pub chain_id: usize,
    pub seed: u64,
    pub n: usize,
    pub sr: f64,
    pub b: usize,
    pub l: usize,
    pub strategy: Strategy,
    pub period: Option<f64>,
    pub slowdown: Option<f64>,
    pub big_used: usize,
    pub little_used: usize,
    pub stages: usize,
    pub wall_us: u64,
}

fn sig6(x: f64) -> f64 {
    format!("{x:.5e}").parse().expect("formatted float parses")
}

impl From<&RunRow> for CsvRow {
    fn from(r: &RunRow) -> CsvRow {
        CsvRow {
            chain_id: r.chain_id,
            seed: r.seed,
            n: r.n,
            sr: r.sr,
            b: r.b,
            l: r.l,
            strategy: r.strategy,
            period: r.period.as_ref().map(|p| sig6(rational_to_f64(p))),
            slowdown: r.slowdown.as_ref().map(|s| sig6(rational_to_f64(s))),
            big_used: r.big_used,
            little_used: r.little_used,
            stages: r.stages,
            wall_us: r.wall_us,
        }
    }
}

/// Aggregates for one (platform, ratio, strategy) cell.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CellStats {
    pub b: usize,
    pub l: usize,
    pub sr: f64,
    pub strategy: Strategy,
    pub runs: usize,
    /// Runs left out because the strategy failed or ran out of budget.
    pub flagged: usize,
    pub pct_optimal: f64,
    pub avg_slowdown: f64,
    pub median_slowdown: f64,
    pub max_slowdown: f64,
    pub avg_big_used: f64,
    pub avg_little_used: f64,
}

#[derive(Clone, Debug)]
pub struct StatsReport {
    pub rows: Vec<RunRow>,
    pub cells: Vec<CellStats>,
}

impl StatsReport {
    pub fn cell(&self, b: usize, l: usize, sr: f64, strategy: Strategy) -> Option<&CellStats> {
        self.cells
            .iter()
            .find(|c| c.b == b && c.l == l && c.strategy == strategy && (c.sr - sr).abs() < 1e-9)
    }

    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        write_csv(&self.rows, w)
    }
}

pub fn write_csv<W: Write>(rows: &[RunRow], w: W) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    for r in rows {
        out.serialize(CsvRow::from(r)).map_err(csv_error)?;
    }
    out.flush()?;
    Ok(())
}

/// Any serialisable records as CSV with a header row.
pub fn write_records<T: Serialize, W: Write>(records: &[T], w: W) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    for r in records {
        out.serialize(r).map_err(csv_error)?;
    }
    out.flush()?;
    Ok(())
}

pub fn read_csv<R: Read>(r: R) -> Result<Vec<CsvRow>> {
    csv::Reader::from_reader(r)
        .deserialize()
        .map(|row| row.map_err(csv_error))
        .collect()
}

fn csv_error(e: csv::Error) -> Error {
    Error::Input(format!("csv: {e}"))
}

pub fn run_slowdown_study(config: &ExperimentConfig) -> Result<StatsReport> {
    config.validate()?;
    let chains = config.corpus.iter().map(generate).collect::<Result<Vec<_>>>()?;
    let jobs: Vec<(usize, (usize, usize))> = (0..chains.len())
        .flat_map(|c| config.platforms.iter().map(move |&p| (c, p)))
        .collect();

    let rows: Vec<Vec<RunRow>> = jobs
        .par_iter()
        .map(|&(c, (b, l))| -> Result<Vec<RunRow>> {
            let chain = &chains[c];
            let spec = &config.corpus[c];
            let platform = Platform::new(b, l)?;
            let mut runs: Vec<RunRow> = config
                .strategies
                .iter()
                .map(|&strategy| {
                    let t0 = Instant::now();
                    let outcome = strategy.run(chain, &platform, config.max_expansions);
                    let wall_us = t0.elapsed().as_micros() as u64;
                    let mut row = RunRow {
                        chain_id: c,
                        seed: spec.seed,
                        n: chain.len(),
                        sr: spec.stateless_ratio,
                        b,
                        l,
                        strategy,
                        period: None,
                        slowdown: None,
                        big_used: 0,
                        little_used: 0,
                        stages: 0,
                        wall_us,
                    };
                    match outcome {
                        Ok(sol) => {
                            let used = sol.usage();
                            row.period = Some(*sol.period());
                            row.big_used = used.big;
                            row.little_used = used.little;
                            row.stages = sol.stages().len();
                        }
                        Err(e) if e.is_infeasibility() => {}
                        Err(e) => return Err(e),
                    }
                    Ok(row)
                })
                .collect::<Result<_>>()?;
            let reference = runs
                .iter()
                .find(|r| r.strategy == Strategy::Herad)
                .and_then(|r| r.period)
                .ok_or_else(|| Error::Infeasible(format!("herad failed on chain {c}")))?;
            for r in &mut runs {
                r.slowdown = r.period.map(|p| p / reference);
            }
            Ok(runs)
        })
        .collect::<Result<_>>()?;
    let rows: Vec<RunRow> = rows.into_iter().flatten().collect();
    let cells = aggregate(&rows);
    Ok(StatsReport { rows, cells })
}

fn big(r: &Rational) -> BigRational {
    BigRational::new(BigInt::from(*r.numer()), BigInt::from(*r.denom()))
}

/// Cell statistics, with slowdown sums kept exact.
pub fn aggregate(rows: &[RunRow]) -> Vec<CellStats> {
    let mut groups: BTreeMap<(usize, usize, i64, Strategy), Vec<&RunRow>> = BTreeMap::new();
    for r in rows {
        let key = (r.b, r.l, (r.sr * 1e6).round() as i64, r.strategy);
        groups.entry(key).or_default().push(r);
    }
    groups
        .into_iter()
        .map(|((b, l, _, strategy), group)| {
            let ok: Vec<&RunRow> = group.iter().copied().filter(|r| r.slowdown.is_some()).collect();
            let mut slow: Vec<Rational> = ok.iter().map(|r| r.slowdown.expect("filtered")).collect();
            slow.sort();
            let k = slow.len();
            let count = BigRational::from_integer(BigInt::from(k.max(1)));
            let sum = slow.iter().fold(BigRational::zero(), |acc, s| acc + big(s));
            let avg = if k == 0 {
                f64::NAN
            } else {
                (sum / &count).to_f64().unwrap_or(f64::NAN)
            };
            let median = match k {
                0 => f64::NAN,
                _ if k % 2 == 1 => rational_to_f64(&slow[k / 2]),
                _ => ((big(&slow[k / 2 - 1]) + big(&slow[k / 2])) / BigRational::from_integer(BigInt::from(2)))
                    .to_f64()
                    .unwrap_or(f64::NAN),
            };
            let optimal = slow.iter().filter(|s| s.is_one()).count();
            let mean = |f: fn(&RunRow) -> usize| {
                if k == 0 {
                    f64::NAN
                } else {
                    ok.iter().map(|r| f(r)).sum::<usize>() as f64 / k as f64
                }
            };
            CellStats {
                b,
                l,
                sr: group[0].sr,
                strategy,
                runs: k,
                flagged: group.len() - k,
                pct_optimal: if k == 0 {
                    f64::NAN
                } else {
                    100.0 * optimal as f64 / k as f64
                },
                avg_slowdown: avg,
                median_slowdown: median,
                max_slowdown: slow.last().map(rational_to_f64).unwrap_or(f64::NAN),
                avg_big_used: mean(|r| r.big_used),
                avg_little_used: mean(|r| r.little_used),
            }
        })
        .collect()
}

/// One instance size of the timing profile.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProfilePoint {
    pub n: usize,
    pub b: usize,
    pub l: usize,
    pub sr: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TimingRow {
    pub n: usize,
    pub b: usize,
    pub l: usize,
    pub sr: f64,
    pub strategy: Strategy,
    pub reps: usize,
    /// Runs stopped by the node budget; their times are lower bounds.
    pub truncated: usize,
    pub median_us: f64,
    pub mean_us: f64,
}

/// Times every strategy on `reps` fresh chains per point. Chain `i` of a
/// point uses seed `base_seed + i`.
pub fn run_time_profile(
    points: &[ProfilePoint],
    strategies: &[Strategy],
    reps: usize,
    base_seed: u64,
    max_expansions: u64,
) -> Result<Vec<TimingRow>> {
    if reps == 0 {
        return input("need at least one repetition");
    }
    let mut out = Vec::new();
    for p in points {
        let platform = Platform::new(p.b, p.l)?;
        let chains = (0..reps as u64)
            .map(|i| generate(&GenSpec::new(p.n, p.sr, base_seed + i)))
            .collect::<Result<Vec<_>>>()?;
        for &strategy in strategies {
            let mut times = Vec::with_capacity(reps);
            let mut truncated = 0;
            for chain in &chains {
                let t0 = Instant::now();
                let outcome = strategy.run(chain, &platform, max_expansions);
                times.push(t0.elapsed().as_secs_f64() * 1e6);
                match outcome {
                    Ok(_) => {}
                    Err(Error::BudgetExceeded { .. }) => truncated += 1,
                    Err(e) if e.is_infeasibility() => {}
                    Err(e) => return Err(e),
                }
            }
            out.push(TimingRow {
                n: p.n,
                b: p.b,
                l: p.l,
                sr: p.sr,
                strategy,
                reps,
                truncated,
                median_us: median(&mut times),
                mean_us: times.iter().sum::<f64>() / reps as f64,
            });
        }
    }
    Ok(out)
}

pub fn median(xs: &mut [f64]) -> f64 {
    if xs.is_empty() {
        return f64::NAN;
    }
    xs.sort_by(f64::total_cmp);
    let k = xs.len();
    if k % 2 == 1 {
        xs[k / 2]
    } else {
        (xs[k / 2 - 1] + xs[k / 2]) / 2.0
    }
}

/// Least-squares slope of `ln y` against `ln x`.
pub fn loglog_slope(points: &[(f64, f64)]) -> f64 {
    let pts: Vec<(f64, f64)> = points.iter().map(|&(x, y)| (x.ln(), y.ln())).collect();
    let k = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / k;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / k;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    sxy / sxx
}
