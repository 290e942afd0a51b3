//! Benchmark classes, algorithm dispatch and CSV reporting.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

use rayon::prelude::*;
use thiserror::Error;

use crate::approx::approx_solve;
use crate::bounds::lb_root;
use crate::exact::{branch_and_price, solve_enumeration, BnpConfig, BnpError, TooLarge};
use crate::generator::{generate_instance, mix_seed, GeneratorError, GeneratorParams};
use crate::heuristic::{ffd_construct, vns, VnsConfig, VnsError};
use crate::instance::{val_bpps_unchecked, Instance, Solution};
use crate::io::{parse_instance, serialize_instance, ParseError, ProofStatus, RunMetadata};

/// Item counts of the benchmark classes.
pub const CLASS_SIZES: [usize; 4] = [10, 50, 100, 200];
pub const REPLICATES: usize = 10;
pub const CSV_HEADER: &str = "class,n,d,seed,algo,ub,lb,gap,time_s,nodes,cols,status";
pub const SUMMARY_HEADER: &str = "class,algo,runs,failed,gap,time_s,opt,nodes,cols";

/// Scenario count relative to the item count.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DMode {
    Half,
    Equal,
    Double,
}

impl DMode {
    pub const ALL: [DMode; 3] = [DMode::Half, DMode::Equal, DMode::Double];

    pub fn scenarios(self, n: usize) -> usize {
        match self {
            DMode::Half => n / 2,
            DMode::Equal => n,
            DMode::Double => 2 * n,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BenchClass {
    /// Position in the class list; part of the seed derivation.
    pub index: usize,
    pub n: usize,
    pub mode: DMode,
    pub replicates: usize,
    pub base_seed: u64,
}

impl BenchClass {
    pub fn d(&self) -> usize {
        self.mode.scenarios(self.n)
    }

    pub fn id(&self) -> String {
        format!("n{}_d{}", self.n, self.d())
    }

    pub fn instance_seed(&self, replicate: usize) -> u64 {
        mix_seed(self.base_seed, self.index as u64, replicate as u64)
    }

    pub fn params(&self, replicate: usize) -> GeneratorParams {
        GeneratorParams::new(self.n, self.d(), self.instance_seed(replicate))
    }
}

/// The twelve classes: n in {10, 50, 100, 200} and d in {n/2, n, 2n}.
pub fn benchmark_classes(base_seed: u64) -> Vec<BenchClass> {
    let mut out = Vec::new();
    for &n in &CLASS_SIZES {
        for mode in DMode::ALL {
            out.push(BenchClass {
                index: out.len(),
                n,
                mode,
                replicates: REPLICATES,
                base_seed,
            });
        }
    }
    out
}

pub fn instance_file_name(n: usize, d: usize, replicate: usize) -> String {
    format!("bpps_n{n}_d{d}_s{replicate}.txt")
}

/// One instance of a suite with its provenance.
#[derive(Debug, Clone, PartialEq)]
pub struct SuiteInstance {
    pub class: String,
    pub replicate: usize,
    pub seed: u64,
    pub instance: Instance,
}

pub fn generate_suite(classes: &[BenchClass]) -> Result<Vec<SuiteInstance>, GeneratorError> {
    let mut out = Vec::new();
    for c in classes {
        for r in 0..c.replicates {
            out.push(SuiteInstance {
                class: c.id(),
                replicate: r,
                seed: c.instance_seed(r),
                instance: generate_instance(&c.params(r))?,
            });
        }
    }
    Ok(out)
}

#[derive(Debug, Error)]
pub enum BenchError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Parse { path: PathBuf, source: ParseError },
    #[error(transparent)]
    Generator(#[from] GeneratorError),
    #[error("unknown algorithm `{0}`")]
    UnknownAlgorithm(String),
    #[error("worker pool: {0}")]
    Pool(String),
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> BenchError + '_ {
    move |source| BenchError::Io {
        path: path.to_path_buf(),
        source,
    }
}

/// Writes every instance of the classes into `out_dir`.
pub fn cmd_gen(classes: &[BenchClass], out_dir: &Path) -> Result<Vec<PathBuf>, BenchError> {
    fs::create_dir_all(out_dir).map_err(io_err(out_dir))?;
    let mut paths = Vec::new();
    for c in classes {
        for r in 0..c.replicates {
            let inst = generate_instance(&c.params(r))?;
            let path = out_dir.join(instance_file_name(c.n, c.d(), r));
            let text = format!(
                "# class {} replicate {r} seed {}\n{}",
                c.id(),
                c.instance_seed(r),
                serialize_instance(&inst)
            );
            fs::write(&path, text).map_err(io_err(&path))?;
            paths.push(path);
        }
    }
    Ok(paths)
}

/// Reads `bpps_n{n}_d{d}_s{r}.txt` files from a directory, ordered by
/// (n, d, replicate).
pub fn load_suite(dir: &Path) -> Result<Vec<SuiteInstance>, BenchError> {
    let mut found: Vec<(usize, usize, usize, PathBuf)> = Vec::new();
    for entry in fs::read_dir(dir).map_err(io_err(dir))? {
        let path = entry.map_err(io_err(dir))?.path();
        let Some(name) = path.file_name().and_then(|s| s.to_str()) else {
            continue;
        };
        if let Some(key) = parse_file_name(name) {
            found.push((key.0, key.1, key.2, path));
        }
    }
    found.sort();
    let mut out = Vec::new();
    for (n, d, r, path) in found {
        let text = fs::read_to_string(&path).map_err(io_err(&path))?;
        let instance = parse_instance(&text).map_err(|source| BenchError::Parse {
            path: path.clone(),
            source,
        })?;
        let seed = text
            .lines()
            .next()
            .and_then(|l| l.rsplit("seed ").next())
            .and_then(|s| s.trim().parse().ok())
            .unwrap_or(0);
        out.push(SuiteInstance {
            class: format!("n{n}_d{d}"),
            replicate: r,
            seed,
            instance,
        });
    }
    Ok(out)
}

fn parse_file_name(name: &str) -> Option<(usize, usize, usize)> {
    let rest = name.strip_prefix("bpps_n")?.strip_suffix(".txt")?;
    let (n, rest) = rest.split_once("_d")?;
    let (d, r) = rest.split_once("_s")?;
    Some((n.parse().ok()?, d.parse().ok()?, r.parse().ok()?))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Algo {
    Ffd,
    Vns,
    FfApprox,
    Bp,
    VnsBp,
    Enum,
}

impl Algo {
    pub const ALL: [Algo; 6] = [Algo::Ffd, Algo::Vns, Algo::FfApprox, Algo::Bp, Algo::VnsBp, Algo::Enum];

    pub fn name(self) -> &'static str {
        match self {
            Algo::Ffd => "ffd",
            Algo::Vns => "vns",
            Algo::FfApprox => "ff-approx",
            Algo::Bp => "bp",
            Algo::VnsBp => "vns+bp",
            Algo::Enum => "enum",
        }
    }

    fn is_exact(self) -> bool {
        matches!(self, Algo::Bp | Algo::VnsBp | Algo::Enum)
    }
}

impl fmt::Display for Algo {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algo {
    type Err = BenchError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Algo::ALL
            .into_iter()
            .find(|a| a.name() == s)
            .ok_or_else(|| BenchError::UnknownAlgorithm(s.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveOptions {
    pub seed: u64,
    /// VNS wall-clock limit.
    pub t_max: f64,
    pub c_max: u64,
    /// Branch-and-price wall-clock limit; for `vns+bp` the total budget.
    pub t_limit: f64,
    pub warm_columns: bool,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            seed: 0,
            t_max: 60.0,
            c_max: 500,
            t_limit: 120.0,
            warm_columns: true,
        }
    }
}

#[derive(Debug, Error)]
pub enum SolveError {
    #[error(transparent)]
    Vns(#[from] VnsError),
    #[error(transparent)]
    Bnp(#[from] BnpError),
    #[error(transparent)]
    Enumeration(#[from] TooLarge),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveOutcome {
    pub algo: Algo,
    pub solution: Solution,
    pub ub: usize,
    pub lb: usize,
    pub status: ProofStatus,
    pub time_s: f64,
    pub nodes: Option<u64>,
    pub cols: Option<u64>,
    /// VNS value that seeded `vns+bp`.
    pub warm_value: Option<usize>,
}

impl SolveOutcome {
    pub fn gap(&self) -> f64 {
        gap(self.ub, self.lb)
    }

    pub fn metadata(&self) -> RunMetadata {
        let mut m = RunMetadata::new(self.algo.name(), self.time_s, self.status);
        m.lower_bound = Some(self.lb);
        m.nodes = self.nodes;
        m.columns = self.cols;
        m
    }
}

/// `(UB - LB) / UB` as a fraction.
pub fn gap(ub: usize, lb: usize) -> f64 {
    if ub == 0 {
        0.0
    } else {
        ub.saturating_sub(lb) as f64 / ub as f64
    }
}

fn heuristic_outcome(instance: &Instance, algo: Algo, solution: Solution, start: Instant) -> SolveOutcome {
    let ub = val_bpps_unchecked(instance, &solution);
    let lb = lb_root(instance).min(ub);
    SolveOutcome {
        algo,
        solution,
        ub,
        lb,
        status: if lb >= ub { ProofStatus::Optimal } else { ProofStatus::Gap },
        time_s: start.elapsed().as_secs_f64(),
        nodes: None,
        cols: None,
        warm_value: None,
    }
}

/// Runs one algorithm on one instance.
pub fn solve(instance: &Instance, algo: Algo, opts: &SolveOptions) -> Result<SolveOutcome, SolveError> {
    let start = Instant::now();
    let vns_config = VnsConfig {
        t_max: opts.t_max,
        c_max: opts.c_max,
        seed: opts.seed,
        ..VnsConfig::default()
    };
    match algo {
        Algo::Ffd => Ok(heuristic_outcome(instance, algo, ffd_construct(instance), start)),
        Algo::FfApprox => Ok(heuristic_outcome(instance, algo, approx_solve(instance), start)),
        Algo::Vns => {
            let (sol, _) = vns(instance, &ffd_construct(instance), &vns_config)?;
            Ok(heuristic_outcome(instance, algo, sol, start))
        }
        Algo::Enum => {
            let sol = solve_enumeration(instance)?;
            let ub = val_bpps_unchecked(instance, &sol);
            Ok(SolveOutcome {
                algo,
                solution: sol,
                ub,
                lb: ub,
                status: ProofStatus::Optimal,
                time_s: start.elapsed().as_secs_f64(),
                nodes: None,
                cols: None,
                warm_value: None,
            })
        }
        Algo::Bp | Algo::VnsBp => {
            let mut config = BnpConfig {
                time_limit: opts.t_limit,
                warm_columns: opts.warm_columns,
                ..BnpConfig::default()
            };
            let mut warm_value = None;
            if algo == Algo::VnsBp {
                let (warm, _) = vns(instance, &ffd_construct(instance), &vns_config)?;
                warm_value = Some(val_bpps_unchecked(instance, &warm));
                config.warm_start = Some(warm);
                let left = opts.t_limit - start.elapsed().as_secs_f64();
                config.time_limit = left.max(1.0);
            }
            let (sol, stats) = branch_and_price(instance, &config)?;
            Ok(SolveOutcome {
                algo,
                solution: sol,
                ub: stats.upper_bound,
                lb: stats.lower_bound,
                status: stats.status,
                time_s: start.elapsed().as_secs_f64(),
                nodes: Some(stats.nodes),
                cols: Some(stats.columns),
                warm_value,
            })
        }
    }
}

/// One CSV line of the per-instance table.
#[derive(Debug, Clone, PartialEq)]
pub struct BenchRow {
    pub class: String,
    pub n: usize,
    pub d: usize,
    pub seed: u64,
    pub replicate: usize,
    pub algo: Algo,
    /// `None` when the run failed.
    pub outcome: Option<RowOutcome>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RowOutcome {
    pub ub: usize,
    pub lb: usize,
    pub time_s: f64,
    pub nodes: Option<u64>,
    pub cols: Option<u64>,
    pub status: ProofStatus,
}

impl RowOutcome {
    pub fn gap(&self) -> f64 {
        gap(self.ub, self.lb)
    }
}

impl BenchRow {
    pub fn to_csv(&self, with_time: bool) -> String {
        let head = format!("{},{},{},{},{}", self.class, self.n, self.d, self.seed, self.algo);
        let opt = |v: Option<u64>| v.map(|x| x.to_string()).unwrap_or_default();
        match &self.outcome {
            Some(o) => format!(
                "{head},{},{},{:.2},{},{},{},{}",
                o.ub,
                o.lb,
                100.0 * o.gap(),
                if with_time { format!("{:.3}", o.time_s) } else { String::new() },
                opt(o.nodes),
                opt(o.cols),
                o.status
            ),
            None => format!("{head},,,,,,,failed"),
        }
    }
}

/// Class-level means in the layout of the results table.
#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub class: String,
    pub algo: Algo,
    pub runs: usize,
    pub failed: usize,
    /// Mean gap in percent.
    pub gap: f64,
    pub time_s: f64,
    /// Instances with zero gap.
    pub opt: usize,
    pub nodes: Option<f64>,
    pub cols: Option<f64>,
}

impl SummaryRow {
    pub fn to_csv(&self, with_time: bool) -> String {
        let opt = |v: Option<f64>| v.map(|x| format!("{x:.1}")).unwrap_or_default();
        format!(
            "{},{},{},{},{:.2},{},{},{},{}",
            self.class,
            self.algo,
            self.runs,
            self.failed,
            self.gap,
            if with_time { format!("{:.3}", self.time_s) } else { String::new() },
            self.opt,
            opt(self.nodes),
            opt(self.cols)
        )
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchReport {
    pub rows: Vec<BenchRow>,
    pub summary: Vec<SummaryRow>,
}

impl BenchReport {
    pub fn rows_csv(&self, with_time: bool) -> String {
        let mut s = format!("{CSV_HEADER}\n");
        for r in &self.rows {
            s.push_str(&r.to_csv(with_time));
            s.push('\n');
        }
        s
    }

    pub fn summary_csv(&self, with_time: bool) -> String {
        let mut s = format!("{SUMMARY_HEADER}\n");
        for r in &self.summary {
            s.push_str(&r.to_csv(with_time));
            s.push('\n');
        }
        s
    }
}

/// Solves every (instance, algorithm) pair on `workers` threads and
/// aggregates per class. Heuristic lower bounds are lifted to the best
/// exact-solver bound on the same instance when one is available.
pub fn cmd_bench(
    suite: &[SuiteInstance],
    algos: &[Algo],
    opts: &SolveOptions,
    workers: usize,
) -> Result<BenchReport, BenchError> {
    let jobs: Vec<(usize, Algo)> = (0..suite.len())
        .flat_map(|i| algos.iter().map(move |&a| (i, a)))
        .collect();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| BenchError::Pool(e.to_string()))?;
    let results: Vec<Option<SolveOutcome>> = pool.install(|| {
        jobs.par_iter()
            .map(|&(i, a)| solve(&suite[i].instance, a, opts).ok())
            .collect()
    });

    let mut rows: Vec<BenchRow> = jobs
        .iter()
        .zip(results)
        .map(|(&(i, algo), res)| {
            let si = &suite[i];
            BenchRow {
                class: si.class.clone(),
                n: si.instance.num_items(),
                d: si.instance.num_scenarios(),
                seed: si.seed,
                replicate: si.replicate,
                algo,
                outcome: res.map(|o| RowOutcome {
                    ub: o.ub,
                    lb: o.lb,
                    time_s: o.time_s,
                    nodes: o.nodes,
                    cols: o.cols,
                    status: o.status,
                }),
            }
        })
        .collect();

    // lift heuristic bounds with exact-solver bounds on the same instance
    for i in 0..suite.len() {
        let idx: Vec<usize> = (0..rows.len()).filter(|&r| jobs[r].0 == i).collect();
        let exact_lb = idx
            .iter()
            .filter(|&&r| rows[r].algo.is_exact())
            .filter_map(|&r| rows[r].outcome.as_ref().map(|o| o.lb))
            .max();
        if let Some(lb) = exact_lb {
            for &r in &idx {
                if let Some(o) = rows[r].outcome.as_mut() {
                    if lb > o.lb {
                        o.lb = lb.min(o.ub);
                        if o.lb >= o.ub {
                            o.status = ProofStatus::Optimal;
                        }
                    }
                }
            }
        }
    }

    let summary = summarize(&rows);
    Ok(BenchReport { rows, summary })
}

/// Arithmetic means per (class, algorithm), in first-appearance order.
pub fn summarize(rows: &[BenchRow]) -> Vec<SummaryRow> {
    let mut keys: Vec<(String, Algo)> = Vec::new();
    for r in rows {
        let key = (r.class.clone(), r.algo);
        if !keys.contains(&key) {
            keys.push(key);
        }
    }
    keys.into_iter()
        .map(|(class, algo)| {
            let group: Vec<&BenchRow> = rows.iter().filter(|r| r.class == class && r.algo == algo).collect();
            let done: Vec<&RowOutcome> = group.iter().filter_map(|r| r.outcome.as_ref()).collect();
            let m = done.len().max(1) as f64;
            let mean_opt = |f: &dyn Fn(&RowOutcome) -> Option<u64>| {
                let vals: Vec<u64> = done.iter().filter_map(|o| f(o)).collect();
                (!vals.is_empty()).then(|| vals.iter().sum::<u64>() as f64 / vals.len() as f64)
            };
            SummaryRow {
                class,
                algo,
                runs: group.len(),
                failed: group.len() - done.len(),
                gap: done.iter().map(|o| 100.0 * o.gap()).sum::<f64>() / m,
                time_s: done.iter().map(|o| o.time_s).sum::<f64>() / m,
                opt: done.iter().filter(|o| o.lb >= o.ub).count(),
                nodes: mean_opt(&|o| o.nodes),
                cols: mean_opt(&|o| o.cols),
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn twelve_classes_of_ten() {
        let classes = benchmark_classes(1);
        assert_eq!(classes.len(), 12);
        assert_eq!(classes.iter().map(|c| c.replicates).sum::<usize>(), 120);
        assert_eq!(classes[0].id(), "n10_d5");
        assert_eq!(classes[11].id(), "n200_d400");
    }

    #[test]
    fn file_names_round_trip() {
        let name = instance_file_name(50, 25, 3);
        assert_eq!(name, "bpps_n50_d25_s3.txt");
        assert_eq!(parse_file_name(&name), Some((50, 25, 3)));
        assert_eq!(parse_file_name("other.txt"), None);
    }

    #[test]
    fn gap_spot_check() {
        assert!((gap(5, 4) - 0.2).abs() < 1e-12);
        assert_eq!(gap(3, 3), 0.0);
    }

    #[test]
    fn algo_names() {
        for a in Algo::ALL {
            assert_eq!(a.name().parse::<Algo>().unwrap(), a);
        }
        assert!("cplex".parse::<Algo>().is_err());
    }

    #[test]
    fn summary_means() {
        let row = |ub, lb, t| BenchRow {
            class: "c".into(),
            n: 1,
            d: 1,
            seed: 0,
            replicate: 0,
            algo: Algo::Bp,
            outcome: Some(RowOutcome {
                ub,
                lb,
                time_s: t,
                nodes: Some(2),
                cols: None,
                status: ProofStatus::Gap,
            }),
        };
        let mut rows = vec![row(5, 4, 1.0), row(3, 3, 3.0)];
        rows.push(BenchRow {
            outcome: None,
            ..row(1, 1, 0.0)
        });
        let s = summarize(&rows);
        assert_eq!(s.len(), 1);
        assert_eq!((s[0].runs, s[0].failed, s[0].opt), (3, 1, 1));
        assert!((s[0].gap - 10.0).abs() < 1e-9);
        assert!((s[0].time_s - 2.0).abs() < 1e-9);
        assert_eq!(s[0].nodes, Some(2.0));
        assert_eq!(s[0].cols, None);
    }
}
