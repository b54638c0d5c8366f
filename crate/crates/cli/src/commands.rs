use std::io::Write;
use std::path::Path;

use anyhow::{bail, Context, Result};
use rayon::prelude::*;
use strata_core::analytic::{
    b0_matching_rows, exact_distribution_oracle, independent_1matching, independent_b0matching,
    max_abs_error, monte_carlo_distribution, one_matching_mass, one_matching_rows,
    sweep_b0_matching, total_variation, ChoiceDistribution, MatchingLaw,
};
use strata_core::btapp::{share_ratio_curve, BandwidthProfile, ShareRatioParams};
use strata_core::dynamics::{
    run_churn, run_convergence, run_removal, ChurnSpec, RunOptions, Trajectory,
};
use strata_core::generators::{
    degree_to_probability, gen_complete, gen_erdos_renyi, sample_capacities_normal,
};
use strata_core::solver::unfilled_slots;
use strata_core::structure::{average_cluster_size, mmo, sigma_sweep};
use strata_core::{io, stable_configuration, Configuration, Error, Instance, Seed, SlotCapacities};

use crate::output;
use crate::{
    AnalyticArgs, BtappArgs, Cli, Command, DynamicsArgs, EdgeProbability, GenCapsArgs,
    GenGraphArgs, Mode, OracleArgs, OracleKind, SolveArgs, Start, SweepArgs,
};

/// Offset separating the dynamics RNG of a run from its graph seed.
const RUN_STREAM: u64 = 1 << 32;

pub fn run(cli: Cli) -> Result<()> {
    if let Some(jobs) = cli.jobs {
        if jobs == 0 {
            return Err(Error::param("jobs", "need at least one thread").into());
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build_global()
            .context("configuring the thread pool")?;
    }
    let out = cli.out.as_deref();
    match cli.command {
        Command::Solve(a) => solve(a, out),
        Command::Dynamics(a) => dynamics(a, out),
        Command::Sweep(a) => sweep(a, out),
        Command::Analytic(a) => analytic(a, out),
        Command::Oracle(a) => oracle(a, out),
        Command::Btapp(a) => btapp(a, out),
        Command::GenGraph(a) => gen_graph(a, out),
        Command::GenCaps(a) => gen_caps(a, out),
    }
}

fn read(path: &Path) -> Result<String> {
    Ok(io::read_to_string(path)?)
}

fn solve(a: SolveArgs, out: Option<&Path>) -> Result<()> {
    let graph = if let Some(n) = a.source.complete {
        gen_complete(n)
    } else if let Some(path) = &a.source.graph {
        io::parse_graph(&read(path)?).with_context(|| format!("reading {}", path.display()))?
    } else if let Some(n) = a.source.er {
        gen_erdos_renyi(n, a.d.expect("clap requires --d with --er"), Seed(a.seed))?
    } else {
        unreachable!("clap requires a graph source")
    };
    let n = graph.n();
    let caps = if let Some(b) = a.b {
        SlotCapacities::constant(n, b)
    } else if let Some(path) = &a.caps {
        io::parse_capacities(&read(path)?).with_context(|| format!("reading {}", path.display()))?
    } else if let (Some(mean), Some(sigma)) = (a.b_mean, a.b_sigma) {
        sample_capacities_normal(n, mean, sigma, Seed(a.seed))?
    } else {
        return Err(Error::param("b", "give --b, --caps or --b-mean/--b-sigma").into());
    };
    let instance = Instance::new(graph, caps)?;
    let config = stable_configuration(&instance);
    output::open(out)?.write_all(io::format_configuration(&config).as_bytes())?;
    eprintln!(
        "edges={} unfilled_slots={} mean_cluster={} mmo={}",
        config.edge_count(),
        unfilled_slots(&config, &instance),
        average_cluster_size(&config).value,
        mmo(&config, instance.ranking()).value,
    );
    Ok(())
}

fn dynamics(a: DynamicsArgs, out: Option<&Path>) -> Result<()> {
    if let Some(v) = a.victim {
        if !(1..=a.n).contains(&v) {
            return Err(Error::param("victim", format!("rank {v} outside 1..={}", a.n)).into());
        }
    }
    if a.seeds == 0 {
        return Err(Error::param("seeds", "need at least one run").into());
    }
    let runs: Vec<Trajectory> = (0..a.seeds as u64)
        .into_par_iter()
        .map(|k| {
            let seed = Seed(a.seed).offset(k);
            let graph = gen_erdos_renyi(a.n, a.d, seed)?;
            let instance = Instance::new(graph, SlotCapacities::constant(a.n, a.b))?;
            let opts = RunOptions {
                strategy: a.strategy.into(),
                max_units: a.max_units,
                seed: seed.offset(RUN_STREAM),
            };
            let initial = match a.start {
                Start::Empty => Configuration::empty(a.n),
                Start::Stable => stable_configuration(&instance),
            };
            Ok(match a.mode {
                Mode::Convergence => run_convergence(&instance, initial, &opts)?,
                Mode::Removal => {
                    let victim = a.victim.expect("clap requires --victim in removal mode") - 1;
                    run_removal(&instance, victim, &opts)?
                }
                Mode::Churn => {
                    let churn = ChurnSpec {
                        rate: a.rate,
                        expected_degree: a.d,
                    };
                    run_churn(&instance, initial, &churn, &opts)?
                }
            })
        })
        .collect::<strata_core::Result<_>>()?;

    let mut w = output::open(out)?;
    writeln!(w, "seed,unit,disorder,active_count,population")?;
    for (k, t) in runs.iter().enumerate() {
        let seed = Seed(a.seed).offset(k as u64).0;
        for pt in &t.points {
            writeln!(
                w,
                "{seed},{},{},{},{}",
                pt.unit, pt.disorder, pt.active, pt.population
            )?;
        }
    }
    w.flush()?;

    let converged: Vec<usize> = runs.iter().filter_map(Trajectory::converged_at).collect();
    let half = a.max_units / 2;
    let late = runs.iter().map(|t| t.mean_disorder_from(half)).sum::<f64>() / runs.len() as f64;
    eprintln!(
        "runs={} converged={} max_units_to_converge={} mean_disorder_from_unit_{half}={late}",
        runs.len(),
        converged.len(),
        converged
            .iter()
            .max()
            .map_or("-".to_string(), |u| u.to_string()),
    );
    Ok(())
}

fn sweep(a: SweepArgs, out: Option<&Path>) -> Result<()> {
    let rows = sigma_sweep(a.bbar, &a.sigmas, a.n, a.seeds, Seed(a.seed))?;
    let mut w = output::open(out)?;
    writeln!(w, "sigma,mean_cluster,mmo,seed_count")?;
    for r in rows {
        writeln!(
            w,
            "{},{},{},{}",
            r.sigma, r.mean_cluster, r.mmo, r.seed_count
        )?;
    }
    w.flush()?;
    Ok(())
}

fn edge_probability(n: usize, e: &EdgeProbability) -> Result<f64> {
    Ok(match (e.p, e.d) {
        (Some(p), _) => {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::param("p", format!("{p} outside [0, 1]")).into());
            }
            p
        }
        (None, Some(d)) => degree_to_probability(n, d)?,
        (None, None) => unreachable!("clap requires --p or --d"),
    })
}

fn check_b0(b0: usize) -> Result<()> {
    if b0 == 0 {
        bail!(Error::param("b0", "must be at least 1"));
    }
    Ok(())
}

fn analytic(a: AnalyticArgs, out: Option<&Path>) -> Result<()> {
    let p = edge_probability(a.n, &a.edge)?;
    check_b0(a.b0)?;
    let mut w = output::open(out)?;
    if a.mass {
        let mass = if a.b0 == 1 {
            one_matching_mass(a.n, p)?
        } else {
            let mut mass = vec![0.0; a.n];
            sweep_b0_matching(a.n, p, a.b0, |blk| {
                let m = blk.total();
                mass[blk.i] += m;
                mass[blk.j] += m;
            })?;
            mass
        };
        writeln!(w, "i,mass")?;
        for (i, m) in mass.iter().enumerate() {
            writeln!(w, "{},{m}", i + 1)?;
        }
        w.flush()?;
        return Ok(());
    }

    let rows: Vec<usize> = match &a.rows {
        Some(r) => r
            .iter()
            .map(|&i| {
                if (1..=a.n).contains(&i) {
                    Ok(i - 1)
                } else {
                    Err(Error::param(
                        "rows",
                        format!("rank {i} outside 1..={}", a.n),
                    ))
                }
            })
            .collect::<strata_core::Result<_>>()?,
        None => (0..a.n).collect(),
    };
    // per-choice rows: by_row[r][c][j]
    let by_row = if a.b0 == 1 {
        one_matching_rows(a.n, p, &rows)?
            .into_iter()
            .map(|r| vec![r])
            .collect()
    } else {
        b0_matching_rows(a.n, p, a.b0, &rows)?
    };
    if a.by_choice {
        writeln!(w, "i,c,j,prob")?;
    } else {
        writeln!(w, "i,j,prob")?;
    }
    for (&i, per_choice) in rows.iter().zip(&by_row) {
        for j in (0..a.n).filter(|&j| j != i) {
            if a.by_choice {
                for (c, row) in per_choice.iter().enumerate() {
                    writeln!(w, "{},{},{},{}", i + 1, c + 1, j + 1, row[j])?;
                }
            } else {
                let prob: f64 = per_choice.iter().map(|row| row[j]).sum();
                writeln!(w, "{},{},{prob}", i + 1, j + 1)?;
            }
        }
    }
    w.flush()?;
    Ok(())
}

fn oracle(a: OracleArgs, out: Option<&Path>) -> Result<()> {
    let p = edge_probability(a.n, &a.edge)?;
    check_b0(a.b0)?;
    let caps = SlotCapacities::constant(a.n, a.b0);
    let truth: ChoiceDistribution = match a.kind {
        OracleKind::Exact => exact_distribution_oracle(a.n, p, &caps)?,
        OracleKind::MonteCarlo => monte_carlo_distribution(a.n, p, &caps, a.draws, Seed(a.seed))?,
    };
    let model: Box<dyn MatchingLaw> = if a.b0 == 1 {
        Box::new(independent_1matching(a.n, p)?)
    } else {
        Box::new(independent_b0matching(a.n, p, a.b0)?)
    };
    let mut w = output::open(out)?;
    writeln!(w, "i,max_abs_error,total_variation,mass_model,mass_oracle")?;
    let (mut worst_err, mut worst_tv) = (0.0f64, 0.0f64);
    for i in 0..a.n {
        let (m, t) = (model.row(i), truth.row(i));
        let err = max_abs_error(&m, &t);
        let tv = total_variation(&m, &t);
        worst_err = worst_err.max(err);
        worst_tv = worst_tv.max(tv);
        writeln!(
            w,
            "{},{err},{tv},{},{}",
            i + 1,
            model.mass(i),
            truth.mass(i)
        )?;
    }
    w.flush()?;
    eprintln!("max_abs_error={worst_err} max_total_variation={worst_tv}");
    Ok(())
}

fn btapp(a: BtappArgs, out: Option<&Path>) -> Result<()> {
    let profile = match &a.cdf {
        Some(path) => BandwidthProfile::load(path)?,
        None => BandwidthProfile::synthetic(),
    };
    let params = ShareRatioParams {
        b0: a.b0,
        d: a.d,
        n: a.n,
        slot_divisor: a.slot_divisor,
    };
    let curve = share_ratio_curve(&profile, &params)?;
    let mut w = output::open(out)?;
    writeln!(
        w,
        "rank,quantile,upload_kbps,expected_download_kbps,share_ratio,mass"
    )?;
    for r in &curve.rows {
        writeln!(
            w,
            "{},{},{},{},{},{}",
            r.rank, r.quantile, r.upload, r.download, r.ratio, r.mass
        )?;
    }
    w.flush()?;
    Ok(())
}

fn gen_graph(a: GenGraphArgs, out: Option<&Path>) -> Result<()> {
    let graph = match a.d {
        Some(d) => gen_erdos_renyi(a.n, d, Seed(a.seed))?,
        None => gen_complete(a.n),
    };
    output::open(out)?.write_all(io::format_graph(&graph).as_bytes())?;
    eprintln!("edges={}", graph.edge_count());
    Ok(())
}

fn gen_caps(a: GenCapsArgs, out: Option<&Path>) -> Result<()> {
    let caps = sample_capacities_normal(a.n, a.b_mean, a.b_sigma, Seed(a.seed))?;
    output::open(out)?.write_all(io::format_capacities(&caps).as_bytes())?;
    eprintln!("total_slots={}", caps.total());
    Ok(())
}
