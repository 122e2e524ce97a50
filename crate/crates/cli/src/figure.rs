//! Data for the reference figure panels, one file per panel.

use std::fs;
use std::path::PathBuf;

use clap::{Args, ValueEnum};
use qdburst::heterogeneous::{
    build_group_bound, convolve_groups, evaluate_group, union_bound_combine, GroupBound, GroupMethod,
};
use qdburst::homogeneous::{same_period_dkw_curve, same_period_exact_curve};
use qdburst::rational::{int, to_f64, Rational};
use qdburst::{validate_scenario, FlowGroupSpec, ScenarioSpec};

use crate::commands::{burst_table, simulate, warn_trivial_dkw, write_file};
use crate::table::{Cell, Format, Table};
use crate::{CliError, Methods, SimArgs};

const DEFAULT_SWEEP: &str = "2,3,5,10,20,50,100,200,500,1000,2000,3000";

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Panel {
    /// Tail bounds and simulation for one homogeneous group.
    #[value(name = "1a")]
    Homogeneous,
    /// Quasi-deterministic burst against the number of flows.
    #[value(name = "1b")]
    BurstSweep,
    /// Convolution against union bound for a split population.
    #[value(name = "2a")]
    Splits,
    /// Same-period bound against convolution for mixed packet sizes.
    #[value(name = "2b")]
    MixedSizes,
}

impl Panel {
    fn file_stem(self) -> &'static str {
        match self {
            Panel::Homogeneous => "fig1a",
            Panel::BurstSweep => "fig1b",
            Panel::Splits => "fig2a",
            Panel::MixedSizes => "fig2b",
        }
    }
}

#[derive(Args)]
pub struct FigureArgs {
    /// Panels to write; all of them by default.
    #[arg(long, value_enum, value_delimiter = ',')]
    panel: Vec<Panel>,
    #[arg(long, default_value = "figures")]
    out_dir: PathBuf,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    #[command(flatten)]
    sim: SimArgs,
    /// Flows in panel 1a.
    #[arg(long, default_value_t = 250)]
    flows: u64,
    /// Flow counts swept in panel 1b.
    #[arg(long, value_delimiter = ',', default_value = DEFAULT_SWEEP)]
    sweep: Vec<u64>,
    /// Violation probability in panel 1b.
    #[arg(long, default_value_t = 1e-7)]
    eps: f64,
    /// Population split in panel 2a.
    #[arg(long, default_value_t = 1000)]
    total_flows: u64,
    /// Group counts in panel 2a; each must divide --total-flows.
    #[arg(long, value_delimiter = ',', default_value = "1,2,4,5,8")]
    splits: Vec<u64>,
}

pub fn run(args: FigureArgs) -> Result<(), CliError> {
    let panels = if args.panel.is_empty() { Panel::value_variants().to_vec() } else { args.panel.clone() };
    fs::create_dir_all(&args.out_dir)
        .map_err(|e| CliError::Io { path: args.out_dir.display().to_string(), source: e })?;
    for panel in panels {
        let table = match panel {
            Panel::Homogeneous => homogeneous(&args)?,
            Panel::BurstSweep => burst_table(&args.sweep, &int(1), args.eps, Methods::Both)?,
            Panel::Splits => splits(&args)?,
            Panel::MixedSizes => mixed_sizes()?,
        };
        let path = args.out_dir.join(format!("{}.{}", panel.file_stem(), args.format.extension()));
        write_file(&table, args.format, &path)?;
        eprintln!("wrote {}", path.display());
    }
    Ok(())
}

/// Columns `b,eps_dkw,eps_exact,tail_emp,band` for `n` flows of unit size and period.
fn homogeneous(args: &FigureArgs) -> Result<Table, CliError> {
    let group = FlowGroupSpec::new(args.flows, int(1), int(1));
    let s = validate_scenario(&ScenarioSpec::new(vec![group.clone()], None))?;
    let grid: Vec<u64> = (0..=s.grid_len()).collect();
    warn_trivial_dkw(&s, &grid);
    let dkw = evaluate_group(&group, &s.quantum, GroupMethod::Dkw, &grid)?;
    let exact = evaluate_group(&group, &s.quantum, GroupMethod::Exact, &grid)?;
    let tail = simulate(&s, &grid, args.sim)?;
    let mut table = Table::new(vec!["b", "eps_dkw", "eps_exact", "tail_emp", "band"]);
    for (i, k) in grid.iter().enumerate() {
        table.push(vec![
            Cell::Int(*k),
            Cell::Prob(dkw.eps[i]),
            Cell::Prob(exact.eps[i]),
            Cell::Prob(tail.tail[i]),
            Cell::Prob(tail.band_halfwidth),
        ]);
    }
    Ok(table)
}

/// Columns `groups,b,eps_conv,eps_union`, dkw bound per group.
fn splits(args: &FigureArgs) -> Result<Table, CliError> {
    let total = args.total_flows;
    let mut table = Table::new(vec!["groups", "b", "eps_conv", "eps_union"]);
    for &g in &args.splits {
        if g == 0 || !total.is_multiple_of(g) {
            return Err(CliError::arg(format!("split {g} does not divide {total} flows")));
        }
        let group = build_group_bound(&FlowGroupSpec::new(total / g, int(1), int(1)), &int(1), GroupMethod::Dkw)?;
        let bounds: Vec<GroupBound> = (0..g).map(|_| group.clone()).collect();
        let conv = convolve_groups(&bounds)?;
        let union = union_bound_combine(&bounds)?;
        for b in 0..=total {
            table.push(vec![Cell::Int(g), Cell::Int(b), Cell::Prob(conv.value_at(b)), Cell::Prob(union.value_at(b))]);
        }
    }
    Ok(table)
}

/// Columns `layout,b,eps_dkw,eps_exact,eps_conv`: the two same-period bounds
/// and the convolution of exact per-group bounds, for groups `1..=g` of
/// packet size equal to the group index.
fn mixed_sizes() -> Result<Table, CliError> {
    let mut table = Table::new(vec!["layout", "b", "eps_dkw", "eps_exact", "eps_conv"]);
    for (groups, per_group) in [(10u64, 10u64), (5, 20)] {
        let mut sizes: Vec<Rational> = Vec::new();
        let mut bounds = Vec::new();
        for size in (1..=groups as i64).rev() {
            sizes.extend(std::iter::repeat_n(int(size), per_group as usize));
            bounds.push(build_group_bound(
                &FlowGroupSpec::new(per_group, int(1), int(size)),
                &int(1),
                GroupMethod::Exact,
            )?);
        }
        let total = sizes.iter().map(to_f64).sum::<f64>() as u64;
        let grid: Vec<u64> = (0..=total).collect();
        let dkw = same_period_dkw_curve(&sizes, &int(1), &grid)?;
        let exact = same_period_exact_curve(&sizes, &int(1), &grid)?;
        let conv = convolve_groups(&bounds)?;
        let layout = format!("{groups}x{per_group}");
        for (i, b) in grid.iter().enumerate() {
            table.push(vec![
                Cell::Text(layout.clone()),
                Cell::Int(*b),
                Cell::Prob(dkw.eps[i]),
                Cell::Prob(to_f64(&exact.eps[i])),
                Cell::Prob(conv.value_at(*b)),
            ]);
        }
    }
    Ok(table)
}
